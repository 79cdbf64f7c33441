"""Exception types shared across the toolkit."""


class EmotesentError(Exception):
    """Base class for all toolkit errors."""


class FormatError(EmotesentError):
    """Input file is structurally broken (e.g. mostly-malformed chat log)."""


class ConfigError(EmotesentError):
    """Invalid or degenerate configuration (empty lexicon, empty vocab, ...)."""


class SplitError(EmotesentError):
    """Stratified split preconditions violated."""


class TrainingError(EmotesentError):
    """Degenerate training data (single class, empty corpus, ...)."""


class NotFoundError(EmotesentError):
    """Lookup of a token/model that does not exist."""


class EvaluationError(EmotesentError):
    """Evaluation preconditions violated (empty overlap, empty test set)."""
