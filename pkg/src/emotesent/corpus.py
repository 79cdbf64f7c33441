"""Data loading: chat logs, labeled datasets, sentiment lexicons, emote
dictionaries, and deterministic stratified splits.

All loaders are single-threaded and return immutable-ish containers that are
safe to share between threads afterwards.
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatError, SplitError


class SentimentLabel(Enum):
    NEGATIVE = -1
    NEUTRAL = 0
    POSITIVE = 1

    @classmethod
    def from_string(cls, s):
        key = s.strip().lower()
        table = {"positive": cls.POSITIVE, "neutral": cls.NEUTRAL,
                 "negative": cls.NEGATIVE, "pos": cls.POSITIVE,
                 "neu": cls.NEUTRAL, "neg": cls.NEGATIVE,
                 "1": cls.POSITIVE, "0": cls.NEUTRAL, "-1": cls.NEGATIVE}
        if key not in table:
            raise ValueError(f"unknown sentiment label: {s!r}")
        return table[key]

    @property
    def code(self):
        return self.value


# Fixed class order used everywhere (tie-breaks, one-hot layouts, reports).
CLASS_ORDER = (SentimentLabel.NEGATIVE, SentimentLabel.NEUTRAL,
               SentimentLabel.POSITIVE)
CLASS_INDEX = {lab: i for i, lab in enumerate(CLASS_ORDER)}


@dataclass(frozen=True)
class ChatMessage:
    channel_id: str
    timestamp: int  # UTC milliseconds
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("chat message text is empty")
        if self.timestamp < 0:
            raise ValueError("negative timestamp")


@dataclass(frozen=True)
class LabeledExample:
    text: str
    label: SentimentLabel


@dataclass
class SentimentLexicon:
    """token -> valence in [-1, 1], with a source tag per entry."""

    entries: dict = field(default_factory=dict)
    sources: dict = field(default_factory=dict)

    def __contains__(self, token):
        return token in self.entries

    def __len__(self):
        return len(self.entries)

    def get(self, token, default=None):
        return self.entries.get(token, default)

    def merge(self, other):
        """Fold another lexicon in; other's entries win on conflict."""
        self.entries.update(other.entries)
        self.sources.update(other.sources)
        return self

    def to_json_dict(self):
        return {t: round(v, 6) for t, v in self.entries.items()}

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"entries": self.to_json_dict(), "sources": self.sources},
                      f, ensure_ascii=False, indent=0)

    @classmethod
    def load_saved(cls, path):
        with open(path, encoding="utf-8") as f:
            blob = json.load(f)
        return cls(entries=dict(blob["entries"]), sources=dict(blob.get("sources", {})))


@dataclass
class EmoteDictionary:
    codes: set = field(default_factory=set)
    sources: dict = field(default_factory=dict)  # code -> first provider seen

    def __contains__(self, code):
        return code in self.codes  # case-sensitive on purpose

    def __len__(self):
        return len(self.codes)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


def load_chat_log(path):
    """Read a JSONL chat log. Returns (messages, n_skipped).

    Malformed lines are skipped and counted; if more than half the non-empty
    lines are malformed the file is rejected as a whole.
    """
    messages = []
    skipped = 0
    total = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            total += 1
            try:
                obj = json.loads(line)
                msg = ChatMessage(channel_id=str(obj["channel"]),
                                  timestamp=int(obj["ts"]),
                                  text=str(obj["text"]))
            except (ValueError, KeyError, TypeError):
                skipped += 1
                continue
            messages.append(msg)
    if total > 0 and skipped * 2 > total:
        raise FormatError(f"{path}: {skipped}/{total} lines malformed")
    return messages, skipped


def load_labeled_tsv(path):
    """Read `text<TAB>label` rows. Returns (examples, n_skipped)."""
    examples = []
    skipped = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                skipped += 1
                continue
            text = parts[0]
            try:
                label = SentimentLabel.from_string(parts[1])
            except ValueError:
                skipped += 1
                continue
            if not text.strip():
                skipped += 1
                continue
            examples.append(LabeledExample(text=text, label=label))
    return examples, skipped


def load_lexicon(path, format="vader_tsv", source="vader", scale=4.0):
    """Load a sentiment lexicon.

    vader_tsv rows are `token<TAB>valence[<TAB>...ignored]` on the native
    [-scale, scale] range; valences are divided by `scale` and clamped into
    [-1, 1]. JSON files are flat token -> valence maps assumed to already be
    on [-1, 1] (out-of-range values are clamped). Duplicate tokens resolve
    last-wins. Returns (lexicon, n_skipped, n_duplicates).
    """
    lex = SentimentLexicon()
    skipped = 0
    duplicates = 0
    if format == "vader_tsv":
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                parts = line.split("\t")
                if len(parts) < 2:
                    skipped += 1
                    continue
                token = parts[0]
                try:
                    raw = float(parts[1])
                except ValueError:
                    skipped += 1
                    continue
                if math.isnan(raw) or math.isinf(raw):
                    skipped += 1
                    continue
                if token in lex.entries:
                    duplicates += 1
                lex.entries[token] = max(-1.0, min(1.0, raw / scale))
                lex.sources[token] = source
    elif format == "json":
        with open(path, encoding="utf-8") as f:
            blob = json.load(f)
        if not isinstance(blob, dict):
            raise FormatError(f"{path}: expected a JSON object")
        for token, raw in blob.items():
            try:
                v = float(raw)
            except (TypeError, ValueError):
                skipped += 1
                continue
            if math.isnan(v) or math.isinf(v):
                skipped += 1
                continue
            lex.entries[token] = max(-1.0, min(1.0, v))
            lex.sources[token] = source
    else:
        raise ValueError(f"unknown lexicon format: {format}")
    return lex, skipped, duplicates


def load_emote_dictionary(paths, sources=None):
    """Union plain-text emote lists (one code per line, `#` comments ok).

    The source recorded for a duplicated code is the first provider seen.
    """
    paths = [Path(p) for p in paths]
    if sources is None:
        sources = [p.stem for p in paths]
    dictionary = EmoteDictionary()
    for path, src in zip(paths, sources):
        with open(path, encoding="utf-8") as f:
            for line in f:
                code = line.strip()
                if not code or code.startswith("#"):
                    continue
                if code not in dictionary.codes:
                    dictionary.codes.add(code)
                    dictionary.sources[code] = src
    if not dictionary.codes:
        raise ConfigError("emote dictionary union is empty")
    return dictionary


def stratified_split(data, spec):
    """Deterministic stratified train/test split.

    Per class, the test set gets floor((1 - train_fraction) * n) examples and
    the remainder stays in train, so the realized train fraction is never
    below the requested one.
    """
    by_label = {}
    for i, ex in enumerate(data):
        by_label.setdefault(ex.label, []).append(i)
    for label, idxs in by_label.items():
        if len(idxs) < 2:
            raise SplitError(f"class {label.name} has {len(idxs)} example(s); need >=2")
    rng = np.random.default_rng(spec.seed)
    train_idx, test_idx = [], []
    for label in CLASS_ORDER:
        if label not in by_label:
            continue
        idxs = np.array(by_label[label])
        rng.shuffle(idxs)
        # tiny eps so e.g. (1 - 0.8) * 5 floors to 1, not 0
        n_test = int(math.floor((1.0 - spec.train_fraction) * len(idxs) + 1e-9))
        test_idx.extend(idxs[:n_test].tolist())
        train_idx.extend(idxs[n_test:].tolist())
    train_idx.sort()
    test_idx.sort()
    return [data[i] for i in train_idx], [data[i] for i in test_idx]
