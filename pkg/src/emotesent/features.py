"""N-gram vocabularies and sparse count vectors.

Each feature is tagged by emote involvement: unigram emote features are
"emote only", bigrams containing at least one emote are "emote+", everything
else is "other". Bigrams never cross message boundaries and no padding tokens
are used.
"""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import ConfigError
from .tokenizer import TokenKind

VOCAB_FORMAT_VERSION = 1


class FeatureKind(Enum):
    EMOTE_ONLY = "emote_only"
    EMOTE_PLUS = "emote_plus"
    OTHER = "other"


@dataclass
class NgramVocab:
    index: dict = field(default_factory=dict)   # ngram tuple -> dense index
    kinds: list = field(default_factory=list)   # FeatureKind per index
    order: int = 2                              # 1 = unigrams, 2 = uni+bi
    min_count: int = 1

    def __len__(self):
        return len(self.index)

    def ngram_at(self, idx):
        # index is insertion-ordered with dense values 0..N-1
        for ng, i in self.index.items():
            if i == idx:
                return ng
        raise KeyError(idx)

    @property
    def ngrams(self):
        out = [None] * len(self.index)
        for ng, i in self.index.items():
            out[i] = ng
        return out

    def kind_fractions(self):
        total = len(self.kinds)
        fracs = {k: 0.0 for k in FeatureKind}
        for k in self.kinds:
            fracs[k] += 1.0
        return {k: v / total for k, v in fracs.items()} if total else fracs

    def to_json_dict(self):
        return {
            "version": VOCAB_FORMAT_VERSION,
            "order": self.order,
            "min_count": self.min_count,
            "entries": [{"ngram": list(ng), "index": i,
                         "kind": self.kinds[i].value}
                        for ng, i in self.index.items()],
        }

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, ensure_ascii=False)

    @classmethod
    def from_json_dict(cls, blob):
        vocab = cls(order=blob["order"], min_count=blob["min_count"])
        vocab.kinds = [None] * len(blob["entries"])
        for e in blob["entries"]:
            vocab.index[tuple(e["ngram"])] = e["index"]
            vocab.kinds[e["index"]] = FeatureKind(e["kind"])
        return vocab

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls.from_json_dict(json.load(f))

    def content_hash(self):
        blob = json.dumps(self.to_json_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def _ngram_kind(kinds):
    if len(kinds) == 1:
        return FeatureKind.EMOTE_ONLY if kinds[0] is TokenKind.EMOTE else FeatureKind.OTHER
    if any(k is TokenKind.EMOTE for k in kinds):
        return FeatureKind.EMOTE_PLUS
    return FeatureKind.OTHER


def _iter_ngrams(tokens, order):
    for tok in tokens:
        yield (tok.text,), (tok.kind,)
    if order >= 2:
        for a, b in zip(tokens, tokens[1:]):
            yield (a.text, b.text), (a.kind, b.kind)


def build_vocab(corpus, order=2, min_count=1):
    """Build an n-gram vocabulary from processed token sequences.

    Indices are assigned in first-occurrence order, so the result is fully
    deterministic for a given corpus. Feature kinds come from the kinds seen
    at the n-gram's first occurrence.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 (unigrams) or 2 (unigrams+bigrams)")
    counts = {}
    first_kinds = {}
    for tokens in corpus:
        for ngram, kinds in _iter_ngrams(tokens, order):
            if ngram not in counts:
                counts[ngram] = 0
                first_kinds[ngram] = _ngram_kind(kinds)
            counts[ngram] += 1
    vocab = NgramVocab(order=order, min_count=min_count)
    for ngram, c in counts.items():
        if c >= min_count:
            vocab.index[ngram] = len(vocab.index)
            vocab.kinds.append(first_kinds[ngram])
    if not vocab.index:
        raise ConfigError("vocabulary is empty after min_count thresholding")
    return vocab


def vectorize(tokens, vocab, binary=False):
    """Sparse count vector of in-vocab n-grams; OOV n-grams are ignored."""
    vec = {}
    for ngram, _ in _iter_ngrams(tokens, vocab.order):
        idx = vocab.index.get(ngram)
        if idx is not None:
            vec[idx] = 1 if binary else vec.get(idx, 0) + 1
    return vec
