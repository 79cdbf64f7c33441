"""Corpus and model analysis: token-type statistics, Zipf rank-frequency
fits, neighbor-type distributions, sentiment-neighborhood histograms, and
top-feature rank histograms. Everything returns plot-ready tabular data;
no plotting engine is embedded."""

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as scipy_stats

from .errors import EvaluationError
from .features import FeatureKind
from .tokenizer import TokenKind

KINDS = (TokenKind.WORD, TokenKind.EMOTE, TokenKind.EMOJI, TokenKind.EMOTICON)

# Ternary valence partition: even thirds of [-1, 1] (width 0.66 each).
VALENCE_THIRD = 2.0 / 3.0


def valence_class(v):
    # boundaries at +-1/3 give three equal-width (0.66) classes
    if v < -1.0 / 3.0:
        return "negative"
    if v > 1.0 / 3.0:
        return "positive"
    return "neutral"


def token_type_stats(corpus):
    """Unique-token counts and fractions per kind over tokenized messages."""
    seen = {}
    for tokens in corpus:
        for tok in tokens:
            seen.setdefault(tok.text, tok.kind)
    counts = Counter(seen.values())
    total = sum(counts.values())
    return {kind: {"unique": counts.get(kind, 0),
                   "fraction": counts.get(kind, 0) / total if total else 0.0}
            for kind in KINDS}


@dataclass
class RankFrequencyFit:
    kind: str
    exponent: float       # magnitude of the log-log slope
    rank_range: tuple
    r_squared: float      # nan for degenerate (constant) distributions
    degenerate: bool = False


def zipf_fit(frequencies, kind="all", rank_range=None):
    """Least-squares power-law fit on (log rank, log frequency).

    `frequencies` is a token -> count map (or an iterable of counts). The
    default fit window is ranks 1..1e5 or the full range if smaller.
    """
    counts = sorted((frequencies.values() if hasattr(frequencies, "values")
                     else frequencies), reverse=True)
    if rank_range is None:
        rank_range = (1, min(len(counts), 100_000))
    lo, hi = rank_range
    window = counts[lo - 1:hi]
    if len(window) < 10:
        raise EvaluationError("need at least 10 ranks for a Zipf fit")
    ranks = np.arange(lo, lo + len(window))
    freqs = np.array(window, dtype=np.float64)
    if freqs.min() <= 0:
        raise EvaluationError("non-positive frequencies in fit window")
    if np.all(freqs == freqs[0]):
        return RankFrequencyFit(kind=kind, exponent=0.0,
                                rank_range=(lo, hi), r_squared=float("nan"),
                                degenerate=True)
    res = scipy_stats.linregress(np.log(ranks), np.log(freqs))
    return RankFrequencyFit(kind=kind, exponent=-float(res.slope),
                            rank_range=(lo, hi),
                            r_squared=float(res.rvalue) ** 2)


def top_tokens_per_kind(store, per_kind=1000):
    """Most frequent store tokens of each kind (the t-SNE style sample)."""
    sample = {}
    for kind in KINDS:
        idxs = [i for i, k in enumerate(store.kinds) if k is kind]
        idxs.sort(key=lambda i: (-store.freqs[i], store.tokens[i]))
        sample[kind] = [store.tokens[i] for i in idxs[:per_kind]]
    return sample


def neighbor_type_distribution(store, sample=None, per_kind=1000, k=100):
    """Per token kind: averaged kind fractions among each sampled token's k
    nearest neighbors. Each row sums to 1."""
    if sample is None:
        sample = top_tokens_per_kind(store, per_kind)
    rows = {}
    for kind, tokens in sample.items():
        if not tokens:
            continue
        acc = np.zeros(len(KINDS))
        for token in tokens:
            result = store.nearest(token, k)
            if not len(result):
                continue
            counts = Counter(nk for _, _, nk in result)
            frac = np.array([counts.get(nk, 0) for nk in KINDS], dtype=np.float64)
            acc += frac / frac.sum()
        rows[kind] = acc / len(tokens)
    return rows


def sentiment_neighborhood_histogram(store, valences, bins=20, neighbors=1000):
    """Histograms of tagged-neighbor valences, one per source valence class.

    For every store token with a valence, look at its `neighbors` nearest
    neighbors, keep those that also have a valence, and accumulate them into
    the histogram of the source token's class. Returns
    {class: (bin_edges, counts)}.
    """
    edges = np.linspace(-1.0, 1.0, bins + 1)
    hists = {c: np.zeros(bins, dtype=np.int64)
             for c in ("negative", "neutral", "positive")}
    get = valences.get
    for token in store.tokens:
        v = get(token)
        if v is None:
            continue
        cls = valence_class(v)
        for ntok, _, _ in store.nearest(token, neighbors):
            nv = get(ntok)
            if nv is None:
                continue
            b = min(bins - 1, int((nv + 1.0) / 2.0 * bins))
            hists[cls][b] += 1
    return {c: (edges, h) for c, h in hists.items()}


@dataclass
class RankHistogram:
    emote_ranks: list = field(default_factory=list)
    other_ranks: list = field(default_factory=list)

    def summary(self):
        out = {}
        for name, ranks in (("emote", self.emote_ranks),
                            ("other", self.other_ranks)):
            if ranks:
                out[name] = {"mean": float(np.mean(ranks)),
                             "median": float(np.median(ranks)),
                             "count": len(ranks)}
            else:
                out[name] = {"mean": float("nan"), "median": float("nan"),
                             "count": 0}
        return out


def top_feature_rank_histogram(report, top_n=100):
    """Rank positions of emote-kind vs other features among each head's
    top_n importances, pooled across the one-vs-rest heads."""
    hist = RankHistogram()
    for ranked in report.per_class.values():
        for rank, (_, kind, _) in enumerate(ranked[:top_n]):
            if kind in (FeatureKind.EMOTE_ONLY, FeatureKind.EMOTE_PLUS):
                hist.emote_ranks.append(rank)
            else:
                hist.other_ranks.append(rank)
    return hist


def export_vectors(store, per_kind=1000):
    """Rows of (token, kind, freq, vector) for external projection tools."""
    sample = top_tokens_per_kind(store, per_kind)
    rows = []
    for kind in KINDS:
        for token in sample.get(kind, []):
            i = store.token_index[token]
            rows.append((token, kind.value, int(store.freqs[i]),
                         store.vectors[i].tolist()))
    return rows
