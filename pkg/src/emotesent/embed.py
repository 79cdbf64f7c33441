"""Skip-gram-with-negative-sampling embeddings over tokenized chat, plus
exact cosine k-NN queries and vector arithmetic.

Training is the standard SGNS recipe: dynamic window sampling, frequent-token
subsampling, negatives drawn from the unigram^0.75 distribution, linear
learning-rate decay. Updates are applied in vectorized minibatches; with a
single worker the result is fully deterministic for a given seed.

The k-NN backend is an exact brute-force scan (matrix product on normalized
vectors) with ties broken by token string order.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import NotFoundError, TrainingError
from .tokenizer import TokenKind

EMBED_FORMAT_VERSION = 1


@dataclass
class EmbedConfig:
    dim: int = 100
    window: int = 5
    min_count: int = 30
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    subsample_t: float = 1e-4
    seed: int = 0

    def to_json_dict(self):
        return dict(self.__dict__)


@dataclass
class NeighborResult:
    """Ranked (token, cosine similarity, kind) triples, similarity
    non-increasing, query excluded."""
    neighbors: list = field(default_factory=list)

    def tokens(self):
        return [t for t, _, _ in self.neighbors]

    def __iter__(self):
        return iter(self.neighbors)

    def __len__(self):
        return len(self.neighbors)


class EmbeddingStore:
    def __init__(self, tokens, vectors, kinds, freqs, config=None):
        self.tokens = list(tokens)
        self.vectors = np.asarray(vectors, dtype=np.float32)
        self.kinds = list(kinds)
        self.freqs = np.asarray(freqs, dtype=np.int64)
        self.config = config
        self.token_index = {t: i for i, t in enumerate(self.tokens)}
        self._normed = None
        self._token_rank = None

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.token_index

    @property
    def dim(self):
        return self.vectors.shape[1]

    def vector(self, token):
        idx = self.token_index.get(token)
        if idx is None:
            raise NotFoundError(f"token not in embedding store: {token!r}")
        return self.vectors[idx]

    def _normalized(self):
        if self._normed is None:
            norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
            norms[norms == 0] = 1.0
            self._normed = self.vectors / norms
        return self._normed

    def _ranks(self):
        # rank of each token in string sort order, for deterministic ties
        if self._token_rank is None:
            order = sorted(range(len(self.tokens)), key=lambda i: self.tokens[i])
            ranks = np.empty(len(self.tokens), dtype=np.int64)
            for r, i in enumerate(order):
                ranks[i] = r
            self._token_rank = ranks
        return self._token_rank

    def similarities(self, query_vec):
        q = np.asarray(query_vec, dtype=np.float32)
        qn = np.linalg.norm(q)
        if qn == 0:
            return np.zeros(len(self.tokens), dtype=np.float32)
        return self._normalized() @ (q / qn)

    def ranked_neighbors(self, query_vec, exclude=()):
        """All tokens ordered by (similarity desc, token string asc),
        excluding the given token strings. Returns an index array."""
        sims = self.similarities(query_vec)
        order = np.lexsort((self._ranks(), -sims.astype(np.float64)))
        if exclude:
            drop = {self.token_index[t] for t in exclude if t in self.token_index}
            if drop:
                mask = np.fromiter((i not in drop for i in order), dtype=bool,
                                   count=len(order))
                order = order[mask]
        return order, sims

    def nearest(self, query, k, kinds=None):
        """Top-k cosine neighbors of a token (or raw vector). `kinds` is an
        optional set of TokenKind to keep."""
        if isinstance(query, str):
            vec = self.vector(query)
            exclude = (query,)
        else:
            vec = np.asarray(query, dtype=np.float32)
            if vec.shape != (self.dim,):
                raise ValueError(f"query vector must have dimension {self.dim}")
            exclude = ()
        order, sims = self.ranked_neighbors(vec, exclude=exclude)
        out = []
        for i in order:
            if kinds is not None and self.kinds[i] not in kinds:
                continue
            out.append((self.tokens[i], float(sims[i]), self.kinds[i]))
            if len(out) == k:
                break
        return NeighborResult(out)

    def analogy(self, positive, negative, k, kinds=None):
        """k-NN of sum(positive) - sum(negative), excluding the arguments."""
        for t in list(positive) + list(negative):
            if t not in self.token_index:
                raise NotFoundError(f"token not in embedding store: {t!r}")
        vec = np.zeros(self.dim, dtype=np.float32)
        for t in positive:
            vec += self.vector(t)
        for t in negative:
            vec -= self.vector(t)
        order, sims = self.ranked_neighbors(vec, exclude=tuple(positive) + tuple(negative))
        out = []
        for i in order:
            if kinds is not None and self.kinds[i] not in kinds:
                continue
            out.append((self.tokens[i], float(sims[i]), self.kinds[i]))
            if len(out) == k:
                break
        return NeighborResult(out)

    def save(self, path, sidecar_path=None):
        """w2v text format (`count dim` header then `token v1 ... vd` rows)
        plus a JSON sidecar with kinds/frequencies/config."""
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"{len(self.tokens)} {self.dim}\n")
            for tok, vec in zip(self.tokens, self.vectors):
                f.write(tok + " " + " ".join(f"{v:.6f}" for v in vec) + "\n")
        sidecar = sidecar_path or (str(path) + ".meta.json")
        meta = {"version": EMBED_FORMAT_VERSION,
                "config": self.config.to_json_dict() if self.config else None,
                "tokens": {t: {"kind": self.kinds[i].value,
                               "freq": int(self.freqs[i])}
                           for i, t in enumerate(self.tokens)}}
        with open(sidecar, "w", encoding="utf-8") as f:
            json.dump(meta, f, ensure_ascii=False)

    @classmethod
    def load(cls, path, sidecar_path=None):
        tokens, rows = [], []
        with open(path, encoding="utf-8") as f:
            header = f.readline().split()
            count, dim = int(header[0]), int(header[1])
            for line in f:
                parts = line.rstrip("\n").split(" ")
                tokens.append(parts[0])
                rows.append([float(v) for v in parts[1:]])
        if len(tokens) != count or (rows and len(rows[0]) != dim):
            raise ValueError(f"{path}: header does not match contents")
        sidecar = sidecar_path or (str(path) + ".meta.json")
        with open(sidecar, encoding="utf-8") as f:
            meta = json.load(f)
        kinds = [TokenKind(meta["tokens"][t]["kind"]) for t in tokens]
        freqs = [meta["tokens"][t]["freq"] for t in tokens]
        config = EmbedConfig(**meta["config"]) if meta.get("config") else None
        return cls(tokens, np.array(rows, dtype=np.float32), kinds, freqs,
                   config)


def _build_vocab(corpus, min_count):
    freqs = {}
    kinds = {}
    for tokens in corpus:
        for tok in tokens:
            if tok.text not in freqs:
                freqs[tok.text] = 0
                kinds[tok.text] = tok.kind
            freqs[tok.text] += 1
    kept = [t for t, c in freqs.items() if c >= min_count]
    return kept, freqs, kinds


@njit(cache=True)
def _sgns_update(W_in, W_out, centers, contexts, negatives, initial_lr,
                 min_lr, pairs_done, total_pairs):
    """Sequential SGD over (center, context) pairs with presampled
    negatives; one pair at a time, as in the original word2vec loop."""
    dim = W_in.shape[1]
    n_neg = negatives.shape[1]
    for p in range(len(centers)):
        frac = (pairs_done + p) / total_pairs
        lr = initial_lr * (1.0 - frac)
        if lr < min_lr:
            lr = min_lr
        c = centers[p]
        grad_v = np.zeros(dim)
        for s in range(n_neg + 1):
            o = contexts[p] if s == 0 else negatives[p, s - 1]
            label = 1.0 if s == 0 else 0.0
            dot = 0.0
            for d in range(dim):
                dot += W_in[c, d] * W_out[o, d]
            if dot > 30.0:
                f = 1.0
            elif dot < -30.0:
                f = 0.0
            else:
                f = 1.0 / (1.0 + np.exp(-dot))
            g = (label - f) * lr
            for d in range(dim):
                grad_v[d] += g * W_out[o, d]
                W_out[o, d] += g * W_in[c, d]
        for d in range(dim):
            W_in[c, d] += grad_v[d]


def train_embeddings(corpus, config=None):
    """Train SGNS embeddings over tokenized messages (lists of Token).

    Single-worker and deterministic per seed. Raises TrainingError when the
    corpus yields fewer than two vocabulary tokens.
    """
    config = config or EmbedConfig()
    corpus = list(corpus)
    vocab_tokens, freqs, kinds = _build_vocab(corpus, config.min_count)
    if len(vocab_tokens) < 2:
        raise TrainingError("corpus yields fewer than 2 tokens above min_count")
    tok2id = {t: i for i, t in enumerate(vocab_tokens)}
    counts = np.array([freqs[t] for t in vocab_tokens], dtype=np.float64)
    total = counts.sum()

    # noise distribution: unigram^0.75
    noise = counts ** 0.75
    noise_cum = np.cumsum(noise / noise.sum())

    # subsampling keep probability (t <= 0 disables subsampling)
    t = config.subsample_t
    if t > 0:
        f_rel = counts / total
        keep_prob = np.minimum(1.0, (np.sqrt(f_rel / t) + 1.0) * t / f_rel)
    else:
        keep_prob = np.ones(len(counts))

    sentences = []
    for tokens in corpus:
        ids = [tok2id[tok.text] for tok in tokens if tok.text in tok2id]
        if len(ids) >= 2:
            sentences.append(np.array(ids, dtype=np.int64))

    rng = np.random.default_rng(config.seed)
    dim = config.dim
    W_in = (rng.random((len(vocab_tokens), dim)) - 0.5) / dim
    W_out = np.zeros((len(vocab_tokens), dim))

    pairs_done = 0
    total_pairs_est = None  # set from the first epoch's realized pair count
    min_lr = config.initial_lr * 1e-4

    flat_all = np.concatenate(sentences)
    sid_all = np.concatenate([np.full(len(s), j, dtype=np.int64)
                              for j, s in enumerate(sentences)])

    for _ in range(config.epochs):
        # per-epoch subsampling, then compact within each sentence
        keep = rng.random(len(flat_all)) < keep_prob[flat_all]
        flat = flat_all[keep]
        sid = sid_all[keep]
        if len(flat) < 2:
            continue
        # dynamic window: each center position draws its own span
        spans = rng.integers(1, config.window + 1, size=len(flat))
        cen_parts, ctx_parts = [], []
        for d in range(1, config.window + 1):
            if d >= len(flat):
                break
            same = sid[:-d] == sid[d:]
            fwd = np.nonzero(same & (spans[:-d] >= d))[0]
            bwd = np.nonzero(same & (spans[d:] >= d))[0]
            cen_parts.extend((flat[fwd], flat[bwd + d]))
            ctx_parts.extend((flat[fwd + d], flat[bwd]))
        centers = np.concatenate(cen_parts) if cen_parts else np.empty(0, np.int64)
        contexts = np.concatenate(ctx_parts) if ctx_parts else np.empty(0, np.int64)
        if len(centers) == 0:
            continue
        if total_pairs_est is None:
            total_pairs_est = max(1, len(centers)) * config.epochs
        negs = np.searchsorted(noise_cum,
                               rng.random((len(centers), config.negatives)))
        _sgns_update(W_in, W_out, centers, contexts,
                     negs.astype(np.int64), config.initial_lr, min_lr,
                     pairs_done, total_pairs_est)
        pairs_done += len(centers)

    if not np.all(np.isfinite(W_in)):
        raise TrainingError("embedding training diverged (non-finite vectors)")
    return EmbeddingStore(vocab_tokens, W_in.astype(np.float32),
                          [kinds[t] for t in vocab_tokens],
                          [int(freqs[t]) for t in vocab_tokens], config)
