"""Emote pseudo-dictionary: per-emote sentiment inferred from the valences
of its sentiment-tagged embedding neighbors.

For each emote we scan the store's neighbors in cosine-rank order up to a
hard cap, keep the first k that are non-emote tokens with a lexicon valence,
and average their valences. Emotes with no tagged neighbor inside the cap
are omitted; emotes with partial evidence (1..k-1 tagged neighbors) keep
whatever evidence exists.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EvaluationError
from .tokenizer import TokenKind

PSEUDODICT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class PseudoDictConfig:
    k: int = 5
    search_cap: int = 1000
    distance_weighted: bool = False  # off by default; plain mean works best

    def __post_init__(self):
        if not 1 <= self.k <= self.search_cap:
            raise ConfigError("need 1 <= k <= search_cap")


@dataclass
class PseudoDictEntry:
    emote: str
    valence: float
    evidence: list = field(default_factory=list)  # (token, cos sim, valence)


def _entry_from_evidence(emote, evidence, distance_weighted):
    vals = np.array([v for _, _, v in evidence])
    if distance_weighted:
        sims = np.array([max(s, 0.0) for _, s, _ in evidence])
        weights = sims / sims.sum() if sims.sum() > 0 else None
        valence = float(np.average(vals, weights=weights))
    else:
        valence = float(vals.mean())
    return PseudoDictEntry(emote=emote, valence=valence, evidence=evidence)


def _gather_evidence(store, query, lexicon, config):
    """First-k lexicon-tagged non-emote tokens among the query's nearest
    search_cap neighbors (cosine rank order, string tie-break)."""
    order, sims = store.ranked_neighbors(store.vector(query), exclude=(query,))
    evidence = []
    for i in order[:config.search_cap]:
        tok = store.tokens[i]
        if store.kinds[i] is TokenKind.EMOTE:
            continue
        val = lexicon.get(tok)
        if val is None:
            continue
        evidence.append((tok, float(sims[i]), float(val)))
        if len(evidence) == config.k:
            break
    return evidence


def build_pseudodict(store, lexicon, config=None):
    """Infer a valence for every emote-kind token in the store.

    Output map is assembled in emote string order; emotes with zero tagged
    neighbors inside the cap are omitted.
    """
    config = config or PseudoDictConfig()
    if len(lexicon) == 0:
        raise ConfigError("cannot build a pseudo-dictionary from an empty lexicon")
    result = {}
    emotes = sorted(t for t, k in zip(store.tokens, store.kinds)
                    if k is TokenKind.EMOTE)
    for emote in emotes:
        evidence = _gather_evidence(store, emote, lexicon, config)
        if evidence:
            result[emote] = _entry_from_evidence(emote, evidence,
                                                 config.distance_weighted)
    return result


def infer_word_valences(store, lexicon, config=None):
    """Leave-one-out inference for lexicon words present in the store: each
    word's valence is re-derived from its tagged neighbors, its own lexicon
    entry excluded (the query token never appears in its own neighbor list).
    Used for the self-test against the reference lexicon."""
    config = config or PseudoDictConfig()
    if len(lexicon) == 0:
        raise ConfigError("empty lexicon")
    out = {}
    for token, kind in zip(store.tokens, store.kinds):
        if kind is TokenKind.EMOTE or token not in lexicon:
            continue
        evidence = _gather_evidence(store, token, lexicon, config)
        if evidence:
            out[token] = _entry_from_evidence(token, evidence,
                                              config.distance_weighted).valence
    return out


def evaluate_pseudodict(inferred, reference):
    """RMSE between inferred valences and a reference map over their token
    overlap. `inferred` values may be PseudoDictEntry or plain floats."""
    sq_errs = []
    for token, value in inferred.items():
        if token not in reference:
            continue
        v = value.valence if isinstance(value, PseudoDictEntry) else float(value)
        sq_errs.append((v - reference[token]) ** 2)
    if not sq_errs:
        raise EvaluationError("no overlap between inferred and reference tokens")
    return float(np.sqrt(np.mean(sq_errs)))


def _as_entry(emote, value):
    if isinstance(value, PseudoDictEntry):
        return value
    return PseudoDictEntry(emote=emote, valence=float(value))


def save_pseudodict(pdict, tsv_path, json_path=None):
    """TSV `emote<TAB>valence<TAB>k_used` plus a JSON file with evidence.
    Values may be PseudoDictEntry or plain floats."""
    entries = {emote: _as_entry(emote, v) for emote, v in pdict.items()}
    with open(tsv_path, "w", encoding="utf-8") as f:
        for emote in sorted(entries):
            e = entries[emote]
            f.write(f"{emote}\t{e.valence:.6f}\t{len(e.evidence)}\n")
    if json_path:
        blob = {"version": PSEUDODICT_FORMAT_VERSION,
                "entries": {e.emote: {"valence": e.valence,
                                      "evidence": [[t, s, v] for t, s, v in e.evidence]}
                            for e in entries.values()}}
        with open(json_path, "w", encoding="utf-8") as f:
            json.dump(blob, f, ensure_ascii=False)


def load_pseudodict(json_path):
    with open(json_path, encoding="utf-8") as f:
        blob = json.load(f)
    return {emote: PseudoDictEntry(emote=emote, valence=d["valence"],
                                   evidence=[tuple(x) for x in d["evidence"]])
            for emote, d in blob["entries"].items()}


def load_pseudodict_tsv(tsv_path):
    out = {}
    with open(tsv_path, encoding="utf-8") as f:
        for line in f:
            parts = line.rstrip("\n").split("\t")
            if len(parts) >= 2:
                out[parts[0]] = PseudoDictEntry(emote=parts[0],
                                                valence=float(parts[1]))
    return out
