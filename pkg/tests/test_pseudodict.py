import numpy as np
import pytest

from emotesent.errors import ConfigError, EvaluationError
from emotesent.pseudodict import (PseudoDictConfig, PseudoDictEntry,
                                  build_pseudodict, evaluate_pseudodict,
                                  infer_word_valences, load_pseudodict,
                                  load_pseudodict_tsv, save_pseudodict)
from emotesent.tokenizer import TokenKind
from conftest import make_lexicon, make_store


def brute_force_pseudodict(store, lexicon, config):
    """Independent reference: full similarity sort, filter by lexicon,
    take first k inside the cap, average."""
    out = {}
    for qi, (emote, kind) in enumerate(zip(store.tokens, store.kinds)):
        if kind is not TokenKind.EMOTE:
            continue
        qv = np.asarray(store.vectors[qi], dtype=np.float64)
        qn = np.linalg.norm(qv)
        scored = []
        for i, tok in enumerate(store.tokens):
            if i == qi:
                continue
            v = np.asarray(store.vectors[i], dtype=np.float64)
            n = np.linalg.norm(v)
            sim = float(v @ qv / (n * qn)) if n > 0 and qn > 0 else 0.0
            scored.append((tok, sim, i))
        scored.sort(key=lambda t: (-t[1], t[0]))
        evidence = []
        for tok, sim, i in scored[:config.search_cap]:
            if store.kinds[i] is TokenKind.EMOTE:
                continue
            if tok not in lexicon:
                continue
            evidence.append((tok, sim, lexicon.get(tok)))
            if len(evidence) == config.k:
                break
        if evidence:
            out[emote] = sum(v for _, _, v in evidence) / len(evidence)
    return out


def star_store(valences, extra_unlabeled=0):
    """One emote at the origin direction, word neighbors at decreasing
    cosine similarity in 2-D, in the given valence order."""
    tokens = ["EMO"]
    vectors = [[1.0, 0.0]]
    kinds = [TokenKind.EMOTE]
    angles = np.linspace(0.1, 1.2, len(valences) + extra_unlabeled)
    entries = {}
    for i, ang in enumerate(angles):
        tok = f"w{i}"
        tokens.append(tok)
        vectors.append([np.cos(ang), np.sin(ang)])
        kinds.append(TokenKind.WORD)
        if i < len(valences):
            entries[tok] = valences[i]
    return make_store(tokens, vectors, kinds), make_lexicon(entries)


class TestBuild:
    def test_mean_of_five(self):
        store, lex = star_store([0.4, 0.6, 0.2, 0.8, 0.5])
        pdict = build_pseudodict(store, lex, PseudoDictConfig(k=5))
        assert pdict["EMO"].valence == pytest.approx(0.5)
        assert len(pdict["EMO"].evidence) == 5

    def test_partial_evidence(self):
        store, lex = star_store([-1.0, -0.5])
        pdict = build_pseudodict(store, lex, PseudoDictConfig(k=5))
        assert pdict["EMO"].valence == pytest.approx(-0.75)
        assert len(pdict["EMO"].evidence) == 2

    def test_no_tagged_neighbors_omitted(self):
        store, lex = star_store([], extra_unlabeled=3)
        lex = make_lexicon({"unrelated": 0.5})
        pdict = build_pseudodict(store, lex, PseudoDictConfig(k=5))
        assert pdict == {}

    def test_search_cap_limits(self):
        # tagged word is beyond the cap, so it must not be used
        store, lex = star_store([0.9], extra_unlabeled=0)
        pdict_capped = build_pseudodict(store, lex,
                                        PseudoDictConfig(k=1, search_cap=1))
        assert "EMO" in pdict_capped  # the single word is rank 1
        tokens = ["EMO", "far", "near1", "near2"]
        vectors = [[1, 0], [-1, 0.1], [0.99, 0.1], [0.98, 0.1]]
        kinds = [TokenKind.EMOTE] + [TokenKind.WORD] * 3
        store2 = make_store(tokens, vectors, kinds)
        lex2 = make_lexicon({"far": -1.0})
        assert build_pseudodict(store2, lex2,
                                PseudoDictConfig(k=1, search_cap=2)) == {}

    def test_other_emotes_never_evidence(self):
        tokens = ["EMO", "OtherEmote", "word"]
        vectors = [[1, 0], [0.999, 0.01], [0.9, 0.2]]
        kinds = [TokenKind.EMOTE, TokenKind.EMOTE, TokenKind.WORD]
        store = make_store(tokens, vectors, kinds)
        # the other emote's code happens to be in the lexicon too
        lex = make_lexicon({"OtherEmote": 1.0, "word": -0.4})
        pdict = build_pseudodict(store, lex, PseudoDictConfig(k=2))
        assert [t for t, _, _ in pdict["EMO"].evidence] == ["word"]

    def test_empty_lexicon_rejected(self):
        store, _ = star_store([0.5])
        with pytest.raises(ConfigError):
            build_pseudodict(store, make_lexicon({}), PseudoDictConfig())

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            PseudoDictConfig(k=10, search_cap=5)
        with pytest.raises(ConfigError):
            PseudoDictConfig(k=0)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(20, 120))
        tokens = [f"t{i:03d}" for i in range(n)]
        kinds = [TokenKind.EMOTE if rng.random() < 0.3 else TokenKind.WORD
                 for _ in range(n)]
        vectors = rng.standard_normal((n, 6))
        store = make_store(tokens, vectors, kinds)
        lex_tokens = [t for t, k in zip(tokens, kinds)
                      if k is TokenKind.WORD and rng.random() < 0.5]
        lex = make_lexicon({t: float(rng.uniform(-1, 1)) for t in lex_tokens})
        if not lex.entries:
            return
        config = PseudoDictConfig(k=int(rng.integers(1, 6)),
                                  search_cap=int(rng.integers(10, n + 5)))
        pdict = build_pseudodict(store, lex, config)
        expected = brute_force_pseudodict(store, lex, config)
        assert set(pdict) == set(expected)
        for emote, entry in pdict.items():
            assert entry.valence == pytest.approx(expected[emote], abs=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_valence_within_evidence_bounds(self, seed):
        rng = np.random.default_rng(100 + seed)
        store, lex = star_store(list(rng.uniform(-1, 1, size=8)))
        pdict = build_pseudodict(store, lex, PseudoDictConfig(k=4))
        for entry in pdict.values():
            vals = [v for _, _, v in entry.evidence]
            assert min(vals) - 1e-12 <= entry.valence <= max(vals) + 1e-12
            assert -1.0 <= entry.valence <= 1.0

    def test_evidence_similarities_non_increasing(self):
        store, lex = star_store([0.1, 0.2, 0.3, 0.4])
        pdict = build_pseudodict(store, lex, PseudoDictConfig(k=4))
        sims = [s for _, s, _ in pdict["EMO"].evidence]
        assert sims == sorted(sims, reverse=True)

    def test_distance_weighted_flag(self):
        store, lex = star_store([1.0, -1.0])
        plain = build_pseudodict(store, lex, PseudoDictConfig(k=2))
        weighted = build_pseudodict(
            store, lex, PseudoDictConfig(k=2, distance_weighted=True))
        assert plain["EMO"].valence == pytest.approx(0.0)
        # closer neighbor is positive, so the weighted mean leans positive
        assert weighted["EMO"].valence > 0.0


class TestEvaluate:
    def test_identical_rmse_zero(self):
        inferred = {"a": 0.3, "b": -0.2}
        assert evaluate_pseudodict(inferred, dict(inferred)) == 0.0

    def test_hand_rmse(self):
        inferred = {"a": 0.5, "b": -0.5}
        reference = {"a": 0.0, "b": 0.0}
        assert evaluate_pseudodict(inferred, reference) == pytest.approx(0.5)

    def test_entries_accepted(self):
        inferred = {"a": PseudoDictEntry("a", 0.5, [])}
        assert evaluate_pseudodict(inferred, {"a": 0.5}) == 0.0

    def test_empty_overlap_rejected(self):
        with pytest.raises(EvaluationError):
            evaluate_pseudodict({"a": 0.1}, {"b": 0.1})

    def test_leave_one_out_word_inference(self):
        # word w0's own entry must not appear in its evidence
        store, lex = star_store([0.8, 0.2])
        inferred = infer_word_valences(store, lex, PseudoDictConfig(k=5))
        assert inferred["w0"] == pytest.approx(0.2)  # only w1 is evidence
        assert inferred["w1"] == pytest.approx(0.8)


def test_save_load_round_trip(tmp_path):
    store, lex = star_store([0.4, -0.6, 0.1])
    pdict = build_pseudodict(store, lex, PseudoDictConfig(k=3))
    save_pseudodict(pdict, tmp_path / "pd.tsv", tmp_path / "pd.json")
    loaded = load_pseudodict(tmp_path / "pd.json")
    assert loaded.keys() == pdict.keys()
    assert loaded["EMO"].valence == pytest.approx(pdict["EMO"].valence)
    assert len(loaded["EMO"].evidence) == 3
    tsv = load_pseudodict_tsv(tmp_path / "pd.tsv")
    assert tsv["EMO"].valence == pytest.approx(pdict["EMO"].valence, abs=1e-6)
