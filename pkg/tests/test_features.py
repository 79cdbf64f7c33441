import pytest

from emotesent.errors import ConfigError
from emotesent.features import (FeatureKind, NgramVocab, build_vocab,
                                vectorize)
from emotesent.tokenizer import Token, TokenKind


def msg(*pairs):
    return [Token(t, k) for t, k in pairs]


HI_KAPPA = msg(("hi", TokenKind.WORD), ("Kappa", TokenKind.EMOTE))


class TestBuildVocab:
    def test_uni_bi_kinds(self):
        vocab = build_vocab([HI_KAPPA], order=2, min_count=1)
        assert vocab.index == {("hi",): 0, ("Kappa",): 1, ("hi", "Kappa"): 2}
        assert vocab.kinds == [FeatureKind.OTHER, FeatureKind.EMOTE_ONLY,
                               FeatureKind.EMOTE_PLUS]

    def test_unigram_only(self):
        vocab = build_vocab([HI_KAPPA], order=1)
        assert len(vocab) == 2
        assert all(len(ng) == 1 for ng in vocab.index)

    def test_min_count_threshold_error(self):
        with pytest.raises(ConfigError):
            build_vocab([HI_KAPPA], order=2, min_count=2)

    def test_min_count_keeps_frequent(self):
        corpus = [HI_KAPPA, HI_KAPPA, msg(("rare", TokenKind.WORD))]
        vocab = build_vocab(corpus, order=1, min_count=2)
        assert ("rare",) not in vocab.index
        assert ("hi",) in vocab.index

    def test_bigrams_do_not_cross_messages(self):
        corpus = [msg(("a", TokenKind.WORD)), msg(("b", TokenKind.WORD))]
        vocab = build_vocab(corpus, order=2)
        assert ("a", "b") not in vocab.index

    def test_first_occurrence_order_deterministic(self):
        corpus = [HI_KAPPA, msg(("yo", TokenKind.WORD))]
        a = build_vocab(corpus, order=2)
        b = build_vocab(corpus, order=2)
        assert a.index == b.index
        assert a.content_hash() == b.content_hash()

    def test_dense_indices(self):
        vocab = build_vocab([HI_KAPPA], order=2)
        assert sorted(vocab.index.values()) == list(range(len(vocab)))


class TestVectorize:
    def test_counts(self):
        vocab = build_vocab([HI_KAPPA], order=2)
        vec = vectorize(HI_KAPPA, vocab)
        assert vec == {0: 1, 1: 1, 2: 1}

    def test_empty(self):
        vocab = build_vocab([HI_KAPPA], order=2)
        assert vectorize([], vocab) == {}

    def test_oov_ignored(self):
        vocab = build_vocab([HI_KAPPA], order=2)
        assert vectorize(msg(("zzz", TokenKind.WORD)), vocab) == {}

    def test_repeated_tokens_counted(self):
        tokens = msg(("hi", TokenKind.WORD), ("hi", TokenKind.WORD))
        vocab = build_vocab([tokens], order=1)
        assert vectorize(tokens, vocab) == {0: 2}

    def test_binary_switch(self):
        tokens = msg(("hi", TokenKind.WORD), ("hi", TokenKind.WORD))
        vocab = build_vocab([tokens], order=1)
        assert vectorize(tokens, vocab, binary=True) == {0: 1}

    def test_count_sum_bound(self):
        tokens = msg(("a", TokenKind.WORD), ("b", TokenKind.WORD),
                     ("a", TokenKind.WORD))
        vocab = build_vocab([tokens], order=2)
        vec = vectorize(tokens, vocab)
        assert sum(vec.values()) <= len(tokens) + (len(tokens) - 1)


def test_kind_partition_and_fractions():
    corpus = [msg(("hi", TokenKind.WORD), ("Kappa", TokenKind.EMOTE),
                  ("yo", TokenKind.WORD))]
    vocab = build_vocab(corpus, order=2)
    fracs = vocab.kind_fractions()
    assert sum(fracs.values()) == pytest.approx(1.0, abs=1e-9)
    assert len(vocab.kinds) == len(vocab)


def test_serialization_round_trip(tmp_path):
    corpus = [HI_KAPPA, msg(("yo", TokenKind.WORD), ("LUL", TokenKind.EMOTE))]
    vocab = build_vocab(corpus, order=2)
    path = tmp_path / "vocab.json"
    vocab.save(path)
    loaded = NgramVocab.load(path)
    assert loaded.index == vocab.index
    assert loaded.kinds == vocab.kinds
    assert loaded.content_hash() == vocab.content_hash()
