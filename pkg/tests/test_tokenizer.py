import re

import numpy as np
import pytest

from emotesent.tokenizer import (ProcessingLevel, Token, TokenKind,
                                 build_default_lemmas, normalize_word,
                                 process, tokenize)
from conftest import make_emotes


class TestTokenize:
    def test_priority_order(self, emotes):
        toks = tokenize("Kappa hello :)", emotes)
        assert [(t.text, t.kind) for t in toks] == [
            ("Kappa", TokenKind.EMOTE),
            ("hello", TokenKind.WORD),
            (":)", TokenKind.EMOTICON)]

    def test_empty(self, emotes):
        assert tokenize("", emotes) == []
        assert tokenize("   \t  ", emotes) == []

    def test_lul_is_emote(self, emotes):
        assert tokenize("LUL", emotes) == [Token("LUL", TokenKind.EMOTE)]

    def test_emote_dict_wins_over_word(self):
        # "good" in the dictionary outranks word classification
        toks = tokenize("good", make_emotes("good"))
        assert toks[0].kind is TokenKind.EMOTE

    def test_emoji(self, emotes):
        toks = tokenize("\U0001F600 \U0001F44D\U0001F3FB hi", emotes)
        assert toks[0].kind is TokenKind.EMOJI
        assert toks[1].kind is TokenKind.EMOJI
        assert toks[2].kind is TokenKind.WORD

    def test_emote_case_sensitive(self, emotes):
        toks = tokenize("kappa Kappa", emotes)
        assert toks[0].kind is TokenKind.WORD
        assert toks[1].kind is TokenKind.EMOTE

    def test_emoticons(self, emotes):
        for s in (":)", ":(", "D:", ":-)", "<3", "xD"):
            assert tokenize(s, emotes)[0].kind is TokenKind.EMOTICON, s


class TestProcess:
    def test_squeeze_to_three(self, emotes):
        toks = process(tokenize("loooove", emotes), ProcessingLevel.P1)
        assert toks == [Token("looove", TokenKind.WORD)]

    def test_lowercase_and_punct(self, emotes):
        toks = process(tokenize("Hello!!!", emotes), ProcessingLevel.P1)
        assert toks == [Token("hello", TokenKind.WORD)]

    def test_emote_untouched(self, emotes):
        toks = process(tokenize("FeelsGoodMan", emotes), ProcessingLevel.P1)
        assert toks == [Token("FeelsGoodMan", TokenKind.EMOTE)]

    def test_stopword_dropped(self, emotes):
        toks = process(tokenize("the Kappa", emotes), ProcessingLevel.P2,
                       stopwords={"the"})
        assert toks == [Token("Kappa", TokenKind.EMOTE)]

    def test_lemma_substitution(self, emotes):
        toks = process(tokenize("streams", emotes), ProcessingLevel.P3,
                       stopwords=set(), lemmas={"streams": "stream"})
        assert toks == [Token("stream", TokenKind.WORD)]

    def test_empty_after_strip_dropped(self, emotes):
        assert process(tokenize("?! ...", emotes), ProcessingLevel.P1) == []

    def test_punctuation_only_emoticon_survives(self, emotes):
        # emoticon kind is exempt from punctuation stripping
        toks = process(tokenize(":)", emotes), ProcessingLevel.P1)
        assert toks == [Token(":)", TokenKind.EMOTICON)]


def random_text(rng):
    alphabet = list("abcXYZ!?.:)( é\U0001F600") + ["Kappa", "LUL"]
    return " ".join("".join(rng.choice(alphabet,
                                       size=rng.integers(1, 8)))
                    for _ in range(rng.integers(0, 10)))


class TestPipelineProperties:
    @pytest.mark.parametrize("seed", range(20))
    def test_p1_idempotent(self, emotes, seed):
        rng = np.random.default_rng(seed)
        toks = tokenize(random_text(rng), emotes)
        once = process(toks, ProcessingLevel.P1)
        twice = process(once, ProcessingLevel.P1)
        assert once == twice

    @pytest.mark.parametrize("seed", range(20))
    def test_kind_preserved_and_order(self, emotes, seed):
        rng = np.random.default_rng(seed)
        toks = tokenize(random_text(rng), emotes)
        out = process(toks, ProcessingLevel.P1)
        # every output token has an input token of the same kind, in order
        it = iter(toks)
        for o in out:
            while True:
                t = next(it)
                if t.kind is o.kind:
                    break

    @pytest.mark.parametrize("seed", range(20))
    def test_no_long_runs_after_p1(self, emotes, seed):
        rng = np.random.default_rng(seed)
        toks = tokenize(random_text(rng) + " loooooool aaaaaa", emotes)
        for t in process(toks, ProcessingLevel.P1):
            if t.kind is TokenKind.WORD:
                assert not re.search(r"(.)\1{3,}", t.text), t.text

    @pytest.mark.parametrize("seed", range(20))
    def test_p2_subset_of_p1(self, emotes, seed):
        rng = np.random.default_rng(seed)
        toks = tokenize(random_text(rng) + " the and Kappa", emotes)
        p1 = process(toks, ProcessingLevel.P1)
        p2 = process(toks, ProcessingLevel.P2)
        p1_texts = [t.text for t in p1]
        # P2 only removes; every P2 token is in the P1 stream (as subsequence)
        i = 0
        for t in p2:
            i = p1_texts.index(t.text, i) + 1


def test_normalize_word_examples():
    assert normalize_word("loooove") == "looove"
    assert normalize_word("HAAAAAATE") == "haaate"
    assert normalize_word("don't") == "dont"


def test_default_lemmas_suffix_rules():
    vocab = {"stream", "streams", "streaming", "play", "played", "ab", "abs"}
    lemmas = build_default_lemmas(vocab)
    assert lemmas["streams"] == "stream"
    assert lemmas["streaming"] == "stream"
    assert lemmas["played"] == "play"
    assert "abs" not in lemmas  # stem too short
