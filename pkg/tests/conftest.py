import numpy as np
import pytest

from emotesent.corpus import EmoteDictionary, SentimentLexicon
from emotesent.embed import EmbeddingStore
from emotesent.tokenizer import Token, TokenKind


def make_emotes(*codes):
    return EmoteDictionary(codes=set(codes),
                           sources={c: "test" for c in codes})


def make_lexicon(entries):
    return SentimentLexicon(entries=dict(entries),
                            sources={t: "user" for t in entries})


def make_store(tokens, vectors, kinds=None, freqs=None):
    n = len(tokens)
    if kinds is None:
        kinds = [TokenKind.WORD] * n
    if freqs is None:
        freqs = [1] * n
    return EmbeddingStore(tokens, np.asarray(vectors, dtype=np.float32),
                          kinds, freqs)


def random_store(rng, n_tokens, dim, emote_frac=0.3):
    tokens = [f"tok{i:05d}" for i in range(n_tokens)]
    kinds = [TokenKind.EMOTE if rng.random() < emote_frac else TokenKind.WORD
             for _ in range(n_tokens)]
    vectors = rng.standard_normal((n_tokens, dim)).astype(np.float32)
    return make_store(tokens, vectors, kinds)


def words(*texts):
    return [Token(t, TokenKind.WORD) for t in texts]


@pytest.fixture
def emotes():
    return make_emotes("Kappa", "LUL", "FeelsGoodMan", "FeelsBadMan", "Sadge")


# ---------------------------------------------------------------------------
# planted-co-occurrence corpus: emoA only ever appears with positive lexicon
# words, emoB only with negative ones (used by embed/pseudodict/acceptance)
# ---------------------------------------------------------------------------

POS_WORDS = ("good", "great", "nice")
NEG_WORDS = ("bad", "awful", "terrible")
FILLER = tuple(f"filler{i}" for i in range(20))


def planted_corpus(n_sentences=50_000, seed=0):
    rng = np.random.default_rng(seed)
    corpus = []
    for _ in range(n_sentences):
        r = rng.random()
        if r < 0.3:
            toks = ["emoA"] + list(rng.choice(POS_WORDS, size=2, replace=False))
        elif r < 0.6:
            toks = ["emoB"] + list(rng.choice(NEG_WORDS, size=2, replace=False))
        else:
            toks = list(rng.choice(FILLER, size=3, replace=False))
        rng.shuffle(toks)
        corpus.append([Token(t, TokenKind.EMOTE if t.startswith("emo")
                             else TokenKind.WORD) for t in toks])
    return corpus


def planted_lexicon():
    entries = {w: 0.7 for w in POS_WORDS}
    entries.update({w: -0.7 for w in NEG_WORDS})
    return make_lexicon(entries)
