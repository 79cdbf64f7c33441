"""Emote-aware tokenization and the P1/P2/P3 text processing pipelines.

Tokens are produced by whitespace splitting and tagged with a kind in
priority order emote > emoji > emoticon > word. Emote matching happens on the
raw token, before any normalization, because emote codes are case-sensitive.
Only word tokens are normalized; the other kinds pass through untouched.
"""

import re
import unicodedata
from dataclasses import dataclass
from enum import Enum


class TokenKind(Enum):
    WORD = "word"
    EMOTE = "emote"
    EMOJI = "emoji"
    EMOTICON = "emoticon"


class ProcessingLevel(Enum):
    P1 = "P1"  # lowercase + punctuation strip + run squeeze (words only)
    P2 = "P2"  # P1 + stop word removal
    P3 = "P3"  # P2 + lemma substitution


@dataclass(frozen=True)
class Token:
    text: str
    kind: TokenKind


# Unicode blocks treated as emoji scalars.
_EMOJI_RANGES = (
    (0x1F300, 0x1F5FF), (0x1F600, 0x1F64F), (0x1F680, 0x1F6FF),
    (0x1F900, 0x1F9FF), (0x1FA70, 0x1FAFF), (0x2600, 0x26FF),
    (0x2700, 0x27BF), (0x1F1E6, 0x1F1FF), (0x1F000, 0x1F0FF),
    (0x2764, 0x2764), (0x1F3FB, 0x1F3FF),
)
# Joiners/selectors allowed inside an emoji token but not emoji on their own.
_EMOJI_MODIFIERS = {0xFE0F, 0x200D, 0x20E3}

_EMOTICON_SET = {
    ":)", ":(", ":D", ":P", ":p", ":O", ":o", ":|", ":/", ":\\", ":*",
    ":3", ":]", ":[", ":'(", ":')", ";)", ";(", ";P", ";D", "=)", "=(",
    "=D", "=P", "=|", "=/", "D:", "D;", "D=", "(:", "):", "<3", "</3",
    "xD", "XD", "xd", ":-)", ":-(", ":-D", ":-P", ":-/", ":-|", ";-)",
    "o_O", "O_o", "o_o", "O_O", "-_-", "^_^", "^-^", "T_T", ";_;",
    ">:(", ">:)", ":^)", ":c", ":C", "c:", "C:",
}
_EMOTICON_RE = re.compile(r"^>?[:;=8xX]['\-^]?[)(\[\]DPpOoCc3/\\|*]+$")

_RUN_RE = re.compile(r"(.)\1{3,}")


def is_emoji(token):
    seen_scalar = False
    for ch in token:
        cp = ord(ch)
        if cp in _EMOJI_MODIFIERS:
            continue
        if any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES):
            seen_scalar = True
        else:
            return False
    return seen_scalar


def is_emoticon(token):
    return token in _EMOTICON_SET or bool(_EMOTICON_RE.match(token))


def classify_token(raw, emotes):
    if raw in emotes:
        return TokenKind.EMOTE
    if is_emoji(raw):
        return TokenKind.EMOJI
    if is_emoticon(raw):
        return TokenKind.EMOTICON
    return TokenKind.WORD


def tokenize(text, emotes):
    """Whitespace-split `text` and kind-tag each token. No normalization."""
    return [Token(tok, classify_token(tok, emotes)) for tok in text.split()]


def _is_punct(ch):
    return unicodedata.category(ch)[0] in ("P", "S")


def normalize_word(text):
    """P1 word normalization: lowercase, drop punctuation/symbol characters,
    then squeeze runs of 4+ identical characters down to 3."""
    text = text.lower()
    text = "".join(ch for ch in text if not _is_punct(ch))
    text = _RUN_RE.sub(lambda m: m.group(1) * 3, text)
    return text


def process(tokens, level, stopwords=None, lemmas=None):
    """Apply a processing pipeline to kind-tagged tokens.

    P1 normalizes word tokens (empty-after-normalization words are dropped);
    P2 additionally drops stop words; P3 additionally maps words through the
    lemma table. Emote/emoji/emoticon tokens always pass through unchanged,
    and token kinds and ordering are preserved.
    """
    stopwords = stopwords if stopwords is not None else DEFAULT_STOPWORDS
    lemmas = lemmas or {}
    out = []
    for tok in tokens:
        if tok.kind is not TokenKind.WORD:
            out.append(tok)
            continue
        text = normalize_word(tok.text)
        if not text:
            continue
        if level in (ProcessingLevel.P2, ProcessingLevel.P3) and text in stopwords:
            continue
        if level is ProcessingLevel.P3:
            text = lemmas.get(text, text)
        out.append(Token(text, TokenKind.WORD))
    return out


def load_stopwords(path):
    """One stop word per line; blank lines and `#` comments ignored."""
    words = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            w = line.strip()
            if w and not w.startswith("#"):
                words.add(w.lower())
    return words


def load_lemmas(path):
    """TSV `surface<TAB>lemma` rows."""
    table = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            parts = line.rstrip("\n").split("\t")
            if len(parts) >= 2 and parts[0]:
                table[parts[0]] = parts[1]
    return table


def build_default_lemmas(vocabulary):
    """Suffix-rule fallback lemma table: strip a trailing s/ing/ed when the
    stem is at least 3 characters long and itself occurs in `vocabulary`."""
    table = {}
    vocab = set(vocabulary)
    for word in vocab:
        for suffix in ("ing", "ed", "s"):
            if word.endswith(suffix):
                stem = word[: -len(suffix)]
                if len(stem) >= 3 and stem in vocab:
                    table[word] = stem
                    break
    return table


# Small bundled English stop word list (~150 entries).
DEFAULT_STOPWORDS = frozenset("""
a about above after again against all am an and any are aren't as at be
because been before being below between both but by can't cannot could
couldn't did didn't do does doesn't doing don't down during each few for from
further had hadn't has hasn't have haven't having he her here hers herself
him himself his how i i'm i've if in into is isn't it it's its itself let's
me more most mustn't my myself no nor not of off on once only or other ought
our ours ourselves out over own same shan't she should shouldn't so some such
than that the their theirs them themselves then there these they they're this
those through to too under until up very was wasn't we we're were weren't
what when where which while who whom why will with won't would wouldn't you
you're your yours yourself yourselves
""".split())
