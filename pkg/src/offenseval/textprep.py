"""Tweet cleaning and tokenization.

Cleaning order (each step behind a ``CleanConfig`` flag):

1. drop ``@USER`` placeholders, ``URL`` placeholders and (optionally) whole
   ``#hashtags``
2. lowercase
3. expand abbreviations on word runs
4. drop emoji (optional), punctuation (Unicode ``P*``) and symbols (``S*``),
   and (optionally) digit runs
5. expand abbreviations again, since deleting punctuation can glue a word
   together (``i.d.k`` -> ``idk``)
6. normalize whitespace, then (optionally) drop stopwords
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional

_USER_RE = re.compile(r"(?<!\w)@USER(?!\w)")
_URL_RE = re.compile(r"(?<!\w)URL(?!\w)")
_HASHTAG_RE = re.compile(r"#\w+")
_WORD_RE = re.compile(r"\w+")
_DIGITS_RE = re.compile(r"\d+")
_REPEAT_RE = re.compile(r"(.)\1{3,}", re.DOTALL)

# Blocks whose So code points count as emoji.
_EMOJI_BLOCKS = (
    (0x2300, 0x23FF),
    (0x2600, 0x27BF),
    (0x2B00, 0x2BFF),
    (0x1F000, 0x1FAFF),
)


@dataclass(frozen=True)
class CleanConfig:
    remove_user_mentions: bool = True
    remove_url_tokens: bool = True
    remove_punctuation: bool = True
    remove_symbols: bool = True
    lowercase: bool = True
    expand_abbreviations: bool = True
    remove_emoji: bool = False
    remove_hashtags: bool = False
    remove_numbers: bool = False
    remove_stopwords: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CleanConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown cleaning flag(s): {', '.join(sorted(unknown))}")
        return cls(**d)

    @classmethod
    def all_off(cls) -> "CleanConfig":
        return cls(**{k: False for k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class AbbreviationLexicon:
    """Token-level abbreviation expansions.

    Keys are lowercase single word runs. Replacement words must be lowercase,
    alphabetic and never themselves keys, so expansion is a one-shot rewrite
    (this is what keeps ``clean`` idempotent).
    """

    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, value in self.entries.items():
            if not _WORD_RE.fullmatch(key) or key != key.lower():
                raise ValueError(f"lexicon key {key!r} must be a lowercase single word")
            words = value.split()
            if not words:
                raise ValueError(f"lexicon entry {key!r} has an empty replacement")
            for w in words:
                if not (w.isalpha() and w == w.lower()):
                    raise ValueError(f"lexicon entry {key!r}: bad replacement word {w!r}")
                if w in self.entries:
                    raise ValueError(f"lexicon entry {key!r}: replacement word {w!r} is itself a key")

    @classmethod
    def load(cls, path) -> "AbbreviationLexicon":
        with open(path, encoding="utf-8") as fh:
            return cls(_parse_lexicon(fh.read()))

    @classmethod
    def default(cls) -> "AbbreviationLexicon":
        text = resources.files("offenseval.data").joinpath("abbreviations.tsv").read_text("utf-8")
        return cls(_parse_lexicon(text))

    def expand(self, text: str) -> str:
        if not self.entries:
            return text
        entries = self.entries
        return _WORD_RE.sub(lambda m: entries.get(m.group(0), m.group(0)), text)


def _parse_lexicon(text: str) -> dict:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        key, sep, value = line.partition("\t")
        if not sep:
            raise ValueError(f"lexicon line {lineno}: expected 'key<TAB>replacement'")
        entries[key.strip()] = " ".join(value.split())
    return entries


def load_stopwords(path=None) -> frozenset:
    if path is None:
        text = resources.files("offenseval.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


@lru_cache(maxsize=None)
def _drop_char(ch: str, punct: bool, symbols: bool, emoji: bool) -> bool:
    cat = unicodedata.category(ch)
    if punct and cat[0] == "P":
        return True
    if symbols and cat[0] == "S":
        return True
    if emoji and cat == "So":
        cp = ord(ch)
        return any(lo <= cp <= hi for lo, hi in _EMOJI_BLOCKS)
    return False


def clean(text: str, cfg: CleanConfig = CleanConfig(),
          lex: Optional[AbbreviationLexicon] = None,
          stopwords: Optional[Iterable[str]] = None) -> str:
    """Apply the configured cleaning steps and return a whitespace-normalized string.

    Args:
        text: Raw tweet.
        cfg: Step flags.
        lex: Abbreviation lexicon; ignored unless ``cfg.expand_abbreviations``.
        stopwords: Word list for ``cfg.remove_stopwords``; defaults to the
            shipped list.
    """
    if cfg.remove_user_mentions:
        text = _USER_RE.sub(" ", text)
    if cfg.remove_url_tokens:
        text = _URL_RE.sub(" ", text)
    if cfg.remove_hashtags:
        text = _HASHTAG_RE.sub(" ", text)
    if cfg.lowercase:
        text = text.lower()
    expand = lex is not None and cfg.expand_abbreviations and bool(lex.entries)
    if expand:
        text = lex.expand(text)
    if cfg.remove_punctuation or cfg.remove_symbols or cfg.remove_emoji:
        flags = (cfg.remove_punctuation, cfg.remove_symbols, cfg.remove_emoji)
        text = "".join(ch for ch in text if not _drop_char(ch, *flags))
    if cfg.remove_numbers:
        text = _DIGITS_RE.sub("", text)
    if expand:
        text = lex.expand(text)
    tokens = text.split()
    if cfg.remove_stopwords:
        stop = load_stopwords() if stopwords is None else frozenset(stopwords)
        tokens = [t for t in tokens if t not in stop]
    return " ".join(tokens)


def tokenize(text: str) -> list[str]:
    """Whitespace split with runs of 4+ identical characters cut to 3."""
    tokens = []
    for tok in text.split():
        tok = _REPEAT_RE.sub(r"\1\1\1", tok)
        if tok:
            tokens.append(tok)
    return tokens


def preprocess_corpus(texts, cfg: CleanConfig = CleanConfig(),
                      lex: Optional[AbbreviationLexicon] = None,
                      stopwords=None) -> list[list[str]]:
    if cfg.remove_stopwords and stopwords is None:
        stopwords = load_stopwords()
    return [tokenize(clean(t, cfg, lex, stopwords)) for t in texts]
