import re

import pytest
from hypothesis import given, settings, strategies as st

from offenseval.textprep import (AbbreviationLexicon, CleanConfig, clean, load_stopwords,
                                 preprocess_corpus, tokenize)

EMPTY = AbbreviationLexicon({})
SHIPPED = AbbreviationLexicon.default()
DEFAULT = CleanConfig()

tweetish = st.lists(
    st.sampled_from(list("abcXYZ iu'!?.#@_-12 \t😀✨…") + ["@USER", "URL", "idk", "IDK", "u"]),
    max_size=30,
).map("".join)


def test_clean_removes_placeholders_and_lowercases():
    assert clean("@USER You are IDIOTS URL", DEFAULT, EMPTY) == "you are idiots"


def test_clean_expands_then_strips():
    lex = AbbreviationLexicon({"idk": "i do not know"})
    assert clean("idk what's up!!!", DEFAULT, lex) == "i do not know whats up"


def test_clean_expands_before_punctuation():
    assert clean("IDK!", DEFAULT, SHIPPED) == "i do not know"


def test_clean_empty():
    assert clean("", DEFAULT, SHIPPED) == ""


def test_clean_placeholder_needs_word_boundary():
    assert clean("@USERNAME URLs", DEFAULT, EMPTY) == "username urls"


def test_symbols_and_emoji():
    assert clean("win 😀 $5 + more", DEFAULT, EMPTY) == "win 5 more"
    keep_symbols = CleanConfig(remove_symbols=False)
    assert clean("win 😀 $5", keep_symbols, EMPTY) == "win 😀 $5"
    emoji_only = CleanConfig(remove_symbols=False, remove_emoji=True)
    assert clean("win 😀 $5", emoji_only, EMPTY) == "win $5"


def test_optional_steps():
    cfg = CleanConfig(remove_hashtags=True, remove_numbers=True, remove_stopwords=True)
    assert clean("The #MAGA crowd has 100 reasons", cfg, EMPTY) == "crowd reasons"


def test_rejected_steps_are_off_by_default():
    assert clean("#maga 2019 the 😀", DEFAULT, EMPTY) == "maga 2019 the"


def test_glued_abbreviation_expands():
    assert clean("i.d.k", DEFAULT, SHIPPED) == "i do not know"


def test_all_flags_off_only_normalizes_whitespace():
    assert clean("  @USER  Hi!!\tURL ", CleanConfig.all_off(), EMPTY) == "@USER Hi!! URL"


@given(st.text(max_size=80))
def test_all_flags_off_is_whitespace_normalization(text):
    assert clean(text, CleanConfig.all_off(), EMPTY) == " ".join(text.split())


@given(st.one_of(tweetish, st.text(max_size=80)))
@settings(max_examples=300)
def test_clean_idempotent(text):
    once = clean(text, DEFAULT, SHIPPED)
    assert clean(once, DEFAULT, SHIPPED) == once


@given(st.one_of(tweetish, st.text(max_size=80)))
def test_clean_deterministic(text):
    assert clean(text, DEFAULT, SHIPPED) == clean(text, DEFAULT, SHIPPED)


def test_lexicon_contents_and_validation():
    for key in ["idk", "lol", "omg", "smh", "btw", "imo", "tbh", "u", "r", "ur"]:
        assert key in SHIPPED.entries
    with pytest.raises(ValueError):
        AbbreviationLexicon({"IDK": "i do not know"})
    with pytest.raises(ValueError):
        AbbreviationLexicon({"u": "you", "ya": "u"})
    with pytest.raises(ValueError):
        AbbreviationLexicon({"x": ""})


def test_lexicon_file_roundtrip(tmp_path):
    p = tmp_path / "lex.tsv"
    p.write_text("brb\tbe right back\n", encoding="utf-8")
    assert AbbreviationLexicon.load(p).entries == {"brb": "be right back"}


def test_stopwords_loaded():
    words = load_stopwords()
    assert {"the", "and", "a"} <= words


@pytest.mark.parametrize("text, tokens", [
    ("you are sooooo bad", ["you", "are", "sooo", "bad"]),
    ("a  b", ["a", "b"]),
    ("aaab bbb", ["aaab", "bbb"]),
    ("", []),
    ("!!!!!!", ["!!!"]),
])
def test_tokenize(text, tokens):
    assert tokenize(text) == tokens


@given(st.text(max_size=100))
def test_tokenize_invariants(text):
    toks = tokenize(text)
    for t in toks:
        assert t and not re.search(r"\s", t)
        assert not re.search(r"(.)\1{3}", t, re.DOTALL)


@given(st.text(max_size=60))
def test_lowercase_tokens_have_no_uppercase(text):
    for tok in tokenize(clean(text, DEFAULT, SHIPPED)):
        assert tok == tok.lower()


def test_preprocess_corpus():
    assert preprocess_corpus([], DEFAULT, SHIPPED) == []
    assert preprocess_corpus(["@USER URL"], DEFAULT, SHIPPED) == [[]]
    assert preprocess_corpus(["b a", "c"], DEFAULT, EMPTY) == [["b", "a"], ["c"]]
