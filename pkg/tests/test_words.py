import pytest
from hypothesis import given
from hypothesis import strategies as st

from tierlang import words

word_st = st.text(alphabet="01#", max_size=24)


def test_concat_examples():
    assert words.concat("10", "1") == "101"
    assert words.concat("", "0#1") == "0#1"
    assert words.concat(words.repeat("1", 3), "") == "111"


def test_repeat_zero_is_empty():
    assert words.repeat("101", 0) == ""


def test_subword_examples():
    assert words.is_subword("01", "101")
    assert words.is_subword("", "01#")
    assert words.is_subword("", "")
    # exhaustive scan of the factors of 101: no "11"
    factors = {"101"[i:j] for i in range(4) for j in range(i, 4)}
    assert "11" not in factors
    assert not words.is_subword("11", "101")


def test_shortlex_examples():
    assert words.shortlex_compare("11", "000") == -1
    assert words.shortlex_compare("01", "01") == 0
    assert words.shortlex_compare("10", "01") == 1
    assert words.shortlex_compare("1", "#") == -1  # symbol order 0 < 1 < #


def test_word_validation():
    with pytest.raises(words.WordError):
        words.word("abc")
    assert words.word("0101#") == "0101#"


def test_truthiness():
    assert words.truthy("1")
    for w in ("", "0", "11", "#", "0101"):
        assert not words.truthy(w)


@given(word_st, word_st, word_st)
def test_concat_associative_with_identity(a, b, c):
    assert words.concat(words.concat(a, b), c) == words.concat(a, words.concat(b, c))
    assert words.concat("", a) == a == words.concat(a, "")


@given(word_st, word_st)
def test_longer_never_subword(v, w):
    if len(v) > len(w):
        assert not words.is_subword(v, w)


@given(word_st, word_st, word_st)
def test_subword_reflexive_transitive(u, v, w):
    assert words.is_subword(v, v)
    # build a transitive chain by construction: u <= u.v <= w.(u.v)
    mid = u + v
    outer = w + mid
    assert words.is_subword(u, mid) or u == ""
    assert words.is_subword(mid, outer)
    assert words.is_subword(u, outer) or words.is_subword(u, mid)


@given(word_st, word_st, word_st)
def test_shortlex_total_order(a, b, c):
    ab, ba = words.shortlex_compare(a, b), words.shortlex_compare(b, a)
    assert ab == -ba
    if ab == 0:
        assert a == b
    if ab <= 0 and words.shortlex_compare(b, c) <= 0:
        assert words.shortlex_compare(a, c) <= 0


@given(st.integers(min_value=0, max_value=50))
def test_unary_numerals(n):
    assert words.unary_value(words.unary(n)) == n


@given(st.integers(min_value=0, max_value=2000))
def test_binary_numerals(n):
    assert words.binary_value(words.binary(n)) == n
