"""Words over the fixed alphabet {0, 1, #}: the universal value domain.

Every runtime value is a word, represented as a plain Python string whose
symbols come from :data:`ALPHABET`.  The one-symbol word ``"1"`` is the only
truthy value; everything else (including the empty word) counts as false.
"""

from __future__ import annotations

ALPHABET = "01#"
EPSILON = ""
TRUE = "1"
FALSE = "0"

# Symbol order used by shortlex: 0 < 1 < #.
_RANK = {"0": 0, "1": 1, "#": 2}


class WordError(ValueError):
    """A string that is not a word over {0, 1, #}."""


def is_word(text: str) -> bool:
    return all(c in _RANK for c in text)


def word(text: str) -> str:
    """Validate ``text`` as a word; the identity on valid input."""
    if not is_word(text):
        raise WordError(f"not a word over {{0,1,#}}: {text!r}")
    return text


def concat(a: str, b: str) -> str:
    return a + b


def repeat(v: str, n: int) -> str:
    """n-fold self-concatenation; repeat(v, 0) is the empty word."""
    return v * n


def is_subword(v: str, w: str) -> bool:
    """True iff v occurs in w as a contiguous factor."""
    return v in w


def truthy(w: str) -> bool:
    return w == TRUE


def shortlex_key(w: str) -> tuple:
    return (len(w), tuple(_RANK[c] for c in w))


def shortlex_compare(v: str, w: str) -> int:
    """-1, 0, or 1 as v is below, equal to, or above w in shortlex order."""
    kv, kw = shortlex_key(v), shortlex_key(w)
    if kv < kw:
        return -1
    if kv > kw:
        return 1
    return 0


def unary(n: int) -> str:
    """The unary numeral 1^n (zero is the empty word)."""
    return "1" * n


def unary_value(w: str) -> int | None:
    """len(w) if w is a unary numeral, else None."""
    if all(c == "1" for c in w):
        return len(w)
    return None


def binary_value(w: str) -> int | None:
    """The number denoted by w read as a binary numeral, else None.

    The empty word denotes zero (the failure convention used by the
    length operator keeps outputs no longer than inputs).
    """
    if w == EPSILON:
        return 0
    if any(c == "#" for c in w):
        return None
    return int(w, 2)


def binary(n: int) -> str:
    """Canonical binary numeral for n >= 0; zero is the empty word."""
    if n == 0:
        return EPSILON
    return format(n, "b")
