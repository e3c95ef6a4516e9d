"""Operator registry: semantics, growth classes, and admissible level vectors.

Each operator carries a total semantics function on words and a declared
growth class.  The class drives which functional levels (one level per
argument plus one for the result) are admissible in a given loop context
(innermost level ``tin``, outermost level ``tout``):

* Neutral: result <= min of argument levels, and no argument at infinity.
  Neutral operators compute predicates or contiguous factors of an input,
  so iterating them cannot grow data.
* Positive(c): Neutral's constraints, and additionally the result level is
  below the innermost loop level (or the context is loop free).  Outputs
  grow by at most the additive constant c.
* Polynomial(d): only admissible outside loops.  Outputs are polynomially
  bounded in the largest input.

``truncate`` is special cased: it accepts exactly one unbounded (oracle)
argument and produces a result strictly below the innermost loop level,
bounded in size by its second operand.

Classes are declared, not inferred; ``validate_class`` spot checks a
declaration against the semantics on randomized inputs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from . import words
from .syntax import INFINITY, Level, is_finite, level_from_json, level_str


@dataclass(frozen=True)
class Neutral:
    kind = "neutral"


@dataclass(frozen=True)
class Positive:
    growth: int
    kind = "positive"


@dataclass(frozen=True)
class Polynomial:
    degree: int
    kind = "polynomial"


OperatorClass = Neutral | Positive | Polynomial


@dataclass
class OperatorEntry:
    name: str
    arity: int
    fn: Callable
    klass: OperatorClass
    is_truncate: bool = False


class UnknownOperator(KeyError):
    pass


CONST_PREFIX = "const:"


class Registry:
    """Immutable after construction; operator name -> entry.

    Names of the form ``const:w`` denote implicit arity-0 constants for the
    word ``w`` and are resolved on demand.
    """

    def __init__(self, entries):
        self._entries = {e.name: e for e in entries}

    def __contains__(self, name: str) -> bool:
        return name in self._entries or name.startswith(CONST_PREFIX)

    def __iter__(self):
        return iter(self._entries.values())

    def __len__(self):
        return len(self._entries)

    def names(self):
        return list(self._entries)

    def lookup(self, name: str) -> OperatorEntry:
        if name in self._entries:
            return self._entries[name]
        if name.startswith(CONST_PREFIX):
            w = words.word(name[len(CONST_PREFIX):])
            return OperatorEntry(name, 0, lambda w=w: w, Neutral())
        raise UnknownOperator(name)

    def apply(self, name: str, args) -> str:
        entry = self.lookup(name)
        if len(args) != entry.arity:
            raise UnknownOperator(f"{name} applied to {len(args)} arguments")
        return entry.fn(*args)


# ---------------------------------------------------------------------------
# Builtin semantics


def _pred(b: bool) -> str:
    return words.TRUE if b else words.FALSE


def _op_eq(a, b):
    return _pred(words.shortlex_compare(a, b) == 0)


def _op_lt(a, b):
    return _pred(words.shortlex_compare(a, b) < 0)


def _op_le(a, b):
    return _pred(words.shortlex_compare(a, b) <= 0)


def _op_gt(a, b):
    return _pred(words.shortlex_compare(a, b) > 0)


def _op_ne(a, b):
    return _pred(words.shortlex_compare(a, b) != 0)


def _op_not(a):
    return _pred(not words.truthy(a))


def _op_and(a, b):
    return _pred(words.truthy(a) and words.truthy(b))


def _op_or(a, b):
    return _pred(words.truthy(a) or words.truthy(b))


def _op_inc(a):
    """Unary successor; fails to the empty word on non-unary input."""
    n = words.unary_value(a)
    return words.EPSILON if n is None else words.unary(n + 1)


def _op_dec(a):
    """Unary predecessor; the empty word stays empty (and is the failure value)."""
    n = words.unary_value(a)
    if n is None or n == 0:
        return words.EPSILON
    return words.unary(n - 1)


def _op_hd(a):
    """Prefix before the first '#', or the first symbol of a '#'-free word."""
    i = a.find("#")
    if i >= 0:
        return a[:i]
    return a[:1]


def _op_tl(a):
    """Suffix after the first '#', or everything past the first symbol."""
    i = a.find("#")
    if i >= 0:
        return a[i + 1:]
    return a[1:]


def _op_append(a, b):
    """Append a single symbol (or nothing); fails when b is longer than one."""
    if len(b) > 1:
        return words.EPSILON
    return a + b


def _op_decb(a):
    """Binary predecessor, length preserving; fails at zero or on non-binary."""
    n = words.binary_value(a)
    if a == words.EPSILON or n is None or n == 0:
        return words.EPSILON
    return format(n - 1, "b").rjust(len(a), "0")


def _op_len(a):
    """Length of the word, written in binary (empty input gives empty output)."""
    return words.binary(len(a))


def _op_cons(a, b):
    """a#b, provided a is '#'-free; the '#' marks where hd/tl split."""
    if "#" in a:
        return words.EPSILON
    return a + "#" + b


def _op_pad(a, b):
    """b#0^n sized up to |a| exactly; fails when b does not fit."""
    n = len(a) - len(b) - 1
    if n < 0:
        return words.EPSILON
    return b + "#" + "0" * n


def _op_truncate(a, b):
    """a cut down to at most |b| symbols (a prefix of a)."""
    return a if len(a) <= len(b) else a[: len(b)]


def builtin_registry() -> Registry:
    n, p = Neutral, Positive
    entries = [
        OperatorEntry("eq", 2, _op_eq, n()),
        OperatorEntry("lt", 2, _op_lt, n()),
        OperatorEntry("le", 2, _op_le, n()),
        OperatorEntry("gt", 2, _op_gt, n()),
        OperatorEntry("ne", 2, _op_ne, n()),
        OperatorEntry("not", 1, _op_not, n()),
        OperatorEntry("and", 2, _op_and, n()),
        OperatorEntry("or", 2, _op_or, n()),
        # Constants: zero is the empty word (the unary numeral 1^0); the
        # boolean false is the one-symbol word "0".
        OperatorEntry("zero", 0, lambda: words.EPSILON, n()),
        OperatorEntry("true", 0, lambda: words.TRUE, n()),
        OperatorEntry("false", 0, lambda: words.FALSE, n()),
        OperatorEntry("eps", 0, lambda: words.EPSILON, n()),
        OperatorEntry("inc", 1, _op_inc, p(1)),
        OperatorEntry("dec", 1, _op_dec, n()),
        OperatorEntry("hd", 1, _op_hd, n()),
        OperatorEntry("tl", 1, _op_tl, n()),
        OperatorEntry("append", 2, _op_append, p(1)),
        OperatorEntry("decb", 1, _op_decb, p(0)),
        OperatorEntry("len", 1, _op_len, p(0)),
        OperatorEntry("cons", 2, _op_cons, Polynomial(1)),
        OperatorEntry("pad", 2, _op_pad, p(0)),
        OperatorEntry("truncate", 2, _op_truncate, n(), is_truncate=True),
    ]
    return Registry(entries)


# ---------------------------------------------------------------------------
# Admissible functional levels


class DeltaConfig:
    """Optional restriction of the maximal admissible level sets.

    The JSON form maps operator names to lists of forbidden functional
    levels, e.g. ``{"gt": [[1, 1, 1]]}`` (use "inf" for the top level).
    Forbidden vectors are removed for every context.
    """

    def __init__(self, forbidden=None):
        self.forbidden = {
            op: {tuple(level_from_json(x) for x in cand) for cand in cands}
            for op, cands in (forbidden or {}).items()
        }

    @classmethod
    def from_json(cls, data) -> "DeltaConfig":
        return cls(data)

    def allows(self, op: str, candidate: tuple) -> bool:
        return tuple(candidate) not in self.forbidden.get(op, set())


def delta_membership(
    registry: Registry,
    op: str,
    tin: Level,
    tout: Level,
    candidate,
    config: DeltaConfig | None = None,
) -> bool:
    """Is the functional level ``candidate`` admissible for ``op`` at (tin, tout)?

    ``candidate`` has arity+1 components, argument levels then result level.
    tin and tout must be finite (they are loop levels).
    """
    entry = registry.lookup(op)
    candidate = tuple(candidate)
    if len(candidate) != entry.arity + 1:
        raise ValueError(f"{op} expects {entry.arity + 1} level components")
    if not (is_finite(tin) and is_finite(tout)):
        raise ValueError("loop context levels must be finite")
    if config is not None and not config.allows(op, candidate):
        return False
    args, result = candidate[:-1], candidate[-1]

    if entry.is_truncate:
        # One unbounded operand, truncated by the second; the result can
        # never guard the enclosing loops.  Outside loops (tin = 0) there is
        # nothing to guard and the result level is unconstrained.
        if candidate[0] != INFINITY:
            return False
        tau, res = candidate[1], candidate[2]
        if not is_finite(tau) or not is_finite(res):
            return False
        return tout <= tau and (tin == 0 or res < tin)

    klass = entry.klass
    if isinstance(klass, Polynomial):
        return tout == 0
    # Neutral and positive share the no-upward-flow and finiteness rules.
    if any(a == INFINITY for a in args):
        return False
    if args and not all(result <= a for a in args):
        return False
    if result == INFINITY:
        return False
    if isinstance(klass, Positive):
        return result < tin or result == 0
    return True


# ---------------------------------------------------------------------------
# Randomized class validation


@dataclass
class Counterexample:
    op: str
    inputs: tuple
    output: str
    reason: str


@dataclass
class ClassReport:
    op: str
    samples: int
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def polynomial_bound(arity: int, degree: int, max_in: int) -> int:
    # Generous envelope for declared-degree checks; exact coefficients are
    # not part of the declaration.
    return (arity + 1) * (max_in + 1) ** degree


def _class_violation(entry: OperatorEntry, inputs, output) -> str | None:
    klass = entry.klass
    sizes = [len(w) for w in inputs]
    biggest = max(sizes, default=0)
    if isinstance(klass, Neutral):
        if entry.arity == 0:
            # A constant's range is a singleton, which is as bounded as a
            # predicate's; treated as neutral by convention.
            return None
        if output in (words.TRUE, words.FALSE):
            return None
        if any(words.is_subword(output, w) for w in inputs):
            return None
        return "output neither boolean nor a factor of any input"
    if isinstance(klass, Positive):
        if len(output) <= biggest + klass.growth:
            return None
        return f"|output| = {len(output)} > max|input| + {klass.growth}"
    if len(output) <= polynomial_bound(entry.arity, klass.degree, biggest):
        return None
    return f"|output| exceeds the degree-{klass.degree} envelope"


def _sample_word(rng: random.Random, max_size: int) -> str:
    size = rng.randint(0, max_size)
    style = rng.randrange(4)
    if style == 0:
        return words.unary(size)
    if style == 1:
        return "".join(rng.choice("01") for _ in range(size))
    return "".join(rng.choice(words.ALPHABET) for _ in range(size))


def validate_class(
    entry: OperatorEntry, samples: int, seed: int = 0, max_size: int = 64
) -> ClassReport:
    """Property-test the declared class on randomized input tuples."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = random.Random(seed)
    report = ClassReport(entry.name, samples)
    fixtures = [words.EPSILON, "0", "1", "#", "11111", "10#1"]
    for i in range(samples):
        if i < len(fixtures) and entry.arity > 0:
            inputs = tuple(fixtures[i] for _ in range(entry.arity))
        else:
            inputs = tuple(
                _sample_word(rng, max_size) for _ in range(entry.arity)
            )
        output = entry.fn(*inputs)
        reason = _class_violation(entry, inputs, output)
        if reason is not None:
            report.counterexamples.append(
                Counterexample(entry.name, inputs, output, reason)
            )
    return report


def validate_registry(registry: Registry, samples: int, seed: int = 0):
    return [validate_class(e, samples, seed=seed) for e in registry]


def describe_entry(entry: OperatorEntry) -> dict:
    k = entry.klass
    info = {"name": entry.name, "arity": entry.arity, "class": k.kind}
    if isinstance(k, Positive):
        info["growth"] = k.growth
    if isinstance(k, Polynomial):
        info["degree"] = k.degree
    if entry.is_truncate:
        info["special"] = "truncate"
    return info


def candidate_str(candidate) -> str:
    return " -> ".join(level_str(c) for c in candidate)
