"""Abstract syntax for both languages, plus the level lattice.

First-order programs are ``Program1``; second-order programs with
procedures, closures, and oracle calls are ``Program2``.  Statements and
expressions are shared between the two (``OracleCall`` and ``OracleBreak``
only ever occur in second-order code).  Nodes are treated as immutable
after parsing; structural equality is dataclass equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

# ---------------------------------------------------------------------------
# Levels

# Finite levels are ints; the top element is float("inf").  The natural
# Python ordering and max/min implement the lattice operations.
Level = Union[int, float]

INFINITY: Level = float("inf")


def is_finite(level: Level) -> bool:
    return level != INFINITY


def level_str(level: Level) -> str:
    return "inf" if level == INFINITY else str(int(level))


def level_from_json(value) -> Level:
    if value == "inf":
        return INFINITY
    return int(value)


# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class OpApp:
    op: str
    args: tuple

    def __init__(self, op: str, args=()):
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Declass:
    expr: "Expr"
    bound: "Expr"


@dataclass(frozen=True)
class OracleCall:
    oracle: str
    args: tuple

    def __init__(self, oracle: str, args=()):
        object.__setattr__(self, "oracle", oracle)
        object.__setattr__(self, "args", tuple(args))


Expr = Union[Var, OpApp, Declass, OracleCall]


# ---------------------------------------------------------------------------
# Statements


@dataclass
class Skip:
    pass


@dataclass
class Assign:
    var: str
    expr: Expr


@dataclass
class Seq:
    first: "Stmt"
    second: "Stmt"


@dataclass
class If:
    guard: Expr
    then: "Stmt"
    orelse: "Stmt"


@dataclass
class While:
    guard: Expr
    body: "Stmt"
    loop_id: int = -1
    # Provenance metadata (sugar origin, source line); not part of the
    # structural identity, since printing never reconstructs for syntax.
    for_origin: bool = field(default=False, compare=False)
    line: int = field(default=0, compare=False)


@dataclass
class Break:
    guard: Expr


@dataclass
class OracleBreak:
    """break(|X(args)| > |X(ref_vars)|): the dedicated oracle-guarded break."""

    oracle: str
    call_args: tuple
    ref_vars: tuple

    def __init__(self, oracle: str, call_args=(), ref_vars=()):
        self.oracle = oracle
        self.call_args = tuple(call_args)
        self.ref_vars = tuple(ref_vars)


@dataclass
class For:
    """Parser-level sugar; never survives desugaring."""

    var: str
    low: Expr
    high: Expr
    body: "Stmt"


Stmt = Union[Skip, Assign, Seq, If, While, Break, OracleBreak, For]


# ---------------------------------------------------------------------------
# Programs


@dataclass
class Program1:
    params: list
    body: Stmt
    ret: str


@dataclass
class Procedure:
    name: str
    oracle_params: list  # [(name, arity)]
    params: list
    locals: list
    body: Stmt
    ret: str

    def oracle_arity(self, name: str) -> int | None:
        for n, k in self.oracle_params:
            if n == name:
                return k
        return None


@dataclass(frozen=True)
class TermVar:
    name: str


@dataclass(frozen=True)
class Call:
    proc: str
    closures: tuple
    args: tuple

    def __init__(self, proc: str, closures=(), args=()):
        object.__setattr__(self, "proc", proc)
        object.__setattr__(self, "closures", tuple(closures))
        object.__setattr__(self, "args", tuple(args))


Term = Union[TermVar, Call]


@dataclass(frozen=True)
class ClosureVar:
    name: str


@dataclass(frozen=True)
class Lambda:
    params: tuple
    body: Term

    def __init__(self, params, body):
        object.__setattr__(self, "params", tuple(params))
        object.__setattr__(self, "body", body)


Closure = Union[ClosureVar, Lambda]


@dataclass
class Program2:
    boxed_oracles: list  # [(name, arity)]
    boxed_words: list
    procedures: list
    main: Term

    def procedure(self, name: str) -> Procedure | None:
        for p in self.procedures:
            if p.name == name:
                return p
        return None


Program = Union[Program1, Program2]


# ---------------------------------------------------------------------------
# Walkers


def iter_exprs(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal of an expression tree."""
    yield e
    if isinstance(e, OpApp):
        for a in e.args:
            yield from iter_exprs(a)
    elif isinstance(e, Declass):
        yield from iter_exprs(e.expr)
        yield from iter_exprs(e.bound)
    elif isinstance(e, OracleCall):
        for a in e.args:
            yield from iter_exprs(a)


def stmt_exprs(s: Stmt) -> Iterator[Expr]:
    """The expressions occurring directly in one statement node."""
    if isinstance(s, Assign):
        yield s.expr
    elif isinstance(s, (If, While, Break)):
        yield s.guard
    elif isinstance(s, OracleBreak):
        yield OracleCall(s.oracle, s.call_args)
        yield OracleCall(s.oracle, tuple(Var(v) for v in s.ref_vars))
    elif isinstance(s, For):
        yield s.low
        yield s.high


def iter_stmts(s: Stmt) -> Iterator[Stmt]:
    """Pre-order traversal of a statement tree."""
    yield s
    if isinstance(s, Seq):
        yield from iter_stmts(s.first)
        yield from iter_stmts(s.second)
    elif isinstance(s, If):
        yield from iter_stmts(s.then)
        yield from iter_stmts(s.orelse)
    elif isinstance(s, (While, For)):
        yield from iter_stmts(s.body)


def seq_chain(s: Stmt) -> list:
    """Flatten a Seq tree into the ordered list of its component statements."""
    if isinstance(s, Seq):
        return seq_chain(s.first) + seq_chain(s.second)
    return [s]


def seq_of(parts: list) -> Stmt:
    """Right-nested sequence of the given statements (the parser's shape)."""
    if not parts:
        return Skip()
    node = parts[-1]
    for p in reversed(parts[:-1]):
        node = Seq(p, node)
    return node


def expr_vars(e: Expr) -> set:
    out = set()
    for sub in iter_exprs(e):
        if isinstance(sub, Var):
            out.add(sub.name)
    return out


def stmt_vars(s: Stmt) -> set:
    """All order-0 variable names occurring in a statement tree."""
    out = set()
    for st in iter_stmts(s):
        if isinstance(st, Assign):
            out.add(st.var)
        elif isinstance(st, OracleBreak):
            out.update(st.ref_vars)
        elif isinstance(st, For):
            out.add(st.var)
        for e in stmt_exprs(st):
            out.update(expr_vars(e))
    return out


def program_vars(p: Program1) -> set:
    return set(p.params) | stmt_vars(p.body) | {p.ret}


def loop_nesting_depth(s: Stmt) -> int:
    """Maximum number of nested While nodes along any path (no For allowed)."""
    if isinstance(s, For):
        raise ValueError("loop_nesting_depth requires desugared statements")
    if isinstance(s, Seq):
        return max(loop_nesting_depth(s.first), loop_nesting_depth(s.second))
    if isinstance(s, If):
        return max(loop_nesting_depth(s.then), loop_nesting_depth(s.orelse))
    if isinstance(s, While):
        return 1 + loop_nesting_depth(s.body)
    return 0


def loops_of(s: Stmt) -> list:
    return [st for st in iter_stmts(s) if isinstance(st, While)]


def assign_loop_ids(program: Program) -> None:
    """Number every While node in pre-order, starting from 1.

    Deterministic, so re-parsing pretty-printed output reproduces ids.
    """
    counter = 1

    def number(s: Stmt):
        nonlocal counter
        for st in iter_stmts(s):
            if isinstance(st, While):
                st.loop_id = counter
                counter += 1

    if isinstance(program, Program1):
        number(program.body)
    else:
        for proc in program.procedures:
            number(proc.body)


def check_unique_loop_ids(program: Program) -> bool:
    bodies = (
        [program.body]
        if isinstance(program, Program1)
        else [p.body for p in program.procedures]
    )
    seen = set()
    for b in bodies:
        for w in loops_of(b):
            if w.loop_id in seen or w.loop_id < 0:
                return False
            seen.add(w.loop_id)
    return True


# ---------------------------------------------------------------------------
# Free variables of second-order programs


def _term_vars(t: Term, bound: set, free: set) -> None:
    if isinstance(t, TermVar):
        if t.name not in bound:
            free.add(t.name)
        return
    for c in t.closures:
        if isinstance(c, ClosureVar):
            if c.name not in bound:
                free.add(c.name)
        else:
            _term_vars(c.body, bound | set(c.params), free)
    for a in t.args:
        _term_vars(a, bound, free)


def free_variables(p: Program2) -> set:
    """Variables neither boxed nor bound by a procedure or lambda binder."""
    boxed = {n for n, _ in p.boxed_oracles} | set(p.boxed_words)
    free: set = set()
    for proc in p.procedures:
        bound = (
            {n for n, _ in proc.oracle_params}
            | set(proc.params)
            | set(proc.locals)
        )
        for name in stmt_vars(proc.body) | {proc.ret}:
            if name not in bound:
                free.add(name)
        for st in iter_stmts(proc.body):
            for e in stmt_exprs(st):
                for sub in iter_exprs(e):
                    if isinstance(sub, OracleCall) and sub.oracle not in bound:
                        free.add(sub.oracle)
    _term_vars(p.main, boxed, free)
    return free - boxed
