"""Level inference and checking for first-order programs.

Safety means the program body can be typed from the loop-free context.
Inference works by translating the typing rules into a system of
inequalities over one level unknown per program variable, per while loop,
and per intermediate expression or if-statement position.  The inner and
outer context levels of any position are fully determined by the chain of
enclosing loops, which resolves the two disjunctive side conditions
statically:

* the assignment condition (outer = 0) or (target <= source) is settled by
  whether the assignment sits inside a loop at all;
* the positive-operator condition (result < inner) or (result = 0)
  collapses to result = 0 outside loops and to result < inner inside them,
  because inner loop levels are always at least 1.

What remains is a difference-constraint system (v >= u, v >= u + 1,
bounds against constants) solved by least-fixpoint propagation; the least
solution is returned as the variable typing environment.  Divergence past
the number of unknowns witnesses an unsatisfiable strict cycle.

``brute_force_safe`` is an independent oracle: it enumerates variable
environments and rule-directed derivations outright, with all levels drawn
from a finite range.

Oracle calls (second-order bodies) are handled by the same generator:
their level is the infinite sentinel, which may only flow into the first
operand of truncate, a declass operand position that tolerates it, or an
oracle break; every other use is reported unsafe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import opreg
from .parser import _pp_expr as pp_expr
from .syntax import (
    Assign,
    Break,
    Declass,
    For,
    If,
    INFINITY,
    OpApp,
    OracleBreak,
    OracleCall,
    Program1,
    Seq,
    Skip,
    Var,
    While,
    iter_stmts,
    level_str,
    program_vars,
)


def undeclassified_vars(e) -> frozenset:
    """The variables of e that are not shielded by a declass first operand."""
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, OpApp):
        out = frozenset()
        for a in e.args:
            out |= undeclassified_vars(a)
        return out
    if isinstance(e, Declass):
        return undeclassified_vars(e.bound)
    if isinstance(e, OracleCall):
        out = frozenset()
        for a in e.args:
            out |= undeclassified_vars(a)
        return out
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# Constraint system

INF = INFINITY  # expression-level sentinel; never a solver unknown


@dataclass
class _Edge:
    src: object  # unknown name or int
    delta: int
    dst: str
    origin: str


@dataclass
class _Upper:
    unknown: str
    bound: int
    origin: str


class Constraints:
    def __init__(self):
        self.unknowns: set = set()
        self.edges: list = []
        self.uppers: list = []
        self.failure: str | None = None

    def fresh(self, name: str) -> str:
        self.unknowns.add(name)
        return name

    def fail(self, origin: str):
        if self.failure is None:
            self.failure = origin

    def le(self, a, b, origin: str):
        """a <= b over levels; INF is handled eagerly."""
        if a == INF and b == INF:
            return
        if a == INF:
            self.fail(origin)
            return
        if b == INF:
            return
        self._amount(a, 0, b, origin)

    def lt(self, a, b, origin: str):
        if a == INF:
            self.fail(origin)
            return
        if b == INF:
            return
        self._amount(a, 1, b, origin)

    def eq(self, a, b, origin: str):
        if a == INF or b == INF:
            if a != b:
                self.fail(origin)
            return
        self.le(a, b, origin)
        self.le(b, a, origin)

    def _amount(self, a, delta, b, origin):
        if isinstance(a, int) and isinstance(b, int):
            if a + delta > b:
                self.fail(origin)
        elif isinstance(b, int):
            self.uppers.append(_Upper(a, b - delta, origin))
        else:
            self.edges.append(_Edge(a, delta, b, origin))

    def solve(self):
        """Least solution, or (None, explanation) when unsatisfiable."""
        if self.failure is not None:
            return None, self.failure
        values = {u: 0 for u in self.unknowns}
        preds: dict = {}
        by_src: dict = {}
        for e in self.edges:
            by_src.setdefault(e.src, []).append(e)
        bound = len(self.unknowns) + 2

        def relax(edge):
            base = edge.src if isinstance(edge.src, int) else values[edge.src]
            if values[edge.dst] < base + edge.delta:
                values[edge.dst] = base + edge.delta
                preds[edge.dst] = edge
                return True
            return False

        work = [e for e in self.edges if isinstance(e.src, int)]
        while work:
            edge = work.pop()
            if relax(edge):
                if values[edge.dst] > bound:
                    return None, self._chain(edge.dst, preds)
                for nxt in by_src.get(edge.dst, []):
                    work.append(nxt)
        # Plain propagation above only seeds from constant sources; run a
        # full pass loop to reach a fixpoint from zero-valued unknowns too.
        changed = True
        rounds = 0
        while changed:
            changed = False
            rounds += 1
            for edge in self.edges:
                if relax(edge):
                    changed = True
                    if values[edge.dst] > bound:
                        return None, self._chain(edge.dst, preds)
            if rounds > bound + 2:
                return None, "constraint propagation failed to stabilize"
        for up in self.uppers:
            if values[up.unknown] > up.bound:
                detail = self._chain(up.unknown, preds)
                return None, (
                    f"{up.origin}: needs level({up.unknown}) <= {up.bound} "
                    f"but other constraints force {values[up.unknown]}"
                    + (f"; {detail}" if detail else "")
                )
        return values, None

    def _chain(self, unknown: str, preds: dict) -> str:
        parts = []
        cur = unknown
        for _ in range(min(len(self.unknowns) + 1, 12)):
            edge = preds.get(cur)
            if edge is None:
                break
            parts.append(edge.origin)
            if isinstance(edge.src, int):
                break
            cur = edge.src
        if not parts:
            return ""
        unique = list(dict.fromkeys(parts))
        return "conflicting constraint chain: " + " <- ".join(unique)


# ---------------------------------------------------------------------------
# Constraint generation from the typing rules


class LevelAnalysis:
    """Generates constraints for one statement tree (a program or procedure body)."""

    def __init__(self, registry, fixed_gamma=None):
        self.registry = registry
        self.cs = Constraints()
        self.fixed_gamma = fixed_gamma
        self.expr_counter = 0

    # -- terms

    def var_term(self, name: str):
        if self.fixed_gamma is not None:
            if name not in self.fixed_gamma:
                return 0
            return self.fixed_gamma[name]
        return self.cs.fresh(f"var:{name}")

    def loop_term(self, loop_id: int) -> str:
        return self.cs.fresh(f"loop:{loop_id}")

    def fresh_expr(self) -> str:
        self.expr_counter += 1
        return self.cs.fresh(f"e{self.expr_counter}")

    @staticmethod
    def _in_loop(tout) -> bool:
        return not (isinstance(tout, int) and tout == 0)

    # -- expressions
    #
    # Generation returns (level term, info); the info mirrors the expression
    # shape (term plus child infos) so the derivation builder never needs to
    # key anything by node identity (subtrees may be shared objects).

    def gen_expr(self, e, tin, tout):
        if isinstance(e, Var):
            term = self.var_term(e.name)
            return term, (term, [])
        if isinstance(e, OracleCall):
            kids = [self.gen_expr(a, tin, tout)[1] for a in e.args]
            return INF, (INF, kids)
        if isinstance(e, Declass):
            what = f"declass(..., {pp_expr(e.bound)})"
            t1, i1 = self.gen_expr(e.expr, tin, tout)
            t2, i2 = self.gen_expr(e.bound, tin, tout)
            self.cs.eq(
                t2, tout,
                f"the declass bound {pp_expr(e.bound)} must sit exactly at "
                f"the outermost loop level",
            )
            result = self.fresh_expr()
            self.cs.le(t1, result, f"{what}: declassified operand caps the result from below")
            self.cs.le(result, tout, f"{what}: the result level is capped by the outermost loop level")
            return result, (result, [i1, i2])
        if isinstance(e, OpApp):
            entry = self._entry(e.op)
            pairs = [self.gen_expr(a, tin, tout) for a in e.args]
            args = [t for t, _ in pairs]
            kids = [i for _, i in pairs]
            what = pp_expr(e)
            if entry.is_truncate:
                result = self.fresh_expr()
                if args[0] != INF:
                    self.cs.fail(
                        f"{what}: truncate's first operand must be an oracle call"
                    )
                    return result, (result, kids)
                if args[1] == INF:
                    self.cs.fail(f"{what}: truncate's bound cannot be an oracle call")
                    return result, (result, kids)
                self.cs.le(
                    tout, args[1],
                    f"{what}: the truncation bound must be at or above the "
                    f"outermost loop level",
                )
                if self._in_loop_tin(tin):
                    self.cs.lt(
                        result, tin,
                        f"{what}: a truncated oracle answer cannot reach the "
                        f"innermost loop level",
                    )
                return result, (result, kids)
            klass = entry.klass
            result = self.fresh_expr()
            if isinstance(klass, opreg.Polynomial):
                if self._in_loop(tout):
                    self.cs.fail(
                        f"{what}: operator {e.op} can grow polynomially and is "
                        f"not allowed inside loops"
                    )
                return result, (result, kids)
            for a in args:
                if a == INF:
                    self.cs.fail(
                        f"{what}: operator {e.op} cannot be applied to an "
                        f"oracle answer; truncate or declassify it first"
                    )
                    return result, (result, kids)
                self.cs.le(result, a, f"{what}: no upward flow through {e.op}")
            if isinstance(klass, opreg.Positive):
                if self._in_loop_tin(tin):
                    self.cs.lt(
                        result, tin,
                        f"{what}: a growing operator's result stays below the "
                        f"innermost loop level",
                    )
                else:
                    self.cs.le(
                        result, 0,
                        f"{what}: outside loops a growing operator's result "
                        f"sits at level 0",
                    )
            return result, (result, kids)
        raise TypeError(f"not an expression: {e!r}")

    def _in_loop_tin(self, tin) -> bool:
        return not (isinstance(tin, int) and tin == 0)

    def _entry(self, name):
        try:
            return self.registry.lookup(name)
        except opreg.UnknownOperator:
            self.cs.fail(f"unknown operator {name!r}")
            return opreg.OperatorEntry(name, 0, lambda: "", opreg.Neutral())

    # -- statements; returns (floor level terms, statement info)
    #
    # Statement infos mirror the statement shape; the derivation builder
    # consumes them in step with the AST.

    def gen_stmt(self, s, tin, tout):
        if isinstance(s, Skip):
            return [], ("skip",)
        if isinstance(s, Assign):
            what = f"{s.var} := {pp_expr(s.expr)}"
            t, einfo = self.gen_expr(s.expr, tin, tout)
            gx = self.var_term(s.var)
            if t == INF:
                self.cs.fail(
                    f"{what}: an oracle answer cannot be assigned directly; "
                    f"truncate or declassify it first"
                )
                return [gx], ("asg", einfo)
            if self._in_loop(tout):
                self.cs.le(
                    gx, t,
                    f"{what}: inside a loop the target's level cannot exceed "
                    f"the source's",
                )
            return [gx], ("asg", einfo)
        if isinstance(s, Seq):
            f1, i1 = self.gen_stmt(s.first, tin, tout)
            f2, i2 = self.gen_stmt(s.second, tin, tout)
            return f1 + f2, ("seq", i1, i2)
        if isinstance(s, If):
            what = f"if({pp_expr(s.guard)})"
            iota = self.fresh_expr()
            t, ginfo = self.gen_expr(s.guard, tin, tout)
            self.cs.eq(t, iota, f"{what}: the branch level is the guard's level")
            ft, it_ = self.gen_stmt(s.then, tin, tout)
            fo, io = self.gen_stmt(s.orelse, tin, tout)
            for f in ft + fo:
                self.cs.le(f, iota, f"{what}: branches type at the guard's level")
            return [iota], ("if", iota, ginfo, it_, io)
        if isinstance(s, While):
            what = f"while({pp_expr(s.guard)}) [loop {s.loop_id}]"
            lam = self.loop_term(s.loop_id)
            self.cs.le(1, lam, f"{what}: loop levels start at 1")
            if self._in_loop(tout):
                inner_out = tout
                self.cs.le(
                    lam, tout,
                    f"{what}: a nested loop's level is capped by the outermost",
                )
            else:
                inner_out = lam
            t, ginfo = self.gen_expr(s.guard, lam, inner_out)
            if t == INF:
                self.cs.fail(f"{what}: a loop cannot be guarded by an oracle answer")
            else:
                self.cs.eq(t, lam, f"{what}: the guard types exactly at the loop level")
            fb, binfo = self.gen_stmt(s.body, lam, inner_out)
            for f in fb:
                self.cs.le(f, lam, f"{what}: the body types at the loop level")
            return [lam], ("wh", lam, ginfo, binfo)
        if isinstance(s, Break):
            what = f"break({pp_expr(s.guard)})"
            t, ginfo = self.gen_expr(s.guard, tin, tout)
            if t != INF:
                self.cs.le(
                    tin, t,
                    f"{what}: a break guard sits at or above the innermost "
                    f"loop level",
                )
            return [tin], ("brk", ginfo)
        if isinstance(s, OracleBreak):
            what = f"break(|{s.oracle}(...)| > |{s.oracle}({', '.join(s.ref_vars)})|)"
            arg_infos = [self.gen_expr(a, tin, tout)[1] for a in s.call_args]
            ref_terms = []
            for v in s.ref_vars:
                gv = self.var_term(v)
                ref_terms.append(gv)
                self.cs.lt(
                    tout, gv,
                    f"{what}: reference variable {v} must sit strictly above "
                    f"the outermost loop level",
                )
            return [tin], ("obk", arg_infos, ref_terms)
        if isinstance(s, For):
            raise ValueError("for loops must be desugared before safety analysis")
        raise TypeError(f"not a statement: {s!r}")


# ---------------------------------------------------------------------------
# Typing derivations


@dataclass
class Judgment:
    rule: str
    subject: object
    tin: object
    tout: object
    level: object
    children: list = field(default_factory=list)

    def pretty(self, indent=0) -> str:
        pad = "  " * indent
        head = (
            f"{pad}({self.rule}) |-^{level_str(self.tin)}_{level_str(self.tout)} "
            f": {level_str(self.level)}"
        )
        return "\n".join([head] + [c.pretty(indent + 1) for c in self.children])


class _DerivationBuilder:
    """Turns solved constraints plus generation infos into a checkable tree."""

    def __init__(self, values: dict, gamma: dict):
        self.values = values
        self.gamma = gamma

    def value(self, term):
        if term == INF:
            return INFINITY
        if isinstance(term, int):
            return term
        return self.values[term]

    def expr(self, e, info, tin, tout) -> Judgment:
        term, kid_infos = info
        lvl = self.value(term)
        if isinstance(e, Var):
            return Judgment("VAR", e, tin, tout, lvl)
        if isinstance(e, OpApp):
            kids = [
                self.expr(a, i, tin, tout) for a, i in zip(e.args, kid_infos)
            ]
            return Judgment("OP", e, tin, tout, lvl, kids)
        if isinstance(e, Declass):
            kids = [
                self.expr(e.expr, kid_infos[0], tin, tout),
                self.expr(e.bound, kid_infos[1], tin, tout),
            ]
            return Judgment("DCL", e, tin, tout, lvl, kids)
        if isinstance(e, OracleCall):
            kids = [
                self.expr(a, i, tin, tout) for a, i in zip(e.args, kid_infos)
            ]
            return Judgment("ORC", e, tin, tout, INFINITY, kids)
        raise TypeError(f"not an expression: {e!r}")

    def raise_to(self, j: Judgment, level) -> Judgment:
        if j.level == level:
            return j
        return Judgment("SUB", j.subject, j.tin, j.tout, level, [j])

    def stmt(self, s, info, tin, tout) -> Judgment:
        if isinstance(s, Skip):
            return Judgment("SKP", s, tin, tout, 0)
        if isinstance(s, Assign):
            kid = self.expr(s.expr, info[1], tin, tout)
            return Judgment("ASG", s, tin, tout, self.gamma.get(s.var, 0), [kid])
        if isinstance(s, Seq):
            a = self.stmt(s.first, info[1], tin, tout)
            b = self.stmt(s.second, info[2], tin, tout)
            lvl = max(a.level, b.level)
            return Judgment(
                "SEQ", s, tin, tout, lvl, [self.raise_to(a, lvl), self.raise_to(b, lvl)]
            )
        if isinstance(s, If):
            _, iota, ginfo, tinfo, oinfo = info
            g = self.expr(s.guard, ginfo, tin, tout)
            t = self.stmt(s.then, tinfo, tin, tout)
            o = self.stmt(s.orelse, oinfo, tin, tout)
            lvl = self.value(iota)
            return Judgment(
                "CND", s, tin, tout, lvl,
                [g, self.raise_to(t, lvl), self.raise_to(o, lvl)],
            )
        if isinstance(s, While):
            _, lam_term, ginfo, binfo = info
            lam = self.value(lam_term)
            outside = isinstance(tout, int) and tout == 0
            inner_out = lam if outside else tout
            g = self.expr(s.guard, ginfo, lam, inner_out)
            b = self.stmt(s.body, binfo, lam, inner_out)
            rule = "WI" if outside and tin == 0 else "WH"
            return Judgment(rule, s, tin, tout, lam, [g, self.raise_to(b, lam)])
        if isinstance(s, Break):
            g = self.expr(s.guard, info[1], tin, tout)
            return Judgment("BRK", s, tin, tout, tin, [g])
        if isinstance(s, OracleBreak):
            _, arg_infos, ref_terms = info
            left = OracleCall(s.oracle, s.call_args)
            right = OracleCall(s.oracle, tuple(Var(v) for v in s.ref_vars))
            lk = [
                self.expr(a, i, tin, tout)
                for a, i in zip(s.call_args, arg_infos)
            ]
            rk = [
                Judgment("VAR", Var(v), tin, tout, self.value(t))
                for v, t in zip(s.ref_vars, ref_terms)
            ]
            kids = [
                Judgment("ORC", left, tin, tout, INFINITY, lk),
                Judgment("ORC", right, tin, tout, INFINITY, rk),
            ] + rk
            return Judgment("OBK", s, tin, tout, tin, kids)
        raise TypeError(f"not a statement: {s!r}")


# ---------------------------------------------------------------------------
# Inference


class TooLarge(Exception):
    pass


@dataclass
class InferenceResult:
    safe: bool
    gamma: dict | None = None
    loop_levels: dict | None = None
    derivation: Judgment | None = None
    body_level: object = None
    explanation: str | None = None

    def report(self) -> dict:
        return {
            "safe": self.safe,
            "gamma": {k: level_str(v) for k, v in sorted((self.gamma or {}).items())},
            "loop_levels": {
                str(k): level_str(v) for k, v in sorted((self.loop_levels or {}).items())
            },
            "explanation": self.explanation,
        }


def infer_safety(
    program: Program1, registry=None, config: opreg.DeltaConfig | None = None
) -> InferenceResult:
    """Infer a variable typing environment, or explain why none exists.

    Returns the pointwise least solution of the generated constraint
    system.  An optional DeltaConfig restricts the admissible operator
    levels; restrictions are enforced against the inferred witness.
    """
    registry = registry or opreg.builtin_registry()
    analysis = LevelAnalysis(registry)
    for name in sorted(program_vars(program)):
        analysis.var_term(name)
    floors, sinfo = analysis.gen_stmt(program.body, 0, 0)
    values, explanation = analysis.cs.solve()
    if values is None:
        return InferenceResult(False, explanation=explanation)
    gamma = {
        name[len("var:"):]: lvl for name, lvl in values.items() if name.startswith("var:")
    }
    loops = {
        int(name[len("loop:"):]): lvl
        for name, lvl in values.items()
        if name.startswith("loop:")
    }
    builder = _DerivationBuilder(values, gamma)
    derivation = builder.stmt(program.body, sinfo, 0, 0)
    body_level = max((f if isinstance(f, int) else values[f] for f in floors), default=0)
    if config is not None:
        offending = _config_violation(derivation, registry, config)
        if offending is not None:
            return InferenceResult(False, explanation=offending)
    return InferenceResult(True, gamma, loops, derivation, body_level)


def _config_violation(deriv: Judgment, registry, config) -> str | None:
    if deriv.rule == "OP":
        candidate = tuple(c.level for c in deriv.children) + (deriv.level,)
        if not opreg.delta_membership(
            registry, deriv.subject.op, deriv.tin, deriv.tout, candidate, config
        ):
            return (
                f"operator {deriv.subject.op} with levels "
                f"{opreg.candidate_str(candidate)} is forbidden by the "
                f"registry restriction"
            )
    for c in deriv.children:
        hit = _config_violation(c, registry, config)
        if hit is not None:
            return hit
    return None


# ---------------------------------------------------------------------------
# Derivation checking


def check_derivation(
    program: Program1, gamma: dict, deriv: Judgment, registry=None,
    config: opreg.DeltaConfig | None = None,
) -> bool:
    """Mechanically re-check a derivation against the typing rules.

    Accepts derivations with explicit SUB nodes as well as folded ones
    (statement nodes presented at a level above their natural one).
    """
    registry = registry or opreg.builtin_registry()
    if any(v == INFINITY for v in gamma.values()):
        return False  # first-order environments map into the finite levels
    if deriv.subject is not program.body and deriv.subject != program.body:
        return False
    if deriv.tin != 0 or deriv.tout != 0:
        return False
    return _check_node(deriv, gamma, registry, config)


def _finite(x) -> bool:
    return x != INFINITY


def _check_expr_node(j, gamma, registry, config) -> bool:
    e = j.subject
    if j.rule == "VAR":
        return isinstance(e, Var) and gamma.get(e.name, 0) == j.level
    if j.rule == "OP":
        if not isinstance(e, OpApp) or len(j.children) != len(e.args):
            return False
        for kid, arg in zip(j.children, e.args):
            if kid.subject != arg or (kid.tin, kid.tout) != (j.tin, j.tout):
                return False
            if not _check_expr_node(kid, gamma, registry, config):
                return False
        candidate = tuple(k.level for k in j.children) + (j.level,)
        try:
            return opreg.delta_membership(
                registry, e.op, j.tin, j.tout, candidate, config
            )
        except (opreg.UnknownOperator, ValueError):
            return False
    if j.rule == "DCL":
        if not isinstance(e, Declass) or len(j.children) != 2:
            return False
        c1, c2 = j.children
        if c1.subject != e.expr or c2.subject != e.bound:
            return False
        if not all(
            _check_expr_node(c, gamma, registry, config) for c in (c1, c2)
        ):
            return False
        return c2.level == j.tout and c1.level <= j.level <= j.tout
    if j.rule == "ORC":
        if not isinstance(e, OracleCall) or j.level != INFINITY:
            return False
        return all(_check_expr_node(k, gamma, registry, config) for k in j.children)
    return False


def _check_node(j: Judgment, gamma, registry, config) -> bool:
    s = j.subject
    if j.rule in ("VAR", "OP", "DCL", "ORC"):
        return _check_expr_node(j, gamma, registry, config)
    if j.rule == "SUB":
        if len(j.children) != 1:
            return False
        kid = j.children[0]
        return (
            kid.subject == s
            and (kid.tin, kid.tout) == (j.tin, j.tout)
            and kid.level <= j.level
            and _check_node(kid, gamma, registry, config)
        )
    if j.rule == "SKP":
        return isinstance(s, Skip) and j.level >= 0
    if j.rule == "ASG":
        if not isinstance(s, Assign) or len(j.children) != 1:
            return False
        kid = j.children[0]
        if kid.subject != s.expr or (kid.tin, kid.tout) != (j.tin, j.tout):
            return False
        if not _check_expr_node(kid, gamma, registry, config):
            return False
        target = gamma.get(s.var, 0)
        if j.level < target:
            return False
        if not _finite(kid.level):
            return False
        return j.tout == 0 or target <= kid.level
    if j.rule == "SEQ":
        if not isinstance(s, Seq) or len(j.children) != 2:
            return False
        a, b = j.children
        return (
            a.subject == s.first
            and b.subject == s.second
            and a.level == b.level == j.level
            and (a.tin, a.tout) == (b.tin, b.tout) == (j.tin, j.tout)
            and _check_node(a, gamma, registry, config)
            and _check_node(b, gamma, registry, config)
        )
    if j.rule == "CND":
        if not isinstance(s, If) or len(j.children) != 3:
            return False
        g, t, o = j.children
        if g.subject != s.guard or t.subject != s.then or o.subject != s.orelse:
            return False
        if not all((c.tin, c.tout) == (j.tin, j.tout) for c in (g, t, o)):
            return False
        if not (g.level == t.level == o.level <= j.level):
            return False
        return (
            _check_expr_node(g, gamma, registry, config)
            and _check_node(t, gamma, registry, config)
            and _check_node(o, gamma, registry, config)
        )
    if j.rule in ("WH", "WI"):
        if not isinstance(s, While) or len(j.children) != 2:
            return False
        g, b = j.children
        lam = g.level
        if not _finite(lam) or lam < 1:
            return False
        if g.subject != s.guard or b.subject != s.body:
            return False
        if b.level != lam or j.level < lam:
            return False
        if j.rule == "WI":
            if (j.tin, j.tout) != (0, 0):
                return False
            expected = (lam, lam)
        else:
            if not (1 <= lam <= j.tout):
                return False
            expected = (lam, j.tout)
        if (g.tin, g.tout) != expected or (b.tin, b.tout) != expected:
            return False
        return _check_expr_node(g, gamma, registry, config) and _check_node(
            b, gamma, registry, config
        )
    if j.rule == "BRK":
        if not isinstance(s, Break) or len(j.children) != 1:
            return False
        g = j.children[0]
        if g.subject != s.guard or (g.tin, g.tout) != (j.tin, j.tout):
            return False
        if not _check_expr_node(g, gamma, registry, config):
            return False
        return j.level >= j.tin and g.level >= j.tin
    if j.rule == "OBK":
        if not isinstance(s, OracleBreak) or len(j.children) < 2:
            return False
        left, right = j.children[0], j.children[1]
        refs = j.children[2:]
        if left.rule != "ORC" or right.rule != "ORC":
            return False
        if len(refs) != len(s.ref_vars):
            return False
        for k, v in zip(refs, s.ref_vars):
            if not (isinstance(k.subject, Var) and k.subject.name == v):
                return False
            if not _check_expr_node(k, gamma, registry, config):
                return False
            if not (j.tout < k.level):
                return False
        return (
            _check_expr_node(left, gamma, registry, config)
            and _check_expr_node(right, gamma, registry, config)
            and j.level >= j.tin
        )
    return False


# ---------------------------------------------------------------------------
# Brute-force oracle


def brute_force_safe(
    program: Program1, max_level: int, registry=None, var_limit: int = 6
) -> bool:
    """Decide safety by enumerating environments and derivations outright.

    All levels (variable, loop, and intermediate judgment levels) are drawn
    from 0..max_level.  Independent of the constraint engine; used as the
    differential-testing oracle.
    """
    registry = registry or opreg.builtin_registry()
    names = sorted(program_vars(program))
    if len(names) > var_limit:
        raise TooLarge(f"brute force limited to {var_limit} variables")
    levels = range(max_level + 1)
    full = frozenset(levels)

    for combo in itertools.product(levels, repeat=len(names)):
        gamma = dict(zip(names, combo))
        memo_e: dict = {}
        memo_s: dict = {}

        def expr_levels(e, tin, tout) -> frozenset:
            key = (id(e), tin, tout)
            if key in memo_e:
                return memo_e[key]
            if isinstance(e, Var):
                out = frozenset((gamma[e.name],))
            elif isinstance(e, Declass):
                bound_levels = expr_levels(e.bound, tin, tout)
                if tout not in bound_levels:
                    out = frozenset()
                else:
                    lows = expr_levels(e.expr, tin, tout)
                    out = frozenset(
                        t for t in levels if any(l <= t <= tout for l in lows)
                    )
            elif isinstance(e, OpApp):
                arg_sets = [expr_levels(a, tin, tout) for a in e.args]
                out = set()
                for args in itertools.product(*arg_sets):
                    for r in levels:
                        if opreg.delta_membership(
                            registry, e.op, tin, tout, args + (r,)
                        ):
                            out.add(r)
                out = frozenset(out)
            else:
                out = frozenset()  # oracle calls never reach a finite level
            memo_e[key] = out
            return out

        def up(base) -> frozenset:
            if not base:
                return frozenset()
            low = min(base)
            return frozenset(range(low, max_level + 1))

        def stmt_pres(s, tin, tout) -> frozenset:
            key = (id(s), tin, tout)
            if key in memo_s:
                return memo_s[key]
            if isinstance(s, Skip):
                out = full
            elif isinstance(s, Assign):
                sources = expr_levels(s.expr, tin, tout)
                ok = any(tout == 0 or gamma[s.var] <= l2 for l2 in sources)
                out = up({gamma[s.var]}) if ok else frozenset()
            elif isinstance(s, Seq):
                out = stmt_pres(s.first, tin, tout) & stmt_pres(s.second, tin, tout)
            elif isinstance(s, If):
                g = expr_levels(s.guard, tin, tout)
                t = stmt_pres(s.then, tin, tout)
                o = stmt_pres(s.orelse, tin, tout)
                out = up(g & t & o)
            elif isinstance(s, While):
                cap = tout if tout > 0 else max_level
                base = set()
                for tau in range(1, cap + 1):
                    inner_out = tout if tout > 0 else tau
                    if tau not in expr_levels(s.guard, tau, inner_out):
                        continue
                    if tau in stmt_pres(s.body, tau, inner_out):
                        base.add(tau)
                out = up(base)
            elif isinstance(s, Break):
                g = expr_levels(s.guard, tin, tout)
                out = up({tin}) if any(l >= tin for l in g) else frozenset()
            else:
                out = frozenset()
            memo_s[key] = out
            return out

        if stmt_pres(program.body, 0, 0):
            return True
    return False


# ---------------------------------------------------------------------------
# The decidable for-loop criterion


def check_for_program(program: Program1) -> bool:
    """True iff every while loop originated from for-loop sugar."""
    for st in iter_stmts(program.body):
        if isinstance(st, While) and not st.for_origin:
            return False
        if isinstance(st, For):
            return False
    return True
