"""Second-order programs: guardedness, simple types, level typing, evaluation.

A second-order program boxes its inputs (order-1 oracle variables and
order-0 words), declares procedures, and runs one term.  Oracle calls are
confined by the guardedness check to assignment right-hand sides (bare, or
as the first operand of truncate or declass) and to size-comparison breaks;
inside a loop every oracle-carrying assignment must directly follow a break
comparing that same call against a fixed reference call.

Level typing reuses the first-order constraint engine: oracle calls sit at
the infinite level, which may only be consumed by truncate, and loops can
never be guarded by it.  Each procedure body is checked from the loop-free
context, so a procedure's entry records its variable environment and the
body level.

Evaluation threads one store through statements per call frame; procedure
calls copy the caller's store, bind parameters and locals, and fix the
oracle environment for the duration of the body.  Closure bodies evaluate
under the store current at the oracle call, with the closure's binders
shadowing it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import interp1, opreg, words
from .interp1 import (
    AperiodicityViolation,
    BudgetExhausted,
    DEFAULT_BUDGET,
    ExecError,
    ExecStats,
    LoopMonitorState,
    monitor_guard,
)
from .parser import _pp_expr as pp_expr
from .safety1 import INF, Judgment, LevelAnalysis, _DerivationBuilder, undeclassified_vars
from .syntax import (
    Assign,
    Break,
    Call,
    ClosureVar,
    Declass,
    If,
    INFINITY,
    Lambda,
    OpApp,
    OracleBreak,
    OracleCall,
    Procedure,
    Program1,
    Program2,
    Seq,
    Skip,
    TermVar,
    Var,
    While,
    iter_exprs,
    iter_stmts,
    level_str,
    seq_chain,
    stmt_exprs,
    stmt_vars,
)

# monitor2 is the per-frame analogue of the first-order guard monitor; the
# activation state type and observation logic are shared.
monitor2 = monitor_guard


# ---------------------------------------------------------------------------
# Guardedness


class GuardednessError(Exception):
    def __init__(self, clause: int, where: str, message: str):
        self.clause = clause
        self.where = where
        super().__init__(f"clause ({clause}) at {where}: {message}")


def _oracle_calls(e) -> list:
    return [sub for sub in iter_exprs(e) if isinstance(sub, OracleCall)]


def _assert_oracle_free(e, where: str):
    if _oracle_calls(e):
        raise GuardednessError(
            1, where, "oracle calls may only appear in assignments or breaks"
        )


def _allowed_assignment_call(expr) -> OracleCall | None:
    """The single permitted oracle call of an assignment RHS, if any.

    Permitted shapes: X(e...) bare, truncate(X(e...), b), declass(X(e...), b);
    the call's own arguments and the rest of the expression are oracle free.
    """
    calls = _oracle_calls(expr)
    if not calls:
        return None
    if isinstance(expr, OracleCall):
        head, rest = expr, list(expr.args)
    elif isinstance(expr, OpApp) and expr.op == "truncate" and expr.args and isinstance(expr.args[0], OracleCall):
        head, rest = expr.args[0], list(expr.args[0].args) + list(expr.args[1:])
    elif isinstance(expr, Declass) and isinstance(expr.expr, OracleCall):
        head, rest = expr.expr, list(expr.expr.args) + [expr.bound]
    else:
        return None
    for other in rest:
        if _oracle_calls(other):
            return None
    if len(calls) != 1:
        return None
    return head


def _check_guarded_stmt(s, in_loop: bool, proc: Procedure):
    for idx, st in enumerate(seq_chain(s)):
        where = f"procedure {proc.name}"
        if isinstance(st, Assign):
            if not _oracle_calls(st.expr):
                continue
            call = _allowed_assignment_call(st.expr)
            if call is None:
                raise GuardednessError(
                    1,
                    f"{where}, {st.var} := {pp_expr(st.expr)}",
                    "an oracle call may only be the whole right-hand side or "
                    "the first operand of truncate or declass",
                )
            if in_loop:
                prev = seq_chain(s)[idx - 1] if idx > 0 else None
                if not (
                    isinstance(prev, OracleBreak)
                    and prev.oracle == call.oracle
                    and tuple(prev.call_args) == tuple(call.args)
                ):
                    raise GuardednessError(
                        2,
                        f"{where}, {st.var} := {pp_expr(st.expr)}",
                        "inside a loop an oracle-carrying assignment must "
                        "directly follow break(|X(e...)| > |X(vars)|) on the "
                        "same call",
                    )
        elif isinstance(st, If):
            _assert_oracle_free(st.guard, f"{where}, if({pp_expr(st.guard)})")
            _check_guarded_stmt(st.then, in_loop, proc)
            _check_guarded_stmt(st.orelse, in_loop, proc)
        elif isinstance(st, While):
            _assert_oracle_free(st.guard, f"{where}, while({pp_expr(st.guard)})")
            _check_guarded_stmt(st.body, True, proc)
        elif isinstance(st, Break):
            _assert_oracle_free(st.guard, f"{where}, break({pp_expr(st.guard)})")
        elif isinstance(st, OracleBreak):
            for a in st.call_args:
                _assert_oracle_free(a, f"{where}, oracle break argument")


def check_guarded(program: Program2) -> None:
    """Raise GuardednessError unless every oracle call is properly confined."""
    for proc in program.procedures:
        _check_guarded_stmt(proc.body, False, proc)


# ---------------------------------------------------------------------------
# Simple types


class SimpleTypeError(Exception):
    pass


W = "W"


def fn_type(arity: int) -> tuple:
    return ("fn", arity)


def type_str(t) -> str:
    if t == W:
        return "W"
    return "(" + " -> ".join(["W"] * t[1]) + " -> W)"


@dataclass
class SimpleResult:
    env: dict
    program_type: str


def simple_typecheck(program: Program2) -> SimpleResult:
    """Check well-formedness and the simple-type discipline.

    Returns the environment of boxed variables and procedures plus the
    overall program type (oracles first, then word inputs, then the result).
    """
    procs = {}
    for p in program.procedures:
        if p.name in procs:
            raise SimpleTypeError(f"procedure {p.name} declared more than once")
        overlap = set(p.params) & set(p.locals)
        if overlap:
            raise SimpleTypeError(
                f"procedure {p.name}: parameters and locals overlap: {sorted(overlap)}"
            )
        procs[p.name] = p

    boxed_words = set(program.boxed_words)
    boxed_oracles = dict(program.boxed_oracles)

    # Closed procedures: every name used in a body is a parameter or local.
    for p in program.procedures:
        scope = set(p.params) | set(p.locals)
        loose = (stmt_vars(p.body) | {p.ret}) - scope
        if loose:
            raise SimpleTypeError(
                f"procedure {p.name} is not closed: {sorted(loose)}"
            )
        oracle_scope = {n for n, _ in p.oracle_params}
        for st in iter_stmts(p.body):
            for e in stmt_exprs(st):
                for sub in iter_exprs(e):
                    if isinstance(sub, OracleCall):
                        if sub.oracle not in oracle_scope:
                            raise SimpleTypeError(
                                f"procedure {p.name}: oracle variable "
                                f"{sub.oracle} is not a parameter"
                            )
                        if len(sub.args) != p.oracle_arity(sub.oracle):
                            raise SimpleTypeError(
                                f"procedure {p.name}: oracle {sub.oracle} "
                                f"applied at the wrong arity"
                            )

    # Pairwise-disjoint binder sets (term free variables are empty for
    # closed programs; boxed names do not count as free).
    from .syntax import free_variables

    groups = [("term free variables", free_variables(program))]
    for p in program.procedures:
        params = {n for n, _ in p.oracle_params} | set(p.params)
        groups.append((f"parameters of {p.name}", params))
        groups.append((f"locals of {p.name}", set(p.locals)))
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            overlap = groups[i][1] & groups[j][1]
            if overlap:
                raise SimpleTypeError(
                    f"name clash between {groups[i][0]} and {groups[j][0]}: "
                    f"{sorted(overlap)}"
                )

    def type_term(t, local0: frozenset) -> None:
        if isinstance(t, TermVar):
            if t.name in local0 or t.name in boxed_words:
                return
            if t.name in boxed_oracles:
                raise SimpleTypeError(
                    f"order-1 variable {t.name} used where a word is expected"
                )
            raise SimpleTypeError(f"unbound term variable {t.name}")
        if isinstance(t, Call):
            proc = procs.get(t.proc)
            if proc is None:
                raise SimpleTypeError(f"call of undeclared procedure {t.proc}")
            if len(t.closures) != len(proc.oracle_params):
                raise SimpleTypeError(
                    f"{t.proc} expects {len(proc.oracle_params)} closure(s), "
                    f"got {len(t.closures)}"
                )
            for c, (oname, arity) in zip(t.closures, proc.oracle_params):
                if isinstance(c, ClosureVar):
                    if c.name not in boxed_oracles:
                        raise SimpleTypeError(
                            f"closure variable {c.name} is not a boxed oracle"
                        )
                    if boxed_oracles[c.name] != arity:
                        raise SimpleTypeError(
                            f"oracle {c.name} has arity {boxed_oracles[c.name]} "
                            f"but {t.proc} needs arity {arity} for {oname}"
                        )
                else:
                    if len(c.params) != arity:
                        raise SimpleTypeError(
                            f"closure for {oname} of {t.proc} must take "
                            f"{arity} argument(s), got {len(c.params)}"
                        )
                    type_term(c.body, local0 | frozenset(c.params))
            if len(t.args) != len(proc.params):
                raise SimpleTypeError(
                    f"{t.proc} expects {len(proc.params)} word argument(s), "
                    f"got {len(t.args)}"
                )
            for a in t.args:
                type_term(a, local0)
            return
        raise SimpleTypeError(f"not a term: {t!r}")

    type_term(program.main, frozenset())

    env = {n: fn_type(k) for n, k in program.boxed_oracles}
    env.update({n: W for n in program.boxed_words})
    for p in program.procedures:
        env[p.name] = tuple(
            [fn_type(k) for _, k in p.oracle_params] + [W] * len(p.params) + [W]
        )
    parts = [type_str(fn_type(k)) for _, k in program.boxed_oracles]
    parts += ["W"] * len(program.boxed_words)
    parts.append("W")
    return SimpleResult(env, " -> ".join(parts))


# ---------------------------------------------------------------------------
# Level typing


@dataclass
class ProcCheck:
    ok: bool
    derivation: Judgment | None = None
    gamma: dict | None = None
    body_level: object = None
    explanation: str | None = None


def _analyze_body(proc: Procedure, registry, fixed_gamma, tin, tout):
    analysis = LevelAnalysis(registry, fixed_gamma=fixed_gamma)
    if fixed_gamma is None:
        for name in sorted(set(proc.params) | set(proc.locals)):
            analysis.var_term(name)
    floors, sinfo = analysis.gen_stmt(proc.body, tin, tout)
    values, explanation = analysis.cs.solve()
    if values is None:
        return None, None, None, explanation

    def level_of(term):
        if term == INF:
            return INFINITY
        return term if isinstance(term, int) else values[term]

    body_level = max((level_of(f) for f in floors), default=0)
    return sinfo, values, body_level, None


def level_typecheck_procedure(
    proc: Procedure,
    gamma: dict,
    triple: tuple,
    registry=None,
    config: opreg.DeltaConfig | None = None,
) -> ProcCheck:
    """Check one procedure body against a given environment and level triple.

    ``triple`` is (body level, innermost level, outermost level); the body
    must be typable at the given body level (raising with subsumption is
    allowed) under the given context.
    """
    registry = registry or opreg.builtin_registry()
    tau, tin, tout = triple
    sinfo, values, natural, explanation = _analyze_body(
        proc, registry, dict(gamma), tin, tout
    )
    if sinfo is None:
        return ProcCheck(False, explanation=f"procedure {proc.name}: {explanation}")
    if tau < natural:
        return ProcCheck(
            False,
            explanation=(
                f"procedure {proc.name}: body needs level "
                f"{level_str(natural)}, but {level_str(tau)} was given"
            ),
        )
    builder = _DerivationBuilder(values, dict(gamma))
    derivation = builder.stmt(proc.body, sinfo, tin, tout)
    if config is not None:
        from .safety1 import _config_violation

        hit = _config_violation(derivation, registry, config)
        if hit is not None:
            return ProcCheck(False, explanation=f"procedure {proc.name}: {hit}")
    return ProcCheck(True, derivation, dict(gamma), natural)


def infer_procedure_levels(
    proc: Procedure, registry=None, config: opreg.DeltaConfig | None = None
) -> ProcCheck:
    """Infer a variable environment for one procedure body (context 0, 0)."""
    registry = registry or opreg.builtin_registry()
    sinfo, values, body_level, explanation = _analyze_body(
        proc, registry, None, 0, 0
    )
    if sinfo is None:
        return ProcCheck(False, explanation=f"procedure {proc.name}: {explanation}")
    gamma = {
        name[len("var:"):]: lvl
        for name, lvl in values.items()
        if name.startswith("var:")
    }
    builder = _DerivationBuilder(values, gamma)
    derivation = builder.stmt(proc.body, sinfo, 0, 0)
    if config is not None:
        from .safety1 import _config_violation

        hit = _config_violation(derivation, registry, config)
        if hit is not None:
            return ProcCheck(False, explanation=f"procedure {proc.name}: {hit}")
    return ProcCheck(True, derivation, gamma, body_level)


@dataclass
class Safety2Result:
    safe: bool
    stage: str | None = None  # failing stage when unsafe
    explanation: str | None = None
    omega: dict = field(default_factory=dict)
    simple_env: dict | None = None
    program_type: str | None = None
    derivations: dict = field(default_factory=dict)

    def report(self) -> dict:
        return {
            "safe": self.safe,
            "stage": self.stage,
            "explanation": self.explanation,
            "program_type": self.program_type,
            "omega": {
                name: {
                    "gamma": {v: level_str(l) for v, l in sorted(entry[0].items())},
                    "level": level_str(entry[1][0]),
                    "tin": level_str(entry[1][1]),
                    "tout": level_str(entry[1][2]),
                }
                for name, entry in sorted(self.omega.items())
            },
        }


def infer_safety2(
    program: Program2, registry=None, config: opreg.DeltaConfig | None = None
) -> Safety2Result:
    """Guardedness, then simple types, then per-procedure level inference."""
    registry = registry or opreg.builtin_registry()
    try:
        check_guarded(program)
    except GuardednessError as exc:
        return Safety2Result(False, "guardedness", str(exc))
    try:
        simple = simple_typecheck(program)
    except SimpleTypeError as exc:
        return Safety2Result(False, "simple-type", str(exc))
    result = Safety2Result(
        True, simple_env=simple.env, program_type=simple.program_type
    )
    for proc in program.procedures:
        check = infer_procedure_levels(proc, registry, config)
        if not check.ok:
            return Safety2Result(
                False,
                "levels",
                check.explanation,
                simple_env=simple.env,
                program_type=simple.program_type,
            )
        result.omega[proc.name] = (check.gamma, (check.body_level, 0, 0))
        result.derivations[proc.name] = check.derivation
    return result


# ---------------------------------------------------------------------------
# Oracles


@dataclass
class Oracle:
    """A named total word function; external input to a second-order run."""

    name: str
    arity: int
    fn: object = None
    program: Program1 | None = None

    def describe(self) -> str:
        return self.name


class OracleFailure(interp1.RuntimeStop):
    subcode = "oracle-failure"


def _bitflip(w: str) -> str:
    return w.translate(str.maketrans("01", "10"))


def make_oracle(spec: str, registry=None) -> Oracle:
    """Build an oracle from a CLI spec string.

    ``builtin:append1``, ``builtin:double``, ``builtin:bitflip``,
    ``builtin:const:WORD``, or ``prog:PATH`` (a first-order program file;
    its parameter count is the oracle's arity).
    """
    if spec.startswith("builtin:"):
        rest = spec[len("builtin:"):]
        if rest == "append1":
            return Oracle(spec, 1, lambda w: w + "1")
        if rest == "double":
            return Oracle(spec, 1, lambda w: w + w)
        if rest == "bitflip":
            return Oracle(spec, 1, _bitflip)
        if rest.startswith("const:"):
            value = words.word(rest[len("const:"):])
            return Oracle(spec, 1, lambda _w, value=value: value)
        raise OracleFailure(f"unknown builtin oracle {rest!r}")
    if spec.startswith("prog:"):
        from .parser import parse_file

        path = spec[len("prog:"):]
        prog = parse_file(path, registry=registry)
        if not isinstance(prog, Program1):
            raise OracleFailure(f"{path} is not a first-order program")
        return Oracle(spec, len(prog.params), program=prog)
    raise OracleFailure(f"unknown oracle spec {spec!r}")


def builtin_oracle_names() -> list:
    return ["builtin:append1", "builtin:double", "builtin:bitflip", "builtin:const:"]


# ---------------------------------------------------------------------------
# Evaluation


class Interp2:
    def __init__(self, program: Program2, oracles: dict, registry=None,
                 budget: int = DEFAULT_BUDGET, monitor: bool = False):
        self.program = program
        self.sigma = {p.name: p for p in program.procedures}
        self.registry = registry or opreg.builtin_registry()
        self.budget = budget
        self.monitor = monitor
        self.stats = ExecStats()
        self.oracles = oracles
        self.activation_serial = 0
        self.activation_stack: list = []

    def tick(self, n: int = 1):
        self.stats.steps += n
        if self.stats.steps > self.budget:
            raise BudgetExhausted(
                f"step budget of {self.budget} exhausted", self.stats
            )

    # -- oracle resolution

    def apply_oracle(self, store, env, name, args):
        self.stats.oracle_calls += 1
        closure = env.get(name)
        if closure is None:
            raise ExecError(f"oracle variable {name} is not bound here", self.stats)
        self.tick()
        if isinstance(closure, ClosureVar):
            value = store.get(closure.name)
            if value is None:
                # Unbound order-1 variables denote the constant empty function.
                return words.EPSILON
            if not isinstance(value, Oracle):
                raise ExecError(
                    f"{closure.name} does not hold an oracle", self.stats
                )
            return self.call_external(value, args)
        if isinstance(closure, Lambda):
            if len(closure.params) != len(args):
                raise ExecError(
                    f"closure for {name} got {len(args)} argument(s)", self.stats
                )
            inner = dict(store)
            inner.update(zip(closure.params, args))
            return self.eval_term(inner, closure.body)
        if isinstance(closure, Oracle):
            return self.call_external(closure, args)
        raise ExecError(f"cannot apply {closure!r} as an oracle", self.stats)

    def call_external(self, oracle: Oracle, args):
        if len(args) != oracle.arity:
            raise ExecError(
                f"oracle {oracle.name} expects {oracle.arity} argument(s)",
                self.stats,
            )
        if oracle.program is not None:
            sub = interp1.Interp(self.registry, self.budget - self.stats.steps)
            try:
                result = sub.run(oracle.program, list(args))
            finally:
                self.stats.steps += sub.stats.steps
            return result
        return words.word(oracle.fn(*args))

    # -- expressions

    def eval_expr(self, store, env, e) -> str:
        self.tick()
        if isinstance(e, Var):
            value = store.get(e.name, words.EPSILON)
            if isinstance(value, Oracle):
                raise ExecError(
                    f"order-1 variable {e.name} used as a word", self.stats
                )
            return value
        if isinstance(e, OpApp):
            args = [self.eval_expr(store, env, a) for a in e.args]
            try:
                return self.registry.apply(e.op, args)
            except opreg.UnknownOperator as exc:
                raise ExecError(f"unknown operator: {exc}", self.stats)
        if isinstance(e, Declass):
            w1 = self.eval_expr(store, env, e.expr)
            w2 = self.eval_expr(store, env, e.bound)
            return words.unary(min(len(w1), len(w2)))
        if isinstance(e, OracleCall):
            args = [self.eval_expr(store, env, a) for a in e.args]
            return self.apply_oracle(store, env, e.oracle, args)
        raise ExecError(f"not an expression: {e!r}", self.stats)

    # -- statements

    def exec_stmt(self, store, env, s) -> bool:
        if isinstance(s, Skip):
            self.tick()
            return False
        if isinstance(s, Assign):
            self.tick()
            store[s.var] = self.eval_expr(store, env, s.expr)
            size = sum(len(v) for v in store.values() if isinstance(v, str))
            if size > self.stats.max_store_size:
                self.stats.max_store_size = size
            return False
        if isinstance(s, Seq):
            self.tick()
            if self.exec_stmt(store, env, s.first):
                return True
            return self.exec_stmt(store, env, s.second)
        if isinstance(s, If):
            self.tick()
            guard = self.eval_expr(store, env, s.guard)
            branch = s.then if words.truthy(guard) else s.orelse
            return self.exec_stmt(store, env, branch)
        if isinstance(s, While):
            return self.exec_while(store, env, s)
        if isinstance(s, Break):
            self.tick()
            return words.truthy(self.eval_expr(store, env, s.guard))
        if isinstance(s, OracleBreak):
            self.tick()
            left_args = [self.eval_expr(store, env, a) for a in s.call_args]
            left = self.apply_oracle(store, env, s.oracle, left_args)
            right_args = [store.get(v, words.EPSILON) for v in s.ref_vars]
            right = self.apply_oracle(store, env, s.oracle, right_args)
            if self.activation_stack:
                loop_id, serial = self.activation_stack[-1]
                self.stats.obk_events.append(
                    (loop_id, serial, len(left), len(right))
                )
            return len(left) > len(right)
        raise ExecError(f"not a statement: {s!r}", self.stats)

    def exec_while(self, store, env, s: While) -> bool:
        state = None
        if self.monitor:
            state = LoopMonitorState(
                s.loop_id, tuple(sorted(undeclassified_vars(s.guard)))
            )
        self.activation_serial += 1
        self.activation_stack.append((s.loop_id, self.activation_serial))
        try:
            while True:
                self.tick()
                if state is not None:
                    witness = state.observe(store)
                    if witness is not None:
                        raise AperiodicityViolation(
                            s.loop_id, state.evaluations, witness, self.stats
                        )
                if not words.truthy(self.eval_expr(store, env, s.guard)):
                    return False
                self.stats.loop_iterations[s.loop_id] += 1
                self.tick()
                if self.exec_stmt(store, env, s.body):
                    return False
        finally:
            self.activation_stack.pop()

    # -- terms and programs

    def eval_term(self, store, t) -> str:
        self.tick()
        if isinstance(t, TermVar):
            value = store.get(t.name, words.EPSILON)
            if isinstance(value, Oracle):
                raise ExecError(
                    f"order-1 variable {t.name} used as a word", self.stats
                )
            return value
        if isinstance(t, Call):
            proc = self.sigma.get(t.proc)
            if proc is None:
                raise ExecError(f"undeclared procedure {t.proc}", self.stats)
            values = [self.eval_term(store, a) for a in t.args]
            if len(values) != len(proc.params) or len(t.closures) != len(
                proc.oracle_params
            ):
                raise ExecError(
                    f"call of {t.proc} does not match its parameter list",
                    self.stats,
                )
            frame = dict(store)
            frame.update(zip(proc.params, values))
            frame.update({name: words.EPSILON for name in proc.locals})
            env = {
                oname: closure
                for (oname, _), closure in zip(proc.oracle_params, t.closures)
            }
            self.exec_stmt(frame, env, proc.body)
            result = frame.get(proc.ret, words.EPSILON)
            if isinstance(result, Oracle):
                raise ExecError(
                    f"{t.proc} returned an order-1 value", self.stats
                )
            return result
        raise ExecError(f"not a term: {t!r}", self.stats)

    def run(self, inputs) -> str:
        if len(inputs) != len(self.program.boxed_words):
            raise ExecError(
                f"program expects {len(self.program.boxed_words)} word "
                f"input(s), got {len(inputs)}",
                self.stats,
            )
        store: dict = {}
        for (name, arity) in self.program.boxed_oracles:
            oracle = self.oracles.get(name)
            if oracle is None:
                raise ExecError(f"no oracle supplied for {name}", self.stats)
            if oracle.arity != arity:
                raise ExecError(
                    f"oracle for {name} must have arity {arity}, got "
                    f"{oracle.arity}",
                    self.stats,
                )
            store[name] = oracle
        for name, value in zip(self.program.boxed_words, inputs):
            store[name] = words.word(value)
        return self.eval_term(store, self.program.main)


def eval_program2(
    program: Program2,
    oracles,
    inputs,
    registry=None,
    budget: int = DEFAULT_BUDGET,
    monitor: bool = False,
):
    """Run a second-order program; returns (result word, stats).

    ``oracles`` maps boxed oracle names to Oracle values (a list in boxed
    order is also accepted).
    """
    if not isinstance(oracles, dict):
        oracles = {
            name: oracle
            for (name, _), oracle in zip(program.boxed_oracles, oracles)
        }
    interp = Interp2(program, oracles, registry, budget, monitor)
    result = interp.run(inputs)
    return result, interp.stats


# ---------------------------------------------------------------------------
# Embedding first-order programs


def embed_program1(p1: Program1) -> Program2:
    """Wrap a first-order program as a one-procedure second-order program."""
    locals_ = sorted((stmt_vars(p1.body) | {p1.ret}) - set(p1.params))
    proc = Procedure(
        "main", [], list(p1.params), locals_, p1.body, p1.ret
    )
    main = Call("main", (), tuple(TermVar(x) for x in p1.params))
    return Program2([], list(p1.params), [proc], main)
