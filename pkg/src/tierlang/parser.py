"""Concrete syntax: tokenizer, recursive-descent parser, pretty printer.

Surface conventions (ASCII only):

* lowercase-initial identifiers are order-0 variables, operator names, and
  procedure names; uppercase-initial identifiers are order-1 (oracle)
  variables;
* ``uN`` is the unary numeral 1^N (``u0`` is the empty word ``eps``);
  quoted strings over {0,1,#} are word literals;
* ``a + b`` appends, ``a - u1`` decrements a unary numeral (any other
  right operand of ``-`` is rejected); other operators use function form,
  e.g. ``decb(y)``, ``cons(a, b)``, ``truncate(X(i), p)``;
* ``for x = e to d { s }`` is sugar for counting x down from d to e; the
  bound variable must not occur in the body.

First- versus second-order input is detected from the leading keyword
(``prog`` versus ``box``/``declare``/``call``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import opreg
from .syntax import (
    Assign,
    Break,
    Call,
    ClosureVar,
    Declass,
    For,
    If,
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
    assign_loop_ids,
    iter_exprs,
    iter_stmts,
    seq_chain,
    seq_of,
    stmt_exprs,
    stmt_vars,
)


class ParseError(Exception):
    def __init__(self, message, line=0, col=0, expected=()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        where = f" at {line}:{col}" if line else ""
        hint = f" (expected one of: {', '.join(sorted(self.expected))})" if expected else ""
        super().__init__(f"{message}{where}{hint}")


class DesugarError(Exception):
    pass


KEYWORDS = {
    "prog", "skip", "if", "else", "while", "break", "for", "to", "return",
    "declass", "box", "in", "declare", "call", "lambda", "var",
    "true", "false", "eps", "and", "or",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<string>"[01\#]*")
  | (?P<badstring>"[^"\n]*")
  | (?P<ulit>u[0-9]+\b)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<ovar>[A-Z][A-Za-z0-9_]*)
  | (?P<sym>:=|<=|>=|!=|[=<>+\-(){}\[\];,.|])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str  # ident | ovar | string | ulit | sym/keyword literal | eof
    value: str
    line: int
    col: int


def tokenize(text: str):
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = m.group(0)
        kind = m.lastgroup
        if kind == "badstring":
            raise ParseError("word literals may only contain 0, 1, #", line, col)
        if kind != "ws":
            if kind == "ident" and lexeme in KEYWORDS:
                tokens.append(Token(lexeme, lexeme, line, col))
            elif kind == "sym":
                tokens.append(Token(lexeme, lexeme, line, col))
            else:
                tokens.append(Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


_CMP_OPS = {"=": "eq", "<": "lt", "<=": "le", ">": "gt", "!=": "ne"}


class _Parser:
    def __init__(self, tokens, registry):
        self.tokens = tokens
        self.pos = 0
        self.registry = registry

    # -- token plumbing

    def peek(self, ahead=0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, kind) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"unexpected {tok.value!r}", tok.line, tok.col, expected={kind}
            )
        return self.next()

    def accept(self, kind) -> Token | None:
        if self.peek().kind == kind:
            return self.next()
        return None

    def fail(self, message, expected=()):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col, expected=expected)

    # -- programs

    def parse_program(self):
        first = self.peek().kind
        if first == "prog":
            return self.parse_program1()
        if first in ("box", "declare", "call") or (
            first == "ident" and self.peek(1).kind == "eof"
        ):
            return self.parse_program2()
        self.fail("expected a program", expected={"prog", "box", "declare", "call"})

    def parse_program1(self) -> Program1:
        self.expect("prog")
        self.expect("(")
        params = self.parse_idlist(closer=")")
        self.expect(")")
        self.expect("{")
        body = self.parse_stmts(stop={"return"})
        self.expect("return")
        ret = self.expect("ident").value
        self.expect("}")
        self.expect("eof")
        return Program1(params, body, ret)

    def parse_program2(self) -> Program2:
        boxed_oracles, boxed_words = [], []
        while self.accept("box"):
            self.expect("[")
            while True:
                tok = self.peek()
                if tok.kind == "ovar":
                    boxed_oracles.append([self.next().value, 0])
                elif tok.kind == "ident":
                    boxed_words.append(self.next().value)
                else:
                    self.fail("expected a boxed variable", expected={"ident", "ovar"})
                if not self.accept(","):
                    break
            self.expect("]")
            self.expect("in")
        procedures = []
        while self.accept("declare"):
            procedures.append(self.parse_procedure())
            self.expect("in")
        main = self.parse_term()
        self.expect("eof")
        program = Program2(boxed_oracles, boxed_words, procedures, main)
        _resolve_oracle_arities(program)
        return program

    def parse_procedure(self) -> Procedure:
        name = self.expect("ident").value
        self.expect("(")
        oracle_params, params = [], []
        if self.accept(","):  # explicit empty order-1 list: p(, x, y)
            params = self.parse_idlist(closer=")")
        elif self.peek().kind != ")":
            while True:
                tok = self.peek()
                if tok.kind == "ovar":
                    if params:
                        self.fail("order-1 parameters must precede order-0 ones")
                    oracle_params.append([self.next().value, 1])
                elif tok.kind == "ident":
                    params.append(self.next().value)
                else:
                    self.fail("expected a parameter", expected={"ident", "ovar"})
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect("{")
        local_vars = []
        while self.peek().kind == "var":
            self.next()
            local_vars.extend(self.parse_idlist(closer=";"))
            self.expect(";")
        body = self.parse_stmts(stop={"return"})
        self.expect("return")
        ret = self.expect("ident").value
        self.expect("}")
        return Procedure(name, oracle_params, params, local_vars, body, ret)

    def parse_term(self):
        if self.peek().kind == "ident":
            return TermVar(self.next().value)
        if self.accept("call"):
            name = self.expect("ident").value
            self.expect("(")
            closures, args = [], []
            if self.accept(","):
                pass  # explicit empty closure list
            if self.peek().kind != ")":
                while True:
                    tok = self.peek()
                    if tok.kind == "ovar":
                        if args:
                            self.fail("closures must precede order-0 arguments")
                        closures.append(ClosureVar(self.next().value))
                    elif tok.kind == "lambda":
                        if args:
                            self.fail("closures must precede order-0 arguments")
                        self.next()
                        self.expect("(")
                        lam_params = self.parse_idlist(closer=")")
                        self.expect(")")
                        self.expect(".")
                        closures.append(Lambda(lam_params, self.parse_term()))
                    else:
                        args.append(self.parse_term())
                    if not self.accept(","):
                        break
            self.expect(")")
            return Call(name, closures, args)
        self.fail("expected a term", expected={"ident", "call"})

    def parse_idlist(self, closer) -> list:
        names = []
        if self.peek().kind == closer:
            return names
        names.append(self.expect("ident").value)
        while self.accept(","):
            names.append(self.expect("ident").value)
        return names

    # -- statements

    def parse_stmts(self, stop):
        stmts = [self.parse_statement()]
        while self.accept(";"):
            if self.peek().kind in stop or self.peek().kind == "}":
                break  # tolerate a trailing semicolon
            stmts.append(self.parse_statement())
        node = stmts[-1]
        for s in reversed(stmts[:-1]):
            node = Seq(s, node)
        return node

    def parse_statement(self):
        tok = self.peek()
        if tok.kind == "skip":
            self.next()
            return Skip()
        if tok.kind == "if":
            self.next()
            self.expect("(")
            guard = self.parse_expr()
            self.expect(")")
            self.expect("{")
            then = self.parse_stmts(stop=set())
            self.expect("}")
            self.expect("else")
            self.expect("{")
            orelse = self.parse_stmts(stop=set())
            self.expect("}")
            return If(guard, then, orelse)
        if tok.kind == "while":
            self.next()
            self.expect("(")
            guard = self.parse_expr()
            self.expect(")")
            self.expect("{")
            body = self.parse_stmts(stop=set())
            self.expect("}")
            return While(guard, body, line=tok.line)
        if tok.kind == "for":
            self.next()
            var = self.expect("ident").value
            self.expect("=")
            low = self.parse_expr()
            self.expect("to")
            high = self.parse_expr()
            self.expect("{")
            body = self.parse_stmts(stop=set())
            self.expect("}")
            return For(var, low, high, body)
        if tok.kind == "break":
            self.next()
            self.expect("(")
            if self.peek().kind == "|":
                stmt = self.parse_oracle_break()
            else:
                stmt = Break(self.parse_expr())
            self.expect(")")
            return stmt
        if tok.kind == "ident" and self.peek(1).kind == ":=":
            name = self.next().value
            self.next()
            return Assign(name, self.parse_expr())
        self.fail(
            "expected a statement",
            expected={"skip", "if", "while", "for", "break", "ident"},
        )

    def parse_oracle_break(self) -> OracleBreak:
        self.expect("|")
        left = self.expect("ovar")
        self.expect("(")
        call_args = self.parse_exprlist()
        self.expect(")")
        self.expect("|")
        self.expect(">")
        self.expect("|")
        right = self.expect("ovar")
        if right.value != left.value:
            raise ParseError(
                "both sides of an oracle break must call the same oracle",
                right.line,
                right.col,
            )
        self.expect("(")
        ref_vars = self.parse_idlist(closer=")")
        self.expect(")")
        self.expect("|")
        return OracleBreak(left.value, call_args, ref_vars)

    # -- expressions

    def parse_exprlist(self) -> list:
        if self.peek().kind == ")":
            return []
        out = [self.parse_expr()]
        while self.accept(","):
            out.append(self.parse_expr())
        return out

    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        node = self.parse_and()
        while self.accept("or"):
            node = OpApp("or", [node, self.parse_and()])
        return node

    def parse_and(self):
        node = self.parse_cmp()
        while self.accept("and"):
            node = OpApp("and", [node, self.parse_cmp()])
        return node

    def parse_cmp(self):
        node = self.parse_add()
        while True:
            tok = self.peek()
            if tok.kind == ">=":
                raise ParseError(
                    "there is no >= operator; swap the operands and use <=",
                    tok.line,
                    tok.col,
                )
            if tok.kind in _CMP_OPS:
                self.next()
                node = OpApp(_CMP_OPS[tok.kind], [node, self.parse_add()])
            else:
                return node

    def parse_add(self):
        node = self.parse_primary()
        while True:
            if self.accept("+"):
                node = OpApp("append", [node, self.parse_primary()])
            elif self.peek().kind == "-":
                tok = self.next()
                rhs = self.parse_primary()
                if rhs != OpApp("const:1", []):
                    raise ParseError(
                        "only decrement by one is supported; write e - u1 "
                        "(or decb(e) for binary numerals)",
                        tok.line,
                        tok.col,
                    )
                node = OpApp("dec", [node])
            else:
                return node

    def parse_primary(self):
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            node = self.parse_expr()
            self.expect(")")
            return node
        if tok.kind == "declass":
            self.next()
            self.expect("(")
            first = self.parse_expr()
            if self.peek().kind == ")":
                raise ParseError(
                    "declass requires two arguments: declass(e, bound)",
                    tok.line,
                    tok.col,
                )
            self.expect(",")
            second = self.parse_expr()
            self.expect(")")
            return Declass(first, second)
        if tok.kind == "string":
            self.next()
            return self._literal(tok.value[1:-1])
        if tok.kind == "ulit":
            self.next()
            return self._literal("1" * int(tok.value[1:]))
        if tok.kind in ("true", "false", "eps"):
            self.next()
            return OpApp(tok.kind, [])
        if tok.kind == "ovar":
            self.next()
            self.expect("(")
            args = self.parse_exprlist()
            self.expect(")")
            return OracleCall(tok.value, args)
        if tok.kind == "ident":
            if self.peek(1).kind == "(":
                self.next()
                self.next()
                args = self.parse_exprlist()
                self.expect(")")
                entry = self._op_entry(tok)
                if entry.arity != len(args):
                    raise ParseError(
                        f"operator {tok.value} expects {entry.arity} "
                        f"argument(s), got {len(args)}",
                        tok.line,
                        tok.col,
                    )
                return OpApp(tok.value, args)
            self.next()
            return Var(tok.value)
        self.fail("expected an expression", expected={"ident", "string", "("})

    def _literal(self, text: str):
        if text == "":
            return OpApp("eps", [])
        return OpApp("const:" + text, [])

    def _op_entry(self, tok: Token):
        try:
            return self.registry.lookup(tok.value)
        except opreg.UnknownOperator:
            raise ParseError(f"unknown operator {tok.value!r}", tok.line, tok.col)


def _resolve_oracle_arities(program: Program2) -> None:
    """Infer order-1 arities from use sites (calls agree or parsing fails)."""

    def record(table, name, arity, line=0):
        if name in table and table[name] != arity:
            raise ParseError(
                f"inconsistent arity for oracle variable {name}", line, 0
            )
        table[name] = arity

    proc_index = {p.name: p for p in program.procedures}
    for proc in program.procedures:
        seen: dict = {}
        for st in iter_stmts(proc.body):
            for e in stmt_exprs(st):
                for sub in iter_exprs(e):
                    if isinstance(sub, OracleCall):
                        record(seen, sub.oracle, len(sub.args))
        proc.oracle_params = [
            [name, seen.get(name, 1)] for name, _ in proc.oracle_params
        ]

    boxed: dict = {}

    def walk_term(t):
        if isinstance(t, TermVar):
            return
        proc = proc_index.get(t.proc)
        for i, c in enumerate(t.closures):
            expected = None
            if proc is not None and i < len(proc.oracle_params):
                expected = proc.oracle_params[i][1]
            if isinstance(c, ClosureVar):
                if expected is not None:
                    record(boxed, c.name, expected)
            else:
                if expected is None:
                    expected = len(c.params)
                walk_term(c.body)
        for a in t.args:
            walk_term(a)

    walk_term(program.main)
    for entry in program.boxed_oracles:
        entry[1] = boxed.get(entry[0], 1)


def parse(text: str, origin: str = "<string>", registry=None, desugar: bool = True):
    """Parse source text into a Program1 or Program2.

    For loops are rewritten into their while form unless ``desugar`` is
    False; loop ids are then assigned in pre-order.
    """
    registry = registry or opreg.builtin_registry()
    tokens = tokenize(text)
    program = _Parser(tokens, registry).parse_program()
    if desugar:
        if isinstance(program, Program1):
            program.body = desugar_for(program.body)
        else:
            for proc in program.procedures:
                proc.body = desugar_for(proc.body)
    assign_loop_ids(program)
    return program


def parse_file(path: str, registry=None, desugar: bool = True):
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read(), origin=path, registry=registry, desugar=desugar)


# ---------------------------------------------------------------------------
# For-loop desugaring


def desugar_for(s):
    """Rewrite for x = e to d { body } into x := d; while(e <= x){ body; x := x - 1 }.

    The loop variable must not occur in the body; the produced While carries
    a for-origin mark so the decidable aperiodicity criterion can recognize
    it.  Sequence chains are rebuilt right-nested, so desugared code has the
    same shape its printed form reparses to.
    """
    if isinstance(s, Seq):
        parts = []
        for st in seq_chain(s):
            parts.extend(seq_chain(desugar_for(st)))
        return seq_of(parts)
    if isinstance(s, If):
        return If(s.guard, desugar_for(s.then), desugar_for(s.orelse))
    if isinstance(s, While):
        return While(s.guard, desugar_for(s.body), s.loop_id, s.for_origin, s.line)
    if isinstance(s, For):
        body = desugar_for(s.body)
        if s.var in stmt_vars(body):
            raise DesugarError(
                f"for-loop variable {s.var!r} must not occur in the loop body"
            )
        loop = While(
            OpApp("le", [s.low, Var(s.var)]),
            seq_of(seq_chain(body) + [Assign(s.var, OpApp("dec", [Var(s.var)]))]),
            for_origin=True,
        )
        return Seq(Assign(s.var, s.high), loop)
    return s


# ---------------------------------------------------------------------------
# Pretty printing

_BINOP_SURFACE = {
    "eq": "=", "lt": "<", "le": "<=", "gt": ">", "ne": "!=",
    "and": "and", "or": "or", "append": "+",
}
_PREC = {"or": 1, "and": 2, "eq": 3, "lt": 3, "le": 3, "gt": 3, "ne": 3, "append": 4}
_DEC_PREC = 4


def _pp_expr(e, parent_prec=0) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Declass):
        return f"declass({_pp_expr(e.expr)}, {_pp_expr(e.bound)})"
    if isinstance(e, OracleCall):
        return f"{e.oracle}({', '.join(_pp_expr(a) for a in e.args)})"
    if isinstance(e, OpApp):
        if e.op.startswith(opreg.CONST_PREFIX):
            return f'"{e.op[len(opreg.CONST_PREFIX):]}"'
        if e.op in ("true", "false", "eps"):
            return e.op
        if e.op == "dec":
            inner = f"{_pp_expr(e.args[0], _DEC_PREC)} - u1"
            return f"({inner})" if parent_prec > _DEC_PREC else inner
        if e.op in _BINOP_SURFACE and len(e.args) == 2:
            prec = _PREC[e.op]
            left = _pp_expr(e.args[0], prec)
            right = _pp_expr(e.args[1], prec + 1)
            text = f"{left} {_BINOP_SURFACE[e.op]} {right}"
            return f"({text})" if parent_prec > prec else text
        return f"{e.op}({', '.join(_pp_expr(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


def _pp_stmt(s, indent) -> list:
    pad = "  " * indent
    if isinstance(s, Seq):
        first = _pp_stmt(s.first, indent)
        first[-1] += ";"
        return first + _pp_stmt(s.second, indent)
    if isinstance(s, Skip):
        return [pad + "skip"]
    if isinstance(s, Assign):
        return [pad + f"{s.var} := {_pp_expr(s.expr)}"]
    if isinstance(s, If):
        lines = [pad + f"if({_pp_expr(s.guard)}){{"]
        lines += _pp_stmt(s.then, indent + 1)
        lines.append(pad + "} else {")
        lines += _pp_stmt(s.orelse, indent + 1)
        lines.append(pad + "}")
        return lines
    if isinstance(s, While):
        lines = [pad + f"while({_pp_expr(s.guard)}){{"]
        lines += _pp_stmt(s.body, indent + 1)
        lines.append(pad + "}")
        return lines
    if isinstance(s, For):
        lines = [pad + f"for {s.var} = {_pp_expr(s.low)} to {_pp_expr(s.high)} {{"]
        lines += _pp_stmt(s.body, indent + 1)
        lines.append(pad + "}")
        return lines
    if isinstance(s, Break):
        return [pad + f"break({_pp_expr(s.guard)})"]
    if isinstance(s, OracleBreak):
        call = f"{s.oracle}({', '.join(_pp_expr(a) for a in s.call_args)})"
        ref = f"{s.oracle}({', '.join(s.ref_vars)})"
        return [pad + f"break(|{call}| > |{ref}|)"]
    raise TypeError(f"not a statement: {s!r}")


def _pp_closure(c) -> str:
    if isinstance(c, ClosureVar):
        return c.name
    return f"lambda({', '.join(c.params)}). {_pp_term(c.body)}"


def _pp_term(t) -> str:
    if isinstance(t, TermVar):
        return t.name
    parts = [_pp_closure(c) for c in t.closures] + [_pp_term(a) for a in t.args]
    return f"call {t.proc}({', '.join(parts)})"


def pretty_print(program) -> str:
    """Canonical source text; parse(pretty_print(p)) is structurally p."""
    if isinstance(program, Program1):
        lines = [f"prog({', '.join(program.params)}){{"]
        lines += _pp_stmt(program.body, 1)
        lines[-1] += ""
        lines.append(f"  return {program.ret}")
        lines.append("}")
        return "\n".join(lines) + "\n"
    lines = []
    boxed = [n for n, _ in program.boxed_oracles] + list(program.boxed_words)
    if boxed:
        lines.append(f"box[{', '.join(boxed)}] in")
    for proc in program.procedures:
        params = [n for n, _ in proc.oracle_params] + list(proc.params)
        header = f"declare {proc.name}({', '.join(params)}){{"
        if not proc.oracle_params and proc.params:
            header = f"declare {proc.name}(, {', '.join(proc.params)}){{"
        lines.append(header)
        if proc.locals:
            lines.append(f"  var {', '.join(proc.locals)};")
        lines += _pp_stmt(proc.body, 1)
        lines.append(f"  return {proc.ret}")
        lines.append("} in")
    lines.append(_pp_term(program.main))
    return "\n".join(lines) + "\n"
