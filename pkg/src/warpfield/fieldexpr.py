"""Expression language for warping functions, metric entries and field components.

Grammar (whitespace-insensitive)::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := ("-" factor) | power
    power  := atom ("^" factor)?
    atom   := number | ident | ident "(" expr ")" | "(" expr ")"

so ``^`` is right-associative and binds tighter than unary minus.
Identifiers resolve, in order, to declared coordinates, named constants
(substituted as literals at parse time), or one of the built-in function
names.  Evaluation is generic over real or :class:`~warpfield.jets.Jet2`
scalars; an integral exponent is evaluated by repeated multiplication so
polynomial jets are exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .jets import FUNCTIONS, DomainError, Jet2

FUNCTION_NAMES = frozenset(FUNCTIONS) | {"pow"}

IDENT_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*")
NUMBER_RE = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier '{name}' (at offset {offset})")
        self.name = name
        self.offset = offset


class ArityError(ExprError):
    pass


class MissingBindingError(ExprError):
    pass


# ---- AST ----


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Call:
    fn: str
    arg: object


Expr = object  # Num | Var | Neg | Bin | Call


def variables_of(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Neg):
        return variables_of(e.arg)
    if isinstance(e, Bin):
        return variables_of(e.lhs) | variables_of(e.rhs)
    if isinstance(e, Call):
        return variables_of(e.arg)
    return frozenset()


# ---- tokenizer ----

_OPS = "+-*/^()"


def _tokenize(src: str):
    tokens = []  # (kind, text_or_value, offset)
    i = 0
    n = len(src)
    while i < n:
        c = src[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c in _OPS:
            tokens.append(("op", c, i))
            i += 1
            continue
        m = NUMBER_RE.match(src, i)
        if m:
            tokens.append(("num", float(m.group(0)), i))
            i = m.end()
            continue
        m = IDENT_RE.match(src, i)
        if m:
            tokens.append(("ident", m.group(0), i))
            i = m.end()
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i)
    return tokens


# ---- parser ----


class _Parser:
    def __init__(self, tokens, variables, constants):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables
        self.constants = constants

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return ("end", "", self.tokens[-1][2] + 1 if self.tokens else 0)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, text, off = self.peek()
        if kind == "op" and text == op:
            return self.take()
        raise ExprSyntaxError(f"expected {op!r}", off)

    def at_op(self, *ops) -> bool:
        kind, text, _ = self.peek()
        return kind == "op" and text in ops

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            _, op, _ = self.take()
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.at_op("*", "/"):
            _, op, _ = self.take()
            node = Bin(op, node, self.factor())
        return node

    def factor(self):
        if self.at_op("-"):
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self):
        node = self.atom()
        if self.at_op("^"):
            self.take()
            node = Bin("^", node, self.factor())
        return node

    def atom(self):
        kind, text, off = self.take()
        if kind == "num":
            return Num(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "ident":
            if self.at_op("("):
                if text == "pow":
                    raise ArityError(
                        "pow requires two arguments; the call syntax admits one "
                        "(write base^expo instead)"
                    )
                if text not in FUNCTION_NAMES:
                    raise UnknownIdentifierError(text, off)
                self.take()
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text in self.variables:
                return Var(text)
            if text in self.constants:
                return Num(float(self.constants[text]))
            raise UnknownIdentifierError(text, off)
        raise ExprSyntaxError(f"unexpected token {text!r}", off)


def parse_expr(src: str, variables, constants=None) -> Expr:
    """Parse ``src`` into an expression tree.

    ``variables`` is the set of coordinate names in scope; ``constants``
    are named real bindings substituted as literals before scope checks.
    """
    if not src or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    tokens = _tokenize(src)
    parser = _Parser(tokens, frozenset(variables), dict(constants or {}))
    node = parser.expr()
    kind, text, off = parser.peek()
    if kind != "end":
        raise ExprSyntaxError(f"trailing input {text!r}", off)
    return node


# ---- evaluation ----


def _power(base, expo):
    if isinstance(expo, Jet2):
        return base ** expo if isinstance(base, Jet2) else Jet2.constant(base, expo.n) ** expo
    e = float(expo)
    if isinstance(base, Jet2):
        return base ** e
    if e == int(e) and abs(e) <= 64:
        # repeated multiplication, matching the jet path bit for bit
        k = int(e)
        if k < 0:
            return 1.0 / _power(base, -k)
        result = 1.0
        b = base
        while k:
            if k & 1:
                result = result * b
            b = b * b
            k >>= 1
        return result
    if base <= 0.0:
        raise DomainError(f"non-integer power of non-positive base {base}")
    return base ** e


def eval_expr(e: Expr, env: dict):
    """Evaluate over an environment of real or Jet2 bindings."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise MissingBindingError(f"no binding for variable '{e.name}'") from None
    if isinstance(e, Neg):
        return -eval_expr(e.arg, env)
    if isinstance(e, Call):
        return FUNCTIONS[e.fn](eval_expr(e.arg, env))
    if isinstance(e, Bin):
        a = eval_expr(e.lhs, env)
        b = eval_expr(e.rhs, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if not isinstance(b, Jet2) and float(b) == 0.0:
                raise ZeroDivisionError("division by zero")
            return a / b
        return _power(a, b)
    raise TypeError(f"not an expression node: {e!r}")


# ---- printing ----

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _prec(e: Expr) -> int:
    if isinstance(e, Bin):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    return 5


def _fmt_num(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def pretty(e: Expr) -> str:
    """Canonical text form; a fixed point of ``pretty . parse_expr``."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        inner = pretty(e.arg)
        if _prec(e.arg) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Call):
        return f"{e.fn}({pretty(e.arg)})"
    if isinstance(e, Bin):
        p = _PREC[e.op]
        lhs = pretty(e.lhs)
        rhs = pretty(e.rhs)
        if e.op == "^":
            if _prec(e.lhs) < 5:
                lhs = f"({lhs})"
            if _prec(e.rhs) < 3:
                rhs = f"({rhs})"
            return f"{lhs}^{rhs}"
        if _prec(e.lhs) < p:
            lhs = f"({lhs})"
        strict = e.op in ("-", "/")
        if _prec(e.rhs) < p or (strict and _prec(e.rhs) == p):
            rhs = f"({rhs})"
        if p == 1:
            return f"{lhs} {e.op} {rhs}"
        return f"{lhs}{e.op}{rhs}"
    raise TypeError(f"not an expression node: {e!r}")


# small constructors used when fields are synthesized programmatically


def num(v: float) -> Expr:
    return Num(float(v))


def var(name: str) -> Expr:
    return Var(name)


def add(a: Expr, b: Expr) -> Expr:
    return Bin("+", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    return Bin("*", a, b)
