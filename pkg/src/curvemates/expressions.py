"""One-variable closed-form expressions: parsing, evaluation, symbolic derivative.

The grammar covers everything needed to write curvature/torsion laws on the
command line or in config files:

    expr   := term  (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | 'pi' | 's' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := sin | cos | tan | sqrt | abs | exp

'^' binds tighter than unary minus, so "-s^2" is -(s^2).  Function
application requires parentheses.  Whitespace is insignificant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

_FUNCTIONS = ("sin", "cos", "tan", "sqrt", "abs", "exp")


class ExpressionSyntaxError(ValueError):
    """Malformed expression text; ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class DomainError(ArithmeticError):
    """Evaluation left the real domain (sqrt of negative, division by zero, ...)."""

    def __init__(self, subterm: "Expr", s):
        first = np.ravel(np.asarray(s))[0] if np.ndim(s) else s
        super().__init__(f"domain error in '{to_text(subterm)}' near s={first!r}")
        self.subterm = subterm
        self.s = s


class DifferentiationError(ValueError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg' or a function name
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # '+', '-', '*', '/', '^'
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Pi, Var, Unary, Binary]


# ---------------------------------------------------------------------------
# parsing

def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            start = i
            while i < n and text[i].isdigit():
                i += 1
            if i < n and text[i] == ".":
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
            if i < n and text[i] in "eE":
                j = i + 1
                if j < n and text[j] in "+-":
                    j += 1
                if j < n and text[j].isdigit():
                    i = j
                    while i < n and text[i].isdigit():
                        i += 1
            tokens.append(("num", text[start:i], start))
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(("name", text[start:i], start))
            continue
        if c in "+-*/^()":
            tokens.append((c, c, i))
            i += 1
            continue
        raise ExpressionSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.advance()
        if tok[0] != kind:
            raise ExpressionSyntaxError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            raise ExpressionSyntaxError("empty expression", 0)
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExpressionSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            left = Binary(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            left = Binary(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.peek()[0] == "-":
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            return Binary("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.advance()
        kind, text, offset = tok
        if kind == "num":
            return Num(float(text))
        if kind == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            if text == "pi":
                return Pi()
            if text == "s":
                return Var()
            if text in _FUNCTIONS:
                nxt = self.peek()
                if nxt[0] != "(":
                    raise ExpressionSyntaxError(
                        f"function {text!r} requires parentheses", nxt[2])
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Unary(text, arg)
            raise ExpressionSyntaxError(f"unknown identifier {text!r}", offset)
        raise ExpressionSyntaxError(f"unexpected {text!r}", offset)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# evaluation

def _check_finite(value, node: Expr, s):
    if not np.all(np.isfinite(value)):
        raise DomainError(node, _first_bad(value, s))
    return value


def _first_bad(value, s):
    if np.ndim(value) == 0:
        return s
    bad = ~np.isfinite(np.asarray(value))
    return np.asarray(s)[bad][0] if np.ndim(s) else s


def evaluate(e: Expr, s):
    """Evaluate at a scalar or ndarray ``s``.  IEEE doubles throughout; any
    excursion out of the real domain raises DomainError instead of producing
    NaN or inf."""
    arraylike = np.ndim(s) > 0
    s = np.asarray(s, dtype=float) if arraylike else float(s)
    with np.errstate(all="ignore"):
        value = _eval(e, s)
    if arraylike and np.ndim(value) == 0:
        value = np.full(s.shape, float(value))
    return value


def _eval(e: Expr, s):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Pi):
        return np.pi
    if isinstance(e, Var):
        return s
    if isinstance(e, Unary):
        v = _eval(e.arg, s)
        if e.op == "neg":
            return -v
        if e.op == "sqrt":
            if np.any(np.asarray(v) < 0):
                raise DomainError(e, _where(v, lambda x: x < 0, s))
            return np.sqrt(v)
        if e.op == "abs":
            return np.abs(v)
        fn = {"sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp}[e.op]
        return _check_finite(fn(v), e, s)
    if isinstance(e, Binary):
        a = _eval(e.left, s)
        b = _eval(e.right, s)
        if e.op == "+":
            return _check_finite(a + b, e, s)
        if e.op == "-":
            return _check_finite(a - b, e, s)
        if e.op == "*":
            return _check_finite(a * b, e, s)
        if e.op == "/":
            if np.any(np.asarray(b) == 0):
                raise DomainError(e, _where(b, lambda x: x == 0, s))
            return _check_finite(a / b, e, s)
        if e.op == "^":
            return _power(e, a, b, s)
    raise TypeError(f"not an expression node: {e!r}")


def _where(v, pred, s):
    if np.ndim(v) == 0 or np.ndim(s) == 0:
        return s
    mask = pred(np.asarray(v))
    return np.asarray(s)[mask][0]


def _power(node: Binary, base, expo, s):
    # Integer exponents work for any base; fractional ones need base > 0.
    ev = np.asarray(expo)
    if np.all(ev == np.floor(ev)):
        return _check_finite(np.power(base, ev), node, s)
    if np.any(np.asarray(base) <= 0):
        raise DomainError(node, _where(base, lambda x: x <= 0, s))
    return _check_finite(np.power(base, expo), node, s)


# ---------------------------------------------------------------------------
# symbolic derivative

def is_constant(e: Expr) -> bool:
    if isinstance(e, (Num, Pi)):
        return True
    if isinstance(e, Var):
        return False
    if isinstance(e, Unary):
        return is_constant(e.arg)
    return is_constant(e.left) and is_constant(e.right)


def differentiate(e: Expr) -> Expr:
    """Exact symbolic derivative, closed under the grammar.

    abs is differentiated as (u/abs(u))*u', undefined exactly at zeros of u
    (evaluation there raises DomainError).  Powers require a constant
    exponent; the grammar has no logarithm so u^v with v depending on s has
    no in-grammar derivative.
    """
    return simplify(_diff(e))


def _diff(e: Expr) -> Expr:
    if isinstance(e, (Num, Pi)):
        return Num(0.0)
    if isinstance(e, Var):
        return Num(1.0)
    if isinstance(e, Unary):
        du = _diff(e.arg)
        u = e.arg
        if e.op == "neg":
            return Unary("neg", du)
        if e.op == "sin":
            return Binary("*", Unary("cos", u), du)
        if e.op == "cos":
            return Binary("*", Unary("neg", Unary("sin", u)), du)
        if e.op == "tan":
            sq = Binary("^", Unary("tan", u), Num(2.0))
            return Binary("*", Binary("+", Num(1.0), sq), du)
        if e.op == "sqrt":
            return Binary("/", du, Binary("*", Num(2.0), Unary("sqrt", u)))
        if e.op == "exp":
            return Binary("*", Unary("exp", u), du)
        if e.op == "abs":
            sign = Binary("/", u, Unary("abs", u))
            return Binary("*", sign, du)
    if isinstance(e, Binary):
        u, v = e.left, e.right
        du, dv = None, None
        if e.op in ("+", "-"):
            return Binary(e.op, _diff(u), _diff(v))
        if e.op == "*":
            return Binary("+", Binary("*", _diff(u), v), Binary("*", u, _diff(v)))
        if e.op == "/":
            num = Binary("-", Binary("*", _diff(u), v), Binary("*", u, _diff(v)))
            return Binary("/", num, Binary("^", v, Num(2.0)))
        if e.op == "^":
            if not is_constant(v):
                raise DifferentiationError(
                    "exponent depends on s; derivative leaves the grammar")
            c = evaluate(v, 0.0)
            return Binary("*",
                          Binary("*", Num(float(c)), Binary("^", u, Num(float(c) - 1.0))),
                          _diff(u))
    raise TypeError(f"not an expression node: {e!r}")


def simplify(e: Expr) -> Expr:
    """Constant folding and zero/one elimination only."""
    if isinstance(e, (Num, Pi, Var)):
        return e
    if isinstance(e, Unary):
        arg = simplify(e.arg)
        if e.op == "neg":
            if isinstance(arg, Num):
                return Num(-arg.value)
            if isinstance(arg, Unary) and arg.op == "neg":
                return arg.arg
        elif isinstance(arg, Num):
            try:
                return Num(float(evaluate(Unary(e.op, arg), 0.0)))
            except DomainError:
                pass
        return Unary(e.op, arg)
    a = simplify(e.left)
    b = simplify(e.right)
    if isinstance(a, Num) and isinstance(b, Num):
        try:
            return Num(float(evaluate(Binary(e.op, a, b), 0.0)))
        except DomainError:
            pass
    if e.op == "+":
        if _is_zero(a):
            return b
        if _is_zero(b):
            return a
    elif e.op == "-":
        if _is_zero(b):
            return a
        if _is_zero(a):
            return simplify(Unary("neg", b))
    elif e.op == "*":
        if _is_zero(a) or _is_zero(b):
            return Num(0.0)
        if _is_one(a):
            return b
        if _is_one(b):
            return a
    elif e.op == "/":
        if _is_zero(a) and not _is_zero(b):
            return Num(0.0)
        if _is_one(b):
            return a
    elif e.op == "^":
        if _is_one(b):
            return a
        if _is_zero(b):
            return Num(1.0)
    return Binary(e.op, a, b)


def _is_zero(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 0.0


def _is_one(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 1.0


# ---------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def to_text(e: Expr) -> str:
    """Render to text that reparses to an evaluation-equivalent tree."""
    return _fmt(e, 0)


def _fmt(e: Expr, parent_prec: int) -> str:
    if isinstance(e, Num):
        if e.value >= 0:
            text = repr(e.value)
            return text
        return _wrap(repr(e.value), 3, parent_prec)
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Var):
        return "s"
    if isinstance(e, Unary):
        if e.op == "neg":
            return _wrap("-" + _fmt(e.arg, _PREC["neg"]), _PREC["neg"], parent_prec)
        return f"{e.op}({_fmt(e.arg, 0)})"
    prec = _PREC[e.op]
    if e.op == "^":
        # right-associative; left operand needs parens at equal precedence
        text = f"{_fmt(e.left, prec + 1)}^{_fmt(e.right, prec)}"
    elif e.op in ("-", "/"):
        text = f"{_fmt(e.left, prec)}{e.op}{_fmt(e.right, prec + 1)}"
    else:
        text = f"{_fmt(e.left, prec)}{e.op}{_fmt(e.right, prec)}"
    return _wrap(text, prec, parent_prec)


def _wrap(text: str, prec: int, parent_prec: int) -> str:
    return f"({text})" if prec < parent_prec else text


def ensure_expr(e) -> Expr:
    """Accept an Expr or expression text."""
    if isinstance(e, str):
        return parse(e)
    if isinstance(e, (Num, Pi, Var, Unary, Binary)):
        return e
    if isinstance(e, (int, float)):
        return Num(float(e))
    raise TypeError(f"cannot interpret {e!r} as an expression")
