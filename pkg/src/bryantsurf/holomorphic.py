"""Holomorphic expressions in ``z``: parsing, printing and exact 2-jets.

The grammar (see docs/grammar.md) covers rational functions, integer powers,
``exp`` and Moebius maps ``mobius(a, b, c, d, w) = (a w + b)/(c w + d)``.
Derivatives come from forward propagation of (value, first, second) jets, so
rational expressions are differentiated exactly up to roundoff.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import NamedTuple, Union

from .errors import ExpressionSyntaxError, JetOverflow, PoleAtPoint, UnsupportedFunction

POLE_EPS = 1e-12


# --------------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Neg:
    arg: "HoloExpr"


@dataclass(frozen=True)
class Add:
    left: "HoloExpr"
    right: "HoloExpr"


@dataclass(frozen=True)
class Sub:
    left: "HoloExpr"
    right: "HoloExpr"


@dataclass(frozen=True)
class Mul:
    left: "HoloExpr"
    right: "HoloExpr"


@dataclass(frozen=True)
class Div:
    left: "HoloExpr"
    right: "HoloExpr"


@dataclass(frozen=True)
class Pow:
    base: "HoloExpr"
    n: int


@dataclass(frozen=True)
class Exp:
    arg: "HoloExpr"


@dataclass(frozen=True)
class Mobius:
    a: complex
    b: complex
    c: complex
    d: complex
    arg: "HoloExpr"


HoloExpr = Union[Var, Const, Neg, Add, Sub, Mul, Div, Pow, Exp, Mobius]
Z = Var()


# ------------------------------------------------------------------------ tokens

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


class _Tok(NamedTuple):
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "num":
            end = m.end()
            # "3i" is an imaginary literal; "3iz" is 3 times the identifier "iz"
            if end < len(text) and text[end] == "i" and not (
                end + 1 < len(text) and (text[end + 1].isalnum() or text[end + 1] == "_")
            ):
                toks.append(_Tok("imag", m.group(), pos))
                pos = end + 1
                continue
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


# ------------------------------------------------------------------------ parser


def _fold(node):
    """Collapse operations whose operands are all constants."""
    if isinstance(node, Neg) and isinstance(node.arg, Const):
        return Const(-node.arg.value)
    if isinstance(node, (Add, Sub, Mul)) and isinstance(node.left, Const) and isinstance(node.right, Const):
        a, b = node.left.value, node.right.value
        return Const(a + b if isinstance(node, Add) else a - b if isinstance(node, Sub) else a * b)
    if isinstance(node, Pow) and isinstance(node.base, Const) and (node.n >= 0 or node.base.value != 0):
        return Const(node.base.value ** node.n)
    return node


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind not in ("op",):
            found = self.tok.text or "end of input"
            raise ExpressionSyntaxError(f"expected {text!r}, found {found!r}", self.tok.pos)
        return self.advance()

    def parse(self) -> HoloExpr:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            rhs = self.term()
            node = _fold(Add(node, rhs) if op == "+" else Sub(node, rhs))
        return node

    def _starts_operand(self) -> bool:
        t = self.tok
        return t.kind in ("num", "imag", "ident") or (t.kind == "op" and t.text == "(")

    def term(self):
        node = self.unary()
        while True:
            t = self.tok
            if t.kind == "op" and t.text in "*/":
                self.advance()
                rhs = self.unary()
                node = _fold(Mul(node, rhs)) if t.text == "*" else Div(node, rhs)
            elif self._starts_operand():
                # implicit multiplication: "2z", "3i z", "z(z+1)"; never two numbers in a row
                prev = self.toks[self.i - 1]
                if prev.kind in ("num", "imag") and t.kind in ("num", "imag"):
                    raise ExpressionSyntaxError(f"unexpected number {t.text!r}", t.pos)
                node = _fold(Mul(node, self.unary()))
            else:
                return node

    def unary(self):
        t = self.tok
        if t.kind == "op" and t.text == "-":
            self.advance()
            return _fold(Neg(self.unary()))
        if t.kind == "op" and t.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            n = self.exponent()
            return _fold(Pow(base, n))
        return base

    def exponent(self) -> int:
        paren = self.tok.kind == "op" and self.tok.text == "("
        if paren:
            self.advance()
        sign = 1
        while self.tok.kind == "op" and self.tok.text in "+-":
            if self.advance().text == "-":
                sign = -sign
        t = self.tok
        if t.kind != "num":
            found = t.text or "end of input"
            raise ExpressionSyntaxError(f"expected integer exponent, found {found!r}", t.pos)
        if not t.text.isdigit():
            raise ExpressionSyntaxError(f"exponent must be an integer, got {t.text!r}", t.pos)
        self.advance()
        if paren:
            self.expect(")")
        return sign * int(t.text)

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Const(complex(float(t.text), 0.0))
        if t.kind == "imag":
            self.advance()
            return Const(complex(0.0, float(t.text)))
        if t.kind == "ident":
            self.advance()
            if t.text == "z":
                return Z
            if t.text == "i":
                return Const(1j)
            if t.text == "exp":
                (arg,) = self.call_args(1, t)
                return Exp(arg)
            if t.text == "mobius":
                a, b, c, d, arg = self.call_args(5, t)
                coeffs = []
                for k, node in enumerate((a, b, c, d)):
                    if not isinstance(node, Const):
                        raise ExpressionSyntaxError(
                            f"mobius coefficient {'abcd'[k]} must be a constant", t.pos
                        )
                    coeffs.append(node.value)
                return Mobius(*coeffs, arg)
            raise UnsupportedFunction(f"unknown identifier {t.text!r} at offset {t.pos}")
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = t.text or "end of input"
        raise ExpressionSyntaxError(f"expected operand, found {found!r}", t.pos)

    def call_args(self, count: int, name: _Tok) -> list:
        self.expect("(")
        args = [self.expr()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        if len(args) != count:
            raise ExpressionSyntaxError(
                f"{name.text} takes {count} argument(s), got {len(args)}", name.pos
            )
        return args


def parse_holomorphic(text: str) -> HoloExpr:
    """Parse ``text`` into an expression tree.

    >>> parse_holomorphic("z^2")
    Pow(base=Var(), n=2)
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------- printing

_ADD, _MUL, _UNARY, _POW, _ATOM = 1, 2, 3, 4, 5


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x)) if x != 0 else "0"
    return repr(x)


def _fmt_const(c: complex) -> tuple[str, int]:
    re_, im = c.real, c.imag
    if im == 0:
        s = _fmt_real(re_)
        return s, (_UNARY if s.startswith("-") else _ATOM)
    if re_ == 0:
        s = _fmt_real(im) + "i"
        return s, (_UNARY if s.startswith("-") else _ATOM)
    sign = "-" if im < 0 else "+"
    return f"({_fmt_real(re_)}{sign}{_fmt_real(abs(im))}i)", _ATOM


def _pp(node) -> tuple[str, int]:
    if isinstance(node, Var):
        return "z", _ATOM
    if isinstance(node, Const):
        return _fmt_const(node.value)
    if isinstance(node, Neg):
        s, p = _pp(node.arg)
        return "-" + (s if p >= _UNARY else f"({s})"), _UNARY
    if isinstance(node, (Add, Sub, Mul, Div)):
        op, prec = {Add: ("+", _ADD), Sub: ("-", _ADD), Mul: ("*", _MUL), Div: ("/", _MUL)}[type(node)]
        ls, lp = _pp(node.left)
        rs, rp = _pp(node.right)
        if lp < prec:
            ls = f"({ls})"
        # unary operands are wrapped on the right of +/- to keep "a - -b" readable
        if rp <= prec or (prec == _ADD and rp == _UNARY):
            rs = f"({rs})"
        return f"{ls} {op} {rs}", prec
    if isinstance(node, Pow):
        s, p = _pp(node.base)
        if p < _ATOM:
            s = f"({s})"
        e = str(node.n) if node.n >= 0 else f"({node.n})"
        return f"{s}^{e}", _POW
    if isinstance(node, Exp):
        return f"exp({_pp(node.arg)[0]})", _ATOM
    if isinstance(node, Mobius):
        cs = ", ".join(_fmt_const(c)[0] for c in (node.a, node.b, node.c, node.d))
        return f"mobius({cs}, {_pp(node.arg)[0]})", _ATOM
    raise TypeError(f"not an expression node: {node!r}")


def pretty(expr: HoloExpr) -> str:
    return _pp(expr)[0]


# ------------------------------------------------------------------ composition


def substitute(expr: HoloExpr, inner: HoloExpr) -> HoloExpr:
    """Precompose: the expression ``w -> expr(inner(w))``."""
    if isinstance(expr, Var):
        return inner
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Neg):
        return Neg(substitute(expr.arg, inner))
    if isinstance(expr, (Add, Sub, Mul, Div)):
        return type(expr)(substitute(expr.left, inner), substitute(expr.right, inner))
    if isinstance(expr, Pow):
        return Pow(substitute(expr.base, inner), expr.n)
    if isinstance(expr, Exp):
        return Exp(substitute(expr.arg, inner))
    if isinstance(expr, Mobius):
        return Mobius(expr.a, expr.b, expr.c, expr.d, substitute(expr.arg, inner))
    raise TypeError(f"not an expression node: {expr!r}")


# ------------------------------------------------------------------------- jets


class ComplexJet2(NamedTuple):
    """Value, first and second complex derivative at a point."""

    f0: complex
    f1: complex
    f2: complex


def _check(j: ComplexJet2) -> ComplexJet2:
    if not all(cmath.isfinite(c) for c in j):
        raise JetOverflow(f"non-finite jet {j}")
    return j


def _jet_div(num: ComplexJet2, den: ComplexJet2, eps: float) -> ComplexJet2:
    if abs(den.f0) < eps * (1.0 + abs(num.f0)):
        raise PoleAtPoint(f"denominator {den.f0!r} vanishes")
    q0 = num.f0 / den.f0
    q1 = (num.f1 - q0 * den.f1) / den.f0
    q2 = (num.f2 - 2.0 * q1 * den.f1 - q0 * den.f2) / den.f0
    return ComplexJet2(q0, q1, q2)


def _jet_pow(b: ComplexJet2, n: int, eps: float) -> ComplexJet2:
    if n == 0:
        return ComplexJet2(1.0 + 0j, 0j, 0j)
    if n < 0:
        return _jet_div(ComplexJet2(1.0 + 0j, 0j, 0j), _jet_pow(b, -n, eps), eps)
    p0 = b.f0**n
    p1 = n * b.f0 ** (n - 1) * b.f1
    p2 = n * b.f0 ** (n - 1) * b.f2
    if n >= 2:
        p2 += n * (n - 1) * b.f0 ** (n - 2) * b.f1 * b.f1
    return ComplexJet2(p0, p1, p2)


def _eval(node, z: ComplexJet2, eps: float) -> ComplexJet2:
    if isinstance(node, Var):
        return z
    if isinstance(node, Const):
        return ComplexJet2(node.value, 0j, 0j)
    if isinstance(node, Neg):
        a = _eval(node.arg, z, eps)
        return ComplexJet2(-a.f0, -a.f1, -a.f2)
    if isinstance(node, (Add, Sub)):
        a, b = _eval(node.left, z, eps), _eval(node.right, z, eps)
        s = 1.0 if isinstance(node, Add) else -1.0
        return _check(ComplexJet2(a.f0 + s * b.f0, a.f1 + s * b.f1, a.f2 + s * b.f2))
    if isinstance(node, Mul):
        a, b = _eval(node.left, z, eps), _eval(node.right, z, eps)
        return _check(
            ComplexJet2(a.f0 * b.f0, a.f1 * b.f0 + a.f0 * b.f1, a.f2 * b.f0 + 2 * a.f1 * b.f1 + a.f0 * b.f2)
        )
    if isinstance(node, Div):
        return _check(_jet_div(_eval(node.left, z, eps), _eval(node.right, z, eps), eps))
    if isinstance(node, Pow):
        return _check(_jet_pow(_eval(node.base, z, eps), node.n, eps))
    if isinstance(node, Exp):
        a = _eval(node.arg, z, eps)
        try:
            e = cmath.exp(a.f0)
        except OverflowError as exc:
            raise JetOverflow(f"exp overflow at {a.f0!r}") from exc
        return _check(ComplexJet2(e, e * a.f1, e * (a.f2 + a.f1 * a.f1)))
    if isinstance(node, Mobius):
        w = _eval(node.arg, z, eps)
        num = ComplexJet2(node.a * w.f0 + node.b, node.a * w.f1, node.a * w.f2)
        den = ComplexJet2(node.c * w.f0 + node.d, node.c * w.f1, node.c * w.f2)
        return _check(_jet_div(num, den, eps))
    raise TypeError(f"not an expression node: {node!r}")


def eval_jet2(expr: HoloExpr, z: complex, eps: float = POLE_EPS) -> ComplexJet2:
    """(h(z), h'(z), h''(z)) by forward jet arithmetic."""
    z = complex(z)
    if not cmath.isfinite(z):
        raise JetOverflow(f"non-finite evaluation point {z!r}")
    return _eval(expr, ComplexJet2(z, 1.0 + 0j, 0j), eps)


def evaluate(expr: HoloExpr, z: complex, eps: float = POLE_EPS) -> complex:
    return eval_jet2(expr, z, eps).f0


def is_finite_tree(expr: HoloExpr) -> bool:
    if isinstance(expr, Const):
        return math.isfinite(expr.value.real) and math.isfinite(expr.value.imag)
    if isinstance(expr, Mobius):
        return all(cmath.isfinite(c) for c in (expr.a, expr.b, expr.c, expr.d)) and is_finite_tree(expr.arg)
    return all(is_finite_tree(getattr(expr, f)) for f in ("arg", "left", "right", "base") if hasattr(expr, f))
