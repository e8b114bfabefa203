"""Analytic scalar expressions over chart coordinates.

Recursive-descent parser for the small expression grammar (see
``docs/grammar.ebnf``), an immutable AST, a precedence-aware printer whose
output reparses to the identical tree, and symbolic partial derivatives used
to build gauge-transformed tetrads.

Grammar summary::

    expr   = term { ("+" | "-") term }
    term   = unary { ("*" | "/") unary }
    unary  = "-" unary | power
    power  = atom [ "^" unary ]          exponent must be coordinate-free
    atom   = NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"

Identifiers are ASCII words; whitespace is insignificant. Known functions:
sin, cos, tan, exp, log, sqrt, sinh, cosh. The power exponent is folded to a
literal at parse time (numeric exponents only, by design: no general f^g).
"""

import math
from dataclasses import dataclass

from .chart import Chart
from .errors import ExpressionSyntaxError, UnknownIdentifierError

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh")


# --- AST ------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Coord:
    index: int
    name: str


@dataclass(frozen=True)
class Param:
    name: str
    value: float


@dataclass(frozen=True)
class Add:
    a: object
    b: object


@dataclass(frozen=True)
class Sub:
    a: object
    b: object


@dataclass(frozen=True)
class Mul:
    a: object
    b: object


@dataclass(frozen=True)
class Div:
    a: object
    b: object


@dataclass(frozen=True)
class Neg:
    a: object


@dataclass(frozen=True)
class Pow:
    base: object
    expo: float


@dataclass(frozen=True)
class Call:
    fn: str
    arg: object


class ScalarField:
    """A parsed expression bound to a chart and a parameter map.

    Immutable after construction; evaluation is side-effect free, so fields
    may be evaluated from several threads without coordination.
    """

    __slots__ = ("chart", "ast", "params", "source", "_tape")

    def __init__(self, chart, ast, params=None, source=None):
        self.chart = chart
        self.ast = ast
        self.params = dict(params or {})
        self.source = source if source is not None else to_source(ast)
        self._tape = None

    def __repr__(self):
        return f"ScalarField({to_source(self.ast)!r})"


# --- tokenizer ------------------------------------------------------------

_OPS = "+-*/^()"


class _Token:
    __slots__ = ("kind", "text", "pos", "value")

    def __init__(self, kind, text, pos, value=None):
        self.kind = kind          # 'num' | 'ident' | one of _OPS | 'eof'
        self.text = text
        self.pos = pos
        self.value = value


def _tokenize(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c in _OPS:
            toks.append(_Token(c, c, i))
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            toks.append(_Token("num", text[i:j], i, float(text[i:j])))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("ident", text[i:j], i))
            i = j
            continue
        raise ExpressionSyntaxError(f"unexpected character {c!r}", i)
    toks.append(_Token("eof", "", n))
    return toks


# --- parser ---------------------------------------------------------------

class _Parser:
    def __init__(self, text, chart, params, subexprs):
        self.toks = _tokenize(text)
        self.pos = 0
        self.chart = chart
        self.params = params
        self.subexprs = subexprs

    def peek(self):
        return self.toks[self.pos]

    def advance(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, what):
        tok = self.advance()
        if tok.kind != kind:
            got = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise ExpressionSyntaxError(f"expected {what}, found {got}", tok.pos)
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise ExpressionSyntaxError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind in "+-":
            op = self.advance().kind
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek().kind in "*/":
            op = self.advance().kind
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self):
        if self.peek().kind == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == "^":
            caret = self.advance()
            expo_node = self.unary()
            expo = _const_value(expo_node, caret.pos)
            return Pow(base, expo)
        return base

    def atom(self):
        tok = self.advance()
        if tok.kind == "num":
            return Num(tok.value)
        if tok.kind == "(":
            node = self.expr()
            self.expect(")", "')'")
            return node
        if tok.kind == "ident":
            if self.peek().kind == "(":
                if tok.text not in FUNCTIONS:
                    raise UnknownIdentifierError(tok.text, tok.pos)
                self.advance()
                arg = self.expr()
                self.expect(")", "')'")
                return Call(tok.text, arg)
            name = tok.text
            if name in self.chart.coord_names:
                return Coord(self.chart.index(name), name)
            if name in self.params:
                return Param(name, float(self.params[name]))
            if name in self.subexprs:
                return self.subexprs[name]
            raise UnknownIdentifierError(name, tok.pos)
        got = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ExpressionSyntaxError(f"expected an expression, found {got}", tok.pos)


def _const_value(node, at):
    """Fold a coordinate-free subtree to a float; exponents must be numeric."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Param):
        return node.value
    if isinstance(node, Neg):
        return -_const_value(node.a, at)
    if isinstance(node, Add):
        return _const_value(node.a, at) + _const_value(node.b, at)
    if isinstance(node, Sub):
        return _const_value(node.a, at) - _const_value(node.b, at)
    if isinstance(node, Mul):
        return _const_value(node.a, at) * _const_value(node.b, at)
    if isinstance(node, Div):
        return _const_value(node.a, at) / _const_value(node.b, at)
    if isinstance(node, Pow):
        return _const_value(node.base, at) ** node.expo
    if isinstance(node, Call):
        return getattr(math, node.fn)(_const_value(node.arg, at))
    raise ExpressionSyntaxError("power exponent must be a numeric constant", at)


def parse(text, chart=None, params=None, subexprs=None):
    """Parse expression text into a ScalarField on the given chart.

    ``params`` binds named real constants. ``subexprs`` optionally maps a name
    to an already-parsed AST spliced in place of that identifier (used by the
    tetrad loader for expression-valued parameters such as an FRW scale
    factor).
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    chart = chart if chart is not None else Chart()
    params = dict(params or {})
    ast = _Parser(text, chart, params, subexprs or {}).parse()
    return ScalarField(chart, ast, params, source=text)


# --- printer --------------------------------------------------------------

_LVL_ADD, _LVL_MUL, _LVL_UNARY, _LVL_POW, _LVL_ATOM = 1, 2, 3, 4, 5


def _num_repr(v):
    r = repr(float(v))
    return r[:-2] if r.endswith(".0") else r


def _level(node):
    if isinstance(node, (Add, Sub)):
        return _LVL_ADD
    if isinstance(node, (Mul, Div)):
        return _LVL_MUL
    if isinstance(node, Neg):
        return _LVL_UNARY
    if isinstance(node, Num) and node.value < 0:
        return _LVL_UNARY
    if isinstance(node, Pow):
        return _LVL_POW
    return _LVL_ATOM


def _wrap(node, minlvl):
    s = to_source(node)
    return f"({s})" if _level(node) < minlvl else s


def to_source(node):
    """Print an AST; the output reparses to an identical tree."""
    if isinstance(node, Num):
        return _num_repr(node.value)
    if isinstance(node, (Coord, Param)):
        return node.name
    if isinstance(node, Add):
        return f"{_wrap(node.a, _LVL_ADD)} + {_wrap(node.b, _LVL_ADD + 1)}"
    if isinstance(node, Sub):
        return f"{_wrap(node.a, _LVL_ADD)} - {_wrap(node.b, _LVL_ADD + 1)}"
    if isinstance(node, Mul):
        return f"{_wrap(node.a, _LVL_MUL)}*{_wrap(node.b, _LVL_MUL + 1)}"
    if isinstance(node, Div):
        return f"{_wrap(node.a, _LVL_MUL)}/{_wrap(node.b, _LVL_MUL + 1)}"
    if isinstance(node, Neg):
        return f"-{_wrap(node.a, _LVL_UNARY)}"
    if isinstance(node, Pow):
        expo = node.expo
        etxt = _num_repr(expo) if expo >= 0 else f"-{_num_repr(-expo)}"
        return f"{_wrap(node.base, _LVL_ATOM)}^{etxt}"
    if isinstance(node, Call):
        return f"{node.fn}({to_source(node.arg)})"
    raise TypeError(f"not an AST node: {node!r}")


# --- symbolic derivative --------------------------------------------------

def _is_zero(n):
    return isinstance(n, Num) and n.value == 0.0


def _is_one(n):
    return isinstance(n, Num) and n.value == 1.0


def _add(a, b):
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    return Add(a, b)


def _sub(a, b):
    if _is_zero(b):
        return a
    if _is_zero(a):
        return Neg(b)
    return Sub(a, b)


def _mul(a, b):
    if _is_zero(a) or _is_zero(b):
        return Num(0.0)
    if _is_one(a):
        return b
    if _is_one(b):
        return a
    return Mul(a, b)


def _div(a, b):
    if _is_zero(a):
        return Num(0.0)
    if _is_one(b):
        return a
    return Div(a, b)


_FN_DERIV = {
    "sin": lambda u: Call("cos", u),
    "cos": lambda u: Neg(Call("sin", u)),
    "tan": lambda u: Add(Num(1.0), Pow(Call("tan", u), 2.0)),
    "exp": lambda u: Call("exp", u),
    "log": lambda u: Div(Num(1.0), u),
    "sqrt": lambda u: Div(Num(0.5), Call("sqrt", u)),
    "sinh": lambda u: Call("cosh", u),
    "cosh": lambda u: Call("sinh", u),
}


def differentiate(node, coord_index):
    """Exact symbolic partial derivative of an AST along one coordinate."""
    if isinstance(node, (Num, Param)):
        return Num(0.0)
    if isinstance(node, Coord):
        return Num(1.0 if node.index == coord_index else 0.0)
    if isinstance(node, Add):
        return _add(differentiate(node.a, coord_index), differentiate(node.b, coord_index))
    if isinstance(node, Sub):
        return _sub(differentiate(node.a, coord_index), differentiate(node.b, coord_index))
    if isinstance(node, Neg):
        da = differentiate(node.a, coord_index)
        return Num(0.0) if _is_zero(da) else Neg(da)
    if isinstance(node, Mul):
        da = differentiate(node.a, coord_index)
        db = differentiate(node.b, coord_index)
        return _add(_mul(da, node.b), _mul(node.a, db))
    if isinstance(node, Div):
        da = differentiate(node.a, coord_index)
        db = differentiate(node.b, coord_index)
        if _is_zero(db):
            return _div(da, node.b)
        return _div(_sub(_mul(da, node.b), _mul(node.a, db)), Pow(node.b, 2.0))
    if isinstance(node, Pow):
        du = differentiate(node.base, coord_index)
        if node.expo == 0.0 or _is_zero(du):
            return Num(0.0)
        if node.expo == 1.0:
            return du
        factor = _mul(Num(node.expo), Pow(node.base, node.expo - 1.0))
        return _mul(factor, du)
    if isinstance(node, Call):
        du = differentiate(node.arg, coord_index)
        if _is_zero(du):
            return Num(0.0)
        return _mul(_FN_DERIV[node.fn](node.arg), du)
    raise TypeError(f"not an AST node: {node!r}")


def derivative_field(field, coord_index):
    """ScalarField holding the exact symbolic derivative of ``field``."""
    dast = differentiate(field.ast, coord_index)
    return ScalarField(field.chart, dast, field.params)


def const_field(chart, value):
    return ScalarField(chart, Num(float(value)), {})
