"""Map expressions F(x, y): tokenizer, recursive-descent parser, evaluator, fixtures.

Grammar (``;`` separates the n output components)::

    program := expr (';' expr)*
    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right associative
    atom    := NUMBER | IDENT | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

``^`` binds tighter than unary minus, so ``-y1^2`` is ``-(y1^2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    ArityMismatch,
    DimensionError,
    MapSyntaxError,
    NonFiniteValue,
    UnknownFixture,
    UnknownIdentifier,
)
from .geometry import Box, ParamSpace, clamp_to_box, make_graph_space, make_interval_space, make_sine_curve_space

FUNCTIONS = {
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "exp": (1, np.exp),
    "abs": (1, np.abs),
    "min": (2, np.minimum),
    "max": (2, np.maximum),
}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),;]))"
)
_VAR_RE = re.compile(r"([xy])([1-9]\d*)$")


# --- AST -----------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    kind: str  # "x" or "y"
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class MapExpr:
    outputs: tuple
    m: int
    n: int
    text: str = ""

    def __str__(self):
        return "; ".join(to_text(o) for o in self.outputs)


# --- parsing -------------------------------------------------------------

@dataclass
class _Tok:
    kind: str
    value: str
    pos: int


def tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN_RE.match(text, pos)
        if mt is None or mt.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise MapSyntaxError(f"unexpected character {text[start]!r}", start)
        kind = mt.lastgroup
        toks.append(_Tok(kind, mt.group(kind), mt.start(kind)))
        pos = mt.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, m, n):
        self.toks = tokenize(text)
        self.i = 0
        self.m = m
        self.n = n

    @property
    def cur(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.cur
        if tok.kind != "op" or tok.value != op:
            found = tok.value or "end of input"
            raise MapSyntaxError(f"expected {op!r}, found {found!r}", tok.pos)
        return self.take()

    def at_op(self, *ops):
        return self.cur.kind == "op" and self.cur.value in ops

    def program(self):
        outs = [self.expr()]
        while self.at_op(";"):
            self.take()
            outs.append(self.expr())
        if self.cur.kind != "end":
            raise MapSyntaxError(f"unexpected token {self.cur.value!r}", self.cur.pos)
        return outs

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.take().value
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.take().value
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.at_op("-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.at_op("^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.cur
        if tok.kind == "num":
            self.take()
            return Num(float(tok.value))
        if tok.kind == "name":
            self.take()
            if tok.value in FUNCTIONS:
                return self.call(tok)
            mv = _VAR_RE.match(tok.value)
            if mv is None:
                raise UnknownIdentifier(tok.value, tok.pos)
            kind, idx = mv.group(1), int(mv.group(2))
            if idx > (self.m if kind == "x" else self.n):
                raise UnknownIdentifier(tok.value, tok.pos)
            return Var(kind, idx)
        if self.at_op("("):
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        found = tok.value or "end of input"
        raise MapSyntaxError(f"unexpected {found!r}", tok.pos)

    def call(self, name_tok):
        arity, _ = FUNCTIONS[name_tok.value]
        self.expect("(")
        args = [self.expr()]
        while self.at_op(","):
            self.take()
            args.append(self.expr())
        self.expect(")")
        if len(args) != arity:
            raise MapSyntaxError(
                f"{name_tok.value} takes {arity} argument(s), got {len(args)}", name_tok.pos)
        return Call(name_tok.value, tuple(args))


def parse_map(text, m, n):
    """Parse ``text`` into a :class:`MapExpr` with m parameter and n state variables."""
    outs = _Parser(text, m, n).program()
    if len(outs) != n:
        raise ArityMismatch(f"expected {n} expression(s), got {len(outs)}")
    return MapExpr(tuple(outs), int(m), int(n), text)


def to_text(node):
    """Render an AST back to parseable text (conservatively parenthesised)."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"{node.kind}{node.index}"
    if isinstance(node, Neg):
        return f"-({to_text(node.operand)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    raise TypeError(f"not an AST node: {node!r}")


# --- evaluation ----------------------------------------------------------

def _checked(v, what):
    if not np.all(np.isfinite(v)):
        raise NonFiniteValue(f"non-finite value in {what}")
    return v


def _eval(node, xs, ys):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return xs[node.index - 1] if node.kind == "x" else ys[node.index - 1]
    if isinstance(node, Neg):
        return -_eval(node.operand, xs, ys)
    if isinstance(node, BinOp):
        a = _eval(node.left, xs, ys)
        b = _eval(node.right, xs, ys)
        with np.errstate(all="ignore"):
            if node.op == "+":
                r = np.add(a, b)
            elif node.op == "-":
                r = np.subtract(a, b)
            elif node.op == "*":
                r = np.multiply(a, b)
            elif node.op == "/":
                r = np.divide(a, b)
            else:
                r = np.power(np.asarray(a, dtype=float), b)
        return _checked(r, f"'{node.op}'")
    if isinstance(node, Call):
        fn = FUNCTIONS[node.name][1]
        args = [_eval(a, xs, ys) for a in node.args]
        with np.errstate(all="ignore"):
            r = fn(*args)
        return _checked(r, f"{node.name}()")
    raise TypeError(f"not an AST node: {node!r}")


def eval_raw(expr, x, y):
    """Evaluate the output expressions without clamping.

    ``x`` has shape (..., m) and ``y`` shape (..., n); leading axes broadcast.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1:] != (expr.m,) or y.shape[-1:] != (expr.n,):
        raise DimensionError(f"map expects x in R^{expr.m} and y in R^{expr.n}")
    xs = [x[..., i] for i in range(expr.m)]
    ys = [y[..., i] for i in range(expr.n)]
    shape = np.broadcast_shapes(x.shape[:-1], y.shape[:-1])
    cols = [np.broadcast_to(np.asarray(_eval(o, xs, ys), dtype=float), shape) for o in expr.outputs]
    return np.stack(cols, axis=-1)


def eval_map(expr, x, y, box):
    """F(x, y) clamped into ``box``; raises :class:`NonFiniteValue` on inf/nan."""
    if box.dim != expr.n:
        raise DimensionError("box dimension does not match map output count")
    return clamp_to_box(eval_raw(expr, x, y), box)


# --- problems and fixtures -----------------------------------------------

@dataclass(frozen=True, eq=False)
class ProblemDef:
    param_space: ParamSpace
    box: Box
    map: MapExpr
    name: str
    config: dict | None = None

    def __post_init__(self):
        if self.map.m != self.param_space.dim:
            raise DimensionError(
                f"map uses m={self.map.m} but parameter points are in R^{self.param_space.dim}")
        if self.map.n != self.box.dim:
            raise DimensionError(f"map has n={self.map.n} outputs but Y is in R^{self.box.dim}")

    def slice_map(self, node):
        """F_x for the parameter at ``node``, composed with the projection onto Y.

        Points outside Y are first clamped, so the map is defined on the whole
        enlarged body and has no fixed points outside Y.
        """
        x = self.param_space.points[node]
        expr, box = self.map, self.box

        def f(y):
            return eval_map(expr, x, clamp_to_box(y, box), box)

        f.vectorized = True
        return f


_ONE_POINT = ([[0.0]], [])

FIXTURES = {
    "diag": ("interval", 257, ([0.0], [1.0]), "x1"),
    "scurve": ("interval", 257, ([-2.0], [2.0]), "y1 + 0.25*(2*x1 - 1 - (y1^3 - y1))"),
    "island": ("interval", 257, ([-2.0], [2.0]),
               "y1 + 0.1*(-(y1+1.5)*((x1-0.5)^2 + (y1-0.5)^2 - 0.04))"),
    "sine-v": ("sine-v", (400, 41), ([-1.0], [1.0]), "0.5*y1 + 0.25*x2"),
    "rotation": ("graph", _ONE_POINT, ([-1.0, -1.0], [1.0, 1.0]), "-y2; y1"),
    "hyperbolic": ("graph", _ONE_POINT, ([-1.0, -1.0], [1.0, 1.0]), "2*y1; 0.5*y2"),
}


def fixture_names():
    return list(FIXTURES)


def builtin_fixture(name):
    if name not in FIXTURES:
        raise UnknownFixture(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    kind, arg, (lo, hi), text = FIXTURES[name]
    if kind == "interval":
        space = make_interval_space(arg)
    elif kind == "sine-v":
        space = make_sine_curve_space(*arg)
    else:
        space = make_graph_space(*arg)
    box = Box(lo, hi)
    return ProblemDef(space, box, parse_map(text, space.dim, box.dim), name)
