"""Small expression language for Lagrangians and related scalar fields.

Grammar (whitespace-insensitive, no implicit multiplication):

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?            # right-associative, binds tightest
    atom    := NUMBER | SYMBOL | FUNC '(' expr ')' | '(' expr ')'

Symbols are q<i> / qd<i> (1-based, i <= n_coords), t, or declared parameter
names.  Functions: sin cos tan exp log sqrt sinh cosh abs.  Numbers are
double-precision decimals with optional exponent.

Evaluation is generic over the scalar kind: binding values may be plain
floats or the jet scalars from ``_kernels``, and the same AST evaluates
over either.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from . import _kernels
from .errors import (
    CoordinateRangeError,
    EvalDomainError,
    ExprSyntaxError,
    NonFiniteError,
    UnknownSymbolError,
)

FUNCTION_NAMES = frozenset(_kernels.FUNCTIONS)

Span = tuple[int, int]


@dataclass(frozen=True)
class Num:
    value: float
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class Sym:
    name: str
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "ExprAst"
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: "ExprAst"
    rhs: "ExprAst"
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "ExprAst"
    span: Span = field(compare=False, default=(0, 0))


ExprAst = Num | Sym | Unary | Binary | Call


@dataclass(frozen=True)
class Bindings:
    """Values for the symbols of an expression; scalar kind is generic."""

    q: Sequence
    qd: Sequence
    t: object = 0.0
    params: Mapping[str, object] = field(default_factory=dict)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_SYM_RE = re.compile(r"^(q|qd)([1-9]\d*)$")


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "name" | "op" | "end"
    text: str
    span: Span


def _tokenize(text: str) -> Iterator[_Token]:
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            # skip leading whitespace handled by the regex; anything left is junk
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = n - len(stripped)
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", (at, at + 1))
        pos = m.end()
        for kind in ("num", "name", "op"):
            tok = m.group(kind)
            if tok is not None:
                yield _Token(kind, tok, (m.start(kind), m.end(kind)))
                break
    yield _Token("end", "", (n, n))


class _Parser:
    """Recursive-descent with precedence climbing for the binary operators."""

    _PREC = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
    _UNARY_PREC = 30  # between mul/div and power

    def __init__(self, text: str, n_coords: int, param_names: frozenset[str]):
        self.text = text
        self.n_coords = n_coords
        self.param_names = param_names
        self.tokens = list(_tokenize(text))
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def expect_op(self, op: str):
        tok = self.advance()
        if tok.kind != "op" or tok.text != op:
            raise ExprSyntaxError(f"expected {op!r}, found {tok.text or 'end of input'!r}", tok.span)

    def parse(self) -> ExprAst:
        node = self.parse_expr(0)
        tok = self.peek()
        if tok.kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {tok.text!r}", tok.span)
        return node

    def parse_expr(self, min_prec: int) -> ExprAst:
        lhs = self.parse_unary()
        while True:
            tok = self.peek()
            if tok.kind != "op" or tok.text not in self._PREC:
                return lhs
            prec = self._PREC[tok.text]
            if prec < min_prec:
                return lhs
            self.advance()
            # '^' is right-associative: recurse at equal precedence
            next_min = prec if tok.text == "^" else prec + 1
            rhs = self.parse_expr(next_min)
            lhs = Binary(tok.text, lhs, rhs, (lhs.span[0], rhs.span[1]))

    def parse_unary(self) -> ExprAst:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            operand = self.parse_expr(self._UNARY_PREC)
            return Unary("-", operand, (tok.span[0], operand.span[1]))
        return self.parse_power()

    def parse_power(self) -> ExprAst:
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            exponent = self.parse_expr(self._PREC["^"])
            return Binary("^", base, exponent, (base.span[0], exponent.span[1]))
        return base

    def parse_atom(self) -> ExprAst:
        tok = self.advance()
        if tok.kind == "num":
            return Num(float(tok.text), tok.span)
        if tok.kind == "name":
            if self.peek().kind == "op" and self.peek().text == "(":
                if tok.text not in FUNCTION_NAMES:
                    raise UnknownSymbolError(f"unknown function {tok.text!r}", tok.span)
                self.advance()
                arg = self.parse_expr(0)
                close = self.advance()
                if close.kind != "op" or close.text != ")":
                    raise ExprSyntaxError("expected ')'", close.span)
                return Call(tok.text, arg, (tok.span[0], close.span[1]))
            self._check_symbol(tok)
            return Sym(tok.text, tok.span)
        if tok.kind == "op" and tok.text == "(":
            node = self.parse_expr(0)
            close = self.advance()
            if close.kind != "op" or close.text != ")":
                raise ExprSyntaxError("expected ')'", close.span)
            return node
        if tok.kind == "end":
            raise ExprSyntaxError("unexpected end of input", tok.span)
        raise ExprSyntaxError(f"unexpected token {tok.text!r}", tok.span)

    def _check_symbol(self, tok: _Token):
        name = tok.text
        if name == "t" or name in self.param_names:
            return
        m = _SYM_RE.match(name)
        if m:
            idx = int(m.group(2))
            if idx > self.n_coords:
                raise CoordinateRangeError(
                    f"coordinate index {idx} out of range (system has "
                    f"{self.n_coords} coordinate{'s' if self.n_coords != 1 else ''})",
                    tok.span,
                )
            return
        raise UnknownSymbolError(f"unknown symbol {name!r}", tok.span)


def parse(text: str, n_coords: int, param_names=()) -> ExprAst:
    """Parse ``text`` into an AST, validating every symbol against the
    coordinate count and the declared parameter names."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", (0, max(len(text), 1)))
    if n_coords < 1:
        raise ValueError("n_coords must be >= 1")
    names = frozenset(param_names)
    clash = {nm for nm in names if nm == "t" or _SYM_RE.match(nm)}
    if clash:
        raise ValueError(f"parameter names clash with coordinate symbols: {sorted(clash)}")
    return _Parser(text, n_coords, names).parse()


def _resolve(sym: Sym, b: Bindings):
    name = sym.name
    if name == "t":
        return b.t
    m = _SYM_RE.match(name)
    if m:
        idx = int(m.group(2)) - 1
        vec = b.q if m.group(1) == "q" else b.qd
        if idx >= len(vec):
            raise CoordinateRangeError(
                f"symbol {name!r} exceeds binding dimension {len(vec)}", sym.span
            )
        return vec[idx]
    try:
        return b.params[name]
    except KeyError:
        raise UnknownSymbolError(f"unbound symbol {name!r}", sym.span) from None


def evaluate(ast: ExprAst, b: Bindings):
    """Evaluate ``ast`` under ``b``.  Domain errors are re-raised with the
    span of the responsible subexpression; a non-finite plain-float result
    raises NonFiniteError."""
    result = _eval(ast, b)
    if not _kernels.is_dual(result):
        result = float(result)
        if not math.isfinite(result):
            raise NonFiniteError(f"expression evaluated to {result!r}")
    return result


def _eval(node: ExprAst, b: Bindings):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Sym):
        return _resolve(node, b)
    if isinstance(node, Unary):
        return -_eval(node.operand, b)
    if isinstance(node, Binary):
        lhs = _eval(node.lhs, b)
        rhs = _eval(node.rhs, b)
        try:
            if node.op == "+":
                return lhs + rhs
            if node.op == "-":
                return lhs - rhs
            if node.op == "*":
                return lhs * rhs
            if node.op == "/":
                return lhs / rhs
            return _power(lhs, rhs)
        except ZeroDivisionError:
            raise EvalDomainError("division by zero", node.span) from None
        except EvalDomainError as err:
            raise _with_span(err, node.span) from None
    if isinstance(node, Call):
        arg = _eval(node.arg, b)
        try:
            return _kernels.FUNCTIONS[node.fn](arg)
        except EvalDomainError as err:
            raise _with_span(err, node.span) from None
        except ValueError as err:  # math domain error from the float path
            raise EvalDomainError(str(err), node.span) from None
    raise TypeError(f"not an expression node: {node!r}")


def _power(lhs, rhs):
    if _kernels.is_dual(lhs) or _kernels.is_dual(rhs):
        return lhs ** rhs
    # float path, mirroring the jet domain rules
    if rhs == 0.0:
        return 1.0
    if not float(rhs).is_integer():
        if lhs < 0.0:
            raise EvalDomainError(
                f"fractional power {rhs!r} of negative base {lhs!r}"
            )
        if lhs == 0.0 and rhs < 0.0:
            raise EvalDomainError("zero raised to negative power")
    elif lhs == 0.0 and rhs < 0.0:
        raise EvalDomainError("zero raised to negative power")
    return lhs ** rhs


def _with_span(err: EvalDomainError, span: Span) -> EvalDomainError:
    if err.span is None:
        return EvalDomainError(str(err), span)
    return err


def free_symbols(ast: ExprAst) -> frozenset[str]:
    """All symbol names appearing in the tree."""
    out: set[str] = set()
    _collect(ast, out)
    return frozenset(out)


def _collect(node: ExprAst, out: set):
    if isinstance(node, Sym):
        out.add(node.name)
    elif isinstance(node, Unary):
        _collect(node.operand, out)
    elif isinstance(node, Binary):
        _collect(node.lhs, out)
        _collect(node.rhs, out)
    elif isinstance(node, Call):
        _collect(node.arg, out)


def to_string(ast: ExprAst) -> str:
    """Render the tree to a string that parses back to an equal tree
    (spans aside).  Parenthesizes conservatively."""
    if isinstance(ast, Num):
        return repr(ast.value)
    if isinstance(ast, Sym):
        return ast.name
    if isinstance(ast, Unary):
        return f"-({to_string(ast.operand)})"
    if isinstance(ast, Binary):
        return f"({to_string(ast.lhs)}) {ast.op} ({to_string(ast.rhs)})"
    if isinstance(ast, Call):
        return f"{ast.fn}({to_string(ast.arg)})"
    raise TypeError(f"not an expression node: {ast!r}")
