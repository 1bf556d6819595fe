"""A small language for impacting hybrid systems.

Source text declares a dimension, parameters, a vector field ``X``, a
boundary function ``H`` and a reset direction ``W``::

    dim 2;
    param xi=0.1;
    X = [-(y-1)^3, x^3 - xi*(x^4 + (y-1)^4 - 1)];
    H = y;
    W = [k + k1*y, k2*y];
    param k=1, k1=0, k2=0

Statements are separated by ``;`` (the last one may omit it), ``#``
starts a comment, whitespace is insignificant.  State variables are
``x, y`` when ``dim 2`` and ``x1 .. xn`` otherwise.  ``^`` only takes an
integer literal exponent.  Known functions: sin, cos, exp, ln, sqrt.

Parsed expressions are immutable trees that evaluate over floats or over
:class:`~grazing_maps.jets.JetValue`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import EvalDomainError, ParseError
from .jets import FUNCTIONS, JetValue, ipow

# -- AST -----------------------------------------------------------------

_loc = dict(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    value: float
    loc: tuple | None = field(**_loc)


@dataclass(frozen=True)
class Var:
    index: int
    name: str
    loc: tuple | None = field(**_loc)


@dataclass(frozen=True)
class Param:
    name: str
    loc: tuple | None = field(**_loc)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    loc: tuple | None = field(**_loc)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    loc: tuple | None = field(**_loc)


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int
    loc: tuple | None = field(**_loc)


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"
    loc: tuple | None = field(**_loc)


Expr = Const | Var | Param | Neg | BinOp | Pow | Call


def variable_names(dim: int) -> tuple[str, ...]:
    if dim == 2:
        return ("x", "y")
    return tuple(f"x{i}" for i in range(1, dim + 1))


@dataclass(frozen=True)
class ExpressionSystem:
    """Parsed ``(X, H, W)`` triple plus default parameter values."""

    dim: int
    X: tuple
    H: Expr
    W: tuple
    params: tuple = ()

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be at least 2")
        if len(self.X) != self.dim or len(self.W) != self.dim:
            raise ValueError("X and W must have one expression per dimension")

    @property
    def parameters(self) -> dict:
        return dict(self.params)

    @property
    def variables(self) -> tuple[str, ...]:
        return variable_names(self.dim)

    @property
    def uses_division(self) -> bool:
        return any(_contains_division(e) for e in (*self.X, self.H, *self.W))

    def with_params(self, overrides: Mapping[str, float] | None = None, **kw) -> "ExpressionSystem":
        """Copy with some default parameter values replaced."""
        merged = dict(self.params)
        for name, value in {**(overrides or {}), **kw}.items():
            if name not in merged:
                raise KeyError(f"unknown parameter '{name}'")
            merged[name] = float(value)
        return ExpressionSystem(self.dim, self.X, self.H, self.W, tuple(merged.items()))

    def resolve_params(self, params: Mapping[str, float] | None) -> dict:
        if params is None:
            return dict(self.params)
        merged = dict(self.params)
        merged.update(params)
        return merged

    def to_source(self) -> str:
        return format_system(self)


def _contains_division(e) -> bool:
    match e:
        case BinOp(op="/"):
            return True
        case BinOp(left=l, right=r):
            return _contains_division(l) or _contains_division(r)
        case Neg(operand=a) | Call(arg=a) | Pow(base=a):
            return _contains_division(a)
    return False


# -- tokenizer ------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()\[\],;=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parser ---------------------------------------------------------------

_RESERVED = {"dim", "param", "X", "H", "W", *FUNCTIONS}


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0
        self.dim = None
        self.vars: dict[str, int] = {}
        self.params: dict[str, float] = {}
        self.param_uses: list[Param] = []

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def accept(self, text) -> Token | None:
        if self.tok.kind in ("op", "name") and self.tok.text == text:
            return self.advance()
        return None

    def expect(self, text) -> Token:
        t = self.accept(text)
        if t is None:
            found = self.tok.text or "end of input"
            raise self.error(f"expected '{text}', found '{found}'")
        return t

    # statements
    def parse_system(self) -> ExpressionSystem:
        sections: dict[str, object] = {}
        while self.tok.kind != "eof":
            if self.accept(";"):
                continue
            self.statement(sections)
            if self.tok.kind != "eof":
                self.expect(";")
        if self.dim is None:
            raise self.error("missing 'dim' declaration")
        for key in ("X", "H"):
            if key not in sections:
                raise self.error(f"missing '{key}' definition")
        for p in self.param_uses:
            if p.name not in self.params:
                raise ParseError(f"undeclared identifier '{p.name}'", *p.loc)
        W = sections.get("W") or tuple(Const(0.0) for _ in range(self.dim))
        return ExpressionSystem(self.dim, sections["X"], sections["H"], W, tuple(self.params.items()))

    def statement(self, sections):
        tok = self.tok
        if tok.kind != "name":
            raise self.error(f"expected a statement, found '{tok.text or 'end of input'}'")
        if tok.text == "dim":
            self.advance()
            if self.dim is not None:
                raise self.error("duplicate 'dim' declaration", tok)
            num = self.advance()
            if num.kind != "number" or not num.text.isdigit():
                raise self.error("'dim' needs a positive integer", num)
            self.dim = int(num.text)
            if self.dim < 2:
                raise self.error("dimension must be at least 2", num)
            self.vars = {name: i for i, name in enumerate(variable_names(self.dim))}
            return
        if self.dim is None:
            raise self.error("'dim' must be declared first")
        if tok.text == "param":
            self.advance()
            while True:
                self.param_assignment()
                if not self.accept(","):
                    break
            return
        if tok.text in ("X", "W", "H"):
            self.advance()
            if tok.text in sections:
                raise self.error(f"duplicate '{tok.text}' definition", tok)
            self.expect("=")
            if tok.text == "H":
                sections["H"] = self.expr()
            else:
                sections[tok.text] = self.vector(tok)
            return
        raise self.error(f"unknown statement '{tok.text}'")

    def param_assignment(self):
        name = self.advance()
        if name.kind != "name":
            raise self.error("expected a parameter name", name)
        if name.text in _RESERVED or name.text in self.vars:
            raise self.error(f"'{name.text}' is reserved", name)
        if name.text in self.params:
            raise self.error(f"parameter '{name.text}' declared twice", name)
        self.expect("=")
        sign = 1.0
        if self.accept("-"):
            sign = -1.0
        else:
            self.accept("+")
        num = self.advance()
        if num.kind != "number":
            raise self.error("expected a number", num)
        self.params[name.text] = sign * float(num.text)

    def vector(self, head: Token) -> tuple:
        self.expect("[")
        items = [self.expr()]
        while self.accept(","):
            items.append(self.expr())
        self.expect("]")
        if len(items) != self.dim:
            raise self.error(
                f"dimension mismatch: '{head.text}' has {len(items)} components, dim is {self.dim}", head
            )
        return tuple(items)

    # expressions
    def expr(self):
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance()
            left = BinOp(op.text, left, self.term(), loc=(op.line, op.col))
        return left

    def term(self):
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance()
            left = BinOp(op.text, left, self.unary(), loc=(op.line, op.col))
        return left

    def unary(self):
        if self.tok.kind == "op" and self.tok.text == "-":
            op = self.advance()
            return Neg(self.unary(), loc=(op.line, op.col))
        if self.tok.kind == "op" and self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            op = self.advance()
            exponent = self.int_exponent()
            if self.tok.kind == "op" and self.tok.text == "^":
                raise self.error("chained '^' needs parentheses")
            return Pow(base, exponent, loc=(op.line, op.col))
        return base

    def int_exponent(self) -> int:
        paren = self.accept("(")
        sign = -1 if self.accept("-") else 1
        num = self.advance()
        if num.kind != "number" or not num.text.isdigit():
            raise self.error("exponent must be an integer literal", num)
        if paren:
            self.expect(")")
        return sign * int(num.text)

    def atom(self):
        tok = self.advance()
        loc = (tok.line, tok.col)
        if tok.kind == "number":
            return Const(float(tok.text), loc=loc)
        if tok.kind == "name":
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg, loc=loc)
            if tok.text in self.vars:
                return Var(self.vars[tok.text], tok.text, loc=loc)
            if tok.text in _RESERVED:
                raise self.error(f"'{tok.text}' cannot be used in an expression", tok)
            p = Param(tok.text, loc=loc)
            self.param_uses.append(p)
            return p
        if tok.kind == "op" and tok.text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.error(f"expected an expression, found '{tok.text or 'end of input'}'", tok)


def parse_system(source: str) -> ExpressionSystem:
    """Parse system-definition text; raises :class:`ParseError` with line/column."""
    return _Parser(source).parse_system()


def parse_expr(text: str, dim: int = 2, params: Sequence[str] = ()) -> Expr:
    """Parse a lone expression (handy for tests and the CLI)."""
    p = _Parser(text)
    p.dim = dim
    p.vars = {name: i for i, name in enumerate(variable_names(dim))}
    p.params = {name: 0.0 for name in params}
    e = p.expr()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected '{p.tok.text}'")
    for use in p.param_uses:
        if use.name not in p.params:
            raise ParseError(f"undeclared identifier '{use.name}'", *use.loc)
    return e


# -- printing -------------------------------------------------------------


def format_expr(e) -> str:
    match e:
        case Const(value=v):
            return repr(float(v))
        case Var(name=n) | Param(name=n):
            return n
        case Neg(operand=a):
            return f"(-{format_expr(a)})"
        case BinOp(op=op, left=l, right=r):
            return f"({format_expr(l)} {op} {format_expr(r)})"
        case Pow(base=b, exponent=n):
            exp = str(n) if n >= 0 else f"({n})"
            base = format_expr(b)
            # BinOp and Neg already print inside parentheses
            if isinstance(b, (Const, Pow)):
                base = f"({base})"
            return f"{base}^{exp}"
        case Call(func=f, arg=a):
            return f"{f}({format_expr(a)})"
    raise TypeError(f"not an expression node: {e!r}")


def format_system(system: ExpressionSystem) -> str:
    lines = [f"dim {system.dim};"]
    if system.params:
        lines.append("param " + ", ".join(f"{k}={v!r}" for k, v in system.params) + ";")
    lines.append("X = [" + ", ".join(format_expr(e) for e in system.X) + "];")
    lines.append(f"H = {format_expr(system.H)};")
    lines.append("W = [" + ", ".join(format_expr(e) for e in system.W) + "];")
    return "\n".join(lines) + "\n"


# -- evaluation -----------------------------------------------------------


def _evaluate(e, values, params):
    match e:
        case Const(value=v):
            return v
        case Var(index=i):
            return values[i]
        case Param(name=n):
            try:
                return params[n]
            except KeyError:
                raise EvalDomainError(f"no value for parameter '{n}'", e.loc) from None
        case Neg(operand=a):
            return -_evaluate(a, values, params)
        case BinOp(op=op, left=l, right=r):
            a = _evaluate(l, values, params)
            b = _evaluate(r, values, params)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            try:
                return a / b
            except ZeroDivisionError:
                raise EvalDomainError("division by zero", e.loc, format_expr(e)) from None
        case Pow(base=b, exponent=n):
            a = _evaluate(b, values, params)
            try:
                return ipow(a, n)
            except ZeroDivisionError:
                raise EvalDomainError("zero raised to a negative power", e.loc, format_expr(e)) from None
        case Call(func=f, arg=a):
            arg = _evaluate(a, values, params)
            try:
                return FUNCTIONS[f](arg)
            except (ValueError, ZeroDivisionError, OverflowError) as exc:
                raise EvalDomainError(f"{f}: {exc}", e.loc, format_expr(e)) from None
    raise TypeError(f"not an expression node: {e!r}")


def eval_expr(expr, point: Sequence[float], params: Mapping[str, float] | None = None) -> float:
    """Evaluate ``expr`` at ``point`` in IEEE doubles."""
    return _evaluate(expr, [float(v) for v in point], params or {})


def eval_jet(expr, point_jets: Sequence[JetValue], params: Mapping[str, float] | None = None) -> JetValue:
    """Evaluate ``expr`` on jets of a common order.

    The result is always a jet; coefficient 0 equals :func:`eval_expr` at
    the order-0 point.
    """
    orders = {j.order for j in point_jets}
    if len(orders) != 1:
        raise ValueError("all input jets must share one truncation order")
    value = _evaluate(expr, list(point_jets), params or {})
    if not isinstance(value, JetValue):
        dtype = point_jets[0].coeffs.dtype
        value = JetValue.constant(value, orders.pop(), dtype)
    return value


def eval_vector(exprs, point, params=None):
    return [eval_expr(e, point, params) for e in exprs]
