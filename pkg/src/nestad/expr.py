"""Arithmetic expressions with a derivative operator.

Grammar (EBNF; whitespace is insignificant between tokens)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;                  (* right-associative *)
    atom    = number
            | ident
            | "(" expr ")"
            | func "(" expr ")"
            | "pow" "(" expr "," expr ")"
            | "D" "(" expr "," ident ")"
            | "D_at" "(" expr "," ident "," expr ")" ;
    func    = "exp" | "log" | "sin" | "cos" | "tan" | "sqrt" ;
    number  = digits [ "." [ digits ] ] [ exponent ]
            | "." digits [ exponent ] ;
    exponent = ("e" | "E") [ "+" | "-" ] digits ;
    ident   = letter { letter | digit } ;           (* letter includes "_" *)

``D(body, v)`` is the derivative of ``body`` with respect to ``v`` at the
current value of ``v``.  ``D_at(body, t, p)`` is the derivative of ``body``
with respect to ``t`` evaluated at ``t = p``; ``p`` is computed in the
enclosing scope.  Function names, ``pow``, ``D`` and ``D_at`` are reserved and
cannot be used as variables.

Each derivative node runs its body one nesting level deeper (see
:mod:`nestad.nesting`), so derivatives of expressions that themselves contain
derivatives come out right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

from . import scalar as sc
from .nesting import inner_lift, pop_derivative, push, second_derivative

__all__ = [
    "Expr",
    "Number",
    "Var",
    "Unary",
    "Binary",
    "Pow",
    "Deriv",
    "ExprError",
    "ParseError",
    "EvaluationError",
    "UnboundVariableError",
    "NestingDepthError",
    "FUNCTIONS",
    "RESERVED",
    "MAX_NESTING",
    "parse",
    "format",
    "nesting_level",
    "eval_scalar",
    "evaluate",
    "evaluate_gradient",
    "evaluate_second",
]

FUNCTIONS: dict[str, Callable[[sc.Scalar], sc.Scalar]] = {
    "exp": sc.exp,
    "log": sc.log,
    "sin": sc.sin,
    "cos": sc.cos,
    "tan": sc.tan,
    "sqrt": sc.sqrt,
}
UNARY_OPS = {**FUNCTIONS, "neg": sc.neg}
BINARY_OPS: dict[str, Callable[[sc.Scalar, sc.Scalar], sc.Scalar]] = {
    "+": sc.add,
    "-": sc.sub,
    "*": sc.mul,
    "/": sc.div,
}
RESERVED = frozenset(FUNCTIONS) | {"pow", "D", "D_at"}

# Lexical nesting of D / D_at nodes accepted by the evaluator.
MAX_NESTING = 3


# AST -------------------------------------------------------------------------


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    fn: str  # a FUNCTIONS key, or "neg"
    child: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"


@dataclass(frozen=True)
class Deriv:
    """``D(body, var)``, or ``D_at(body, var, point)`` when ``point`` is set."""

    body: "Expr"
    var: str
    point: Optional["Expr"] = None


Expr = Union[Number, Var, Unary, Binary, Pow, Deriv]


# Errors ----------------------------------------------------------------------


class ExprError(Exception):
    pass


class ParseError(ExprError):
    """Syntax error at a byte offset into the source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"syntax error at offset {offset}: {message}")
        self.message = message
        self.offset = offset


class EvaluationError(ExprError):
    pass


class UnboundVariableError(EvaluationError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable '{name}'")
        self.name = name


class NestingDepthError(EvaluationError):
    pass


# Parsing ---------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str  # "number", "ident", "op", "end"
    text: str
    pos: int  # character index


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(source):
        m = _TOKEN.match(source, i)
        if m is None:
            raise ParseError(f"unexpected character {source[i]!r}", _byte_offset(source, i))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), i))
        i = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


def _byte_offset(source: str, i: int) -> int:
    return len(source[:i].encode("utf-8"))


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Optional[_Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, _byte_offset(self.source, tok.pos))

    def advance(self) -> _Token:
        t = self.tok
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def expect(self, text: str) -> None:
        if not self.at(text):
            found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            raise self.error(f"expected {text!r}, found {found}")
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            left = Binary(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            left = Binary(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.at("-"):
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at("^"):
            self.advance()
            return Pow(base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return Number(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if tok.text not in RESERVED:
                if self.at("("):
                    raise self.error(f"unknown function {tok.text!r}", tok)
                return Var(tok.text)
            if not self.at("("):
                raise self.error(f"expected '(' after {tok.text!r}")
            self.advance()
            node = self.call(tok.text)
            self.expect(")")
            return node
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "end":
            raise self.error("expected an expression, found end of input")
        raise self.error(f"expected an expression, found {tok.text!r}")

    def call(self, name: str) -> Expr:
        if name in FUNCTIONS:
            return Unary(name, self.expr())
        if name == "pow":
            base = self.expr()
            self.expect(",")
            return Pow(base, self.expr())
        body = self.expr()
        self.expect(",")
        var = self.tok
        if var.kind != "ident" or var.text in RESERVED:
            raise self.error(f"{name} expects a variable name")
        self.advance()
        point = None
        if name == "D_at":
            self.expect(",")
            point = self.expr()
        return Deriv(body, var.text, point)


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree; raises :class:`ParseError`."""
    return _Parser(source).parse()


# Formatting ------------------------------------------------------------------


def _format_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def format(e: Expr) -> str:  # noqa: A001
    """Fully parenthesized rendering; ``parse(format(e)) == e``."""
    if isinstance(e, Number):
        return _format_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        if e.fn == "neg":
            return f"(-{format(e.child)})"
        return f"{e.fn}({format(e.child)})"
    if isinstance(e, Binary):
        return f"({format(e.left)} {e.op} {format(e.right)})"
    if isinstance(e, Pow):
        return f"({format(e.base)} ^ {format(e.exponent)})"
    if isinstance(e, Deriv):
        if e.point is None:
            return f"D({format(e.body)}, {e.var})"
        return f"D_at({format(e.body)}, {e.var}, {format(e.point)})"
    raise TypeError(f"not an expression: {e!r}")


# Evaluation ------------------------------------------------------------------


def nesting_level(e: Expr) -> int:
    """Deepest lexical nesting of derivative nodes (a ``D_at`` point does not count)."""
    if isinstance(e, (Number, Var)):
        return 0
    if isinstance(e, Unary):
        return nesting_level(e.child)
    if isinstance(e, Binary):
        return max(nesting_level(e.left), nesting_level(e.right))
    if isinstance(e, Pow):
        return max(nesting_level(e.base), nesting_level(e.exponent))
    if isinstance(e, Deriv):
        inner = 1 + nesting_level(e.body)
        if e.point is not None:
            return max(inner, nesting_level(e.point))
        return inner
    raise TypeError(f"not an expression: {e!r}")


def _check_nesting(e: Expr) -> None:
    n = nesting_level(e)
    if n > MAX_NESTING:
        raise NestingDepthError(
            f"derivative operators nested {n} deep; at most {MAX_NESTING} supported"
        )


def _at_depth(s: sc.Scalar, d: int) -> sc.Scalar:
    if isinstance(s, sc.Dual):
        return s
    return sc.lift(s, d)


def eval_scalar(e: Expr, env: Mapping[str, sc.Scalar], level: int = 0) -> sc.Scalar:
    """Evaluate over differential scalars.

    Every value in ``env`` must have depth ``level``; the result has that
    depth too.  Works at any depth, which is what lets the first-order,
    gradient and second-order drivers share this one evaluator.
    """
    return _at_depth(_eval(e, env, level), level)


def _eval(e: Expr, env: Mapping[str, sc.Scalar], level: int) -> sc.Scalar:
    if isinstance(e, Number):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundVariableError(e.name) from None
    if isinstance(e, Unary):
        return UNARY_OPS[e.fn](_eval(e.child, env, level))
    if isinstance(e, Binary):
        return BINARY_OPS[e.op](_eval(e.left, env, level), _eval(e.right, env, level))
    if isinstance(e, Pow):
        return sc.power(_eval(e.base, env, level), _eval(e.exponent, env, level))
    if isinstance(e, Deriv):
        if e.point is None:
            if e.var not in env:
                raise UnboundVariableError(e.var)
            at = env[e.var]
        else:
            at = _eval(e.point, env, level)
        inner = {k: inner_lift(v) for k, v in env.items() if k != e.var}
        inner[e.var] = push(_at_depth(at, level))
        return pop_derivative(eval_scalar(e.body, inner, level + 1))
    raise TypeError(f"not an expression: {e!r}")


def _as_expr(e: Union[Expr, str]) -> Expr:
    return parse(e) if isinstance(e, str) else e


def _closure(
    e: Expr, bindings: Mapping[str, float], names: Sequence[str]
) -> Callable[..., sc.Scalar]:
    """``e`` as a function of the variables ``names``, others held at their bindings."""
    for name in names:
        if name not in bindings:
            raise UnboundVariableError(name)

    def f(*args: sc.Scalar) -> sc.Scalar:
        level = sc.depth(args[0])
        env = {k: sc.lift(v, level) for k, v in bindings.items()}
        env.update(zip(names, args))
        return eval_scalar(e, env, level)

    return f


def evaluate(
    e: Union[Expr, str], bindings: Mapping[str, float], wrt: Optional[str] = None
) -> tuple[float, Optional[float]]:
    """Value of ``e`` at ``bindings`` and, if ``wrt`` is given, its derivative."""
    e = _as_expr(e)
    _check_nesting(e)
    if wrt is None:
        env = {k: float(v) for k, v in bindings.items()}
        return float(eval_scalar(e, env, 0)), None  # type: ignore[arg-type]
    return sc.differentiate(_closure(e, bindings, [wrt]), bindings[wrt])


def evaluate_gradient(
    e: Union[Expr, str], bindings: Mapping[str, float], names: Sequence[str]
) -> tuple[float, dict[str, float]]:
    """Value and partial derivatives with respect to each of ``names``."""
    e = _as_expr(e)
    _check_nesting(e)
    f = _closure(e, bindings, list(names))
    value, partials = sc.gradient(f, [bindings[n] for n in names])
    return value, dict(zip(names, partials))


def evaluate_second(
    e: Union[Expr, str], bindings: Mapping[str, float], wrt: str
) -> tuple[float, float, float]:
    """``(value, first, second)`` derivative with respect to ``wrt``."""
    e = _as_expr(e)
    _check_nesting(e)
    return second_derivative(_closure(e, bindings, [wrt]), bindings[wrt])
