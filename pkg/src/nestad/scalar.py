"""Dual numbers that nest: ``Dual(value, derivative)`` over any scalar.

A ``Dual`` whose components are plain floats is a first-order forward-mode
number.  A ``Dual`` whose components are themselves ``Dual`` carries a second,
independent perturbation, and so on.  Every operation below is written once
for an arbitrary component type, so the same rule table serves every depth.

Floating point follows IEEE 754: domain violations and division by zero give
``nan``/``inf`` rather than raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Real as _RealNumber
from typing import Callable, Sequence, Union

__all__ = [
    "Dual",
    "Scalar",
    "depth",
    "make_dual",
    "value_of",
    "derivative_of",
    "primal",
    "leaves",
    "lift",
    "seed",
    "zero_like",
    "one_like",
    "is_constant",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "exp",
    "log",
    "sin",
    "cos",
    "tan",
    "sqrt",
    "pow",
    "power",
    "differentiate",
    "gradient",
]

Scalar = Union[float, "Dual"]


# Real leaves ---------------------------------------------------------------
#
# `math` raises on domain errors and overflow; these wrappers return the IEEE
# result instead.


def _rdiv(a: float, b: float) -> float:
    try:
        return a / b
    except ZeroDivisionError:
        if a == 0.0 or a != a:
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)


def _rexp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _rlog(x: float) -> float:
    if x > 0.0:
        return math.log(x)
    if x == 0.0:
        return -math.inf
    return math.nan


def _rsqrt(x: float) -> float:
    if x >= 0.0:
        return math.sqrt(x)
    return math.nan


def _rtrig(fn: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(x: float) -> float:
        try:
            return fn(x)
        except ValueError:  # infinite argument
            return math.nan

    return wrapped


_rsin = _rtrig(math.sin)
_rcos = _rtrig(math.cos)
_rtan = _rtrig(math.tan)


def _is_odd_integer(k: float) -> bool:
    return math.isfinite(k) and k == math.floor(k) and math.fmod(k, 2.0) != 0.0


def _rpow(a: float, k: float) -> float:
    try:
        return math.pow(a, k)
    except OverflowError:
        if a < 0.0 and _is_odd_integer(k):
            return -math.inf
        return math.inf
    except ValueError:
        if a == 0.0 and k < 0.0:
            if _is_odd_integer(k):
                return math.copysign(math.inf, a)
            return math.inf
        return math.nan


# The scalar type -----------------------------------------------------------


def _is_number(x: object) -> bool:
    return isinstance(x, _RealNumber) and not isinstance(x, bool)


def depth(s: Scalar) -> int:
    """Nesting depth: 0 for a float, 1 for ``Dual[float]``, 2 for ``Dual[Dual[float]]``..."""
    if isinstance(s, Dual):
        return s.depth
    if _is_number(s):
        return 0
    raise TypeError(f"not a differential scalar: {s!r}")


@dataclass(frozen=True, eq=True)
class Dual:
    """A value together with its derivative along one perturbation.

    Both components have the same type.  Plain numbers passed as components
    are converted to float (and lifted to the depth of the other component).
    Mixing two ``Dual`` values of different depth is a ``TypeError``: there is
    no unambiguous way to decide which perturbation the shallower one belongs
    to, and guessing is exactly what produces perturbation confusion.
    """

    value: Scalar
    derivative: Scalar

    def __post_init__(self) -> None:
        v, d = _coerce_pair(self.value, self.derivative)
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "derivative", d)
        object.__setattr__(self, "_depth", depth(v) + 1)

    @property
    def depth(self) -> int:
        return self._depth  # type: ignore[attr-defined]

    def __repr__(self) -> str:
        return f"Dual({self.value!r}, {self.derivative!r})"

    # arithmetic
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __pow__(self, other):
        return power(self, other)

    def __rpow__(self, other):
        return power(other, self)

    def __neg__(self):
        return neg(self)

    def __pos__(self):
        return self


def _coerce_pair(a: Scalar, b: Scalar) -> tuple[Scalar, Scalar]:
    a_dual, b_dual = isinstance(a, Dual), isinstance(b, Dual)
    if a_dual and b_dual:
        if a.depth != b.depth:
            raise TypeError(
                f"cannot combine scalars of nesting depth {a.depth} and {b.depth}; "
                "use nesting.inner_lift to move the shallower one in explicitly"
            )
        return a, b
    if a_dual:
        return a, lift(_number(b), a.depth)
    if b_dual:
        return lift(_number(a), b.depth), b
    return _number(a), _number(b)


def _number(x: object) -> float:
    if not _is_number(x):
        raise TypeError(f"not a differential scalar: {x!r}")
    return float(x)  # type: ignore[arg-type]


# Construction and access -----------------------------------------------------


def make_dual(v: Scalar, d: Scalar) -> Dual:
    return Dual(v, d)


def value_of(s: Scalar) -> Scalar:
    """The value component; a float is its own value."""
    return s.value if isinstance(s, Dual) else _number(s)


def derivative_of(s: Scalar) -> Scalar:
    """The derivative component; a float has derivative 0."""
    return s.derivative if isinstance(s, Dual) else 0.0


def primal(s: Scalar) -> float:
    """The innermost value, following ``value`` down to a float."""
    while isinstance(s, Dual):
        s = s.value
    return _number(s)


def leaves(s: Scalar) -> tuple[float, ...]:
    """All float components, value subtree before derivative subtree.

    For depth 2 this is ``(value.value, value.derivative,
    derivative.value, derivative.derivative)``.
    """
    if isinstance(s, Dual):
        return leaves(s.value) + leaves(s.derivative)
    return (_number(s),)


def lift(x: float, depth: int = 1) -> Scalar:
    """Embed a real constant at the given depth, with zero derivative at every level."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if depth == 0:
        return _number(x)
    return Dual(lift(x, depth - 1), lift(0.0, depth - 1))


def seed(x: float) -> Dual:
    """The differentiation variable of a first-order pass: ``Dual(x, 1)``."""
    return Dual(_number(x), 1.0)


def zero_like(s: Scalar) -> Scalar:
    return lift(0.0, depth(s))


def one_like(s: Scalar) -> Scalar:
    return lift(1.0, depth(s))


def is_constant(s: Scalar) -> bool:
    """True when every derivative component, at every level, is exactly zero."""
    if isinstance(s, Dual):
        return all(x == 0.0 for x in leaves(s.derivative)) and is_constant(s.value)
    return True


# Rule table ------------------------------------------------------------------


def add(a: Scalar, b: Scalar) -> Scalar:
    a, b = _coerce_pair(a, b)
    if isinstance(a, Dual):
        return Dual(add(a.value, b.value), add(a.derivative, b.derivative))
    return a + b


def sub(a: Scalar, b: Scalar) -> Scalar:
    a, b = _coerce_pair(a, b)
    if isinstance(a, Dual):
        return Dual(sub(a.value, b.value), sub(a.derivative, b.derivative))
    return a - b


def mul(a: Scalar, b: Scalar) -> Scalar:
    a, b = _coerce_pair(a, b)
    if isinstance(a, Dual):
        # (ab)' = a'b + ab'
        return Dual(
            mul(a.value, b.value),
            add(mul(a.derivative, b.value), mul(a.value, b.derivative)),
        )
    return a * b


def div(a: Scalar, b: Scalar) -> Scalar:
    a, b = _coerce_pair(a, b)
    if isinstance(a, Dual):
        # (a/b)' = (a'b - ab') / b^2
        num = sub(mul(a.derivative, b.value), mul(a.value, b.derivative))
        return Dual(div(a.value, b.value), div(num, mul(b.value, b.value)))
    return _rdiv(a, b)


def neg(a: Scalar) -> Scalar:
    if isinstance(a, Dual):
        return Dual(neg(a.value), neg(a.derivative))
    return -_number(a)


def exp(a: Scalar) -> Scalar:
    if isinstance(a, Dual):
        e = exp(a.value)
        return Dual(e, mul(e, a.derivative))
    return _rexp(_number(a))


def log(a: Scalar) -> Scalar:
    if isinstance(a, Dual):
        return Dual(log(a.value), div(a.derivative, a.value))
    return _rlog(_number(a))


def sin(a: Scalar) -> Scalar:
    if isinstance(a, Dual):
        return Dual(sin(a.value), mul(cos(a.value), a.derivative))
    return _rsin(_number(a))


def cos(a: Scalar) -> Scalar:
    if isinstance(a, Dual):
        return Dual(cos(a.value), mul(neg(sin(a.value)), a.derivative))
    return _rcos(_number(a))


def tan(a: Scalar) -> Scalar:
    if isinstance(a, Dual):
        t = tan(a.value)
        return Dual(t, mul(add(1.0, mul(t, t)), a.derivative))
    return _rtan(_number(a))


def sqrt(a: Scalar) -> Scalar:
    if isinstance(a, Dual):
        r = sqrt(a.value)
        return Dual(r, div(a.derivative, mul(2.0, r)))
    return _rsqrt(_number(a))


def pow(a: Scalar, k: float) -> Scalar:  # noqa: A001 - mirrors math.pow
    """``a ** k`` for a real exponent ``k``: derivative ``k * a**(k-1) * a'``."""
    k = _number(k)
    if isinstance(a, Dual):
        if k == 0.0:
            return one_like(a)
        return Dual(
            pow(a.value, k),
            mul(mul(k, pow(a.value, k - 1.0)), a.derivative),
        )
    return _rpow(_number(a), k)


def power(a: Scalar, b: Scalar) -> Scalar:
    """``a ** b`` where the exponent may itself carry derivatives.

    A constant exponent goes through the real-exponent rule, which is valid
    for negative bases; otherwise ``exp(b * log(a))``.
    """
    if _is_number(b):
        return pow(a, b)
    if is_constant(b):
        a, b = _coerce_pair(a, b)
        return pow(a, primal(b))
    return exp(mul(b, log(a)))


# Drivers ---------------------------------------------------------------------


def _first_order(y: Scalar) -> tuple[float, float]:
    if not isinstance(y, Dual):
        return _number(y), 0.0
    if y.depth != 1:
        raise TypeError(f"expected a first-order result, got depth {y.depth}")
    return y.value, y.derivative  # type: ignore[return-value]


def differentiate(f: Callable[[Scalar], Scalar], x0: float) -> tuple[float, float]:
    """Return ``(f(x0), f'(x0))`` from one forward pass."""
    return _first_order(f(seed(x0)))


def gradient(
    f: Callable[..., Scalar], x0: Sequence[float]
) -> tuple[float, list[float]]:
    """Return ``f(x0)`` and its partial derivatives, one forward pass per variable.

    Pass ``i`` seeds argument ``i`` and lifts the others as constants.
    """
    n = len(x0)
    if n < 1:
        raise ValueError("gradient needs at least one variable")
    value = math.nan
    partials = []
    for i in range(n):
        args = [seed(x) if j == i else lift(x) for j, x in enumerate(x0)]
        v, d = _first_order(f(*args))
        if i == 0:
            value = v
        partials.append(d)
    return value, partials
