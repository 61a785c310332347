"""Nested derivatives: derivatives used as intermediate values.

To evaluate ``g'(w)`` in the middle of a forward pass over ``x``, the
``Dual`` holding ``w`` is wrapped one level deeper with :func:`push`, ``g`` is
run on the wrapped value, and :func:`pop_derivative` unwraps the result.  The
outer perturbation survives in the value lanes, so the unwrapped ``Dual``
carries ``g'(w)`` together with its derivative along ``x``, ``g''(w) * w'``.

For ``X = g(push(w))`` with ``w = Dual(v, d)`` the four leaves are::

    X.value.value            g(v)         value of the nested function
    X.value.derivative       g'(v) * d    derivative along the outer variable
    X.derivative.value       g'(v)        the nested derivative
    X.derivative.derivative  g''(v) * d   the composed derivative

Any other outer quantity used inside ``g`` must be brought in with
:func:`inner_lift`; combining scalars of different depth raises ``TypeError``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .scalar import Dual, Scalar, depth, leaves, lift, one_like, seed, zero_like

__all__ = [
    "NestedReport",
    "push",
    "pop_value",
    "pop_derivative",
    "inner_lift",
    "nested_derivative",
    "second_derivative",
    "derivatives",
]


@dataclass(frozen=True)
class NestedReport:
    """The four leaves of a depth-2 scalar, named by what they hold."""

    value_value: float
    value_derivative: float
    derivative_value: float
    derivative_derivative: float

    @classmethod
    def from_dual(cls, X: Dual) -> "NestedReport":
        if depth(X) != 2:
            raise TypeError(f"expected a depth-2 scalar, got depth {depth(X)}")
        return cls(*leaves(X))


def push(x: Scalar) -> Dual:
    """Wrap ``x`` one level deeper as the variable of a nested pass.

    ``push(Dual(4, 10)) == Dual(Dual(4, 10), Dual(1, 0))``.  Pushing a float
    is the same as :func:`nestad.scalar.seed`.
    """
    return Dual(x, one_like(x))


def pop_value(X: Dual) -> Scalar:
    return X.value


def pop_derivative(X: Dual) -> Scalar:
    return X.derivative


def inner_lift(s: Scalar) -> Dual:
    """Bring an outer quantity into a nested pass as a constant of that pass.

    Whatever derivatives ``s`` already carries stay in the value lane.
    """
    return Dual(s, zero_like(s))


def _at_depth(y: Scalar, d: int) -> Scalar:
    if depth(y) == 0 and d > 0:
        return lift(y, d)  # type: ignore[arg-type]
    if depth(y) != d:
        raise TypeError(f"nested function returned depth {depth(y)}, expected {d}")
    return y


def nested_derivative(g: Callable[[Scalar], Scalar], w: Scalar) -> Scalar:
    """``pop_derivative(g(push(w)))``: the derivative of ``g`` at ``w``, still differentiable."""
    X = push(w)
    return pop_derivative(_at_depth(g(X), depth(X)))


def second_derivative(
    f: Callable[[Scalar], Scalar], x0: float
) -> tuple[float, float, float]:
    """Return ``(f(x0), f'(x0), f''(x0))`` from one pass of depth 2."""
    X = push(seed(x0))
    vv, vd, _, dd = leaves(_at_depth(f(X), 2))
    return vv, vd, dd


def derivatives(f: Callable[[Scalar], Scalar], x0: float, order: int) -> list[float]:
    """Return ``[f(x0), f'(x0), ..., f^(order)(x0)]`` by pushing ``order`` times.

    Cost grows as ``2**order``; meant for small orders.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    x: Scalar = float(x0)
    for _ in range(order):
        x = push(x)
    y = _at_depth(f(x), order)
    out = []
    for k in range(order + 1):
        node = y
        for _ in range(k):
            node = node.derivative  # type: ignore[union-attr]
        while isinstance(node, Dual):
            node = node.value
        out.append(float(node))
    return out
