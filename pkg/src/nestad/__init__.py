"""Forward-mode automatic differentiation with structurally nested dual numbers."""

from .nesting import (
    NestedReport,
    derivatives,
    inner_lift,
    nested_derivative,
    pop_derivative,
    pop_value,
    push,
    second_derivative,
)
from .scalar import (
    Dual,
    cos,
    depth,
    derivative_of,
    differentiate,
    exp,
    gradient,
    leaves,
    lift,
    log,
    make_dual,
    pow,
    primal,
    seed,
    sin,
    sqrt,
    tan,
    value_of,
)

__version__ = "0.1.0"
