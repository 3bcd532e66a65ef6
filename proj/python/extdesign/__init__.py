"""Extended optimality criteria for nonlinear regression designs."""

from ._core import (
    Model,
    Design,
    builtin_model,
    classical,
    curvature,
    evaluate,
    optimize,
    parse_range,
    solve_maximin,
)

__all__ = [
    "Model",
    "Design",
    "builtin_model",
    "classical",
    "curvature",
    "evaluate",
    "optimize",
    "parse_range",
    "solve_maximin",
]
