"""Bounded linear programs and a small binary branch-and-bound.

The dense simplex kernel is compiled from ``_simplex_ext.pyx`` when a build
is available and falls back to the numpy implementation otherwise. Set
``DSMOPT_PURE_PYTHON=1`` to force the fallback.
"""

import os

from ._problem import (
    FEASIBILITY_TOL,
    GAP_TOL,
    INTEGRALITY_TOL,
    LinearProgram,
    Solution,
    max_violation,
)

if os.environ.get("DSMOPT_PURE_PYTHON"):
    from . import _simplex_py as _kernel
else:
    try:
        from . import _simplex_ext as _kernel
    except ImportError:  # pragma: no cover - depends on the build
        from . import _simplex_py as _kernel

KERNEL = "compiled" if _kernel.__name__.endswith("_ext") else "python"

from .simplex import solve_lp, dense_simplex  # noqa: E402
from .bnb import solve_milp  # noqa: E402

__all__ = [
    "FEASIBILITY_TOL",
    "GAP_TOL",
    "INTEGRALITY_TOL",
    "KERNEL",
    "LinearProgram",
    "Solution",
    "dense_simplex",
    "max_violation",
    "solve_lp",
    "solve_milp",
]
