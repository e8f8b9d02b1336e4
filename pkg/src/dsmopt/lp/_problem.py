from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from ..errors import ValidationError

FEASIBILITY_TOL = 1e-7
INTEGRALITY_TOL = 1e-6
GAP_TOL = 1e-6


def _as_matrix(A, n):
    if A is None:
        return sp.csr_matrix((0, n))
    if sp.issparse(A):
        return sp.csr_matrix(A, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return sp.csr_matrix((0, n))
    return sp.csr_matrix(A)


@dataclass(frozen=True)
class LinearProgram:
    """``min c.x + offset`` s.t. ``A_ub x <= b_ub``, ``A_eq x = b_eq``,
    ``lo <= x <= hi`` and ``x[k]`` in {0, 1} for ``k`` in ``binaries``.

    Constraint matrices are stored as CSR; dense inputs are converted.
    """

    c: np.ndarray
    A_ub: sp.csr_matrix = None
    b_ub: np.ndarray = None
    A_eq: sp.csr_matrix = None
    b_eq: np.ndarray = None
    lo: np.ndarray = None
    hi: np.ndarray = None
    binaries: tuple = ()
    offset: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        n = c.size
        A_ub = _as_matrix(self.A_ub, n)
        A_eq = _as_matrix(self.A_eq, n)
        b_ub = np.zeros(0) if self.b_ub is None else np.asarray(self.b_ub, dtype=float).ravel()
        b_eq = np.zeros(0) if self.b_eq is None else np.asarray(self.b_eq, dtype=float).ravel()
        lo = np.zeros(n) if self.lo is None else np.broadcast_to(
            np.asarray(self.lo, dtype=float), (n,)).copy()
        hi = np.full(n, np.inf) if self.hi is None else np.broadcast_to(
            np.asarray(self.hi, dtype=float), (n,)).copy()
        binaries = tuple(sorted(int(k) for k in self.binaries))

        if A_ub.shape != (b_ub.size, n):
            raise ValidationError(f"A_ub has shape {A_ub.shape}, expected ({b_ub.size}, {n})")
        if A_eq.shape != (b_eq.size, n):
            raise ValidationError(f"A_eq has shape {A_eq.shape}, expected ({b_eq.size}, {n})")
        if np.any(lo > hi):
            k = int(np.flatnonzero(lo > hi)[0])
            raise ValidationError(f"variable {k}: lower bound {lo[k]} exceeds upper bound {hi[k]}")
        for k in binaries:
            if not 0 <= k < n:
                raise ValidationError(f"binary index {k} out of range")
            lo[k] = max(lo[k], 0.0)
            hi[k] = min(hi[k], 1.0)
            if lo[k] > hi[k]:
                raise ValidationError(f"binary variable {k} has empty bounds")

        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A_ub", A_ub)
        object.__setattr__(self, "b_ub", b_ub)
        object.__setattr__(self, "A_eq", A_eq)
        object.__setattr__(self, "b_eq", b_eq)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "binaries", binaries)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self):
        return self.c.size

    def with_bounds(self, lo, hi):
        return replace(self, lo=lo, hi=hi)

    def relaxation(self):
        return replace(self, binaries=())

    def objective(self, x):
        return float(self.c @ x) + self.offset


@dataclass
class Solution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray = None
    objective_value: float = np.nan
    iterations: int = 0
    nodes: int = 0
    info: dict = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status == "optimal"


def max_violation(prob, x):
    """Largest absolute violation of rows, bounds and integrality at ``x``."""
    x = np.asarray(x, dtype=float)
    viol = 0.0
    if prob.b_ub.size:
        viol = max(viol, float(np.max(prob.A_ub @ x - prob.b_ub, initial=0.0)))
    if prob.b_eq.size:
        viol = max(viol, float(np.max(np.abs(prob.A_eq @ x - prob.b_eq))))
    viol = max(viol, float(np.max(prob.lo - x, initial=0.0)))
    viol = max(viol, float(np.max(x - prob.hi, initial=0.0)))
    for k in prob.binaries:
        viol = max(viol, min(abs(x[k]), abs(x[k] - 1.0)))
    return viol
