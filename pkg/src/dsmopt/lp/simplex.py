"""LP front end: dense bounded simplex for small problems, HiGHS for large."""

import numpy as np
from scipy.optimize import linprog

from ..errors import SolverError, ValidationError
from . import _kernel
from ._problem import FEASIBILITY_TOL, Solution

# problems with rows * columns above this go to HiGHS under backend="auto"
DENSE_SIZE_LIMIT = 40_000

_REDUCED_COST_TOL = 1e-9
_PIVOT_TOL = 1e-9


def _standard_form(prob):
    """Shift to ``0 <= y <= hi - lo`` and append slack/artificial columns.

    Returns the tableau, right-hand side, initial basis, upper bounds and
    the column range of the artificials.
    """
    n = prob.n
    lo = prob.lo
    A_ub = prob.A_ub.toarray()
    A_eq = prob.A_eq.toarray()
    b_ub = prob.b_ub - A_ub @ lo
    b_eq = prob.b_eq - A_eq @ lo
    m1, m2 = b_ub.size, b_eq.size
    neg = np.flatnonzero(b_ub < 0)
    n_art = neg.size + m2
    m = m1 + m2
    N = n + m1 + n_art

    T = np.zeros((m, N))
    rhs = np.zeros(m)
    basis = np.zeros(m, dtype=np.int64)
    T[:m1, :n] = A_ub
    T[np.arange(m1), n + np.arange(m1)] = 1.0
    rhs[:m1] = b_ub
    basis[:m1] = n + np.arange(m1)
    art = n + m1
    for i in neg:
        T[i] *= -1.0
        rhs[i] = -rhs[i]
        T[i, art] = 1.0
        basis[i] = art
        art += 1
    for k in range(m2):
        i = m1 + k
        s = -1.0 if b_eq[k] < 0 else 1.0
        T[i, :n] = s * A_eq[k]
        rhs[i] = s * b_eq[k]
        T[i, art] = 1.0
        basis[i] = art
        art += 1

    ub = np.full(N, np.inf)
    ub[:n] = prob.hi - lo
    return T, rhs, basis, ub, (n + m1, N)


def _run(T, beta, basis, d, at_upper, ub, max_iter):
    status, it = _kernel.iterate(T, beta, basis, d, at_upper, ub,
                                 _REDUCED_COST_TOL, _PIVOT_TOL, max_iter)
    if status == 2:
        raise SolverError(f"simplex iteration limit ({max_iter}) reached")
    return status, it


def dense_simplex(prob, max_iter=None):
    """Solve the LP relaxation of ``prob`` with the dense bounded simplex.

    All lower bounds must be finite; upper bounds may be infinite.
    """
    if not np.all(np.isfinite(prob.lo)):
        raise ValidationError("dense simplex requires finite lower bounds")
    T, rhs, basis, ub, (a0, a1) = _standard_form(prob)
    m, N = T.shape
    n = prob.n
    original = T.copy()
    if max_iter is None:
        max_iter = 50 * (m + N) + 100
    beta = rhs.copy()
    at_upper = np.zeros(N, dtype=np.uint8)
    iters = 0

    if a1 > a0:
        cost = np.zeros(N)
        cost[a0:a1] = 1.0
        d = cost - cost[basis] @ T
        d[basis] = 0.0
        _, it = _run(T, beta, basis, d, at_upper, ub, max_iter)
        iters += it
        infeas = float(np.sum(beta[(basis >= a0) & (basis < a1)]))
        if infeas > FEASIBILITY_TOL * max(1.0, float(np.max(np.abs(rhs), initial=0.0))):
            return Solution("infeasible", iterations=iters)
        ub[a0:a1] = 0.0

    cost = np.zeros(N)
    cost[:n] = prob.c
    d = cost - cost[basis] @ T
    d[basis] = 0.0
    status, it = _run(T, beta, basis, d, at_upper, ub, max_iter)
    iters += it
    if status == 1:
        return Solution("unbounded", iterations=iters)

    values = np.where(at_upper == 1, ub, 0.0)
    values[a0:a1] = 0.0
    # recompute basic values from the original rows to shed pivoting drift
    nonbasic = np.ones(N, dtype=bool)
    nonbasic[basis] = False
    try:
        xb = np.linalg.solve(original[:, basis], rhs - original[:, nonbasic] @ values[nonbasic])
    except np.linalg.LinAlgError:
        xb = beta
    values[basis] = xb
    x = np.clip(prob.lo + values[:n], prob.lo, prob.hi)
    return Solution("optimal", x=x, objective_value=prob.objective(x), iterations=iters)


def _highs(prob):
    bounds = np.column_stack([prob.lo, prob.hi])
    bounds = [(lo, None if np.isinf(hi) else hi) for lo, hi in bounds]
    bounds = [(None if np.isinf(lo) else lo, hi) for lo, hi in bounds]
    res = linprog(
        prob.c,
        A_ub=prob.A_ub if prob.b_ub.size else None,
        b_ub=prob.b_ub if prob.b_ub.size else None,
        A_eq=prob.A_eq if prob.b_eq.size else None,
        b_eq=prob.b_eq if prob.b_eq.size else None,
        bounds=bounds,
        method="highs",
        options={
            "primal_feasibility_tolerance": 1e-9,
            "dual_feasibility_tolerance": 1e-9,
        },
    )
    if res.status == 2:
        return Solution("infeasible")
    if res.status == 3:
        return Solution("unbounded")
    if res.status != 0:
        raise SolverError(f"HiGHS failed: {res.message}")
    x = np.clip(res.x, prob.lo, prob.hi)
    return Solution("optimal", x=x, objective_value=prob.objective(x),
                    iterations=int(getattr(res, "nit", 0)))


def solve_lp(prob, backend="auto"):
    """Solve the continuous relaxation of ``prob``.

    Parameters
    ----------
    prob : LinearProgram
        Binary markers are ignored; only their [0, 1] boxes remain.
    backend : {"auto", "dense", "highs"}
        ``auto`` uses the dense simplex kernel when the problem has at most
        ``DENSE_SIZE_LIMIT`` tableau entries and HiGHS otherwise.

    Returns
    -------
    Solution
        ``status`` is ``"optimal"``, ``"infeasible"`` or ``"unbounded"``.
    """
    if backend == "auto":
        rows = prob.b_ub.size + prob.b_eq.size
        small = rows * (prob.n + rows) <= DENSE_SIZE_LIMIT
        backend = "dense" if small and np.all(np.isfinite(prob.lo)) else "highs"
    if backend == "dense":
        return dense_simplex(prob)
    if backend == "highs":
        return _highs(prob)
    raise ValidationError(f"unknown LP backend {backend!r}")
