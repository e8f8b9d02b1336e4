"""Pure-Python bounded-variable primal simplex iterations.

Mirror of ``_simplex_ext.pyx``; both must implement the same pivoting rules
so that results are bit-for-bit comparable on small problems.
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2

# consecutive degenerate steps before switching to Bland's rule
_DEGENERATE_SWITCH = 50


def iterate(T, beta, basis, d, at_upper, ub, tol, pivot_tol, max_iter):
    """Run primal simplex iterations in place on a dense tableau.

    Parameters
    ----------
    T : (m, n) float64 array
        Current tableau ``B^-1 A``.
    beta : (m,) float64 array
        Values of the basic variables.
    basis : (m,) int64 array
        Column index of the basic variable in each row.
    d : (n,) float64 array
        Reduced costs; zero on basic columns.
    at_upper : (n,) uint8 array
        1 for nonbasic columns resting at their upper bound.
    ub : (n,) float64 array
        Upper bounds (lower bounds are all zero); ``inf`` allowed.

    Returns
    -------
    status, iterations
    """
    m, n = T.shape
    is_basic = np.zeros(n, dtype=bool)
    is_basic[basis] = True
    degenerate = 0
    it = 0
    while it < max_iter:
        bland = degenerate >= _DEGENERATE_SWITCH
        # pricing
        lower_ok = (at_upper == 0) & (d < -tol)
        upper_ok = (at_upper == 1) & (d > tol)
        eligible = (lower_ok | upper_ok) & ~is_basic & (ub > 0.0)
        cand = np.flatnonzero(eligible)
        if cand.size == 0:
            return OPTIMAL, it
        if bland:
            j = int(cand[0])
        else:
            j = int(cand[np.argmax(np.abs(d[cand]))])
        sgn = 1.0 if at_upper[j] == 0 else -1.0

        # ratio test: minimum step, then tie-break among near-minimal rows
        delta = -sgn * T[:, j]
        ub_basic = ub[basis]
        dec = delta < -pivot_tol
        inc = (delta > pivot_tol) & (ub_basic < np.inf)
        ratios = np.full(m, np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios[dec] = beta[dec] / -delta[dec]
            ratios[inc] = (ub_basic[inc] - beta[inc]) / delta[inc]
        np.maximum(ratios, 0.0, out=ratios)
        rows = np.flatnonzero(dec | inc)
        best_r = -1
        best_t = np.inf
        if rows.size:
            best_t = ratios[rows].min()
            ties = rows[ratios[rows] <= best_t + 1e-12]
            if bland:
                best_r = int(ties[np.argmin(basis[ties])])
            else:
                best_r = int(ties[np.argmax(np.abs(delta[ties]))])
            best_to_upper = bool(inc[best_r])

        flip = ub[j]
        if best_r < 0 and flip == np.inf:
            return UNBOUNDED, it

        if best_r < 0 or flip <= best_t:
            # entering variable runs into its own opposite bound
            beta += delta * flip
            at_upper[j] = 1 - at_upper[j]
            step = flip
        else:
            r = best_r
            t = best_t
            beta += delta * t
            leaving = basis[r]
            beta[r] = t if sgn > 0 else ub[j] - t
            at_upper[leaving] = 1 if best_to_upper else 0
            at_upper[j] = 0
            is_basic[leaving] = False
            is_basic[j] = True
            basis[r] = j
            piv = T[r, j]
            T[r, :] /= piv
            colj = T[:, j].copy()
            colj[r] = 0.0
            T -= np.outer(colj, T[r, :])
            d -= d[j] * T[r, :]
            d[j] = 0.0
            step = t
        degenerate = degenerate + 1 if step <= 1e-12 else 0
        it += 1
    return ITERATION_LIMIT, it
