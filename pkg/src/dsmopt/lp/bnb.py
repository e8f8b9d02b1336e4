"""Best-first branch and bound over binary variables."""

import heapq
import itertools

import numpy as np

from ..errors import SolverError
from ._problem import GAP_TOL, INTEGRALITY_TOL, Solution
from .simplex import solve_lp


def _fractionality(x, binaries):
    idx = np.asarray(binaries, dtype=int)
    f = np.abs(x[idx] - np.round(x[idx]))
    return idx, f


def solve_milp(prob, backend="auto", max_nodes=100_000):
    """Minimize ``prob`` with its binary variables restricted to {0, 1}.

    LP relaxations bound each node; the node with the lowest bound is
    expanded first (ties in creation order). Branching picks the most
    fractional binary, lowest index on ties.
    """
    if not prob.binaries:
        return solve_lp(prob, backend=backend)

    counter = itertools.count()
    root = solve_lp(prob, backend=backend)
    if root.status != "optimal":
        return root
    heap = [(root.objective_value, next(counter), prob.lo, prob.hi, root)]
    best = None
    best_obj = np.inf
    nodes = 1

    while heap:
        bound, _, lo, hi, sol = heapq.heappop(heap)
        if bound >= best_obj - GAP_TOL * max(1.0, abs(best_obj)):
            continue
        idx, frac = _fractionality(sol.x, prob.binaries)
        if np.all(frac <= INTEGRALITY_TOL):
            # fix the binaries exactly and polish the continuous part
            flo, fhi = lo.copy(), hi.copy()
            flo[idx] = fhi[idx] = np.round(sol.x[idx])
            polished = solve_lp(prob.with_bounds(flo, fhi), backend=backend)
            nodes += 1
            if polished.status == "optimal" and polished.objective_value < best_obj:
                best, best_obj = polished, polished.objective_value
            continue
        k = int(idx[np.argmax(frac)])
        for value in (0.0, 1.0):
            clo, chi = lo.copy(), hi.copy()
            clo[k] = chi[k] = value
            child = solve_lp(prob.with_bounds(clo, chi), backend=backend)
            nodes += 1
            if child.status == "optimal":
                heapq.heappush(heap, (child.objective_value, next(counter), clo, chi, child))
        if nodes > max_nodes:
            raise SolverError(f"branch and bound exceeded {max_nodes} nodes")

    if best is None:
        return Solution("infeasible", nodes=nodes)
    best.nodes = nodes
    return best
