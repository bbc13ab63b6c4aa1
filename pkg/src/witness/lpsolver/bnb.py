"""Best-first branch and bound over binary variables."""
from __future__ import annotations

import heapq

import numpy as np

from .problem import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LinearProblem, Solution

INT_TOL = 1e-6
MAX_NODES = 10**6


def branch_and_bound(problem: LinearProblem, lp_solve, max_nodes: int = MAX_NODES) -> Solution:
    """Exact optimum of ``problem`` using ``lp_solve`` on relaxations.

    Nodes are expanded in order of their relaxation bound, ties broken by
    creation order. The branching variable is the most fractional binary
    (lowest index on ties); the 0-branch is created before the 1-branch.
    Incumbents are polished by re-solving with all binaries fixed.
    """
    sign = 1.0 if problem.sense == "min" else -1.0
    binaries = np.flatnonzero(problem.binary)
    relax = problem.relaxation()
    incumbent = None
    best = np.inf
    counter = 0
    nodes = 0

    root = lp_solve(relax)
    if root.status == UNBOUNDED:
        return Solution(UNBOUNDED, nodes=1)
    if root.status == ITERATION_LIMIT:
        return Solution(ITERATION_LIMIT, nodes=1)
    if root.status != OPTIMAL:
        return Solution(INFEASIBLE, nodes=1)
    heap = [(sign * root.objective_value, counter, relax.lower, relax.upper, root)]

    while heap:
        bound, _, lo, hi, sol = heapq.heappop(heap)
        nodes += 1
        if nodes > max_nodes:
            out = incumbent or Solution(ITERATION_LIMIT)
            return Solution(ITERATION_LIMIT, out.values, out.objective_value, nodes)
        if bound >= best - 1e-9:
            continue
        frac = np.abs(sol.values[binaries] - np.round(sol.values[binaries]))
        if len(binaries) == 0 or frac.max() <= INT_TOL:
            cand = _polish(relax, sol, binaries, lp_solve)
            val = sign * cand.objective_value
            if val < best:
                best, incumbent = val, cand
            continue
        # most fractional: distance to 0.5 smallest
        k = int(np.argmin(np.abs(frac - 0.5)))
        v = binaries[k]
        for fix in (0.0, 1.0):
            clo, chi = lo.copy(), hi.copy()
            clo[v] = chi[v] = fix
            child = lp_solve(relax.with_bounds(clo, chi))
            if child.status == ITERATION_LIMIT:
                out = incumbent or Solution(ITERATION_LIMIT)
                return Solution(ITERATION_LIMIT, out.values, out.objective_value, nodes)
            if child.status != OPTIMAL:
                continue
            cb = sign * child.objective_value
            if cb >= best - 1e-9:
                continue
            counter += 1
            heapq.heappush(heap, (cb, counter, clo, chi, child))

    if incumbent is None:
        return Solution(INFEASIBLE, nodes=nodes)
    return Solution(OPTIMAL, incumbent.values, incumbent.objective_value, nodes)


def _polish(relax: LinearProblem, sol: Solution, binaries, lp_solve) -> Solution:
    fixed = np.round(sol.values[binaries])
    lo, hi = relax.lower.copy(), relax.upper.copy()
    lo[binaries] = hi[binaries] = fixed
    again = lp_solve(relax.with_bounds(lo, hi))
    if again.status == OPTIMAL:
        return again
    values = sol.values.copy()
    values[binaries] = fixed
    return Solution(OPTIMAL, values, float(relax.objective @ values))
