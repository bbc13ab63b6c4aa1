"""Two-phase dense-tableau primal simplex.

Entering variable by Dantzig's rule; after ``10 * (m + n)`` consecutive
degenerate pivots the solver switches to Bland's rule for the rest of the
solve, which rules out cycling. The final basis is re-solved against the
original data to wash out accumulated tableau round-off.
"""
from __future__ import annotations

import numpy as np

from .problem import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LinearProblem, Solution

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
MAX_PIVOTS = 10**6


class _Tableau:
    def __init__(self, T, basis, max_pivots):
        self.T = T
        self.basis = basis
        self.pivots = 0
        self.max_pivots = max_pivots
        m = T.shape[0] - 1
        self.bland_after = 10 * (m + T.shape[1] - 1)
        self.bland = False
        self.degenerate_run = 0

    def pivot(self, r, j):
        T = self.T
        prow = T[r] / T[r, j]
        T -= np.outer(T[:, j], prow)
        T[r] = prow
        self.basis[r] = j
        self.pivots += 1

    def run(self, ncols):
        """Optimize over the first ``ncols`` columns; returns a status."""
        T = self.T
        m = T.shape[0] - 1
        if ncols == 0:
            return OPTIMAL
        while True:
            if self.pivots >= self.max_pivots:
                return ITERATION_LIMIT
            d = T[-1, :ncols]
            if self.bland:
                cand = np.flatnonzero(d < -PIVOT_TOL)
                if len(cand) == 0:
                    return OPTIMAL
                j = int(cand[0])
            else:
                j = int(np.argmin(d))
                if d[j] >= -PIVOT_TOL:
                    return OPTIMAL
            col = T[:m, j]
            pos = np.flatnonzero(col > PIVOT_TOL)
            if len(pos) == 0:
                return UNBOUNDED
            ratios = np.maximum(T[pos, -1], 0.0) / col[pos]
            rmin = ratios.min()
            ties = pos[ratios <= rmin + 1e-12 * (1.0 + abs(rmin))]
            if self.bland:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(ties[np.argmax(col[ties])])
            if rmin <= FEAS_TOL:
                self.degenerate_run += 1
                if self.degenerate_run > self.bland_after:
                    self.bland = True
            else:
                self.degenerate_run = 0
            self.pivot(r, j)


def solve_simplex(problem: LinearProblem, max_pivots: int = MAX_PIVOTS) -> Solution:
    """Solve the continuous relaxation of ``problem``."""
    c = np.array(problem.objective, dtype=float)
    if problem.sense == "max":
        c = -c
    lo, hi = problem.lower, problem.upper
    if np.any(hi < lo - FEAS_TOL):
        return Solution(INFEASIBLE)
    fixed = hi - lo <= FEAS_TOL
    free = np.flatnonzero(~fixed)
    A = problem.A.toarray()
    b = problem.rhs - A @ lo
    A = A[:, free]
    cf = c[free]
    rels = list(problem.relations)

    ub = hi[free] - lo[free]
    finite = np.flatnonzero(np.isfinite(ub))
    if len(finite):
        extra = np.zeros((len(finite), len(free)))
        extra[np.arange(len(finite)), finite] = 1.0
        A = np.vstack([A, extra])
        b = np.concatenate([b, ub[finite]])
        rels += ["<="] * len(finite)

    # drop empty rows after checking them
    keep = []
    for i, rel in enumerate(rels):
        if np.any(A[i] != 0):
            keep.append(i)
            continue
        if (rel == "<=" and b[i] < -FEAS_TOL) or (rel == ">=" and b[i] > FEAS_TOL) or \
                (rel == "=" and abs(b[i]) > FEAS_TOL):
            return Solution(INFEASIBLE)
    A, b = A[keep], b[keep]
    rels = [rels[i] for i in keep]
    m, nf = A.shape

    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    rels = [{"<=": ">=", ">=": "<=", "=": "="}[r] if f else r for r, f in zip(rels, flip)]

    slack_rows = [i for i, r in enumerate(rels) if r != "="]
    ns = len(slack_rows)
    N = nf + ns
    M = np.zeros((m, N))
    M[:, :nf] = A
    basis = np.full(m, -1, dtype=np.int64)
    for k, i in enumerate(slack_rows):
        if rels[i] == "<=":
            M[i, nf + k] = 1.0
            basis[i] = nf + k
        else:
            M[i, nf + k] = -1.0
    art_rows = np.flatnonzero(basis < 0)
    na = len(art_rows)

    T = np.zeros((m + 1, N + na + 1))
    T[:m, :N] = M
    T[:m, -1] = b
    for k, i in enumerate(art_rows):
        T[i, N + k] = 1.0
        basis[i] = N + k
    tab = _Tableau(T, basis, max_pivots)

    if na:
        T[-1, :N] = -T[art_rows, :N].sum(axis=0)
        T[-1, -1] = -b[art_rows].sum()
        status = tab.run(N + na)
        if status == ITERATION_LIMIT:
            return Solution(ITERATION_LIMIT, nodes=tab.pivots)
        if -tab.T[-1, -1] > FEAS_TOL * (1.0 + float(np.max(b, initial=0.0))):
            return Solution(INFEASIBLE)
        T = tab.T
        rows_ok = np.ones(m, dtype=bool)
        for i in range(m):
            if tab.basis[i] >= N:
                row = T[i, :N]
                j = int(np.argmax(np.abs(row)))
                if abs(row[j]) > PIVOT_TOL:
                    tab.pivot(i, j)
                else:
                    rows_ok[i] = False
        kept_rows = np.flatnonzero(rows_ok)
        T = np.vstack([tab.T[kept_rows][:, list(range(N)) + [-1]], np.zeros((1, N + 1))])
        basis = tab.basis[kept_rows]
        tab.T, tab.basis = T, basis
    else:
        kept_rows = np.arange(m)

    T = tab.T
    mk = len(kept_rows)
    cstd = np.concatenate([cf, np.zeros(ns)])
    cB = cstd[tab.basis]
    T[-1, :N] = cstd - cB @ T[:mk, :N]
    T[-1, -1] = -cB @ T[:mk, -1]
    status = tab.run(N)
    if status != OPTIMAL:
        return Solution(status, nodes=tab.pivots)

    xstd = np.zeros(N)
    xstd[tab.basis] = T[:mk, -1]
    if mk:
        try:
            xb = np.linalg.solve(M[kept_rows][:, tab.basis], b[kept_rows])
            if np.all(np.isfinite(xb)) and xb.min() >= -FEAS_TOL:
                xstd[tab.basis] = xb
        except np.linalg.LinAlgError:
            pass
    xstd = np.maximum(xstd, 0.0)
    x = np.array(lo, dtype=float)
    x[free] += xstd[:nf]
    x = np.minimum(x, hi)
    return Solution(OPTIMAL, x, float(problem.objective @ x), nodes=tab.pivots)
