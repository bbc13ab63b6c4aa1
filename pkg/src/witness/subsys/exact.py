"""Minimal witnessing subsystems by mixed-integer programming."""
from __future__ import annotations

import numpy as np

from ..certify import Certificate
from ..errors import SolverError, Unsatisfied
from ..lpsolver import INFEASIBLE, ITERATION_LIMIT, LinearProblem, solve_milp
from .core import compute_K, coupling_block, lower_query, padded_blocks, verified_subsystem
from .labels import LabelMap


def milp_exact(rf, mode: str, lam: float, labels: LabelMap | None = None,
               backend: str = "auto"):
    """Witnessing subsystem with the fewest present labels.

    Every label gets a binary indicator ``sigma``; in min mode each state's
    entry is bounded by the indicators of its labels, in max mode each pair
    entry by ``K`` times them. Without ``labels`` every state is its own
    label, which minimizes the number of states.

    :raises Unsatisfied: if ``Pr^mode >= lam`` does not hold
    """
    query = lower_query(mode, lam)
    n = rf.state_count
    labels = labels if labels is not None else LabelMap.unit(n)
    nx = n if mode == "min" else rf.pair_count
    L = len(labels)
    K = 1.0 if mode == "min" else compute_K(rf, lam, backend)
    blocks = padded_blocks(rf, mode, lam, L)
    blocks.append((coupling_block(rf, mode, labels, K), "<=", 0.0))
    c = np.concatenate([np.zeros(nx), np.ones(L)])
    upper = np.concatenate([np.full(nx, np.inf), np.ones(L)])
    binary = np.concatenate([np.zeros(nx, dtype=bool), np.ones(L, dtype=bool)])
    problem = LinearProblem.from_blocks(c, blocks, upper=upper, binary=binary)
    sol = solve_milp(problem, backend)
    if sol.status == INFEASIBLE:
        raise Unsatisfied()
    if sol.status == ITERATION_LIMIT and len(sol.values) == 0:
        raise SolverError("MILP limit reached without a feasible solution", sol)
    if sol.status not in ("optimal", ITERATION_LIMIT):
        raise SolverError(f"unexpected MILP status {sol.status}", sol)
    x = sol.values[:nx]
    sigma = sol.values[nx:]
    if mode == "max":
        x = np.maximum(x, 0.0)
    cert = Certificate(query.kind, x, query)
    active = [l for l, v in zip(labels.labels, sigma) if v > 0.5]
    res = verified_subsystem(rf, cert, mode, 1e-8, labels, active, 0)
    res.optimal = sol.status != ITERATION_LIMIT
    return res
