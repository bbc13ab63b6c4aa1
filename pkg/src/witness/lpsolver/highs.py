"""HiGHS backend (through scipy) for problems too large for the dense tableau."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from .problem import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LinearProblem, Solution
from ..errors import SolverError

_OPTIONS = {"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9}
_STATUS = {0: OPTIMAL, 1: ITERATION_LIMIT, 2: INFEASIBLE, 3: UNBOUNDED}


def _split(problem: LinearProblem):
    rel = np.array(problem.relations)
    A = problem.A
    ub_rows = np.flatnonzero(rel != "=")
    eq_rows = np.flatnonzero(rel == "=")
    sign = np.where(rel[ub_rows] == "<=", 1.0, -1.0)
    A_ub = sp.diags(sign) @ A[ub_rows] if len(ub_rows) else None
    b_ub = sign * problem.rhs[ub_rows] if len(ub_rows) else None
    A_eq = A[eq_rows] if len(eq_rows) else None
    b_eq = problem.rhs[eq_rows] if len(eq_rows) else None
    return A_ub, b_ub, A_eq, b_eq


def _finish(problem, status, x):
    st = _STATUS.get(status)
    if st is None:
        raise SolverError(f"HiGHS returned status {status}")
    if st != OPTIMAL:
        return Solution(st)
    x = np.clip(np.asarray(x, dtype=float), problem.lower, problem.upper)
    return Solution(OPTIMAL, x, float(problem.objective @ x))


def solve_highs_lp(problem: LinearProblem) -> Solution:
    c = problem.objective if problem.sense == "min" else -problem.objective
    A_ub, b_ub, A_eq, b_eq = _split(problem)
    bounds = list(zip(problem.lower, [None if np.isinf(u) else u for u in problem.upper]))
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
                  method="highs", options=_OPTIONS)
    return _finish(problem, res.status, res.x)


def solve_highs_milp(problem: LinearProblem) -> Solution:
    c = problem.objective if problem.sense == "min" else -problem.objective
    cons = []
    if problem.n_constraints:
        rel = np.array(problem.relations)
        lo = np.where(rel == "<=", -np.inf, problem.rhs)
        hi = np.where(rel == ">=", np.inf, problem.rhs)
        cons.append(LinearConstraint(problem.A, lo, hi))
    res = milp(c, constraints=cons, integrality=problem.binary.astype(int),
               bounds=Bounds(problem.lower, problem.upper),
               options={"mip_rel_gap": 0.0})
    sol = _finish(problem, res.status, res.x)
    if sol.optimal:
        sol.values[problem.binary] = np.round(sol.values[problem.binary])
        sol.objective_value = float(problem.objective @ sol.values)
    return sol
