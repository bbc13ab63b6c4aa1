"""LP and MILP solving.

The built-in dense simplex handles desk-scale problems; larger problems go to
HiGHS through scipy when ``backend="auto"``.
"""
from __future__ import annotations

from ..errors import SolverError
from .bnb import branch_and_bound
from .highs import solve_highs_lp, solve_highs_milp
from .lpformat import export_lp_format
from .problem import (INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LinearProblem,
                      Solution)
from .simplex import solve_simplex

# dense tableau cells above which "auto" switches to HiGHS
DENSE_LIMIT = 4_000_000

BACKENDS = ("auto", "simplex", "highs")


def _pick(problem: LinearProblem, backend: str) -> str:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend != "auto":
        return backend
    m = problem.n_constraints + int((problem.upper < float("inf")).sum())
    cells = (m + 1) * (problem.n_vars + 2 * m + 1)
    return "simplex" if cells <= DENSE_LIMIT else "highs"


def solve_lp(problem: LinearProblem, backend: str = "auto") -> Solution:
    """Solve an LP; binary flags are ignored (continuous relaxation).

    Returns statuses ``optimal``, ``infeasible``, ``unbounded`` or
    ``iteration_limit`` instead of raising.
    """
    if _pick(problem, backend) == "highs":
        return solve_highs_lp(problem)
    return solve_simplex(problem)


def solve_milp(problem: LinearProblem, backend: str = "auto") -> Solution:
    """Exact MILP optimum; defers to :func:`solve_lp` without binaries."""
    if not problem.binary.any():
        return solve_lp(problem, backend)
    if _pick(problem, backend) == "highs":
        return solve_highs_milp(problem)
    return branch_and_bound(problem, solve_simplex)


__all__ = [
    "LinearProblem", "Solution", "solve_lp", "solve_milp", "export_lp_format", "SolverError",
    "OPTIMAL", "INFEASIBLE", "UNBOUNDED", "ITERATION_LIMIT",
]
