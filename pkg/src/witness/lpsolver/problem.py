from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

RELATIONS = ("<=", ">=", "=")

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"


class LinearProblem:
    """An LP or MILP over variables ``x0 .. x(n-1)``.

    ``sense`` is ``"min"`` or ``"max"``. Constraint ``i`` reads
    ``A[i] @ x  relations[i]  rhs[i]``. Every variable has a finite lower bound
    (default 0) and an upper bound (default ``inf``); binary variables are
    restricted to {0, 1}.
    """

    def __init__(self, objective, A=None, relations=(), rhs=(), sense="min",
                 lower=None, upper=None, binary=None):
        c = np.asarray(objective, dtype=float).ravel()
        n = len(c)
        if A is None:
            A = sp.csr_matrix((0, n))
        A = sp.csr_matrix(A, dtype=float)
        if A.shape[1] != n:
            raise ValueError(f"constraint matrix has {A.shape[1]} columns, objective has {n}")
        m = A.shape[0]
        if isinstance(relations, str):
            relations = (relations,) * m
        relations = tuple(relations)
        rhs = np.asarray(rhs, dtype=float).ravel()
        if len(relations) != m or len(rhs) != m:
            raise ValueError("relations and rhs must have one entry per constraint")
        bad = set(relations) - set(RELATIONS)
        if bad:
            raise ValueError(f"unknown relation(s) {sorted(bad)}")
        if sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
        lo = np.zeros(n) if lower is None else np.broadcast_to(
            np.asarray(lower, dtype=float), (n,)).copy()
        hi = np.full(n, np.inf) if upper is None else np.broadcast_to(
            np.asarray(upper, dtype=float), (n,)).copy()
        if not np.all(np.isfinite(lo)):
            raise ValueError("lower bounds must be finite")
        binary = np.zeros(n, dtype=bool) if binary is None else np.broadcast_to(
            np.asarray(binary, dtype=bool), (n,)).copy()
        if np.any(binary & ((lo < 0) | (hi > 1))):
            raise ValueError("binary variables need bounds within [0, 1]")
        for arr in (c, rhs, lo, hi, binary):
            arr.setflags(write=False)
        self.objective = c
        self.A = A
        self.relations = relations
        self.rhs = rhs
        self.sense = sense
        self.lower = lo
        self.upper = hi
        self.binary = binary

    @classmethod
    def from_blocks(cls, objective, blocks, **kw):
        """Stack constraint blocks ``[(A_block, relation, rhs_block), ...]``."""
        mats, rels, rhss = [], [], []
        n = len(np.ravel(objective))
        for A, rel, b in blocks:
            A = sp.csr_matrix(A)
            if A.ndim == 1 or A.shape[1] != n:
                A = sp.csr_matrix(A.reshape(-1, n))
            b = np.broadcast_to(np.asarray(b, dtype=float), (A.shape[0],))
            mats.append(A)
            rels.extend([rel] * A.shape[0])
            rhss.append(b)
        A = sp.vstack(mats, format="csr") if mats else None
        rhs = np.concatenate(rhss) if rhss else ()
        return cls(objective, A, rels, rhs, **kw)

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @property
    def n_constraints(self) -> int:
        return self.A.shape[0]

    def with_bounds(self, lower, upper) -> "LinearProblem":
        return LinearProblem(self.objective, self.A, self.relations, self.rhs, self.sense,
                             lower, upper, self.binary)

    def relaxation(self) -> "LinearProblem":
        return LinearProblem(self.objective, self.A, self.relations, self.rhs, self.sense,
                             self.lower, self.upper, None)

    def violation(self, x) -> float:
        """Largest violation of a constraint or bound by ``x``."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        if self.n_constraints:
            ax = self.A @ x
            for rel, sel in (("<=", 1), (">=", -1)):
                idx = [i for i, r in enumerate(self.relations) if r == rel]
                if idx:
                    worst = max(worst, float(np.max(sel * (ax[idx] - self.rhs[idx]))))
            idx = [i for i, r in enumerate(self.relations) if r == "="]
            if idx:
                worst = max(worst, float(np.max(np.abs(ax[idx] - self.rhs[idx]))))
        if len(x):
            worst = max(worst, float(np.max(self.lower - x)), float(np.max(x - self.upper)))
        return max(worst, 0.0)


@dataclass
class Solution:
    status: str
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective_value: float = float("nan")
    nodes: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    def __eq__(self, other):
        return (isinstance(other, Solution) and self.status == other.status
                and np.array_equal(self.values, other.values)
                and (self.objective_value == other.objective_value
                     or (np.isnan(self.objective_value) and np.isnan(other.objective_value))))
