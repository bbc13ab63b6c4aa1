"""Subsystems induced by lower-bound certificates, and witness checking."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..certify import STATE_VECTOR, Certificate, PropertyQuery, farkas_blocks
from ..errors import KindMismatch, SolverError, Unsatisfied
from ..lpsolver import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, LinearProblem, solve_lp
from ..model.mdp import MDP, StateActionIndex
from ..model.reach import reachability_probabilities
from ..reachform import ReachabilityForm
from .labels import LabelMap

WITNESS_TOL = 1e-7
INITIAL_OBJECTIVES = ("AO", "InvF", "InvP")


@dataclass(frozen=True)
class QSConfig:
    """Settings of the quotient-sum heuristic.

    :param iterations: number of LPs solved
    :param initial_objective: ``"AO"``, ``"InvF"`` or ``"InvP"``
    :param big: value assigned to entries at or below ``cutoff`` when inverting
    :param cutoff: entries above it count as nonzero
    """

    iterations: int = 3
    initial_objective: str = "AO"
    big: float = 1e8
    cutoff: float = 1e-8
    backend: str = "auto"

    def __post_init__(self):
        if int(self.iterations) < 1:
            raise ValueError("iterations must be positive")
        names = {k.lower(): k for k in INITIAL_OBJECTIVES}
        kind = names.get(str(self.initial_objective).lower())
        if kind is None:
            raise ValueError(f"unknown initial objective {self.initial_objective!r}")
        object.__setattr__(self, "initial_objective", kind)
        if self.big < 1:
            raise ValueError("big constant must be at least 1")
        if self.cutoff <= 0:
            raise ValueError("cutoff must be positive")


@dataclass
class SubsystemResult:
    """A witnessing subsystem.

    ``state_mask`` holds the retained states of ``S``; goal and fail are always
    part of ``subsystem``, which keeps the state numbering of the
    reachability form. ``objective_value`` counts retained states, or the
    labels present on them in label mode. ``optimal`` is False only for
    exact runs stopped at a solver limit.
    """

    state_mask: frozenset
    subsystem: MDP
    certificate: Certificate
    objective_value: int
    iteration: int
    optimal: bool = True

    @property
    def states(self) -> int:
        return len(self.state_mask)

    def summary(self) -> str:
        return f"states={self.states} value={self.objective_value} iteration={self.iteration}"


def lower_query(mode: str, lam: float) -> PropertyQuery:
    return PropertyQuery(mode, ">=", lam)


def build_subsystem(rf: ReachabilityForm, mask) -> MDP:
    """Keep the states of ``mask`` with all their actions; every edge into a
    dropped state of ``S`` goes to fail, and dropped states move to fail."""
    sys_ = rf.system
    n, N = rf.state_count, rf.state_count + 2
    keep = np.zeros(N, dtype=bool)
    keep[list(mask)] = True
    keep[[rf.goal, rf.fail]] = True
    col = np.arange(N)
    col[:n][~keep[:n]] = rf.fail
    R = sp.csr_matrix((np.ones(N), (np.arange(N), col)), shape=(N, N))

    idx = sys_.index
    src = np.flatnonzero(keep[idx.states])
    dropped = np.flatnonzero(~keep)
    states = np.concatenate([idx.states[src], dropped])
    actions = np.concatenate([idx.actions[src], np.zeros(len(dropped), dtype=idx.actions.dtype)])
    kept_rows = sys_.P[src] @ R
    fail_rows = sp.csr_matrix((np.ones(len(dropped)), (np.arange(len(dropped)),
                               np.full(len(dropped), rf.fail))), shape=(len(dropped), N))
    order = np.lexsort((actions, states))
    matrix = sp.vstack([kept_rows, fail_rows], format="csr")[order]
    index = StateActionIndex(zip(states[order].tolist(), actions[order].tolist()), N)
    return MDP(matrix, index, rf.initial, sys_.labels, sys_.is_dtmc)


def support(rf: ReachabilityForm, cert: Certificate, cutoff: float) -> np.ndarray:
    """Boolean mask over ``S`` of entries above ``cutoff``."""
    v = cert.values
    if cert.kind == STATE_VECTOR:
        return v > cutoff
    return np.maximum.reduceat(v > cutoff, rf.index.offsets[:-1]).astype(bool)


def certificate_to_subsystem(rf: ReachabilityForm, cert: Certificate, cutoff: float = 1e-8,
                             labels: LabelMap | None = None, active_labels=None,
                             iteration: int = 0) -> SubsystemResult:
    """Subsystem on the support of a lower-bound certificate.

    The initial state is always kept when the threshold is positive. With
    ``active_labels`` every state whose labels are all active is kept too.

    :raises KindMismatch: for upper-bound certificates
    """
    if not cert.query.lower_bound:
        raise KindMismatch("subsystems are only induced by lower-bound certificates")
    mask = support(rf, cert, cutoff)
    if cert.query.threshold > 0:
        mask[rf.initial] = True
    states = set(np.flatnonzero(mask).tolist())
    if labels is not None and active_labels is not None:
        states |= labels.induced_states(active_labels)
    states = frozenset(states)
    value = len(labels.present(states)) if labels is not None else len(states)
    return SubsystemResult(states, build_subsystem(rf, states), cert, value, iteration)


def check_witness(result: SubsystemResult, mode: str, lam: float) -> bool:
    """``Pr^mode`` of reaching goal in the subsystem is at least ``lam`` (up to 1e-7)."""
    sub = result.subsystem
    goal = sub.state_count - 2
    value = reachability_probabilities(sub, mode, [goal])[sub.initial]
    return bool(value >= lam - WITNESS_TOL)


def verified_subsystem(rf, cert, mode, cutoff, labels=None, active_labels=None,
                       iteration=0) -> SubsystemResult:
    """:func:`certificate_to_subsystem` followed by :func:`check_witness`;
    retries with a zero cutoff before giving up."""
    lam = cert.query.threshold
    for c in (cutoff, 0.0):
        res = certificate_to_subsystem(rf, cert, c, labels, active_labels, iteration)
        if check_witness(res, mode, lam):
            return res
    raise SolverError("certificate support does not induce a witnessing subsystem")


def coupling_block(rf: ReachabilityForm, mode: str, labels: LabelMap, K: float):
    """Rows ``x_i - w * sigma(l) <= 0`` tying certificate entries to labels."""
    nx = rf.state_count if mode == "min" else rf.pair_count
    L = len(labels)
    rows, cols, vals = [], [], []
    r = 0
    for s in range(rf.state_count):
        ls = sorted(labels.index_of(l) for l in labels.labels_of(s))
        if not ls:
            continue
        entries = [s] if mode == "min" else list(rf.index.rows_of(s))
        for i in entries:
            for j in ls:
                rows += [r, r]
                cols += [i, nx + j]
                vals += [1.0, -K]
                r += 1
    return sp.csr_matrix((vals, (rows, cols)), shape=(r, nx + L))


def padded_blocks(rf, mode, lam, extra: int):
    blocks = []
    for A, rel, b in farkas_blocks(rf, lower_query(mode, lam)):
        A = sp.hstack([A, sp.csr_matrix((A.shape[0], extra))], format="csr")
        blocks.append((A, rel, b))
    return blocks


def compute_K(rf: ReachabilityForm, lam: float, backend: str = "auto") -> float:
    """Maximal entry sum over ``P^max(lam)``; bounds every entry of any
    max-mode lower-bound certificate.

    :raises Unsatisfied: if the polytope is empty
    """
    m = rf.pair_count
    problem = LinearProblem.from_blocks(np.ones(m), farkas_blocks(rf, lower_query("max", lam)),
                                        sense="max")
    sol = solve_lp(problem, backend)
    if sol.status == INFEASIBLE:
        raise Unsatisfied()
    if sol.status != OPTIMAL:
        raise SolverError(f"K computation ended with status {sol.status}", sol)
    return float(sol.objective_value)


def lp_or_raise(problem, backend, solver=solve_lp):
    sol = solver(problem, backend)
    if sol.status == INFEASIBLE:
        raise Unsatisfied()
    if sol.status == ITERATION_LIMIT:
        raise SolverError("solver limit reached", sol)
    if sol.status != OPTIMAL:
        raise SolverError(f"unexpected solver status {sol.status}", sol)
    return sol
