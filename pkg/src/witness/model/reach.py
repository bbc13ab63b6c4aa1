"""Minimal and maximal reachability probabilities by value iteration.

Graph-based precomputation fixes the states whose value is exactly 0 or 1
before iterating. After convergence the greedy scheduler is evaluated exactly
by a sparse linear solve; that value replaces the iterate when its Bellman
residual is no worse.
"""
from __future__ import annotations

import warnings
from collections import deque

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mdp import MDP

VI_TOL = 1e-10
VI_MAX_SWEEPS = 10**6


def _reverse(mdp: MDP):
    """CSC view of P: for each target state, the rows that can move there."""
    return mdp.P.tocsc()


def backward_reachable(mdp: MDP, targets, row_allowed=None, through=None, csc=None):
    """States that can reach ``targets`` along rows in ``row_allowed``.

    ``through`` restricts which states may be added by the search (targets
    are always included).
    """
    n = mdp.state_count
    csc = _reverse(mdp) if csc is None else csc
    states = mdp.index.states
    reached = np.zeros(n, dtype=bool)
    reached[list(targets)] = True
    queue = deque(np.flatnonzero(reached).tolist())
    indptr, indices = csc.indptr, csc.indices
    while queue:
        t = queue.popleft()
        for r in indices[indptr[t]:indptr[t + 1]]:
            if row_allowed is not None and not row_allowed[r]:
                continue
            s = states[r]
            if reached[s] or (through is not None and not through[s]):
                continue
            reached[s] = True
            queue.append(s)
    return reached


def forward_reachable(mdp: MDP, sources, expand=None):
    """States reachable from ``sources``; states with ``expand[s] == False``
    are reached but not expanded."""
    P, off = mdp.P, mdp.index.offsets
    reached = np.zeros(mdp.state_count, dtype=bool)
    reached[list(sources)] = True
    queue = deque(np.flatnonzero(reached).tolist())
    while queue:
        s = queue.popleft()
        if expand is not None and not expand[s]:
            continue
        for t in P.indices[P.indptr[off[s]]:P.indptr[off[s + 1]]]:
            if not reached[t]:
                reached[t] = True
                queue.append(t)
    return reached


def prob0_max(mdp: MDP, goal, csc=None):
    """Mask of states with Pr^max(reach goal) = 0."""
    return ~backward_reachable(mdp, goal, csc=csc)


def prob0_min(mdp: MDP, goal, csc=None):
    """Mask of states with Pr^min(reach goal) = 0.

    Complement of the least set containing goal and every state all of whose
    actions can move into the set.
    """
    n = mdp.state_count
    csc = _reverse(mdp) if csc is None else csc
    states = mdp.index.states
    need = np.diff(mdp.index.offsets)
    hit_rows = np.zeros(len(mdp.index), dtype=bool)
    hits = np.zeros(n, dtype=np.int64)
    pos = np.zeros(n, dtype=bool)
    pos[list(goal)] = True
    queue = deque(np.flatnonzero(pos).tolist())
    while queue:
        t = queue.popleft()
        for r in csc.indices[csc.indptr[t]:csc.indptr[t + 1]]:
            if hit_rows[r]:
                continue
            hit_rows[r] = True
            s = states[r]
            hits[s] += 1
            if not pos[s] and hits[s] == need[s]:
                pos[s] = True
                queue.append(s)
    return ~pos


def prob1_min(mdp: MDP, goal, zero_min, csc=None):
    """Mask of states with Pr^min = 1: those that cannot reach a Pr^min = 0
    state without first passing through goal."""
    goal_mask = np.zeros(mdp.state_count, dtype=bool)
    goal_mask[list(goal)] = True
    bad = backward_reachable(mdp, np.flatnonzero(zero_min), through=~goal_mask, csc=csc)
    return ~bad | goal_mask


def prob1_max(mdp: MDP, goal, csc=None):
    """Mask of states with Pr^max = 1 (nested fixed point)."""
    csc = _reverse(mdp) if csc is None else csc
    P = mdp.P
    u = backward_reachable(mdp, goal, csc=csc)
    goal = list(goal)
    while True:
        # rows whose support stays inside u
        outside = sp.csr_matrix(P[:, ~u])
        row_ok = (np.diff(outside.indptr) == 0) & u[mdp.index.states]
        new_u = backward_reachable(mdp, goal, row_allowed=row_ok, through=u, csc=csc)
        if np.array_equal(new_u, u):
            return u
        u = new_u


def _segment_first(mask, seg, nseg):
    """For each segment, the first position where ``mask`` holds."""
    idx = np.flatnonzero(mask)
    _, first = np.unique(seg[idx], return_index=True)
    out = np.full(nseg, -1, dtype=np.int64)
    out[np.unique(seg[idx])] = idx[first]
    return out


def reachability_probabilities(mdp: MDP, mode: str, goal_states, *, tol: float = VI_TOL,
                               max_sweeps: int = VI_MAX_SWEEPS) -> np.ndarray:
    """Per-state ``Pr^mode(<> goal_states)``.

    :param mode: ``"min"`` or ``"max"``
    :param goal_states: nonempty collection of state indices
    :return: vector indexed by state
    """
    if mode not in ("min", "max"):
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    goal = sorted(set(int(s) for s in goal_states))
    if not goal:
        raise ValueError("goal_states must be nonempty")
    n = mdp.state_count
    csc = _reverse(mdp)
    if mode == "min":
        zero = prob0_min(mdp, goal, csc)
        one = prob1_min(mdp, goal, zero, csc)
    else:
        zero = prob0_max(mdp, goal, csc)
        one = prob1_max(mdp, goal, csc)
    x = np.zeros(n)
    x[one] = 1.0
    maybe = ~(zero | one)
    mstates = np.flatnonzero(maybe)
    if len(mstates) == 0:
        return x

    off = mdp.index.offsets
    counts = (off[mstates + 1] - off[mstates]).astype(np.int64)
    rows = np.concatenate([np.arange(off[s], off[s + 1]) for s in mstates])
    Pm = mdp.P[rows]
    seg_off = np.concatenate([[0], np.cumsum(counts)[:-1]])
    reduce = np.minimum.reduceat if mode == "min" else np.maximum.reduceat

    for _ in range(max_sweeps):
        v = reduce(Pm @ x, seg_off)
        delta = np.max(np.abs(v - x[mstates]))
        x[mstates] = v
        if delta < tol:
            break

    polished = _policy_polish(Pm, x, mstates, maybe, counts, seg_off, reduce)
    if polished is not None:
        x = polished
    return x


def _bellman_residual(Pm, x, mstates, seg_off, reduce):
    return float(np.max(np.abs(reduce(Pm @ x, seg_off) - x[mstates])))


def _policy_polish(Pm, x, mstates, maybe, counts, seg_off, reduce):
    q = Pm @ x
    v = reduce(q, seg_off)
    seg = np.repeat(np.arange(len(mstates)), counts)
    chosen = _segment_first(q == v[seg], seg, len(mstates))
    if (chosen < 0).any():
        return None
    Ps = Pm[chosen]
    Q = Ps[:, mstates]
    fixed = ~maybe
    rhs = Ps[:, np.flatnonzero(fixed)] @ x[fixed]
    system = sp.identity(len(mstates), format="csc") - Q.tocsc()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            sol = spla.spsolve(system, rhs)
        except Exception:
            return None
    sol = np.atleast_1d(sol)
    if not np.all(np.isfinite(sol)) or sol.min() < -1e-9 or sol.max() > 1 + 1e-9:
        return None
    cand = x.copy()
    cand[mstates] = np.clip(sol, 0.0, 1.0)
    if _bellman_residual(Pm, cand, mstates, seg_off, reduce) <= _bellman_residual(
            Pm, x, mstates, seg_off, reduce):
        return cand
    return None
