"""The quotient-sum heuristic.

Each iteration minimizes a weighted sum of certificate entries (or label
indicators) over the lower-bound certificate polytope. Weights start from an
initial objective and are then replaced by ``1 / value`` for entries above
the cutoff and by a big constant otherwise, which pushes entries that are
already small towards zero.
"""
from __future__ import annotations

import numpy as np

from ..certify import PAIR_VECTOR, Certificate, farkas_blocks
from ..errors import ModeMismatch
from ..lpsolver import LinearProblem
from .core import (QSConfig, compute_K, coupling_block, lower_query, lp_or_raise,
                   padded_blocks, verified_subsystem)
from .labels import LabelMap


def invert(values, cutoff: float = 1e-8, big: float = 1e8) -> np.ndarray:
    """Pointwise ``1 / v`` where ``v > cutoff`` and ``big`` elsewhere."""
    v = np.asarray(values, dtype=float)
    out = np.full(v.shape, float(big))
    pos = v > cutoff
    out[pos] = 1.0 / v[pos]
    return out


def initial_objective(rf, kind: str, mode: str, config: QSConfig | None = None) -> np.ndarray:
    """Starting weights of the heuristic.

    ``AO`` is all ones, over states for min and over pairs for max. ``InvF``
    (max only) inverts a maximizer of ``y b`` over ``P^max(0)``, the expected
    visit counts of pairs; ``InvP`` (min only) inverts a maximizer of the
    entry sum over ``P^min(0)``, the minimal reach probabilities.

    :raises ModeMismatch: for ``InvF`` with min or ``InvP`` with max
    """
    cfg = config or QSConfig()
    kind = QSConfig(initial_objective=kind).initial_objective
    if mode not in ("min", "max"):
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    n = rf.state_count if mode == "min" else rf.pair_count
    if kind == "AO":
        return np.ones(n)
    if (kind, mode) not in (("InvF", "max"), ("InvP", "min")):
        raise ModeMismatch(f"{kind} is not available in {mode} mode")
    blocks = farkas_blocks(rf, lower_query(mode, 0.0))
    if kind == "InvF":
        c = np.asarray(rf.to_goal, dtype=float)
    else:
        c = np.ones(n)
    sol = lp_or_raise(LinearProblem.from_blocks(c, blocks, sense="max"), cfg.backend)
    return invert(sol.values, cfg.cutoff, cfg.big)


def qs_heuristic(rf, mode: str, lam: float, config: QSConfig | None = None,
                 labels: LabelMap | None = None):
    """Run the heuristic; returns an iterator of verified SubsystemResults.

    The first LP is solved before returning, so an unsatisfied property
    raises here rather than on first iteration. Later iterations are solved
    on demand.

    :param labels: minimize present labels instead of states; only the
        ``AO`` start is supported then
    :raises Unsatisfied: if ``Pr^mode >= lam`` does not hold
    """
    cfg = config or QSConfig()
    query = lower_query(mode, lam)
    nx = rf.state_count if mode == "min" else rf.pair_count
    if labels is None:
        blocks = farkas_blocks(rf, query)
        upper = None
        weights = initial_objective(rf, cfg.initial_objective, mode, cfg)
        nw = nx
    else:
        if cfg.initial_objective != "AO":
            raise ModeMismatch("label minimization starts from the AO objective only")
        L = len(labels)
        K = 1.0 if mode == "min" else compute_K(rf, lam, cfg.backend)
        blocks = padded_blocks(rf, mode, lam, L)
        blocks.append((coupling_block(rf, mode, labels, K), "<=", 0.0))
        upper = np.concatenate([np.full(nx, np.inf), np.ones(L)])
        weights = np.ones(L)
        nw = L

    def solve(w):
        c = w if labels is None else np.concatenate([np.zeros(nx), w])
        problem = LinearProblem.from_blocks(c, blocks, upper=upper)
        return lp_or_raise(problem, cfg.backend)

    first = solve(weights)
    return _iterate(rf, mode, cfg, labels, query, nx, nw, solve, first)


def _iterate(rf, mode, cfg, labels, query, nx, nw, solve, sol):
    it = 1
    while True:
        x = sol.values[:nx]
        minimized = sol.values[-nw:] if labels is not None else x
        if query.kind == PAIR_VECTOR:
            x = np.maximum(x, 0.0)
        cert = Certificate(query.kind, x, query)
        active = None
        if labels is not None:
            active = [l for l, v in zip(labels.labels, minimized) if v > cfg.cutoff]
        yield verified_subsystem(rf, cert, mode, cfg.cutoff, labels, active, it)
        if it == cfg.iterations:
            return
        sol = solve(invert(minimized, cfg.cutoff, cfg.big))
        it += 1
