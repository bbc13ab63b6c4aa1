"""Seeded random models for tests and benchmarks.

All generators take a ``numpy.random.Generator``; :func:`rng` builds one
from an explicit seed or from the ``WITNESS_SEED`` environment variable.
"""
from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

from .model.mdp import MDP

SEED_ENV = "WITNESS_SEED"


def rng(seed: int | None = None) -> np.random.Generator:
    if seed is None:
        seed = int(os.environ.get(SEED_ENV, "0"))
    return np.random.default_rng(seed)


def _distribution(gen, targets):
    w = gen.random(len(targets)) + 0.05
    w /= w.sum()
    return list(zip(targets, w.tolist()))


def random_mdp(gen: np.random.Generator, states: int, max_actions: int = 3,
               max_successors: int = 3, dtmc: bool = False,
               back_prob: float | None = None) -> MDP:
    """A random MDP over ``states`` inner states plus a goal and a sink state.

    State 0 is labelled ``init`` and state ``states`` is labelled ``goal``;
    both extra states are absorbing. Every inner action picks up to
    ``max_successors`` targets among all states. With ``back_prob`` set, a
    target is drawn from the higher-numbered states except with that
    probability, which keeps end components small.
    """
    n = states + 2
    goal, sink = states, states + 1
    transitions = {}
    for s in range(states):
        k = 1 if dtmc else int(gen.integers(1, max_actions + 1))
        for a in range(k):
            m = int(gen.integers(1, max_successors + 1))
            if back_prob is None:
                picks = gen.choice(n, size=m)
            else:
                ahead = gen.integers(s + 1, n, size=m)
                anywhere = gen.integers(0, n, size=m)
                picks = np.where(gen.random(m) < back_prob, anywhere, ahead)
            targets = sorted(set(picks.tolist()))
            transitions[(s, a)] = _distribution(gen, targets)
    transitions[(goal, 0)] = [(goal, 1.0)]
    transitions[(sink, 0)] = [(sink, 1.0)]
    labels = {"init": {0}, "goal": {goal}}
    return MDP.from_transitions(n, transitions, 0, labels, is_dtmc=dtmc)


def random_labels(gen: np.random.Generator, mdp: MDP, count: int, prefix: str = "l",
                  coverage: float = 0.8) -> MDP:
    """Copy of ``mdp`` where each non-goal state gets one or two of ``count``
    random labels with probability ``coverage``."""
    names = [f"{prefix}{i}" for i in range(count)]
    labels = {k: set(v) for k, v in mdp.labels.items()}
    for name in names:
        labels.setdefault(name, set())
    goal = mdp.states_with_label("goal")
    for s in range(mdp.state_count):
        if s in goal or gen.random() > coverage:
            continue
        for name in gen.choice(names, size=int(gen.integers(1, 3))).tolist():
            labels[name].add(s)
    return MDP(mdp.P, mdp.index, mdp.initial, labels, mdp.is_dtmc)


def layered_dtmc(gen: np.random.Generator, layers: int, width: int, extra: int = 2,
                 exit_prob: float = 0.01) -> MDP:
    """A DTMC of ``layers`` layers of ``width`` states each.

    The initial state moves uniformly into the first layer. State ``i`` of a
    layer moves to state ``i`` of the next layer and to ``extra`` random
    states there, and reaches goal or fail directly with ``exit_prob`` each.
    The last layer moves to goal or fail. Total: ``layers * width + 3``
    states.
    """
    inner = layers * width
    init, goal, fail = 0, inner + 1, inner + 2
    n = inner + 3
    rows, cols, vals = [], [], []

    def add(s, t, p):
        rows.append(s)
        cols.append(t)
        vals.append(p)

    for i in range(width):
        add(init, 1 + i, 1.0 / width)
    rest = 1.0 - 2 * exit_prob
    for k in range(layers):
        for i in range(width):
            s = 1 + k * width + i
            if k == layers - 1:
                p = float(gen.uniform(0.3, 0.9))
                add(s, goal, p)
                add(s, fail, 1.0 - p)
                continue
            nxt = 1 + (k + 1) * width
            succ = {i: 1.0}
            for j in gen.integers(0, width, size=extra).tolist():
                succ[j] = succ.get(j, 0.0) + float(gen.random())
            total = sum(succ.values())
            for j, w in succ.items():
                add(s, nxt + j, rest * w / total)
            add(s, goal, exit_prob)
            add(s, fail, exit_prob)
    add(goal, goal, 1.0)
    add(fail, fail, 1.0)
    P = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return MDP.dtmc(P, init, {"init": {init}, "goal": {goal}})
