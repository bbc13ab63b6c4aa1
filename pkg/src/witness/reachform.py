"""Reachability form: a model with one initial state, one absorbing goal and
one absorbing fail state, no other end components, and every state both
reachable and able to reach goal. Also assembles the Farkas system.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import ValidationError
from .model.mdp import MDP, StateActionIndex
from .model.reach import backward_reachable, forward_reachable


@dataclass(frozen=True)
class StateMaps:
    """Correspondence between the states of two models.

    ``forward[s]`` is the image of original state ``s`` (``None`` when it was
    removed); ``backward[t]`` is the set of original states merged into ``t``.
    """

    forward: tuple
    backward: tuple


def mec_decomposition(mdp: MDP):
    """Maximal end components as ``(states, pairs)`` tuples of frozensets.

    Iterated SCC refinement: drop every action that can leave its SCC, drop
    states left without actions, recompute SCCs, until stable. Ordered by
    smallest state.
    """
    n = mdp.state_count
    P = mdp.P.tocoo()
    row_of_nz, col_of_nz = P.row, P.col
    states_of_row = mdp.index.states
    src_of_nz = states_of_row[row_of_nz]
    row_alive = np.ones(len(mdp.index), dtype=bool)
    while True:
        alive_nz = row_alive[row_of_nz]
        adj = sp.csr_matrix(
            (np.ones(int(alive_nz.sum())), (src_of_nz[alive_nz], col_of_nz[alive_nz])),
            shape=(n, n))
        _, comp = connected_components(adj, directed=True, connection="strong")
        state_alive = np.bincount(states_of_row[row_alive], minlength=n) > 0
        comp = np.where(state_alive, comp, -1)
        leaving = (comp[src_of_nz] != comp[col_of_nz]) | (comp[col_of_nz] < 0)
        bad_rows = np.zeros(len(mdp.index), dtype=bool)
        bad_rows[row_of_nz[leaving]] = True
        new_alive = row_alive & ~bad_rows
        if np.array_equal(new_alive, row_alive):
            break
        row_alive = new_alive
    state_alive = np.bincount(states_of_row[row_alive], minlength=n) > 0
    groups: dict[int, list[int]] = {}
    for s in np.flatnonzero(state_alive):
        groups.setdefault(int(comp[s]), []).append(int(s))
    mecs = []
    for members in sorted(groups.values()):
        mset = frozenset(members)
        pairs = frozenset(
            mdp.index[r] for s in members for r in mdp.index.rows_of(s) if row_alive[r])
        mecs.append((mset, pairs))
    return mecs


def quotient_mecs(mdp: MDP, goal_states, fail_states):
    """Collapse maximal end components.

    An MEC touching neither goal nor fail becomes a single state whose actions
    are the MEC-leaving actions (renumbered 0, 1, ... by original state and
    action) plus one final action moving to fail with probability 1, which
    stands for staying inside the component forever. An MEC touching goal
    (fail) becomes one absorbing goal (fail) state. If ``fail_states`` is
    empty and some MEC needs a fail target, a fresh absorbing fail state is
    appended.

    :return: ``(quotient, maps)``
    :raises ValidationError: if an MEC contains both goal and fail states
    """
    goal_set = set(int(s) for s in goal_states)
    fail_set = set(int(s) for s in fail_states)
    if goal_set & fail_set:
        raise ValidationError("goal and fail states overlap")
    n = mdp.state_count
    cls = np.arange(n)
    kind = {}
    for states, pairs in mec_decomposition(mdp):
        g, f = states & goal_set, states & fail_set
        if g and f:
            raise ValidationError(
                f"end component {sorted(states)} contains goal and fail states")
        rep = min(states)
        for s in states:
            cls[s] = rep
        if g:
            kind[rep] = ("goal", states, pairs)
        elif f:
            kind[rep] = ("fail", states, pairs)
        else:
            kind[rep] = ("mec", states, pairs)

    reps = sorted(set(int(c) for c in cls))
    new_of_rep = {r: i for i, r in enumerate(reps)}
    need_fresh_fail = not fail_set and any(k[0] == "mec" for k in kind.values())
    m = len(reps) + (1 if need_fresh_fail else 0)
    fail_target = m - 1 if need_fresh_fail else new_of_rep[int(cls[min(fail_set)])] if fail_set else None
    fwd = np.array([new_of_rep[int(c)] for c in cls], dtype=np.int64)

    transitions = {}

    def remap(row):
        out = {}
        for t, p in mdp.row_transitions(row):
            nt = int(fwd[t])
            out[nt] = out.get(nt, 0.0) + p
        return list(out.items())

    for r in reps:
        ns = new_of_rep[r]
        if r not in kind:
            for row in mdp.index.rows_of(r):
                transitions[(ns, int(mdp.index.actions[row]))] = remap(row)
            continue
        k, states, pairs = kind[r]
        if k in ("goal", "fail"):
            transitions[(ns, 0)] = [(ns, 1.0)]
            continue
        aid = 0
        for s in sorted(states):
            for row in mdp.index.rows_of(s):
                if mdp.index[row] in pairs:
                    continue
                transitions[(ns, aid)] = remap(row)
                aid += 1
        transitions[(ns, aid)] = [(fail_target, 1.0)]
    if need_fresh_fail:
        transitions[(m - 1, 0)] = [(m - 1, 1.0)]

    labels = {}
    for name, states in mdp.labels.items():
        labels[name] = {int(fwd[s]) for s in states}
    back = [set() for _ in range(m)]
    for s in range(n):
        back[fwd[s]].add(s)
    maps = StateMaps(tuple(int(x) for x in fwd), tuple(frozenset(b) for b in back))
    quotient = MDP.from_transitions(m, transitions, int(fwd[mdp.initial]), labels,
                                    is_dtmc=mdp.is_dtmc and len(transitions) == m)
    return quotient, maps


class ReachabilityForm:
    """A model in reachability form together with its Farkas system.

    States ``0 .. n-1`` form ``S``; state ``n`` is goal and ``n + 1`` is fail,
    both absorbing. ``matrix_A`` has one row per enabled pair of ``S`` and
    one column per state of ``S``::

        A((s,a), t) = [s == t] - P(s, a, t)        b(s, a) = P(s, a, goal)
    """

    def __init__(self, system: MDP, initial: int | None = None, validate: bool = True):
        n_all = system.state_count
        if n_all < 2:
            raise ValidationError("a reachability form needs goal and fail states")
        n = n_all - 2
        self.system = system
        self.initial = int(system.initial if initial is None else initial)
        self.goal = n
        self.fail = n + 1
        for sink in (self.goal, self.fail):
            acts = system.index.actions_of(sink)
            if len(acts) != 1 or system.transitions(sink, acts[0]) != [(sink, 1.0)]:
                raise ValidationError(f"state {sink} must be absorbing")
        if not 0 <= self.initial < n:
            raise ValidationError("initial state must lie in S")
        m = int(system.index.offsets[n])
        self.index = StateActionIndex(system.index.pairs[:m], n)
        P = system.P
        Ps = P[:m]
        eye = sp.csr_matrix((np.ones(m), (np.arange(m), self.index.states)), shape=(m, n))
        self.matrix_A = sp.csr_matrix(eye - Ps[:, :n])
        self.matrix_A.eliminate_zeros()
        self.to_goal = Ps[:, [self.goal]].toarray().ravel()
        self.to_goal.setflags(write=False)
        if validate:
            self._check_graph()

    @property
    def state_count(self) -> int:
        """``|S|``, excluding goal and fail."""
        return self.goal

    @property
    def pair_count(self) -> int:
        return len(self.index)

    def initial_vector(self) -> np.ndarray:
        d = np.zeros(self.state_count)
        d[self.initial] = 1.0
        return d

    def farkas_system(self):
        """``(A, b, delta_initial)``."""
        return self.matrix_A, self.to_goal, self.initial_vector()

    def _check_graph(self):
        n = self.state_count
        expand = np.ones(n + 2, dtype=bool)
        expand[[self.goal, self.fail]] = False
        fwd = forward_reachable(self.system, [self.initial], expand)
        bwd = backward_reachable(self.system, [self.goal])
        bad = np.flatnonzero(~(fwd[:n] & bwd[:n]))
        if len(bad):
            raise ValidationError(
                f"state {int(bad[0])} is unreachable from the initial state or cannot reach goal")

    def __repr__(self):
        return (f"ReachabilityForm(states={self.state_count}, pairs={self.pair_count}, "
                f"initial={self.initial})")


def reduce(mdp: MDP, init_label: str = "init", goal_label: str = "goal"):
    """Bring ``mdp`` into reachability form.

    Goal-labelled states keep their place in ``S`` with a single action into
    a fresh goal state. States that cannot reach goal are replaced by a fresh
    fail state, end components are collapsed (see :func:`quotient_mecs`), and
    states unreachable from the initial state are dropped. Retained states
    keep their relative order; goal and fail come last.

    :return: ``(rf, maps)`` where ``maps`` relates original and reduced states
    :raises ValidationError: if ``init_label`` does not mark exactly one state,
        ``goal_label`` marks none, or goal is unreachable
    """
    inits = mdp.states_with_label(init_label)
    if len(inits) != 1:
        raise ValidationError(
            f"label {init_label!r} must mark exactly one state, marks {len(inits)}")
    (init,) = inits
    goal = sorted(mdp.states_with_label(goal_label))
    if not goal:
        raise ValidationError(f"label {goal_label!r} marks no state")
    n = mdp.state_count
    goal_mask = np.zeros(n, dtype=bool)
    goal_mask[goal] = True
    can_reach = backward_reachable(mdp, goal, through=~goal_mask) | goal_mask
    if not can_reach[init]:
        raise ValidationError("goal is unreachable from the initial state")

    # goal states absorbing, non-goal-reaching states absorbing, fresh fail
    F = n
    transitions = {}
    for s in range(n):
        if goal_mask[s] or not can_reach[s]:
            transitions[(s, 0)] = [(s, 1.0)]
            continue
        for row in mdp.index.rows_of(s):
            succ = {}
            for t, p in mdp.row_transitions(row):
                t = t if can_reach[t] else F
                succ[t] = succ.get(t, 0.0) + p
            transitions[(s, int(mdp.index.actions[row]))] = list(succ.items())
    transitions[(F, 0)] = [(F, 1.0)]
    work = MDP.from_transitions(n + 1, transitions, init, mdp.labels, is_dtmc=mdp.is_dtmc)
    fail_states = [F] + [int(s) for s in np.flatnonzero(~can_reach)]
    quot, qmaps = quotient_mecs(work, goal, fail_states)

    qn = quot.state_count
    qgoal = np.zeros(qn, dtype=bool)
    qgoal[[qmaps.forward[g] for g in goal]] = True
    qfail = np.zeros(qn, dtype=bool)
    qfail[[qmaps.forward[f] for f in fail_states]] = True
    q_init = qmaps.forward[init]
    reached = forward_reachable(quot, [q_init], expand=~(qgoal | qfail))
    keep = np.flatnonzero(reached & ~qfail)
    k = len(keep)
    new_of = np.full(qn, k + 1, dtype=np.int64)  # default: fail
    new_of[keep] = np.arange(k)
    goal_new, fail_new = k, k + 1

    rf_trans = {}
    for q in keep:
        s = int(new_of[q])
        if qgoal[q]:
            rf_trans[(s, 0)] = [(goal_new, 1.0)]
            continue
        for row in quot.index.rows_of(q):
            succ = {}
            for t, p in quot.row_transitions(row):
                nt = int(new_of[t])
                succ[nt] = succ.get(nt, 0.0) + p
            rf_trans[(s, int(quot.index.actions[row]))] = list(succ.items())
    rf_trans[(goal_new, 0)] = [(goal_new, 1.0)]
    rf_trans[(fail_new, 0)] = [(fail_new, 1.0)]

    labels = {}
    for name, states in mdp.labels.items():
        mapped = {int(new_of[qmaps.forward[s]]) for s in states
                  if reached[qmaps.forward[s]] and not qfail[qmaps.forward[s]]}
        labels[name] = mapped
    labels["init"] = {int(new_of[q_init])}
    labels["rf_target"] = {goal_new}
    labels["rf_fail"] = {fail_new}
    system = MDP.from_transitions(k + 2, rf_trans, int(new_of[q_init]), labels,
                                  is_dtmc=mdp.is_dtmc and len(rf_trans) == k + 2)

    fwd = []
    for s in range(n):
        q = qmaps.forward[s]
        fwd.append(int(new_of[q]) if reached[q] and not qfail[q] else None)
    back = [set() for _ in range(k + 2)]
    for s, t in enumerate(fwd):
        if t is not None:
            back[t].add(s)
    maps = StateMaps(tuple(fwd), tuple(frozenset(b) for b in back))
    return ReachabilityForm(system), maps
