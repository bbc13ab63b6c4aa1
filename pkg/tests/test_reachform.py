import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import scheduler_values
from witness.errors import ValidationError
from witness.generate import random_mdp
from witness.model import MDP, parse_model, reachability_probabilities
from witness.reachform import ReachabilityForm, mec_decomposition, quotient_mecs, reduce


def test_d1_mecs(d1):
    mecs = mec_decomposition(d1)
    assert [sorted(s) for s, _ in mecs] == [[2], [3]]


def test_cycle_mec():
    m = MDP.from_transitions(4, {
        (0, 0): [(1, 1.0)], (0, 1): [(2, 1.0)], (1, 0): [(0, 1.0)], (1, 1): [(3, 1.0)],
        (2, 0): [(2, 1.0)], (3, 0): [(3, 1.0)]})
    mecs = mec_decomposition(m)
    states = sorted(sorted(s) for s, _ in mecs)
    assert states == [[0, 1], [2], [3]]
    ((_, pairs),) = [mp for mp in mecs if len(mp[0]) == 2]
    assert pairs == {(0, 0), (1, 0)}


def test_quotient_fixed_point(d1):
    q, maps = quotient_mecs(d1, [2], [3])
    assert q.state_count == 4
    assert maps.forward == (0, 1, 2, 3)


def test_quotient_keeps_leaving_actions_and_stay():
    m = MDP.from_transitions(4, {
        (0, 0): [(1, 1.0)], (0, 1): [(2, 0.5), (3, 0.5)], (1, 0): [(0, 1.0)],
        (1, 1): [(2, 1.0)], (2, 0): [(2, 1.0)], (3, 0): [(3, 1.0)]})
    q, maps = quotient_mecs(m, [2], [3])
    c = maps.forward[0]
    assert maps.forward[1] == c
    assert q.state_count == 3
    # two leaving actions plus one action to fail
    assert len(q.index.actions_of(c)) == 3
    goal, fail = maps.forward[2], maps.forward[3]
    lo = reachability_probabilities(q, "min", [goal])[c]
    hi = reachability_probabilities(q, "max", [goal])[c]
    assert lo == 0.0 and hi == 1.0
    assert [(fail, 1.0)] in [q.transitions(c, a) for a in q.index.actions_of(c)]


def test_reduce_d1(d1_rf):
    A, b, delta = d1_rf.farkas_system()
    np.testing.assert_allclose(A.toarray(), [[1, -1, 0], [0, 1, -0.7], [0, 0, 1]])
    np.testing.assert_allclose(b, [0, 0, 1])
    np.testing.assert_allclose(delta, [1, 0, 0])
    assert d1_rf.state_count == 3 and d1_rf.pair_count == 3


def test_reduce_m1(m1_rf):
    A, b, _ = m1_rf.farkas_system()
    np.testing.assert_allclose(A.toarray(), [[1, -0.3], [1, -0.6], [0, 1]])
    np.testing.assert_allclose(b, [0, 0, 1])
    assert list(m1_rf.index) == [(0, 0), (0, 1), (1, 0)]


def test_reduce_label_errors(d1):
    with pytest.raises(ValidationError):
        reduce(d1, "nope", "goal")
    with pytest.raises(ValidationError):
        reduce(d1, "init", "nope")


def test_reduce_unreachable_goal():
    m = parse_model("3 3\n0 1 1.0\n1 1 1.0\n2 2 1.0\n", '0="init" 1="goal"\n0: 0\n2: 1\n')
    with pytest.raises(ValidationError):
        reduce(m)


def test_rf_validation_rejects_non_sinks(d1):
    with pytest.raises(ValidationError):
        ReachabilityForm(MDP.dtmc(np.array([[0, 1.0, 0], [0, 0, 1.0], [0, 1.0, 0]])))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_reduce_preserves_probabilities(seed, n):
    m = random_mdp(np.random.default_rng(seed), n, max_actions=2)
    goal = sorted(m.states_with_label("goal"))
    lo, hi = scheduler_values(m, goal)
    try:
        rf, maps = reduce(m)
    except ValidationError:
        assert hi[m.initial] == 0
        return
    s0 = rf.initial
    rlo = reachability_probabilities(rf.system, "min", [rf.goal])[s0]
    rhi = reachability_probabilities(rf.system, "max", [rf.goal])[s0]
    assert rlo == pytest.approx(lo[m.initial], abs=1e-9)
    assert rhi == pytest.approx(hi[m.initial], abs=1e-9)
    assert maps.forward[m.initial] == s0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 25))
def test_reduced_has_no_inner_end_components(seed, n):
    m = random_mdp(np.random.default_rng(seed), n)
    try:
        rf, _ = reduce(m)
    except ValidationError:
        return
    inner = [sorted(s) for s, _ in mec_decomposition(rf.system) if max(s) < rf.goal]
    assert inner == []
    # every state of S can reach goal and is reachable
    rf._check_graph()
