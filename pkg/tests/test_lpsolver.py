import itertools

import numpy as np
import pytest
import scipy.optimize as so
from hypothesis import given, settings, strategies as st

from witness.lpsolver import (INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LinearProblem,
                              export_lp_format, solve_lp, solve_milp)
from witness.lpsolver.bnb import branch_and_bound
from witness.lpsolver.highs import solve_highs_lp
from witness.lpsolver.simplex import solve_simplex


def one_var():
    return LinearProblem([1.0], [[1.0]], "<=", [0.6], sense="max")


def test_one_variable():
    sol = solve_lp(one_var(), "simplex")
    assert sol.status == OPTIMAL
    assert sol.values[0] == pytest.approx(0.6)


def test_d1_farkas_lp(d1_rf):
    A, b, delta = d1_rf.farkas_system()
    p = LinearProblem.from_blocks([1.0, 1.0, 0.0], [(A, "<=", b), (delta, ">=", 0.7)])
    sol = solve_lp(p, "simplex")
    assert sol.status == OPTIMAL
    np.testing.assert_allclose(sol.values, [0.7, 0.7, 1.0], atol=1e-12)
    assert sol.objective_value == pytest.approx(1.4)


def test_infeasible():
    p = LinearProblem([0.0], [[1.0], [1.0]], [">=", "<="], [1.0, 0.0])
    assert solve_lp(p, "simplex").status == INFEASIBLE


def test_unbounded():
    p = LinearProblem([1.0, 1.0], [[1.0, -1.0]], "<=", [1.0], sense="max")
    assert solve_lp(p, "simplex").status == UNBOUNDED


def test_iteration_limit():
    p = LinearProblem([1.0, 1.0], [[1.0, 2.0], [3.0, 1.0]], "<=", [4.0, 6.0], sense="max")
    assert solve_simplex(p, max_pivots=1).status == ITERATION_LIMIT


def test_equality_bounds_and_fixed():
    p = LinearProblem([1.0, 2.0, -1.0], [[1.0, 1.0, 1.0]], "=", [3.0], sense="min",
                      lower=[0.0, 0.5, 0.0], upper=[np.inf, 0.5, 2.0])
    sol = solve_lp(p, "simplex")
    assert sol.status == OPTIMAL
    np.testing.assert_allclose(sol.values, [0.5, 0.5, 2.0], atol=1e-12)


def test_degenerate_cycling_example():
    # Beale's LP cycles under the textbook rule without anti-cycling
    c = [-0.75, 150.0, -0.02, 6.0]
    A = [[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]]
    p = LinearProblem(c, A, "<=", [0.0, 0.0, 1.0])
    sol = solve_lp(p, "simplex")
    assert sol.status == OPTIMAL
    assert sol.objective_value == pytest.approx(-0.05)


def test_deterministic(d1_rf):
    A, b, delta = d1_rf.farkas_system()
    p = LinearProblem.from_blocks(np.zeros(3), [(A, "<=", b), (delta, ">=", 0.7)])
    assert solve_lp(p, "simplex") == solve_lp(p, "simplex")


def random_lp(gen, m, n):
    A = gen.normal(size=(m, n)).round(3)
    x0 = gen.random(n)
    rel = gen.choice(["<=", ">=", "="], size=m, p=[0.45, 0.45, 0.1])
    b = A @ x0
    b = np.where(rel == "<=", b + gen.random(m), np.where(rel == ">=", b - gen.random(m), b))
    c = gen.normal(size=n).round(3)
    upper = np.where(gen.random(n) < 0.3, x0 + gen.random(n), np.inf)
    return LinearProblem(c, A, list(rel), b, sense=str(gen.choice(["min", "max"])),
                         upper=upper)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 8), st.integers(1, 8))
def test_simplex_agrees_with_highs(seed, m, n):
    p = random_lp(np.random.default_rng(seed), m, n)
    ours, ref = solve_simplex(p), solve_highs_lp(p)
    assert ours.status == ref.status
    if ref.status == OPTIMAL:
        assert ours.objective_value == pytest.approx(ref.objective_value, abs=1e-7)
        assert p.violation(ours.values) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 7), st.integers(1, 7))
def test_lp_duality(seed, m, n):
    # primal: min c x, A x >= b, x >= 0; dual: max b y, A^T y <= c, y >= 0
    gen = np.random.default_rng(seed)
    A = gen.random((m, n)).round(3) + 0.01
    b = gen.random(m).round(3)
    c = gen.random(n).round(3) + 0.01
    primal = solve_lp(LinearProblem(c, A, ">=", b), "simplex")
    dual = solve_lp(LinearProblem(b, A.T, "<=", c, sense="max"), "simplex")
    assert primal.status == dual.status == OPTIMAL
    assert primal.objective_value == pytest.approx(dual.objective_value, abs=1e-7)


def test_milp_set_cover():
    p = LinearProblem([1.0, 1.0], [[1.0, 1.0]], ">=", [1.0], upper=1.0, binary=True)
    sol = solve_milp(p, "simplex")
    assert sol.status == OPTIMAL
    assert sol.objective_value == 1.0


def test_milp_root_infeasible():
    p = LinearProblem([1.0], [[1.0]], ">=", [2.0], upper=1.0, binary=True)
    assert solve_milp(p, "simplex").status == INFEASIBLE


def test_milp_d1_state_minimization(d1_rf):
    A, b, delta = d1_rf.farkas_system()
    n = d1_rf.state_count
    Z = np.zeros((3, n))
    couple = np.hstack([np.eye(n), -np.eye(n)])
    p = LinearProblem.from_blocks(
        np.concatenate([np.zeros(n), np.ones(n)]),
        [(np.hstack([A.toarray(), Z]), "<=", b), (np.concatenate([delta, np.zeros(n)]), ">=", 0.7),
         (couple, "<=", 0.0)],
        upper=np.concatenate([np.full(n, np.inf), np.ones(n)]),
        binary=np.concatenate([np.zeros(n, bool), np.ones(n, bool)]))
    sol = solve_milp(p, "simplex")
    # S = {s0, s1, g_old}: every state is needed
    assert sol.objective_value == pytest.approx(3.0)


def test_milp_node_limit_returns_incumbent():
    gen = np.random.default_rng(3)
    w = gen.integers(5, 40, size=10).astype(float)
    v = gen.integers(5, 40, size=10).astype(float)
    p = LinearProblem(v, [w], "<=", [w.sum() / 2], sense="max", upper=1.0, binary=True)
    sol = branch_and_bound(p, solve_simplex, max_nodes=2)
    assert sol.status == ITERATION_LIMIT


def brute_force_milp(p):
    bins = np.flatnonzero(p.binary)
    best = None
    for assign in itertools.product([0.0, 1.0], repeat=len(bins)):
        lo, hi = p.lower.copy(), p.upper.copy()
        lo[bins] = hi[bins] = assign
        cont = ~p.binary
        if not cont.any():
            x = lo
            if p.violation(x) > 1e-9:
                continue
            val = float(p.objective @ x)
        else:
            sign = 1.0 if p.sense == "min" else -1.0
            ub = [(l, None if np.isinf(h) else h) for l, h in zip(lo, hi)]
            A = p.A.toarray()
            rel = np.array(p.relations)
            le = rel == "<="
            ge = rel == ">="
            eq = rel == "="
            A_ub = np.vstack([A[le], -A[ge]])
            b_ub = np.concatenate([p.rhs[le], -p.rhs[ge]])
            r = so.linprog(sign * p.objective, A_ub=A_ub if len(A_ub) else None,
                           b_ub=b_ub if len(b_ub) else None,
                           A_eq=A[eq] if eq.any() else None, b_eq=p.rhs[eq] if eq.any() else None,
                           bounds=ub, method="highs")
            if r.status != 0:
                continue
            val = float(p.objective @ r.x)
        if best is None or (val < best if p.sense == "min" else val > best):
            best = val
    return best


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12), st.integers(1, 5))
def test_milp_pure_binary_brute_force(seed, k, m):
    gen = np.random.default_rng(seed)
    A = gen.integers(-3, 6, size=(m, k)).astype(float)
    b = gen.integers(0, 3 * k, size=m).astype(float)
    c = gen.integers(-5, 10, size=k).astype(float)
    p = LinearProblem(c, A, "<=", b, sense=str(gen.choice(["min", "max"])), upper=1.0,
                      binary=True)
    sol = solve_milp(p, "simplex")
    ref = brute_force_milp(p)
    if ref is None:
        assert sol.status == INFEASIBLE
    else:
        assert sol.status == OPTIMAL
        assert sol.objective_value == pytest.approx(ref, abs=1e-7)
        assert np.all(np.abs(sol.values - np.round(sol.values)) <= 1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 4))
def test_milp_mixed_brute_force(seed, k, nc):
    gen = np.random.default_rng(seed)
    n = k + nc
    m = int(gen.integers(1, 5))
    A = gen.normal(size=(m, n)).round(2)
    b = gen.random(m).round(2) + 0.5
    c = gen.normal(size=n).round(2)
    binary = np.zeros(n, bool)
    binary[:k] = True
    upper = np.where(binary, 1.0, 3.0)
    p = LinearProblem(c, A, "<=", b, upper=upper, binary=binary)
    sol = solve_milp(p, "simplex")
    ref = brute_force_milp(p)
    if ref is None:
        assert sol.status == INFEASIBLE
    else:
        assert sol.objective_value == pytest.approx(ref, abs=1e-7)


def test_highs_milp_matches_bnb():
    gen = np.random.default_rng(11)
    for _ in range(20):
        A = gen.integers(-3, 6, size=(3, 8)).astype(float)
        p = LinearProblem(gen.integers(-5, 10, size=8).astype(float), A, "<=",
                          gen.integers(0, 20, size=3).astype(float), upper=1.0, binary=True)
        a, h = solve_milp(p, "simplex"), solve_milp(p, "highs")
        assert a.status == h.status
        if a.status == OPTIMAL:
            assert a.objective_value == pytest.approx(h.objective_value, abs=1e-7)


def test_lp_format_one_variable():
    text = export_lp_format(one_var())
    assert "Maximize" in text.splitlines()
    assert "x0 <= 0.6" in text
    assert text.rstrip().endswith("End")


def test_lp_format_binary_section():
    p = LinearProblem([1.0, 1.0], [[1.0, 1.0]], ">=", [1.0], upper=1.0, binary=[True, False])
    text = export_lp_format(p)
    lines = text.splitlines()
    i = lines.index("Binary")
    assert lines[i + 1].split() == ["x0"]


def test_lp_format_no_constraints():
    text = export_lp_format(LinearProblem([1.0, 0.0]))
    assert "Subject To" in text and "End" in text


def test_problem_validation():
    with pytest.raises(ValueError):
        LinearProblem([1.0], [[1.0, 2.0]], "<=", [1.0])
    with pytest.raises(ValueError):
        LinearProblem([1.0], lower=[-np.inf])
    with pytest.raises(ValueError):
        LinearProblem([1.0], binary=[True])  # upper bound inf
