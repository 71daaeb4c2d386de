from itertools import combinations

import numpy as np
import pytest

from craftsynth.lp import LpProblem, LpSolution, solve_lp


def vertex_enumeration_oracle(prob: LpProblem):
    """Brute force: intersect active-constraint subsets, keep feasible vertices."""
    n = prob.c.size
    rows = [(prob.a_eq[i], prob.b_eq[i], "eq") for i in range(prob.a_eq.shape[0])]
    rows += [(prob.a_ub[i], prob.b_ub[i], "ub") for i in range(prob.a_ub.shape[0])]
    rows += [(-np.eye(n)[i], 0.0, "ub") for i in range(n)]  # x >= 0 as -x <= 0
    best = None
    idx = range(len(rows))
    for subset in combinations(idx, n):
        a = np.array([rows[i][0] for i in subset])
        b = np.array([rows[i][1] for i in subset])
        if abs(np.linalg.det(a)) < 1e-12:
            continue
        x = np.linalg.solve(a, b)
        ok = True
        for arow, bval, kind in rows:
            v = arow @ x
            if kind == "eq" and abs(v - bval) > 1e-9:
                ok = False
                break
            if kind == "ub" and v > bval + 1e-9:
                ok = False
                break
        if ok:
            val = prob.c @ x
            if best is None or val < best:
                best = val
    return best


def test_simple_bounded():
    # min -x s.t. x <= 1
    sol = solve_lp(LpProblem(c=[-1.0], a_ub=[[1.0]], b_ub=[1.0]))
    assert sol.status == "optimal"
    assert abs(sol.x[0] - 1.0) < 1e-12
    assert abs(sol.objective + 1.0) < 1e-12


def test_infeasible():
    # x <= -1 with x >= 0
    sol = solve_lp(LpProblem(c=[1.0], a_ub=[[1.0]], b_ub=[-1.0]))
    assert sol.status == "infeasible"


def test_unbounded():
    sol = solve_lp(LpProblem(c=[-1.0], a_ub=[[-1.0]], b_ub=[0.0]))
    assert sol.status == "unbounded"


def test_equality_simplex_row():
    # min -x0 over the probability simplex
    sol = solve_lp(LpProblem(c=[-1.0, 0.0, 0.0], a_eq=[[1, 1, 1]], b_eq=[1.0]))
    assert sol.status == "optimal"
    assert abs(sol.x[0] - 1.0) < 1e-12


def test_tiny_rhs_feasibility_scale():
    # |x0 - x1| <= 1e-16 via auxiliary y, with x0 + x1 = 1: forces x0 = x1
    prob = LpProblem(
        c=[0.0, 0.0, 1.0],
        a_eq=[[1.0, 1.0, 0.0]],
        b_eq=[1.0],
        a_ub=[[1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [0.0, 0.0, 1.0]],
        b_ub=[0.0, 0.0, 1e-16],
    )
    sol = solve_lp(prob)
    assert sol.status == "optimal"
    assert abs(sol.x[0] - 0.5) < 1e-12
    assert abs(sol.x[0] - sol.x[1]) <= 1e-15


@pytest.mark.parametrize("seed", range(8))
def test_random_lp_against_vertex_oracle(seed):
    rng = np.random.default_rng(seed)
    n = rng.integers(2, 5)
    m = rng.integers(1, 4)
    # bounded feasible region: simplex row plus random cuts
    prob = LpProblem(
        c=rng.normal(size=n),
        a_eq=np.ones((1, n)),
        b_eq=[1.0],
        a_ub=rng.normal(size=(m, n)),
        b_ub=rng.uniform(0.1, 1.0, size=m),
    )
    sol = solve_lp(prob)
    oracle = vertex_enumeration_oracle(prob)
    if oracle is None:
        assert sol.status == "infeasible"
    else:
        assert sol.status == "optimal"
        assert abs(sol.objective - oracle) < 1e-9


def test_larger_random_lps():
    rng = np.random.default_rng(123)
    for _ in range(5):
        n = 50
        prob = LpProblem(
            c=rng.normal(size=n),
            a_eq=np.ones((1, n)),
            b_eq=[1.0],
            a_ub=rng.normal(size=(8, n)),
            b_ub=rng.uniform(0.5, 1.5, size=8),
        )
        sol = solve_lp(prob)
        assert sol.status == "optimal"
        assert np.all(sol.x >= -1e-12)
        assert abs(np.sum(sol.x) - 1.0) < 1e-11
        assert np.max(prob.a_ub @ sol.x - prob.b_ub) < 1e-11


def test_solution_dataclass():
    sol = LpSolution("optimal", np.array([1.0]), -1.0)
    assert sol.status == "optimal"
