"""Dense two-phase simplex with Bland's rule.

The crafting LPs are tiny (tens of variables and rows) but numerically
delicate: tolerance rungs start at 1e-16, far below generic LP-solver
feasibility defaults.  Rows are equilibrated to unit infinity-norm, both
phases pivot with Bland's rule (anti-cycling), and the returned basic
solution is re-verified against the original data; crafting recomputes
every physical quantity from the solution rather than trusting the
objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class NumericalBreakdown(RuntimeError):
    """Pivoting failed at every tolerance rung."""


@dataclass
class LpProblem:
    """minimize c @ x  s.t.  A_eq x = b_eq, A_ub x <= b_ub, x >= 0."""

    c: np.ndarray
    a_eq: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    b_eq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    a_ub: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    b_ub: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.c = np.atleast_1d(np.asarray(self.c, dtype=float))
        n = self.c.size
        self.a_eq = np.asarray(self.a_eq, dtype=float).reshape(-1, n) \
            if np.size(self.a_eq) else np.zeros((0, n))
        self.a_ub = np.asarray(self.a_ub, dtype=float).reshape(-1, n) \
            if np.size(self.a_ub) else np.zeros((0, n))
        self.b_eq = np.atleast_1d(np.asarray(self.b_eq, dtype=float))
        self.b_ub = np.atleast_1d(np.asarray(self.b_ub, dtype=float))
        for arr in (self.c, self.a_eq, self.a_ub, self.b_eq, self.b_ub):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP data must be finite")


@dataclass
class LpSolution:
    status: str            # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float | None


def _bland_simplex(tableau: np.ndarray, basis: np.ndarray, n_total: int,
                   piv_tol: float, max_iter: int = 20000) -> str:
    """Run simplex on a tableau whose last row is the (negated) objective."""
    m = tableau.shape[0] - 1
    for _ in range(max_iter):
        red = tableau[-1, :n_total]
        enter = -1
        for j in range(n_total):
            if red[j] < -piv_tol:
                enter = j
                break
        if enter < 0:
            return "optimal"
        col = tableau[:m, enter]
        best_ratio = np.inf
        leave = -1
        for i in range(m):
            if col[i] > piv_tol:
                ratio = tableau[i, -1] / col[i]
                if ratio < best_ratio - 1e-15 or (
                    abs(ratio - best_ratio) <= 1e-15
                    and (leave < 0 or basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        piv = tableau[leave, enter]
        tableau[leave] /= piv
        for i in range(m + 1):
            if i != leave and tableau[i, enter] != 0.0:
                tableau[i] -= tableau[i, enter] * tableau[leave]
        basis[leave] = enter
    raise NumericalBreakdown("simplex iteration limit hit")


def _solve_once(prob: LpProblem, piv_tol: float) -> LpSolution:
    n = prob.c.size
    m_eq, m_ub = prob.a_eq.shape[0], prob.a_ub.shape[0]
    m = m_eq + m_ub

    a = np.zeros((m, n + m_ub))
    b = np.zeros(m)
    if m_eq:
        a[:m_eq, :n] = prob.a_eq
        b[:m_eq] = prob.b_eq
    if m_ub:
        a[m_eq:, :n] = prob.a_ub
        a[m_eq:, n:] = np.eye(m_ub)
        b[m_eq:] = prob.b_ub

    # row equilibration, then sign-flip to b >= 0
    scale = np.maximum(np.max(np.abs(a), axis=1), 1e-300)
    a /= scale[:, None]
    b /= scale
    neg = b < 0
    a[neg] *= -1
    b[neg] *= -1

    n_slack = m_ub
    n_struct = n + n_slack
    n_total = n_struct + m  # + artificials

    # phase 1
    tab = np.zeros((m + 1, n_total + 1))
    tab[:m, :n_struct] = a
    tab[:m, n_struct:n_total] = np.eye(m)
    tab[:m, -1] = b
    basis = np.arange(n_struct, n_total)
    tab[-1, :] = -np.sum(tab[:m, :], axis=0)
    tab[-1, n_struct:n_total] = 0.0
    status = _bland_simplex(tab, basis, n_total, piv_tol)
    if status != "optimal":
        raise NumericalBreakdown("phase 1 did not terminate at an optimum")
    phase1_obj = -tab[-1, -1]
    if phase1_obj > 1e-9:
        return LpSolution("infeasible", None, None)

    # drive leftover artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n_struct:
            row = tab[i, :n_struct]
            j = -1
            for k in range(n_struct):
                if abs(row[k]) > piv_tol:
                    j = k
                    break
            if j >= 0:
                piv = tab[i, j]
                tab[i] /= piv
                for r in range(m + 1):
                    if r != i and tab[r, j] != 0.0:
                        tab[r] -= tab[r, j] * tab[i]
                basis[i] = j

    # phase 2 on the structural columns
    tab2 = np.zeros((m + 1, n_struct + 1))
    tab2[:m, :n_struct] = tab[:m, :n_struct]
    tab2[:m, -1] = tab[:m, -1]
    cost = np.zeros(n_struct)
    cost[:n] = prob.c
    tab2[-1, :n_struct] = cost
    for i in range(m):
        if basis[i] < n_struct and cost[basis[i]] != 0.0:
            tab2[-1] -= cost[basis[i]] * tab2[i]
    status = _bland_simplex(tab2, basis, n_struct, piv_tol)
    if status == "unbounded":
        return LpSolution("unbounded", None, None)

    x = np.zeros(n_struct)
    for i in range(m):
        if basis[i] < n_struct:
            x[basis[i]] = tab2[i, -1]
    x = np.where(np.abs(x) < 1e-300, 0.0, x)
    return LpSolution("optimal", x[:n].copy(), float(prob.c @ x[:n]))


def _verify(prob: LpProblem, sol: LpSolution,
            res_tol: float = 1e-11, obj_tol: float = 1e-10) -> bool:
    x = sol.x
    if x is None or np.any(x < -1e-12):
        return False
    if prob.a_eq.shape[0]:
        scale = np.maximum(np.max(np.abs(prob.a_eq), axis=1) * max(np.max(np.abs(x)), 1.0), 1.0)
        if np.max(np.abs(prob.a_eq @ x - prob.b_eq) / scale) > res_tol:
            return False
    if prob.a_ub.shape[0]:
        scale = np.maximum(np.max(np.abs(prob.a_ub), axis=1) * max(np.max(np.abs(x)), 1.0), 1.0)
        if np.max((prob.a_ub @ x - prob.b_ub) / scale) > res_tol:
            return False
    return abs(prob.c @ x - sol.objective) <= obj_tol * max(1.0, abs(sol.objective))


def solve_lp(prob: LpProblem) -> LpSolution:
    """Two-phase dense simplex; raises NumericalBreakdown after the pivot
    tolerance ladder is exhausted."""
    last_err = None
    for piv_tol in (1e-12, 1e-11, 1e-10, 1e-9):
        try:
            sol = _solve_once(prob, piv_tol)
        except NumericalBreakdown as err:
            last_err = err
            continue
        if sol.status != "optimal" or _verify(prob, sol):
            return sol
        last_err = NumericalBreakdown("solution failed re-verification")
    raise NumericalBreakdown(str(last_err))
