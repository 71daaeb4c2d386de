"""Constrained mixing of synthesized candidates (error crafting).

Everything happens on magic vectors relative to the target, so the
remnant target is e1 = (1,0,0,0).  The Pauli-constrained problem is the
relaxed LP

    minimize 1 - sum_j p_j (r1_j)^2
    s.t.     sum p = 1, p >= 0,
             sum over pairs |sum_j p_j r_k r_k'| <= g1,

with the depolarizing family adding max_{k<k'} |sum_j p_j (r_k^2 -
r_k'^2)| <= g2 over the three non-identity slots, and the XY family
adding |sum_j p_j (r_Z)^2| <= g2.  Tolerances walk a geometric ladder
from machine precision; reported distances are always recomputed from
the solved weights via the trace norm, never read off the LP objective.

The unconstrained problem minimizes the true trace-norm distance by
Kelley cutting planes with eigenvector sign-matrix witnesses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    ChiDiag,
    gram_offdiag_mass,
    gram_to_chi,
    mixture_diamond,
)
from .lp import LpProblem, solve_lp
from .shiftgen import CandidateSet

_E1 = np.array([1.0, 0.0, 0.0, 0.0])
_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_DIAG_PAIRS = ((1, 2), (1, 3), (2, 3))  # non-identity magic slots
_Z_SLOT = 1

SUPPORT_TOL = 1e-14
G1_SUCCESS_MAX = 1e-12
G2_SUCCESS_FRACTION = 0.01


@dataclass(frozen=True)
class ConstraintFamily:
    kind: str  # "pauli" | "depol" | "xy" | "none"
    g1_ladder: tuple = (1e-16, 1e-15, 1e-14, 1e-13, 1e-12)
    g2_policy: str = "geometric"

    def __post_init__(self):
        if self.kind not in ("pauli", "depol", "xy", "none"):
            raise ValueError(f"unknown constraint family {self.kind!r}")
        if list(self.g1_ladder) != sorted(self.g1_ladder):
            raise ValueError("g1 ladder must be increasing")
        if self.g1_ladder[-1] > G1_SUCCESS_MAX:
            raise ValueError("g1 ladder must stay within the success threshold")


@dataclass
class CraftSolution:
    p: np.ndarray
    m: np.ndarray
    d_diamond: float
    chi: ChiDiag
    g1_used: float
    g2_used: float
    success: bool
    support_size: int
    kind: str
    failure: str | None = None
    objective: float | None = None
    gap: float | None = None
    tcount_mean: float | None = None

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind,
            "p": [float(x) for x in self.p],
            "d_diamond": self.d_diamond,
            "chi": self.chi.as_dict(),
            "g1_used": self.g1_used,
            "g2_used": self.g2_used,
            "success": self.success,
            "support_size": self.support_size,
            "failure": self.failure,
            "gram": [[float(x) for x in row] for row in self.m],
        }, indent=1)


def _finish(p: np.ndarray, r: np.ndarray, kind: str, g1: float, g2: float,
            success_extra: bool, bound: float | None,
            cands: CandidateSet | None) -> CraftSolution:
    m = np.einsum("j,jk,jl->kl", p, r, r)
    d = mixture_diamond(_E1, m)
    _, chi = gram_to_chi(m)
    support = int(np.sum(p > SUPPORT_TOL))
    success = success_extra and g1 <= G1_SUCCESS_MAX
    if bound is not None:
        success = success and d <= bound
    tmean = None
    if cands is not None:
        tmean = float(np.dot(p, [c.tcount for c in cands.candidates]))
    return CraftSolution(
        p=p, m=m, d_diamond=d, chi=chi, g1_used=g1, g2_used=g2,
        success=success, support_size=support, kind=kind, tcount_mean=tmean,
    )


def _lp_for(r: np.ndarray, kind: str, g1: float, g2: float) -> LpProblem:
    n = r.shape[0]
    pair_rows = np.stack([r[:, k] * r[:, kk] for k, kk in _PAIRS])  # 6 x n
    nv = n + 6  # p then y
    c = np.zeros(nv)
    c[:n] = -(r[:, 0] ** 2)
    a_eq = np.zeros((1, nv))
    a_eq[0, :n] = 1.0
    b_eq = np.array([1.0])
    rows = []
    rhs = []
    for m_i in range(6):
        row = np.zeros(nv)
        row[:n] = pair_rows[m_i]
        row[n + m_i] = -1.0
        rows.append(row)
        rhs.append(0.0)
        row = np.zeros(nv)
        row[:n] = -pair_rows[m_i]
        row[n + m_i] = -1.0
        rows.append(row)
        rhs.append(0.0)
    row = np.zeros(nv)
    row[n:] = 1.0
    rows.append(row)
    rhs.append(g1)
    if kind == "depol":
        for k, kk in _DIAG_PAIRS:
            diff = r[:, k] ** 2 - r[:, kk] ** 2
            for sign in (1.0, -1.0):
                row = np.zeros(nv)
                row[:n] = sign * diff
                rows.append(row)
                rhs.append(g2)
    elif kind == "xy":
        row = np.zeros(nv)
        row[:n] = r[:, _Z_SLOT] ** 2
        rows.append(row)
        rhs.append(g2)
    return LpProblem(c=c, a_eq=a_eq, b_eq=b_eq,
                     a_ub=np.stack(rows), b_ub=np.array(rhs))


def _g2_ladder(r: np.ndarray, fam: ConstraintFamily):
    # cap at the success threshold for an upper estimate of the mixture
    # rate (the worst single-candidate rate); the post-solve refinement
    # tightens g2 to the boundary of the solved rate
    p_est = float(np.max(1.0 - r[:, 0] ** 2))
    cap = max(G2_SUCCESS_FRACTION * p_est, 1e-15)
    rung = 1e-16
    out = []
    while rung <= cap:
        out.append(rung)
        rung *= 10.0
    out.append(cap)
    return out


def craft(cands: CandidateSet, fam: ConstraintFamily) -> CraftSolution:
    """First-feasible solve along the (g1, g2) tolerance ladders.

    Infeasibility at every rung is a recorded failure, not an exception;
    the success flags additionally check the crafted-accuracy bound
    (c+1)^2 eps^2 and the family-specific tolerance criteria against the
    recomputed solution.
    """
    if fam.kind == "none":
        raise ValueError("use uncrafted_mix for the unconstrained problem")
    if len(cands) < 2:
        raise ValueError("need at least two candidates")
    r = cands.r_matrix
    n = r.shape[0]
    bound = ((cands.spec.c + 1.0) * cands.spec.eps) ** 2

    def attempt(g1, g2):
        """Solve one rung; None when the solver misses the rung by > 10x."""
        sol = solve_lp(_lp_for(r, fam.kind, g1, g2))
        if sol.status != "optimal":
            return None
        p = np.maximum(sol.x[:n], 0.0)
        p /= p.sum()
        m = np.einsum("j,jk,jl->kl", p, r, r)
        mass = gram_offdiag_mass(m)
        if mass > 10.0 * g1 + 1e-15:
            return None
        _, chi = gram_to_chi(m)
        if fam.kind == "depol":
            viol = max(abs(chi.chi_xx - chi.chi_yy),
                       abs(chi.chi_yy - chi.chi_zz),
                       abs(chi.chi_xx - chi.chi_zz))
        elif fam.kind == "xy":
            viol = abs(chi.chi_zz)
        else:
            viol = 0.0
        if fam.kind != "pauli" and viol > 10.0 * g2 + 1e-15:
            return None
        return sol, p, chi, mass, viol

    g2_ladder = [0.0] if fam.kind == "pauli" else _g2_ladder(r, fam)
    for g1 in fam.g1_ladder:
        for g2 in g2_ladder:
            got = attempt(g1, g2)
            if got is None:
                continue
            sol, p, chi, mass, viol = got
            if fam.kind != "pauli":
                # tighten g2 to the success boundary of the solved rate
                for _ in range(3):
                    g2_target = G2_SUCCESS_FRACTION * chi.p
                    if g2 <= g2_target:
                        break
                    tightened = attempt(g1, g2_target)
                    if tightened is None:
                        break
                    sol, p, chi, mass, viol = tightened
                    g2 = g2_target
            # effective tolerances actually achieved by the solution
            g1_used = max(g1, mass)
            g2_used = max(g2, viol) if fam.kind != "pauli" else 0.0
            extra = fam.kind == "pauli" or \
                g2_used <= G2_SUCCESS_FRACTION * max(chi.p, 1e-300)
            out = _finish(p, r, fam.kind, g1_used, g2_used, extra, bound, cands)
            out.objective = float(1.0 + sol.objective)
            return out
    out = CraftSolution(
        p=np.zeros(n), m=np.zeros((4, 4)), d_diamond=float("nan"),
        chi=ChiDiag(1.0, 0.0, 0.0, 0.0), g1_used=fam.g1_ladder[-1],
        g2_used=g2_ladder[-1], success=False, support_size=0,
        kind=fam.kind, failure="infeasible_at_all_rungs",
    )
    return out


def uncrafted_mix(cands: CandidateSet, max_cuts: int = 200,
                  gap_tol: float = 1e-11) -> CraftSolution:
    """Minimize the true channel distance by Kelley cutting planes.

    Each cut comes from the sign matrix of the residual's eigenvectors;
    the master LP lower bound and the recomputed distance certify each
    other at convergence.
    """
    if len(cands) < 1:
        raise ValueError("need at least one candidate")
    r = cands.r_matrix
    n = r.shape[0]
    grams = np.einsum("jk,jl->jkl", r, r)
    target = np.outer(_E1, _E1)

    def f_and_witness(p):
        e = target - np.einsum("j,jkl->kl", p, grams)
        vals, vecs = np.linalg.eigh(0.5 * (e + e.T))
        w = vecs @ np.diag(np.sign(vals)) @ vecs.T
        return 0.5 * np.sum(np.abs(vals)), w

    cuts_a = []  # alpha_i - sum_j beta_ij p_j <= t
    cuts_b = []
    p = np.full(n, 1.0 / n)
    best_p, best_f = p, f_and_witness(p)[0]
    gap = float("inf")
    lower = 0.0
    for _ in range(max_cuts):
        f_val, w = f_and_witness(p)
        if f_val < best_f:
            best_f, best_p = f_val, p
        alpha = 0.5 * np.trace(w @ target)
        beta = 0.5 * np.einsum("kl,jkl->j", w, grams)
        cuts_a.append(alpha)
        cuts_b.append(beta)
        nv = n + 1  # p and t
        c = np.zeros(nv)
        c[-1] = 1.0
        a_eq = np.zeros((1, nv))
        a_eq[0, :n] = 1.0
        a_ub = np.zeros((len(cuts_a), nv))
        b_ub = np.zeros(len(cuts_a))
        for i, (a_i, b_i) in enumerate(zip(cuts_a, cuts_b)):
            a_ub[i, :n] = -b_i
            a_ub[i, -1] = -1.0
            b_ub[i] = -a_i
        sol = solve_lp(LpProblem(c=c, a_eq=a_eq, b_eq=[1.0],
                                 a_ub=a_ub, b_ub=b_ub))
        if sol.status != "optimal":
            break
        p = np.maximum(sol.x[:n], 0.0)
        p /= p.sum()
        lower = max(lower, sol.objective)
        f_new = f_and_witness(p)[0]
        if f_new < best_f:
            best_f, best_p = f_new, p
        gap = best_f - lower
        if gap <= gap_tol:
            break
    out = _finish(best_p, r, "none", 0.0, 0.0, True, None, cands)
    out.gap = float(max(gap, 0.0))
    out.success = out.gap <= gap_tol * 10 + 1e-12
    if not out.success:
        out.failure = "no_convergence"
    return out
