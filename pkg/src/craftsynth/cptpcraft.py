"""Error crafting with measurement-and-feedback channels for Z rotations.

The implementable channel wraps a synthesized word between two
controlled-Z gates with an ancilla prepared in |+>, measures the ancilla
in X and applies a conditional X to the data qubit.  Composed with the
inverse target rotation the data-qubit remnant has the PTM template

    [[1, 0,    0,   0],
     [0, 1-mu, nu,  0],
     [0, -nu,  1-mu, 0],
     [0, 0,    0,   1]]

for any word: both Kraus branches are diagonal, so only a damped XY
rotation block survives.  X-axis rotations are corrected exactly; mixing
a (nu > 0, nu < 0) pair with weights proportional to the opposite
magnitudes cancels nu and leaves a pure Z channel of rate mu~/2.

Pool targets are Rx(alpha) applied after Rz(theta): their residual
against Rz(theta) is a pure X rotation, which the feedback removes, so
a pool scan over alpha samples independent lattice neighborhoods on the
correctable fiber.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channels import Ptm, ptm_of_kraus, rx, rz
from .cliffordt import GateWord, eval_float
from .synthesis import SynthRequest, synth_su2


class TemplateViolation(RuntimeError):
    """The remnant PTM is not of the damped-XY-rotation form."""


class NoOppositeSigns(RuntimeError):
    """Candidate pool lacks one of the nu signs; enlarge the pool."""


class SameSign(ValueError):
    pass


TEMPLATE_TOL = 1e-8


@dataclass(frozen=True)
class CptpCandidate:
    word: GateWord
    mu: float
    nu: float
    tcount: int


@dataclass(frozen=True)
class CraftedPair:
    plus: CptpCandidate
    minus: CptpCandidate
    p_plus: float
    p_minus: float
    mu_tilde: float

    @property
    def p_z(self) -> float:
        return self.mu_tilde / 2.0

    def to_json(self) -> str:
        return json.dumps({
            "plus": {"word": self.plus.word.word_str(),
                     "omega_exp": self.plus.word.omega_exp,
                     "mu": self.plus.mu, "nu": self.plus.nu,
                     "tcount": self.plus.tcount},
            "minus": {"word": self.minus.word.word_str(),
                      "omega_exp": self.minus.word.omega_exp,
                      "mu": self.minus.mu, "nu": self.minus.nu,
                      "tcount": self.minus.tcount},
            "p_plus": self.p_plus, "p_minus": self.p_minus,
            "mu_tilde": self.mu_tilde, "p_z": self.p_z,
        }, indent=1)


_CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PLUS = np.array([1.0, 1.0]) / np.sqrt(2.0)


def _feedback_kraus(u: np.ndarray) -> list:
    """Kraus pair of the detect-and-correct wrapper around a data unitary.

    Data qubit first (index 0), ancilla second; basis |d a>.
    """
    s = _CZ @ np.kron(u, np.eye(2)) @ _CZ
    kraus = []
    for m, sign in ((0, 1.0), (1, -1.0)):
        bra = np.array([1.0, sign]) / np.sqrt(2.0)
        e = np.zeros((2, 2), dtype=complex)
        for d_out in range(2):
            for d_in in range(2):
                amp = 0.0
                for a_out in range(2):
                    for a_in in range(2):
                        amp += (bra[a_out]
                                * s[2 * d_out + a_out, 2 * d_in + a_in]
                                * _PLUS[a_in])
                e[d_out, d_in] = amp
        if m == 1:
            e = _X @ e
        kraus.append(e)
    return kraus


def feedback_channel(word_or_matrix, theta: float) -> Ptm:
    """Remnant PTM of the feedback-wrapped word against the target Rz(theta).

    Builds the two-qubit circuit literally, composes with Rz(theta)^-1,
    and asserts the damped-XY template shape.
    """
    if isinstance(word_or_matrix, GateWord):
        u = eval_float(word_or_matrix)
    else:
        u = np.asarray(word_or_matrix, dtype=complex)
    rz_inv = rz(-theta)
    kraus = [k @ rz_inv for k in _feedback_kraus(u)]
    ptm = ptm_of_kraus(kraus, n=1)
    g = ptm.gamma
    template = np.zeros((4, 4))
    template[0, 0] = template[3, 3] = 1.0
    template[1, 1] = template[2, 2] = g[1, 1]
    template[1, 2] = g[1, 2]
    template[2, 1] = -g[1, 2]
    if np.max(np.abs(g - template)) > TEMPLATE_TOL:
        raise TemplateViolation("remnant PTM is off the damped-XY template")
    return ptm


def mu_nu(word_or_matrix, theta: float) -> tuple:
    """(mu, nu) from the remnant's XY block; mu must land in [0, 1]."""
    g = feedback_channel(word_or_matrix, theta).gamma
    mu = float(1.0 - g[1, 1])
    if not -TEMPLATE_TOL <= mu <= 1.0 + TEMPLATE_TOL:
        raise TemplateViolation("damping outside [0, 1]: word far from the Rz family")
    return mu, float(g[1, 2])


def candidate_from_word(word: GateWord, theta: float) -> CptpCandidate:
    mu, nu = mu_nu(word, theta)
    return CptpCandidate(word=word, mu=mu, nu=nu, tcount=word.tcount)


def fiber_targets(theta: float, n_alpha: int, theta_offsets=(0.0,)):
    """Pool targets Rx(alpha) @ Rz(theta + d): the correctable fiber.

    Alpha rows are staggered by the golden ratio per offset so different
    offsets probe different lattice neighborhoods.
    """
    for j, d in enumerate(theta_offsets):
        base = rz(theta + d)
        for k in range(n_alpha):
            alpha = 2.0 * np.pi * ((k + 0.3819660 * j) % n_alpha) / n_alpha
            yield rx(alpha) @ base


def search_pair(theta: float, eps_base: float, pool_budget: int = 64,
                n_theta: int | None = None) -> CraftedPair:
    """Brute-force pool search for the min-damping opposite-sign pair.

    pool_budget counts synthesized targets in total, split over an alpha
    grid and n_theta rotation-angle offsets spanning +-2*eps_base.  The
    offsets are essential: minimum-T-count words snap to the same nearby
    lattice z-angle for every alpha, so an unperturbed pool tends to
    collapse onto a single nu sign.
    """
    if n_theta is None:
        # offsets only need to straddle the nu-sign boundary; the alpha
        # grid carries the sampling density (distinct lattice draws)
        n_theta = 1 if pool_budget < 16 else (3 if pool_budget < 120 else 5)
    if n_theta == 1:
        offsets = [0.0]
    else:
        offsets = list(np.linspace(-2.0 * eps_base, 2.0 * eps_base, n_theta))
    n_alpha = max(1, pool_budget // len(offsets))
    cands = []
    for target in fiber_targets(theta, n_alpha, offsets):
        res = synth_su2(SynthRequest(target=target, epsilon=eps_base))
        cands.append(candidate_from_word(res.word, theta))
    plus = [c for c in cands if c.nu > 0]
    minus = [c for c in cands if c.nu < 0]
    if not plus or not minus:
        raise NoOppositeSigns(
            f"pool of {len(cands)} lacks a nu sign "
            f"({len(plus)} positive, {len(minus)} negative); enlarge the pool"
        )
    best_plus = min(plus, key=lambda c: (c.mu, c.tcount, c.word.word_str()))
    best_minus = min(minus, key=lambda c: (c.mu, c.tcount, c.word.word_str()))
    return mix_pair_weights(best_plus, best_minus)


def mix_pair_weights(plus: CptpCandidate, minus: CptpCandidate) -> CraftedPair:
    """Convex weights cancelling nu: p+ nu+ + p- nu- = 0."""
    if not (plus.nu > 0 > minus.nu):
        raise SameSign("pair must have nu of opposite signs")
    denom = abs(plus.nu) + abs(minus.nu)
    p_plus = abs(minus.nu) / denom
    p_minus = abs(plus.nu) / denom
    mu_tilde = p_plus * plus.mu + p_minus * minus.mu
    return CraftedPair(plus=plus, minus=minus, p_plus=p_plus,
                       p_minus=p_minus, mu_tilde=mu_tilde)


def mix_pair(pair: CraftedPair, theta: float):
    """Final remnant of the mixed pair: a pure Z channel of rate mu~/2.

    Returns (ChiDiag-like dict, mixed PTM); the channel distance to the
    identity equals the Z rate exactly.
    """
    from .channels import ChiDiag

    g_plus = feedback_channel(pair.plus.word, theta).gamma
    g_minus = feedback_channel(pair.minus.word, theta).gamma
    g = pair.p_plus * g_plus + pair.p_minus * g_minus
    if abs(g[1, 2]) > 1e-12 or abs(g[2, 1]) > 1e-12:
        raise SameSign("nu did not cancel in the mixture")
    mu_tilde = 1.0 - g[1, 1]
    chi = ChiDiag(1.0 - mu_tilde / 2.0, 0.0, 0.0, mu_tilde / 2.0)
    return chi, Ptm(1, g)
