"""Shift unitaries at fixed distance to identity, and candidate sets.

A unit 3-vector v and a distance delta define the unitary whose magic
vector is (sqrt(1-delta^2), delta*v); its channel distance to the
identity is exactly delta.  Shift-vector sets come from the feasibility
theorems (7 vectors for the Pauli constraint, 9 for depolarizing) or
from near-uniform sphere samplings; the multi-radius trick replicates a
set at radii k*c*eps/R for k = 1..R.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import fix_sign, magic_vec, unitary_diamond, unitary_from_magic_vec
from .cliffordt import GateWord
from .synthesis import SynthRequest, synth_su2

_S2 = 1.0 / math.sqrt(2.0)
_S3 = 1.0 / math.sqrt(3.0)

PAULI7 = np.array([
    (-1, 0, 0),
    (0, -1, 0),
    (0, 0, 1),
    (_S2, -_S2, 0),
    (-_S2, 0, -_S2),
    (0, _S2, _S2),
    (_S3, _S3, -_S3),
])

DEPOL9 = np.array([
    (1, 0, 0),
    (-1, 0, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
    (-_S2, 0, -_S2),
    (0, _S2, _S2),
    (-_S2, _S2, 0),
    (_S3, _S3, -_S3),
])


def theorem_vectors(kind: str) -> np.ndarray:
    """The feasibility-theorem shift-vector sets."""
    if kind == "pauli7":
        return PAULI7.copy()
    if kind == "depol9":
        return DEPOL9.copy()
    raise ValueError(f"unknown theorem vector set {kind!r}")


def equator_vectors(k: int) -> np.ndarray:
    """K vectors on the zero-Z great circle (slots X, Y), plus-X first.

    Suited to XY-biased crafting of Z rotations, where candidates must
    carry no deliberate Z shift.
    """
    if k < 1:
        raise ValueError("need at least one vector")
    phi = 2.0 * np.pi * np.arange(k) / k
    return np.stack([np.zeros(k), np.cos(phi), np.sin(phi)], axis=1)


def fibonacci_lattice(s: int) -> np.ndarray:
    golden = math.pi * (3.0 - math.sqrt(5.0))
    i = np.arange(s)
    z = 1.0 - 2.0 * (i + 0.5) / s
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = golden * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def min_pairwise_angle(vs: np.ndarray) -> float:
    if vs.shape[0] < 2:
        return math.pi
    g = np.clip(vs @ vs.T, -1.0, 1.0)
    np.fill_diagonal(g, -1.0)
    return float(np.arccos(np.max(g)))


def sphere_vectors(s: int, seed: int = 0, iters: int = 3000) -> np.ndarray:
    """S near-uniform unit vectors: jittered Fibonacci start + 1/d^2 repulsion.

    Deterministic for a seed.  If refinement ever loses spacing against
    the raw lattice, the lattice is returned instead, so the minimum
    pairwise angle never drops below the Fibonacci baseline.
    """
    if s < 1:
        raise ValueError("need at least one vector")
    if s == 1:
        return np.array([[0.0, 0.0, 1.0]])
    rng = np.random.default_rng(seed)
    base = fibonacci_lattice(s)
    x = base + 1e-3 * rng.normal(size=base.shape)
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    step = 0.3 / s
    for _ in range(iters):
        diff = x[:, None, :] - x[None, :, :]
        dist2 = np.sum(diff * diff, axis=2)
        np.fill_diagonal(dist2, np.inf)
        force = np.sum(diff / (dist2 * dist2)[:, :, None], axis=1)
        force -= np.sum(force * x, axis=1, keepdims=True) * x  # tangent part
        norms = np.linalg.norm(force, axis=1, keepdims=True)
        force = np.where(norms > 1.0, force / norms, force)
        x = x + step * force
        x /= np.linalg.norm(x, axis=1, keepdims=True)
    if min_pairwise_angle(x) < min_pairwise_angle(base):
        return base
    return x


def shift_unitary(v: np.ndarray, delta: float) -> np.ndarray:
    """Unitary V with magic vector (sqrt(1-delta^2), delta*v), d(V, I) = delta."""
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("shift axis must be a unit vector")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    e = np.concatenate([[math.sqrt(1.0 - delta * delta)], delta * v])
    return unitary_from_magic_vec(e)


@dataclass(frozen=True)
class ShiftSpec:
    c: float
    eps: float
    bigr: int = 1
    vecset: str = "pauli7"
    seed: int = 0

    def __post_init__(self):
        if self.c * self.eps >= 0.5:
            raise ValueError("need c*eps < 0.5")
        if self.bigr < 1:
            raise ValueError("bigr must be >= 1")

    def vectors(self) -> np.ndarray:
        """Resolve the vecset string; '+'-joined parts are concatenated."""
        parts = []
        for name in self.vecset.split("+"):
            name = name.strip()
            if name in ("pauli7", "depol9"):
                parts.append(theorem_vectors(name))
            elif name.startswith("sphere:"):
                parts.append(sphere_vectors(int(name.split(":")[1]), seed=self.seed))
            elif name.startswith("equator:"):
                parts.append(equator_vectors(int(name.split(":")[1])))
            elif name == "poles":
                parts.append(np.array([[1.0, 0, 0], [-1.0, 0, 0]]))
            else:
                raise ValueError(f"unknown vecset component {name!r}")
        return np.concatenate(parts)


@dataclass(frozen=True)
class Candidate:
    word: GateWord
    u_float: np.ndarray
    r_rel: np.ndarray
    shift_vec: np.ndarray
    rung: int
    tcount: int
    achieved: float  # synthesis distance to the shifted target

    def to_json_dict(self) -> dict:
        return {
            "word": self.word.word_str(),
            "omega_exp": self.word.omega_exp,
            "shift_vec": [float(x) for x in self.shift_vec],
            "rung": self.rung,
            "r_rel": [float(x) for x in self.r_rel],
            "tcount": self.tcount,
        }


@dataclass
class CandidateSet:
    target: np.ndarray
    spec: ShiftSpec
    candidates: list = field(default_factory=list)

    def __len__(self):
        return len(self.candidates)

    @property
    def r_matrix(self) -> np.ndarray:
        return np.stack([c.r_rel for c in self.candidates])

    def to_json(self) -> str:
        return json.dumps({
            "spec": {"c": self.spec.c, "eps": self.spec.eps,
                     "bigr": self.spec.bigr, "vecset": self.spec.vecset,
                     "seed": self.spec.seed},
            "candidates": [c.to_json_dict() for c in self.candidates],
        }, indent=1)


_CACHE: dict = {}


def _cache_key(target: np.ndarray, spec: ShiftSpec, mode: str, backend: str):
    h = hashlib.sha256(np.ascontiguousarray(target).tobytes()).hexdigest()
    return (h, spec, mode, backend)


def build_candidates(target: np.ndarray, spec: ShiftSpec,
                     synth_mode: str = "su2_mitm",
                     use_cache: bool = True) -> CandidateSet:
    """Synthesize shifted targets on every (rung, vector) pair.

    Rung k = 1..R uses radius k*c*eps/R; candidates store the magic vector
    of U_j relative to the target and satisfy the triangle-inequality
    bracket (k*c/R - 1)*eps <= d(target, U_j) <= (k*c/R + 1)*eps.
    """
    key = _cache_key(target, spec, synth_mode, "mitm")
    if use_cache and key in _CACHE:
        return _CACHE[key]
    target = np.asarray(target, dtype=complex)
    target_dag = target.conj().T
    vecs = spec.vectors()
    out = CandidateSet(target=target, spec=spec)
    for k in range(1, spec.bigr + 1):
        radius = k * spec.c * spec.eps / spec.bigr
        for v in vecs:
            shifted = shift_unitary(v, radius) @ target
            res = synth_su2(SynthRequest(target=shifted, epsilon=spec.eps,
                                         mode=synth_mode))
            u = res.matrix
            d = unitary_diamond(target, u)
            lo = max(0.0, (radius / spec.eps - 1.0) * spec.eps)
            hi = (radius / spec.eps + 1.0) * spec.eps
            if not lo - 1e-9 <= d <= hi + 1e-9:
                raise AssertionError(
                    f"candidate distance {d} outside [{lo}, {hi}]"
                )
            r_rel = fix_sign(magic_vec(u @ target_dag))
            out.candidates.append(Candidate(
                word=res.word, u_float=u, r_rel=r_rel,
                shift_vec=np.asarray(v, dtype=float), rung=k,
                tcount=res.tcount, achieved=res.achieved,
            ))
    if use_cache:
        _CACHE[key] = out
    return out


def build_ideal_candidates(target: np.ndarray, spec: ShiftSpec) -> CandidateSet:
    """Candidate set from the exact shift unitaries, no synthesis step.

    Diagnostic path for the feasibility-theorem checks: every candidate
    sits exactly at its rung radius.
    """
    from .cliffordt import IDENTITY_WORD

    target = np.asarray(target, dtype=complex)
    target_dag = target.conj().T
    out = CandidateSet(target=target, spec=spec)
    for k in range(1, spec.bigr + 1):
        radius = k * spec.c * spec.eps / spec.bigr
        for v in spec.vectors():
            u = shift_unitary(v, radius) @ target
            out.candidates.append(Candidate(
                word=IDENTITY_WORD, u_float=u,
                r_rel=fix_sign(magic_vec(u @ target_dag)),
                shift_vec=np.asarray(v, dtype=float), rung=k,
                tcount=0, achieved=0.0,
            ))
    return out


def _moment_rows(e_vecs: np.ndarray, kind: str) -> np.ndarray:
    """Rows of the feasibility-certificate matrix for ideal magic vectors."""
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    rows = [e_vecs[:, k] * e_vecs[:, kk] for k, kk in pairs]
    if kind == "depol":
        rows.append(e_vecs[:, 1] ** 2 - e_vecs[:, 2] ** 2)
        rows.append(e_vecs[:, 1] ** 2 - e_vecs[:, 3] ** 2)
    return np.stack(rows)


def feasibility_certificate(kind: str, s: float) -> np.ndarray:
    """Solve A^-1 m for the theorem vector sets at shift radius s.

    kind = "pauli": 6x6 system from the first six of the seven vectors,
    right-hand side from the seventh; all entries must be <= 0 for the
    positive-mixture argument to close (the known value is
    -(1/3)(sqrt3, sqrt3, sqrt3, 2, 2, 2)).  kind = "depol": the 8x8
    analogue over the nine-vector set; entries are strictly negative.
    """
    vecs = theorem_vectors("pauli7" if kind == "pauli" else "depol9")
    e = np.concatenate(
        [np.full((vecs.shape[0], 1), math.sqrt(1.0 - s * s)), s * vecs], axis=1
    )
    rows = _moment_rows(e, kind)
    return np.linalg.solve(rows[:, :-1], rows[:, -1])


def clear_candidate_cache():
    _CACHE.clear()
