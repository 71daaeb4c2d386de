"""Clifford+T approximation of single-qubit unitaries by meet-in-the-middle.

A Matsumoto-Amano word with t syllables splits at any syllable boundary
into a pure-syllable prefix A (length a) and a suffix B (length b = t-a,
first syllable HT or SHT, tail Clifford attached).  The engine holds, per
suffix length b <= B_CAP, a KD-tree over phase-invariant fingerprints of
all suffixes; a query at total T-count t enumerates prefixes A and looks
up B ~ A^dag @ target.  Every operator with T-count t is covered by the
split, so the first level with a verified hit yields a minimum-T-count
word, deterministically.

Distances are channel distances (global phase quotiented); verified hits
are re-checked against the exact ring evaluation before being returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .channels import NotUnitary, check_unitary, rz, unitary_diamond
from .cliffordt import (
    GateWord,
    SYL_FLOAT,
    TAIL_FLOAT,
    concat,
    eval_float,
    ma_normalize,
)


class BudgetExceeded(RuntimeError):
    """No word within the T-count budget reaches the requested accuracy."""


EPS_FLOOR = 5e-4   # desk-scale backend floor for the MITM engine
B_CAP = 15         # largest table-side syllable count
A_CAP = 24         # prefix enumeration cap; beyond this the search aborts
_SYL_NAMES = ("T", "HT", "SHT")
_REST = ("HT", "SHT")


def default_budget(eps: float) -> int:
    return int(math.ceil(3.0 * math.log2(1.0 / eps))) + 12


@dataclass
class SynthRequest:
    target: np.ndarray
    epsilon: float
    budget: int | None = None
    mode: str = "su2_mitm"

    def __post_init__(self):
        self.target = check_unitary(self.target, tol=1e-12)
        if not 0.0 < self.epsilon <= 0.3:
            raise ValueError("epsilon must lie in (0, 0.3]")
        if self.budget is None:
            self.budget = default_budget(self.epsilon)


@dataclass
class SynthResult:
    word: GateWord
    achieved: float
    tcount: int

    @property
    def matrix(self) -> np.ndarray:
        return eval_float(self.word)


def seq_tuple(b: int, idx: int) -> tuple:
    """Syllable tuple for index idx in the level-b enumeration order."""
    if b == 0:
        return ()
    half = 1 << (b - 1)
    first = _SYL_NAMES[idx // half]
    bits = idx % half
    rest = tuple(_REST[(bits >> (b - 2 - i)) & 1] for i in range(b - 1))
    return (first,) + rest


class _Tables:
    """Lazy per-level sequence matrices and suffix KD-trees."""

    def __init__(self):
        self.seq_mats: dict[int, np.ndarray] = {}
        self.tables: dict[tuple, tuple] = {}  # (b, part) -> (tree, seq_abs, tail)

    def level_seq_mats(self, b: int) -> np.ndarray:
        """Float matrices of all 3*2^(b-1) sequences, T/HT/SHT block order."""
        if b in self.seq_mats:
            return self.seq_mats[b]
        if b == 0:
            m = np.eye(2, dtype=complex)[None]
        elif b == 1:
            m = np.stack([SYL_FLOAT[s] for s in _SYL_NAMES])
        else:
            prev = self.level_seq_mats(b - 1)
            half_prev = prev.shape[0] // 3
            blocks = []
            for f in range(3):
                base = prev[f * half_prev:(f + 1) * half_prev]
                ext = np.empty((base.shape[0] * 2, 2, 2), dtype=complex)
                ext[0::2] = base @ SYL_FLOAT["HT"]
                ext[1::2] = base @ SYL_FLOAT["SHT"]
                blocks.append(ext)
            m = np.concatenate(blocks)
        self.seq_mats[b] = m
        return m

    def suffix_table(self, b: int, part: str):
        """KD-tree over suffix fingerprints.

        part = "rest": suffixes with first syllable HT/SHT (valid after a
        nonempty prefix); part = "tfirst": T-initial suffixes; b = 0 has a
        single "rest" table holding the 24 bare Cliffords.
        """
        key = (b, part)
        if key in self.tables:
            return self.tables[key]
        mats = self.level_seq_mats(b)
        n_half = 1 if b == 0 else mats.shape[0] // 3
        if b == 0:
            sel = np.arange(1) if part == "rest" else np.arange(0)
        elif part == "tfirst":
            sel = np.arange(n_half)
        else:
            sel = np.arange(n_half, 3 * n_half)
        if sel.size == 0:
            self.tables[key] = None
            return None
        full = np.einsum("nij,tjk->ntik", mats[sel], TAIL_FLOAT).reshape(-1, 2, 2)
        fps = kernels.fingerprints(full)
        tree = cKDTree(fps)
        seq_abs = np.repeat(sel, 24)
        tail = np.tile(np.arange(24), sel.size)
        self.tables[key] = (tree, seq_abs, tail)
        return self.tables[key]


_TABLES = _Tables()


def reset_tables():
    """Drop all cached MITM tables (mainly for tests)."""
    global _TABLES
    _TABLES = _Tables()


def _suffix_matrix(b: int, seq_abs: int, tail: int) -> np.ndarray:
    return _TABLES.level_seq_mats(b)[seq_abs] @ TAIL_FLOAT[tail]


def _iter_prefix_blocks(a: int):
    """Yield (matrices, base_index, seq_maker) blocks for all length-a prefixes."""
    if a <= B_CAP:
        mats = _TABLES.level_seq_mats(a)
        yield mats, 0, (lambda i, _a=a: seq_tuple(_a, i))
        return
    base = _TABLES.level_seq_mats(B_CAP)
    n_base = base.shape[0]
    ext_len = a - B_CAP
    for s in range(1 << ext_len):
        suffix = tuple(_REST[(s >> (ext_len - 1 - i)) & 1] for i in range(ext_len))
        ext = np.eye(2, dtype=complex)
        for name in suffix:
            ext = ext @ SYL_FLOAT[name]
        yield base @ ext, s * n_base, (
            lambda i, _sfx=suffix: seq_tuple(B_CAP, i) + _sfx
        )


def _scan_level(t: int, target: np.ndarray, eps: float):
    """All verified words of T-count exactly t within eps; [] when none."""
    rho = kernels.FP_RADIUS_FACTOR * eps * (1.0 + 1e-9) + 1e-12
    raw_hits = []  # (float_d, order_key, word)

    def check_entries(table, b: int, w_left: np.ndarray | None,
                      prefix_seq: tuple, order_base: int, idxs):
        tree, seq_abs, tail = table
        for j in sorted(idxs):
            w = _suffix_matrix(b, seq_abs[j], tail[j])
            if w_left is not None:
                w = w_left @ w
            d = kernels.distances_to_target(w[None], target)[0]
            if d <= eps:
                word = GateWord(prefix_seq + seq_tuple(b, seq_abs[j]),
                                int(tail[j]), 0)
                raw_hits.append((d, (order_base, j), word))

    if t <= B_CAP:
        q = kernels.fingerprints(np.ascontiguousarray(target[None]))[0]
        for part in ("tfirst", "rest"):
            table = _TABLES.suffix_table(t, part)
            if table is None:
                continue
            idxs = table[0].query_ball_point(q, rho)
            if idxs:
                check_entries(table, t, None, (), 0, idxs)
    else:
        b = B_CAP
        a = t - b
        if a > A_CAP:
            raise BudgetExceeded(
                f"prefix enumeration cap exceeded at T-count {t}; "
                "epsilon is below the desk-scale backend floor"
            )
        table = _TABLES.suffix_table(b, "rest")
        for mats, base_idx, seq_maker in _iter_prefix_blocks(a):
            fps = kernels.adjoint_target_fingerprints(mats, target)
            # vectorized nearest-neighbor prefilter, then exact ball
            # queries only where the nearest entry is within radius
            near_d, _ = table[0].query(fps, k=1)
            for i in np.flatnonzero(near_d <= rho):
                idxs = table[0].query_ball_point(fps[i], rho)
                check_entries(table, b, mats[i], seq_maker(int(i)),
                              (base_idx + int(i)) * 10**9, idxs)

    if not raw_hits:
        return []
    raw_hits.sort(key=lambda h: (h[0], h[1]))
    out = []
    for d, key, word in raw_hits[:512]:
        exact_d = unitary_diamond(target, eval_float(word))
        if exact_d <= eps:
            out.append((exact_d, key, word))
    out.sort(key=lambda h: (h[0], h[1]))
    return out


def synth_su2(req: SynthRequest) -> SynthResult:
    """Minimum-T-count word with channel distance <= epsilon to the target.

    Deterministic: levels are scanned in increasing T-count and ties are
    broken by enumeration order.  Raises BudgetExceeded when the budget
    (or the prefix cap) is exhausted, which signals an epsilon below the
    backend floor.
    """
    if req.mode not in ("su2_mitm", "rz_mitm"):
        raise ValueError(f"unknown synthesis mode {req.mode!r}")
    target = np.ascontiguousarray(req.target, dtype=complex)
    for t in range(req.budget + 1):
        hits = _scan_level(t, target, req.epsilon)
        if hits:
            d, _, word = hits[0]
            return SynthResult(word=word, achieved=d, tcount=word.tcount)
    raise BudgetExceeded(
        f"no word with T-count <= {req.budget} reaches eps={req.epsilon}"
    )


# --- Rz synthesis with a pluggable backend ---------------------------------


def _rz_mitm(theta: float, eps: float, budget: int | None) -> SynthResult:
    req = SynthRequest(target=rz(theta), epsilon=eps, budget=budget, mode="rz_mitm")
    return synth_su2(req)


BACKENDS = {"mitm": _rz_mitm}


def register_backend(name: str, fn):
    """Register an Rz synthesizer fn(theta, eps, budget) -> SynthResult."""
    BACKENDS[name] = fn


def synth_rz(theta: float, eps: float, budget: int | None = None,
             backend: str = "mitm") -> SynthResult:
    return BACKENDS[backend](theta, eps, budget)


# --- axial decomposition -----------------------------------------------------


def _wrap_angle(x: float) -> float:
    y = math.fmod(x + math.pi, 2 * math.pi)
    if y <= 0:
        y += 2 * math.pi
    return y - math.pi


def axial_decompose(u: np.ndarray) -> tuple:
    """Euler angles with U = Rz(t1) Rx(t2) Rz(t3) up to global phase.

    Branch: t2 in [0, pi]; on the gimbal-degenerate axis (t2 = 0 or pi)
    t3 folds into t1 and is returned as 0.
    """
    u = check_unitary(u, tol=1e-12)
    det = np.linalg.det(u)
    su = u / np.sqrt(det)
    c = abs(su[0, 0])
    s = abs(su[1, 0])
    t2 = 2.0 * math.atan2(s, c)
    if s < 1e-9:
        t1 = 2.0 * np.angle(su[1, 1])
        return (_wrap_angle(t1), _wrap_angle(t2), 0.0)
    if c < 1e-9:
        t1 = 2.0 * np.angle(1j * su[1, 0])
        return (_wrap_angle(t1), _wrap_angle(t2), 0.0)
    phi_p = 2.0 * np.angle(su[1, 1])
    phi_m = 2.0 * np.angle(1j * su[1, 0])
    t1 = _wrap_angle(0.5 * (phi_p + phi_m))
    t3 = _wrap_angle(0.5 * (phi_p - phi_m))
    return (t1, _wrap_angle(t2), t3)


_H_WORD = ma_normalize("H")


def synth_via_axial(u: np.ndarray, eps: float,
                    split: tuple = (1 / 3, 1 / 3, 1 / 3),
                    budget: int | None = None,
                    backend: str = "mitm") -> SynthResult:
    """Synthesize U by three axial rotations, each at its share of eps.

    The middle rotation is an Rx, realized as H Rz H so the Rz engine is
    reused.  The achieved distance is recomputed on the concatenated word
    and asserted <= eps (subadditivity of the channel distance).
    """
    t1, t2, t3 = axial_decompose(u)
    parts = []
    for theta, frac in zip((t1, t2, t3), split):
        parts.append(synth_rz(theta, eps * frac, budget=budget, backend=backend))
    word = concat(parts[0].word, _H_WORD, parts[1].word, _H_WORD, parts[2].word)
    achieved = unitary_diamond(u, eval_float(word))
    if achieved > eps * (1 + 1e-9):
        raise AssertionError(
            f"axial synthesis exceeded budget: {achieved} > {eps}"
        )
    return SynthResult(word=word, achieved=achieved, tcount=word.tcount)
