"""Matsumoto-Amano normal forms for single-qubit Clifford+T words.

A word is ``(T|eps)(HT|SHT)* C`` with ``C`` one of the 192 single-qubit
Clifford matrices (24 projective Cliffords x 8 omega phases).  The
``GateWord`` below stores the syllable string, an index into a canonical
list of 24 phase-gauged Cliffords, and the omega exponent.  T-count =
number of syllables.

Normalization works by appending generators one at a time to a normal
form.  Clifford generators multiply into the tail; appending T uses the
unique factorization C = L * P with L in {I, H, SH} and P in the
64-element subgroup <S, X, omega>, which commutes through T.  All group
tables are generated at import time from the exact ring matrices rather
than hard-coded.

String convention (normative for the whole package): the gate string
"g1 g2 ... gk" denotes the matrix product G1 @ G2 @ ... @ Gk, i.e. gk is
applied first to kets.
"""

from __future__ import annotations

import cmath
import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .ring import (
    ExactUnitary,
    GATE_H,
    GATE_I,
    GATE_S,
    GATE_S_DAG,
    GATE_T,
    GATE_T_DAG,
    GATE_W,
    GATE_X,
    GATE_Y,
    GATE_Z,
)


class ParseError(ValueError):
    """Raised on an illegal generator symbol."""


SYLLABLES = ("T", "HT", "SHT")

# ---------------------------------------------------------------------------
# Clifford group tables, generated once from exact matrices.
# ---------------------------------------------------------------------------


def _build_group():
    gens = (("H", GATE_H), ("S", GATE_S))
    mats = [ExactUnitary.identity()]
    words = [""]
    index = {mats[0].key(): 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for name, g in gens:
            m = mats[i] @ g
            k = m.key()
            if k not in index:
                index[k] = len(mats)
                mats.append(m)
                words.append(words[i] + name)
                queue.append(len(mats) - 1)
    if len(mats) != 192:
        raise AssertionError(f"Clifford closure has {len(mats)} elements, expected 192")
    return mats, words, index


_MATS, _WORDS, _INDEX = _build_group()


def _first_entry_arg(m: ExactUnitary) -> float:
    for x in m.e:
        if not x.is_zero():
            return cmath.phase(x.to_complex())
    raise AssertionError("zero matrix in Clifford group")


def _canonicalize():
    """Phase gauge: canonical rep has first nonzero entry with arg in (-pi/8, pi/8]."""
    decomp = [None] * 192
    canon_ids = set()
    for i, m in enumerate(_MATS):
        e = round(_first_entry_arg(m) / (math.pi / 4.0)) % 8
        rep = m.scale_omega(-e)
        rep_id = _INDEX[rep.key()]
        canon_ids.add(rep_id)
        decomp[i] = (rep_id, e)
    if len(canon_ids) != 24:
        raise AssertionError("expected 24 projective Clifford classes")
    order = sorted(canon_ids, key=lambda i: (len(_WORDS[i]), _WORDS[i]))
    pos = {gid: j for j, gid in enumerate(order)}
    return [(pos[rid], e) for rid, e in decomp], order


_DECOMP, _CLIFF24_IDS = _canonicalize()
# (tail24, omega) -> 192-group id
_CLIFF_ID = {}
for _j, _gid in enumerate(_CLIFF24_IDS):
    for _e in range(8):
        _CLIFF_ID[(_j, _e)] = _INDEX[_MATS[_gid].scale_omega(_e).key()]

_GEN_MATS = {
    "H": GATE_H, "S": GATE_S, "X": GATE_X, "Y": GATE_Y, "Z": GATE_Z,
    "W": GATE_W, "s": GATE_S_DAG,
}
_RIGHT_MUL = {
    g: [_INDEX[(_MATS[i] @ m).key()] for i in range(192)]
    for g, m in _GEN_MATS.items()
}

_P_SUB = set()
for _a in range(4):
    for _b in range(2):
        for _c in range(8):
            _m = ExactUnitary.identity()
            for _ in range(_a):
                _m = _m @ GATE_S
            if _b:
                _m = _m @ GATE_X
            _m = _m.scale_omega(_c)
            _P_SUB.add(_INDEX[_m.key()])
if len(_P_SUB) != 64:
    raise AssertionError("subgroup <S, X, omega> must have 64 elements")

_AXIS_MATS = (GATE_I, GATE_H, GATE_S @ GATE_H)  # I, H, SH


def _factorize():
    """For each group element C: the unique (axis, p) with C = AXIS[axis] @ P."""
    fact = [None] * 192
    for i in range(192):
        found = None
        for axis, L in enumerate(_AXIS_MATS):
            pid = _INDEX[(L.dagger() @ _MATS[i]).key()]
            if pid in _P_SUB:
                if found is not None:
                    raise AssertionError("non-unique coset factorization")
                found = (axis, pid)
        if found is None:
            raise AssertionError("coset factorization failed")
        fact[i] = found
    return fact


_TFACT = _factorize()

# P @ T = T @ P' for P in <S, X, omega>
_PCOMM = {}
for _pid in _P_SUB:
    _pp = GATE_T.dagger() @ _MATS[_pid] @ GATE_T
    _ppid = _INDEX[_pp.key()]
    if _ppid not in _P_SUB:
        raise AssertionError("T conjugation left the subgroup")
    _PCOMM[_pid] = _ppid

# residue * S * P for the syllable-merge case (residue of T/HT/SHT after
# stripping its trailing T)
_TMERGE = {}
for _axis, _L in enumerate(_AXIS_MATS):
    _base = _L @ GATE_S
    _TMERGE[_axis] = {pid: _INDEX[(_base @ _MATS[pid]).key()] for pid in _P_SUB}

_SYL_MATS = {"T": GATE_T, "HT": GATE_H @ GATE_T, "SHT": GATE_S @ GATE_H @ GATE_T}
_SYL_AXIS = {"T": 0, "HT": 1, "SHT": 2}


# ---------------------------------------------------------------------------
# GateWord
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GateWord:
    """MA normal form: syllables, Clifford tail index (0..23), omega exponent."""

    syllables: tuple
    clifford_tail: int
    omega_exp: int

    @property
    def tcount(self) -> int:
        return len(self.syllables)

    def word_str(self) -> str:
        return "".join(self.syllables) + _WORDS[_CLIFF24_IDS[self.clifford_tail]]

    def to_json(self) -> str:
        return json.dumps({"word": self.word_str(), "omega_exp": self.omega_exp})

    @classmethod
    def from_json(cls, payload: str) -> "GateWord":
        d = json.loads(payload)
        w = ma_normalize(d["word"])
        return cls(w.syllables, w.clifford_tail, (w.omega_exp + d.get("omega_exp", 0)) % 8)

    def __str__(self) -> str:
        return self.word_str() + ("W" * self.omega_exp)


IDENTITY_WORD = GateWord((), 0, 0)


class _NormalForm:
    """Mutable accumulator used by ma_normalize."""

    __slots__ = ("syllables", "tail")

    def __init__(self):
        self.syllables = []
        self.tail = 0  # 192-group id

    def append_clifford(self, g: str):
        self.tail = _RIGHT_MUL[g][self.tail]

    def append_t(self):
        axis, pid = _TFACT[self.tail]
        pid = _PCOMM[pid]
        if axis == 1:
            self.syllables.append("HT")
            self.tail = pid
        elif axis == 2:
            self.syllables.append("SHT")
            self.tail = pid
        elif not self.syllables:
            self.syllables.append("T")
            self.tail = pid
        else:
            last = self.syllables.pop()
            self.tail = _TMERGE[_SYL_AXIS[last]][pid]

    def to_word(self) -> GateWord:
        tail24, omega = _DECOMP[self.tail]
        return GateWord(tuple(self.syllables), tail24, omega)


def ma_normalize(raw: str) -> GateWord:
    """Normalize a generator string over H,S,T,X,Y,Z,W (s,t = daggers).

    The returned word evaluates exactly to the same matrix, omega phase
    included.  Normalization is idempotent.
    """
    nf = _NormalForm()
    for ch in raw:
        if ch.isspace() or ch == "I":
            continue
        if ch == "T":
            nf.append_t()
        elif ch == "t":
            nf.append_t()
            nf.append_clifford("s")
        elif ch in _GEN_MATS:
            nf.append_clifford(ch)
        else:
            raise ParseError(f"illegal generator symbol {ch!r}")
    return nf.to_word()


def normalize_word(word: GateWord) -> GateWord:
    """Re-normalize a GateWord (used to canonicalize concatenations)."""
    w = ma_normalize(word.word_str())
    return GateWord(w.syllables, w.clifford_tail, (w.omega_exp + word.omega_exp) % 8)


def concat(*words: GateWord) -> GateWord:
    """Normal form of the left-to-right product of the given words."""
    s = "".join(w.word_str() for w in words)
    omega = sum(w.omega_exp for w in words) % 8
    w = ma_normalize(s)
    return GateWord(w.syllables, w.clifford_tail, (w.omega_exp + omega) % 8)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def eval_exact(word: GateWord) -> ExactUnitary:
    """Exact matrix of the word (application order: last gate hits kets first)."""
    m = None
    for s in word.syllables:
        m = _SYL_MATS[s] if m is None else m @ _SYL_MATS[s]
    tail = _MATS[_CLIFF_ID[(word.clifford_tail, word.omega_exp)]]
    return tail if m is None else m @ tail


def eval_float(word: GateWord) -> np.ndarray:
    """Double-precision image of eval_exact."""
    return eval_exact(word).to_array()


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _syllable_seqs(t: int):
    """All syllable sequences of length t, deterministic order (T < HT < SHT)."""
    if t == 0:
        yield ()
        return
    firsts = SYLLABLES
    rest = ("HT", "SHT")

    def extend(prefix, depth):
        if depth == t:
            yield prefix
            return
        for s in rest:
            yield from extend(prefix + (s,), depth + 1)

    for f in firsts:
        yield from extend((f,), 1)


def enumerate_ma(t_max: int, phase_quotient: bool = False):
    """Stream all distinct Clifford+T operators with T-count <= t_max.

    With phases included the count at cutoff t is 192*(3*2^t - 2) (192 at
    t = 0); with ``phase_quotient`` the omega loop is skipped and the count
    is 24*(3*2^t - 2).  By MA uniqueness every emitted word is a distinct
    matrix.
    """
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    omegas = (0,) if phase_quotient else range(8)
    for t in range(t_max + 1):
        for seq in _syllable_seqs(t):
            for tail in range(24):
                for omega in omegas:
                    yield GateWord(seq, tail, omega)


def ma_count(t: int, phase_quotient: bool = False) -> int:
    """Closed-form operator count at T-count cutoff t."""
    base = 24 if phase_quotient else 192
    return base if t == 0 else base * (3 * 2**t - 2)


def clifford_tail_count() -> int:
    return 24


def tail_matrix(tail24: int, omega: int = 0) -> ExactUnitary:
    return _MATS[_CLIFF_ID[(tail24, omega % 8)]]


def tail_index_of(name: str) -> int:
    """Tail index whose canonical matrix equals the given generator string (mod phase)."""
    w = ma_normalize(name)
    if w.syllables:
        raise ValueError(f"{name!r} is not a Clifford")
    return w.clifford_tail


# float matrices reused by the synthesis scan
SYL_FLOAT = {s: m.to_array() for s, m in _SYL_MATS.items()}
TAIL_FLOAT = np.stack([_MATS[_CLIFF_ID[(j, 0)]].to_array() for j in range(24)])
