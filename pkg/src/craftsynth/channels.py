"""Channel representations and distances for single-qubit crafting.

The workhorse is the magic basis: the orthonormal maximally-entangled
basis in which the (half-)Choi matrix of a single-qubit unitary channel
is a real rank-1 projector r r^T.  Slot order of the magic vector r is
(I, Z, X, Y); all externally visible Pauli data uses (I, X, Y, Z).

Diamond distances here are always the single-qubit Choi trace-distance
value (exact for mixed-unitary channels, reported as the metric of
record elsewhere):

    d(U, V)            = sqrt(1 - |tr(U^dag V)|^2 / 4)
    d(target, mixture) = 0.5 * || r r^T - M ||_1
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np


class NotUnitary(ValueError):
    pass


class NotCPTP(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class SingularPauliPart(ValueError):
    pass


_SQ2 = np.sqrt(2.0)

# columns: magic basis vectors Psi_1..Psi_4 in computational components
MAGIC_COLS = np.array(
    [
        [1 / _SQ2, 1j / _SQ2, 0, 0],
        [0, 0, 1j / _SQ2, 1 / _SQ2],
        [0, 0, 1j / _SQ2, -1 / _SQ2],
        [1 / _SQ2, -1j / _SQ2, 0, 0],
    ],
    dtype=complex,
)

PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PAULI_ORDER = ("I", "X", "Y", "Z")

# magic slot of each Pauli label and the Choi-vector phase it carries
_MAGIC_SLOT = {"I": 0, "Z": 1, "X": 2, "Y": 3}
_MAGIC_PHASE = np.array([1, -1j, 1j, -1j])  # indexed by (I, X, Y, Z)


def check_unitary(u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise NotUnitary(f"expected a 2x2 matrix, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > tol:
        raise NotUnitary("matrix is not unitary within tolerance")
    return u


def choi_vector(u: np.ndarray) -> np.ndarray:
    """(I (x) U)|Omega> with |Omega> = |00> + |11> (unnormalized)."""
    u = np.asarray(u, dtype=complex)
    return u.T.reshape(4)


def magic_vec(u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Real unit 4-vector r with 0.5*[J(U)]_MB = r r^T, sign-normalized."""
    u = check_unitary(u, tol)
    m = MAGIC_COLS.conj().T @ choi_vector(u) / _SQ2
    i = int(np.argmax(np.abs(m)))
    phase = m[i] / abs(m[i])
    r = (m / phase).real
    if np.max(np.abs((m / phase).imag)) > 1e-10:
        raise NotUnitary("Choi vector is not real in the magic basis")
    r = r / np.linalg.norm(r)
    return fix_sign(r)


def fix_sign(r: np.ndarray) -> np.ndarray:
    """Flip the global sign so the first non-negligible component is positive."""
    for x in r:
        if abs(x) > 1e-12:
            return r if x > 0 else -r
    return r


def unitary_from_magic_vec(r: np.ndarray) -> np.ndarray:
    """Reconstruct a unitary whose magic vector is +-r (round-trip inverse)."""
    w = _SQ2 * (MAGIC_COLS @ np.asarray(r, dtype=complex))
    return w.reshape(2, 2).T


def unitary_diamond(u: np.ndarray, v: np.ndarray) -> float:
    """sqrt(1 - |tr(U^dag V)|^2/4); equals half the Choi trace distance.

    Evaluated through the phase-aligned Frobenius gap, which is exact for
    nearly identical inputs where 1 - q^2 would lose all precision.
    """
    u = check_unitary(u)
    v = check_unitary(v)
    tr = np.trace(u.conj().T @ v)
    q = min(abs(tr) / 2.0, 1.0)
    if abs(tr) < 1e-300:
        return 1.0
    gap_sq = np.sum(np.abs(u - (np.conj(tr) / abs(tr)) * v) ** 2)  # = 4(1 - q)
    return float(np.sqrt(min(1.0, gap_sq * (1.0 + q) / 4.0)))


def mixture_diamond(target_r: np.ndarray, m: np.ndarray) -> float:
    """0.5 * || r r^T - M ||_1 via symmetric eigendecomposition."""
    r = np.asarray(target_r, dtype=float)
    e = np.outer(r, r) - np.asarray(m, dtype=float)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(0.5 * (e + e.T)))))


def gram_offdiag_mass(m: np.ndarray) -> float:
    """Sum of |M_kk'| over the 6 unordered off-diagonal pairs."""
    m = np.asarray(m, dtype=float)
    iu = np.triu_indices(4, k=1)
    return float(np.sum(np.abs(m[iu])))


@dataclass(frozen=True)
class ChiDiag:
    """Diagonal of the chi matrix in (I, X, Y, Z) order."""

    chi_ii: float
    chi_xx: float
    chi_yy: float
    chi_zz: float

    @property
    def p(self) -> float:
        return self.chi_xx + self.chi_yy + self.chi_zz

    @property
    def ratios(self) -> tuple:
        p = self.p
        if p <= 0:
            return (0.0, 0.0, 0.0)
        return (self.chi_xx / p, self.chi_yy / p, self.chi_zz / p)

    def as_dict(self) -> dict:
        qx, qy, qz = self.ratios
        return {
            "chi_ii": self.chi_ii, "chi_xx": self.chi_xx,
            "chi_yy": self.chi_yy, "chi_zz": self.chi_zz,
            "p": self.p, "q_x": qx, "q_y": qy, "q_z": qz,
        }


def gram_to_chi(m: np.ndarray):
    """Full chi matrix in (I,X,Y,Z) order plus its diagonal.

    The magic-basis Choi vectors of (I, Z, X, Y) carry phases (1, -i, -i, i),
    so chi_ab = conj(phi_a) * phi_b * M[slot(a), slot(b)].
    """
    m = np.asarray(m, dtype=float)
    chi = np.empty((4, 4), dtype=complex)
    for a, la in enumerate(PAULI_ORDER):
        for b, lb in enumerate(PAULI_ORDER):
            chi[a, b] = (
                np.conj(_MAGIC_PHASE[a]) * _MAGIC_PHASE[b]
                * m[_MAGIC_SLOT[la], _MAGIC_SLOT[lb]]
            )
    diag = ChiDiag(*(chi[i, i].real for i in range(4)))
    return chi, diag


def chi_to_gram(chi: np.ndarray) -> np.ndarray:
    """Inverse of gram_to_chi (magic-basis Gram from an (I,X,Y,Z) chi)."""
    chi = np.asarray(chi, dtype=complex)
    m = np.empty((4, 4), dtype=complex)
    for a, la in enumerate(PAULI_ORDER):
        for b, lb in enumerate(PAULI_ORDER):
            m[_MAGIC_SLOT[la], _MAGIC_SLOT[lb]] = (
                _MAGIC_PHASE[a] * np.conj(_MAGIC_PHASE[b]) * chi[a, b]
            )
    return m


# ---------------------------------------------------------------------------
# Pauli transfer matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ptm:
    """PTM over Pauli strings in (I,X,Y,Z) lexicographic order, qubit 0 leftmost."""

    n: int
    gamma: np.ndarray

    def __post_init__(self):
        d = 4**self.n
        g = np.asarray(self.gamma, dtype=float)
        if g.shape != (d, d):
            raise DimensionMismatch(f"PTM shape {g.shape} != ({d},{d})")
        if abs(g[0, 0] - 1.0) > 1e-9 or np.max(np.abs(g[0, 1:])) > 1e-9:
            raise NotCPTP("trace-preservation row violated")
        object.__setattr__(self, "gamma", g)


_PAULI_CACHE: dict = {}


def pauli_basis(n: int):
    if n not in _PAULI_CACHE:
        mats = []
        for labels in product(PAULI_ORDER, repeat=n):
            m = np.array([[1.0 + 0j]])
            for lab in labels:
                m = np.kron(m, PAULIS[lab])
            mats.append(m)
        _PAULI_CACHE[n] = np.stack(mats)
    return _PAULI_CACHE[n]


def ptm_of_kraus(kraus, n: int = 1) -> Ptm:
    """PTM of a channel given its Kraus operators; NotCPTP on bad completeness."""
    ks = [np.asarray(k, dtype=complex) for k in kraus]
    d = 2**n
    comp = sum(k.conj().T @ k for k in ks)
    if np.max(np.abs(comp - np.eye(d))) > 1e-10:
        raise NotCPTP("Kraus completeness violated")
    pb = pauli_basis(n)
    gamma = np.zeros((4**n, 4**n))
    for k in ks:
        kp = np.einsum("ab,jbc,dc->jad", k, pb, k.conj())  # K P_j K^dag
        gamma += np.einsum("iab,jba->ij", pb, kp).real / d
    return Ptm(n, gamma)


def ptm_of_channel(ops, probs=None, n: int = 1) -> Ptm:
    """PTM from Kraus operators or from a probabilistic mixture of unitaries."""
    if probs is None:
        return ptm_of_kraus(ops, n)
    ks = [np.sqrt(p) * np.asarray(u, dtype=complex) for p, u in zip(probs, ops)]
    return ptm_of_kraus(ks, n)


def ptm_of_unitary(u: np.ndarray, n: int = 1) -> Ptm:
    return ptm_of_kraus([u], n)


def compose_ptm(a: Ptm, b: Ptm) -> Ptm:
    """Channel a after channel b."""
    if a.n != b.n:
        raise DimensionMismatch("qubit counts differ")
    return Ptm(a.n, a.gamma @ b.gamma)


def invert_unitary_ptm(u: Ptm) -> Ptm:
    """Inverse of a unitary-channel PTM (orthogonal, so the transpose)."""
    if np.max(np.abs(u.gamma @ u.gamma.T - np.eye(u.gamma.shape[0]))) > 1e-10:
        raise NotUnitary("PTM is not orthogonal (not a unitary channel)")
    return Ptm(u.n, u.gamma.T.copy())


_CHI_PTM_TENSOR = None


def _chi_ptm_tensor():
    # T[i,a,j,b] = tr(P_i P_a P_j P_b)/2 so that PTM = einsum('ab,iajb->ij', chi, T)
    global _CHI_PTM_TENSOR
    if _CHI_PTM_TENSOR is None:
        pb = pauli_basis(1)
        _CHI_PTM_TENSOR = np.einsum("ixy,ayz,jzw,bwx->iajb", pb, pb, pb, pb) / 2.0
    return _CHI_PTM_TENSOR


def chi_to_ptm(chi: np.ndarray) -> np.ndarray:
    return np.einsum("ab,iajb->ij", np.asarray(chi, dtype=complex),
                     _chi_ptm_tensor()).real


def ptm_to_chi(gamma: np.ndarray) -> np.ndarray:
    t = np.transpose(_chi_ptm_tensor(), (0, 2, 1, 3)).reshape(16, 16)
    chi = np.linalg.solve(t, np.asarray(gamma, dtype=complex).reshape(16))
    return chi.reshape(4, 4)


def choi_from_chi(chi: np.ndarray) -> np.ndarray:
    """Unnormalized Choi matrix J = sum_ab chi_ab v_a v_b^dag."""
    vs = np.stack([choi_vector(PAULIS[lab]) for lab in PAULI_ORDER])
    return np.einsum("ab,ai,bj->ij", np.asarray(chi, dtype=complex), vs, vs.conj())


def choi_trace_distance_to_identity(chi: np.ndarray) -> float:
    """(1/4) || J(E) - J(Id) ||_1, same normalization as mixture_diamond."""
    j = choi_from_chi(chi) - choi_from_chi(np.diag([1.0, 0, 0, 0]))
    j = 0.5 * (j + j.conj().T)
    return float(0.25 * np.sum(np.abs(np.linalg.eigvalsh(j))))


def nonpauli_residual(gram: np.ndarray) -> float:
    """Distance to identity after inverting the channel's own Pauli diagonal.

    The Pauli part is read off the PTM diagonal; its inverse is the
    diagonal (trace-preserving, not necessarily CP) map 1/Gamma_aa.
    """
    chi, _ = gram_to_chi(gram)
    gamma = chi_to_ptm(chi)
    d = np.diag(gamma).copy()
    if np.any(d[1:] <= 0):
        raise SingularPauliPart("PTM diagonal has a non-positive entry")
    d[0] = 1.0
    composed = np.diag(1.0 / d) @ gamma
    return choi_trace_distance_to_identity(ptm_to_chi(composed))


# rotation gates (normative sign convention: R_P(theta) = exp(-i*theta*P/2))


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]])


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)
