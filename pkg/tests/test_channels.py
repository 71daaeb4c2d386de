import numpy as np
import pytest

from craftsynth import channels as ch
from craftsynth.channels import (
    ChiDiag,
    NotCPTP,
    NotUnitary,
    Ptm,
    SingularPauliPart,
    chi_to_ptm,
    compose_ptm,
    gram_to_chi,
    invert_unitary_ptm,
    magic_vec,
    mixture_diamond,
    nonpauli_residual,
    ptm_of_channel,
    ptm_of_kraus,
    ptm_of_unitary,
    ptm_to_chi,
    rx,
    ry,
    rz,
    unitary_diamond,
    unitary_from_magic_vec,
)

PAULIS = ch.PAULIS


def haar_unitary(rng, d=2):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q @ np.diag(np.diag(r) / np.abs(np.diag(r)))


# --- independent oracles -----------------------------------------------------


def choi_matrix(kraus):
    """Oracle Choi: J = sum_k (I (x) K)|Omega><Omega|(I (x) K)^dag."""
    j = np.zeros((4, 4), dtype=complex)
    for k in kraus:
        w = ch.choi_vector(k)
        j += np.outer(w, w.conj())
    return j


def magic_gram_oracle(kraus):
    """0.5 * [J]_MB computed directly from the Choi matrix."""
    j = choi_matrix(kraus)
    return 0.5 * (ch.MAGIC_COLS.conj().T @ j @ ch.MAGIC_COLS)


def chi_oracle(kraus):
    """chi in (I,X,Y,Z) order by solving vec(J) = sum chi_ab vec(v_a v_b+)."""
    vs = [ch.choi_vector(PAULIS[lab]) for lab in ch.PAULI_ORDER]
    cols = np.array([np.outer(va, vb.conj()).reshape(16)
                     for va in vs for vb in vs]).T
    sol = np.linalg.lstsq(cols, choi_matrix(kraus).reshape(16), rcond=None)[0]
    return sol.reshape(4, 4)


def ptm_oracle(kraus, n=1):
    pb = ch.pauli_basis(n)
    d = 2**n
    g = np.zeros((4**n, 4**n))
    for i in range(4**n):
        for j in range(4**n):
            acc = 0.0
            for k in kraus:
                acc += np.trace(pb[i] @ k @ pb[j] @ k.conj().T).real
            g[i, j] = acc / d
    return g


def diamond_eig_oracle(u, v):
    """Half Choi trace distance from the 4x4 eigenvalues."""
    dj = choi_matrix([u]) - choi_matrix([v])
    return 0.25 * np.sum(np.abs(np.linalg.eigvalsh(dj)))


# --- magic_vec ---------------------------------------------------------------


def test_magic_vec_identity():
    assert np.allclose(magic_vec(np.eye(2)), [1, 0, 0, 0], atol=1e-14)


def test_magic_vec_pauli_slots():
    for lab, slot in (("Z", 1), ("X", 2), ("Y", 3)):
        r = magic_vec(PAULIS[lab])
        expected = np.zeros(4)
        expected[slot] = 1.0
        assert np.allclose(r, expected, atol=1e-14)


def test_magic_vec_rz_against_choi_oracle():
    for theta in (0.3, -1.2, 2.9):
        r = magic_vec(rz(theta))
        g = magic_gram_oracle([rz(theta)])
        assert np.max(np.abs(g - np.outer(r, r))) < 1e-12
        assert abs(abs(r[0]) - abs(np.cos(theta / 2))) < 1e-12
        assert abs(abs(r[1]) - abs(np.sin(theta / 2))) < 1e-12
        assert np.allclose(r[2:], 0, atol=1e-13)


def test_magic_vec_not_unitary():
    with pytest.raises(NotUnitary):
        magic_vec(np.array([[1.0, 0.1], [0, 1.0]]))


def test_magic_vec_round_trip_haar():
    # d = sqrt(1-q^2) floors near 1e-8 for float-level q; the channel match
    # itself is checked phase-aligned at 1e-10.
    rng = np.random.default_rng(0)
    for _ in range(1000):
        u = haar_unitary(rng)
        r = magic_vec(u)
        v = unitary_from_magic_vec(r)
        assert np.max(np.abs(v.conj().T @ v - np.eye(2))) < 1e-10
        phase = np.trace(v.conj().T @ u)
        phase /= abs(phase)
        assert np.max(np.abs(u - phase * v)) < 1e-10
        assert unitary_diamond(u, v) < 1e-7


# --- diamond distances -------------------------------------------------------


def test_unitary_diamond_rz():
    for theta in (0.1, 0.9, 2.2):
        d = unitary_diamond(np.eye(2), rz(theta))
        assert abs(d - abs(np.sin(theta / 2))) < 1e-12
        assert abs(d - diamond_eig_oracle(np.eye(2), rz(theta))) < 1e-12


def test_unitary_diamond_trivial():
    rng = np.random.default_rng(1)
    u = haar_unitary(rng)
    assert unitary_diamond(u, u) == 0.0
    assert abs(unitary_diamond(np.eye(2), PAULIS["X"]) - 1.0) < 1e-14


def test_unitary_diamond_matches_choi_oracle_haar():
    rng = np.random.default_rng(2)
    for _ in range(50):
        u, v = haar_unitary(rng), haar_unitary(rng)
        assert abs(unitary_diamond(u, v) - diamond_eig_oracle(u, v)) < 1e-11


def test_mixture_diamond_rank1():
    e1 = np.array([1.0, 0, 0, 0])
    assert mixture_diamond(e1, np.outer(e1, e1)) == 0.0
    a = 0.137
    m = np.diag([1 - a**2, a**2, 0, 0])
    assert abs(mixture_diamond(e1, m) - a**2) < 1e-14


def test_mixture_diamond_random_psd_svd_oracle():
    rng = np.random.default_rng(3)
    e1 = np.array([1.0, 0, 0, 0])
    for _ in range(50):
        b = rng.normal(size=(4, 4))
        m = b @ b.T
        m /= np.trace(m)
        val = mixture_diamond(e1, m)
        oracle = 0.5 * np.sum(np.linalg.svd(np.outer(e1, e1) - m)[1])
        assert abs(val - oracle) < 1e-12


def test_mixture_diamond_rank1_matches_unitary_diamond():
    rng = np.random.default_rng(4)
    for _ in range(20):
        u, v = haar_unitary(rng), haar_unitary(rng)
        r, s = magic_vec(u), magic_vec(v)
        assert abs(mixture_diamond(r, np.outer(s, s)) - unitary_diamond(u, v)) < 1e-11


# --- chi ----------------------------------------------------------------------


def test_gram_to_chi_z_mixture():
    m = np.diag([0.99, 0.01, 0.0, 0.0])
    chi, diag = gram_to_chi(m)
    assert abs(diag.chi_ii - 0.99) < 1e-15
    assert abs(diag.chi_zz - 0.01) < 1e-15
    oracle = chi_oracle([np.sqrt(0.99) * np.eye(2), np.sqrt(0.01) * PAULIS["Z"]])
    assert np.max(np.abs(chi - oracle)) < 1e-12


def test_gram_to_chi_identity():
    chi, diag = gram_to_chi(np.diag([1.0, 0, 0, 0]))
    assert np.allclose(chi, np.diag([1.0, 0, 0, 0]), atol=1e-15)
    assert diag.p == 0.0


def test_gram_to_chi_offdiagonal_magnitude_and_oracle():
    theta = 0.23
    u = rz(theta)
    r = magic_vec(u)
    m = np.outer(r, r)
    chi, _ = gram_to_chi(m)
    oracle = chi_oracle([u])
    assert np.max(np.abs(chi - oracle)) < 1e-12
    assert abs(abs(chi[0, 3]) - abs(m[0, 1])) < 1e-13  # I-Z slot magnitude kept


def test_chi_gram_round_trip():
    rng = np.random.default_rng(5)
    b = rng.normal(size=(4, 4))
    m = b @ b.T
    m /= np.trace(m)
    chi, _ = gram_to_chi(m)
    assert np.max(np.abs(ch.chi_to_gram(chi) - m)) < 1e-12
    assert np.max(np.abs(chi - chi.conj().T)) < 1e-14
    assert abs(np.trace(chi).real - 1.0) < 1e-12


def test_gram_to_chi_diag_nonneg():
    rng = np.random.default_rng(6)
    for _ in range(20):
        d = rng.uniform(0, 1, size=4)
        d /= d.sum()
        _, diag = gram_to_chi(np.diag(d))
        assert min(diag.chi_ii, diag.chi_xx, diag.chi_yy, diag.chi_zz) >= -1e-15


# --- PTM ----------------------------------------------------------------------


def test_ptm_z_channel():
    p = 0.03
    g = ptm_of_channel([np.eye(2), PAULIS["Z"]], probs=[1 - p, p]).gamma
    assert np.allclose(g, np.diag([1, 1 - 2 * p, 1 - 2 * p, 1]), atol=1e-12)
    oracle = ptm_oracle([np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * PAULIS["Z"]])
    assert np.allclose(g, oracle, atol=1e-12)


def test_ptm_rz_block():
    delta = 0.37
    g = ptm_of_unitary(rz(delta)).gamma
    oracle = ptm_oracle([rz(delta)])
    assert np.allclose(g, oracle, atol=1e-12)
    c, s = np.cos(delta), np.sin(delta)
    assert np.allclose(g[1:3, 1:3], [[c, -s], [s, c]], atol=1e-12)
    assert np.allclose(g[0], [1, 0, 0, 0], atol=1e-13)
    assert np.allclose(g[3], [0, 0, 0, 1], atol=1e-13)


def test_ptm_identity():
    assert np.allclose(ptm_of_unitary(np.eye(2)).gamma, np.eye(4), atol=1e-14)


def test_ptm_not_cptp():
    with pytest.raises(NotCPTP):
        ptm_of_kraus([0.5 * np.eye(2)])


def test_compose_and_invert_ptm():
    rng = np.random.default_rng(7)
    u, v = haar_unitary(rng), haar_unitary(rng)
    gu, gv = ptm_of_unitary(u), ptm_of_unitary(v)
    ident = Ptm(1, np.eye(4))
    assert np.allclose(compose_ptm(gu, ident).gamma, gu.gamma)
    assert np.allclose(invert_unitary_ptm(gu).gamma @ gu.gamma, np.eye(4), atol=1e-10)
    composed = compose_ptm(gu, gv)
    assert np.allclose(composed.gamma, ptm_oracle([u @ v]), atol=1e-11)


def test_chi_ptm_round_trip():
    rng = np.random.default_rng(8)
    u = haar_unitary(rng)
    chi = chi_oracle([u])
    g = chi_to_ptm(chi)
    assert np.allclose(g, ptm_oracle([u]), atol=1e-11)
    assert np.max(np.abs(ptm_to_chi(g) - chi)) < 1e-11


# --- non-Pauli residual --------------------------------------------------------


def test_nonpauli_residual_pure_pauli():
    m = np.diag([0.97, 0.01, 0.005, 0.015])
    assert nonpauli_residual(m) < 1e-12


def test_nonpauli_residual_coherent_rz():
    for delta in (0.02, 0.005):
        r = magic_vec(rz(delta))
        res = nonpauli_residual(np.outer(r, r))
        # leading order is |sin(delta)|/2, dephasing removed
        assert abs(res - abs(np.sin(delta)) / 2) < 4 * delta**3 + 1e-12


def test_nonpauli_residual_singular():
    with pytest.raises(SingularPauliPart):
        nonpauli_residual(np.diag([0.2, 0.4, 0.2, 0.2]))


def test_chidiag_ratios():
    d = ChiDiag(0.99, 0.005, 0.003, 0.002)
    assert abs(d.p - 0.01) < 1e-15
    qx, qy, qz = d.ratios
    assert abs(qx - 0.5) < 1e-12 and abs(qy - 0.3) < 1e-12 and abs(qz - 0.2) < 1e-12


def test_rotation_gates():
    assert np.allclose(rz(np.pi / 4), np.diag([np.exp(-1j * np.pi / 8),
                                               np.exp(1j * np.pi / 8)]))
    assert np.allclose(rx(0.0), np.eye(2))
    assert np.allclose(ry(np.pi), [[0, -1], [1, 0]], atol=1e-15)
