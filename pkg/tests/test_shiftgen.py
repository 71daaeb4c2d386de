import numpy as np
import pytest

from craftsynth.channels import magic_vec, rz, unitary_diamond
from craftsynth.shiftgen import (
    CandidateSet,
    ShiftSpec,
    build_candidates,
    build_ideal_candidates,
    feasibility_certificate,
    fibonacci_lattice,
    min_pairwise_angle,
    shift_unitary,
    sphere_vectors,
    theorem_vectors,
)

S2 = 1 / np.sqrt(2)
S3 = 1 / np.sqrt(3)


def test_pauli7_values():
    v = theorem_vectors("pauli7")
    expected = np.array([
        (-1, 0, 0), (0, -1, 0), (0, 0, 1), (S2, -S2, 0),
        (-S2, 0, -S2), (0, S2, S2), (S3, S3, -S3),
    ])
    assert np.allclose(v, expected, atol=1e-15)
    assert np.allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-15)


def test_depol9_values():
    v = theorem_vectors("depol9")
    assert v.shape == (9, 3)
    assert any(np.allclose(row, (1, 0, 0)) for row in v)
    assert any(np.allclose(row, (-1, 0, 0)) for row in v)
    assert np.allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-15)


@pytest.mark.parametrize("s", [1e-3, 1e-2, 0.3])
def test_pauli_certificate(s):
    got = feasibility_certificate("pauli", s)
    expected = -np.array([S3, S3, S3, 2 / 3, 2 / 3, 2 / 3])
    assert np.max(np.abs(got - expected)) < 1e-10


@pytest.mark.parametrize("s", [1e-3, 1e-2, 0.3])
def test_depol_certificate_negative(s):
    got = feasibility_certificate("depol", s)
    assert got.shape == (8,)
    assert np.all(got < 0)


def test_sphere_single():
    assert np.allclose(sphere_vectors(1), [[0, 0, 1]])


def test_sphere_two_antipodal():
    v = sphere_vectors(2, seed=1)
    assert np.linalg.norm(v[0] + v[1]) < 1e-6


def test_sphere_nine_spacing():
    v = sphere_vectors(9, seed=0)
    assert np.degrees(min_pairwise_angle(v)) >= 40.0
    baseline = min_pairwise_angle(fibonacci_lattice(9))
    assert min_pairwise_angle(v) >= 0.8 * baseline


def test_sphere_deterministic():
    assert np.array_equal(sphere_vectors(6, seed=3), sphere_vectors(6, seed=3))


def test_shift_unitary_distance_grid():
    rng = np.random.default_rng(0)
    for delta in [1e-6, 1e-4, 1e-2, 0.1, 0.4]:
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        u = shift_unitary(v, delta)
        assert abs(unitary_diamond(u, np.eye(2)) - delta) <= 1e-12
        r = magic_vec(u)
        assert abs(abs(r[0]) - np.sqrt(1 - delta**2)) < 1e-12
        assert np.max(np.abs(np.abs(r[1:]) - delta * np.abs(v))) < 1e-12


def test_shift_unitary_axis_conventions():
    # slot 2 of the magic vector is Z: v = (1,0,0) gives an Rz rotation
    u = shift_unitary(np.array([1.0, 0, 0]), 0.1)
    theta = 2 * np.arcsin(0.1)
    d = min(unitary_diamond(u, rz(theta)), unitary_diamond(u, rz(-theta)))
    assert d < 1e-12
    # v = (0,0,1) populates the Y slot
    u = shift_unitary(np.array([0.0, 0, 1.0]), 0.2)
    r = magic_vec(u)
    assert abs(abs(r[3]) - 0.2) < 1e-12
    assert np.allclose(r[1:3], 0, atol=1e-12)


def test_shiftspec_validation():
    with pytest.raises(ValueError):
        ShiftSpec(c=7.0, eps=0.1)  # c*eps >= 0.5
    with pytest.raises(ValueError):
        ShiftSpec(c=2.0, eps=1e-2, bigr=0)
    spec = ShiftSpec(c=2.0, eps=1e-2, vecset="pauli7+sphere:4")
    assert spec.vectors().shape == (11, 3)


def test_build_candidates_counts_and_brackets():
    spec = ShiftSpec(c=3.0, eps=0.05, bigr=1, vecset="pauli7")
    cs = build_candidates(rz(0.3), spec, use_cache=False)
    assert len(cs) == 7

    spec3 = ShiftSpec(c=3.0, eps=0.05, bigr=3, vecset="pauli7")
    cs3 = build_candidates(rz(0.3), spec3, use_cache=False)
    assert len(cs3) == 21
    for cand in cs3.candidates:
        d = unitary_diamond(cs3.target, cand.u_float)
        lo = max(0.0, (cand.rung * 3.0 / 3 - 1.0) * 0.05)
        hi = (cand.rung * 3.0 / 3 + 1.0) * 0.05
        assert lo - 1e-9 <= d <= hi + 1e-9
        assert cand.achieved <= 0.05


def test_build_candidates_cache_and_json():
    spec = ShiftSpec(c=2.0, eps=0.05, bigr=1, vecset="pauli7")
    a = build_candidates(rz(0.11), spec)
    b = build_candidates(rz(0.11), spec)
    assert a is b
    payload = a.to_json()
    assert '"rung"' in payload and '"word"' in payload


def test_ideal_candidates_exact_radius():
    spec = ShiftSpec(c=4.0, eps=2.5e-3, bigr=2, vecset="depol9")
    cs = build_ideal_candidates(np.eye(2), spec)
    assert len(cs) == 18
    for cand in cs.candidates:
        radius = cand.rung * 4.0 * 2.5e-3 / 2
        assert abs(unitary_diamond(np.eye(2), cand.u_float) - radius) < 1e-12
