import numpy as np
import pytest

from craftsynth.channels import rx, rz, unitary_diamond
from craftsynth.cliffordt import eval_float, ma_normalize
from craftsynth.synthesis import (
    BudgetExceeded,
    SynthRequest,
    SynthResult,
    axial_decompose,
    register_backend,
    seq_tuple,
    synth_rz,
    synth_su2,
    synth_via_axial,
)


def haar_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q @ np.diag(np.diag(r) / np.abs(np.diag(r)))


def test_seq_tuple_order():
    assert seq_tuple(0, 0) == ()
    assert seq_tuple(1, 2) == ("SHT",)
    assert seq_tuple(3, 0) == ("T", "HT", "HT")
    assert seq_tuple(3, 3) == ("T", "SHT", "SHT")
    assert seq_tuple(2, 5) == ("SHT", "SHT")


def test_target_in_gate_set():
    h = eval_float(ma_normalize("H"))
    res = synth_su2(SynthRequest(target=h, epsilon=1e-3))
    assert res.tcount == 0
    assert res.achieved == 0.0

    t = eval_float(ma_normalize("T"))
    res = synth_su2(SynthRequest(target=t, epsilon=1e-3))
    assert res.tcount == 1
    assert res.achieved <= 1e-12


def test_synth_rz_t_gate():
    res = synth_rz(np.pi / 4, 1e-3)
    assert res.tcount == 1
    assert res.achieved <= 1e-12
    res = synth_rz(0.0, 1e-3)
    assert res.tcount == 0
    assert res.achieved <= 1e-12


def test_synth_rz_contract():
    res = synth_rz(np.pi / 32, 3e-3)
    assert res.achieved <= 3e-3
    assert unitary_diamond(rz(np.pi / 32), eval_float(res.word)) <= 3e-3


def test_synth_su2_contract_and_oracle():
    res = synth_su2(SynthRequest(target=rz(np.pi / 128), epsilon=1e-2))
    assert res.achieved <= 1e-2
    assert res.tcount <= 32
    # independent check through exact evaluation
    assert unitary_diamond(rz(np.pi / 128), eval_float(res.word)) <= 1e-2


def test_not_unitary_rejected():
    with pytest.raises(Exception):
        SynthRequest(target=np.array([[1.0, 0.2], [0, 1.0]]), epsilon=1e-2)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        synth_su2(SynthRequest(target=rz(0.61257), epsilon=1e-2, budget=2))


def test_tcount_monotone_in_eps():
    rng = np.random.default_rng(10)
    grid = [0.15, 0.1, 0.06, 0.03, 0.015]
    for _ in range(20):
        u = haar_unitary(rng)
        tcounts = [synth_su2(SynthRequest(target=u, epsilon=e)).tcount for e in grid]
        assert all(a <= b for a, b in zip(tcounts, tcounts[1:]))


def test_determinism():
    u = rz(0.7321)
    r1 = synth_su2(SynthRequest(target=u, epsilon=5e-3))
    r2 = synth_su2(SynthRequest(target=u, epsilon=5e-3))
    assert r1.word == r2.word
    assert r1.achieved == r2.achieved


def test_axial_decompose_trivial():
    assert axial_decompose(np.eye(2)) == (0.0, 0.0, 0.0)
    t1, t2, t3 = axial_decompose(rx(0.3))
    assert abs(t1) < 1e-12 and abs(t2 - 0.3) < 1e-12 and abs(t3) < 1e-12


def test_axial_decompose_haar_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(100):
        u = haar_unitary(rng)
        t1, t2, t3 = axial_decompose(u)
        assert -np.pi < t1 <= np.pi and 0 <= t2 <= np.pi and -np.pi < t3 <= np.pi
        v = rz(t1) @ rx(t2) @ rz(t3)
        phase = np.trace(v.conj().T @ u)
        phase /= abs(phase)
        assert np.linalg.norm(u - phase * v, ord=2) < 1e-12


def test_synth_via_axial_identity():
    res = synth_via_axial(np.eye(2), 1e-2)
    assert res.tcount == 0
    assert res.achieved <= 1e-12


def test_synth_via_axial_rz_matches_direct_path():
    res_ax = synth_via_axial(rz(0.2), 1e-2)
    res_rz = synth_rz(0.2, 1e-2 / 3)
    assert res_ax.achieved <= res_rz.achieved + 1e-15


def test_synth_via_axial_haar():
    rng = np.random.default_rng(12)
    for _ in range(20):
        u = haar_unitary(rng)
        res = synth_via_axial(u, 1e-2)
        assert res.achieved <= 1e-2
        assert unitary_diamond(u, eval_float(res.word)) <= 1e-2


def test_backend_registry():
    calls = []

    def fake(theta, eps, budget):
        calls.append((theta, eps))
        return synth_rz(theta, eps, budget=budget, backend="mitm")

    register_backend("fake", fake)
    res = synth_rz(0.1, 1e-2, backend="fake")
    assert calls and isinstance(res, SynthResult)
