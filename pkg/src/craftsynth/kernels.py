"""Hot numeric kernels for the synthesis scan.

Each kernel has a pure-numpy implementation (`*_numpy`) and a numba
`@njit` build; the public name dispatches on the CRAFTSYNTH_BACKEND
environment flag (see `_accel`).  The synthesis inner loop evaluates
millions of 2x2 products and Bloch-rotation fingerprints, which is where
the runtime goes.

Fingerprints: fp(U) is the (X, Y) column pair of the Bloch rotation
R[a,b] = tr(P_a U P_b U^dag)/2, a 6-vector.  It is global-phase
invariant and ||fp(U) - fp(V)||_2 <= ||R_U - R_V||_F = sqrt(8) d(U, V),
so a radius-sqrt(8)*eps lookup cannot miss an eps-close candidate.
"""

import numpy as np

from ._accel import USE_NUMBA, maybe_njit

FP_DIM = 6
FP_RADIUS_FACTOR = np.sqrt(8.0)


def fingerprints_numpy(w: np.ndarray) -> np.ndarray:
    """Bloch-rotation fingerprints for a batch of 2x2 unitaries [n,2,2]."""
    a, b = w[:, 0, 0], w[:, 0, 1]
    c, d = w[:, 1, 0], w[:, 1, 1]
    m01 = a * np.conj(d) + b * np.conj(c)        # W X W^dag upper entry
    n01 = -1j * a * np.conj(d) + 1j * b * np.conj(c)  # W Y W^dag upper entry
    out = np.empty((w.shape[0], FP_DIM))
    out[:, 0] = m01.real                                  # R_xX
    out[:, 1] = -m01.imag                                 # R_yX
    out[:, 2] = (a * np.conj(b)).real - (c * np.conj(d)).real  # R_zX
    out[:, 3] = n01.real                                  # R_xY
    out[:, 4] = -n01.imag                                 # R_yY
    out[:, 5] = (a * np.conj(b)).imag - (c * np.conj(d)).imag  # R_zY
    return out


def adjoint_target_fingerprints_numpy(a_batch: np.ndarray,
                                      target: np.ndarray) -> np.ndarray:
    """Fingerprints of A^dag @ target for each A in the batch."""
    w = np.einsum("nji,jk->nik", a_batch.conj(), target)
    return fingerprints_numpy(w)


def distances_to_target_numpy(w: np.ndarray, target: np.ndarray) -> np.ndarray:
    """d(W_n, target) = sqrt(1 - |tr(W^dag T)|^2/4) for a batch."""
    tr = np.einsum("nji,ji->n", w.conj(), target)
    q = np.minimum(np.abs(tr) / 2.0, 1.0)
    return np.sqrt(np.maximum(0.0, 1.0 - q * q))


def _fingerprints_loop(w, out):
    for n in range(w.shape[0]):
        a = w[n, 0, 0]
        b = w[n, 0, 1]
        c = w[n, 1, 0]
        d = w[n, 1, 1]
        m01 = a * np.conj(d) + b * np.conj(c)
        n01 = -1j * a * np.conj(d) + 1j * b * np.conj(c)
        ab = a * np.conj(b)
        cd = c * np.conj(d)
        out[n, 0] = m01.real
        out[n, 1] = -m01.imag
        out[n, 2] = ab.real - cd.real
        out[n, 3] = n01.real
        out[n, 4] = -n01.imag
        out[n, 5] = ab.imag - cd.imag
    return out


def _adjoint_target_fingerprints_loop(a_batch, t00, t01, t10, t11, out):
    for n in range(a_batch.shape[0]):
        a00 = np.conj(a_batch[n, 0, 0])
        a10 = np.conj(a_batch[n, 1, 0])
        a01 = np.conj(a_batch[n, 0, 1])
        a11 = np.conj(a_batch[n, 1, 1])
        w00 = a00 * t00 + a10 * t10
        w01 = a00 * t01 + a10 * t11
        w10 = a01 * t00 + a11 * t10
        w11 = a01 * t01 + a11 * t11
        m01 = w00 * np.conj(w11) + w01 * np.conj(w10)
        n01 = -1j * w00 * np.conj(w11) + 1j * w01 * np.conj(w10)
        ab = w00 * np.conj(w01)
        cd = w10 * np.conj(w11)
        out[n, 0] = m01.real
        out[n, 1] = -m01.imag
        out[n, 2] = ab.real - cd.real
        out[n, 3] = n01.real
        out[n, 4] = -n01.imag
        out[n, 5] = ab.imag - cd.imag
    return out


def _distances_loop(w, t00, t01, t10, t11, out):
    for n in range(w.shape[0]):
        tr = (np.conj(w[n, 0, 0]) * t00 + np.conj(w[n, 1, 0]) * t10
              + np.conj(w[n, 0, 1]) * t01 + np.conj(w[n, 1, 1]) * t11)
        q = abs(tr) / 2.0
        if q > 1.0:
            q = 1.0
        out[n] = np.sqrt(max(0.0, 1.0 - q * q))
    return out


_fingerprints_jit = maybe_njit(cache=True)(_fingerprints_loop)
_adjoint_fp_jit = maybe_njit(cache=True)(_adjoint_target_fingerprints_loop)
_distances_jit = maybe_njit(cache=True)(_distances_loop)


def fingerprints_numba(w: np.ndarray) -> np.ndarray:
    out = np.empty((w.shape[0], FP_DIM))
    return _fingerprints_jit(np.ascontiguousarray(w), out)


def adjoint_target_fingerprints_numba(a_batch, target):
    out = np.empty((a_batch.shape[0], FP_DIM))
    t = np.asarray(target, dtype=complex)
    return _adjoint_fp_jit(np.ascontiguousarray(a_batch),
                           t[0, 0], t[0, 1], t[1, 0], t[1, 1], out)


def distances_to_target_numba(w, target):
    out = np.empty(w.shape[0])
    t = np.asarray(target, dtype=complex)
    return _distances_jit(np.ascontiguousarray(w),
                          t[0, 0], t[0, 1], t[1, 0], t[1, 1], out)


if USE_NUMBA:
    fingerprints = fingerprints_numba
    adjoint_target_fingerprints = adjoint_target_fingerprints_numba
    distances_to_target = distances_to_target_numba
else:
    fingerprints = fingerprints_numpy
    adjoint_target_fingerprints = adjoint_target_fingerprints_numpy
    distances_to_target = distances_to_target_numpy
