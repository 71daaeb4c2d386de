"""Exact arithmetic for single-qubit Clifford+T matrix entries.

Every entry of a Clifford+T unitary lives in Z[omega]/sqrt(2)^k with
omega = exp(i*pi/4).  ``RingElem`` stores the integer coefficients of
(1, omega, omega^2, omega^3) together with a shared sqrt(2) denominator
exponent ``k``; arithmetic is exact and the representation is kept
canonical (no common sqrt(2) factor left in the numerator).

``ExactUnitary`` is a 2x2 matrix of ring elements plus a residual global
phase tracked as an integer power of omega^(1/2) mod 16.  All matrices
built from gate words have the phase folded into the entries, so the
``phase`` field stays 0 there; it exists for callers that want to strip
determinants.
"""

from __future__ import annotations

import cmath
import math

_SQRT2 = math.sqrt(2.0)


class RingElem:
    """(a + b*omega + c*omega^2 + d*omega^3) / sqrt(2)^k with omega = exp(i*pi/4)."""

    __slots__ = ("a", "b", "c", "d", "k")

    def __init__(self, a: int, b: int, c: int, d: int, k: int = 0):
        if k < 0:
            raise ValueError("denominator exponent must be non-negative")
        # canonical form: pull out sqrt(2) factors, zero has k = 0
        while k > 0:
            if a == 0 and b == 0 and c == 0 and d == 0:
                k = 0
                break
            if (a - c) % 2 or (b - d) % 2:
                break
            a, b, c, d = (b - d) // 2, (a + c) // 2, (b + d) // 2, (c - a) // 2
            k -= 1
        self.a, self.b, self.c, self.d, self.k = a, b, c, d, k

    @classmethod
    def zero(cls) -> "RingElem":
        return cls(0, 0, 0, 0, 0)

    @classmethod
    def one(cls) -> "RingElem":
        return cls(1, 0, 0, 0, 0)

    @classmethod
    def omega_pow(cls, n: int) -> "RingElem":
        n %= 8
        sign = 1 if n < 4 else -1
        coeffs = [0, 0, 0, 0]
        coeffs[n % 4] = sign
        return cls(*coeffs, 0)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0 and self.d == 0

    def key(self) -> tuple:
        return (self.a, self.b, self.c, self.d, self.k)

    def __eq__(self, other) -> bool:
        return isinstance(other, RingElem) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"RingElem({self.a}, {self.b}, {self.c}, {self.d}, k={self.k})"

    def __neg__(self) -> "RingElem":
        return RingElem(-self.a, -self.b, -self.c, -self.d, self.k)

    def _lift(self, dk: int) -> tuple:
        """Numerator coefficients after multiplying by sqrt(2)^dk."""
        a, b, c, d = self.a, self.b, self.c, self.d
        for _ in range(dk):
            a, b, c, d = b - d, a + c, b + d, c - a
        return a, b, c, d

    def __add__(self, other: "RingElem") -> "RingElem":
        k = max(self.k, other.k)
        a1, b1, c1, d1 = self._lift(k - self.k)
        a2, b2, c2, d2 = other._lift(k - other.k)
        return RingElem(a1 + a2, b1 + b2, c1 + c2, d1 + d2, k)

    def __sub__(self, other: "RingElem") -> "RingElem":
        return self + (-other)

    def __mul__(self, other: "RingElem") -> "RingElem":
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = other.a, other.b, other.c, other.d
        return RingElem(
            a1 * a2 - b1 * d2 - c1 * c2 - d1 * b2,
            a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2,
            a1 * c2 + b1 * b2 + c1 * a2 - d1 * d2,
            a1 * d2 + b1 * c2 + c1 * b2 + d1 * a2,
            self.k + other.k,
        )

    def conj(self) -> "RingElem":
        return RingElem(self.a, -self.d, -self.c, -self.b, self.k)

    def to_complex(self) -> complex:
        re = self.a + (self.b - self.d) / _SQRT2
        im = self.c + (self.b + self.d) / _SQRT2
        scale = _SQRT2 ** (-self.k)
        return complex(re * scale, im * scale)


_ZERO = RingElem.zero()
_ONE = RingElem.one()


class ExactUnitary:
    """2x2 matrix over the ring, with a residual half-omega global phase.

    ``phase`` counts powers of exp(i*pi/8) mod 16 ("omega^(phase/2)").
    Gate-word evaluation always absorbs phases into the entries, so
    constructed values carry phase 0.
    """

    __slots__ = ("e", "phase")

    def __init__(self, entries, phase: int = 0):
        self.e = tuple(entries)  # (e00, e01, e10, e11)
        if len(self.e) != 4:
            raise ValueError("expected 4 entries (row-major 2x2)")
        self.phase = phase % 16

    @classmethod
    def identity(cls) -> "ExactUnitary":
        return cls((_ONE, _ZERO, _ZERO, _ONE))

    def key(self) -> tuple:
        return tuple(x.key() for x in self.e) + (self.phase,)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactUnitary) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"ExactUnitary({self.e!r}, phase={self.phase})"

    def __matmul__(self, other: "ExactUnitary") -> "ExactUnitary":
        a, b, c, d = self.e
        e, f, g, h = other.e
        return ExactUnitary(
            (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h),
            self.phase + other.phase,
        )

    def dagger(self) -> "ExactUnitary":
        a, b, c, d = self.e
        return ExactUnitary(
            (a.conj(), c.conj(), b.conj(), d.conj()), -self.phase
        )

    def scale_omega(self, n: int) -> "ExactUnitary":
        """Multiply all entries by omega^n (exact, phase field untouched)."""
        w = RingElem.omega_pow(n)
        return ExactUnitary(tuple(w * x for x in self.e), self.phase)

    def is_unitary(self) -> bool:
        p = self.dagger() @ self
        a, b, c, d = p.e
        return a == _ONE and d == _ONE and b.is_zero() and c.is_zero()

    def det(self) -> RingElem:
        a, b, c, d = self.e
        return a * d - b * c

    def to_array(self):
        import numpy as np

        m = np.array(
            [[self.e[0].to_complex(), self.e[1].to_complex()],
             [self.e[2].to_complex(), self.e[3].to_complex()]],
            dtype=complex,
        )
        if self.phase:
            m = m * cmath.exp(1j * math.pi * self.phase / 8.0)
        return m


def _mat(rows) -> ExactUnitary:
    return ExactUnitary(tuple(rows))


# exact generator matrices; H carries the 1/sqrt(2) in k=1 entries
GATE_I = ExactUnitary.identity()
GATE_T = _mat([_ONE, _ZERO, _ZERO, RingElem.omega_pow(1)])
GATE_S = _mat([_ONE, _ZERO, _ZERO, RingElem.omega_pow(2)])
GATE_Z = _mat([_ONE, _ZERO, _ZERO, RingElem.omega_pow(4)])
GATE_X = _mat([_ZERO, _ONE, _ONE, _ZERO])
GATE_Y = _mat([_ZERO, -RingElem.omega_pow(2), RingElem.omega_pow(2), _ZERO])
GATE_H = _mat([
    RingElem(1, 0, 0, 0, 1),
    RingElem(1, 0, 0, 0, 1),
    RingElem(1, 0, 0, 0, 1),
    RingElem(-1, 0, 0, 0, 1),
])
GATE_W = GATE_I.scale_omega(1)  # global phase omega
GATE_S_DAG = _mat([_ONE, _ZERO, _ZERO, RingElem.omega_pow(6)])
GATE_T_DAG = _mat([_ONE, _ZERO, _ZERO, RingElem.omega_pow(7)])
