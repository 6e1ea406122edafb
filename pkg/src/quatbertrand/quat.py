"""Real quaternion algebra.

A quaternion ``q = a e1 + b e2 + c e3 + d e4`` is stored with the scalar
unit ``e4 = 1`` last, so the coefficient tuple ``(a, b, c, d)`` is also the
E^4 point ``(x1, x2, x3, x4)``. Spatial quaternions (``d == 0``) are the
vectors of E^3.

The tuple-level functions (:func:`hamilton`, :func:`conj4`, :func:`cross3`)
only use ``+``, ``-`` and ``*`` on the coefficients, so they work unchanged on
floats, numpy arrays and :class:`~quatbertrand.jet.TaylorJet` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def hamilton(p, q):
    """Product of two coefficient 4-tuples ``(a, b, c, d)``.

    ``S_p S_q - <V_p, V_q> + S_p V_q + S_q V_p + V_p ^ V_q``.
    """
    pa, pb, pc, pd = p
    qa, qb, qc, qd = q
    va, vb, vc = cross3((pa, pb, pc), (qa, qb, qc))
    return (
        pd * qa + qd * pa + va,
        pd * qb + qd * pb + vb,
        pd * qc + qd * pc + vc,
        pd * qd - (pa * qa + pb * qb + pc * qc),
    )


def conj4(q):
    a, b, c, d = q
    return (-a, -b, -c, d)


def cross3(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


@dataclass(frozen=True)
class Quaternion:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    @classmethod
    def from_point(cls, x) -> "Quaternion":
        """E^3 or E^4 coordinates to a quaternion (E^3 points become spatial)."""
        x = [float(v) for v in x]
        if len(x) == 3:
            x.append(0.0)
        if len(x) != 4:
            raise ValueError(f"expected 3 or 4 coordinates, got {len(x)}")
        return cls(*x)

    @property
    def scalar(self) -> float:
        return self.d

    @property
    def vector(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __iter__(self):
        return iter(self.as_tuple())

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(*(x + y for x, y in zip(self, other)))

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(*(x - y for x, y in zip(self, other)))

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return mul(self, other)
        return Quaternion(*(x * other for x in self))

    def __rmul__(self, other):
        return Quaternion(*(other * x for x in self))

    def conj(self) -> "Quaternion":
        return conj(self)

    def norm(self) -> float:
        return norm(self)


E1 = Quaternion(1.0, 0.0, 0.0, 0.0)
E2 = Quaternion(0.0, 1.0, 0.0, 0.0)
E3 = Quaternion(0.0, 0.0, 1.0, 0.0)
E4 = Quaternion(0.0, 0.0, 0.0, 1.0)


def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    return Quaternion(*hamilton(p.as_tuple(), q.as_tuple()))


def conj(q: Quaternion) -> Quaternion:
    """Hamiltonian conjugation: negate the vector part."""
    return Quaternion(*conj4(q.as_tuple()))


def hform(p: Quaternion, q: Quaternion) -> float:
    """Symmetric bilinear form ``1/2 (p conj(q) + q conj(p))``.

    The vector part of that quaternion cancels identically; its scalar part
    is the E^4 dot product of the coefficient tuples.
    """
    return hform_coeffs(p.as_tuple(), q.as_tuple())


def hform_coeffs(p, q):
    x = hamilton(p, conj4(q))
    y = hamilton(q, conj4(p))
    return 0.5 * (x[3] + y[3])


def norm(q: Quaternion) -> float:
    return math.sqrt(max(hform(q, q), 0.0))


def is_spatial(q: Quaternion, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    # q + conj(q) = 2 S_q
    return abs(2.0 * q.d) <= tol


def hform_rows(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized :func:`hform` over the last axis of E^3 or E^4 row arrays."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] == 3:
        u = _pad4(u)
    if v.shape[-1] == 3:
        v = _pad4(v)
    return hform_coeffs(np.moveaxis(u, -1, 0), np.moveaxis(v, -1, 0))


def _pad4(x):
    return np.concatenate([x, np.zeros(x.shape[:-1] + (1,))], axis=-1)
