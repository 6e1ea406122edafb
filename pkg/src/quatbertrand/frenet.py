"""Frenet frames and curvatures of curves in E^3 and E^4.

Frames come from Gram-Schmidt on the derivative jets of the position, so the
frame vectors are themselves jets and their arc-length derivatives (needed
for torsion and bitorsion) fall out of exact Taylor-coefficient algebra.

By default a curve must be unit speed at every requested parameter value.
Passing ``native=True`` accepts any regular parameterization and returns the
arc-length frame and curvatures at the given parameter values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import jet
from .curves import Curve
from .errors import (
    CorrespondenceError,
    DegeneracyError,
    NotUnitSpeedError,
    SingularEvaluationError,
    VanishingCurvatureError,
)
from .jet import TaylorJet
from .quat import cross3, hamilton, hform_rows

TOL_K = 1e-9
UNIT_SPEED_TOL = 1e-6
FRAME_ORDER = 5


@dataclass(frozen=True)
class SampleGrid:
    s_min: float
    s_max: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("a sample grid needs at least 2 points")
        if not self.s_min < self.s_max:
            raise ValueError(f"empty grid [{self.s_min}, {self.s_max}]")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.s_min, self.s_max, self.count)

    def refined(self, factor: int = 2) -> "SampleGrid":
        return SampleGrid(self.s_min, self.s_max, (self.count - 1) * factor + 1)


@dataclass(frozen=True)
class FrameSample3:
    s: np.ndarray
    t: np.ndarray
    n: np.ndarray
    b: np.ndarray
    k: np.ndarray
    r: np.ndarray
    speed: np.ndarray

    def frame(self):
        return (self.t, self.n, self.b)


@dataclass(frozen=True)
class FrameSample4:
    s: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    K: np.ndarray
    k: np.ndarray
    bitorsion: np.ndarray
    speed: np.ndarray
    residual4: np.ndarray  # norm of the 4th Gram-Schmidt residual, arc-length units

    def frame(self):
        return (self.T, self.N, self.B1, self.B2)


@dataclass(frozen=True)
class Correspondence:
    """Sampled parameter map from a curve's parameter to its mate's arc length."""

    s: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray

    def __post_init__(self):
        if np.any(self.dphi <= 0):
            raise CorrespondenceError("correspondence is not monotone (phi' <= 0 on the grid)")


# jet vector helpers -----------------------------------------------------------


def _dot(u, v):
    acc = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        acc = acc + a * b
    return acc


def _axpy(u, c, v):
    """``u - c v`` componentwise."""
    return [a - c * b for a, b in zip(u, v)]


def _scale(u, c):
    return [a / c for a in u]


def _values(u):
    return np.stack([np.broadcast_to(a.value, u[0].value.shape) for a in u], axis=-1)


def cross4(u, v, w):
    """Vector ``x`` with ``x . y = det[u; v; w; y]`` for every ``y``."""
    cols = range(4)
    out = []
    for j in cols:
        keep = [c for c in cols if c != j]
        m = [[row[c] for c in keep] for row in (u, v, w)]
        det3 = (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )
        out.append(det3 if j % 2 else -det3)
    return out


def _locate(s, mask):
    s = np.broadcast_to(np.asarray(s, dtype=float), mask.shape)
    return float(s[mask][0]) if mask.any() else float("nan")


@dataclass
class FrameJets:
    """Frame vectors as jets; ``speed`` is |d alpha/ds| in the native parameter."""

    s: np.ndarray
    dim: int
    position: list
    speed: TaylorJet
    vectors: list  # [T, N, B1, B2] or [t, n, b]
    curvatures: list  # values: [K, k, bitorsion] or [k, r]
    residual4: np.ndarray | None = None

    def arc_derivative(self, f: TaylorJet) -> TaylorJet:
        return f.derivative() / self.speed


def frame_jets(curve: Curve, s, *, native: bool = False, order: int = FRAME_ORDER, tol_k: float = TOL_K) -> FrameJets:
    """Frenet apparatus of ``curve`` about ``s`` with frame vectors kept as jets.

    ``order`` is the jet order of the position; frame vectors come back at
    order ``order - 2`` (normal) and ``order - 3`` (binormals).
    """
    if curve.dim not in (3, 4):
        raise ValueError(f"frames need dim 3 or 4, got {curve.dim}")
    s = np.asarray(s, dtype=float)
    pos = curve.jets(s, order)
    d1 = [p.derivative() for p in pos]
    d2 = [x.derivative() for x in d1]
    d3 = [x.derivative() for x in d2]

    sp2 = _dot(d1, d1)
    if np.any(sp2.value <= 0):
        raise DegeneracyError(f"curve is not regular at s={_locate(s, sp2.value <= 0):.6g}")
    speed = jet.sqrt(sp2)
    if not native:
        off = np.abs(speed.value - 1.0) > UNIT_SPEED_TOL
        if np.any(off):
            raise NotUnitSpeedError(
                f"curve is not unit speed at s={_locate(s, off):.6g} "
                f"(|alpha'| = {np.broadcast_to(speed.value, off.shape)[off][0]:.9g}); "
                "reparameterize first or pass native=True"
            )

    def arc(f):
        return f.derivative() / speed

    T = _scale(d1, speed)
    v2 = _axpy(d2, _dot(d2, T), T)
    n2 = jet.sqrt(_nonneg(_dot(v2, v2)))
    kappa_est = n2.value / speed.value**2
    flat = kappa_est <= tol_k
    if np.any(flat):
        raise VanishingCurvatureError(f"principal curvature vanishes at s={_locate(s, flat):.6g}")
    N = _scale(v2, n2)
    K = _dot([arc(x) for x in T], N).value

    if curve.dim == 3:
        # b = t ^ n, the vector part of the product of the spatial quaternions
        b = list(cross3(T, N))
        r = _dot([arc(x) for x in N], b).value
        return FrameJets(s, 3, pos, speed, [T, N, b], [K, r])

    v3 = _axpy(_axpy(d3, _dot(d3, T), T), _dot(d3, N), N)
    n3 = jet.sqrt(_nonneg(_dot(v3, v3)))
    tors_est = n3.value / (np.maximum(n2.value, 1e-300) * speed.value)
    flat = tors_est <= tol_k
    if np.any(flat):
        raise VanishingCurvatureError(
            f"torsion vanishes at s={_locate(s, flat):.6g}; first binormal undefined"
        )
    B1 = _scale(v3, n3)
    B2 = cross4(T, N, B1)
    k = _dot([arc(x) for x in N], B1).value
    bitorsion = _dot([arc(x) for x in B1], B2).value

    d4 = [x.derivative() for x in d3]
    v4 = d4
    for e in (T, N, B1):
        v4 = _axpy(v4, _dot(v4, e), e)
    residual4 = np.sqrt(np.maximum(_dot(v4, v4).value, 0.0)) / speed.value**4
    return FrameJets(s, 4, pos, speed, [T, N, B1, B2], [K, k, bitorsion], residual4)


def _nonneg(x: TaylorJet) -> TaylorJet:
    if np.any(x.value <= 0):
        # rank loss; let the curvature check report it with a location
        c = x.coeffs.copy()
        c[0] = np.where(c[0] <= 0, 1e-300, c[0])
        return TaylorJet(c)
    return x


def derivatives(curve: Curve, s, upto: int = 4) -> np.ndarray:
    """``alpha(s), ..., alpha^(upto)(s)`` stacked on axis 0, coordinates last."""
    if upto > 4:
        raise ValueError("derivatives are provided up to order 4")
    return curve.derivatives(s, upto)


def frenet3(curve: Curve, s, *, native: bool = False, tol_k: float = TOL_K) -> FrameSample3:
    if curve.dim != 3:
        raise ValueError("frenet3 needs a curve in E^3")
    fj = frame_jets(curve, s, native=native, tol_k=tol_k)
    t, n, b = (_values(v) for v in fj.vectors)
    k, r = fj.curvatures
    return FrameSample3(np.asarray(s, dtype=float), t, n, b, k, r, fj.speed.value)


def frenet4(curve: Curve, s, *, native: bool = False, tol_k: float = TOL_K) -> FrameSample4:
    if curve.dim != 4:
        raise ValueError("frenet4 needs a curve in E^4")
    fj = frame_jets(curve, s, native=native, tol_k=tol_k)
    T, N, B1, B2 = (_values(v) for v in fj.vectors)
    K, k, bt = fj.curvatures
    return FrameSample4(np.asarray(s, dtype=float), T, N, B1, B2, K, k, bt, fj.speed.value, fj.residual4)


def frenet(curve: Curve, s, *, native: bool = False, tol_k: float = TOL_K):
    return (frenet3 if curve.dim == 3 else frenet4)(curve, s, native=native, tol_k=tol_k)


def orthonormality_defect(sample) -> float:
    """max |h(E_i, E_j) - delta_ij| over the frame and all samples."""
    vecs = sample.frame()
    worst = 0.0
    for i, u in enumerate(vecs):
        for j, v in enumerate(vecs):
            g = hform_rows(u, v)
            worst = max(worst, float(np.max(np.abs(g - (1.0 if i == j else 0.0)))))
    return worst


def frame_determinant(sample) -> np.ndarray:
    return np.linalg.det(np.stack(sample.frame(), axis=-2))


class OffsetCurve(Curve):
    """``base(s) + sum c_i E_i(s)`` for constant ``c_i`` and Frenet vectors ``E_i`` of ``base``.

    ``offsets`` maps a frame index (0 = T, 1 = N, 2 = B1 or b, 3 = B2) to its
    constant coefficient. The result shares the base curve's parameter and is
    itself jet-capable, so its own frames are exact.
    """

    def __init__(self, base: Curve, offsets: dict, label: str = "", native: bool = False):
        self.base = base
        self.offsets = {int(i): float(c) for i, c in offsets.items()}
        if any(i < 0 or i >= base.dim for i in self.offsets):
            raise ValueError(f"frame index out of range for dim {base.dim}")
        self.dim = base.dim
        self.domain = getattr(base, "domain", (0.0, 10.0))
        self.native = native
        self.label = label or f"offset({getattr(base, 'label', '')})"

    def jets(self, s, order: int) -> list[TaylorJet]:
        fj = frame_jets(self.base, s, native=self.native, order=max(order + 3, 4))
        out = list(fj.position)
        for i, c in self.offsets.items():
            if c:
                out = [p + c * e for p, e in zip(out, fj.vectors[i])]
        return [x.truncate(order) for x in out]


# arc length ----------------------------------------------------------------

_GL_LO = leggauss(10)
_GL_HI = leggauss(20)


def _gauss(curve, a, b, rule):
    x, w = rule
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * x[None, :]
    return half * (curve.speed(pts) @ w)


def _integrate_speed(curve, a, b, tol, depth=0):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lo = _gauss(curve, a, b, _GL_LO)
    hi = _gauss(curve, a, b, _GL_HI)
    bad = np.abs(hi - lo) > tol
    if np.any(bad):
        if depth >= 40:
            raise SingularEvaluationError("arc-length quadrature failed to converge")
        m = 0.5 * (a[bad] + b[bad])
        hi[bad] = _integrate_speed(curve, a[bad], m, tol / 2, depth + 1) + _integrate_speed(
            curve, m, b[bad], tol / 2, depth + 1
        )
    return hi


def arclength(curve: Curve, s0: float, s1: float, tol: float = 1e-10) -> float:
    """Length of ``curve`` between parameter values ``s0`` and ``s1`` (signed)."""
    if s0 == s1:
        return 0.0
    return float(_integrate_speed(curve, np.array([s0]), np.array([s1]), tol)[0])


def reparameterize(curve: Curve, grid: SampleGrid, tol: float = 1e-10) -> Correspondence:
    """Cumulative arc length from ``grid.s_min`` at each grid point, and the speed there."""
    s = grid.points
    pieces = _integrate_speed(curve, s[:-1], s[1:], tol / max(len(s) - 1, 1))
    phi = np.concatenate([[0.0], np.cumsum(pieces)])
    dphi = curve.speed(s)
    if np.any(dphi <= 1e-9):
        raise DegeneracyError("curve is not regular on the grid")
    return Correspondence(s, phi, dphi)


# association ---------------------------------------------------------------


@dataclass(frozen=True)
class AssociationReport:
    torsion_vs_curvature: float  # max |k(curve4) - k(curve3)|
    bitorsion_vs_r_minus_K: float  # max ||bitorsion| - |r - K||
    tol: float

    @property
    def passed(self) -> bool:
        return self.torsion_vs_curvature <= self.tol and self.bitorsion_vs_r_minus_K <= self.tol

    def to_dict(self) -> dict:
        return {
            "torsion_vs_curvature": self.torsion_vs_curvature,
            "bitorsion_vs_r_minus_K": self.bitorsion_vs_r_minus_K,
            "tol": self.tol,
            "passed": self.passed,
        }


def verify_association(curve4: Curve, curve3: Curve, grid: SampleGrid, tol: float = 1e-9) -> AssociationReport:
    """Check that ``curve3`` carries the curvatures {k, r} tied to ``curve4``.

    Compared at equal parameter values: the E^4 torsion against the E^3
    principal curvature, and |bitorsion| against |r - K|.
    """
    s = grid.points
    f4 = frenet4(curve4, s)
    f3 = frenet3(curve3, s)
    d1 = float(np.max(np.abs(f4.k - f3.k)))
    d2 = float(np.max(np.abs(np.abs(f4.bitorsion) - np.abs(f3.r - f4.K))))
    return AssociationReport(d1, d2, tol)


def frenet_matrix_defect(curve: Curve, s, *, native: bool = False) -> float:
    """max componentwise gap between jet-differentiated frames and the Frenet matrix form."""
    fj = frame_jets(curve, s, native=native)
    vecs = fj.vectors
    d = [np.stack([fj.arc_derivative(c).value for c in v], axis=-1) for v in vecs]
    e = [_values(v) for v in vecs]
    c = [np.asarray(x)[..., None] for x in fj.curvatures]
    if fj.dim == 3:
        k, r = c
        pred = [k * e[1], -k * e[0] + r * e[2], -r * e[1]]
    else:
        K, k, bt = c
        pred = [K * e[1], -K * e[0] + k * e[2], -k * e[1] + bt * e[3], -bt * e[2]]
    return float(max(np.max(np.abs(x - y)) for x, y in zip(d, pred)))


__all__ = [
    "SampleGrid",
    "FrameSample3",
    "FrameSample4",
    "Correspondence",
    "AssociationReport",
    "frame_jets",
    "derivatives",
    "frenet3",
    "frenet4",
    "frenet",
    "arclength",
    "reparameterize",
    "verify_association",
    "orthonormality_defect",
    "frame_determinant",
    "frenet_matrix_defect",
    "cross4",
    "OffsetCurve",
    "hamilton",
]
