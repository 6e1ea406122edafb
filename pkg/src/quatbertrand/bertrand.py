"""Classical Bertrand pairs in E^3 and E^4.

A Bertrand mate shares its principal normal lines with the source curve. For
a unit-speed curve that happens iff its first two curvatures satisfy an
affine relation ``offset * c1 + cofactor * c2 = 1`` with constant
coefficients, and then ``beta = alpha + offset * N`` is the mate. In E^4 this
needs vanishing bitorsion; :func:`nonexistence_probe4` witnesses the failure
for curves with nonzero bitorsion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import Curve
from .errors import DegeneracyError, NonzeroBitorsionError, PreconditionError
from .frenet import (
    Correspondence,
    OffsetCurve,
    SampleGrid,
    frenet,
    frenet3,
    frenet4,
    reparameterize,
)
from .quat import hform_rows
from .stats import Stat, jsonable, max_abs

ACCEPT_TOL = 1e-8
BITORSION_ZERO = 1e-8
CONSTANT_SPREAD = 1e-10
PROBE_FLOOR = 1e-4


@dataclass(frozen=True)
class BertrandFit:
    """Constants of ``offset * c1 + cofactor * c2 = 1``.

    ``(c1, c2)`` is ``(k, r)`` in E^3 and ``(K, k)`` in E^4; ``offset`` is the
    mate's displacement along the principal normal.
    """

    offset: float
    cofactor: float
    residual: float
    dim: int
    family: bool = False
    tol: float = ACCEPT_TOL
    pinned: str | None = None

    @property
    def accepted(self) -> bool:
        return self.residual <= self.tol

    def to_dict(self) -> dict:
        names = ("lambda1", "lambda2") if self.dim == 3 else ("lambda", "mu")
        return jsonable(
            {
                "dim": self.dim,
                "offset": self.offset,
                "cofactor": self.cofactor,
                "residual": self.residual,
                "family": self.family,
                "accepted": self.accepted,
                "pinned": self.pinned,
                "tol": self.tol,
                # labels in the relation's usual notation, offset first
                "labels": {names[0]: self.offset, names[1]: self.cofactor},
            }
        )


def _solve_affine(c1, c2, pin_offset=None, pin_cofactor=None):
    """Least-squares ``(x, y)`` for ``x c1 + y c2 = 1``; returns (x, y, family)."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    if pin_offset is not None and pin_cofactor is not None:
        raise ValueError("pin at most one of offset and cofactor")
    if pin_offset is not None:
        y, fam = _solve_one(c2, 1.0 - pin_offset * c1)
        return float(pin_offset), y, fam
    if pin_cofactor is not None:
        x, fam = _solve_one(c1, 1.0 - pin_cofactor * c2)
        return x, float(pin_cofactor), fam
    A = np.column_stack([c1.ravel(), c2.ravel()])
    flat = np.ptp(c1) < CONSTANT_SPREAD and np.ptp(c2) < CONSTANT_SPREAD
    (x, y), *_ = np.linalg.lstsq(A, np.ones(len(A)), rcond=None)
    if flat:
        # rank 1: lstsq already returns the minimum-norm member of the family
        return float(x), float(y), True
    rank = np.linalg.matrix_rank(A, tol=CONSTANT_SPREAD * max(1.0, np.abs(A).max()))
    return float(x), float(y), bool(rank < 2)


def _solve_one(col, rhs):
    if max_abs(col) <= CONSTANT_SPREAD:
        # the unknown multiplies an identically vanishing curvature
        return 0.0, True
    return float(np.dot(col, rhs) / np.dot(col, col)), False


def fit_curvatures(c1, c2, dim=3, pin_offset=None, pin_cofactor=None, tol=ACCEPT_TOL) -> BertrandFit:
    """Fit ``offset * c1 + cofactor * c2 = 1`` to sampled curvature values."""
    x, y, fam = _solve_affine(c1, c2, pin_offset, pin_cofactor)
    residual = max_abs(x * c1 + y * c2 - 1.0)
    pinned = "offset" if pin_offset is not None else "cofactor" if pin_cofactor is not None else None
    return BertrandFit(x, y, residual, dim, fam, tol, pinned)


def fit_relation3(curve3: Curve, grid: SampleGrid, *, pin_offset=None, pin_cofactor=None, tol=ACCEPT_TOL) -> BertrandFit:
    """Fit ``lambda1 k + lambda2 r = 1`` over the grid (any regular parameterization)."""
    f = frenet3(curve3, grid.points, native=True)
    return fit_curvatures(f.k, f.r, 3, pin_offset, pin_cofactor, tol)


def fit_relation4(curve4: Curve, grid: SampleGrid, *, pin_offset=None, pin_cofactor=None, tol=ACCEPT_TOL) -> BertrandFit:
    """Fit ``lambda K + mu k = 1``; only meaningful when bitorsion vanishes."""
    f = frenet4(curve4, grid.points, native=True)
    bt = max_abs(f.bitorsion)
    if bt > BITORSION_ZERO:
        raise NonzeroBitorsionError(
            f"bitorsion reaches {bt:.3g}; no classical Bertrand mate exists. "
            "Use the nb2 commands for (N,B2) mates"
        )
    return fit_curvatures(f.K, f.k, 4, pin_offset, pin_cofactor, tol)


@dataclass(frozen=True)
class MateCurve:
    """A constructed mate: a jet-capable curve in the source parameter plus samples."""

    curve: OffsetCurve
    s: np.ndarray
    points: np.ndarray
    correspondence: Correspondence

    def to_columns(self):
        cols = {"s": self.s, "phi": self.correspondence.phi, "dphi": self.correspondence.dphi}
        for i in range(self.points.shape[-1]):
            cols[f"x{i + 1}"] = self.points[:, i]
        return cols


def _mate(curve: Curve, offsets: dict, grid: SampleGrid, label: str) -> MateCurve:
    s = grid.points
    frenet(curve, s)  # unit speed and frame checks on the source
    mate = OffsetCurve(curve, offsets, label=label)
    return MateCurve(mate, s, mate(s), reparameterize(mate, grid))


def construct_mate3(curve3: Curve, offset: float, grid: SampleGrid) -> MateCurve:
    if curve3.dim != 3:
        raise ValueError("construct_mate3 needs a curve in E^3")
    return _mate(curve3, {1: offset}, grid, f"mate({getattr(curve3, 'label', '')},{offset:g})")


def construct_mate4(curve4: Curve, offset: float, grid: SampleGrid) -> MateCurve:
    if curve4.dim != 4:
        raise ValueError("construct_mate4 needs a curve in E^4")
    f = frenet4(curve4, grid.points)
    bt = max_abs(f.bitorsion)
    if bt > BITORSION_ZERO:
        raise NonzeroBitorsionError(f"bitorsion reaches {bt:.3g}; the normal offset is not a Bertrand mate")
    return _mate(curve4, {1: offset}, grid, f"mate({getattr(curve4, 'label', '')},{offset:g})")


# pair verification ---------------------------------------------------------


@dataclass(frozen=True)
class PairReport:
    dim: int
    tol: float
    distance: Stat
    tangent: Stat  # h(T, T_bar)
    normal_alignment: Stat  # |h(N, N_bar)|
    angles: dict  # h(E_i, E_bar_i) for every frame vector
    torsion_product: Stat  # r r* (E^3) or k k_bar (E^4)
    theta: float
    signed_law_defect: float  # max |product + sin^2(theta) / lambda^2|
    magnitude_law_defect: float  # max ||product| - sin^2(theta) / lambda^2|
    sum_relation: Stat | None = None  # mu (k + k_bar) + lambda (K + K_bar)
    sum_relation_corrected: Stat | None = None  # mu (k - k_bar) + lambda (K + K_bar)
    trivial: bool = False
    fit: BertrandFit | None = None

    @property
    def normals_collinear(self) -> bool:
        return self.normal_alignment.min >= 1.0 - self.tol

    @property
    def passed(self) -> bool:
        """Bertrand-pair checks: collinear normals, constant distance and tangent angle."""
        return (
            self.normals_collinear
            and self.distance.constant(self.tol)
            and self.tangent.constant(self.tol)
        )

    @property
    def product_constant(self) -> bool:
        return self.torsion_product.constant(self.tol)

    def to_dict(self) -> dict:
        d = {
            "dim": self.dim,
            "tol": self.tol,
            "passed": self.passed,
            "trivial_pair": self.trivial,
            "distance": self.distance,
            "tangent_angle": self.tangent,
            "normal_alignment": self.normal_alignment,
            "frame_angles": self.angles,
            "torsion_product": self.torsion_product,
            "theta": self.theta,
            "torsion_product_law": {
                "signed_defect": self.signed_law_defect,
                "magnitude_defect": self.magnitude_law_defect,
            },
        }
        if self.sum_relation is not None:
            d["sum_relation"] = self.sum_relation
            d["sum_relation_max_abs"] = max(abs(self.sum_relation.min), abs(self.sum_relation.max))
            d["sum_relation_corrected"] = self.sum_relation_corrected
        if self.fit is not None:
            d["fit"] = self.fit
        return jsonable(d)


def _beta_curve(beta):
    return beta.curve if isinstance(beta, MateCurve) else beta


def _frame_names(dim):
    return ("t", "n", "b") if dim == 3 else ("T", "N", "B1", "B2")


def _pair_common(alpha: Curve, beta, grid: SampleGrid, beta_s):
    s = grid.points
    bcurve = _beta_curve(beta)
    sb = s if beta_s is None else np.asarray(beta_s, dtype=float)
    if sb.shape != s.shape:
        raise ValueError("beta parameter values must match the grid")
    if alpha.dim != bcurve.dim:
        raise ValueError("curves of different dimension")
    fa = frenet(alpha, s, native=True)
    fb = frenet(bcurve, sb, native=True)
    dist = np.linalg.norm(bcurve(sb) - alpha(s), axis=-1)
    names = _frame_names(alpha.dim)
    dots = [hform_rows(u, v) for u, v in zip(fa.frame(), fb.frame())]
    angles = {n: Stat.of(d) for n, d in zip(names, dots)}
    return fa, fb, dist, dots, angles


def _torsion_law(prod, tangent: Stat, distance: Stat):
    c = max(-1.0, min(1.0, tangent.mid))
    theta = math.acos(c)
    lam = distance.mid
    target = (1.0 - c * c) / lam**2 if lam > 0 else math.nan
    signed = max_abs(prod + target)
    magnitude = max_abs(np.abs(prod) - target)
    return theta, signed, magnitude


def verify_pair3(alpha: Curve, beta, grid: SampleGrid, tol: float = ACCEPT_TOL, *, beta_s=None) -> PairReport:
    """Measure the Bertrand-pair invariants of ``(alpha, beta)`` at corresponding points.

    Points correspond at equal parameter values unless ``beta_s`` gives the
    mate's parameter at each grid point.
    """
    fa, fb, dist, dots, angles = _pair_common(alpha, beta, grid, beta_s)
    distance = Stat.of(dist)
    tangent = angles["t"]
    prod = fa.r * fb.r
    theta, signed, magnitude = _torsion_law(prod, tangent, distance)
    return PairReport(
        3, tol, distance, tangent, Stat.of(np.abs(dots[1])), angles, Stat.of(prod),
        theta, signed, magnitude, trivial=distance.max <= tol,
    )


def verify_pair4(alpha: Curve, beta, fit: BertrandFit | None, grid: SampleGrid, tol: float = ACCEPT_TOL, *, beta_s=None) -> PairReport:
    """E^4 version of :func:`verify_pair3`, adding the curvature sum relation.

    Without a ``fit`` the constants are refitted with the offset pinned to the
    measured displacement along N.
    """
    fa, fb, dist, dots, angles = _pair_common(alpha, beta, grid, beta_s)
    for f, who in ((fa, "alpha"), (fb, "beta")):
        bt = max_abs(f.bitorsion)
        if bt > BITORSION_ZERO:
            raise NonzeroBitorsionError(f"{who} has bitorsion up to {bt:.3g}; not a classical Bertrand setting")
    if fit is None:
        bcurve = _beta_curve(beta)
        sb = grid.points if beta_s is None else np.asarray(beta_s, dtype=float)
        lam = float(np.mean(hform_rows(bcurve(sb) - alpha(grid.points), fa.N)))
        fit = fit_curvatures(fa.K, fa.k, 4, lam, None, tol)
    distance = Stat.of(dist)
    tangent = angles["T"]
    prod = fa.k * fb.k
    theta, signed, magnitude = _torsion_law(prod, tangent, distance)
    lam, mu = fit.offset, fit.cofactor
    sum_rel = Stat.of(mu * (fa.k + fb.k) + lam * (fa.K + fb.K))
    corrected = Stat.of(mu * (fa.k - fb.k) + lam * (fa.K + fb.K))
    return PairReport(
        4, tol, distance, tangent, Stat.of(np.abs(dots[1])), angles, Stat.of(prod),
        theta, signed, magnitude, sum_rel, corrected, distance.max <= tol, fit,
    )


# nonexistence probe -----------------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    floor: float
    misalignment: dict  # offset -> min over grid of 1 - |h(N, N_bar)|
    errors: dict = field(default_factory=dict)  # offset -> message for degenerate trial mates

    @property
    def passed(self) -> bool:
        return bool(self.misalignment) and all(v >= self.floor for v in self.misalignment.values())

    def summary(self) -> str:
        if self.passed:
            return f"all trial offsets misaligned >= {self.floor:g}: no classical Bertrand mate among them"
        bad = [o for o, v in self.misalignment.items() if v < self.floor]
        return f"offsets {bad} keep normals aligned within {self.floor:g}"

    def to_dict(self) -> dict:
        return jsonable(
            {
                "floor": self.floor,
                "passed": self.passed,
                "trials": [{"offset": o, "min_misalignment": v} for o, v in self.misalignment.items()],
                "errors": [{"offset": o, "error": e} for o, e in self.errors.items()],
                "summary": self.summary(),
            }
        )


def default_probe_offsets(curve4: Curve, grid: SampleGrid) -> list[float]:
    f = frenet4(curve4, grid.points, native=True)
    forced, _, _ = _solve_affine(f.K, f.k)
    base = [0.5, 1.0, 2.0]
    if math.isfinite(forced) and abs(forced) > 1e-12:
        base.append(abs(forced))
    out = []
    for v in base:
        out += [v, -v]
    return out


def nonexistence_probe4(curve4: Curve, grid: SampleGrid, offsets=None, floor: float = PROBE_FLOOR) -> ProbeReport:
    """Try ``beta = alpha + offset N`` for each offset and measure normal misalignment."""
    s = grid.points
    f = frenet4(curve4, s, native=True)
    if np.min(np.abs(f.bitorsion)) <= 1e-6:
        raise PreconditionError("probe needs |bitorsion| > 1e-6 on the grid; use the classical fit instead")
    if np.min(np.abs(f.k)) <= 1e-6:
        raise PreconditionError("probe needs torsion k > 1e-6 on the grid")
    if offsets is None:
        offsets = default_probe_offsets(curve4, grid)
    offsets = [float(o) for o in offsets]
    if any(o == 0 for o in offsets):
        raise PreconditionError("offset 0 gives beta = alpha; excluded from the probe")
    mis, errs = {}, {}
    for o in offsets:
        try:
            fb = frenet4(OffsetCurve(curve4, {1: o}, native=True), s, native=True)
        except DegeneracyError as exc:
            errs[o] = str(exc)
            continue
        mis[o] = float(np.min(1.0 - np.abs(hform_rows(f.N, fb.N))))
    return ProbeReport(floor, mis, errs)
