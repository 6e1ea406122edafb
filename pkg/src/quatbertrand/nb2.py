"""(N,B2)-Bertrand mates of E^4 curves with nonzero bitorsion.

The mate is ``beta = alpha + lambda N + mu B2`` and its (N, B2) normal plane
coincides with the source's at corresponding points. A certificate holds the
constants (lambda, mu, gamma, delta) together with the defects of the four
scalar conditions that characterize such curves:

    (i)   lambda k - mu bt != 0
    (ii)  gamma (lambda k - mu bt) + lambda K = 1
    (iii) gamma K - k = delta bt
    (iv)  (gamma^2 - 1) K k + gamma (K^2 - k^2 - bt^2) != 0

where ``bt`` is the bitorsion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .curves import Curve
from .errors import BitorsionTooSmallError, ConstructionFailedError, NotNB2CurveError
from .frenet import Correspondence, OffsetCurve, SampleGrid, frenet4, reparameterize
from .quat import hform_rows
from .stats import Stat, jsonable, max_abs

ACCEPT_TOL = 1e-8
MIN_BITORSION = 1e-8
NONZERO_FLOOR = 1e-6
CONSTANT_SPREAD = 1e-10


@dataclass(frozen=True)
class NB2Certificate:
    lambda_: float
    mu: float
    gamma: float
    delta: float
    xi: int
    residuals: dict  # {"i": min |lambda k - mu bt|, "ii": max defect, "iii": max defect, "iv": min |expr|}
    family: bool = False
    iv_value: float = math.nan  # the (iv) expression where it is smallest in magnitude, signed
    tol: float = ACCEPT_TOL
    pinned: tuple = ()
    mu_flipped: bool = False

    @property
    def accepted(self) -> bool:
        r = self.residuals
        return (
            r["i"] > NONZERO_FLOOR
            and r["ii"] <= self.tol
            and r["iii"] <= self.tol
            and r["iv"] > NONZERO_FLOOR
        )

    def to_dict(self) -> dict:
        return jsonable(
            {
                "lambda": self.lambda_,
                "mu": self.mu,
                "gamma": self.gamma,
                "delta": self.delta,
                "xi": self.xi,
                "residuals": dict(self.residuals),
                "family": self.family,
                "condition_iv": self.iv_value,
                "accepted": self.accepted,
                "pinned": list(self.pinned),
                "mu_flipped": self.mu_flipped,
                "tol": self.tol,
            }
        )

    @classmethod
    def from_dict(cls, d: dict) -> "NB2Certificate":
        return cls(
            float(d["lambda"]),
            float(d["mu"]),
            float(d["gamma"]),
            float(d["delta"]),
            int(d["xi"]),
            {k: float(v) for k, v in d["residuals"].items()},
            bool(d.get("family", False)),
            float(d.get("condition_iv", math.nan)),
            float(d.get("tol", ACCEPT_TOL)),
            tuple(d.get("pinned", ())),
            bool(d.get("mu_flipped", False)),
        )


def condition_iv(gamma, K, k, bt):
    """``(gamma^2 - 1) K k + gamma (K^2 - k^2 - bt^2)``."""
    return (gamma**2 - 1.0) * K * k + gamma * (K**2 - k**2 - bt**2)


def condition_iv_stated(gamma, K, k, r):
    """The same condition written with ``r = K + bt``: ``(gamma^2-1) K k + gamma (2 r K - k^2 - r^2)``."""
    return (gamma**2 - 1.0) * K * k + gamma * (2.0 * r * K - k**2 - r**2)


def _curvatures(curve4: Curve, s):
    f = frenet4(curve4, s, native=True)
    if np.min(np.abs(f.bitorsion)) <= MIN_BITORSION:
        raise BitorsionTooSmallError(
            f"bitorsion drops to {np.min(np.abs(f.bitorsion)):.3g} on the grid; "
            "use the classical Bertrand commands"
        )
    return f


def _lstsq(A, b):
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    return x


def _flat(*cols):
    return all(np.ptp(c) < CONSTANT_SPREAD for c in cols)


def _evaluate(K, k, bt, lam, mu, gamma, delta):
    w = lam * k - mu * bt
    res = {
        "i": float(np.min(np.abs(w))),
        "ii": max_abs(gamma * w + lam * K - 1.0),
        "iii": max_abs(gamma * K - k - delta * bt),
    }
    iv = condition_iv(gamma, K, k, bt)
    j = int(np.argmin(np.abs(iv)))
    res["iv"] = float(abs(iv.ravel()[j]))
    xi = 1 if np.all(w > 0) else -1 if np.all(w < 0) else 0
    return res, float(iv.ravel()[j]), xi


def fit_certificate(
    curve4: Curve,
    grid: SampleGrid,
    *,
    pin_lambda=None,
    pin_mu=None,
    pin_gamma=None,
    tol: float = ACCEPT_TOL,
) -> NB2Certificate:
    """Two-stage fit: (gamma, delta) from (iii), then (lambda, mu) from (ii).

    Constant curvatures make both stages rank deficient: (iii) fixes only a
    line of (gamma, delta) and (ii) a line of (lambda, mu). Pins resolve the
    family. Pinning both lambda and mu determines gamma through (ii); pinning
    gamma fixes stage (iii) directly. Without enough pins the minimum-norm
    solution is returned with ``family=True``.
    """
    f = _curvatures(curve4, grid.points)
    K, k, bt = f.K, f.k, f.bitorsion
    pinned = tuple(n for n, v in (("lambda", pin_lambda), ("mu", pin_mu), ("gamma", pin_gamma)) if v is not None)
    flat = _flat(K, k, bt)
    family = False

    # stage (i): gamma K - delta bt = k
    if pin_gamma is not None:
        gamma = float(pin_gamma)
        delta = float(_lstsq(bt[:, None], gamma * K - k)[0])
    elif flat and pin_lambda is not None and pin_mu is not None:
        w = pin_lambda * k - pin_mu * bt
        gamma = float(np.mean((1.0 - pin_lambda * K) / w))
        delta = float(np.mean((gamma * K - k) / bt))
    else:
        gamma, delta = (float(v) for v in _lstsq(np.column_stack([K, -bt]), k))
        family = flat
    stage1 = max_abs(gamma * K - k - delta * bt)
    if stage1 > tol:
        raise NotNB2CurveError(
            f"gamma K - k = delta bt has no constant solution (residual {stage1:.3g}); not an (N,B2)-Bertrand curve"
        )

    # stage (ii): lambda (gamma k + K) - mu gamma bt = 1
    c_lam = gamma * k + K
    c_mu = -gamma * bt
    if pin_lambda is not None and pin_mu is not None:
        lam, mu = float(pin_lambda), float(pin_mu)
    elif pin_lambda is not None:
        lam = float(pin_lambda)
        mu = _solve_one(c_mu, 1.0 - lam * c_lam)
    elif pin_mu is not None:
        mu = float(pin_mu)
        lam = _solve_one(c_lam, 1.0 - mu * c_mu)
    else:
        lam, mu = (float(v) for v in _lstsq(np.column_stack([c_lam, c_mu]), np.ones_like(K)))
        family = family or flat
    res, iv, xi = _evaluate(K, k, bt, lam, mu, gamma, delta)
    if res["ii"] > tol:
        raise NotNB2CurveError(f"no constant (lambda, mu) satisfy the coupling relation (residual {res['ii']:.3g})")
    return NB2Certificate(lam, mu, gamma, delta, xi, res, family, iv, tol, pinned)


def _solve_one(col, rhs) -> float:
    if max_abs(col) <= CONSTANT_SPREAD:
        raise NotNB2CurveError("pinned constant leaves the other undetermined (zero coefficient)")
    return float(np.dot(col, rhs) / np.dot(col, col))


def certificate_for(curve4: Curve, grid: SampleGrid, lam, mu, gamma, delta, tol: float = ACCEPT_TOL) -> NB2Certificate:
    """Evaluate the four conditions for given constants without fitting."""
    f = _curvatures(curve4, grid.points)
    res, iv, xi = _evaluate(f.K, f.k, f.bitorsion, lam, mu, gamma, delta)
    return NB2Certificate(float(lam), float(mu), float(gamma), float(delta), xi, res, False, iv, tol, ("lambda", "mu", "gamma", "delta"))


def phi_prime(cert: NB2Certificate, k, bt):
    """Speed of the mate in the source's arc length: xi (lambda k - mu bt) sqrt(gamma^2 + 1)."""
    return cert.xi * (cert.lambda_ * k - cert.mu * bt) * math.sqrt(cert.gamma**2 + 1.0)


# planes --------------------------------------------------------------------


def plane_angle(u1, u2, v1, v2) -> np.ndarray:
    """Largest principal angle between span{u1, u2} and span{v1, v2} (orthonormal pairs).

    Computed from the sine (norm of the part of span{v} outside span{u}),
    which stays accurate for tiny angles.
    """
    U = np.stack([u1, u2], axis=-1)
    V = np.stack([v1, v2], axis=-1)
    R = V - U @ (np.swapaxes(U, -1, -2) @ V)
    sines = np.linalg.norm(R, ord=2, axis=(-2, -1))
    return np.arcsin(np.clip(sines, 0.0, 1.0))


PLANE_TOL = math.acos(1.0 - 1e-8)


# construction --------------------------------------------------------------


@dataclass(frozen=True)
class NB2Mate:
    curve: OffsetCurve
    s: np.ndarray
    points: np.ndarray
    correspondence: Correspondence
    cert: NB2Certificate
    plane_angle: float
    phi_defect: float  # max |measured phi' - xi (lambda k - mu bt) sqrt(gamma^2 + 1)|

    def to_columns(self):
        cols = {"s": self.s, "phi": self.correspondence.phi, "dphi": self.correspondence.dphi}
        for i in range(self.points.shape[-1]):
            cols[f"x{i + 1}"] = self.points[:, i]
        return cols


def construct_nb2_mate(curve4: Curve, cert: NB2Certificate, grid: SampleGrid) -> NB2Mate:
    """``beta = alpha + lambda N + mu B2``, trying ``mu`` then ``-mu``.

    A sign is kept when the normal planes coincide and the mate's speed
    matches the predicted phi'. The source must be unit speed.
    """
    if not cert.accepted:
        raise NotNB2CurveError("certificate is not accepted; refusing to construct a mate")
    s = grid.points
    fa = frenet4(curve4, s)
    failures = []
    for flip in (False, True):
        mu = -cert.mu if flip else cert.mu
        mate = OffsetCurve(curve4, {1: cert.lambda_, 3: mu}, label=f"nb2-mate({getattr(curve4, 'label', '')})")
        fb = frenet4(mate, s, native=True)
        angle = float(np.max(plane_angle(fa.N, fa.B2, fb.N, fb.B2)))
        # a flipped bitorsion sign flips both constants that multiply it
        c = replace(cert, mu=mu, delta=-cert.delta, mu_flipped=True) if flip else cert
        predicted = phi_prime(c, fa.k, fa.bitorsion)
        defect = max_abs(fb.speed - predicted)
        ok_phi = defect <= c.tol * (1.0 + max_abs(predicted))
        if angle <= PLANE_TOL and ok_phi:
            corr = reparameterize(mate, grid)
            return NB2Mate(mate, s, mate(s), corr, c, angle, defect)
        failures.append(f"mu={mu:.6g}: plane angle {angle:.3g}, phi' defect {defect:.3g}")
    raise ConstructionFailedError("neither sign of mu gives an (N,B2) mate: " + "; ".join(failures))


def predict_mate_curvatures(curve4: Curve, cert: NB2Certificate, s):
    """Mate curvatures (K_bar, k_bar, |bitorsion_bar|) at the points corresponding to ``s``."""
    f = frenet4(curve4, np.asarray(s, dtype=float), native=True)
    K, k, bt = f.K, f.k, f.bitorsion
    g = cert.gamma
    root = math.sqrt(g * g + 1.0)
    dphi = phi_prime(cert, k, bt)
    P = np.sqrt((g * K - k) ** 2 + bt**2)
    Kbar = P / (dphi * root)
    kbar = np.abs(g * (K**2 - k**2 - bt**2) + (g * g - 1.0) * K * k) / (dphi * root * P)
    btbar = np.abs(root * bt * K / (dphi * P))
    return Kbar, kbar, btbar


# verification --------------------------------------------------------------


@dataclass(frozen=True)
class NB2Report:
    tol: float
    plane_angle: float
    distance: Stat
    expected_distance: float
    tangent_coeffs: dict  # {"a": Stat, "b": Stat}
    normal_coeffs: dict  # {"m": Stat, "n": Stat}
    ratio_defects: dict  # {"a/b - gamma": .., "m/n - delta": .., "a^2+b^2-1": .., "m^2+n^2-1": ..}
    angles: dict  # h(E, E_bar) stats for T, N, B1, B2
    prediction_defects: dict  # {"K": .., "k": .., "bitorsion": ..}
    cert: NB2Certificate = field(repr=False, default=None)

    @property
    def checks(self) -> dict:
        t = self.tol
        return {
            "plane_coincidence": self.plane_angle <= PLANE_TOL,
            "distance": self.distance.constant(t) and abs(self.distance.mid - self.expected_distance) <= t * (1 + self.expected_distance),
            "tangent_ratio": self.ratio_defects["a/b - gamma"] <= t,
            "normal_ratio": self.ratio_defects["m/n - delta"] <= t * (1 + abs(self.cert.delta)),
            "unit_coeffs": max(self.ratio_defects["a^2+b^2-1"], self.ratio_defects["m^2+n^2-1"]) <= t,
            "angle_couples": all(v.constant(t) for v in self.angles.values()),
            "curvature_prediction": max(self.prediction_defects.values()) <= t,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return jsonable(
            {
                "tol": self.tol,
                "passed": self.passed,
                "checks": self.checks,
                "plane_angle": self.plane_angle,
                "distance": self.distance,
                "expected_distance": self.expected_distance,
                "tangent_coeffs": self.tangent_coeffs,
                "normal_coeffs": self.normal_coeffs,
                "ratio_defects": self.ratio_defects,
                "frame_angles": self.angles,
                "curvature_prediction_defects": self.prediction_defects,
                "certificate": self.cert,
            }
        )


def verify_nb2_pair(alpha: Curve, beta, cert: NB2Certificate, grid: SampleGrid, tol: float = ACCEPT_TOL, *, beta_s=None) -> NB2Report:
    """Measure the (N,B2) pair invariants at corresponding points.

    ``beta`` is a curve or an :class:`NB2Mate`; points correspond at equal
    parameter values unless ``beta_s`` gives the mate's parameter per grid point.
    """
    s = grid.points
    if isinstance(beta, NB2Mate):
        cert = beta.cert
        beta = beta.curve
    sb = s if beta_s is None else np.asarray(beta_s, dtype=float)
    fa = frenet4(alpha, s, native=True)
    fb = frenet4(beta, sb, native=True)
    angle = float(np.max(plane_angle(fa.N, fa.B2, fb.N, fb.B2)))
    dist = Stat.of(np.linalg.norm(beta(sb) - alpha(s), axis=-1))
    a = hform_rows(fb.T, fa.T)
    b = hform_rows(fb.T, fa.B1)
    m = hform_rows(fb.N, fa.N)
    n = hform_rows(fb.N, fa.B2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ab = np.abs(a / b - cert.gamma)
        mn = np.abs(m / n - cert.delta)
    ratios = {
        "a/b - gamma": _worst(ab),
        "m/n - delta": _worst(mn),
        "a^2+b^2-1": max_abs(a * a + b * b - 1.0),
        "m^2+n^2-1": max_abs(m * m + n * n - 1.0),
    }
    names = ("T", "N", "B1", "B2")
    angles = {nm: Stat.of(hform_rows(u, v)) for nm, u, v in zip(names, fa.frame(), fb.frame())}
    try:
        Kp, kp, btp = predict_mate_curvatures(alpha, cert, s)
        pred = {
            "K": max_abs(Kp - fb.K),
            "k": max_abs(kp - np.abs(fb.k)),
            "bitorsion": max_abs(btp - np.abs(fb.bitorsion)),
        }
    except (ZeroDivisionError, FloatingPointError):
        pred = {"K": math.inf, "k": math.inf, "bitorsion": math.inf}
    return NB2Report(
        tol,
        angle,
        dist,
        math.hypot(cert.lambda_, cert.mu),
        {"a": Stat.of(a), "b": Stat.of(b)},
        {"m": Stat.of(m), "n": Stat.of(n)},
        ratios,
        angles,
        pred,
        cert,
    )


def _worst(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.max(np.where(np.isfinite(x), x, np.inf)))
