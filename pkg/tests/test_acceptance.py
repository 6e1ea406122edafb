"""Acceptance gate: one test per criterion, at the stated tolerances.

Run ``python tests/test_acceptance.py`` for a standalone pass/fail line per
criterion; under pytest the same lines appear in the terminal summary.
"""

import math
import sys

import numpy as np

from oracles import SQ2, SQ17, SQ37, TABLE, richardson
from quatbertrand.bertrand import (
    construct_mate3,
    construct_mate4,
    fit_relation3,
    fit_relation4,
    nonexistence_probe4,
    verify_pair3,
    verify_pair4,
)
from quatbertrand.curves import catalog, catalog_names
from quatbertrand.frenet import SampleGrid, frenet3, frenet4
from quatbertrand.nb2 import construct_nb2_mate, fit_certificate, predict_mate_curvatures, verify_nb2_pair
from quatbertrand.quat import hamilton, conj4

GRID = SampleGrid(0.0, 10.0, 512)
S = GRID.points
LAM2 = 5 * SQ17


def _near(values, expected, tol):
    v = np.asarray(values, dtype=float)
    return float(np.max(np.abs(v - expected))) <= tol and float(np.ptp(v)) <= tol


def _cert():
    return fit_certificate(catalog("ex2-e4"), GRID, pin_lambda=LAM2, pin_mu=-LAM2)


def test_criterion_1():
    f = frenet4(catalog("ex1-e4"), S)
    assert _near(f.K, 1 / 3, 1e-9)
    assert _near(f.k, SQ2 / 3, 1e-9)
    assert np.max(np.abs(f.bitorsion)) <= 1e-9 and np.ptp(f.bitorsion) <= 1e-9


def test_criterion_2():
    f = frenet3(catalog("ex1-e3"), S)
    assert _near(f.k, SQ2 / 3, 1e-9) and _near(f.r, 1 / 3, 1e-9)
    fit = fit_relation3(catalog("ex1-e3"), GRID, pin_offset=2 * SQ2)
    assert abs(fit.cofactor + 1.0) <= 1e-9 and fit.residual <= 1e-9


def test_criterion_3():
    m3 = construct_mate3(catalog("ex1-e3"), 2 * SQ2, GRID)
    m4 = construct_mate4(catalog("ex1-e4"), -1.0, GRID)
    assert np.max(np.abs(m3.points - catalog("ex1-e3-mate")(S))) <= 1e-9
    assert np.max(np.abs(m4.points - catalog("ex1-e4-mate")(S))) <= 1e-9
    p3 = verify_pair3(catalog("ex1-e3"), m3, GRID)
    p4 = verify_pair4(catalog("ex1-e4"), m4, fit_relation4(catalog("ex1-e4"), GRID, pin_offset=-1.0), GRID)
    assert p3.distance.spread <= 1e-9 and p4.distance.spread <= 1e-9
    assert abs(p3.distance.mid - 2 * SQ2) <= 1e-9 and abs(p4.distance.mid - 1.0) <= 1e-9


def test_criterion_4():
    f3, f4 = frenet3(catalog("ex1-e3"), S), frenet4(catalog("ex1-e4"), S)
    assert np.max(np.abs(f4.k - f3.k)) <= 1e-8 and np.max(np.abs(f4.K - f3.r)) <= 1e-8
    for pin in (None, 2 * SQ2):
        fit3 = fit_relation3(catalog("ex1-e3"), GRID, pin_offset=pin)
        fit4 = fit_relation4(catalog("ex1-e4"), GRID, pin_cofactor=pin)
        assert fit3.accepted and fit4.accepted
        assert abs(fit4.offset - fit3.cofactor) <= 1e-8
        assert abs(fit4.cofactor - fit3.offset) <= 1e-8


def test_criterion_5():
    f = frenet4(catalog("ex2-e4"), S)
    assert _near(f.K, SQ17 / 5, 1e-9)
    assert _near(f.k, 6 / (5 * SQ17), 1e-9)
    assert _near(np.abs(f.bitorsion), 2 / SQ17, 1e-9)
    assert abs(SQ17 / 5 - 0.8246211) < 1e-7 and abs(6 / (5 * SQ17) - 0.2910428) < 1e-7
    assert abs(2 / SQ17 - 0.4850713) < 1e-7


def test_criterion_6():
    cert = fit_certificate(catalog("ex2-e4"), GRID)
    assert abs(cert.gamma + 1.0) <= 1e-9 and abs(cert.delta + 2.3) <= 1e-9, (cert.gamma, cert.delta)
    assert cert.residuals["ii"] <= 1e-9 and cert.residuals["iii"] <= 1e-9
    pinned = fit_certificate(catalog("ex2-e4"), GRID, pin_lambda=LAM2)
    assert abs(pinned.mu + LAM2) <= 1e-9 * LAM2, (pinned.gamma, pinned.mu)
    assert abs(pinned.iv_value + 9 / 25) <= 1e-9


def test_criterion_7():
    mate = construct_nb2_mate(catalog("ex2-e4"), _cert(), GRID)
    ref = catalog("ex2-e4-mate")(16 * SQ2 * S)
    assert np.max(np.abs(mate.points - ref)) <= 1e-8
    assert np.max(np.abs(mate.correspondence.dphi - 16 * SQ2)) <= 1e-8
    d = np.linalg.norm(mate.points - catalog("ex2-e4")(S), axis=-1)
    assert np.max(np.abs(d - math.sqrt(850))) <= 1e-8


def test_criterion_8():
    cert = _cert()
    Kp, kp, btp = predict_mate_curvatures(catalog("ex2-e4"), cert, S)
    assert np.max(np.abs(Kp - SQ37 / 160)) <= 1e-8
    assert np.max(np.abs(kp - 9 / (160 * SQ37))) <= 1e-8
    assert np.max(np.abs(btp - 1 / (8 * SQ37))) <= 1e-8
    mate = construct_nb2_mate(catalog("ex2-e4"), cert, GRID)
    f = frenet4(mate.curve, S, native=True)
    assert np.max(np.abs(f.K - Kp)) <= 1e-8
    assert np.max(np.abs(np.abs(f.k) - kp)) <= 1e-8
    assert np.max(np.abs(np.abs(f.bitorsion) - btp)) <= 1e-8


def test_criterion_9():
    offsets = [0.5, -0.5, 1.0, -1.0, 2.0, -2.0, LAM2, -LAM2]
    rep = nonexistence_probe4(catalog("ex2-e4"), GRID, offsets)
    assert not rep.errors and len(rep.misalignment) == 8
    assert min(rep.misalignment.values()) >= 1e-4


def test_criterion_10():
    e1 = catalog("ex1-e4")
    fit = fit_relation4(e1, GRID, pin_offset=-1.0)
    classical = verify_pair4(e1, construct_mate4(e1, -1.0, GRID), fit, GRID)
    cert = _cert()
    nb2 = verify_nb2_pair(catalog("ex2-e4"), construct_nb2_mate(catalog("ex2-e4"), cert, GRID), cert, GRID)
    for rep in (classical, nb2):
        assert set(rep.angles) == {"T", "N", "B1", "B2"}
        for st in rep.angles.values():
            assert st.spread <= 1e-8


def test_criterion_11():
    p3 = verify_pair3(catalog("ex1-e3"), construct_mate3(catalog("ex1-e3"), 2 * SQ2, GRID), GRID)
    e1 = catalog("ex1-e4")
    p4 = verify_pair4(e1, construct_mate4(e1, -1.0, GRID), fit_relation4(e1, GRID, pin_offset=-1.0), GRID)
    for rep in (p3, p4):
        lam = rep.distance.mid
        sin2 = 1.0 - rep.tangent.mid**2  # theta from the tangent inner product
        assert abs(rep.torsion_product.mid + sin2 / lam**2) <= 1e-6, (rep.dim, rep.torsion_product.mid, sin2 / lam**2)
        assert rep.torsion_product.spread <= 1e-6


def _components():
    names = [n for n in catalog_names() if "(" not in n] + ["circle3(1.5)", "helix3(1,2)", "helix3(2,-0.5)"]
    return [(n, catalog(n)) for n in names]


def test_criterion_12():
    rng = np.random.default_rng(12)
    h_for = {1: 2e-2, 2: 4e-2, 3: 8e-2, 4: 1.6e-1}
    for name, curve in _components():
        lo, hi = curve.domain
        pts = rng.uniform(lo + 0.5, hi - 0.5, 20)
        jets = curve.derivatives(pts, 4)
        for n in range(1, 5):
            fd = richardson(curve, pts, n, h=h_for[n])
            scale = 1.0 + np.abs(jets[n])
            assert np.all(np.abs(jets[n] - fd) <= 1e-6 * scale), (name, n)


def _mul(p, q):
    return np.array(hamilton(p, q))


def test_criterion_13():
    e = np.eye(4)
    for (i, j), (sgn, k) in TABLE.items():
        assert np.array_equal(_mul(e[i], e[j]), sgn * e[k]), (i, j)
    rng = np.random.default_rng(13)
    # component-major arrays: p[0] holds every e1 coefficient
    p, q, r = (rng.uniform(-1, 1, (4, 10_000)) for _ in range(3))
    tol = 1e-12
    assert np.max(np.abs(_mul(_mul(p, q), r) - _mul(p, _mul(q, r)))) <= tol
    assert np.max(np.abs(_mul(p, q + r) - _mul(p, q) - _mul(p, r))) <= tol
    assert np.max(np.abs(_mul(p + q, r) - _mul(p, r) - _mul(q, r))) <= tol
    assert np.max(np.abs(np.array(conj4(_mul(p, q))) - _mul(conj4(q), conj4(p)))) <= tol


if __name__ == "__main__":
    failed = 0
    for n in range(1, 14):
        fn = globals()[f"test_criterion_{n}"]
        try:
            fn()
            print(f"PASS  criterion {n}")
        except Exception as exc:  # noqa: BLE001 - report and keep going
            failed += 1
            print(f"FAIL  criterion {n}  {exc}")
    sys.exit(1 if failed else 0)
