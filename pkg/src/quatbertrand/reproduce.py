"""End-to-end reproduction of the two worked examples.

Each pipeline runs analyze, fit, mate, verify and (for the second example)
predict, and records published values next to computed ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bertrand import construct_mate3, construct_mate4, fit_relation3, fit_relation4, verify_pair3, verify_pair4
from .curves import catalog
from .errors import QuatCurveError
from .frenet import SampleGrid, frenet3, frenet4, verify_association
from .nb2 import construct_nb2_mate, fit_certificate, predict_mate_curvatures, verify_nb2_pair
from .stats import max_abs

SQ2, SQ3, SQ5, SQ17, SQ37 = (math.sqrt(x) for x in (2, 3, 5, 17, 37))


@dataclass(frozen=True)
class Row:
    example: int
    quantity: str
    expected: float
    computed: float
    defect: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.defect <= self.tol

    def to_dict(self) -> dict:
        return {
            "example": self.example,
            "quantity": self.quantity,
            "expected": self.expected,
            "computed": self.computed,
            "defect": self.defect,
            "tol": self.tol,
            "ok": self.ok,
        }


def _const(ex, name, expected, values, tol):
    """Row comparing a sampled function against a constant: worst pointwise gap."""
    v = np.asarray(values, dtype=float)
    return Row(ex, name, expected, float(np.mean(v)), max_abs(v - expected), tol)


def _err(ex, name, exc) -> Row:
    return Row(ex, f"{name} [{type(exc).__name__}: {exc}]", math.nan, math.nan, math.inf, 0.0)


def example1(grid: SampleGrid) -> list[Row]:
    rows = []
    s = grid.points
    e4, e3 = catalog("ex1-e4"), catalog("ex1-e3")
    f4 = frenet4(e4, s)
    rows += [
        _const(1, "K", 1 / 3, f4.K, 1e-9),
        _const(1, "k", SQ2 / 3, f4.k, 1e-9),
        _const(1, "bitorsion", 0.0, f4.bitorsion, 1e-9),
    ]
    f3 = frenet3(e3, s)
    rows += [_const(1, "k (E3)", SQ2 / 3, f3.k, 1e-9), _const(1, "r (E3)", 1 / 3, f3.r, 1e-9)]

    fit3 = fit_relation3(e3, grid, pin_offset=2 * SQ2)
    fit4 = fit_relation4(e4, grid, pin_offset=-1.0)
    rows += [
        Row(1, "E3 cofactor (offset 2*sqrt2)", -1.0, fit3.cofactor, abs(fit3.cofactor + 1), 1e-9),
        Row(1, "E3 fit residual", 0.0, fit3.residual, fit3.residual, 1e-9),
        Row(1, "E4 cofactor (offset -1)", 2 * SQ2, fit4.cofactor, abs(fit4.cofactor - 2 * SQ2), 1e-9),
        Row(1, "E4 offset = E3 cofactor", fit3.cofactor, fit4.offset, abs(fit4.offset - fit3.cofactor), 1e-8),
        Row(1, "E4 cofactor = E3 offset", fit3.offset, fit4.cofactor, abs(fit4.cofactor - fit3.offset), 1e-8),
    ]

    m3 = construct_mate3(e3, 2 * SQ2, grid)
    m4 = construct_mate4(e4, -1.0, grid)
    d3 = max_abs(m3.points - catalog("ex1-e3-mate")(s))
    d4 = max_abs(m4.points - catalog("ex1-e4-mate")(s))
    rows += [
        Row(1, "E3 mate pointwise gap", 0.0, d3, d3, 1e-9),
        Row(1, "E4 mate pointwise gap", 0.0, d4, d4, 1e-9),
    ]
    p3 = verify_pair3(e3, m3, grid)
    p4 = verify_pair4(e4, m4, fit4, grid)
    rows += [
        _dist(1, "E3 distance", 2 * SQ2, p3.distance),
        _dist(1, "E4 distance", 1.0, p4.distance),
        Row(1, "E3 |r r*| = sin^2/lambda^2", 0.0, p3.magnitude_law_defect, p3.magnitude_law_defect, 1e-6),
        Row(1, "E4 |k k_bar| = sin^2/lambda^2", 0.0, p4.magnitude_law_defect, p4.magnitude_law_defect, 1e-6),
    ]
    for name, st in p4.angles.items():
        rows.append(Row(1, f"h({name}, {name}_bar) spread", 0.0, st.spread, st.spread, 1e-8))
    assoc = verify_association(e4, e3, grid)
    rows.append(Row(1, "association defect", 0.0, max(assoc.torsion_vs_curvature, assoc.bitorsion_vs_r_minus_K),
                    max(assoc.torsion_vs_curvature, assoc.bitorsion_vs_r_minus_K), 1e-9))
    return rows


def _dist(ex, name, expected, st):
    return Row(ex, name, expected, st.mid, max(abs(st.min - expected), abs(st.max - expected)), 1e-9 * (1 + expected))


def example2(grid: SampleGrid) -> list[Row]:
    rows = []
    s = grid.points
    e4 = catalog("ex2-e4")
    f4 = frenet4(e4, s)
    rows += [
        _const(2, "K", SQ17 / 5, f4.K, 1e-9),
        _const(2, "k", 6 / (5 * SQ17), f4.k, 1e-9),
        _const(2, "|bitorsion|", 2 / SQ17, np.abs(f4.bitorsion), 1e-9),
    ]
    lam = 5 * SQ17
    cert = fit_certificate(e4, grid, pin_lambda=lam, pin_mu=-lam)
    via_gamma = fit_certificate(e4, grid, pin_lambda=lam, pin_gamma=-1.0)
    rows += [
        Row(2, "gamma (lambda, mu pinned)", -1.0, cert.gamma, abs(cert.gamma + 1), 1e-9),
        Row(2, "delta (lambda, mu pinned)", -2.3, cert.delta, abs(cert.delta + 2.3), 1e-9),
        Row(2, "mu (lambda, gamma pinned)", -lam, via_gamma.mu, abs(via_gamma.mu + lam), 1e-9 * lam),
        Row(2, "condition (iv)", -9 / 25, cert.iv_value, abs(cert.iv_value + 9 / 25), 1e-9),
    ]
    mate = construct_nb2_mate(e4, cert, grid)
    ref = catalog("ex2-e4-mate")(16 * SQ2 * s)
    gap = max_abs(mate.points - ref)
    rows += [
        Row(2, "mate pointwise gap", 0.0, gap, gap, 1e-8),
        _const(2, "phi'", 16 * SQ2, mate.correspondence.dphi, 1e-8),
        _dist(2, "distance", math.sqrt(850), verify_nb2_pair(e4, mate, cert, grid).distance),
    ]
    Kp, kp, btp = predict_mate_curvatures(e4, cert, s)
    fm = frenet4(mate.curve, s, native=True)
    rows += [
        _const(2, "K_bar predicted", SQ37 / 160, Kp, 1e-9),
        _const(2, "k_bar predicted", 9 / (160 * SQ37), kp, 1e-9),
        _const(2, "|bitorsion_bar| predicted", 1 / (8 * SQ37), btp, 1e-9),
        Row(2, "K_bar measured vs predicted", 0.0, max_abs(fm.K - Kp), max_abs(fm.K - Kp), 1e-8),
        Row(2, "k_bar measured vs predicted", 0.0, max_abs(np.abs(fm.k) - kp), max_abs(np.abs(fm.k) - kp), 1e-8),
        Row(2, "|bitorsion_bar| measured vs predicted", 0.0, max_abs(np.abs(fm.bitorsion) - btp),
            max_abs(np.abs(fm.bitorsion) - btp), 1e-8),
    ]
    rep = verify_nb2_pair(e4, mate, cert, grid)
    for name, st in rep.angles.items():
        rows.append(Row(2, f"h({name}, {name}_bar) spread", 0.0, st.spread, st.spread, 1e-8))
    assoc = verify_association(e4, catalog("ex2-e3"), grid)
    worst = max(assoc.torsion_vs_curvature, assoc.bitorsion_vs_r_minus_K)
    rows.append(Row(2, "association defect (ex2-e3)", 0.0, worst, worst, 1e-9))
    return rows


def run(which=("1", "2"), grid: SampleGrid | None = None) -> list[Row]:
    grid = grid or SampleGrid(0.0, 10.0, 512)
    rows = []
    for w, fn in (("1", example1), ("2", example2)):
        if w in which:
            try:
                rows += fn(grid)
            except QuatCurveError as exc:
                rows.append(_err(int(w), "pipeline", exc))
    return rows


def format_table(rows) -> str:
    head = f"{'ex':>2}  {'quantity':<40} {'expected':>22} {'computed':>22} {'defect':>10}  ok"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(
            f"{r.example:>2}  {r.quantity:<40} {r.expected:>22.15g} {r.computed:>22.15g} {r.defect:>10.2e}  "
            + ("yes" if r.ok else "NO")
        )
    return "\n".join(lines) + "\n"
