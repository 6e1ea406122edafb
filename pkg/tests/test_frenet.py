import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import CLOSURES, SQ2, SQ17, closure_derivatives, gram_curvatures, helix_closure
from quatbertrand import export
from quatbertrand.curves import CurveSpec, catalog
from quatbertrand.errors import CorrespondenceError, NotUnitSpeedError, VanishingCurvatureError
from quatbertrand.frenet import (
    Correspondence,
    OffsetCurve,
    SampleGrid,
    arclength,
    derivatives,
    frame_determinant,
    frenet,
    frenet3,
    frenet4,
    frenet_matrix_defect,
    orthonormality_defect,
    reparameterize,
    verify_association,
)

S = np.linspace(0, 10, 101)
FRAMED = [n for n in sorted(CLOSURES) if n not in ("line3",)] + ["circle3(2)", "helix3(1,2)"]
HYPERPLANE = ["ex1-e4", "ex1-e4-mate"]


def test_derivative_examples():
    assert np.allclose(derivatives(catalog("ex1-e4"), 0.0, 2)[2], [-1 / 3, 0, 0, 0])
    assert np.all(derivatives(catalog("line3"), 1.3, 2)[2] == 0)
    assert math.isclose(np.linalg.norm(derivatives(catalog("circle3(1)"), 0.0, 1)[1]), 1.0)
    with pytest.raises(ValueError):
        derivatives(catalog("line3"), 0.0, 5)


def test_first_example_spatial_curvatures():
    f = frenet3(catalog("ex1-e3"), S)
    assert np.allclose(f.k, SQ2 / 3, atol=1e-12, rtol=0)
    assert np.allclose(f.r, 1 / 3, atol=1e-12, rtol=0)


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0, 7.0])
def test_circle_curvatures(R):
    f = frenet3(catalog(f"circle3({R})"), S)
    assert np.allclose(f.k, 1 / R, atol=1e-12, rtol=0)
    assert np.allclose(f.r, 0, atol=1e-12)


@given(st.floats(0.2, 5), st.floats(-5, 5))
def test_helix_curvatures(a, b):
    f = frenet3(catalog(f"helix3({a!r},{b!r})"), S[::10])
    c2 = a * a + b * b
    assert np.allclose(f.k, a / c2, atol=1e-10, rtol=0)
    assert np.allclose(f.r, b / c2, atol=1e-10, rtol=0)


def test_first_example_curvatures():
    f = frenet4(catalog("ex1-e4"), S)
    assert np.allclose(f.K, 1 / 3, atol=1e-12, rtol=0)
    assert np.allclose(f.k, SQ2 / 3, atol=1e-12, rtol=0)
    assert np.max(np.abs(f.bitorsion)) <= 1e-12


def test_second_example_curvatures():
    f = frenet4(catalog("ex2-e4"), S)
    assert np.allclose(f.K, SQ17 / 5, atol=1e-12, rtol=0)
    assert np.allclose(f.k, 6 / (5 * SQ17), atol=1e-12, rtol=0)
    assert np.allclose(np.abs(f.bitorsion), 10 / (5 * SQ17), atol=1e-12, rtol=0)


def test_second_example_second_binormal_orientation():
    # B2 = (cos 2u, sin 2u, -4 cos u, -4 sin u) / sqrt 17 with u = s / sqrt 5
    f = frenet4(catalog("ex2-e4"), S)
    u = S / math.sqrt(5)
    want = np.stack([np.cos(2 * u), np.sin(2 * u), -4 * np.cos(u), -4 * np.sin(u)], axis=-1) / SQ17
    assert np.allclose(f.B2, want, atol=1e-12)
    assert np.allclose(f.bitorsion, 2 / SQ17)


def test_hyperplane_curve_has_zero_bitorsion():
    # helix lifted into the hyperplane x4 = 0
    c = CurveSpec.from_texts(["cos(s/sqrt(2))", "sin(s/sqrt(2))", "s/sqrt(2)", "0"])
    f = frenet4(c, S)
    assert np.max(np.abs(f.bitorsion)) <= 1e-12
    assert np.allclose(f.k, 0.5)


def test_unit_speed_required():
    with pytest.raises(NotUnitSpeedError):
        frenet4(catalog("ex1-e4-mate"), S)
    f = frenet4(catalog("ex1-e4-mate"), S, native=True)
    assert np.allclose(f.speed, SQ2)


def test_vanishing_curvatures_raise():
    with pytest.raises(VanishingCurvatureError):
        frenet3(catalog("line3"), S)
    planar = CurveSpec.from_texts(["cos(s)", "sin(s)", "0", "0"])
    with pytest.raises(VanishingCurvatureError):
        frenet4(planar, S)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        frenet3(catalog("ex1-e4"), S)
    with pytest.raises(ValueError):
        frenet4(catalog("ex1-e3"), S)


@pytest.mark.parametrize("name", FRAMED)
def test_frames_orthonormal_and_positively_oriented(name):
    f = frenet(catalog(name), S, native=True)
    assert orthonormality_defect(f) <= 1e-9
    assert np.allclose(frame_determinant(f), 1.0, atol=1e-9)


@pytest.mark.parametrize("name", FRAMED)
def test_frame_derivatives_follow_frenet_matrix(name):
    assert frenet_matrix_defect(catalog(name), S, native=True) <= 1e-8


@pytest.mark.parametrize("name", FRAMED)
def test_curvatures_match_gram_determinant_oracle(name):
    c = catalog(name)
    closure = CLOSURES.get(name) or (helix_closure(1, 2) if name.startswith("helix") else None)
    if closure is None:
        closure = [[("cos", 2.0, 0.5)], [("sin", 2.0, 0.5)], []]
    d = closure_derivatives(closure, S, c.dim)
    want = gram_curvatures(d)
    f = frenet(c, S, native=True)
    got = [f.k, f.r] if c.dim == 3 else [f.K, f.k, f.bitorsion]
    for g, w in zip(got, want):
        assert np.allclose(g, w, atol=1e-9, rtol=1e-9)


@pytest.mark.parametrize("name", HYPERPLANE)
def test_fourth_gram_schmidt_residual_vanishes_in_hyperplane(name):
    f = frenet4(catalog(name), S, native=True)
    assert np.max(f.residual4) <= 1e-8


def test_fourth_residual_positive_off_hyperplane():
    assert np.min(frenet4(catalog("ex2-e4"), S).residual4) > 1e-3


def test_curvatures_do_not_depend_on_parameterization():
    native = frenet4(catalog("ex2-e4-mate-s"), S, native=True)
    arc = frenet4(catalog("ex2-e4-mate"), 16 * SQ2 * S)
    for a, b in zip((native.K, native.k, native.bitorsion), (arc.K, arc.k, arc.bitorsion)):
        assert np.allclose(a, b, atol=1e-8, rtol=0)
    assert np.allclose(native.T, arc.T, atol=1e-12)


def test_arclength_examples():
    assert math.isclose(arclength(catalog("ex1-e4"), 0, 5), 5.0, abs_tol=1e-10)
    mate = catalog("ex2-e4-mate-s")
    assert math.isclose(arclength(mate, 1.0, 3.5), 16 * SQ2 * 2.5, abs_tol=1e-9)
    circle = CurveSpec.from_texts(["2*cos(s)", "2*sin(s)", "0"], domain=(0, 2 * math.pi))
    assert math.isclose(arclength(circle, 0, 2 * math.pi), 4 * math.pi, abs_tol=1e-10)
    assert arclength(circle, 1, 1) == 0.0
    assert math.isclose(arclength(circle, 1, 0), -2.0, abs_tol=1e-12)


def test_arclength_of_varying_speed_curve():
    # (s, s^2/2, s^3/6) has speed 1 + s^2/2
    assert math.isclose(arclength(catalog("cubic3"), 0, 3), 3 + 27 / 6, abs_tol=1e-10)


def test_reparameterize_examples():
    g = SampleGrid(2.0, 7.0, 33)
    c = reparameterize(catalog("ex1-e4"), g)
    assert np.allclose(c.phi, g.points - 2.0, atol=1e-12)
    assert np.allclose(c.dphi, 1.0)
    c = reparameterize(catalog("ex2-e4-mate-s"), g)
    assert np.allclose(c.dphi, 16 * SQ2, atol=1e-12, rtol=0)


def test_reparameterize_converges_under_refinement():
    g = SampleGrid(0.0, 4.0, 41)
    a = reparameterize(catalog("cubic3"), g)
    b = reparameterize(catalog("cubic3"), g.refined(2))
    assert np.max(np.abs(a.phi - b.phi[::2])) <= 1e-9


def test_correspondence_must_be_monotone():
    with pytest.raises(CorrespondenceError):
        Correspondence(np.array([0.0, 1.0]), np.array([0.0, 1.0]), np.array([1.0, -1.0]))


def test_sample_grid_validation():
    with pytest.raises(ValueError):
        SampleGrid(0, 1, 1)
    with pytest.raises(ValueError):
        SampleGrid(1, 1, 5)
    assert SampleGrid(0, 1, 5).points.tolist() == [0, 0.25, 0.5, 0.75, 1]


def test_association_examples():
    g = SampleGrid(0, 10, 64)
    assert verify_association(catalog("ex1-e4"), catalog("ex1-e3"), g).passed
    assert verify_association(catalog("ex2-e4"), catalog("ex2-e3"), g).passed
    rep = verify_association(catalog("ex1-e4"), catalog("circle3(1)"), g)
    assert not rep.passed
    assert rep.torsion_vs_curvature > 0.5


def test_printed_spatial_formula_fails_association_as_written():
    with pytest.raises(NotUnitSpeedError):
        verify_association(catalog("ex2-e4"), catalog("ex2-e3-printed"), SampleGrid(0, 10, 16))


def test_offset_curve_is_jet_capable():
    base = catalog("ex1-e4")
    mate = OffsetCurve(base, {1: -1.0})
    assert np.allclose(mate(S), catalog("ex1-e4-mate")(S), atol=1e-12)
    assert np.allclose(mate.derivatives(S, 3), catalog("ex1-e4-mate").derivatives(S, 3), atol=1e-12)
    with pytest.raises(ValueError):
        OffsetCurve(base, {4: 1.0})


def test_frame_csv_dump():
    f = frenet4(catalog("ex1-e4"), np.array([0.0, 1.0]))
    text = export.frames_csv(f)
    lines = text.splitlines()
    head = lines[0].split(",")
    assert head[:4] == ["s", "K", "k", "bitorsion"]
    assert head[4:8] == ["T1", "T2", "T3", "T4"] and head[-1] == "speed"
    assert len(head) == 4 + 16 + 1 and len(lines) == 3
    assert float(lines[1].split(",")[1]) == f.K[0]
    f3 = frenet3(catalog("ex1-e3"), np.array([0.0]))
    assert export.frames_csv(f3).splitlines()[0].startswith("s,k,r,t1,t2,t3,n1")
