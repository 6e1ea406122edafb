import json
import math

import numpy as np
import pytest

from oracles import CLOSURES, SQ2, SQ3, circle_closure, closure_derivatives, helix_closure
from quatbertrand.curves import CurveSpec, catalog, catalog_names, curve_from_json, load_curve
from quatbertrand.errors import CurveSpecError, DegeneracyError, ParseError, UnknownCurveError


def test_catalog_points():
    assert np.allclose(catalog("ex1-e4")(0.0), [1, 0, 0, 0])
    assert np.allclose(catalog("ex2-e4")(0.0), [1, 0, 1, 0])
    c = catalog("circle3(2)")
    assert np.allclose(c(0.0), [2, 0, 0])
    assert math.isclose(float(c.speed(0.0)), 1.0)


def test_catalog_names_cover_required_entries():
    names = set(catalog_names())
    for n in ("ex1-e4", "ex1-e4-mate", "ex1-e3", "ex1-e3-mate", "ex2-e4", "ex2-e4-mate", "ex2-e3", "ex2-e3-mate"):
        assert n in names


@pytest.mark.parametrize("bad", ["nope", "circle3", "circle3(1,2)", "helix3(x,1)", "circle3(-1)", "ex1-e4(2)"])
def test_unknown_catalog_names(bad):
    with pytest.raises(UnknownCurveError):
        catalog(bad)


def _closure(name):
    if name.startswith("circle3"):
        return circle_closure(float(name[8:-1]))
    if name.startswith("helix3"):
        a, b = (float(x) for x in name[7:-1].split(","))
        return helix_closure(a, b)
    return CLOSURES[name]


ALL = sorted(CLOSURES) + ["circle3(2)", "circle3(0.5)", "helix3(1,2)", "helix3(3,-1)"]


@pytest.mark.parametrize("name", ALL)
def test_jet_derivatives_match_hand_derivatives(name):
    s = np.random.default_rng(11).uniform(0, 10, 20)
    got = catalog(name).derivatives(s, 4)
    want = closure_derivatives(_closure(name), s, 4)
    assert np.max(np.abs(got - want)) <= 1e-10 * (1 + np.max(np.abs(want)))


@pytest.mark.parametrize("name", ["ex1-e4", "ex1-e3", "ex1-e3-mate", "ex2-e4", "ex2-e4-mate", "ex2-e3", "ex2-e3-mate"])
def test_arc_length_entries_are_unit_speed(name):
    assert np.allclose(catalog(name).speed(np.linspace(0, 10, 50)), 1.0, atol=1e-12)


def test_printed_second_spatial_curve_is_not_unit_speed():
    # its first component has slope 9/(3 sqrt 85); 27/(3 sqrt 85) is needed for unit speed
    sp = catalog("ex2-e3-printed").speed(np.linspace(0, 10, 10))
    assert np.all(np.abs(sp - 1) > 0.1)


def test_source_parameter_mates_have_constant_speed():
    assert np.allclose(catalog("ex1-e4-mate").speed(np.linspace(0, 10, 9)), SQ2)
    assert np.allclose(catalog("ex2-e4-mate-s").speed(np.linspace(0, 10, 9)), 16 * SQ2)


def test_curve_from_json_round_trip(tmp_path):
    doc = {"dim": 3, "components": ["cos(s)", "sin(s)", "s"], "domain": [0, 5], "label": "h"}
    c = curve_from_json(doc)
    assert c.dim == 3 and c.domain == (0.0, 5.0) and c.label == "h"
    path = tmp_path / "c.json"
    path.write_text(json.dumps(c.to_json()))
    c2 = load_curve(path)
    assert c2 == c


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"components": ["s", "0", "0"]},
        {"dim": 5, "components": ["s"] * 5},
        {"dim": 3, "components": ["s", "0"]},
        {"dim": 3, "components": "s"},
        {"dim": 3, "components": ["s", "0", "0"], "domain": [1]},
        {"dim": 3, "components": ["s", "0", "0"], "domain": [2, 1]},
        {"dim": 3, "components": ["s", "0", "0"], "label": 3},
        {"dim": True, "components": ["s", "0", "0"]},
    ],
)
def test_invalid_specs(doc):
    with pytest.raises(CurveSpecError):
        curve_from_json(doc)


def test_parse_error_in_spec_propagates():
    with pytest.raises(ParseError):
        curve_from_json({"dim": 3, "components": ["s", "sin(s", "0"]})


def test_irregular_curve_rejected_at_load():
    with pytest.raises(DegeneracyError):
        curve_from_json({"dim": 3, "components": ["1", "2", "3"]})


def test_load_curve_io_errors(tmp_path):
    with pytest.raises(CurveSpecError):
        load_curve(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(CurveSpecError):
        load_curve(bad)


def test_curvespec_validation():
    with pytest.raises(CurveSpecError):
        CurveSpec.from_texts(["s", "s"])
    with pytest.raises(CurveSpecError):
        CurveSpec.from_texts(["s", "0", "0"], domain=(1, 1))


def test_constant_components_broadcast_over_grid():
    c = catalog("line3")
    d = c.derivatives(np.linspace(0, 1, 4), 2)
    assert d.shape == (3, 4, 3)
    assert np.all(d[2] == 0) and np.all(d[1] == [1, 0, 0])


def test_first_example_constants():
    # alpha'' at 0 for ex1-e4 is (-1/3, 0, 0, 0)
    d = catalog("ex1-e4").derivatives(0.0, 2)
    assert np.allclose(d[2], [-1 / 3, 0, 0, 0], atol=1e-16)
    assert math.isclose(float(d[1][2]), 1 / SQ3)
