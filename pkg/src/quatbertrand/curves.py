"""Parametric curve definitions and the built-in catalog."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dsl
from .errors import CurveSpecError, DegeneracyError, UnknownCurveError
from .jet import TaylorJet

REGULARITY_TOL = 1e-9
DEFAULT_DOMAIN = (0.0, 10.0)


class Curve:
    """Anything that can produce coordinate jets about parameter values.

    Subclasses implement :meth:`jets`; point evaluation and derivatives come
    for free.
    """

    dim: int
    label: str
    domain: tuple[float, float]

    def jets(self, s, order: int) -> list[TaylorJet]:
        raise NotImplementedError

    def __call__(self, s) -> np.ndarray:
        """Points ``alpha(s)`` with shape ``(*np.shape(s), dim)``."""
        return np.stack([j.value for j in self.jets(s, 0)], axis=-1)

    def derivatives(self, s, upto: int) -> np.ndarray:
        """``alpha(s), alpha'(s), ..., alpha^(upto)(s)``, shape ``(upto + 1, *np.shape(s), dim)``."""
        js = self.jets(s, upto)
        return np.stack([j.derivatives(upto) for j in js], axis=-1)

    def speed(self, s) -> np.ndarray:
        d = self.derivatives(s, 1)[1]
        return np.linalg.norm(d, axis=-1)


@dataclass(frozen=True)
class CurveSpec(Curve):
    dim: int
    components: tuple
    domain: tuple[float, float] = DEFAULT_DOMAIN
    label: str = ""
    texts: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.dim not in (3, 4):
            raise CurveSpecError(f"dim must be 3 or 4, got {self.dim}")
        if len(self.components) != self.dim:
            raise CurveSpecError(f"expected {self.dim} components, got {len(self.components)}")
        lo, hi = self.domain
        if not lo < hi:
            raise CurveSpecError(f"empty domain [{lo}, {hi}]")

    @classmethod
    def from_texts(cls, texts, domain=DEFAULT_DOMAIN, label="") -> "CurveSpec":
        texts = tuple(texts)
        exprs = tuple(dsl.parse(t) for t in texts)
        return cls(len(texts), exprs, (float(domain[0]), float(domain[1])), label, texts)

    def jets(self, s, order: int) -> list[TaylorJet]:
        seed = TaylorJet.seed(s, order)
        out = []
        for e in self.components:
            v = dsl.evaluate(e, seed)
            if not isinstance(v, TaylorJet):
                v = TaylorJet.const(v, order, seed.batch_shape)
            out.append(v)
        return out

    def check_regular(self, count: int = 64, tol: float = REGULARITY_TOL):
        s = np.linspace(*self.domain, count)
        speed = self.speed(s)
        bad = np.flatnonzero(speed <= tol)
        if bad.size:
            raise DegeneracyError(
                f"curve {self.label or '<anonymous>'} is not regular at s={s[bad[0]]:.6g} "
                f"(|alpha'| = {speed[bad[0]]:.3g})"
            )
        return self

    def to_json(self) -> dict:
        texts = self.texts or tuple(dsl.to_text(e) for e in self.components)
        return {"dim": self.dim, "components": list(texts), "domain": list(self.domain), "label": self.label}


def curve_from_json(doc) -> CurveSpec:
    """Build a curve from the ``{"dim", "components", "domain", "label"}`` document."""
    if not isinstance(doc, dict):
        raise CurveSpecError("curve spec must be a JSON object")
    missing = {"dim", "components"} - doc.keys()
    if missing:
        raise CurveSpecError(f"curve spec is missing {sorted(missing)}")
    comps = doc["components"]
    if not isinstance(comps, list) or not all(isinstance(c, str) for c in comps):
        raise CurveSpecError("components must be a list of expression strings")
    dim = doc["dim"]
    if dim not in (3, 4) or isinstance(dim, bool):
        raise CurveSpecError(f"dim must be 3 or 4, got {dim!r}")
    if len(comps) != dim:
        raise CurveSpecError(f"expected {dim} components, got {len(comps)}")
    domain = doc.get("domain", list(DEFAULT_DOMAIN))
    try:
        lo, hi = (float(x) for x in domain)
    except (TypeError, ValueError):
        raise CurveSpecError("domain must be [s_min, s_max]") from None
    label = doc.get("label", "")
    if not isinstance(label, str):
        raise CurveSpecError("label must be a string")
    return CurveSpec.from_texts(comps, (lo, hi), label).check_regular()


def load_curve(path) -> CurveSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CurveSpecError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CurveSpecError(f"malformed JSON in {path}: {exc}") from None
    return curve_from_json(doc)


# catalog -------------------------------------------------------------------

_EX1_U = "(s/sqrt(3))"
_EX2_W = "(s/(16*sqrt(10)))"

_FIXED = {
    "ex1-e4": (
        4,
        [f"cos{_EX1_U}", f"sin{_EX1_U}", "s/sqrt(3)", "s/sqrt(3)"],
    ),
    # printed in the source curve's parameter s (speed sqrt(2))
    "ex1-e4-mate": (
        4,
        [f"2*cos{_EX1_U}", f"2*sin{_EX1_U}", "s/sqrt(3)", "s/sqrt(3)"],
    ),
    "ex1-e3": (
        3,
        ["s/sqrt(3)", f"sin{_EX1_U}+cos{_EX1_U}", f"sin{_EX1_U}-cos{_EX1_U}"],
    ),
    "ex1-e3-mate": (
        3,
        ["s/sqrt(3)", f"-sin{_EX1_U}-cos{_EX1_U}", f"-sin{_EX1_U}+cos{_EX1_U}"],
    ),
    "ex2-e4": (
        4,
        ["cos(2*s/sqrt(5))", "sin(2*s/sqrt(5))", "cos(s/sqrt(5))", "sin(s/sqrt(5))"],
    ),
    # own arc-length parameter; the source parameter maps to it by 16*sqrt(2)*s
    "ex2-e4-mate": (
        4,
        [f"-24*cos(2*{_EX2_W})", f"-24*sin(2*{_EX2_W})", f"16*cos{_EX2_W}", f"16*sin{_EX2_W}"],
    ),
    # the same mate written in the source curve's parameter
    "ex2-e4-mate-s": (
        4,
        ["-24*cos(2*s/sqrt(5))", "-24*sin(2*s/sqrt(5))", "16*cos(s/sqrt(5))", "16*sin(s/sqrt(5))"],
    ),
    # unit-speed helix with curvature 6/(5 sqrt 17) and torsion 27/(5 sqrt 17)
    "ex2-e3": (
        3,
        [
            "27*s/(3*sqrt(17)*sqrt(5))",
            "2*cos(3*s/sqrt(5))/(3*sqrt(17))",
            "2*sin(3*s/sqrt(5))/(3*sqrt(17))",
        ],
    ),
    # literal transcription of the published formula; not unit speed
    "ex2-e3-printed": (
        3,
        [
            "9*s/(3*sqrt(17)*sqrt(5))",
            "2*cos(3*s/sqrt(5))/(3*sqrt(17))",
            "2*sin(3*s/sqrt(5))/(3*sqrt(17))",
        ],
    ),
    "ex2-e3-mate": (
        3,
        [
            f"16/sqrt(37)*19*{_EX2_W}",
            f"-16/sqrt(37)*cos(3*{_EX2_W})",
            f"-16/sqrt(37)*sin(3*{_EX2_W})",
        ],
    ),
    "line3": (3, ["s", "0", "0"]),
    "cubic3": (3, ["s", "s^2/2", "s^3/6"]),
}

_PARAMETRIC = {"circle3": 1, "helix3": 2}

_NAME = re.compile(r"^\s*([A-Za-z][\w-]*)\s*(?:\((.*)\))?\s*$")


def catalog_names() -> list[str]:
    return sorted(_FIXED) + ["circle3(R)", "helix3(a,b)"]


def catalog(name: str, domain=DEFAULT_DOMAIN) -> CurveSpec:
    """A built-in curve by name, e.g. ``"ex1-e4"`` or ``"helix3(1, 2)"``."""
    m = _NAME.match(name)
    if m is None:
        raise UnknownCurveError(f"unknown catalog curve {name!r}")
    key, args = m.group(1), m.group(2)
    if key in _FIXED and args is None:
        dim, texts = _FIXED[key]
        return CurveSpec.from_texts(texts, domain, key)
    if key not in _PARAMETRIC:
        raise UnknownCurveError(f"unknown catalog curve {name!r}; known: {', '.join(catalog_names())}")
    try:
        vals = [float(a) for a in (args or "").split(",")] if args and args.strip() else []
    except ValueError:
        raise UnknownCurveError(f"bad parameters in {name!r}") from None
    if len(vals) != _PARAMETRIC[key]:
        raise UnknownCurveError(f"{key} takes {_PARAMETRIC[key]} parameter(s), got {len(vals)}")
    label = f"{key}({','.join(f'{v:g}' for v in vals)})"
    if key == "circle3":
        (r,) = vals
        if r <= 0:
            raise UnknownCurveError("circle3 radius must be positive")
        R = _lit(r)
        texts = [f"{R}*cos(s/{R})", f"{R}*sin(s/{R})", "0"]
    else:
        a, b = vals
        c = math.hypot(a, b)
        if a <= 0 or c == 0:
            raise UnknownCurveError("helix3 needs a > 0")
        A, B, C = _lit(a), _lit(b), _lit(c)
        texts = [f"{A}*cos(s/{C})", f"{A}*sin(s/{C})", f"{B}*s/{C}"]
    return CurveSpec.from_texts(texts, domain, label)


def _lit(x: float) -> str:
    return f"({x!r})" if x < 0 else repr(float(x))
