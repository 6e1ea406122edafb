"""Quaternionic curve geometry: Frenet frames in E^3/E^4, Bertrand mates and (N,B2)-Bertrand mates."""

from .curves import Curve, CurveSpec, catalog, catalog_names, curve_from_json, load_curve
from .frenet import (
    Correspondence,
    SampleGrid,
    arclength,
    frenet3,
    frenet4,
    reparameterize,
    verify_association,
)
from .quat import Quaternion, conj, hform, is_spatial, mul, norm

__version__ = "0.1.0"
