"""CSV and JSON writers for frames, mates and plot data.

CSV floats use 17 significant digits; JSON floats use Python's shortest
round-trip repr. Both are exact for binary64 and deterministic.
"""

from __future__ import annotations

import io
import itertools
import json

import numpy as np

from .stats import jsonable


def _fmt(x) -> str:
    return "%.17g" % x


def columns_to_csv(columns: dict) -> str:
    """Columns (name -> 1-D array) to CSV text with a header row."""
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    n = len(arrays[0]) if arrays else 0
    if any(len(a) != n for a in arrays):
        raise ValueError("CSV columns differ in length")
    out = io.StringIO()
    out.write(",".join(names) + "\n")
    for i in range(n):
        out.write(",".join(_cell(a[i]) for a in arrays) + "\n")
    return out.getvalue()


def _cell(v) -> str:
    if isinstance(v, (str, np.str_)):
        return str(v)
    return _fmt(float(v))


def to_json(doc) -> str:
    return json.dumps(jsonable(doc), indent=2, sort_keys=False) + "\n"


def frame_columns(sample) -> dict:
    """Frame dump columns: curvatures then frame vector components."""
    cols = {"s": sample.s}
    if hasattr(sample, "B2"):
        cols.update({"K": sample.K, "k": sample.k, "bitorsion": sample.bitorsion})
        vecs = (("T", sample.T), ("N", sample.N), ("B1", sample.B1), ("B2", sample.B2))
    else:
        cols.update({"k": sample.k, "r": sample.r})
        vecs = (("t", sample.t), ("n", sample.n), ("b", sample.b))
    for name, v in vecs:
        for j in range(v.shape[-1]):
            cols[f"{name}{j + 1}"] = v[..., j]
    cols["speed"] = sample.speed
    return cols


def frames_csv(sample) -> str:
    return columns_to_csv(frame_columns(sample))


def frames_json(sample) -> dict:
    return {name: np.asarray(v) for name, v in frame_columns(sample).items()}


def plot_data(curves: dict, s) -> str:
    """Tidy CSV of every 2-D and 3-D coordinate projection of each named curve.

    Columns: curve, projection, s, u, v, w (``w`` empty for planar projections).
    """
    s = np.asarray(s, dtype=float)
    out = io.StringIO()
    out.write("curve,projection,s,u,v,w\n")
    for label, (curve, params) in curves.items():
        pts = curve(params)
        dim = pts.shape[-1]
        for size in (2, 3):
            if size >= dim and not (size == dim == 3):
                continue
            for axes in itertools.combinations(range(dim), size):
                proj = "x" + "x".join(str(a + 1) for a in axes)
                for i in range(len(s)):
                    vals = [_fmt(pts[i, a]) for a in axes]
                    if size == 2:
                        vals.append("")
                    out.write(f"{label},{proj},{_fmt(s[i])},{','.join(vals)}\n")
    return out.getvalue()
