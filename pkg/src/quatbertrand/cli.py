"""Command-line interface.

Usage::

    quatbertrand analyze --catalog ex1-e4
    quatbertrand bertrand fit --catalog ex1-e3 --pin-offset 2.8284271247461903
    quatbertrand bertrand mate --catalog "circle3(2)" --offset 1
    quatbertrand bertrand probe --catalog ex2-e4
    quatbertrand nb2 fit --catalog ex2-e4 --pin-lambda 20.615528128088304 --pin-mu -20.615528128088304
    quatbertrand nb2 predict --catalog ex2-e4 --pin-lambda 20.6155 --pin-gamma -1 --at 1.0
    quatbertrand examples --which 2

Exit codes: 0 pass, 2 mathematical rejection, 3 degeneracy or failed
precondition, 4 input error. ``QC_TOL`` sets the default tolerance.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import bertrand, export, nb2, reproduce
from .curves import Curve, catalog, load_curve
from .errors import InputError, QuatCurveError
from .frenet import SampleGrid, frenet
from .stats import jsonable

EXIT_OK, EXIT_REJECT, EXIT_DEGENERATE, EXIT_INPUT = 0, 2, 3, 4
DEFAULT_TOL = 1e-8
DEFAULT_COUNT = 512
MIN_FIT_COUNT = 8


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    args: argparse.Namespace
    tol: float
    out: object  # text stream for the primary output
    err: object


def _default_tol() -> float:
    raw = os.environ.get("QC_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise InputError(f"QC_TOL must be a number, got {raw!r}") from None
    if not (tol > 0 and math.isfinite(tol)):
        raise InputError(f"QC_TOL must be positive, got {raw!r}")
    return tol


# argument wiring --------------------------------------------------------------


def _curve_args(p, *, fit=False):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--catalog", metavar="NAME", help="built-in curve, e.g. ex1-e4 or 'helix3(1,2)'")
    src.add_argument("--spec", metavar="PATH", help="curve-spec JSON file")
    p.add_argument("--s-min", type=float, default=None, help="grid start (default: curve domain start)")
    p.add_argument("--s-max", type=float, default=None, help="grid end (default: curve domain end)")
    p.add_argument("--count", type=int, default=DEFAULT_COUNT, help="grid points (default 512)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--output", "-o", metavar="PATH", help="write the result here instead of stdout")
    p.add_argument("--tol", type=float, default=None, help="acceptance tolerance (default QC_TOL or 1e-8)")
    p.set_defaults(needs_fit_grid=fit)


def _beta_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--beta-catalog", metavar="NAME")
    src.add_argument("--beta-spec", metavar="PATH")
    p.add_argument(
        "--beta-scale", type=float, default=1.0,
        help="evaluate the mate at scale*s for grid point s (default 1: common parameter)",
    )


def _nb2_pins(p):
    p.add_argument("--pin-lambda", type=float)
    p.add_argument("--pin-mu", type=float)
    p.add_argument("--pin-gamma", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="quatbertrand", description="Frenet apparatus and Bertrand mates of curves in E^3 and E^4.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="frame and curvature table")
    _curve_args(p)
    p.add_argument("--emit", choices=("frames", "plot-data"), default="frames")

    b = sub.add_parser("bertrand", help="classical Bertrand fit, mate, verify, probe")
    bsub = b.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = bsub.add_parser("fit")
    _curve_args(p, fit=True)
    pins = p.add_mutually_exclusive_group()
    pins.add_argument("--pin-offset", type=float)
    pins.add_argument("--pin-cofactor", type=float)
    p = bsub.add_parser("mate")
    _curve_args(p)
    p.add_argument("--offset", type=float, required=True)
    p = bsub.add_parser("verify")
    _curve_args(p, fit=True)
    _beta_args(p)
    p = bsub.add_parser("probe")
    _curve_args(p)
    p.add_argument("--offsets", type=_float_list, default=None, help="comma-separated trial offsets")
    p.add_argument("--floor", type=float, default=bertrand.PROBE_FLOOR)

    n = sub.add_parser("nb2", help="(N,B2)-Bertrand certificate, mate, prediction, verification")
    nsub = n.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("fit", "mate", "predict", "verify"):
        p = nsub.add_parser(name)
        _curve_args(p, fit=True)
        _nb2_pins(p)
        if name == "predict":
            p.add_argument("--at", type=float, required=True, help="source parameter value")
        if name == "verify":
            _beta_args(p)

    p = sub.add_parser("examples", help="reproduce the two worked examples")
    p.add_argument("--which", choices=("1", "2", "all"), default="all")
    p.add_argument("--count", type=int, default=DEFAULT_COUNT)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", "-o", metavar="PATH")
    return ap


def _float_list(text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# helpers -----------------------------------------------------------------


def _load(catalog_name, spec_path) -> Curve:
    return catalog(catalog_name) if catalog_name else load_curve(spec_path)


def _grid(cfg: RunConfig, curve: Curve) -> SampleGrid:
    a = cfg.args
    lo = a.s_min if a.s_min is not None else curve.domain[0]
    hi = a.s_max if a.s_max is not None else curve.domain[1]
    if a.count < 2:
        raise InputError("--count must be at least 2")
    if a.needs_fit_grid and a.count < MIN_FIT_COUNT:
        raise InputError(f"fits need --count >= {MIN_FIT_COUNT}")
    try:
        return SampleGrid(lo, hi, a.count)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _emit(cfg: RunConfig, text: str):
    path = getattr(cfg.args, "output", None)
    if path:
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {path}: {exc}") from None
    else:
        cfg.out.write(text)


def _flatten(doc, prefix=""):
    if isinstance(doc, dict):
        for k, v in doc.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(doc, list):
        for i, v in enumerate(doc):
            yield from _flatten(v, f"{prefix}.{i}")
    else:
        yield prefix, doc


def _report_text(cfg: RunConfig, doc: dict, default="json") -> str:
    fmt = cfg.args.format or default
    if fmt == "json":
        return export.to_json(doc)
    lines = ["key,value"]
    for k, v in _flatten(jsonable(doc)):
        if isinstance(v, float):
            v = "%.17g" % v
        elif v is None:
            v = ""
        lines.append(f"{k},{v}")
    return "\n".join(lines) + "\n"


def _beta(cfg: RunConfig, grid: SampleGrid):
    a = cfg.args
    curve = _load(a.beta_catalog, a.beta_spec)
    if a.beta_scale <= 0:
        raise InputError("--beta-scale must be positive")
    return curve, a.beta_scale * grid.points


def _summary(cfg: RunConfig, text: str):
    # summaries go next to the data: stdout when the data goes to a file
    (cfg.out if getattr(cfg.args, "output", None) else cfg.err).write(text)


def _num(x: float) -> str:
    return "0" if abs(x) < 1e-12 else f"{x:.9g}"


# commands ----------------------------------------------------------------


def cmd_analyze(cfg: RunConfig) -> int:
    a = cfg.args
    curve = _load(a.catalog, a.spec)
    grid = _grid(cfg, curve)
    s = grid.points
    f = frenet(curve, s, native=True)
    if a.emit == "plot-data":
        _emit(cfg, export.plot_data({curve.label or "curve": (curve, s)}, s))
    elif (a.format or "csv") == "csv":
        _emit(cfg, export.frames_csv(f))
    else:
        _emit(cfg, export.to_json({"label": curve.label, "frames": export.frames_json(f)}))
    speed_defect = float(np.max(np.abs(f.speed - 1.0)))
    if curve.dim == 4:
        parts = [("K", f.K), ("k", f.k), ("bitorsion", f.bitorsion)]
    else:
        parts = [("k", f.k), ("r", f.r)]
    line = ", ".join(f"{n}={_num(float(np.mean(v)))}" for n, v in parts)
    spreads = ", ".join(f"{n}={float(np.ptp(v)):.3g}" for n, v in parts)
    _summary(cfg, f"{line}\nspreads: {spreads}\nunit-speed defect: {speed_defect:.3g}\n")
    return EXIT_OK


def cmd_bertrand(cfg: RunConfig) -> int:
    a = cfg.args
    curve = _load(a.catalog, a.spec)
    grid = _grid(cfg, curve)
    if a.action == "fit":
        fit_fn = bertrand.fit_relation3 if curve.dim == 3 else bertrand.fit_relation4
        fit = fit_fn(curve, grid, pin_offset=a.pin_offset, pin_cofactor=a.pin_cofactor, tol=cfg.tol)
        _emit(cfg, _report_text(cfg, fit.to_dict()))
        return EXIT_OK if fit.accepted else EXIT_REJECT
    if a.action == "mate":
        make = bertrand.construct_mate3 if curve.dim == 3 else bertrand.construct_mate4
        mate = make(curve, a.offset, grid)
        if (a.format or "csv") == "csv":
            _emit(cfg, export.columns_to_csv(mate.to_columns()))
        else:
            _emit(cfg, export.to_json({"offset": a.offset, **mate.to_columns()}))
        return EXIT_OK
    if a.action == "verify":
        beta, sb = _beta(cfg, grid)
        if curve.dim == 3:
            rep = bertrand.verify_pair3(curve, beta, grid, cfg.tol, beta_s=sb)
        else:
            rep = bertrand.verify_pair4(curve, beta, None, grid, cfg.tol, beta_s=sb)
        _emit(cfg, _report_text(cfg, rep.to_dict()))
        return EXIT_OK if rep.passed else EXIT_REJECT
    # probe
    rep = bertrand.nonexistence_probe4(curve, grid, a.offsets, a.floor)
    _emit(cfg, _report_text(cfg, rep.to_dict()))
    _summary(cfg, rep.summary() + "\n")
    return EXIT_OK if rep.passed else EXIT_REJECT


def cmd_nb2(cfg: RunConfig) -> int:
    a = cfg.args
    curve = _load(a.catalog, a.spec)
    grid = _grid(cfg, curve)
    cert = nb2.fit_certificate(
        curve, grid, pin_lambda=a.pin_lambda, pin_mu=a.pin_mu, pin_gamma=a.pin_gamma, tol=cfg.tol
    )
    if a.action == "fit":
        _emit(cfg, _report_text(cfg, cert.to_dict()))
        return EXIT_OK if cert.accepted else EXIT_REJECT
    if not cert.accepted:
        _emit(cfg, _report_text(cfg, cert.to_dict()))
        return EXIT_REJECT
    if a.action == "predict":
        Kb, kb, btb = (float(v) for v in nb2.predict_mate_curvatures(curve, cert, a.at))
        doc = {"s": a.at, "K_bar": Kb, "k_bar": kb, "bitorsion_bar_abs": btb, "certificate": cert.to_dict()}
        _emit(cfg, _report_text(cfg, doc))
        return EXIT_OK
    if a.action == "mate":
        mate = nb2.construct_nb2_mate(curve, cert, grid)
        if (a.format or "csv") == "csv":
            _emit(cfg, export.columns_to_csv(mate.to_columns()))
        else:
            _emit(cfg, export.to_json({"certificate": mate.cert.to_dict(), **mate.to_columns()}))
        return EXIT_OK
    beta, sb = _beta(cfg, grid)
    rep = nb2.verify_nb2_pair(curve, beta, cert, grid, cfg.tol, beta_s=sb)
    _emit(cfg, _report_text(cfg, rep.to_dict()))
    return EXIT_OK if rep.passed else EXIT_REJECT


def cmd_examples(cfg: RunConfig) -> int:
    a = cfg.args
    which = ("1", "2") if a.which == "all" else (a.which,)
    if a.count < MIN_FIT_COUNT:
        raise InputError(f"fits need --count >= {MIN_FIT_COUNT}")
    rows = reproduce.run(which, SampleGrid(0.0, 10.0, a.count))
    if a.format == "json":
        _emit(cfg, export.to_json({"rows": [r.to_dict() for r in rows], "passed": all(r.ok for r in rows)}))
    else:
        _emit(cfg, reproduce.format_table(rows))
    if all(r.ok for r in rows):
        return EXIT_OK
    return EXIT_DEGENERATE if any(math.isnan(r.computed) for r in rows) else EXIT_REJECT


COMMANDS = {"analyze": cmd_analyze, "bertrand": cmd_bertrand, "nb2": cmd_nb2, "examples": cmd_examples}


def main(argv=None, stdout=None, stderr=None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        tol = getattr(args, "tol", None)
        if tol is None:
            tol = _default_tol()
        elif not (tol > 0 and math.isfinite(tol)):
            raise InputError("--tol must be positive")
        return COMMANDS[args.command](RunConfig(args, tol, out, err))
    except QuatCurveError as exc:
        err.write(f"error: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
