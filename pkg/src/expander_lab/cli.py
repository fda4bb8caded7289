"""Command-line front end: examples, residuals, shoot, check, area.

Exit codes: 0 success, 1 a computed check failed, 2 invalid input.
"""
from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import io as lab_io
from . import measure, rigidity
from .canonical import make_cylinder, make_hyperplane, make_sphere
from .drifted import scalar_identity_residuals
from .errors import ExpanderLabError
from .geometry import ExpanderSpec, ParamGrid, expander_residual
from .profile import revolve, shoot_closed

EXAMPLE_TOL = 1e-12
ORDER_MIN = 1.8
RESIDUAL_FLOOR = 1e-9

CONDITIONS = {
    "gap": lambda s, spec, a: rigidity.check_gap_lambda(s),
    "pinching": lambda s, spec, a: rigidity.check_pinching(s, spec),
    "mean-convex": lambda s, spec, a: rigidity.check_mean_convex_condition(s, spec),
    "sphere": lambda s, spec, a: rigidity.check_sphere_condition(s, spec),
    "huisken": lambda s, spec, a: rigidity.check_huiss_condition(s, spec),
    "tu": lambda s, spec, a: rigidity.check_tu_condition(s, spec, a),
    "smoczyk": lambda s, spec, a: rigidity.check_smoczyk_conditions(s, spec),
    "cmc": lambda s, spec, a: rigidity.check_cmc_identity(s, spec),
    "norm-weighted": lambda s, spec, a: rigidity.check_weighted_norm_condition(s, spec),
    "cylinder": lambda s, spec, a: rigidity.check_cylinder_conditions(s, spec, a),
}


class UsageError(Exception):
    pass


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _pair(text: str) -> tuple:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}")
    return tuple(vals)


_NEG_LIST = re.compile(r"^-[\d.]")


def _join_negative_values(argv: list) -> list:
    # argparse reads "-1" or "-8,-0.1" as an option; glue such values to their flag
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEG_LIST.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def _surface_flags(p):
    p.add_argument("--surface", default="sphere",
                   help="sphere, cylinder, hyperplane or a profile CSV path")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--d", type=float, default=0.0)
    p.add_argument("--L", type=float, default=10.0)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--s-range", type=_pair, default=None,
                   help="arclength window of a profile CSV")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expander-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("examples", help="table of canonical examples")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--kind", choices=["sphere", "cylinder", "hyperplane", "all"], default="all")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--radii", type=_floats, default=[0.5, 1.0, 2.0, 4.0],
                   help="radii (distances d for hyperplanes)")
    p.add_argument("--tol", type=float, default=EXAMPLE_TOL)
    p.add_argument("--out", default=None)

    p = sub.add_parser("residuals", help="scalar identity residuals and orders")
    _surface_flags(p)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("shoot", help="closed profiles by shooting")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--u0-range", type=_pair, default=(-10.0, -0.05))
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--s-max", type=float, default=50.0)
    p.add_argument("--h-ode", type=float, default=None)
    p.add_argument("--expect-roots", type=int, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("check", help="rigidity hypothesis on a surface")
    p.add_argument("--condition", choices=sorted(CONDITIONS), required=True)
    _surface_flags(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("area", help="weighted area, or an area series with growth fit")
    _surface_flags(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--radii", type=_floats, default=None)
    p.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)
    return ap


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _surface(args):
    """Surface named on the command line, with the spec used for checks."""
    name = args.surface
    if name == "sphere":
        s = make_sphere(args.n, args.r)
    elif name == "cylinder":
        s = make_cylinder(args.k, args.n, args.r, L=args.L)
    elif name == "hyperplane":
        s = make_hyperplane(args.n, abs(args.d), sign=1 if args.d >= 0 else -1, L=args.L)
    else:
        path = Path(name)
        if not path.is_file():
            raise UsageError(f"unknown surface {name!r}")
        if args.lam is None:
            raise UsageError("a profile CSV needs --lambda")
        prof = lab_io.read_profile_csv(path, args.lam, args.n)
        s_range = args.s_range
        if s_range is None:
            # stay clear of the axis, where interpolated curvature degrades
            far = np.nonzero(prof.v >= 0.25 * prof.v.max())[0]
            s_range = (prof.s[far[0]], prof.s[far[-1]])
        s = revolve(prof, s_range=s_range)
        if args.n == 2:
            s = s.with_domain([s.patch.domain[0], (0.0, 0.5)])
    spec = ExpanderSpec(s.spec.n, s.spec.lam if args.lam is None else args.lam)
    return s, spec


def run_examples(args) -> int:
    n = args.n
    if n < 1 or any(not r > 0 for r in args.radii if args.kind != "hyperplane"):
        raise UsageError("radii must be positive and n >= 1")
    if args.kind == "hyperplane" and any(d < 0 for d in args.radii):
        raise UsageError("hyperplane distances must be non-negative")
    rows = []
    kinds = ["sphere", "cylinder", "hyperplane"] if args.kind == "all" else [args.kind]
    for kind in kinds:
        for r in args.radii:
            if kind == "sphere":
                examples = [make_sphere(n, r)]
            elif kind == "cylinder":
                ks = [args.k] if args.k is not None else range(1, n)
                examples = [make_cylinder(k, n, r) for k in ks]
            else:
                examples = [make_hyperplane(n, r)]
            for ex in examples:
                grid = ParamGrid(tuple(np.linspace(lo, hi, 9) for lo, hi in ex.patch.domain))
                J = ex.closed_form_grid(grid)
                res = float(np.max(np.abs(expander_residual(J, ex.spec))))
                rows.append([ex.kind, ex.n, ex.k, ex.r if ex.r is not None else ex.d, ex.lam,
                             float(np.mean(J.H)), float(np.mean(J.normA2)), res])
    text = _table(["kind", "n", "k", "r", "lambda", "H", "normA2", "residual"], rows)
    _emit(text, args.out)
    return 1 if any(row[-1] > args.tol for row in rows) else 0


def _table(header, rows) -> str:
    import io
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(c)) if isinstance(c, float) else c for c in row])
    return buf.getvalue()


def run_residuals(args) -> int:
    surface, spec = _surface(args)
    h = args.h if args.h is not None else 0.02
    reports = scalar_identity_residuals(surface, spec, h=h)
    _emit(lab_io.to_json(reports), args.out)
    bad = [r for r in reports
           if r.max_abs > RESIDUAL_FLOOR and not (np.isfinite(r.order_estimate)
                                                 and r.order_estimate >= ORDER_MIN)]
    return 1 if bad else 0


def run_shoot(args) -> int:
    lo, hi = args.u0_range
    if not lo < hi or args.samples < 2:
        raise UsageError("need u0-range lo < hi and at least two samples")
    res = shoot_closed(ExpanderSpec(args.n, args.lam), (lo, hi), n_samples=args.samples,
                       s_max=args.s_max, h_ode=args.h_ode)
    _emit(lab_io.to_json(res), args.out)
    if args.expect_roots is not None and len(res.roots) != args.expect_roots:
        return 1
    return 0


def run_check(args) -> int:
    surface, spec = _surface(args)
    rep = CONDITIONS[args.condition](surface, spec, args.alpha)
    _emit(lab_io.to_json(rep), args.out)
    return 0 if rep.holds_everywhere else 1


def run_area(args) -> int:
    surface, _ = _surface(args)
    if args.radii:
        radii = np.asarray(args.radii, dtype=float)
        if np.any(radii <= 0):
            raise UsageError("radii must be positive")
        series = measure.area_series(surface, radii, alpha=args.alpha)
        if args.fmt == "csv":
            _emit(lab_io.write_area_csv(series), args.out)
        else:
            fit = series.fit.to_dict() if series.fit else None
            _emit(lab_io.to_json({"radii": radii, "areas": series.areas, "fit": fit}), args.out)
        return 0
    if args.R is None or not args.R > 0:
        raise UsageError("need --R > 0 or --radii")
    value = measure.weighted_area(surface, args.alpha, args.R)
    _emit(lab_io.to_json({"alpha": args.alpha, "R": args.R, "weighted_area": value}), args.out)
    return 0 if math.isfinite(value) else 1


COMMANDS = {"examples": run_examples, "residuals": run_residuals, "shoot": run_shoot,
            "check": run_check, "area": run_area}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return COMMANDS[args.subcommand](args)
    except (UsageError, ExpanderLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
