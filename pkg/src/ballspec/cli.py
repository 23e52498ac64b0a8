"""Command-line front end.

Examples::

    ballspec eigen --K 1 --n 3 --m 0 --l 1 --radius 1
    ballspec sweep --K -1 --n 2 --m 0 --l 1 --r-min 1 --r-max 30 --steps 30 --out sweep.csv
    ballspec check bounds
    ballspec spectrum --K 0 --n 2 --radius 1 --count 6
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import checks
from .bounds import theorem_bounds
from .geometry import Geometry, GeometryError, geometry_from_json, model_warp
from .identities import spectrum_assemble
from .radial import RadialProblem, SolverError, family_solve, solve_eigenvalue

EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_SOLVER = 3

CSV_HEADER = ["K", "n", "m", "l", "radius", "lambda", "lower", "upper", "passed"]


class InputError(ValueError):
    pass


def fmt(x) -> str:
    """17 significant digits; round-trips every double."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (float, np.floating)) and not math.isfinite(v):
        return "null"
    return fmt(v)


def json_object(d: dict) -> str:
    return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in d.items()) + "}"


def _parse_list(text, cast):
    return tuple(cast(x) for x in str(text).split(",") if x.strip())


def load_geometry(args) -> Geometry:
    if args.config:
        text = args.config
        if not text.lstrip().startswith("{"):
            try:
                text = Path(text).read_text(encoding="utf-8")
            except OSError as exc:
                raise InputError(f"cannot read config: {exc}") from None
        return geometry_from_json(text)
    if args.K is None or args.n is None:
        raise InputError("give --config or both --K and --n")
    return model_warp(args.K, args.n)


def _check_radius(geom: Geometry, r: float):
    if not r > 0:
        raise InputError("radius must be positive")
    if geom.is_model and geom.curvature > 0 and r >= math.pi / math.sqrt(geom.curvature):
        raise InputError("radius exceeds model domain")
    if r >= geom.rho:
        raise InputError("radius exceeds geometry domain")


def _bounds_or_none(geom, m, l, r, lam, tol):
    if not geom.is_model:
        return None, None, None
    lo, hi = theorem_bounds(geom.curvature, geom.n, m, l, r)
    eps = max(1e-8, 10 * tol) * abs(lam)
    return lo, hi, bool(lo - eps <= lam <= hi + eps)


def cmd_eigen(args) -> int:
    geom = load_geometry(args)
    _check_radius(geom, args.radius)
    pair = solve_eigenvalue(RadialProblem(geom, args.m, args.radius), args.l, args.tol)
    lo, hi, _ = _bounds_or_none(geom, args.m, args.l, args.radius, pair.lam, args.tol)
    print(json_object({"lambda": pair.lam, "lower": lo, "upper": hi,
                       "slope_at_t": pair.slope_at_t}))
    return 0


def sweep_rows(geom, m, l, radii, tol=1e-10, jobs=1):
    radii = list(radii)
    if jobs > 1 and len(radii) > 1:
        parts = [list(p) for p in np.array_split(np.asarray(radii), min(jobs, len(radii)))]
        with ThreadPoolExecutor(len(parts)) as ex:
            lams = [x for chunk in ex.map(lambda rs: family_solve(geom, m, l, rs, tol, True), parts)
                    for x in chunk]
    else:
        lams = family_solve(geom, m, l, radii, tol, values_only=True)
    rows = []
    for r, lam in zip(radii, lams):
        lo, hi, ok = _bounds_or_none(geom, m, l, r, lam, tol)
        rows.append({"K": geom.profile_id if not geom.is_model else geom.curvature,
                     "n": geom.n, "m": m, "l": l, "radius": r, "lambda": lam,
                     "lower": lo, "upper": hi, "passed": ok})
    return rows


def write_rows(rows, fh, fmt_name):
    if fmt_name == "json":
        fh.write("[" + ",\n ".join(json_object(r) for r in rows) + "]\n")
        return
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r["K"] if isinstance(r["K"], str) else fmt(r["K"])]
                   + [fmt(r[k]) for k in CSV_HEADER[1:]])


def cmd_sweep(args) -> int:
    geom = load_geometry(args)
    if not (0 < args.r_min < args.r_max):
        raise InputError("need 0 < r-min < r-max")
    if args.steps < 2:
        raise InputError("steps must be >= 2")
    _check_radius(geom, args.r_max)
    radii = [float(x) for x in np.linspace(args.r_min, args.r_max, args.steps)]
    buf = io.StringIO()
    rows = sweep_rows(geom, args.m, args.l, radii, args.tol, args.jobs)
    write_rows(rows, buf, args.format)
    if args.out:
        # write-then-rename so a failed sweep leaves no partial file
        out = Path(args.out)
        fd, tmp = tempfile.mkstemp(dir=out.parent or ".", prefix=out.name, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, out)
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_check(args) -> int:
    kw = {}
    if args.suite in ("bounds", "hadamard"):
        for name, flag, cast in (("Ks", args.K_list, float), ("ns", args.n_list, int),
                                 ("ms", args.m_list, int), ("ls", args.l_list, int),
                                 ("radii", args.radius_list, float)):
            if flag:
                kw[name] = _parse_list(flag, cast)
    results = checks.SUITES[args.suite](**kw)
    for res in results:
        print(res.line())
    if args.suite == "bounds":
        worst = min(r.value for r in results)
        print(f"worst margin {worst:.6e}")
    else:
        worst = max(r.value for r in results)
        print(f"worst defect {worst:.6e}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} passed")
    return 0 if failed == 0 else EXIT_CHECK_FAILED


def cmd_spectrum(args) -> int:
    geom = load_geometry(args)
    _check_radius(geom, args.radius)
    entries = spectrum_assemble(geom, args.radius, args.count, args.tol)
    rows = [{"lambda": e.lam, "m": e.m, "l": e.l, "multiplicity": e.multiplicity} for e in entries]
    if args.format == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["lambda", "m", "l", "multiplicity"])
        for r in rows:
            w.writerow([fmt(r["lambda"]), r["m"], r["l"], r["multiplicity"]])
    else:
        print("[" + ",\n ".join(json_object(r) for r in rows) + "]")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ballspec", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def geometry_flags(p):
        p.add_argument("--config", help="geometry JSON file or inline JSON object")
        p.add_argument("--K", type=float, help="model-space curvature")
        p.add_argument("--n", type=int, help="dimension")
        p.add_argument("--tol", type=float, default=1e-10, help="relative eigenvalue tolerance")

    p = sub.add_parser("eigen", help="one eigenvalue with its curvature envelope")
    geometry_flags(p)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--radius", type=float, required=True)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("sweep", help="eigenvalue along a range of radii")
    geometry_flags(p)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--r-min", type=float, required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="run a verification matrix")
    p.add_argument("suite", choices=sorted(checks.SUITES))
    p.add_argument("--K", dest="K_list", help="comma list of curvatures")
    p.add_argument("--n", dest="n_list", help="comma list of dimensions")
    p.add_argument("--m", dest="m_list", help="comma list of angular indices")
    p.add_argument("--l", dest="l_list", help="comma list of radial indices")
    p.add_argument("--radius", dest="radius_list", help="comma list of radii")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("spectrum", help="lowest ball eigenvalues with multiplicity")
    geometry_flags(p)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--count", type=int, default=6)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_spectrum)
    return ap


def _fail(code, kind, exc):
    sys.stderr.write(json_object({"error": str(exc), "kind": kind}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, GeometryError, ValueError) as exc:
        return _fail(EXIT_BAD_INPUT, "invalid_input", exc)
    except (SolverError, ArithmeticError, RuntimeError) as exc:
        return _fail(EXIT_SOLVER, "solver_failure", exc)


if __name__ == "__main__":
    raise SystemExit(main())
