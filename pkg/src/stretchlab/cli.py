"""Command line entry point for stretching experiments on triangulated surfaces.

Every subcommand writes deterministic CSV to stdout (or to the configured
paths) and exits with status 0 exactly when its checks pass, 1 when a check
fails and 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from .cones import (MinimalCone, classify_stability, cone_from_dict, product_link_spectrum,
                    closed_form_law)
from .conformal import (conformal_residuals, make_minimal, make_strictly_stable, warped_case,
                        warped_curvature)
from .errors import StretchLabError
from .experiment import (_prepare, _resolve_R, _side_of, emit_report, load_config,
                         run_stretch_experiment, run_vcm_experiment)
from .geometry import LevelSet, perimeter, volume
from .serialize import dumps, read_json, read_mesh, region_to_list, write_mesh
from .solver import (SolverSettings, constrained_min_at_volume, mincut_sweep)
from .surgery import StretchParams, rim_distances, stretch, verify_surgery

DEFAULT_CONFORMAL_CASES = (("sphere", 1.4), ("cylinder", 0.0), ("neck", 0.3))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_solve(args) -> int:
    surf = read_mesh(args.mesh)
    settings = SolverSettings(volume_tolerance=args.tolerance, anchors=args.anchors)
    points = []
    if args.lambda_grid:
        points += mincut_sweep(surf, args.lambda_grid, anchors=args.anchors
                               if args.anchors != "auto" else None)
    for v in args.volume or []:
        points.append(constrained_min_at_volume(surf, v, settings))
    if not points:
        raise StretchLabError("give --volume and/or --lambda-grid")
    rows = [(p.volume, p.perimeter, p.certified_optimal, p.method, p.component_count(surf))
            for p in points]
    _emit(_csv(("volume", "perimeter", "certified", "method", "component_count"), rows),
          args.out)
    if args.regions:
        Path(args.regions).write_text(dumps([region_to_list(p.region) for p in points]))
    if args.certify and not all(p.certified_optimal for p in points):
        return 1
    return 0


def cmd_surgery(args) -> int:
    cfg = load_config(args.config)
    surf, sigma, collar, cutoff, g_tilde, ell, cylindrical = _prepare(cfg)
    Rs = _resolve_R(cfg.R_list, ell)
    metrics = [stretch(g_tilde, StretchParams.standard(R, cutoff)) for R in Rs]
    omega = _side_of(surf, sigma, collar)
    T = g_tilde.cylinder_region
    rest = T.complement(surf.n_faces)
    rows = []
    for g in metrics:
        s = g.surface
        rims = rim_distances(g) if cylindrical else []
        rows.append((g.R, perimeter(s, omega), volume(s, omega), volume(s, T), volume(s, rest),
                     min(rims) if rims else None, max(rims) if rims else None))
    _emit(_csv(("R", "perimeter_omega", "volume_omega", "volume_cylinder", "volume_outside",
                "rim_distance_min", "rim_distance_max"), rows), args.out)
    if args.export:
        out = Path(args.export)
        out.mkdir(parents=True, exist_ok=True)
        for k, g in enumerate(metrics):
            write_mesh(g.surface, out / f"surgered_{k:02d}.json", dict(g.provenance))
    rep = verify_surgery(surf, metrics, sigma, omega, T)
    fatal = [v for v in rep.violations if cylindrical or v.check in ("perimeter",
                                                                        "constant_outside")]
    for v in fatal:
        print(f"check failed: {v.check} {v.detail}", file=sys.stderr)
    return 1 if fatal else 0


def _experiment(args, runner) -> int:
    cfg = load_config(args.config)
    rec = runner(cfg)
    csv_path = args.csv or cfg.csv_path
    json_path = args.json or cfg.json_path
    texts = emit_report(rec, csv_path, json_path)
    if csv_path is None:
        sys.stdout.write(texts["csv"])
    for f in rec.summary["failures"]:
        print(f"check failed: {f}", file=sys.stderr)
    return 0 if rec.ok else 1


def cmd_sweep(args) -> int:
    return _experiment(args, run_stretch_experiment)


def cmd_vcm(args) -> int:
    return _experiment(args, run_vcm_experiment)


def cmd_cones(args) -> int:
    if args.spec:
        data = read_json(args.spec)
        specs = data if isinstance(data, list) else [data]
        cones = [cone_from_dict(d) for d in specs]
    else:
        cones = [MinimalCone.product(p, q) for s in range(2, args.max_sum + 1)
                 for p in range(1, s // 2 + 1) for q in [s - p]]
    rows, ok = [], True
    for cone in cones:
        p, q = cone.link.p, cone.link.q
        verdict = classify_stability(cone, product_link_spectrum(p, q, args.modes))
        law = closed_form_law(p, q)
        ok &= verdict.strictly_stable == law
        lead = verdict.radial_exponents
        g = lead[0] if lead and lead[0][0] == verdict.mu1 else (None, None, None)
        rows.append((p, q, cone.n, verdict.mu1, verdict.threshold, verdict.classification,
                     g[1], g[2], law))
    _emit(_csv(("p", "q", "n", "mu1", "threshold", "class", "gamma_minus", "gamma_plus",
                "law_strictly_stable"), rows), args.out)
    return 0 if ok else 1


def cmd_conformal_check(args) -> int:
    rows, ok = [], True
    for name, c in DEFAULT_CONFORMAL_CASES:
        for n in args.fibre_dims:
            w = warped_case(name, n)
            s = LevelSet(c)
            f1 = make_minimal(w, s)
            f2, _ = make_strictly_stable(w, s, args.margin, base=f1)
            f = f1 + f2
            after = warped_curvature(w, s, f)
            H_h, V_h = float(after.mean_curvature[0]), float(after.potential[0])
            h_res, r_res = conformal_residuals(w, s, f, args.h)
            h2, r2 = conformal_residuals(w, s, f, args.h / 2)
            passed = (abs(H_h) <= args.tol and V_h <= -args.margin + args.tol
                      and h_res <= args.tol and r_res <= args.tol and h2 <= h_res and r2 <= r_res)
            ok &= passed
            rows.append((name, n, c, args.h, H_h, V_h, h_res, r_res, h2, r2, passed))
    _emit(_csv(("case", "fibre_dim", "sigma", "h", "mean_curvature", "potential",
                "mean_curvature_residual",
                "ricci_residual", "mean_curvature_residual_half", "ricci_residual_half",
                "passed"), rows), args.out)
    return 0 if ok else 1


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stretchlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="perimeter minimisation on a mesh")
    p.add_argument("--mesh", required=True, help=".off or .json mesh")
    p.add_argument("--volume", type=float, action="append", help="target volume (repeatable)")
    p.add_argument("--lambda-grid", type=_floats, help="comma-separated multipliers")
    p.add_argument("--tolerance", type=float, default=None, help="volume window half-width")
    p.add_argument("--anchors", choices=("auto", "global", "extremal"), default="auto")
    p.add_argument("--certify", action="store_true", help="fail unless every point is certified")
    p.add_argument("--regions", help="write the regions as JSON index lists")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("surgery", help="apply the stretch family and export meshes")
    p.add_argument("--config", required=True)
    p.add_argument("--export", help="directory for the surgered JSON meshes")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_surgery)

    for name, func, text in (("sweep", cmd_sweep, "full R-sweep at Vol(Omega)"),
                             ("vcm", cmd_vcm, "R-sweep for a competitor ring")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True)
        p.add_argument("--csv", help="override [output] csv")
        p.add_argument("--json", help="override [output] json")
        p.set_defaults(func=func)

    p = sub.add_parser("cones", help="stability table for products of spheres")
    p.add_argument("--spec", help="JSON cone spec (object or list)")
    p.add_argument("--max-sum", type=int, default=12, help="all p <= q with p + q <= this")
    p.add_argument("--modes", type=int, default=8)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_cones)

    p = sub.add_parser("conformal-check", help="formula versus finite differences")
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--margin", type=float, default=1.0)
    p.add_argument("--fibre-dims", type=lambda t: [int(x) for x in t.split(",")],
                   default=[1, 2, 3])
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_conformal_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StretchLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
