"""End-to-end stretch experiments: build a dumbbell, stretch its collar over a
sweep of ``R`` and ask whether the separating cycle bounds the minimiser.

A configuration is a TOML file::

    [geometry]
    kind = "coarse_dumbbell"        # or dumbbell, pinched_dumbbell, ring_metric, mesh
    radii = [1.0, 0.45, 0.5, 1.6]
    competitor_ring = 2             # for the competitor-cycle mode

    [surgery]
    R_list = ["ell", 2, 4, 8, 16]   # "ell" stands for the plateau scale
    band_count = 2

    [solver]
    anchors = "auto"

    [output]
    csv = "rows.csv"
    json = "summary.json"

Rows are computed concurrently (``STRETCHLAB_THREADS`` caps the pool) and
assembled in ``R`` order.  Reports are byte-for-byte reproducible.
"""
from __future__ import annotations

import csv
import io
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import dijkstra

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .collar import Collar
from .conformal import apply_conformal, make_minimal, make_strictly_stable
from .errors import InputError, PreconditionError, StretchLabError, StructuralError
from .geometry import (Cycle, Region, TriangulatedSurface, cycle_length, perimeter,
                       separates, volume)
from .meshes import (build_coarse_dumbbell, build_dumbbell, build_pinched_dumbbell,
                     build_ring_metric)
from .serialize import dumps, read_mesh
from .solver import SolverSettings, bounds_report, constrained_min_at_volume
from .surgery import (ETA_SPEC, StretchParams, cylindrical_interpolation, make_cutoff,
                      max_plateau_band, plan_surgery, rim_distances, stretch, valid_band_counts,
                      verify_surgery)

CSV_COLUMNS = (
    "R", "status", "target_volume", "cycle_length", "sigma_length", "solver_volume",
    "solver_perimeter", "method", "certified", "boundary_is_target", "components",
    "delta", "D", "L", "C", "complement_bound", "min_side_volume", "exceeds_bound",
    "perimeter_omega_preserved", "rim_distance_ok", "volume_bookkeeping", "note",
)


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    geometry: dict
    R_list: tuple = ()
    epsilon: float | None = None
    band_count: int | None = None
    solver: SolverSettings = field(default_factory=SolverSettings)
    competitor_ring: int | None = None
    conformal_margin: float | None = None
    csv_path: str | None = None
    json_path: str | None = None

    def echo(self) -> dict:
        d = {
            "geometry": self.geometry,
            "surgery": {"R_list": list(self.R_list), "epsilon": self.epsilon,
                        "band_count": self.band_count},
            "solver": asdict(self.solver),
            "output": {"csv": self.csv_path, "json": self.json_path},
        }
        return d


_SOLVER_KEYS = {f for f in SolverSettings.__dataclass_fields__}


def config_from_dict(d: dict, base_dir: Path | None = None) -> ExperimentConfig:
    unknown = set(d) - {"geometry", "surgery", "solver", "output"}
    if unknown:
        raise InputError(f"unknown config sections {sorted(unknown)}")
    geom = dict(d.get("geometry", {}))
    if "kind" not in geom:
        raise InputError("[geometry] needs a 'kind'")
    if geom["kind"] == "mesh" and base_dir is not None and "path" in geom:
        geom["path"] = str((base_dir / geom["path"]).resolve())
    surg = d.get("surgery", {})
    R_list = tuple(surg.get("R_list", ()))
    for r in R_list:
        if r != "ell" and not isinstance(r, (int, float)):
            raise InputError(f"R_list entries must be numbers or 'ell', got {r!r}")
    sol = dict(d.get("solver", {}))
    bad = set(sol) - _SOLVER_KEYS
    if bad:
        raise InputError(f"unknown [solver] keys {sorted(bad)}")
    out = d.get("output", {})

    def resolve(p):
        if p is None or base_dir is None:
            return p
        return str(base_dir / p)

    return ExperimentConfig(
        geometry=geom, R_list=R_list, epsilon=surg.get("epsilon"),
        band_count=surg.get("band_count"), solver=SolverSettings(**sol),
        competitor_ring=geom.get("competitor_ring"),
        conformal_margin=geom.get("conformal_margin"),
        csv_path=resolve(out.get("csv")), json_path=resolve(out.get("json")))


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            d = tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return config_from_dict(d, path.parent)


# --------------------------------------------------------------------------
# geometry
# --------------------------------------------------------------------------

_GEOMETRY_KEYS = {"kind", "competitor_ring", "conformal_margin", "path", "rings", "sigma_index"}


def build_geometry(spec: dict) -> tuple[TriangulatedSurface, Cycle, Collar]:
    kw = {k: v for k, v in spec.items() if k not in _GEOMETRY_KEYS}
    kind = spec["kind"]
    try:
        if kind == "dumbbell":
            if "cap_radius" in kw and isinstance(kw["cap_radius"], list):
                kw["cap_radius"] = tuple(kw["cap_radius"])
            return build_dumbbell(**kw)
        if kind == "coarse_dumbbell":
            return build_coarse_dumbbell(**{k: tuple(v) if isinstance(v, list) else v
                                            for k, v in kw.items()})
        if kind == "pinched_dumbbell":
            return build_pinched_dumbbell(**kw)
        if kind == "ring_metric":
            if "collar" in kw:
                kw["collar"] = tuple(kw["collar"])
            return build_ring_metric(**kw, sigma_index=spec["sigma_index"])
    except TypeError as exc:
        raise InputError(f"bad [geometry] parameters: {exc}") from exc
    if kind == "mesh":
        surf = read_mesh(spec["path"])
        try:
            collar = Collar(tuple(tuple(int(v) for v in r) for r in spec["rings"]),
                            int(spec["sigma_index"]))
        except KeyError as exc:
            raise InputError("a mesh geometry needs 'rings' and 'sigma_index'") from exc
        collar.validate(surf)
        return surf, collar.sigma, collar
    raise InputError(f"unknown geometry kind {kind!r}")


def _side_of(surface: TriangulatedSurface, cycle: Cycle, collar: Collar) -> Region:
    """The side of ``cycle`` that holds the first collar rim."""
    ok, a, b = separates(surface, cycle)
    if not ok:
        raise StructuralError("cycle does not separate the surface")
    probe = collar.rings[0][0]
    incident = np.flatnonzero((surface.faces == probe).any(axis=1))
    return a if int(incident[0]) in a else b


def competitor_cycle(collar: Collar, ring: int) -> Cycle:
    """A collar ring used as competitor; interior rings separate the two rims
    of the collar, which is how homology with sigma is decided."""
    if not 0 < ring < collar.n_rings - 1:
        raise PreconditionError(f"competitor ring must be an interior collar ring "
                                f"(1..{collar.n_rings - 2}), got {ring}")
    return collar.ring_cycle(ring)


def ball_volume_cap(surface: TriangulatedSurface, T: Region, D: float) -> float:
    """Largest area of a metric ball of radius ``D`` centred at a vertex of ``T``
    (faces counted when all three corners are inside)."""
    if D <= 0 or not T.faces:
        return 0.0
    centres = np.unique(surface.faces[list(T.faces)])
    dist = dijkstra(surface.vertex_graph, directed=False, indices=centres, limit=D)
    inside = np.all(dist[:, surface.faces] <= D, axis=2)
    return float((inside * surface.face_areas).sum(axis=1).max())


# --------------------------------------------------------------------------
# records
# --------------------------------------------------------------------------

@dataclass
class ExperimentRecord:
    mode: str
    config: dict
    rows: list
    summary: dict
    provenance: dict

    @property
    def ok(self) -> bool:
        return bool(self.summary.get("checks_passed"))


def thread_count(n_jobs: int) -> int:
    raw = os.environ.get("STRETCHLAB_THREADS")
    cap = os.cpu_count() or 1
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise InputError(f"STRETCHLAB_THREADS must be an integer, got {raw!r}") from None
        if cap < 1:
            raise InputError("STRETCHLAB_THREADS must be >= 1")
    return max(1, min(cap, n_jobs))


def _resolve_R(R_list, ell: float) -> list[float]:
    out = [ell if r == "ell" else float(r) for r in R_list]
    if any(b < a for a, b in zip(out, out[1:])):
        raise InputError("R_list must be ascending")
    if any(r < ell for r in out):
        raise PreconditionError(f"every R must be >= ell = {ell!r}")
    return out


def _prepare(config: ExperimentConfig):
    surf, sigma, collar = build_geometry(config.geometry)
    if config.conformal_margin is not None:
        f1 = make_minimal(surf, sigma, collar=collar)
        f2, _ = make_strictly_stable(surf, sigma, config.conformal_margin, collar=collar, base=f1)
        surf = apply_conformal(surf, f1 + f2)
    sides, cutoff = plan_surgery(surf, collar, config.band_count)
    if config.epsilon is not None:
        cutoff = make_cutoff(float(config.epsilon))
    band_count = len(sides[0].ring_indices)
    g_tilde = cylindrical_interpolation(surf, collar, cutoff, band_count=band_count)
    ell = StretchParams.standard(1.0, cutoff).ell
    cylindrical = band_count in valid_band_counts(band_count, cylindrical_plateau=True)
    return surf, sigma, collar, cutoff, g_tilde, ell, cylindrical


def _row(base, g, target_cycle, side, sigma, settings, cylindrical, vcm) -> dict:
    s = g.surface
    n = s.n_faces
    row = {"R": float(g.R), "status": "ok", "note": ""}
    omega = side
    per0 = perimeter(base, omega)
    row["perimeter_omega_preserved"] = perimeter(s, omega) == per0
    if cylindrical:
        band = max_plateau_band(g)
        row["rim_distance_ok"] = all(abs(d - g.R) <= band for d in rim_distances(g))
    else:
        row["rim_distance_ok"] = None
    v_side = volume(s, omega)
    v_rest = volume(s, omega.complement(n))
    total = s.total_area
    row["volume_bookkeeping"] = bool(abs(v_side + v_rest - total) <= 8 * np.spacing(total))
    row["target_volume"] = v_side
    row["cycle_length"] = cycle_length(s, target_cycle)
    row["sigma_length"] = cycle_length(s, sigma)
    try:
        point = constrained_min_at_volume(s, v_side, settings)
    except StretchLabError as exc:
        row.update(status="error", note=str(exc))
        return row
    T = g.cylinder_region
    target_edges = set(s.edge_ids(target_cycle.edges).tolist())
    row.update(solver_volume=point.volume, solver_perimeter=point.perimeter,
               method=point.method, certified=point.certified_optimal,
               boundary_is_target=set(s.cut_edges(point.region).tolist()) == target_edges)
    rep0 = bounds_report(s, point, T, 0.0)
    C = ball_volume_cap(s, T, rep0.D)
    rep = bounds_report(s, point, T, C)
    row.update(components=rep.L, delta=rep.delta, D=rep.D, L=rep.L, C=C,
               complement_bound=rep.complement_bound, min_side_volume=rep.min_volume,
               exceeds_bound=rep.exceeds_bound)
    if vcm:
        gap = row["cycle_length"] - row["sigma_length"]
        row["gap"] = gap
        if not gap < rep.delta:
            row.update(status="skipped",
                       note=f"length gap {gap!r} is not below the measured delta {rep.delta!r}")
    return row


def _run(config: ExperimentConfig, mode: str) -> ExperimentRecord:
    surf, sigma, collar, cutoff, g_tilde, ell, cylindrical = _prepare(config)
    vcm = mode == "vcm"
    if vcm:
        if config.competitor_ring is None:
            raise InputError("competitor mode needs [geometry] competitor_ring")
        target = competitor_cycle(collar, int(config.competitor_ring))
    else:
        target = sigma
    side = _side_of(surf, target, collar)
    Rs = _resolve_R(config.R_list, ell)
    metrics = [stretch(g_tilde, StretchParams.standard(R, cutoff)) for R in Rs]

    def job(g):
        return _row(surf, g, target, side, sigma, config.solver, cylindrical, vcm)

    threads = thread_count(len(metrics))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            rows = list(ex.map(job, metrics))
    else:
        rows = [job(g) for g in metrics]
    summary = _summarise(rows, metrics, surf, g_tilde)
    if cylindrical and len(set(Rs)) > 1:
        rep = verify_surgery(surf, metrics, sigma, side, g_tilde.cylinder_region)
        summary["cylinder_volume_slope"] = rep.slopes["cylinder"]
        summary["cylinder_volume_residual"] = rep.residuals["cylinder"]
        for v in rep.violations:
            summary["failures"].append(f"surgery check {v.check}: {v.detail}")
        summary["checks_passed"] = not summary["failures"]
    provenance = {"package": "stretchlab", "version": __version__, "eta_spec": ETA_SPEC,
                  "epsilon": cutoff.epsilon, "ell": ell,
                  "band_count": len(g_tilde.sides[0].ring_indices),
                  "cylindrical_plateau": cylindrical, "faces": surf.n_faces}
    return ExperimentRecord(mode, config.echo(), rows, summary, provenance)


def _summarise(rows, metrics, surf, g_tilde) -> dict:
    failures = []
    n = surf.n_faces
    outside = g_tilde.cylinder_region.complement(n)
    vols = [volume(g.surface, outside) for g in metrics]
    if any(v != vols[0] for v in vols):
        failures.append("Vol(M - T) changed across the sweep")
    for r in rows:
        if not r["perimeter_omega_preserved"]:
            failures.append(f"R={r['R']!r}: perimeter of the side changed")
        if r["rim_distance_ok"] is False:
            failures.append(f"R={r['R']!r}: rim distance off by more than one band")
        if not r["volume_bookkeeping"]:
            failures.append(f"R={r['R']!r}: side volumes do not add up")
        if r["status"] == "error":
            failures.append(f"R={r['R']!r}: {r['note']}")
    hits = [r.get("boundary_is_target") is True and r["status"] == "ok" for r in rows]
    answered = [r for r in rows if r["status"] == "ok"]
    R_star = None
    for k in range(len(rows)):
        if all(hits[k:]) and rows[k]["status"] == "ok":
            R_star = rows[k]["R"]
            break
    first = next((k for k, h in enumerate(hits) if h), None)
    if first is not None and not all(hits[first:]):
        later = [rows[k]["R"] for k in range(first, len(rows)) if not hits[k]]
        failures.append(f"threshold not monotone: boundary lost again at R={later}")
    # the volume bound is only claimed for large R, so misses that exceed it
    # are reported but do not fail the run
    anomalies = [r["R"] for r in answered
                 if not r["boundary_is_target"] and r["exceeds_bound"]]
    return {"R_star": R_star, "rows": len(rows), "hits": int(sum(hits)),
            "skipped": sum(r["status"] == "skipped" for r in rows),
            "volume_outside_cylinder": vols[0] if vols else None,
            "anomalies": anomalies, "failures": failures,
            "checks_passed": not failures, "valid": all(r["perimeter_omega_preserved"]
                                                         for r in rows)}


def run_stretch_experiment(config: ExperimentConfig) -> ExperimentRecord:
    """Solve at ``Vol(Omega)`` for every ``R`` and compare the boundary with sigma."""
    return _run(config, "stretch")


def run_vcm_experiment(config: ExperimentConfig) -> ExperimentRecord:
    """Same sweep for a competitor ring; rows whose length gap is not below
    the measured ``delta`` are skipped."""
    return _run(config, "vcm")


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def summary_json(record: ExperimentRecord) -> str:
    return dumps(_plain({"mode": record.mode, "config": record.config,
                         "provenance": record.provenance, "summary": record.summary,
                         "rows": record.rows}))


def emit_report(record: ExperimentRecord, csv_path=None, json_path=None) -> dict:
    """Write the CSV rows and the JSON summary; returns ``{"csv": text, "json": text}``."""
    texts = {"csv": rows_csv(record.rows), "json": summary_json(record)}
    for key, path in (("csv", csv_path), ("json", json_path)):
        if path is None:
            continue
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(texts[key])
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
    return texts
