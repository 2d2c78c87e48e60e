"""Acceptance suite: one test per criterion, each with its tolerance and time budget.

Every test records a one-line verdict; the lines are printed at the end of the
pytest run (see ``conftest.py``) and when this file is run as a script.
"""
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from stretchlab.cones import (MeshedLink, MinimalCone, classify_stability, meshed_link_spectrum,
                              product_link_spectrum, closed_form_law)
from stretchlab.conformal import (conformal_residuals, make_minimal, make_strictly_stable,
                                  warped_case, warped_curvature)
from stretchlab.errors import InfeasibleVolumeError
from stretchlab.experiment import _side_of, config_from_dict, run_stretch_experiment, \
    run_vcm_experiment
from stretchlab.geometry import LevelSet, perimeter
from stretchlab.meshes import (build_coarse_dumbbell, build_dumbbell, clifford_torus,
                               octahedron, tetrahedron, torus)
from stretchlab.solver import (SolverSettings, brute_force_many, constrained_min_at_volume,
                               default_tolerance, lagrangian_envelope)
from stretchlab.surgery import (StretchParams, make_cutoff, max_plateau_band, plan_surgery,
                                rim_distances, stretch_family, stretched_distance,
                                verify_surgery)

ROOT = Path(__file__).resolve().parent.parent
RESULTS: dict[int, str] = {}

GRID = ["ell", 2.0, 4.0, 8.0, 16.0]
FAT = {"kind": "coarse_dumbbell", "radii": [0.97, 1.58, 1.39, 1.25],
       "heights": [0.0, 0.74, 1.2, 2.09], "pole_offsets": [0.73, 0.39]}


def verdict(number, ok, detail, elapsed, budget):
    within = budget is None or elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    limit = "" if budget is None else f" / {budget:g} s"
    RESULTS[number] = f"criterion {number}: {status}  {detail}  [{elapsed:.2f} s{limit}]"
    assert ok, RESULTS[number]
    assert within, RESULTS[number]


def _fine_family():
    surf, sigma, collar = build_dumbbell(0.5, 33, 16, cap_rings=14)
    _, cut = plan_surgery(surf, collar)
    g_tilde, ms = stretch_family(surf, collar, [cut.epsilon / 3, 2, 4, 8, 16], cutoff=cut)
    return surf, sigma, collar, cut, g_tilde, ms


def test_criterion_1_surgery_invariants():
    t = time.perf_counter()
    surf, sigma, collar, _, g_tilde, ms = _fine_family()
    omega = _side_of(surf, sigma, collar)
    rep = verify_surgery(surf, ms, sigma, omega, g_tilde.cylinder_region)
    elapsed = time.perf_counter() - t
    p0 = perimeter(surf, omega)
    per_exact = all(p == p0 for p in rep.perimeter_omega)
    out_exact = len(set(rep.volume_outside_cylinder)) == 1
    affine = rep.slopes["cylinder"] > 0 and rep.residuals["cylinder"] < 1e-9
    ok = per_exact and out_exact and affine and rep.ok
    detail = (f"Per(Omega) bit-exact={per_exact}, Vol(M-T) constant={out_exact}, "
              f"Vol(T) slope {rep.slopes['cylinder']:.4g} residual {rep.residuals['cylinder']:.1e}")
    verdict(1, ok, detail, elapsed, 1.0)


def test_criterion_2_distance_realisation():
    t = time.perf_counter()
    worst_closed = 0.0
    for eps in (0.3, 0.9, 2.0):
        cut = make_cutoff(eps)
        for R in (eps / 3, 1.0, 2.0, 4.0, 8.0, 16.0):
            if R < eps / 3:
                continue
            d = stretched_distance(cut, StretchParams(R, eps / 3), eps / 3, 2 * eps / 3)
            worst_closed = max(worst_closed, abs(d - R) / R)
    *_, ms = _fine_family()
    worst_mesh, ok_mesh = 0.0, True
    for g in ms:
        band = max_plateau_band(g)
        for d in rim_distances(g):
            worst_mesh = max(worst_mesh, abs(d - g.R))
            ok_mesh &= abs(d - g.R) <= band
    elapsed = time.perf_counter() - t
    ok = worst_closed < 1e-14 and ok_mesh
    detail = (f"closed form max rel error {worst_closed:.1e}; "
              f"mesh rims max |d - R| {worst_mesh:.1e} within one band={ok_mesh}")
    verdict(2, ok, detail, elapsed, 1.0)


def test_criterion_3_conformal_formulas():
    t = time.perf_counter()
    worst, ratios, minimal = 0.0, [], True
    cases = [("sphere", 1.4), ("cylinder", 0.0), ("neck", 0.3)]
    for name, c in cases:
        for n in (1, 2, 3):
            w = warped_case(name, n)
            f1 = make_minimal(w, LevelSet(c))
            f2, _ = make_strictly_stable(w, LevelSet(c), 1.0, base=f1)
            f = f1 + f2
            after = warped_curvature(w, c, f)
            minimal &= abs(after.mean_curvature[0]) < 1e-12 and after.potential[0] <= -1.0
            r1 = conformal_residuals(w, c, f, 1e-3)
            r2 = conformal_residuals(w, c, f, 5e-4)
            worst = max(worst, *r1)
            ratios += [a / b for a, b in zip(r1, r2) if a > 1e-12]
    elapsed = time.perf_counter() - t
    # halving the grid must shrink the error at least first order; the central
    # differences used here give about 4x (second order)
    scaling = min(ratios) >= 2.0
    ok = worst <= 1e-6 and scaling and minimal
    detail = (f"9 cases, max residual {worst:.2e} at h=1e-3, halving ratio "
              f"{min(ratios):.2f}..{max(ratios):.2f}, H_h=0 and potential<=-1: {minimal}")
    verdict(3, ok, detail, elapsed, 5.0)


def test_criterion_4_cone_table():
    t = time.perf_counter()
    mismatches = []
    for s in range(2, 13):
        for p in range(1, s // 2 + 1):
            q = s - p
            v = classify_stability(MinimalCone.product(p, q), product_link_spectrum(p, q, 4))
            if v.strictly_stable != closed_form_law(p, q):
                mismatches.append((p, q))
    v33 = classify_stability(MinimalCone.product(3, 3), product_link_spectrum(3, 3, 4))
    small = [classify_stability(MinimalCone.product(p, p), product_link_spectrum(p, p, 4))
             .classification for p in (1, 2)]
    link = MeshedLink(clifford_torus(32), 2.0)
    mu = meshed_link_spectrum(link, 3).mu1
    elapsed = time.perf_counter() - t
    ok = (not mismatches and v33.mu1 == -6.0 and v33.threshold == -6.25
          and v33.strictly_stable and small == ["unstable", "unstable"] and abs(mu + 2) < 1e-2)
    detail = (f"36 cones, mismatches {mismatches}; (3,3) mu1={v33.mu1:g} vs {v33.threshold:g}; "
              f"p=q<=2 {small}; meshed Clifford mu1={mu:.6f}")
    verdict(4, ok, detail, elapsed, 10.0)


def _oracle_check(surface):
    st = SolverSettings(cross_validate=False)
    env = lagrangian_envelope(surface, "global")
    exposed = [p.volume for p in env.points]
    exact = brute_force_many(surface, exposed, 1e-9 * surface.total_area)
    mismatch = 0
    for v, b in zip(exposed, exact):
        p = constrained_min_at_volume(surface, v, SolverSettings(cross_validate=False,
                                                                  volume_tolerance=1e-9
                                                                  * surface.total_area))
        mismatch += abs(p.perimeter - b.perimeter) > 1e-9 * max(1.0, b.perimeter)
    tol = default_tolerance(surface)
    grid = list(np.linspace(0.02, 0.98, 33) * surface.total_area)
    ref = brute_force_many(surface, grid, tol)
    below = checked = 0
    for v, b in zip(grid, ref):
        if b is None:
            continue
        try:
            p = constrained_min_at_volume(surface, v, st)
        except InfeasibleVolumeError:
            continue
        checked += 1
        below += p.perimeter < b.perimeter - 1e-9 * max(1.0, b.perimeter)
    return len(exposed), mismatch, checked, below


def test_criterion_5_solver_oracle():
    t = time.perf_counter()
    fixtures = {"tetrahedron": tetrahedron(), "octahedron": octahedron(),
                "coarse dumbbell": build_coarse_dumbbell()[0], "torus 3x4": torus(3, 4)}
    parts, ok = [], True
    for name, s in fixtures.items():
        n_exp, mism, checked, below = _oracle_check(s)
        ok &= mism == 0 and below == 0 and s.n_faces <= 24
        parts.append(f"{name} ({s.n_faces}f): {n_exp} exposed, {mism} mismatched, "
                     f"{checked} volumes, {below} below")
    elapsed = time.perf_counter() - t
    verdict(5, ok, "; ".join(parts), elapsed, 60.0)


def _sweep(geometry):
    return run_stretch_experiment(config_from_dict({"geometry": geometry,
                                                    "surgery": {"R_list": GRID}}))


def _tail_holds(rec, certified):
    R_star = rec.summary["R_star"]
    if R_star is None:
        return False
    tail = [r for r in rec.rows if r["R"] >= R_star]
    return all(r["boundary_is_target"] and (r["certified"] or not certified) for r in tail)


def test_criterion_6_headline():
    t = time.perf_counter()
    fat = _sweep(FAT)
    thin = _sweep({"kind": "coarse_dumbbell"})
    fine = _sweep({"kind": "pinched_dumbbell"})
    elapsed = time.perf_counter() - t
    fat_ok = (_tail_holds(fat, True) and not fat.rows[0]["boundary_is_target"]
              and all(r["method"] == "brute" for r in fat.rows))
    thin_ok = _tail_holds(thin, True)
    fine_ok = _tail_holds(fine, False) and not fine.rows[0]["boundary_is_target"]
    ok = fat_ok and thin_ok and fine_ok and fat.ok and thin.ok and fine.ok
    detail = (f"fat coarse R*={fat.summary['R_star']:g} (R=ell boundary is Sigma: "
              f"{fat.rows[0]['boundary_is_target']}), thin coarse R*={thin.summary['R_star']:.3g}, "
              f"{fine.provenance['faces']}-face fine R*={fine.summary['R_star']:g} uncertified")
    verdict(6, ok, detail, elapsed, 300.0)


def test_criterion_7_competitor_mode():
    t = time.perf_counter()
    rec = run_vcm_experiment(config_from_dict({
        "geometry": {"kind": "coarse_dumbbell", "competitor_ring": 2},
        "surgery": {"R_list": GRID}}))
    elapsed = time.perf_counter() - t
    last = rec.rows[-1]
    gates = all(r["gap"] < r["delta"] for r in rec.rows)
    ok = rec.ok and gates and last["boundary_is_target"] and last["certified"]
    detail = (f"gap {last['gap']:.4f} < delta {last['delta']:.4f}; boundary is the competitor at "
              f"R={last['R']:g}: {last['boundary_is_target']} (certified {last['certified']})")
    verdict(7, ok, detail, elapsed, 60.0)


def _cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "stretchlab.cli", *args], cwd=cwd,
                          capture_output=True, env=None)


def test_criterion_8_determinism(tmp_path):
    t = time.perf_counter()
    mesh = tmp_path / "torus.off"
    from stretchlab.serialize import write_mesh
    write_mesh(torus(3, 4), mesh)
    (tmp_path / "sweep.toml").write_text(
        (ROOT / "configs" / "coarse_fat.toml").read_text().replace("out/", ""))
    (tmp_path / "vcm.toml").write_text(
        (ROOT / "configs" / "coarse_vcm.toml").read_text().replace("out/", ""))
    commands = {
        "solve": ["solve", "--mesh", str(mesh), "--volume", "10", "--volume", "20",
                  "--regions", "regions.json"],
        "surgery": ["surgery", "--config", "sweep.toml", "--export", "meshes"],
        "sweep": ["sweep", "--config", "sweep.toml"],
        "vcm": ["vcm", "--config", "vcm.toml"],
        "cones": ["cones"],
        "conformal-check": ["conformal-check"],
    }
    written = ["regions.json", "coarse_fat.csv", "coarse_fat.json", "coarse_vcm.csv",
               "coarse_vcm.json"]
    differing, failing = [], []
    for name, args in commands.items():
        outputs = []
        for _ in range(2):
            r = _cli(args, tmp_path)
            files = {p.relative_to(tmp_path).as_posix(): p.read_bytes()
                     for p in sorted(tmp_path.rglob("*")) if p.is_file()
                     and (p.name in written or p.parent.name == "meshes")}
            outputs.append((r.returncode, r.stdout, files))
        if outputs[0] != outputs[1]:
            differing.append(name)
        if outputs[0][0] != 0:
            failing.append(name)
    elapsed = time.perf_counter() - t
    ok = not differing and not failing
    detail = (f"{len(commands)} commands run twice; differing outputs {differing}; "
              f"non-zero exits {failing}")
    verdict(8, ok, detail, elapsed, None)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
