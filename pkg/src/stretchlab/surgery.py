"""Cylindrical interpolation and longitudinal stretching inside a collar.

The pipeline has two steps.  First the fibre metric on each side collar is
blended towards a dominating fibre metric ``h_Gamma`` with a cutoff ``eta``,
so that the middle third of the side collar becomes an exact cylinder.  Then
the longitudinal direction is stretched by ``sqrt(rho_R)`` with
``rho_R = 1 + ((R / ell)^2 - 1) eta``, which makes the cylinder have length
``R`` while nothing changes where ``eta`` vanishes.

On meshes a side collar is a stack of rings.  The collar coordinate of ring
``j`` out of ``k`` is ``j / (k - 1)`` (uniform in the ring index); fibre
edges of a ring use ``eta`` at the ring, longitudinal edges of a strip use
``eta`` at the strip midpoint, and diagonals of any strip with a modified leg
are recomputed from the product rule.

The warped model runs the same two steps on a sampled interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.sparse.csgraph import dijkstra

from .collar import Collar, SideCollar
from .errors import InputError, PreconditionError
from .geometry import (IntervalRegion, Region, TriangulatedSurface, WarpedInterval,
                       perimeter, volume, warped_volume)

ETA_SPEC = "C2 smoothstep 6x^5-15x^4+10x^3 on [eps/4, eps/3], mirrored on [2eps/3, 3eps/4]"


def _smoothstep(x):
    return x * x * x * (x * (6.0 * x - 15.0) + 10.0)


@dataclass(frozen=True)
class CutoffProfile:
    """``eta`` on ``[0, epsilon]``: 0 near both ends, 1 on the middle third."""

    epsilon: float

    def at_fraction(self, u):
        """``eta`` at collar fraction ``u = t / epsilon``."""
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        up = (u > 0.25) & (u < 1.0 / 3.0)
        down = (u > 2.0 / 3.0) & (u < 0.75)
        out[(u >= 1.0 / 3.0) & (u <= 2.0 / 3.0)] = 1.0
        out[up] = _smoothstep((u[up] - 0.25) * 12.0)
        out[down] = _smoothstep((0.75 - u[down]) * 12.0)
        return out if out.ndim else float(out)

    def __call__(self, t):
        return self.at_fraction(np.asarray(t, dtype=float) / self.epsilon)

    def rho(self, t, params: "StretchParams"):
        return 1.0 + ((params.R / params.ell) ** 2 - 1.0) * self(t)


def make_cutoff(epsilon: float) -> CutoffProfile:
    if not epsilon > 0 or not math.isfinite(epsilon):
        raise InputError("epsilon must be positive and finite")
    return CutoffProfile(float(epsilon))


@dataclass(frozen=True)
class StretchParams:
    R: float
    ell: float

    def __post_init__(self):
        if not self.ell > 0:
            raise InputError("ell must be positive")
        if self.R < self.ell:
            raise InputError(f"R = {self.R} is below ell = {self.ell}")

    @classmethod
    def standard(cls, R: float, cutoff: CutoffProfile) -> "StretchParams":
        """Parameters with ``ell = epsilon / 3``."""
        return cls(float(R), cutoff.epsilon / 3.0)


@dataclass(frozen=True)
class IntervalCollar:
    """Side collar ``[start, start + epsilon]`` of a warped interval."""

    start: float
    epsilon: float


@dataclass(frozen=True, eq=False)
class SurgeredMetric:
    """Result of interpolation or stretching.

    ``geometry`` is the new metric (a TriangulatedSurface or WarpedInterval),
    ``base`` the untouched input.  ``h_gamma`` is a list with one array of
    per-fibre-edge lengths per side collar (meshes) or the dominating warp
    value (warped model).
    """

    base: object
    geometry: object
    cutoff: CutoffProfile
    cylinder_region: Region | IntervalRegion
    h_gamma: object
    sides: tuple = ()
    R: float | None = None
    ell: float | None = None
    stage: str = "interpolated"
    provenance: dict = field(default_factory=dict)

    @property
    def surface(self) -> TriangulatedSurface:
        return self.geometry

    def with_stretch(self, geometry, params: StretchParams) -> "SurgeredMetric":
        prov = dict(self.provenance, R=params.R, ell=params.ell)
        return SurgeredMetric(self.base, geometry, self.cutoff, self.cylinder_region,
                              self.h_gamma, self.sides, params.R, params.ell, "stretched", prov)


# --------------------------------------------------------------------------
# meshes
# --------------------------------------------------------------------------

def valid_band_counts(max_rings: int, cylindrical_plateau: bool = False) -> list[int]:
    """Ring counts ``k <= max_rings`` for which every strip midpoint sits where
    ``eta`` is exactly 0 or 1, with at least one plateau strip.

    With ``cylindrical_plateau`` the rings bounding each plateau strip must
    also have ``eta = 1``, so the plateau becomes an exact cylinder.
    """
    cut = CutoffProfile(1.0)
    ok = []
    for k in range(2, max_rings + 1):
        eta = cut.at_fraction((np.arange(k - 1) + 0.5) / (k - 1))
        if not (np.all((eta == 0.0) | (eta == 1.0)) and np.any(eta == 1.0)):
            continue
        if cylindrical_plateau:
            ring = cut.at_fraction(np.arange(k) / (k - 1))
            plat = np.flatnonzero(eta == 1.0)
            if np.any(ring[plat] != 1.0) or np.any(ring[plat + 1] != 1.0):
                continue
        ok.append(k)
    return ok


def side_collars(collar: Collar, band_count: int | None = None) -> tuple[SideCollar, SideCollar]:
    """The two side collars used by the surgery.

    ``band_count`` defaults to the largest ring count that fits on both sides
    of sigma and gives an exactly cylindrical plateau, falling back to the
    largest admissible count.
    """
    room = min(collar.sigma_index + 1, collar.n_rings - collar.sigma_index)
    valid = valid_band_counts(room)
    if band_count is None:
        if not valid:
            raise PreconditionError("collar too short for a side collar on each side of sigma")
        strict = valid_band_counts(room, cylindrical_plateau=True)
        band_count = (strict or valid)[-1]
    elif band_count not in valid_band_counts(max(band_count, 2)):
        raise PreconditionError(
            f"band_count={band_count} puts a strip midpoint inside a cutoff transition; "
            f"admissible counts up to {room}: {valid}")
    return collar.side(-1, band_count), collar.side(+1, band_count)


def collar_epsilon(surface: TriangulatedSurface, sides) -> float:
    """Common collar width: mean of the side widths."""
    return float(np.mean([s.width(surface) for s in sides]))


def plan_surgery(surface: TriangulatedSurface, collar: Collar, band_count: int | None = None):
    """Side collars and the matching cutoff for ``surface``."""
    sides = side_collars(collar, band_count)
    return sides, make_cutoff(collar_epsilon(surface, sides))


def _cylinder_faces(surface, sides, cutoff) -> Region:
    region = Region()
    for side in sides:
        eta = cutoff.at_fraction(side.strip_fractions)
        region = region.union(side.faces_of_strips(surface, np.flatnonzero(eta == 1.0)))
    return region


def _recompute_diagonals(lengths, old, strips) -> None:
    for st in strips:
        legs = np.r_[st.fibre_lower, st.fibre_upper, st.vertical]
        if np.array_equal(lengths[legs], old[legs]):
            continue
        v = lengths[st.vertical]
        vert = 0.5 * (v + np.roll(v, -1))
        fib = 0.5 * (lengths[st.fibre_lower] + lengths[st.fibre_upper])
        lengths[st.diagonal] = np.hypot(fib, vert)


def _mesh_interpolation(surface, collar, cutoff, band_count, assume_cylindrical):
    sides = side_collars(collar, band_count)
    old = surface.lengths
    lengths = old.copy()
    h_gamma = []
    for side in sides:
        fib = side.fibre_edges(surface)
        h = old[fib].max(axis=0)
        h_gamma.append(h)
        if assume_cylindrical:
            continue
        eta = cutoff.at_fraction(side.ring_fractions)
        for j in np.flatnonzero(eta > 0):
            cur = old[fib[j]]
            lengths[fib[j]] = cur + eta[j] * (h - cur)
    for side in sides:
        _recompute_diagonals(lengths, old, side.strips(surface))
    new = surface if np.array_equal(lengths, old) else surface.with_lengths(lengths)
    prov = {"epsilon": cutoff.epsilon, "ell": cutoff.epsilon / 3.0, "R": None,
            "eta_spec": ETA_SPEC, "band_count": sides[0].n_rings}
    return SurgeredMetric(surface, new, cutoff, _cylinder_faces(surface, sides, cutoff),
                          h_gamma, sides, None, cutoff.epsilon / 3.0,
                          "cylindrical" if assume_cylindrical else "interpolated", prov)


def _mesh_stretch(g_tilde: SurgeredMetric, params: StretchParams) -> SurgeredMetric:
    surf = g_tilde.geometry
    old = surf.lengths
    lengths = old.copy()
    cut = g_tilde.cutoff
    gain = (params.R / params.ell) ** 2 - 1.0
    for side in g_tilde.sides:
        eta = cut.at_fraction(side.strip_fractions)
        for s, st in enumerate(side.strips(surf)):
            if eta[s] > 0:
                lengths[st.vertical] = old[st.vertical] * math.sqrt(1.0 + gain * eta[s])
    for side in g_tilde.sides:
        _recompute_diagonals(lengths, old, side.strips(surf))
    new = surf if np.array_equal(lengths, old) else surf.with_lengths(lengths)
    return g_tilde.with_stretch(new, params)


# --------------------------------------------------------------------------
# warped intervals
# --------------------------------------------------------------------------

def _interval_eta(w: WarpedInterval, side: IntervalCollar, cutoff: CutoffProfile):
    return cutoff.at_fraction((w.grid - side.start) / side.epsilon)


def _warped_interpolation(w: WarpedInterval, side: IntervalCollar, cutoff: CutoffProfile):
    if not math.isclose(cutoff.epsilon, side.epsilon, rel_tol=1e-12):
        raise InputError("cutoff width differs from the collar width")
    w._check(side.start)
    w._check(side.start + side.epsilon)
    t = w.grid
    inside = (t >= side.start) & (t <= side.start + side.epsilon)
    f_gamma = float(w.warp[inside].max())
    eta = _interval_eta(w, side, cutoff)
    blend = np.sqrt((1.0 - eta) * w.warp ** 2 + eta * f_gamma ** 2)
    warp = np.where(eta > 0, blend, w.warp)
    eps = side.epsilon
    cyl = IntervalRegion.of([(side.start + eps / 3.0, side.start + 2.0 * eps / 3.0)])
    prov = {"epsilon": eps, "ell": eps / 3.0, "R": None, "eta_spec": ETA_SPEC}
    return SurgeredMetric(w, w.with_metric(warp=warp), cutoff, cyl, f_gamma, (side,),
                          None, eps / 3.0, "interpolated", prov)


def _warped_stretch(g_tilde: SurgeredMetric, params: StretchParams) -> SurgeredMetric:
    w = g_tilde.geometry
    (side,) = g_tilde.sides
    eta = _interval_eta(w, side, g_tilde.cutoff)
    rho = np.where(eta > 0, w.longitudinal * (1.0 + ((params.R / params.ell) ** 2 - 1.0) * eta),
                   w.longitudinal)
    return g_tilde.with_stretch(w.with_metric(longitudinal=rho), params)


def stretched_distance(cutoff: CutoffProfile, params: StretchParams, a: float, b: float) -> float:
    """``int_a^b sqrt(rho_R(t)) dt`` for collar coordinates ``0 <= a <= b <= eps``.

    On the plateau ``[eps/3, 2 eps/3]`` the integrand is the constant ``R / ell``,
    so that piece is evaluated in closed form; the transitions use adaptive
    quadrature.
    """
    eps = cutoff.epsilon
    lo, hi = eps / 3.0, 2.0 * eps / 3.0
    total = 0.0
    p0, p1 = max(a, lo), min(b, hi)
    if p1 > p0:
        total += (params.R / params.ell) * (p1 - p0)
    f = lambda t: math.sqrt(float(cutoff.rho(t, params)))  # noqa: E731
    for s, e in ((a, min(b, lo)), (max(a, hi), b)):
        if e > s:
            total += quad(f, s, e, points=[x for x in (eps / 4, 3 * eps / 4) if s < x < e],
                          epsabs=1e-13, epsrel=1e-13)[0]
    return total


# --------------------------------------------------------------------------
# public entry points
# --------------------------------------------------------------------------

def cylindrical_interpolation(geom, collar, cutoff: CutoffProfile, *,
                              band_count: int | None = None) -> SurgeredMetric:
    """Blend the fibre metric towards its maximum ``h_Gamma`` over each side collar.

    For a mesh, ``collar`` is a :class:`Collar` and ``band_count`` the number
    of rings in each side collar.  For a warped interval, ``collar`` is an
    :class:`IntervalCollar`.
    """
    if isinstance(geom, WarpedInterval):
        return _warped_interpolation(geom, collar, cutoff)
    return _mesh_interpolation(geom, collar, cutoff, band_count, False)


def mark_cylindrical(surface: TriangulatedSurface, collar: Collar, cutoff: CutoffProfile, *,
                     band_count: int | None = None) -> SurgeredMetric:
    """Wrap an unchanged metric whose collar is taken as already cylindrical."""
    return _mesh_interpolation(surface, collar, cutoff, band_count, True)


def stretch(g_tilde: SurgeredMetric, params: StretchParams,
            cutoff: CutoffProfile | None = None) -> SurgeredMetric:
    """Scale the longitudinal direction by ``sqrt(rho_R)``."""
    if g_tilde.stage == "stretched":
        raise PreconditionError("stretch expects an interpolated metric")
    if cutoff is not None and cutoff != g_tilde.cutoff:
        raise InputError("cutoff differs from the one used for interpolation")
    if isinstance(g_tilde.geometry, WarpedInterval):
        return _warped_stretch(g_tilde, params)
    return _mesh_stretch(g_tilde, params)


def stretch_family(surface, collar, R_values, *, band_count=None, cutoff=None):
    """Interpolate once, then stretch for every ``R`` (``ell = eps / 3``)."""
    if cutoff is None:
        _, cutoff = plan_surgery(surface, collar, band_count)
    g_tilde = cylindrical_interpolation(surface, collar, cutoff, band_count=band_count)
    return g_tilde, [stretch(g_tilde, StretchParams.standard(R, cutoff)) for R in R_values]


def cylinder_rims(g: SurgeredMetric) -> list[tuple[int, int]]:
    """Per side, the collar ring indices bounding the plateau strips."""
    out = []
    for side in g.sides:
        eta = g.cutoff.at_fraction(side.strip_fractions)
        idx = np.flatnonzero(eta == 1.0)
        out.append((side.ring_indices[idx[0]], side.ring_indices[idx[-1] + 1]))
    return out


def rim_distances(g: SurgeredMetric) -> list[float]:
    """Shortest-path distance between the two rims of each cylinder."""
    surf = g.geometry
    coll = g.sides[0].collar
    graph = surf.vertex_graph
    out = []
    for a, b in cylinder_rims(g):
        d = dijkstra(graph, directed=False, indices=list(coll.rings[a]), min_only=True)
        out.append(float(d[list(coll.rings[b])].min()))
    return out


def max_plateau_band(g: SurgeredMetric) -> float:
    """Longest longitudinal edge in any plateau strip of ``g``."""
    surf = g.geometry
    best = 0.0
    for side in g.sides:
        eta = g.cutoff.at_fraction(side.strip_fractions)
        for s, st in enumerate(side.strips(surf)):
            if eta[s] == 1.0:
                best = max(best, float(surf.lengths[st.vertical].max()))
    return best


# --------------------------------------------------------------------------
# verification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    check: str
    R: float | None
    detail: str


@dataclass(frozen=True)
class SurgeryReport:
    R: tuple
    perimeter_omega: tuple
    volume_omega: tuple
    volume_rest: tuple
    volume_cylinder: tuple
    volume_outside_cylinder: tuple
    slopes: dict
    residuals: dict
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def failed(self, check: str) -> list[Violation]:
        return [v for v in self.violations if v.check == check]


def _affine_fit(x, y):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if len(x) < 2 or np.ptp(x) == 0:
        return 0.0, 0.0
    A = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    scale = max(float(np.max(np.abs(y))), 1e-300)
    return float(coef[0]), float(np.max(np.abs(res)) / scale)


def verify_surgery(original: TriangulatedSurface, surgered, sigma, omega: Region,
                   T: Region, *, affine_tol: float = 1e-9) -> SurgeryReport:
    """Check the three surgery properties over an R-sweep.

    1. the perimeter of ``omega`` equals its original perimeter exactly;
    2. ``Vol(omega)``, ``Vol(M - omega)`` and ``Vol(T)`` are strictly increasing
       in R, each affine in R with positive slope;
    3. ``Vol(M - T)`` is the same number for every R.

    Failures are collected, never raised.
    """
    members = sorted(surgered, key=lambda g: g.R)
    rs = [float(g.R) for g in members]
    viol = []
    p0 = perimeter(original, omega)
    n = original.n_faces
    rest = omega.complement(n)
    outside_T = T.complement(n)
    per, vo, vr, vt, vout = [], [], [], [], []
    for g in members:
        s = g.geometry
        per.append(perimeter(s, omega))
        vo.append(volume(s, omega))
        vr.append(volume(s, rest))
        vt.append(volume(s, T))
        vout.append(volume(s, outside_T))
        if per[-1] != p0:
            viol.append(Violation("perimeter", g.R, f"{per[-1]!r} != {p0!r}"))
    if any(v != vout[0] for v in vout):
        viol.append(Violation("constant_outside", None, f"values {vout}"))
    slopes, residuals = {}, {}
    for name, vals in (("omega", vo), ("rest", vr), ("cylinder", vt)):
        for k in range(1, len(vals)):
            if rs[k] > rs[k - 1] and not vals[k] > vals[k - 1]:
                viol.append(Violation("growth", rs[k], f"Vol({name}) did not increase"))
        slope, resid = _affine_fit(rs, vals)
        slopes[name], residuals[name] = slope, resid
        if len(set(rs)) > 1 and not (slope > 0 and resid < affine_tol):
            viol.append(Violation("affine", None,
                                  f"Vol({name}) slope {slope:.6g}, residual {resid:.3g}"))
    return SurgeryReport(tuple(rs), tuple(per), tuple(vo), tuple(vr), tuple(vt), tuple(vout),
                         slopes, residuals, tuple(viol))


def locality_violations(before: TriangulatedSurface, after: TriangulatedSurface,
                        g: SurgeredMetric, sigma) -> list[str]:
    """Edges changed outside the strips/rings where ``eta > 0``, or on sigma."""
    changed = set(np.flatnonzero(before.lengths != after.lengths).tolist())
    allowed = set()
    for side in g.sides:
        ring_eta = g.cutoff.at_fraction(side.ring_fractions)
        strips = side.strips(before)
        for s, st in enumerate(strips):
            if ring_eta[s] > 0 or ring_eta[s + 1] > 0 or \
                    g.cutoff.at_fraction(side.strip_fractions[s]) > 0:
                allowed.update(np.r_[st.fibre_lower, st.fibre_upper, st.vertical,
                                     st.diagonal].tolist())
    out = [f"edge {e} changed outside the surgery zone" for e in sorted(changed - allowed)]
    sig = set(before.edge_ids(sigma.edges).tolist())
    out += [f"sigma edge {e} changed" for e in sorted(changed & sig)]
    return out


def warped_volumes(g: SurgeredMetric, omega: IntervalRegion):
    """Volumes of ``omega``, its complement and the cylinder in the warped model."""
    w = g.geometry
    a, b = w.start, w.end
    comp = []
    cur = a
    for s, e in omega.intervals:
        if s > cur:
            comp.append((cur, s))
        cur = e
    if cur < b:
        comp.append((cur, b))
    return (warped_volume(w, omega), warped_volume(w, IntervalRegion.of(comp)),
            warped_volume(w, g.cylinder_region))
