"""Conformal changes ``h = e^{2f} g`` near a hypersurface and its stability form.

Two geometric models are supported.

Warped model
    ``g = dt^2 + w(t)^2 g_{S^n}`` with ``Sigma = {t = c}``.  The unit normal is
    ``nu = -d/dt`` and mean curvatures are normalised (trace divided by n), so
    ``H_g = w'/w``, ``|II|^2 = n (w'/w)^2`` and ``Ric_g(nu, nu) = -n w''/w``.
    Conformal factors are functions of ``t`` carried with two analytic
    derivatives.

Surface model
    a triangulated surface with a collar around a ring ``Sigma``.  The normal
    points towards the side with smaller ring index, ``H`` is the discrete
    geodesic curvature and ``Ric(nu, nu)`` the discrete Gauss curvature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .collar import Collar
from .errors import InputError, InvalidMetricError, PreconditionError, StructuralError
from .geometry import Cycle, LevelSet, TriangulatedSurface, WarpedInterval, separates


# --------------------------------------------------------------------------
# formulas
# --------------------------------------------------------------------------

def conformal_mean_curvature(H_g, f_at_sigma, df_dnu):
    """Mean curvature of Sigma under ``e^{2f} g``: ``e^{-f} (H_g - df/dnu)``."""
    return np.exp(-np.asarray(f_at_sigma, float)) * (np.asarray(H_g, float)
                                                    - np.asarray(df_dnu, float))


def general_ricci_normal(ric_g, n, f, df_dnu, hess_nn, laplacian, grad_sq):
    """``Ric_h(nu_h, nu_h)`` from the general conformal formula in dimension n + 1.

    ``hess_nn`` is ``nabla^2 f(nu, nu)``; the result is evaluated on the unit
    normal of ``h``, hence the factor ``e^{-2f}``.
    """
    ric = (ric_g - (n - 1) * (hess_nn - df_dnu ** 2)
           - (laplacian + (n - 1) * grad_sq))
    return np.exp(-2.0 * np.asarray(f, float)) * ric


# --------------------------------------------------------------------------
# conformal factors
# --------------------------------------------------------------------------

def _smoothstep(x):
    return x * x * x * (x * (6.0 * x - 15.0) + 10.0)


def _smoothstep_d(x):
    return 30.0 * x * x * (x - 1.0) ** 2


def _smoothstep_dd(x):
    return 60.0 * x * (x - 1.0) * (2.0 * x - 1.0)


def bump(s, radius: float):
    """C2 bump ``chi`` and its first two derivatives.

    ``chi = 1`` for ``|s| <= radius / 2`` and ``chi = 0`` for ``|s| >= radius``.
    """
    s = np.asarray(s, float)
    half = radius / 2.0
    a = np.abs(s)
    chi = np.where(a <= half, 1.0, 0.0)
    d1 = np.zeros_like(s)
    d2 = np.zeros_like(s)
    mid = (a > half) & (a < radius)
    x = (a[mid] - half) / half
    chi[mid] = 1.0 - _smoothstep(x)
    d1[mid] = -_smoothstep_d(x) * np.sign(s[mid]) / half
    d2[mid] = -_smoothstep_dd(x) / half ** 2
    return chi, d1, d2


@dataclass(frozen=True)
class ConformalFactor:
    """A conformal exponent ``f``.

    In the warped model ``profile(t)`` returns ``(f, f', f'')``; on meshes
    ``values`` holds one number per vertex.  ``normal_derivative`` is
    ``df/dnu`` sampled on Sigma.
    """

    values: np.ndarray | None
    normal_derivative: np.ndarray
    kind: str = "general"
    profile: Callable | None = field(default=None, repr=False)
    coefficient: float = 0.0

    def __call__(self, t):
        if self.profile is None:
            raise InputError("factor has no analytic profile")
        return self.profile(np.asarray(t, float))

    def __add__(self, other: "ConformalFactor") -> "ConformalFactor":
        if self.profile is not None and other.profile is not None:
            p, q = self.profile, other.profile

            def both(t):
                a, b = p(t), q(t)
                return tuple(x + y for x, y in zip(a, b))
            prof = both
        else:
            prof = None
        vals = None if self.values is None else self.values + other.values
        return ConformalFactor(vals, self.normal_derivative + other.normal_derivative,
                               "general", prof, self.coefficient + other.coefficient)


def zero_factor(n_sigma: int = 1, n_vertices: int | None = None) -> ConformalFactor:
    vals = None if n_vertices is None else np.zeros(n_vertices)

    def prof(t):
        z = np.zeros_like(np.asarray(t, float))
        return z, z, z
    return ConformalFactor(vals, np.zeros(n_sigma), "zero", prof)


def _warped_factor(kind, c, radius, shape, coefficient, normal_derivative):
    """Factor ``shape(s) * chi(s)`` with ``s = t - c``; ``shape`` returns
    the function and its first two derivatives."""
    def prof(t):
        s = np.asarray(t, float) - c
        chi, d1, d2 = bump(s, radius)
        a, a1, a2 = shape(s)
        return a * chi, a1 * chi + a * d1, a2 * chi + 2 * a1 * d1 + a * d2
    return ConformalFactor(None, np.atleast_1d(float(normal_derivative)), kind, prof, coefficient)


# --------------------------------------------------------------------------
# warped model curvature
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvatureData:
    mean_curvature: np.ndarray
    ricci_normal: np.ndarray
    second_fundamental_norm_sq: np.ndarray
    normal_points_to_lower: bool = True

    @property
    def potential(self) -> np.ndarray:
        """``|II|^2 + Ric(nu, nu)``."""
        return self.second_fundamental_norm_sq + self.ricci_normal


def _level(sigma) -> float:
    return float(sigma.t if isinstance(sigma, LevelSet) else sigma)


def warped_curvature(w: WarpedInterval, sigma, factor: ConformalFactor | None = None) -> CurvatureData:
    """Curvature of ``{t = c}`` under ``e^{2u} g`` by the transformation formulas."""
    c = _level(sigma)
    w._check(c)
    n = w.fibre_dim
    f, df, ddf = (np.asarray(x, float) for x in w.warp_derivatives(c))
    H = df / f
    ric = -n * ddf / f
    if factor is None:
        return CurvatureData(np.atleast_1d(H), np.atleast_1d(ric), np.atleast_1d(n * H * H))
    u, du, ddu = factor(c)
    Hh = conformal_mean_curvature(H, u, -du)
    ric_h = general_ricci_normal(ric, n, u, -du, ddu, ddu + n * H * du, du * du)
    return CurvatureData(np.atleast_1d(Hh), np.atleast_1d(ric_h), np.atleast_1d(n * Hh * Hh))


def conformal_ricci_normal(geom, factor: ConformalFactor, at, *, specialized: bool = False,
                           collar: Collar | None = None, tol: float = 1e-12):
    """Normal Ricci curvature of Sigma after the conformal change.

    With ``specialized=True`` the factor must vanish to first order on Sigma
    and the reduced formula ``Ric - n nabla^2 f(nu, nu)`` is used.  On a mesh
    the value is the transformed Gauss curvature ``e^{-2f}(K - Delta f)`` at
    the Sigma vertices.
    """
    if isinstance(geom, WarpedInterval):
        c = _level(at)
        n = geom.fibre_dim
        base = warped_curvature(geom, c)
        u, du, ddu = factor(c)
        if specialized:
            if abs(float(u)) > tol or abs(float(du)) > tol:
                raise PreconditionError("factor does not vanish to first order on sigma")
            return np.atleast_1d(base.ricci_normal - n * ddu)
        return warped_curvature(geom, c, factor).ricci_normal
    if collar is None:
        raise InputError("mesh curvature needs the collar")
    verts = np.array(collar.rings[collar.sigma_index])
    K = gauss_curvature(geom)[verts]
    lap = cotan_laplacian_apply(geom, factor.values)[verts]
    f = factor.values[verts]
    if specialized:
        nd = _mesh_normal_difference(geom, collar, factor.values)
        if np.max(np.abs(f)) > tol or np.max(np.abs(nd)) > tol:
            raise PreconditionError("factor does not vanish to first order on sigma")
    return np.exp(-2.0 * f) * (K - lap)


def fd_curvature(w: WarpedInterval, sigma, factor: ConformalFactor, h: float) -> CurvatureData:
    """Curvature of ``{t = c}`` in ``e^{2u} g`` recomputed from the metric alone.

    The metric is ``ds^2 + G(s)^2 g_{S^n}`` with ``G = e^u w`` and
    ``ds = e^u dt``.  Then ``H = (1/G) dG/ds`` and
    ``Ric(nu, nu) = -(n/G) d^2 G/ds^2`` are evaluated with central differences
    of step ``h`` in ``t``.
    """
    c = _level(sigma)
    n = w.fibre_dim

    def G(t):
        return np.exp(factor(t)[0]) * w.warp_at(t)

    def e_u(t):
        return np.exp(factor(t)[0])

    Gc = float(G(c))
    H = float((G(c + h) - G(c - h)) / (2 * h) / Gc / e_u(c))
    q_plus = (G(c + h) - Gc) / h / e_u(c + h / 2)
    q_minus = (Gc - G(c - h)) / h / e_u(c - h / 2)
    d2 = float((q_plus - q_minus) / h / e_u(c))
    ric = -n * d2 / Gc
    return CurvatureData(np.atleast_1d(H), np.atleast_1d(ric), np.atleast_1d(n * H * H))


def conformal_residuals(w: WarpedInterval, sigma, factor: ConformalFactor, h: float):
    """Absolute differences (mean curvature, normal Ricci) between formula and
    finite differences."""
    a = warped_curvature(w, sigma, factor)
    b = fd_curvature(w, sigma, factor, h)
    return (float(np.max(np.abs(a.mean_curvature - b.mean_curvature))),
            float(np.max(np.abs(a.ricci_normal - b.ricci_normal))))


# --------------------------------------------------------------------------
# surface model curvature
# --------------------------------------------------------------------------

def corner_angles(surface: TriangulatedSurface) -> np.ndarray:
    """(F, 3) interior angles; column k is the angle at ``faces[:, k]``."""
    L = surface.lengths[surface.face_edges]
    out = np.empty_like(L)
    for k in range(3):
        # face_edges[:, (k + 1) % 3] is the edge opposite corner k
        opp, s1, s2 = L[:, (k + 1) % 3], L[:, (k + 2) % 3], L[:, k]
        cos = (s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2)
        out[:, k] = np.arccos(np.clip(cos, -1.0, 1.0))
    return out


def gauss_curvature(surface: TriangulatedSurface) -> np.ndarray:
    """Angle defect divided by one third of the incident face area."""
    ang = corner_angles(surface)
    nv = surface.n_vertices
    total = np.bincount(surface.faces.ravel(), weights=ang.ravel(), minlength=nv)
    area = np.bincount(surface.faces.ravel(), weights=np.repeat(surface.face_areas, 3),
                       minlength=nv) / 3.0
    return (2 * np.pi - total) / area


def cotan_matrices(surface: TriangulatedSurface):
    """Cotangent stiffness and lumped (barycentric) mass, both sparse."""
    ang = corner_angles(surface)
    cot = 1.0 / np.tan(ang)
    F = surface.faces
    rows, cols, vals = [], [], []
    for k in range(3):
        i, j = F[:, (k + 1) % 3], F[:, (k + 2) % 3]
        w = 0.5 * cot[:, k]
        rows += [i, j, i, j]
        cols += [j, i, i, j]
        vals += [-w, -w, w, w]
    nv = surface.n_vertices
    S = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(nv, nv))
    mass = np.bincount(F.ravel(), weights=np.repeat(surface.face_areas, 3), minlength=nv) / 3.0
    return S, mass


def cotan_laplacian_apply(surface: TriangulatedSurface, values) -> np.ndarray:
    """Discrete Laplace-Beltrami of vertex values (positive on convex bumps
    turned down, i.e. ``Delta (x^2) = 2`` in the plane)."""
    S, mass = cotan_matrices(surface)
    return -(S @ np.asarray(values, float)) / mass


def _omega_side(surface: TriangulatedSurface, collar: Collar):
    ok, a, b = separates(surface, collar.sigma)
    if not ok:
        raise StructuralError("sigma does not separate")
    ring0 = set(collar.rings[0])
    side_a = a.mask(surface.n_faces)
    touch = np.isin(surface.faces, list(ring0)).any(axis=1)
    return a if np.any(side_a & touch) else b


def mesh_mean_curvature(surface: TriangulatedSurface, collar: Collar) -> np.ndarray:
    """Discrete geodesic curvature of sigma at its vertices (normal towards ring 0).

    With ``A_-`` and ``A_+`` the corner angle sums at a vertex on the ring 0
    side and on the far side, the curvature is ``(A_+ - A_-) / (2 l)`` where
    ``l`` is the mean length of the two incident sigma edges.  A polygon
    around a flat disc on the ring 0 side gives ``2 pi / (m l)``.
    """
    omega = _omega_side(surface, collar)
    ang = corner_angles(surface)
    F = surface.faces
    in_omega = omega.mask(surface.n_faces)
    ring = collar.rings[collar.sigma_index]
    L = surface.lengths[collar.fibre_edges(surface, collar.sigma_index)]
    out = np.empty(len(ring))
    for i, v in enumerate(ring):
        at_v = F == v
        near = ang[at_v & in_omega[:, None]].sum()
        far = ang[at_v & ~in_omega[:, None]].sum()
        out[i] = (far - near) / (L[i] + L[i - 1])
    return out


def ring_offsets(surface: TriangulatedSurface, collar: Collar) -> np.ndarray:
    """Signed collar distance of each ring from sigma, positive towards ring 0."""
    strips = collar.strips(surface)
    step = np.array([surface.lengths[s.vertical].mean() for s in strips])
    pos = np.r_[0.0, np.cumsum(step)]
    return pos[collar.sigma_index] - pos


def mesh_curvature(surface: TriangulatedSurface, collar: Collar) -> CurvatureData:
    ring = np.array(collar.rings[collar.sigma_index])
    H = mesh_mean_curvature(surface, collar)
    K = gauss_curvature(surface)[ring]
    return CurvatureData(H, K, H * H)


def _mesh_normal_difference(surface, collar, values) -> np.ndarray:
    """Central difference of ``values`` across sigma, towards ring 0.

    A one-sided difference of an even factor such as ``c s^2`` is ``c h``,
    not zero, so the centred form is the discrete normal derivative.
    """
    j = collar.sigma_index
    if not 0 < j < collar.n_rings - 1:
        raise StructuralError("sigma needs a collar ring on each side")
    s = ring_offsets(surface, collar)
    lo = np.array(collar.rings[j - 1])
    hi = np.array(collar.rings[j + 1])
    return (values[lo] - values[hi]) / (s[j - 1] - s[j + 1])


def _bump_radius(surface, collar) -> float:
    s = ring_offsets(surface, collar)
    return float(min(s[0], -s[-1]))


def apply_conformal(surface: TriangulatedSurface, factor: ConformalFactor) -> TriangulatedSurface:
    """Edge lengths scaled by ``exp((f_i + f_j) / 2)``."""
    f = np.asarray(factor.values, float)
    e = surface.edges
    new = surface.with_lengths(surface.lengths * np.exp(0.5 * (f[e[:, 0]] + f[e[:, 1]])))
    return new.with_fields(conformal_factor=f)


# --------------------------------------------------------------------------
# recipes
# --------------------------------------------------------------------------

def _default_radius(w: WarpedInterval, c: float) -> float:
    r = min(c - w.start, w.end - c)
    if not r > 0:
        raise StructuralError("sigma must lie inside the interval")
    return r


def make_minimal(geom, sigma, *, collar: Collar | None = None,
                 radius: float | None = None, tol: float = 1e-10,
                 max_iter: int = 100) -> ConformalFactor:
    """``f1 = -H (t - c) chi`` so that ``df1/dnu = H`` on Sigma.

    On a mesh the factor is ``slope_i * s_j * chi(s_j)`` on ring j, with
    ``s`` the signed collar distance.  The slope starts at the discrete
    geodesic curvature and is corrected until the curvature of the conformally
    changed mesh is below ``tol``.  ``normal_derivative`` always records the
    prescribed value ``H``.
    """
    if isinstance(geom, WarpedInterval):
        c = _level(sigma)
        H = float(warped_curvature(geom, c).mean_curvature[0])
        r = _default_radius(geom, c) if radius is None else radius
        if H == 0.0:
            return _warped_factor("f1", c, r, lambda s: (0 * s, 0 * s, 0 * s), 0.0, 0.0)
        # nu = -d/dt, so df/dnu = H needs f' = -H on sigma
        return _warped_factor("f1", c, r, lambda s: (-H * s, -H + 0 * s, 0 * s), H, H)
    if collar is None:
        raise StructuralError("sigma must come with a collar")
    H = mesh_mean_curvature(geom, collar)
    r = _bump_radius(geom, collar) if radius is None else radius
    s = ring_offsets(geom, collar)
    chi, _, _ = bump(s, r)
    shape = np.zeros((geom.n_vertices, collar.ring_size))
    for j, ring in enumerate(collar.rings):
        shape[list(ring), np.arange(collar.ring_size)] = s[j] * chi[j]
    # The discrete curvature does not respond to the factor at exactly the
    # continuum rate, so the slope is found by a per-vertex secant iteration
    # (the rotationally symmetric case is a scalar root find).
    def residual(slope):
        try:
            g = apply_conformal(geom, ConformalFactor(shape @ slope, H))
        except InvalidMetricError:
            return None
        return mesh_mean_curvature(g, collar)

    x0, r0 = np.zeros_like(H), H
    x1 = 0.5 * H
    r1 = residual(x1)
    for _ in range(max_iter):
        while r1 is None:
            x1 = 0.5 * (x0 + x1)
            r1 = residual(x1)
        if np.max(np.abs(r1)) <= tol:
            break
        dr = r1 - r0
        rate = np.where(np.abs(dr) > 0, (x1 - x0) / np.where(dr == 0, 1.0, dr), 0.0)
        x0, r0 = x1, r1
        x1 = x1 - rate * r1
        r1 = residual(x1)
    else:
        raise StructuralError(f"discrete mean curvature stuck at {np.max(np.abs(r1)):.3g}")
    return ConformalFactor(shape @ x1, H, "f1")


def _choose_coefficient(potential, n, margin, start=2.0 ** -10, max_doublings=200):
    """Smallest ``c`` in ``{0, start * 2^k}`` with ``potential - 2 n c <= -margin``."""
    worst = float(np.max(potential))
    if worst <= -margin:
        return 0.0
    c = start
    for _ in range(max_doublings):
        if worst - 2 * n * c <= -margin:
            return c
        c *= 2.0
    raise StructuralError("no admissible coefficient found")


@dataclass(frozen=True)
class StabilityForm:
    """Discretised ``Q(phi) = int |grad phi|^2 - V phi^2`` on a closed curve."""

    stiffness: np.ndarray
    mass: np.ndarray
    matrix: np.ndarray
    lambda_min: float
    eigenvector: np.ndarray

    @property
    def strictly_stable(self) -> bool:
        return self.lambda_min > 0


def cycle_stability_form(edge_lengths, potential) -> StabilityForm:
    """P1 elements on a closed polygon with vertex potential ``V``.

    Vertex ``i`` sits between edges ``i - 1`` and ``i``.  The potential term is
    integrated exactly for linear ``V`` on each edge, so lowering ``V`` at any
    vertex can only raise the form.
    """
    h = np.asarray(edge_lengths, float)
    V = np.broadcast_to(np.asarray(potential, float), h.shape).astype(float)
    m = len(h)
    if m < 3:
        raise InputError("need a polygon with at least three edges")
    if np.any(h <= 0):
        raise InputError("cycle edges must have positive length")
    K = np.zeros((m, m))
    M = np.zeros((m, m))
    P = np.zeros((m, m))
    for e in range(m):
        i, j = e, (e + 1) % m
        k = 1.0 / h[e]
        K[i, i] += k
        K[j, j] += k
        K[i, j] -= k
        K[j, i] -= k
        M[i, i] += h[e] / 3
        M[j, j] += h[e] / 3
        M[i, j] += h[e] / 6
        M[j, i] += h[e] / 6
        P[i, i] += h[e] * (3 * V[i] + V[j]) / 12
        P[j, j] += h[e] * (V[i] + 3 * V[j]) / 12
        P[i, j] += h[e] * (V[i] + V[j]) / 12
        P[j, i] += h[e] * (V[i] + V[j]) / 12
    A = K - P
    vals, vecs = sla.eigh(A, M, subset_by_index=[0, 0])
    v = vecs[:, 0]
    v = v * np.sign(v.sum() or 1.0)
    return StabilityForm(K, M, A, float(vals[0]), v)


def stability_form(geom, sigma, *, collar: Collar | None = None,
                   curvature: CurvatureData | None = None, samples: int = 64,
                   factor: ConformalFactor | None = None) -> StabilityForm:
    """Stability form of Sigma.

    Warped model (n = 1 only): Sigma is a circle of length ``2 pi e^u w``
    sampled at ``samples`` points with constant potential.  Mesh model: the
    sigma ring with its discrete curvature.
    """
    if isinstance(geom, WarpedInterval):
        if geom.fibre_dim != 1:
            raise StructuralError("the stability form is assembled on curves only (n = 1)")
        c = _level(sigma)
        curv = curvature or warped_curvature(geom, c, factor)
        u = 0.0 if factor is None else float(factor(c)[0])
        length = 2 * np.pi * float(geom.warp_at(c)) * math.exp(u)
        return cycle_stability_form(np.full(samples, length / samples),
                                    float(curv.potential[0]))
    if collar is None:
        raise StructuralError("sigma must come with a collar")
    curv = curvature or mesh_curvature(geom, collar)
    L = geom.lengths[collar.fibre_edges(geom, collar.sigma_index)]
    return cycle_stability_form(L, curv.potential)


def make_strictly_stable(geom, sigma, margin: float, *, collar: Collar | None = None,
                         base: ConformalFactor | None = None, radius: float | None = None):
    """``f2 = c s^2 chi`` with ``c`` found by doubling until
    ``|II|^2 + Ric(nu, nu) <= -margin`` on Sigma.

    ``base`` is a factor already applied (typically from :func:`make_minimal`);
    it must vanish on Sigma.  Returns the new factor and the stability form
    of the combined metric.
    """
    if margin < 0:
        raise InputError("margin must be non-negative")
    if isinstance(geom, WarpedInterval):
        c0 = _level(sigma)
        n = geom.fibre_dim
        r = _default_radius(geom, c0) if radius is None else radius
        if r <= 0:
            raise StructuralError("collar too narrow for f2")
        curv = warped_curvature(geom, c0, base)
        if base is not None and abs(float(base(c0)[0])) > 1e-12:
            raise PreconditionError("base factor must vanish on sigma")
        coef = _choose_coefficient(curv.potential, n, margin)
        f2 = _warped_factor("f2", c0, r, lambda s: (coef * s * s, 2 * coef * s, 2 * coef + 0 * s),
                            coef, 0.0)
        total = f2 if base is None else base + f2
        form = stability_form(geom, c0, factor=total) if n == 1 else None
        return f2, form
    if collar is None:
        raise StructuralError("sigma must come with a collar")
    if collar.sigma_index < 1 or collar.sigma_index > collar.n_rings - 2:
        raise StructuralError("collar too narrow for f2")
    surf = geom if base is None else apply_conformal(geom, base)
    curv = mesh_curvature(surf, collar)
    coef = _choose_coefficient(curv.potential, 1, margin)
    r = _bump_radius(surf, collar) if radius is None else radius
    s = ring_offsets(surf, collar)
    chi, _, _ = bump(s, r)
    vals = np.zeros(surf.n_vertices)
    for j, ring in enumerate(collar.rings):
        vals[list(ring)] = coef * s[j] ** 2 * chi[j]
    f2 = ConformalFactor(vals, np.zeros(collar.ring_size), "f2", None, coef)
    shifted = CurvatureData(curv.mean_curvature, curv.ricci_normal - 2.0 * coef,
                            curv.second_fundamental_norm_sq)
    return f2, stability_form(surf, None, collar=collar, curvature=shifted)


# --------------------------------------------------------------------------
# analytic test cases
# --------------------------------------------------------------------------

WARPED_CASES = {
    "sphere": (np.sin, np.cos, lambda t: -np.sin(t), (0.0, np.pi), True),
    "cylinder": (lambda t: np.ones_like(np.asarray(t, float)),
                 lambda t: np.zeros_like(np.asarray(t, float)),
                 lambda t: np.zeros_like(np.asarray(t, float)), (-1.0, 1.0), False),
    "neck": (np.cosh, np.sinh, np.cosh, (-1.0, 1.0), False),
}


def warped_case(name: str, fibre_dim: int = 1, num: int = 2001) -> WarpedInterval:
    """The analytic warped products used for curvature checks."""
    try:
        f, df, ddf, (a, b), capped = WARPED_CASES[name]
    except KeyError:
        raise InputError(f"unknown case {name!r}; choose from {sorted(WARPED_CASES)}") from None
    return WarpedInterval.from_function(f, df, ddf, b - a, fibre_dim, num=num, start=a,
                                        caps=(capped, capped))
