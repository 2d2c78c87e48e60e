"""Mesh fixtures: platonic solids, tori and dumbbells."""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .collar import Collar
from .errors import InputError, InvalidMetricError, StructuralError
from .geometry import Cycle, TriangulatedSurface, separates


def tetrahedron(edge: float = 1.0) -> TriangulatedSurface:
    faces = [(0, 1, 2), (0, 3, 1), (1, 3, 2), (0, 2, 3)]
    lengths = {(i, j): edge for i in range(4) for j in range(i + 1, 4)}
    return TriangulatedSurface.from_lengths(faces, lengths)


def octahedron(edge: float = 1.0) -> TriangulatedSurface:
    """Regular octahedron; vertices 0..3 form the equator (in cyclic order),
    4 and 5 are the poles."""
    s = edge / math.sqrt(2.0)
    verts = np.array([[s, 0, 0], [0, s, 0], [-s, 0, 0], [0, -s, 0], [0, 0, s], [0, 0, -s]])
    faces = []
    for i in range(4):
        j = (i + 1) % 4
        faces.append((i, j, 4))
        faces.append((j, i, 5))
    return TriangulatedSurface.from_coordinates(verts, faces)


def _grid_faces(nu: int, nv: int) -> list[tuple[int, int, int]]:
    idx = lambda i, j: (i % nu) * nv + (j % nv)  # noqa: E731
    faces = []
    for i in range(nu):
        for j in range(nv):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            faces.append((a, b, c))
            faces.append((a, c, d))
    return faces


def torus(nu: int = 3, nv: int = 4, major: float = 2.0, minor: float = 1.0) -> TriangulatedSurface:
    """Embedded torus of revolution; ring ``j`` (fixed v) is the vertex loop
    ``[i * nv + j for i in range(nu)]``."""
    u = 2 * np.pi * np.arange(nu) / nu
    v = 2 * np.pi * np.arange(nv) / nv
    uu, vv = np.meshgrid(u, v, indexing="ij")
    x = (major + minor * np.cos(uu)) * np.cos(vv)
    y = (major + minor * np.cos(uu)) * np.sin(vv)
    z = minor * np.sin(uu)
    verts = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)
    return TriangulatedSurface.from_coordinates(verts, _grid_faces(nu, nv))


def flat_torus(n: int, area: float = 1.0) -> TriangulatedSurface:
    """Square flat torus of the given area, n x n grid (abstract metric)."""
    h = math.sqrt(area) / n
    faces = _grid_faces(n, n)
    lengths = {}
    for a, b, c in faces:
        for p, q in ((a, b), (b, c), (c, a)):
            di = abs(p // n - q // n)
            dj = abs(p % n - q % n)
            di, dj = min(di, n - di), min(dj, n - dj)
            lengths[(p, q)] = h * math.sqrt(di * di + dj * dj)
    return TriangulatedSurface.from_lengths(faces, lengths)


def clifford_torus(n: int) -> TriangulatedSurface:
    """S^1(1/sqrt 2) x S^1(1/sqrt 2) in S^3, n x n grid, chordal lengths in R^4."""
    th = 2 * np.pi * np.arange(n) / n
    a, b = np.meshgrid(th, th, indexing="ij")
    r = 1 / math.sqrt(2.0)
    verts = np.stack([r * np.cos(a), r * np.sin(a), r * np.cos(b), r * np.sin(b)], axis=-1)
    return TriangulatedSurface.from_coordinates(verts.reshape(-1, 4), _grid_faces(n, n))


# --------------------------------------------------------------------------
# surfaces of revolution
# --------------------------------------------------------------------------

def revolution_surface(meridian, ring_size: int, pole_heights=None):
    """Close a stack of coaxial rings with two poles.

    ``meridian`` is a sequence of ``(radius, z)`` pairs from south to north.
    Returns the surface and the ring vertex lists.
    """
    m = ring_size
    meridian = np.asarray(meridian, float)
    n_r = len(meridian)
    z_s = meridian[0, 1] - meridian[0, 0] if pole_heights is None else pole_heights[0]
    z_n = meridian[-1, 1] + meridian[-1, 0] if pole_heights is None else pole_heights[1]
    ang = 2 * np.pi * np.arange(m) / m
    verts = [[0.0, 0.0, z_s]]
    rings = []
    for r, z in meridian:
        rings.append(tuple(range(len(verts), len(verts) + m)))
        verts.extend([r * math.cos(a), r * math.sin(a), z] for a in ang)
    verts.append([0.0, 0.0, z_n])
    north = len(verts) - 1
    faces = []
    r0 = rings[0]
    faces += [(0, r0[(i + 1) % m], r0[i]) for i in range(m)]
    for j in range(n_r - 1):
        lo, hi = rings[j], rings[j + 1]
        for i in range(m):
            a0, a1, b0, b1 = lo[i], lo[(i + 1) % m], hi[i], hi[(i + 1) % m]
            faces.append((a0, a1, b1))
            faces.append((a0, b1, b0))
    rn = rings[-1]
    faces += [(north, rn[i], rn[(i + 1) % m]) for i in range(m)]
    try:
        surf = TriangulatedSurface.from_coordinates(np.array(verts), faces)
    except InvalidMetricError as exc:
        raise StructuralError(f"degenerate construction: {exc}") from exc
    return surf, rings


def _equal_chord_points(profile, z0: float, z1: float, n_steps: int) -> np.ndarray:
    """Points on the meridian ``z -> (profile(z), z)`` from z0 to z1 with
    ``n_steps`` equal chords."""
    def point(z):
        return np.array([profile(z), z])

    def walk(delta):
        zs = [z0]
        for _ in range(n_steps):
            p = point(zs[-1])
            f = lambda z: np.linalg.norm(point(z) - p) - delta  # noqa: E731
            hi = zs[-1] + 2 * delta + abs(z1 - z0)
            zs.append(brentq(f, zs[-1], hi, xtol=1e-15, rtol=1e-15))
        return zs

    straight = np.linalg.norm(point(z1) - point(z0))
    arc = sum(np.linalg.norm(point(b) - point(a))
              for a, b in zip(np.linspace(z0, z1, 2001)[:-1], np.linspace(z0, z1, 2001)[1:]))
    delta = brentq(lambda d: walk(d)[-1] - z1, straight / n_steps * 0.999, arc / n_steps * 1.001,
                   xtol=1e-15, rtol=1e-15)
    zs = walk(delta)
    zs[-1] = z1
    return np.array([[profile(z), z] for z in zs])


def build_dumbbell(neck_fibre_size: float, neck_bands: int, cap_resolution: int, *,
                   cap_radius: float | tuple[float, float] = 1.0,
                   neck_length: float = 3.0, cap_rings: int | None = None):
    """Two spherical caps joined by a waisted neck.

    ``neck_bands`` rings span the neck (both rims included); each ring has
    ``cap_resolution`` vertices.  The waist ring ``sigma`` has total length
    ``neck_fibre_size``.  ``cap_radius`` may differ between the south and north
    caps.  Rings on each half of the neck are equally spaced along the
    meridian.

    Returns ``(surface, sigma, collar)`` where the collar is the whole neck.
    """
    m = int(cap_resolution)
    if m < 3 or neck_bands < 3:
        raise InputError("need at least 3 neck bands and 3 vertices per ring")
    b_s, b_n = (cap_radius, cap_radius) if np.isscalar(cap_radius) else cap_radius
    a = neck_fibre_size / (2 * m * math.sin(math.pi / m))
    if not 0 < a < min(b_s, b_n):
        raise StructuralError("neck fibre must be positive and smaller than the caps")
    half = neck_length / 2
    k = neck_bands - 1
    k_s = k // 2
    k_n = k - k_s
    if k_s < 1:
        raise InputError("neck needs rings on both sides of sigma")

    def prof(b):
        return lambda z: b - (b - a) * math.cos(math.pi * z / (2 * half)) ** 2

    south = _equal_chord_points(prof(b_s), 0.0, half, k_s)
    north = _equal_chord_points(prof(b_n), 0.0, half, k_n)
    neck = np.vstack([south[::-1] * [1, -1], north[1:]])

    n_cap = max(2, m // 4) if cap_rings is None else int(cap_rings)

    def cap(b, sign):
        phis = np.linspace(0, math.pi / 2, n_cap + 2)[1:-1]
        return [(b * math.cos(p), sign * (half + b * math.sin(p))) for p in phis]

    meridian = cap(b_s, -1)[::-1] + [tuple(p) for p in neck] + cap(b_n, +1)
    surf, rings = revolution_surface(meridian, m, (-(half + b_s), half + b_n))
    neck_rings = rings[n_cap:n_cap + neck_bands]
    collar = Collar(tuple(neck_rings), k_s)
    sigma = collar.sigma
    # pin sigma's edges to the requested fibre size exactly
    lengths = surf.lengths.copy()
    lengths[surf.edge_ids(sigma.edges)] = neck_fibre_size / m
    surf = TriangulatedSurface(surf.topology, lengths, surf.coordinates)
    collar.validate(surf)
    return surf, sigma, collar


def build_coarse_dumbbell(radii=(1.0, 0.45, 0.5, 1.6), heights=(0.0, 0.5, 1.0, 1.5),
                          pole_offsets=(0.6, 1.2), ring_size: int = 3, *,
                          subdivisions: int = 1, cap_rings: int = 0,
                          sigma_key: int = 1, collar_keys=None):
    """Dumbbell from a stack of key rings closed by two conical caps.

    With the defaults this is the tiny exhaustive-search fixture: four
    triangular rings and two fans, 3 + 3 + 3 * 6 = 24 faces.  Ring 1 is sigma,
    ring 2 a parallel competitor, and the collar spans all four rings.

    ``subdivisions`` inserts rings along the straight meridian segments
    between key rings and ``cap_rings`` adds rings on each cone between the
    end rings and the poles, giving a finer mesh of the same shape.  Sigma
    sits on key ring ``sigma_key``; the collar runs between the key rings
    ``collar_keys`` (default: the first and last).
    """
    k = len(radii)
    if k < 3 or len(heights) != k:
        raise InputError("need at least three key rings with one height each")
    lo, hi = (0, k - 1) if collar_keys is None else collar_keys
    if not 0 <= lo < sigma_key < hi <= k - 1:
        raise InputError("sigma must lie strictly inside the collar key range")
    s = int(subdivisions)
    if s < 1 or cap_rings < 0:
        raise InputError("subdivisions must be >= 1 and cap_rings >= 0")
    key = np.column_stack([radii, heights]).astype(float)
    t = np.arange((k - 1) * s + 1) / s
    stack = np.column_stack([np.interp(t, np.arange(k), key[:, 0]),
                             np.interp(t, np.arange(k), key[:, 1])])
    poles = (heights[0] - pole_offsets[0], heights[-1] + pole_offsets[1])
    u = np.arange(1, cap_rings + 1) / (cap_rings + 1)
    south = [(radii[0] * (1 - a), heights[0] - pole_offsets[0] * a) for a in u[::-1]]
    north = [(radii[-1] * (1 - a), heights[-1] + pole_offsets[1] * a) for a in u]
    meridian = south + [tuple(p) for p in stack] + north
    surf, rings = revolution_surface(meridian, ring_size, poles)
    first = cap_rings + lo * s
    collar = Collar(tuple(rings[first:cap_rings + hi * s + 1]), (sigma_key - lo) * s)
    collar.validate(surf)
    return surf, collar.sigma, collar



def build_ring_metric(widths, spacings, ring_size: int, sigma_index: int,
                      collar=None, pole_spokes=None):
    """Abstract rotationally symmetric sphere given by ring lengths.

    Ring ``j`` has total length ``widths[j]`` (``ring_size`` equal fibre
    edges); consecutive rings are ``spacings[j]`` apart along the verticals,
    and the diagonal of each quad is ``hypot(spacing, mean fibre)`` unless that
    breaks a triangle inequality.  Poles
    are joined to the end rings by spokes of length ``pole_spokes`` (default:
    a fibre edge of the end ring, which makes the end fans equilateral-ish).
    No embedding is implied, so ring lengths may change quickly without the
    band between them carrying much area.

    ``collar`` is a ``(first, last)`` ring range containing ``sigma_index``
    (default: every ring).  Returns ``(surface, sigma, collar)``.
    """
    w = np.asarray(widths, float)
    dz = np.asarray(spacings, float)
    n, m = len(w), int(ring_size)
    if n < 3 or len(dz) != n - 1:
        raise InputError("need at least three rings and one spacing per gap")
    if m < 3 or np.any(w <= 0) or np.any(dz <= 0):
        raise InputError("ring sizes, widths and spacings must be positive")
    lo, hi = (0, n - 1) if collar is None else collar
    if not 0 <= lo < sigma_index < hi <= n - 1:
        raise InputError("sigma must lie strictly inside the collar range")
    # only the combinatorics of the revolution construction are reused
    meridian = [(1.0, float(j)) for j in range(n)]
    surf, rings = revolution_surface(meridian, m, (-1.0, float(n)))
    fib = w / m
    spokes = (fib[0], fib[-1]) if pole_spokes is None else tuple(pole_spokes)
    south, north = 0, surf.n_vertices - 1
    lengths = {}
    for j, ring in enumerate(rings):
        for i in range(m):
            lengths[(ring[i], ring[(i + 1) % m])] = fib[j]
    for j in range(n - 1):
        lo_r, hi_r = rings[j], rings[j + 1]
        diag = math.hypot(dz[j], 0.5 * (fib[j] + fib[j + 1]))
        # both triangles of the quad need a valid diagonal; fall back to the
        # middle of the admissible interval when the hypotenuse leaves it
        low = max(abs(dz[j] - fib[j]), abs(dz[j] - fib[j + 1]))
        high = dz[j] + min(fib[j], fib[j + 1])
        if not low < high:
            raise StructuralError(f"spacing {dz[j]!r} too small for the width change "
                                  f"after ring {j}")
        if not low < diag < high:
            diag = 0.5 * (low + high)
        for i in range(m):
            lengths[(lo_r[i], hi_r[i])] = dz[j]
            lengths[(lo_r[i], hi_r[(i + 1) % m])] = diag
    for i in range(m):
        lengths[(south, rings[0][i])] = spokes[0]
        lengths[(north, rings[-1][i])] = spokes[1]
    try:
        surf = TriangulatedSurface.from_lengths(surf.faces, lengths)
    except InvalidMetricError as exc:
        raise StructuralError(f"ring metric is not a valid triangulation metric: {exc}") from exc
    col = Collar(tuple(rings[lo:hi + 1]), sigma_index - lo)
    col.validate(surf)
    return surf, col.sigma, col


def build_pinched_dumbbell(ring_size: int = 24, collar_spacing: float = 0.005,
                           pinch: float = 0.5, sigma_width: float = 5.0):
    """Ring-metric dumbbell whose south bulb carries a thin pinch.

    Sigma is a shallow waist of length ``sigma_width`` in a short collar of
    13 rings; the pinch (two rings of length ``pinch``) sits on sigma's side
    close to the collar.  Before stretching, the pinch plus a small extra
    region is shorter than sigma at the same volume; the collar cylinders
    then add volume that such competitors must pay for.
    """
    south = [3, 5, 6.5, 7, 7, 7, 6.5, 5, 3, pinch, pinch, 3, 5.5]
    collar = [sigma_width + 0.02 * abs(k - 6) for k in range(13)]
    north = [6, 7, 7, 7, 7, 6.5, 6, 5, 4, 3]
    widths = south + collar + north
    m = int(ring_size)
    dz = [max(0.02, abs(a - b) / m) for a, b in zip(widths[:-1], widths[1:])]
    first = len(south)
    for k in range(first, first + len(collar) - 1):
        dz[k] = collar_spacing
    for k in list(range(8)) + list(range(first + len(collar), len(widths) - 1)):
        dz[k] = max(dz[k], 0.3)
    return build_ring_metric(widths, dz, m, first + 6, (first, first + len(collar) - 1))
