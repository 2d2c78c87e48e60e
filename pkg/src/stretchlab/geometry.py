"""Manifold models, regions, cycles and the measurement primitives.

Two models live here:

* :class:`TriangulatedSurface` -- a closed triangulated 2-manifold carrying an
  abstract metric given by per-edge lengths.
* :class:`WarpedInterval` -- the warped product ``dt^2 + f(t)^2 g_{S^n}`` sampled
  on a uniform grid, used for symmetric checks in any fibre dimension.

Everything is immutable after construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.special import gamma

from .errors import InputError, InvalidMetricError, StructuralError

Edge = tuple[int, int]


def _edge_key(i: int, j: int) -> Edge:
    i, j = int(i), int(j)
    return (i, j) if i < j else (j, i)


def heron_areas(a, b, c):
    """Triangle areas from side lengths (Kahan's stable form of Heron).

    Raises InvalidMetricError if any triple violates the strict triangle
    inequality.
    """
    s = np.sort(np.stack([np.asarray(a, float), np.asarray(b, float),
                          np.asarray(c, float)], axis=-1), axis=-1)[..., ::-1]
    x, y, z = s[..., 0], s[..., 1], s[..., 2]
    if np.any(x >= y + z) or np.any(z <= 0):
        raise InvalidMetricError("triangle inequality violated")
    prod = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z))
    return 0.25 * np.sqrt(prod)


# --------------------------------------------------------------------------
# regions and cycles
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """A set of faces in canonical (sorted, unique) form."""

    faces: tuple[int, ...] = ()

    @classmethod
    def of(cls, faces: Iterable[int]) -> "Region":
        return cls(tuple(sorted({int(f) for f in faces})))

    def __len__(self) -> int:
        return len(self.faces)

    def __contains__(self, f) -> bool:
        return int(f) in set(self.faces)

    def mask(self, n_faces: int) -> np.ndarray:
        m = np.zeros(n_faces, dtype=bool)
        if self.faces:
            idx = np.asarray(self.faces)
            if idx.min() < 0 or idx.max() >= n_faces:
                raise InputError(f"face index out of range 0..{n_faces - 1}")
            m[idx] = True
        return m

    def complement(self, n_faces: int) -> "Region":
        return Region(tuple(np.flatnonzero(~self.mask(n_faces)).tolist()))

    def union(self, other: "Region") -> "Region":
        return Region.of(self.faces + other.faces)

    def sort_key(self):
        return self.faces


@dataclass(frozen=True)
class IntervalRegion:
    """Finite union of closed t-intervals on a warped interval."""

    intervals: tuple[tuple[float, float], ...] = ()

    @classmethod
    def of(cls, intervals: Iterable[Sequence[float]]) -> "IntervalRegion":
        ivs = sorted((float(a), float(b)) for a, b in intervals)
        merged: list[list[float]] = []
        for a, b in ivs:
            if b < a:
                raise InputError(f"empty interval ({a}, {b})")
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged))


@dataclass(frozen=True)
class Cycle:
    """One or more closed edge loops, stored as sorted vertex pairs."""

    edges: tuple[Edge, ...] = ()

    @classmethod
    def of(cls, edges: Iterable[Sequence[int]]) -> "Cycle":
        cyc = cls(tuple(sorted({_edge_key(a, b) for a, b in edges})))
        deg: dict[int, int] = {}
        for a, b in cyc.edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        odd = [v for v, d in deg.items() if d % 2]
        if odd:
            raise StructuralError(f"cycle not closed at vertices {odd[:5]}")
        return cyc

    @classmethod
    def from_loop(cls, vertices: Sequence[int]) -> "Cycle":
        n = len(vertices)
        return cls.of((vertices[k], vertices[(k + 1) % n]) for k in range(n))

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for e in self.edges for v in e}))


@dataclass(frozen=True)
class LevelSet:
    """The fibre ``{t = t}`` of a warped interval."""

    t: float


# --------------------------------------------------------------------------
# triangulated surfaces
# --------------------------------------------------------------------------

class _Topology:
    """Combinatorial data shared by all metrics on one face complex."""

    def __init__(self, faces: np.ndarray):
        faces = np.asarray(faces, dtype=np.int64)
        if faces.ndim != 2 or faces.shape[1] != 3 or len(faces) == 0:
            raise StructuralError("faces must be a non-empty (F, 3) array")
        if np.any(faces < 0):
            raise StructuralError("negative vertex index")
        if np.any((faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2])
                  | (faces[:, 0] == faces[:, 2])):
            raise StructuralError("degenerate face with repeated vertex")
        self.faces = faces
        self.n_faces = len(faces)
        self.n_vertices = int(faces.max()) + 1

        half = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
        half.sort(axis=1)
        edges, inverse = np.unique(half, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        self.edges = edges
        self.n_edges = len(edges)
        # face_edges[f, k] is the edge opposite vertex faces[f, (k + 2) % 3]
        self.face_edges = inverse.reshape(3, -1).T.copy()

        counts = np.bincount(inverse, minlength=self.n_edges)
        if np.any(counts != 2):
            bad = edges[counts != 2][:5].tolist()
            raise StructuralError(f"not a closed manifold: edges {bad} do not have "
                                  "exactly two incident faces")
        order = np.argsort(inverse, kind="stable")
        owners = np.tile(np.arange(self.n_faces), 3)[order]
        self.edge_faces = owners.reshape(-1, 2)

        used = np.zeros(self.n_vertices, dtype=bool)
        used[faces.ravel()] = True
        if not used.all():
            raise StructuralError("vertex indices are not contiguous")
        self._check_vertex_links()

        ncomp, _ = connected_components(self.dual_graph, directed=False)
        if ncomp != 1:
            raise StructuralError(f"mesh is disconnected ({ncomp} components)")
        self.edge_index = {(int(a), int(b)): k for k, (a, b) in enumerate(edges)}

    def _check_vertex_links(self) -> None:
        link: dict[int, list[tuple[int, int]]] = {}
        for a, b, c in self.faces.tolist():
            link.setdefault(a, []).append((b, c))
            link.setdefault(b, []).append((c, a))
            link.setdefault(c, []).append((a, b))
        for v, segs in link.items():
            adj: dict[int, list[int]] = {}
            for x, y in segs:
                adj.setdefault(x, []).append(y)
                adj.setdefault(y, []).append(x)
            if any(len(n) != 2 for n in adj.values()):
                raise StructuralError(f"vertex {v} link is not a cycle")
            start = next(iter(adj))
            seen, prev, cur = {start}, None, start
            while True:
                nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
                if nxt == start:
                    break
                seen.add(nxt)
                prev, cur = cur, nxt
            if len(seen) != len(adj):
                raise StructuralError(f"vertex {v} link has several cycles")

    @cached_property
    def dual_graph(self) -> sp.csr_matrix:
        f0, f1 = self.edge_faces[:, 0], self.edge_faces[:, 1]
        n = self.n_faces
        data = np.ones(2 * len(f0))
        return sp.csr_matrix((data, (np.r_[f0, f1], np.r_[f1, f0])), shape=(n, n))


@dataclass(frozen=True, eq=False)
class TriangulatedSurface:
    """Closed connected triangulated surface with per-edge lengths.

    Construct through :meth:`from_lengths` or :meth:`from_coordinates`;
    ``lengths[k]`` belongs to ``edges[k]`` (sorted vertex pairs, lexicographic).
    """

    topology: _Topology = field(repr=False)
    lengths: np.ndarray = field(repr=False)
    coordinates: np.ndarray | None = field(default=None, repr=False)
    fields: Mapping[str, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        lengths = np.array(self.lengths, dtype=float)
        if lengths.shape != (self.topology.n_edges,):
            raise InputError("lengths must have one entry per edge")
        if not np.all(np.isfinite(lengths)) or np.any(lengths <= 0):
            raise InvalidMetricError("edge lengths must be finite and positive")
        lengths.setflags(write=False)
        object.__setattr__(self, "lengths", lengths)
        # validates the triangle inequality on every face
        areas = heron_areas(*lengths[self.topology.face_edges].T)
        areas.setflags(write=False)
        object.__setattr__(self, "_areas", areas)

    # construction -------------------------------------------------------
    @classmethod
    def from_lengths(cls, faces, edge_lengths, coordinates=None) -> "TriangulatedSurface":
        """``edge_lengths`` is a mapping ``(i, j) -> length`` or an array in
        canonical edge order."""
        topo = _Topology(faces)
        if isinstance(edge_lengths, Mapping):
            lengths = np.empty(topo.n_edges)
            seen = np.zeros(topo.n_edges, dtype=bool)
            for (i, j), val in edge_lengths.items():
                k = topo.edge_index.get(_edge_key(i, j))
                if k is None:
                    raise InputError(f"({i}, {j}) is not an edge of the mesh")
                lengths[k] = val
                seen[k] = True
            if not seen.all():
                missing = topo.edges[~seen][:5].tolist()
                raise InputError(f"missing lengths for edges {missing}")
        else:
            lengths = np.asarray(edge_lengths, dtype=float)
        coords = None if coordinates is None else np.asarray(coordinates, float)
        return cls(topo, lengths, coords)

    @classmethod
    def from_coordinates(cls, vertices, faces) -> "TriangulatedSurface":
        topo = _Topology(faces)
        verts = np.asarray(vertices, dtype=float)
        if len(verts) != topo.n_vertices:
            raise InputError("vertex array does not match face indices")
        e = topo.edges
        lengths = np.linalg.norm(verts[e[:, 0]] - verts[e[:, 1]], axis=1)
        return cls(topo, lengths, verts)

    def with_lengths(self, lengths) -> "TriangulatedSurface":
        """Same complex, new metric (coordinates are dropped)."""
        return TriangulatedSurface(self.topology, lengths, None, dict(self.fields))

    def with_fields(self, **fields) -> "TriangulatedSurface":
        merged = dict(self.fields)
        merged.update({k: np.asarray(v, float) for k, v in fields.items()})
        return TriangulatedSurface(self.topology, self.lengths, self.coordinates, merged)

    # combinatorics ------------------------------------------------------
    @property
    def faces(self) -> np.ndarray:
        return self.topology.faces

    @property
    def edges(self) -> np.ndarray:
        return self.topology.edges

    @property
    def n_faces(self) -> int:
        return self.topology.n_faces

    @property
    def n_edges(self) -> int:
        return self.topology.n_edges

    @property
    def n_vertices(self) -> int:
        return self.topology.n_vertices

    @property
    def face_edges(self) -> np.ndarray:
        return self.topology.face_edges

    @property
    def edge_faces(self) -> np.ndarray:
        return self.topology.edge_faces

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def edge_id(self, i: int, j: int) -> int:
        k = self.topology.edge_index.get(_edge_key(i, j))
        if k is None:
            raise InputError(f"({i}, {j}) is not an edge of the mesh")
        return k

    def edge_ids(self, pairs: Iterable[Sequence[int]]) -> np.ndarray:
        return np.array([self.edge_id(a, b) for a, b in pairs], dtype=np.int64)

    def length(self, i: int, j: int) -> float:
        return float(self.lengths[self.edge_id(i, j)])

    # metric quantities --------------------------------------------------
    @property
    def face_areas(self) -> np.ndarray:
        return self._areas  # type: ignore[attr-defined]

    @cached_property
    def total_area(self) -> float:
        return float(self.face_areas.sum())

    @cached_property
    def vertex_graph(self) -> sp.csr_matrix:
        e, w = self.edges, self.lengths
        n = self.n_vertices
        return sp.csr_matrix((np.r_[w, w], (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])),
                             shape=(n, n))

    def distances_from(self, sources, limit: float = np.inf) -> np.ndarray:
        """Edge-weighted graph distances from each source vertex."""
        return dijkstra(self.vertex_graph, directed=False, indices=sources, limit=limit)

    def region_mask(self, region: Region) -> np.ndarray:
        return region.mask(self.n_faces)

    def cut_edges(self, region: Region) -> np.ndarray:
        m = self.region_mask(region)
        ef = self.edge_faces
        return np.flatnonzero(m[ef[:, 0]] != m[ef[:, 1]])


# --------------------------------------------------------------------------
# measurements on surfaces
# --------------------------------------------------------------------------

def perimeter(surface: TriangulatedSurface, region: Region) -> float:
    """Total length of the edges with exactly one incident face in ``region``."""
    cut = surface.cut_edges(region)
    return float(np.sum(surface.lengths[cut]))


def volume(surface: TriangulatedSurface, region: Region) -> float:
    """Area of the faces in ``region``."""
    m = surface.region_mask(region)
    return float(np.sum(surface.face_areas[m]))


def cycle_length(surface: TriangulatedSurface, cycle: Cycle) -> float:
    return float(np.sum(surface.lengths[surface.edge_ids(cycle.edges)]))


def region_boundary(surface: TriangulatedSurface, region: Region) -> Cycle:
    e = surface.edges[surface.cut_edges(region)]
    return Cycle(tuple((int(a), int(b)) for a, b in e))


@dataclass(frozen=True)
class BoundaryComponent:
    cycle: Cycle
    length: float
    diameter: float


def boundary_components(surface: TriangulatedSurface, region: Region) -> list[BoundaryComponent]:
    """Split the boundary of ``region`` into connected cycles.

    The diameter of a component is the largest graph distance, measured in the
    whole surface, between two of its vertices.  Components are ordered by
    their smallest edge.
    """
    cut = surface.cut_edges(region)
    if len(cut) == 0:
        return []
    e = surface.edges[cut]
    verts, local = np.unique(e, return_inverse=True)
    local = local.reshape(-1, 2)
    n = len(verts)
    g = sp.csr_matrix((np.ones(len(e)), (local[:, 0], local[:, 1])), shape=(n, n))
    ncomp, labels = connected_components(g, directed=False)
    edge_labels = labels[local[:, 0]]
    comps = []
    for c in range(ncomp):
        ids = cut[edge_labels == c]
        cyc = Cycle(tuple(sorted((int(a), int(b)) for a, b in surface.edges[ids])))
        cverts = verts[labels == c]
        d = surface.distances_from(cverts)
        diam = float(d[:, cverts].max()) if len(cverts) > 1 else 0.0
        comps.append(BoundaryComponent(cyc, float(np.sum(surface.lengths[ids])), diam))
    comps.sort(key=lambda b: b.cycle.edges[0])
    return comps


def separates(surface: TriangulatedSurface, cycle: Cycle) -> tuple[bool, Region, Region]:
    """Does removing ``cycle`` split the face graph into exactly two pieces?

    Returns the two sides, the one holding the smallest face index first, or
    ``(False, Region(), Region())``.
    """
    ids = surface.edge_ids(cycle.edges)
    keep = np.ones(surface.n_edges, dtype=bool)
    keep[ids] = False
    ef = surface.edge_faces[keep]
    n = surface.n_faces
    g = sp.csr_matrix((np.ones(len(ef)), (ef[:, 0], ef[:, 1])), shape=(n, n))
    ncomp, labels = connected_components(g, directed=False)
    if ncomp != 2:
        return False, Region(), Region()
    a = Region(tuple(np.flatnonzero(labels == labels[0]).tolist()))
    b = Region(tuple(np.flatnonzero(labels != labels[0]).tolist()))
    return True, a, b


# --------------------------------------------------------------------------
# warped intervals
# --------------------------------------------------------------------------

def sphere_area(n: int) -> float:
    """Area of the unit n-sphere S^n."""
    return 2.0 * math.pi ** ((n + 1) / 2) / gamma((n + 1) / 2)


@dataclass(frozen=True)
class WarpProfile:
    """Analytic warp with its first two derivatives."""

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    ddf: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class WarpedInterval:
    """Metric ``rho(t) dt^2 + f(t)^2 g_{S^n}`` on ``[start, start + length]``.

    ``warp`` holds f on a uniform grid, ``longitudinal`` holds rho (all ones
    before any stretching).  ``profile`` optionally carries the analytic warp
    used for curvature formulas.
    """

    length: float
    fibre_dim: int
    warp: np.ndarray
    start: float = 0.0
    longitudinal: np.ndarray | None = None
    caps: tuple[bool, bool] = (False, False)
    profile: WarpProfile | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.length > 0:
            raise InputError("length must be positive")
        if self.fibre_dim < 1:
            raise InputError("fibre dimension must be >= 1")
        w = np.array(self.warp, dtype=float)
        if w.ndim != 1 or len(w) < 2:
            raise InputError("warp needs at least two samples")
        interior = w[1:-1]
        if np.any(interior <= 0):
            raise InvalidMetricError("warp must be positive on the open interval")
        for end, capped in zip((w[0], w[-1]), self.caps):
            if capped and abs(end) > 1e-12:
                raise InvalidMetricError("capped end must have f -> 0")
            if not capped and end <= 0:
                raise InvalidMetricError("boundary fibre must have positive size")
        w.setflags(write=False)
        object.__setattr__(self, "warp", w)
        rho = np.ones_like(w) if self.longitudinal is None else np.array(self.longitudinal, float)
        if rho.shape != w.shape or np.any(rho <= 0):
            raise InvalidMetricError("longitudinal factor must be positive, one per sample")
        rho.setflags(write=False)
        object.__setattr__(self, "longitudinal", rho)

    @classmethod
    def from_function(cls, f, df, ddf, length: float, fibre_dim: int = 1,
                      num: int = 2001, start: float = 0.0,
                      caps: tuple[bool, bool] = (False, False)) -> "WarpedInterval":
        t = np.linspace(start, start + length, num)
        w = np.asarray(f(t), dtype=float)
        for k, capped in enumerate(caps):
            if capped:
                w[-k] = 0.0
        return cls(length, fibre_dim, w, start, None, caps, WarpProfile(f, df, ddf))

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.start + self.length, len(self.warp))

    @property
    def spacing(self) -> float:
        return self.length / (len(self.warp) - 1)

    @property
    def end(self) -> float:
        return self.start + self.length

    def warp_at(self, t) -> np.ndarray:
        if self.profile is not None:
            return np.asarray(self.profile.f(np.asarray(t, float)), float)
        return np.interp(t, self.grid, self.warp)

    def warp_derivatives(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """f, f', f'' at ``t`` (analytic when available, else finite differences)."""
        t = np.asarray(t, float)
        if self.profile is not None:
            p = self.profile
            return (np.asarray(p.f(t), float), np.asarray(p.df(t), float),
                    np.asarray(p.ddf(t), float))
        g = self.grid
        d1 = np.gradient(self.warp, g, edge_order=2)
        d2 = np.gradient(d1, g, edge_order=2)
        return np.interp(t, g, self.warp), np.interp(t, g, d1), np.interp(t, g, d2)

    def with_metric(self, warp=None, longitudinal=None) -> "WarpedInterval":
        return WarpedInterval(self.length, self.fibre_dim,
                              self.warp if warp is None else warp, self.start,
                              self.longitudinal if longitudinal is None else longitudinal,
                              self.caps, self.profile if warp is None else None)

    def _check(self, c) -> None:
        if not (self.start - 1e-12 <= c <= self.end + 1e-12):
            raise InputError(f"parameter {c} outside [{self.start}, {self.end}]")

    def _clip(self, a: float, b: float, values: np.ndarray):
        """Grid nodes inside [a, b] plus interpolated end points."""
        g = self.grid
        inside = (g > a) & (g < b)
        t = np.r_[a, g[inside], b]
        v = np.r_[np.interp(a, g, values), values[inside], np.interp(b, g, values)]
        return t, v


@dataclass(frozen=True)
class WarpedMeasurements:
    area_lower: float
    area_upper: float
    volume: float
    distance: float


def warped_measurements(w: WarpedInterval, c1: float, c2: float) -> WarpedMeasurements:
    """Fibre areas at ``c1`` and ``c2``, the volume of the slab between them and
    the distance between the two level sets (trapezoid rule)."""
    w._check(c1)
    w._check(c2)
    if c2 < c1:
        raise InputError("need c1 <= c2")
    n = w.fibre_dim
    omega = sphere_area(n)
    a1 = omega * float(np.interp(c1, w.grid, w.warp)) ** n
    a2 = omega * float(np.interp(c2, w.grid, w.warp)) ** n
    if c1 == c2:
        return WarpedMeasurements(a1, a2, 0.0, 0.0)
    t, f = w._clip(c1, c2, w.warp)
    _, rho = w._clip(c1, c2, w.longitudinal)
    root = np.sqrt(rho)
    vol = omega * float(np.trapezoid(f ** n * root, t))
    dist = float(np.trapezoid(root, t))
    return WarpedMeasurements(a1, a2, vol, dist)


def warped_volume(w: WarpedInterval, region: IntervalRegion) -> float:
    return sum(warped_measurements(w, a, b).volume for a, b in region.intervals)
