"""Banded product neighbourhoods of a separating cycle.

A :class:`Collar` is an ordered stack of vertex rings ``ring_0, ..., ring_N``
joined by product strips (each quad between consecutive rings split by one
diagonal).  ``ring_0`` and ``ring_N`` are the boundary cycles, and the ring at
``sigma_index`` is the cycle the collar is built around.

A :class:`SideCollar` is the piece ``Gamma x [0, eps]`` grown inward from one of
the two boundary rings; metric surgery acts on side collars only.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InputError, StructuralError
from .geometry import Cycle, Region, TriangulatedSurface


@dataclass(frozen=True)
class Strip:
    """Edge/face ids of the product strip between two consecutive rings.

    Index ``i`` runs over the fibre edges ``(ring[i], ring[i + 1])``.
    ``vertical[i]`` joins ``lower[i]`` to ``upper[i]``; ``diagonal[i]`` splits
    quad ``i``.
    """

    fibre_lower: np.ndarray
    fibre_upper: np.ndarray
    vertical: np.ndarray
    diagonal: np.ndarray
    faces: np.ndarray


@dataclass(frozen=True, eq=False)
class Collar:
    rings: tuple[tuple[int, ...], ...]
    sigma_index: int

    def __post_init__(self):
        rings = tuple(tuple(int(v) for v in r) for r in self.rings)
        object.__setattr__(self, "rings", rings)
        if len(rings) < 3:
            raise StructuralError("a collar needs at least three rings")
        if not 0 < self.sigma_index < len(rings) - 1:
            raise StructuralError("sigma ring must lie strictly between the boundary rings")
        m = len(rings[0])
        if m < 3 or any(len(r) != m for r in rings):
            raise StructuralError("rings must all have the same size (>= 3)")
        flat = [v for r in rings for v in r]
        if len(set(flat)) != len(flat):
            raise StructuralError("rings are not pairwise disjoint")

    @property
    def ring_size(self) -> int:
        return len(self.rings[0])

    @property
    def n_rings(self) -> int:
        return len(self.rings)

    def ring_cycle(self, j: int) -> Cycle:
        return Cycle.from_loop(self.rings[j])

    @property
    def sigma(self) -> Cycle:
        return self.ring_cycle(self.sigma_index)

    @property
    def boundary(self) -> tuple[Cycle, Cycle]:
        return self.ring_cycle(0), self.ring_cycle(self.n_rings - 1)

    def fibre_edges(self, surface: TriangulatedSurface, j: int) -> np.ndarray:
        r = self.rings[j]
        m = len(r)
        return surface.edge_ids([(r[i], r[(i + 1) % m]) for i in range(m)])

    def strip(self, surface: TriangulatedSurface, j: int) -> Strip:
        """Product structure of the strip between rings j and j+1.

        Raises StructuralError when the faces do not form a product band.
        """
        return self._strips(surface)[j]

    def strips(self, surface: TriangulatedSurface) -> list[Strip]:
        return self._strips(surface)

    def _strips(self, surface: TriangulatedSurface) -> list[Strip]:
        cache = self.__dict__.setdefault("_strip_cache", {})
        key = id(surface.topology)
        if key not in cache:
            cache[key] = [self._build_strip(surface, j) for j in range(self.n_rings - 1)]
        return cache[key]

    def _build_strip(self, surface: TriangulatedSurface, j: int) -> Strip:
        face_ids = {frozenset(f): k for k, f in enumerate(surface.faces.tolist())}
        lo, hi = self.rings[j], self.rings[j + 1]
        m = len(lo)
        vert, diag, faces = [], [], []
        try:
            for i in range(m):
                a0, a1, b0, b1 = lo[i], lo[(i + 1) % m], hi[i], hi[(i + 1) % m]
                vert.append(surface.edge_id(a0, b0))
                if (k1 := face_ids.get(frozenset((a0, a1, b1)))) is not None and \
                        (k2 := face_ids.get(frozenset((a0, b1, b0)))) is not None:
                    diag.append(surface.edge_id(a0, b1))
                elif (k1 := face_ids.get(frozenset((a0, a1, b0)))) is not None and \
                        (k2 := face_ids.get(frozenset((a1, b1, b0)))) is not None:
                    diag.append(surface.edge_id(a1, b0))
                else:
                    raise StructuralError(f"quad {i} of strip {j} is not split into two faces")
                faces.extend((k1, k2))
        except InputError as exc:
            raise StructuralError(f"strip {j} is not a product band: {exc}") from exc
        return Strip(self.fibre_edges(surface, j), self.fibre_edges(surface, j + 1),
                     np.array(vert), np.array(diag), np.array(faces))

    def validate(self, surface: TriangulatedSurface) -> None:
        """Check the product structure on ``surface``."""
        if max(max(r) for r in self.rings) >= surface.n_vertices:
            raise StructuralError("ring vertex outside the mesh")
        self._strips(surface)

    def region_between(self, surface: TriangulatedSurface, j0: int, j1: int) -> Region:
        """Faces of the strips between rings j0 < j1."""
        s = self._strips(surface)
        return Region.of(np.concatenate([s[j].faces for j in range(j0, j1)]).tolist())

    def side(self, which: int, band_count: int) -> "SideCollar":
        """The side collar of ``band_count`` rings grown from boundary ring
        ``0`` (``which = -1``) or ``N`` (``which = +1``).

        The innermost ring may coincide with sigma (the cutoff vanishes there)
        but may not pass it.
        """
        if band_count < 2:
            raise InputError("a side collar needs at least two rings")
        n = self.n_rings
        if which == -1:
            idx = tuple(range(band_count))
            if idx[-1] > self.sigma_index:
                raise StructuralError("side collar would cross sigma")
        elif which == +1:
            idx = tuple(range(n - 1, n - 1 - band_count, -1))
            if idx[-1] < self.sigma_index:
                raise StructuralError("side collar would cross sigma")
        else:
            raise InputError("side must be -1 or +1")
        return SideCollar(self, which, idx)


@dataclass(frozen=True, eq=False)
class SideCollar:
    collar: Collar
    which: int
    ring_indices: tuple[int, ...]

    @property
    def n_rings(self) -> int:
        return len(self.ring_indices)

    @property
    def n_strips(self) -> int:
        return len(self.ring_indices) - 1

    @cached_property
    def ring_fractions(self) -> np.ndarray:
        """Collar coordinate t / eps of each ring (uniform in the ring index)."""
        return np.arange(self.n_rings) / self.n_strips

    @cached_property
    def strip_fractions(self) -> np.ndarray:
        return (np.arange(self.n_strips) + 0.5) / self.n_strips

    def strip_index(self, s: int) -> int:
        """Collar strip index of side strip ``s`` (counted from Gamma)."""
        a, b = self.ring_indices[s], self.ring_indices[s + 1]
        return min(a, b)

    def strips(self, surface: TriangulatedSurface) -> list[Strip]:
        all_strips = self.collar.strips(surface)
        return [all_strips[self.strip_index(s)] for s in range(self.n_strips)]

    def fibre_edges(self, surface: TriangulatedSurface) -> np.ndarray:
        """(n_rings, ring_size) fibre edge ids, row 0 on Gamma."""
        return np.stack([self.collar.fibre_edges(surface, j) for j in self.ring_indices])

    def width(self, surface: TriangulatedSurface) -> float:
        """eps: sum over strips of the mean longitudinal edge length."""
        return float(sum(surface.lengths[s.vertical].mean() for s in self.strips(surface)))

    def faces_of_strips(self, surface: TriangulatedSurface, which) -> Region:
        strips = self.strips(surface)
        ids = [strips[s].faces for s in which]
        return Region.of(np.concatenate(ids).tolist()) if ids else Region()
