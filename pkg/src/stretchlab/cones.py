"""Stability of regular minimal hypercones through the spectrum of their link.

For a cone ``C`` in ``R^{n+1}`` with link ``Sigma`` in ``S^n`` let
``mu_1 < mu_2 <= ...`` be the eigenvalues of ``-(Delta_Sigma + |II|^2)``.
The cone is stable iff ``mu_1 >= -(n-2)^2/4`` and strictly stable iff the
inequality is strict.

Product links ``S^p(r1) x S^q(r2)`` with ``r1^2 = p/(p+q)`` and
``r2^2 = q/(p+q)`` are minimal in ``S^{p+q+1}`` and have ``|II|^2 = p + q``;
their spectrum is known in closed form from spherical harmonics.  Meshed
links are handled with linear finite elements.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .conformal import cotan_matrices
from .errors import InputError, StretchLabError
from .geometry import TriangulatedSurface


@dataclass(frozen=True)
class ProductOfSpheres:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise InputError("sphere dimensions must be >= 1")

    @property
    def radii(self) -> tuple[float, float]:
        s = self.p + self.q
        return math.sqrt(self.p / s), math.sqrt(self.q / s)

    @property
    def dim(self) -> int:
        return self.p + self.q


@dataclass(frozen=True, eq=False)
class MeshedLink:
    """A 2-dimensional link given as a closed mesh with a ``|II|^2`` vertex field."""

    surface: TriangulatedSurface
    ii_norm_sq: np.ndarray

    def __post_init__(self):
        v = np.broadcast_to(np.asarray(self.ii_norm_sq, float), (self.surface.n_vertices,))
        object.__setattr__(self, "ii_norm_sq", np.array(v))

    @property
    def dim(self) -> int:
        return 2

    @classmethod
    def from_mesh(cls, vertices, faces, ii_norm_sq) -> "MeshedLink":
        try:
            surf = TriangulatedSurface.from_coordinates(vertices, faces)
        except StretchLabError as exc:
            raise InputError(f"link mesh rejected: {exc}") from exc
        return cls(surf, ii_norm_sq)


@dataclass(frozen=True)
class MinimalCone:
    ambient_dim: int
    link: ProductOfSpheres | MeshedLink
    strictly_minimising: bool | None = None
    citation: str | None = None

    def __post_init__(self):
        if self.ambient_dim < 3:
            raise InputError("ambient dimension must be >= 3")
        if self.link.dim + 2 != self.ambient_dim:
            raise InputError(f"a {self.link.dim}-dimensional link does not sit in "
                             f"S^{self.ambient_dim - 1}")
        if self.strictly_minimising is not None and not self.citation:
            raise InputError("a strictly-minimising flag needs a citation")

    @property
    def n(self) -> int:
        return self.ambient_dim - 1

    @classmethod
    def product(cls, p: int, q: int, **kw) -> "MinimalCone":
        return cls(p + q + 2, ProductOfSpheres(p, q), **kw)


@dataclass(frozen=True)
class LinkSpectrum:
    """Lowest eigenvalues (repeated by multiplicity).

    ``groups`` lists ``(value, multiplicity, label)`` for distinct values; the
    label holds the harmonic degrees ``(k, m)`` for product links.
    """

    eigenvalues: np.ndarray
    link_dim: int
    groups: tuple = field(default=())

    @property
    def mu1(self) -> float:
        return float(self.eigenvalues[0])


def harmonic_multiplicity(k: int, p: int) -> int:
    """Dimension of degree-k spherical harmonics on ``S^p``."""
    return comb(k + p, p) - (comb(k + p - 2, p) if k >= 2 else 0)


def product_link_spectrum(p: int, q: int, modes: int) -> LinkSpectrum:
    """Closed-form spectrum of ``-(Delta + |II|^2)`` on the minimal ``S^p x S^q``.

    Values are ``k(k+p-1)/r1^2 + m(m+q-1)/r2^2 - (p+q)``.  Both terms grow with
    their index, so once every pair below the smallest excluded value
    ``min(lam(K+1, 0), lam(0, M+1))`` is listed, the list is complete up to it.
    """
    if modes < 1:
        raise InputError("modes must be >= 1")
    s = p + q

    def lam(k, m):
        # 1/r1^2 = (p+q)/p and 1/r2^2 = (p+q)/q, evaluated exactly
        return float(Fraction(k * (k + p - 1) * s, p) + Fraction(m * (m + q - 1) * s, q) - s)

    K = M = 1
    while True:
        bound = min(lam(K + 1, 0), lam(0, M + 1))
        entries = [(lam(k, m), k, m) for k in range(K + 1) for m in range(M + 1)
                   if lam(k, m) < bound]
        count = sum(harmonic_multiplicity(k, p) * harmonic_multiplicity(m, q)
                    for _, k, m in entries)
        if count >= modes:
            break
        K += 1
        M += 1
    entries.sort()
    vals, groups = [], {}
    for v, k, m in entries:
        mult = harmonic_multiplicity(k, p) * harmonic_multiplicity(m, q)
        vals.extend([v] * mult)
        key = round(v, 12)
        g = groups.setdefault(key, [v, 0, []])
        g[1] += mult
        g[2].append((k, m))
    ordered = tuple((g[0], g[1], tuple(g[2])) for _, g in sorted(groups.items()))
    return LinkSpectrum(np.array(vals[:modes]), s, ordered)


def _consistent_mass(surface: TriangulatedSurface, weight=None) -> sp.csr_matrix:
    """Mass matrix ``int w phi_i phi_j`` with ``w`` linear (or 1)."""
    F = surface.faces
    A = surface.face_areas
    rows, cols, vals = [], [], []
    if weight is None:
        for a in range(3):
            for b in range(3):
                rows.append(F[:, a])
                cols.append(F[:, b])
                vals.append(A * (2.0 if a == b else 1.0) / 12.0)
    else:
        w = np.asarray(weight, float)[F]
        tot = w.sum(axis=1)
        for a in range(3):
            for b in range(3):
                rows.append(F[:, a])
                cols.append(F[:, b])
                if a == b:
                    # int phi_a^2 w = A (3 w_a + w_b + w_c) / 30
                    vals.append(A * (2.0 * w[:, a] + tot) / 30.0)
                else:
                    c = 3 - a - b
                    # int phi_a phi_b w = A (2 w_a + 2 w_b + w_c) / 60
                    vals.append(A * (2.0 * w[:, a] + 2.0 * w[:, b] + w[:, c]) / 60.0)
    n = surface.n_vertices
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(n, n))


def meshed_link_spectrum(link: MeshedLink, modes: int, *, dense_limit: int = 600) -> LinkSpectrum:
    """Lowest eigenvalues of ``S - P`` against ``M`` (linear elements)."""
    surf = link.surface
    if not 1 <= modes < surf.n_vertices:
        raise InputError("modes must be between 1 and the number of vertices - 1")
    S, _ = cotan_matrices(surf)
    Mm = _consistent_mass(surf)
    P = _consistent_mass(surf, link.ii_norm_sq)
    A = (S - P).tocsc()
    if surf.n_vertices <= dense_limit:
        vals = sla.eigh(A.toarray(), Mm.toarray(), eigvals_only=True,
                        subset_by_index=[0, modes - 1])
    else:
        shift = -float(np.max(link.ii_norm_sq)) - 1.0
        vals = eigsh(A, k=modes, M=Mm.tocsc(), sigma=shift, which="LM",
                     return_eigenvectors=False)
    vals = np.sort(vals)
    return LinkSpectrum(vals, 2, ())


@dataclass(frozen=True)
class StabilityVerdict:
    n: int
    threshold: float
    mu1: float
    classification: str
    radial_exponents: tuple

    @property
    def strictly_stable(self) -> bool:
        return self.classification == "strictly stable"


def stability_threshold(n: int) -> float:
    return -((n - 2) ** 2) / 4.0


def radial_exponents(n: int, mu: float) -> tuple[float, float]:
    """``gamma_pm = -(n-2)/2 +- sqrt((n-2)^2/4 + mu)`` (requires ``mu >= threshold``)."""
    disc = (n - 2) ** 2 / 4.0 + mu
    if disc < 0:
        raise InputError("mu below the stability threshold has complex exponents")
    r = math.sqrt(disc)
    return -(n - 2) / 2.0 - r, -(n - 2) / 2.0 + r


def classify_stability(cone: MinimalCone, spectrum: LinkSpectrum,
                       leading: int = 3) -> StabilityVerdict:
    """Compare ``mu_1`` with ``-(n-2)^2/4`` and attach radial exponents for the
    first ``leading`` distinct eigenvalues at or above the threshold."""
    n = cone.n
    if spectrum.link_dim != n - 1:
        raise InputError(f"spectrum of a {spectrum.link_dim}-dimensional link given for n = {n}")
    thr = stability_threshold(n)
    mu1 = spectrum.mu1
    if mu1 > thr:
        cls = "strictly stable"
    elif mu1 == thr:
        cls = "stable"
    else:
        cls = "unstable"
    distinct = [g[0] for g in spectrum.groups] or sorted(set(spectrum.eigenvalues.tolist()))
    exps = tuple((mu, *radial_exponents(n, mu)) for mu in distinct[:leading] if mu >= thr)
    return StabilityVerdict(n, thr, mu1, cls, exps)


def closed_form_law(p: int, q: int) -> bool:
    """Closed-form strict stability of the product cone: ``4(p+q) < (p+q-1)^2``."""
    return 4 * (p + q) < (p + q - 1) ** 2


def cone_from_dict(d: dict) -> MinimalCone:
    """Parse ``{"p": 3, "q": 3}`` or
    ``{"ambient_dim": 8, "link": {"p": 3, "q": 3}, "strictly_minimising": true,
    "citation": "..."}``."""
    link = d.get("link", d)
    try:
        p, q = int(link["p"]), int(link["q"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cone spec needs integer p and q: {d!r}") from exc
    ambient = int(d.get("ambient_dim", p + q + 2))
    return MinimalCone(ambient, ProductOfSpheres(p, q), d.get("strictly_minimising"),
                       d.get("citation"))
