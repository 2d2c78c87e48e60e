"""Volume-constrained perimeter minimisation on triangulated surfaces.

A region is a set of faces; its perimeter is a cut function on the dual graph
and its volume is additive, so ``P(E) - lam * V(E)`` is minimised exactly by
an s-t minimum cut.  On a closed surface that relaxation is trivial for every
``lam`` (the empty set or the whole surface wins), so cuts are anchored: one
face is forced in and another forced out.  A family of anchor pairs that
covers every non-trivial region gives the exact lower convex hull of the
points ``(V(E), P(E))``; a smaller family gives a quick, uncertified hull.

Volumes that are not hull vertices are handled by exchange repair, and small
meshes can be enumerated outright.
"""
from __future__ import annotations

import math
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, maximum_flow, shortest_path

from .errors import InfeasibleVolumeError, InputError, SizeError
from .geometry import (Region, TriangulatedSurface, boundary_components, perimeter,
                       volume)

# --------------------------------------------------------------------------
# records
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IsoPoint:
    volume: float
    perimeter: float
    region: Region
    method: str
    certified_optimal: bool
    lam: float | None = None
    note: str = ""

    def component_count(self, surface: TriangulatedSurface) -> int:
        return len(boundary_components(surface, self.region))


@dataclass(frozen=True)
class SolverSettings:
    """Knobs for :func:`constrained_min_at_volume`.

    ``anchors`` is ``"global"`` (certifying, ``2(F-1)`` cuts per multiplier),
    ``"extremal"`` (a handful of far-apart faces, uncertified) or ``"auto"``
    (global up to ``global_limit`` faces).
    """

    volume_tolerance: float | None = None
    brute_cap: int = 24
    cross_validate: bool = True
    anchors: str = "auto"
    global_limit: int = 64
    extremal_samples: int = 6
    repair_budget: int | None = None
    tie_tol: float = 1e-9
    ball_starts: int = 8
    kicks: int = 30
    seed: int = 0


def default_tolerance(surface: TriangulatedSurface) -> float:
    """Half the smallest face area."""
    return 0.5 * float(surface.face_areas.min())


def _tie(p: float, tie_tol: float) -> float:
    return tie_tol * max(1.0, abs(p))


def _point(surface, mask, method, certified, lam=None, note="") -> IsoPoint:
    region = Region(tuple(np.flatnonzero(mask).tolist()))
    return IsoPoint(volume(surface, region), perimeter(surface, region), region, method,
                    bool(certified), lam, note)


# --------------------------------------------------------------------------
# exhaustive search
# --------------------------------------------------------------------------

def _bits(k: int) -> np.ndarray:
    idx = np.arange(1 << k, dtype=np.int64)
    return ((idx[:, None] >> np.arange(k)) & 1).astype(float)


def brute_force_many(surface: TriangulatedSurface, targets, tolerance: float | None = None,
                     *, cap: int = 24, tie_tol: float = 1e-9) -> list[IsoPoint | None]:
    """Exact minimisers for several target volumes in one enumeration pass.

    Entries are ``None`` where no region lies within ``tolerance`` of the
    target.  Ties (perimeters within ``tie_tol`` relative) go to the
    lexicographically smallest sorted face tuple.
    """
    n = surface.n_faces
    if n > cap:
        raise SizeError(f"{n} faces exceed the exhaustive-search cap of {cap}")
    tol = default_tolerance(surface) if tolerance is None else float(tolerance)
    if tol < 0:
        raise InputError("tolerance must be non-negative")
    targets = np.atleast_1d(np.asarray(targets, float))
    a = n // 2
    b = n - a
    area = surface.face_areas
    ef = surface.edge_faces
    w = surface.lengths
    X, Y = _bits(a), _bits(b)
    Vlo, Vhi = X @ area[:a], Y @ area[a:]
    Plo = np.zeros(len(X))
    Phi = np.zeros(len(Y))
    W = np.zeros((a, b))
    for (f, g), we in zip(ef.tolist(), w):
        f, g = min(f, g), max(f, g)
        if g < a:
            Plo += we * (X[:, f] != X[:, g])
        elif f >= a:
            Phi += we * (Y[:, f - a] != Y[:, g - a])
        else:
            W[f, g - a] += we
    Plo += X @ W.sum(axis=1)
    Phi += Y @ W.sum(axis=0)
    XW = 2.0 * (X @ W)
    best = np.full(len(targets), np.inf)
    cands: list[list[tuple[int, int]]] = [[] for _ in targets]
    chunk = max(1, (1 << 22) // max(1, len(X)))
    for start in range(0, len(Y), chunk):
        sl = slice(start, start + chunk)
        P = Plo[:, None] + Phi[None, sl] - XW @ Y[sl].T
        V = Vlo[:, None] + Vhi[None, sl]
        for t, v in enumerate(targets):
            ok = np.abs(V - v) <= tol
            if not ok.any():
                continue
            Pm = np.where(ok, P, np.inf)
            m = float(Pm.min())
            if m < best[t] - _tie(best[t] if np.isfinite(best[t]) else m, tie_tol):
                best[t] = m
                cands[t] = []
            if m <= best[t] + _tie(best[t], tie_tol):
                best[t] = min(best[t], m)
                lo_i, hi_i = np.nonzero(Pm <= best[t] + _tie(best[t], tie_tol))
                cands[t].extend(zip(lo_i.tolist(), (hi_i + start).tolist()))
    out: list[IsoPoint | None] = []
    for t in range(len(targets)):
        if not cands[t]:
            out.append(None)
            continue
        pts = []
        for lo, hi in cands[t]:
            mask = np.zeros(n, dtype=bool)
            mask[:a] = X[lo].astype(bool)
            mask[a:] = Y[hi].astype(bool)
            pts.append(_point(surface, mask, "brute", True))
        pmin = min(p.perimeter for p in pts)
        pts = [p for p in pts if p.perimeter <= pmin + _tie(pmin, tie_tol)]
        out.append(min(pts, key=lambda p: p.region.faces))
    return out


def brute_force_min(surface: TriangulatedSurface, target_volume: float,
                    volume_tolerance: float | None = None, *, cap: int = 24,
                    tie_tol: float = 1e-9) -> IsoPoint:
    """Exact minimum perimeter among regions within tolerance of the target."""
    (pt,) = brute_force_many(surface, [target_volume], volume_tolerance, cap=cap,
                             tie_tol=tie_tol)
    if pt is None:
        raise InfeasibleVolumeError(f"no region has volume within tolerance of {target_volume}")
    return pt


# --------------------------------------------------------------------------
# anchored minimum cuts
# --------------------------------------------------------------------------

_CAP_TOTAL = float(1 << 30)


class _CutEngine:
    """Solves ``min P(E) - lam V(E)`` with forced faces by integer max-flow.

    Capacities are scaled so that their total stays below ``2**30`` and
    rounded; the returned region is then re-evaluated in floating point.  The
    rounding can cost at most ``err`` in the objective, exposed as
    :meth:`rounding_bound`.
    """

    def __init__(self, surface: TriangulatedSurface):
        self.surface = surface
        ef = surface.edge_faces
        self.f = ef[:, 0]
        self.g = ef[:, 1]
        self.w = surface.lengths
        self.area = surface.face_areas
        self.n = surface.n_faces

    def scale(self, lam: float) -> float:
        total = 2.0 * self.w.sum() + abs(lam) * self.area.sum()
        return _CAP_TOTAL / total

    def rounding_bound(self, lam: float) -> float:
        return (len(self.w) + self.n) / self.scale(lam)

    def objective(self, mask: np.ndarray, lam: float) -> tuple[float, float, float]:
        p = float(self.w[mask[self.f] != mask[self.g]].sum())
        v = float(self.area[mask].sum())
        return p - lam * v, v, p

    def solve(self, lam: float, force_in=(), force_out=()) -> np.ndarray:
        n = self.n
        node = np.arange(n) + 2
        node[list(force_in)] = 0
        node[list(force_out)] = 1
        if np.any(node[list(force_in)] == 1):
            raise InputError("a face cannot be forced both in and out")
        sc = self.scale(lam)
        a, b = node[self.f], node[self.g]
        keep = a != b
        cap = np.rint(self.w[keep] * sc)
        rows = [a[keep], b[keep]]
        cols = [b[keep], a[keep]]
        caps = [cap, cap]
        free = node >= 2
        if lam > 0:
            rows.append(np.zeros(free.sum(), dtype=np.int64))
            cols.append(node[free])
            caps.append(np.rint(lam * self.area[free] * sc))
        elif lam < 0:
            rows.append(node[free])
            cols.append(np.ones(free.sum(), dtype=np.int64))
            caps.append(np.rint(-lam * self.area[free] * sc))
        m = n + 2
        C = sp.csr_matrix((np.concatenate(caps).astype(np.int32),
                           (np.concatenate(rows), np.concatenate(cols))), shape=(m, m))
        C.sum_duplicates()
        C.eliminate_zeros()
        res = maximum_flow(C, 0, 1)
        R = C - res.flow
        R.data[R.data < 0] = 0
        R.eliminate_zeros()
        reach = breadth_first_order(R, 0, directed=True, return_predecessors=False)
        src = np.zeros(m, dtype=bool)
        src[reach] = True
        return src[node]


def _dual_graph(surface: TriangulatedSurface) -> sp.csr_matrix:
    ef = surface.edge_faces
    n = surface.n_faces
    w = surface.lengths
    return sp.csr_matrix((np.r_[w, w], (np.r_[ef[:, 0], ef[:, 1]], np.r_[ef[:, 1], ef[:, 0]])),
                         shape=(n, n))


def _hops(surface: TriangulatedSurface, start: int) -> np.ndarray:
    ef = surface.edge_faces
    n = surface.n_faces
    g = sp.csr_matrix((np.ones(2 * len(ef)), (np.r_[ef[:, 0], ef[:, 1]],
                                              np.r_[ef[:, 1], ef[:, 0]])), shape=(n, n))
    return shortest_path(g, unweighted=True, indices=start)


def extremal_faces(surface: TriangulatedSurface, samples: int = 6) -> list[int]:
    """Far-apart faces: a dual-graph double sweep, then farthest-point sampling."""
    d0 = _hops(surface, 0)
    u = int(np.argmax(d0))
    du = _hops(surface, u)
    v = int(np.argmax(du))
    picked = [u, v]
    dist = np.minimum(du, _hops(surface, v))
    while len(picked) < min(samples, surface.n_faces):
        k = int(np.argmax(dist))
        if dist[k] == 0:
            break
        picked.append(k)
        dist = np.minimum(dist, _hops(surface, k))
    return picked


def anchor_pairs(surface: TriangulatedSurface, kind: str = "global",
                 samples: int = 6) -> list[tuple[int, int]]:
    """``(in, out)`` pairs.  The global family covers every non-trivial region."""
    n = surface.n_faces
    if kind == "global":
        return [(a, 0) for a in range(1, n)] + [(0, b) for b in range(1, n)]
    if kind == "extremal":
        pts = extremal_faces(surface, samples)
        return [(a, b) for a in pts for b in pts if a != b]
    raise InputError(f"unknown anchor family {kind!r}")


def _resolve_anchors(surface, settings: SolverSettings) -> str:
    if settings.anchors == "auto":
        return "global" if surface.n_faces <= settings.global_limit else "extremal"
    return settings.anchors


def _best_cut(engine: _CutEngine, lam: float, pairs) -> tuple[np.ndarray, float]:
    """Smallest objective over the anchor family; ties go to the smaller
    volume, then the canonical face order."""
    best = None
    for a, b in pairs:
        mask = engine.solve(lam, (a,), (b,))
        obj, v, _ = engine.objective(mask, lam)
        key = (obj, v, tuple(np.flatnonzero(mask)))
        if best is None or key[0] < best[0][0] - 1e-12 * max(1.0, abs(key[0])) or \
                (abs(key[0] - best[0][0]) <= 1e-12 * max(1.0, abs(key[0])) and key[1:] < best[0][1:]):
            best = (key, mask)
    return best[1], best[0][0]


def mincut_sweep(surface: TriangulatedSurface, lambda_grid, *, anchors: str | None = None,
                 samples: int = 6, threads: int = 1) -> list[IsoPoint]:
    """Minimise ``P(E) - lam V(E)`` for every ``lam`` in the grid.

    Without anchors this is the plain relaxation: the empty region for
    ``lam <= 0`` and the whole surface for ``lam > 0``.  With an anchor
    family the minimum is over the regions that family covers.
    """
    lams = [float(x) for x in lambda_grid]
    if not lams:
        raise InputError("lambda grid is empty")
    if not all(math.isfinite(x) for x in lams):
        raise InputError("lambda values must be finite")
    engine = _CutEngine(surface)
    pairs = None if anchors in (None, "none") else anchor_pairs(surface, anchors, samples)
    certified = anchors == "global"

    def one(lam):
        if pairs is None:
            mask = engine.solve(lam)
        else:
            mask, _ = _best_cut(engine, lam, pairs)
        return _point(surface, mask, "mincut", certified, lam)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(one, lams))
    return [one(x) for x in lams]


@dataclass
class Envelope:
    """Vertices of the lower convex hull found by the parametric search."""

    points: list[IsoPoint]
    anchors: str
    rounding: float = 0.0
    solves: int = 0

    @property
    def certified(self) -> bool:
        return self.anchors == "global"

    def lower_bound(self, lo: float, hi: float) -> float:
        """Minimum of the piecewise linear hull over ``[lo, hi]``."""
        V = np.array([p.volume for p in self.points])
        P = np.array([p.perimeter for p in self.points])
        lo, hi = max(lo, V[0]), min(hi, V[-1])
        if lo > hi:
            return math.inf
        xs = np.r_[lo, V[(V > lo) & (V < hi)], hi]
        return float(np.interp(xs, V, P).min())


_ENVELOPES: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def lagrangian_envelope(surface: TriangulatedSurface, anchors: str = "global",
                        samples: int = 6, tie_tol: float = 1e-9) -> Envelope:
    """Lower convex hull of ``{(V(E), P(E))}`` over the anchored family.

    The extreme vertices are the smallest face and its complement; the rest
    are found by the Eisner-Severance recursion: between two known vertices
    solve at the slope joining them and recurse if something lies strictly
    below the chord.
    """
    cache = _ENVELOPES.setdefault(surface, {})
    key = (anchors, samples)
    if key in cache:
        return cache[key]
    engine = _CutEngine(surface)
    pairs = anchor_pairs(surface, anchors, samples)
    area = surface.face_areas
    n = surface.n_faces
    if anchors == "global":
        # the lightest face (then the shortest) and its complement are the
        # extreme hull vertices among non-trivial regions
        _, _, f0 = min((area[f], float(surface.lengths[surface.face_edges[f]].sum()), f)
                       for f in range(n))
        left = np.zeros(n, dtype=bool)
        left[f0] = True
        right = ~left
    else:
        big = 4.0 * surface.lengths.sum() / area.min() + 1.0
        left, _ = _best_cut(engine, -big, pairs)
        right, _ = _best_cut(engine, big, pairs)
    pts = {}
    solves = 0
    rounding = 0.0

    def add(mask, lam=None):
        p = _point(surface, mask, "mincut", anchors == "global", lam)
        pts[p.region.faces] = p
        return p

    L, R = add(left), add(right)
    stack = [(L, R)]
    while stack:
        L, R = stack.pop()
        if R.volume - L.volume <= 0:
            continue
        lam = (R.perimeter - L.perimeter) / (R.volume - L.volume)
        mask, obj = _best_cut(engine, lam, pairs)
        solves += 1
        rounding = max(rounding, engine.rounding_bound(lam))
        ref = L.perimeter - lam * L.volume
        slack = _tie(ref, tie_tol) + engine.rounding_bound(lam)
        if obj < ref - slack:
            X = add(mask, lam)
            if X.region.faces in (L.region.faces, R.region.faces):
                continue
            stack.append((X, R))
            stack.append((L, X))
    ordered = sorted(pts.values(), key=lambda p: (p.volume, p.perimeter))
    hull = []
    for p in ordered:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (b.volume - a.volume) * (p.perimeter - a.perimeter) - \
                (b.perimeter - a.perimeter) * (p.volume - a.volume)
            if cross <= 0:
                hull.pop()
            else:
                break
        if hull and abs(hull[-1].volume - p.volume) <= 0:
            if p.perimeter < hull[-1].perimeter:
                hull[-1] = p
            continue
        hull.append(p)
    env = Envelope(hull, anchors, rounding, solves)
    cache[key] = env
    return env


# --------------------------------------------------------------------------
# exchange repair
# --------------------------------------------------------------------------

class _Repair:
    def __init__(self, surface: TriangulatedSurface, target: float, tol: float):
        self.surface = surface
        self.D = _dual_graph(surface).tocsr()
        self.B = self.D.astype(bool).astype(float)
        self.area = surface.face_areas
        self.target = target
        self.tol = tol

    def delta(self, x: np.ndarray) -> np.ndarray:
        """Perimeter change from flipping each face."""
        s = np.where(x, 1.0, -1.0)
        # edges to same-state neighbours become cut, opposite ones uncut
        return (self.D @ s) * s

    def frontier(self, x: np.ndarray) -> np.ndarray:
        s = x.astype(float)
        inside_nb = self.B @ s > 0
        outside_nb = self.B @ (1 - s) > 0
        return np.where(x, outside_nb, inside_nb)

    def feasible(self, v: float) -> bool:
        return abs(v - self.target) <= self.tol

    def make_feasible(self, x: np.ndarray, budget: int) -> tuple[np.ndarray, int]:
        """Greedy flips towards the window.

        Far from the window whole batches of frontier faces (cheapest first)
        are flipped as long as they do not overshoot.  Close to it, single
        flips: a landing flip (frontier first), else the cheapest flip that
        does not overshoot, else the smallest overshoot.
        """
        x = x.copy()
        v = float(self.area[x].sum())
        steps = 0
        while not self.feasible(v) and steps < budget:
            grow = v < self.target
            gap = abs(self.target - v)
            movable = ~x if grow else x
            dv = np.where(grow, self.area, -self.area)
            dp = self.delta(x)
            front = self.frontier(x) if x.any() and (~x).any() else np.ones_like(x)
            batch = np.flatnonzero(movable & front)
            if len(batch) > 1:
                batch = batch[np.lexsort((batch, dp[batch]))]
                fits = np.cumsum(self.area[batch]) <= gap - self.tol
                if fits[:2].all():
                    take = batch[fits]
                    x[take] = grow
                    v += float(dv[take].sum())
                    steps += 1
                    continue
            lands = movable & (np.abs(v + dv - self.target) <= self.tol)
            short = movable & (self.area <= gap + self.tol)
            for cand in (lands & front, lands, short & front, short):
                if cand.any():
                    idx = np.flatnonzero(cand)
                    k = idx[np.lexsort((idx, dp[idx]))[0]]
                    break
            else:
                # every movable face overshoots: take the smallest overshoot
                idx = np.flatnonzero(movable)
                if len(idx) == 0:
                    break
                k = idx[np.lexsort((idx, self.area[idx]))[0]]
            x[k] = grow
            v += dv[k]
            steps += 1
        return x, steps

    def descend(self, x: np.ndarray, budget: int) -> tuple[np.ndarray, int, bool]:
        x = x.copy()
        v = float(self.area[x].sum())
        steps = 0
        while steps < budget:
            dp = self.delta(x)
            front = self.frontier(x)
            best = (0.0, None)
            eps = 1e-12 * max(1.0, float(np.abs(dp).max()))
            # single flips
            idx = np.flatnonzero(front)
            nv = v + np.where(x[idx], -self.area[idx], self.area[idx])
            ok = np.abs(nv - self.target) <= self.tol
            if ok.any():
                j = idx[ok][np.lexsort((idx[ok], dp[idx[ok]]))[0]]
                if dp[j] < best[0] - eps:
                    best = (dp[j], (j,))
            # swaps: one face out, one face in
            ins = np.flatnonzero(front & x)
            outs = np.flatnonzero(front & ~x)
            if len(ins) and len(outs):
                Wsub = self.D[ins][:, outs].toarray()
                tot = dp[ins][:, None] + dp[outs][None, :] + 2.0 * Wsub
                nv2 = v - self.area[ins][:, None] + self.area[outs][None, :]
                tot = np.where(np.abs(nv2 - self.target) <= self.tol, tot, np.inf)
                m = tot.min()
                if m < best[0] - eps:
                    r, c = np.nonzero(tot <= m)
                    r, c = r[0], c[0]
                    best = (m, (ins[r], outs[c]))
            if best[1] is None:
                return x, steps, True
            for k in best[1]:
                v += -self.area[k] if x[k] else self.area[k]
                x[k] = ~x[k]
            steps += 1
        return x, steps, False

    def perturb(self, x: np.ndarray, rng: np.random.Generator, kicks: int,
                budget: int) -> tuple[np.ndarray, bool]:
        """Iterated local search: flip a few frontier faces, restore the
        window, descend again, keep strict improvements."""
        best = x
        best_p = self._perimeter(x)
        done = True
        for _ in range(kicks):
            front = np.flatnonzero(self.frontier(best))
            if len(front) == 0:
                break
            k = min(len(front), int(rng.integers(1, 4)))
            y = best.copy()
            y[rng.choice(front, size=k, replace=False)] ^= True
            y, _ = self.make_feasible(y, budget)
            if not self.feasible(float(self.area[y].sum())):
                continue
            y, _, ok = self.descend(y, budget)
            done &= ok
            p = self._perimeter(y)
            if p < best_p - 1e-12 * max(1.0, best_p):
                best, best_p = y, p
        return best, done

    def _perimeter(self, x: np.ndarray) -> float:
        s = x.astype(float)
        # w_ij summed over i inside and j outside: each cut edge once
        return float(s @ (self.D @ (1 - s)))


def _distance_order(surface: TriangulatedSurface, start: int) -> np.ndarray:
    """Faces ordered by metric distance from a corner of ``start`` (mean over
    their corners)."""
    d = surface.distances_from(int(surface.faces[start, 0]))
    key = d[surface.faces].mean(axis=1)
    return np.lexsort((np.arange(surface.n_faces), key))


def _ball(surface: TriangulatedSurface, order: np.ndarray, target: float) -> np.ndarray:
    """Leading faces of ``order`` whose volume is closest to the target."""
    return _ball_mask(surface.n_faces, order, surface.face_areas, target)


def _ball_mask(n: int, order: np.ndarray, area: np.ndarray, target: float) -> np.ndarray:
    cum = np.cumsum(area[order])
    k = int(np.searchsorted(cum, target))
    if k < len(order) and k > 0 and abs(cum[k - 1] - target) < abs(cum[k] - target):
        k -= 1
    mask = np.zeros(n, dtype=bool)
    mask[order[:k + 1]] = True
    return mask


def _band_cut(engine: _CutEngine, order: np.ndarray, target: float,
              width: float) -> np.ndarray | None:
    """Shortest cut inside the band of ``order`` whose cumulative volume is
    within ``width`` of the target: faces before the band are forced in,
    faces after it forced out."""
    cum = np.cumsum(engine.area[order])
    lo = int(np.searchsorted(cum, target - width))
    hi = int(np.searchsorted(cum, target + width))
    if lo == 0 or hi >= len(order) - 1:
        return None
    return engine.solve(0.0, order[:lo], order[hi + 1:])


# --------------------------------------------------------------------------
# constrained solver
# --------------------------------------------------------------------------

def constrained_min_at_volume(surface: TriangulatedSurface, target_volume: float,
                              settings: SolverSettings | None = None) -> IsoPoint:
    """Minimum-perimeter region with volume within tolerance of the target.

    1. If a hull vertex lies in the tolerance window it is returned; it is
       certified when the hull is exact (global anchors) and nothing in the
       window can beat it.
    2. Otherwise the bracketing hull vertices and breadth-first balls are
       repaired by single flips and swaps that keep the volume in the window.
    3. Under the size cap the answer is checked against exhaustive search.
    """
    st = settings or SolverSettings()
    A = surface.total_area
    tol = default_tolerance(surface) if st.volume_tolerance is None else st.volume_tolerance
    v = float(target_volume)
    if not -tol <= v <= A + tol:
        raise InfeasibleVolumeError(f"target {v} outside [0, {A}]")
    n = surface.n_faces
    if abs(v) <= tol:
        return _point(surface, np.zeros(n, bool), "mincut", True, None, "empty region")
    if abs(v - A) <= tol:
        return _point(surface, np.ones(n, bool), "mincut", True, None, "whole surface")
    kind = _resolve_anchors(surface, st)
    env = lagrangian_envelope(surface, kind, st.extremal_samples, st.tie_tol)
    bound = env.lower_bound(v - tol, v + tol) - env.rounding if env.certified else -math.inf

    def certify(p: IsoPoint) -> bool:
        return env.certified and p.perimeter <= bound + _tie(p.perimeter, st.tie_tol)

    hits = [p for p in env.points if abs(p.volume - v) <= tol]
    result = None
    if hits:
        p = min(hits, key=lambda q: (q.perimeter, q.region.faces))
        result = IsoPoint(p.volume, p.perimeter, p.region, "mincut", certify(p), p.lam)
    else:
        budget = st.repair_budget or 10 * n
        rep = _Repair(surface, v, tol)
        starts = []
        starts = [p.region.mask(n) for p in env.points]
        engine = _CutEngine(surface)
        half = min(v, A - v)
        orders = [_distance_order(surface, f) for f in extremal_faces(surface, st.ball_starts)]
        for order in orders:
            starts.append(_ball(surface, order, v))
            for frac in (0.1, 0.25, 0.5):
                cut = _band_cut(engine, order, v, frac * half)
                if cut is not None:
                    starts.append(cut)
        # a short cut with too little volume, topped up by a separate ball
        area = surface.face_areas
        for x0 in list(starts):
            for y0 in (x0, ~x0):
                deficit = v - float(area[y0].sum())
                if deficit <= tol:
                    continue
                for order in orders:
                    free = order[~y0[order]]
                    starts.append(y0 | _ball_mask(n, free, area, deficit))
        exhausted = False
        local = {}
        for x0 in starts:
            x, _ = rep.make_feasible(x0, budget)
            if not rep.feasible(float(surface.face_areas[x].sum())):
                continue
            x, _, done = rep.descend(x, budget)
            exhausted |= not done
            p = _point(surface, x, "repaired", False)
            local[p.region.faces] = p
        # kick only the most promising distinct local minima
        ranked = sorted(local.values(), key=lambda q: (q.perimeter, q.region.faces))
        rng = np.random.default_rng(st.seed)
        best = ranked[0] if ranked else None
        for q in ranked[:2]:
            x, done = rep.perturb(q.region.mask(n), rng, st.kicks, budget)
            exhausted |= not done
            p = _point(surface, x, "repaired", False)
            if (p.perimeter, p.region.faces) < (best.perimeter, best.region.faces):
                best = p
        if best is not None:
            note = "repair budget exhausted" if exhausted else ""
            result = IsoPoint(best.volume, best.perimeter, best.region, "repaired",
                              certify(best), None, note)
    if st.cross_validate and n <= st.brute_cap:
        try:
            b = brute_force_min(surface, v, tol, cap=st.brute_cap, tie_tol=st.tie_tol)
        except InfeasibleVolumeError:
            b = None
        if b is not None and (result is None or
                              b.perimeter <= result.perimeter + _tie(b.perimeter, st.tie_tol)):
            return b
    if result is None:
        raise InfeasibleVolumeError(f"no region found within {tol} of volume {v}")
    return result


# --------------------------------------------------------------------------
# bounds and profiles
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    delta: float
    D: float
    L: int
    complement_bound: float
    min_volume: float
    exceeds_bound: bool
    lengths: tuple = field(default=())


def bounds_report(surface: TriangulatedSurface, point: IsoPoint, T: Region,
                  C_per_component: float) -> BoundsReport:
    """Boundary statistics of a region and the volume bound ``Vol(M - T) + C L``."""
    comps = boundary_components(surface, point.region)
    L = len(comps)
    lengths = tuple(c.length for c in comps)
    delta = min(lengths) if comps else 0.0
    D = max((c.diameter for c in comps), default=0.0)
    rhs = volume(surface, T.complement(surface.n_faces)) + C_per_component * L
    v = volume(surface, point.region)
    mv = min(v, surface.total_area - v)
    return BoundsReport(delta, D, L, rhs, mv, mv > rhs, lengths)


def isoperimetric_profile(surface: TriangulatedSurface, samples: int,
                          settings: SolverSettings | None = None, *,
                          threads: int = 1) -> list[IsoPoint]:
    """Profile on an even grid over ``[0, A/2]``, mirrored to ``[A/2, A]`` by
    complementation, sorted by volume."""
    if samples < 2:
        raise InputError("need at least two samples")
    A = surface.total_area
    grid = np.linspace(0.0, A / 2, samples)
    solve = lambda v: constrained_min_at_volume(surface, v, settings)  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            half = list(ex.map(solve, grid))
    else:
        half = [solve(v) for v in grid]
    out = list(half)
    n = surface.n_faces
    for p in half:
        if p.volume * 2 >= A - 1e-12:
            continue
        comp = p.region.complement(n)
        out.append(IsoPoint(volume(surface, comp), p.perimeter, comp, p.method,
                            p.certified_optimal, p.lam, "complement"))
    return sorted(out, key=lambda p: (p.volume, p.region.faces))
