"""Convex polytopes in V-representation with derived facet data.

Everything downstream (depth regions, illumination, the benchmark harness)
manipulates polytopes through this module. A polytope stores its minimal
vertex set, lexicographically sorted; facet simplices, outward unit normals,
offsets and volume are derived lazily and cached. Hull combinatorics in
d >= 3 come from Qhull via scipy; the 2-d hull, all volume work, the
incremental volume update for an added point, and halfspace intersection
by the dual-hull transform are implemented here.

Dimensions above 8 are out of scope and rejected up front.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull as _QhullHull
from scipy.spatial import QhullError

from .errors import (
    DegenerateInput,
    DegenerateRegion,
    DimensionMismatch,
    DomainError,
    EmptyRegion,
)

__all__ = [
    "EPSILON",
    "MAX_DIM",
    "PointCloud",
    "Polytope",
    "convex_hull",
    "volume",
    "hull_volume_with_point",
    "hull_volumes_with_points",
    "halfspace_intersection",
    "hausdorff_distance",
    "point_polytope_distance",
    "scale_about",
    "affine_image",
    "polytope_to_text",
    "polytope_from_text",
]

# Relative tolerance for facet support, visibility and membership tests.
EPSILON = 1e-9

# Ambient dimensions above this are rejected (cost grows combinatorially).
MAX_DIM = 8


def _as_matrix(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise DegenerateInput("expected a non-empty (n, d) array of points")
    if pts.shape[1] > MAX_DIM:
        raise DimensionMismatch(f"dimension {pts.shape[1]} exceeds supported {MAX_DIM}")
    if not np.all(np.isfinite(pts)):
        raise DegenerateInput("points must be finite")
    return pts


class PointCloud:
    """Immutable (n, d) sample of finite points.

    Instances hash by identity, which lets expensive per-sample results
    (depths, regions) be cached against the object.
    """

    __slots__ = ("points",)

    def __init__(self, points):
        pts = _as_matrix(points).copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __setattr__(self, name, value):
        raise AttributeError("PointCloud is immutable")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"PointCloud(n={self.n}, d={self.d})"


def _lexsort_rows(rows: np.ndarray) -> np.ndarray:
    """Indices sorting rows lexicographically (first column primary)."""
    return np.lexsort(rows[:, ::-1].T)


def _monotone_chain(pts: np.ndarray, scale: float) -> list[int]:
    """2-d convex hull, counter-clockwise vertex indices into pts.

    pts must be deduplicated. Collinear boundary points are dropped, so the
    result is the minimal vertex set.
    """
    order = _lexsort_rows(pts)
    tol = EPSILON * scale * scale

    def cross(o, a, b):
        return (pts[a, 0] - pts[o, 0]) * (pts[b, 1] - pts[o, 1]) - (
            pts[a, 1] - pts[o, 1]
        ) * (pts[b, 0] - pts[o, 0])

    lower: list[int] = []
    for idx in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], idx) <= tol:
            lower.pop()
        lower.append(idx)
    upper: list[int] = []
    for idx in order[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], idx) <= tol:
            upper.pop()
        upper.append(idx)
    return lower[:-1] + upper[:-1]


def _batched_abs_dets(diff: np.ndarray) -> np.ndarray:
    """|det| of a (..., d, d) stack, with closed forms for d <= 3."""
    d = diff.shape[-1]
    if d == 1:
        return np.abs(diff[..., 0, 0])
    if d == 2:
        return np.abs(
            diff[..., 0, 0] * diff[..., 1, 1] - diff[..., 0, 1] * diff[..., 1, 0]
        )
    if d == 3:
        a, b, c = diff[..., 0, :], diff[..., 1, :], diff[..., 2, :]
        cx = b[..., 1] * c[..., 2] - b[..., 2] * c[..., 1]
        cy = b[..., 2] * c[..., 0] - b[..., 0] * c[..., 2]
        cz = b[..., 0] * c[..., 1] - b[..., 1] * c[..., 0]
        return np.abs(a[..., 0] * cx + a[..., 1] * cy + a[..., 2] * cz)
    return np.abs(np.linalg.det(diff))


_FACTORIALS = [1.0]
for _i in range(1, MAX_DIM + 2):
    _FACTORIALS.append(_FACTORIALS[-1] * _i)


class Polytope:
    """Bounded convex polytope given by its extreme points.

    vertices: (k, d) read-only array, rows sorted lexicographically.
    degenerate: vertex set is not full-dimensional. Degenerate polytopes
        have volume exactly 0.0 and carry no facet data. In d >= 3 a
        degenerate polytope recovered from a halfspace intersection may
        store only a subset of its true extreme points.

    Facet data (simplices into the vertex array, outward unit normals,
    offsets) and the volume are computed on first use and cached. The
    volume is the sum of simplex volumes |det(v_1 - c, ..., v_d - c)| / d!
    over facets, with c an interior reference point.
    """

    __slots__ = ("vertices", "degenerate", "_simplices", "_normals", "_offsets", "_volume")

    def __init__(self, vertices, *, degenerate=False, simplices=None, normals=None,
                 offsets=None, volume=None, _sorted=False):
        verts = _as_matrix(vertices)
        if not _sorted:
            verts = verts[_lexsort_rows(verts)]
        verts = verts.copy()
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "degenerate", bool(degenerate))
        object.__setattr__(self, "_simplices", simplices)
        object.__setattr__(self, "_normals", normals)
        object.__setattr__(self, "_offsets", offsets)
        object.__setattr__(self, "_volume", 0.0 if degenerate else volume)

    def __setattr__(self, name, value):
        raise AttributeError("Polytope is immutable")

    def _set(self, name, value):
        object.__setattr__(self, name, value)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def barycenter(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    @property
    def scale(self) -> float:
        return max(1.0, float(np.abs(self.vertices).max()))

    def _require_facets(self):
        if self.degenerate:
            raise DegenerateRegion("degenerate polytope has no facet data")
        if self._normals is None:
            if self._simplices is None:
                hull = convex_hull(self.vertices)
                self._set("_simplices", hull._simplices)
                self._set("_normals", hull._normals)
                self._set("_offsets", hull._offsets)
                # vertex sets coincide; ordering may not if vertices were
                # already minimal, so map back when needed.
                if hull.n_vertices != self.n_vertices:
                    raise DegenerateInput("vertex set is not minimal")
            else:
                self._facets_from_simplices()

    def _facets_from_simplices(self):
        verts = self.vertices
        d = self.dim
        if d == 1:
            normals = np.array([[-1.0], [1.0]])
            offsets = np.array([-verts[0, 0], verts[-1, 0]])
            self._set("_normals", normals)
            self._set("_offsets", offsets)
            return
        c0 = self.barycenter
        w = verts[self._simplices] - c0
        dets = _batched_abs_dets(w)
        good = dets > 0.0
        if not np.all(good):
            raise DegenerateInput("facet simplex is degenerate")
        # Solve w @ n = 1 per facet: the facet plane is {x: n.(x - c0) = 1},
        # automatically oriented outward because c0 is interior.
        normals = np.linalg.solve(w, np.ones(d))
        lens = np.linalg.norm(normals, axis=1)
        offsets = (1.0 + normals @ c0) / lens
        self._set("_normals", normals / lens[:, None])
        self._set("_offsets", offsets)

    @property
    def facet_normals(self) -> np.ndarray:
        self._require_facets()
        return self._normals

    @property
    def facet_offsets(self) -> np.ndarray:
        self._require_facets()
        return self._offsets

    @property
    def facet_simplices(self) -> np.ndarray:
        self._require_facets()
        if self._simplices is None:
            raise DegenerateRegion("facet simplices unavailable")
        return self._simplices

    @property
    def volume(self) -> float:
        if self._volume is None:
            self._require_facets()
            diff = self.vertices[self._simplices] - self.barycenter
            vol = float(_batched_abs_dets(diff).sum() / _FACTORIALS[self.dim])
            self._set("_volume", vol)
        return self._volume

    def contains(self, x, tol: float | None = None) -> bool:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise DimensionMismatch("point dimension differs from polytope")
        if self.degenerate:
            return point_polytope_distance(x, self) <= (tol if tol is not None
                                                        else EPSILON * self.scale)
        if tol is None:
            tol = EPSILON * max(self.scale, float(np.abs(x).max()) if x.size else 1.0)
        return bool(np.all(self.facet_normals @ x <= self.facet_offsets + tol))

    def contains_many(self, X, tol: float | None = None) -> np.ndarray:
        X = _as_matrix(X)
        if X.shape[1] != self.dim:
            raise DimensionMismatch("points dimension differs from polytope")
        if tol is None:
            tol = EPSILON * max(self.scale, float(np.abs(X).max()))
        slack = X @ self.facet_normals.T - self.facet_offsets
        return np.all(slack <= tol, axis=1)

    def support(self, directions) -> np.ndarray:
        """Support function h(u) = max_v u.v over the given directions."""
        U = _as_matrix(directions)
        return (U @ self.vertices.T).max(axis=1)

    def radial_distance(self, center, directions) -> np.ndarray:
        """Distance from center to the boundary along each unit direction.

        center must be strictly inside.
        """
        center = np.asarray(center, dtype=float).reshape(-1)
        U = _as_matrix(directions)
        slack = self.facet_offsets - self.facet_normals @ center
        if np.any(slack <= 0):
            raise DomainError("center is not strictly interior")
        denom = U @ self.facet_normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(denom > 0, slack[None, :] / denom, np.inf)
        t = ratio.min(axis=1)
        if not np.all(np.isfinite(t)):
            raise DomainError("polytope is unbounded along a direction")
        return t

    def __repr__(self) -> str:
        tag = ", degenerate" if self.degenerate else ""
        return f"Polytope(k={self.n_vertices}, d={self.dim}{tag})"


def convex_hull(points) -> Polytope:
    """Convex hull of a point set as a Polytope with minimal vertex set.

    Raises DegenerateInput when the points do not span the ambient space.
    Exact duplicates are merged before hull construction. Output vertex
    ordering is deterministic (lexicographic).
    """
    if isinstance(points, PointCloud):
        points = points.points
    pts = np.unique(_as_matrix(points), axis=0)
    n, d = pts.shape
    if n < d + 1:
        raise DegenerateInput(f"need at least {d + 1} distinct points in dimension {d}")
    scale = max(1.0, float(np.abs(pts).max()))

    if d == 1:
        verts = np.array([[pts.min()], [pts.max()]])
        if verts[1, 0] - verts[0, 0] <= EPSILON * scale:
            raise DegenerateInput("all points coincide")
        simplices = np.array([[0], [1]])
        return Polytope(verts, simplices=simplices,
                        normals=np.array([[-1.0], [1.0]]),
                        offsets=np.array([-verts[0, 0], verts[1, 0]]),
                        volume=float(verts[1, 0] - verts[0, 0]), _sorted=True)

    centered = pts - pts.mean(axis=0)
    svals = np.linalg.svd(centered, compute_uv=False)
    if svals[d - 1] <= EPSILON * max(1.0, svals[0]):
        raise DegenerateInput("points are not full-dimensional")

    if d == 2:
        ring = _monotone_chain(pts, scale)
        if len(ring) < 3:
            raise DegenerateInput("points are not full-dimensional")
        verts = pts[ring]
        order = _lexsort_rows(verts)
        pos = np.empty(len(ring), dtype=int)
        pos[order] = np.arange(len(ring))
        m = len(ring)
        simplices = np.stack([pos, np.roll(pos, -1)], axis=1)
        return Polytope(verts[order], simplices=simplices, _sorted=True)

    try:
        hull = _QhullHull(pts)
    except QhullError as exc:
        raise DegenerateInput(f"hull construction failed: {exc}") from None
    vert_idx = np.sort(hull.vertices)
    verts = pts[vert_idx]
    order = _lexsort_rows(verts)
    remap = np.full(n, -1, dtype=int)
    remap[vert_idx[order]] = np.arange(len(vert_idx))
    simplices = remap[hull.simplices]
    if np.any(simplices < 0):
        # Qhull listed a simplex corner that it did not report as a vertex;
        # rebuild facet data from scratch in that case.
        return Polytope(verts[order], _sorted=True)
    normals = hull.equations[:, :d].copy()
    offsets = -hull.equations[:, d].copy()
    return Polytope(verts[order], simplices=simplices, normals=normals,
                    offsets=offsets, _sorted=True)


def volume(P: Polytope) -> float:
    """Volume of P; exactly 0.0 for degenerate polytopes."""
    return P.volume


def hull_volume_with_point(P: Polytope, x) -> float:
    """Volume of conv(P union {x}) by incremental update.

    Only simplices over facets visible from x are added, so the cost is
    linear in the number of facets. Equals volume(P) iff x lies in P
    (within relative tolerance).
    """
    if P.degenerate:
        raise DegenerateRegion("cannot illuminate a zero-volume polytope")
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != P.dim:
        raise DimensionMismatch("point dimension differs from polytope")
    eps = EPSILON * max(P.scale, float(np.abs(x).max()) if x.size else 1.0)
    slack = P.facet_normals @ x - P.facet_offsets
    mask = slack > eps
    if not mask.any():
        return P.volume
    diff = P.vertices[P.facet_simplices[mask]] - x
    added = float(_batched_abs_dets(diff).sum() / _FACTORIALS[P.dim])
    return P.volume + added


def hull_volumes_with_points(P: Polytope, X, chunk: int = 256) -> np.ndarray:
    """Vectorised hull_volume_with_point over the rows of X."""
    if P.degenerate:
        raise DegenerateRegion("cannot illuminate a zero-volume polytope")
    X = _as_matrix(X)
    if X.shape[1] != P.dim:
        raise DimensionMismatch("points dimension differs from polytope")
    U, b = P.facet_normals, P.facet_offsets
    corners = P.vertices[P.facet_simplices]  # (F, d, d)
    d = P.dim
    fact = _FACTORIALS[d]
    out = np.empty(X.shape[0])
    eps = EPSILON * max(P.scale, float(np.abs(X).max()))
    for start in range(0, X.shape[0], chunk):
        pts = X[start:start + chunk]
        vis = pts @ U.T - b > eps  # (m, F)
        diff = corners[None, :, :, :] - pts[:, None, None, :]
        dets = _batched_abs_dets(diff)  # (m, F)
        out[start:start + chunk] = P.volume + np.where(vis, dets, 0.0).sum(axis=1) / fact
    return out


def _chebyshev_center(U, b, lo, hi):
    """Largest inscribed ball of {Ux <= b} within the box; None if infeasible."""
    d = U.shape[1]
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    A = np.hstack([U, np.ones((U.shape[0], 1))])
    bounds = [(float(lo[j]), float(hi[j])) for j in range(d)] + [(0.0, None)]
    res = linprog(cost, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    if res.status == 2:
        return None
    if res.status != 0:
        raise DomainError(f"halfspace intersection LP failed (status {res.status})")
    return res.x[:d], float(res.x[d])


def _probe_vertices(U, b, lo, hi, tol):
    """Vertex probes of a (near) degenerate region via axis LPs."""
    d = U.shape[1]
    bounds = [(float(lo[j]), float(hi[j])) for j in range(d)]
    found = []
    for j in range(d):
        for sign in (1.0, -1.0):
            cost = np.zeros(d)
            cost[j] = sign
            res = linprog(cost, A_ub=U, b_ub=b, bounds=bounds, method="highs")
            if res.status == 0:
                found.append(res.x)
    if not found:
        raise EmptyRegion("no feasible point")
    pts = np.array(found)
    keep = []
    for p in pts:
        if not any(np.linalg.norm(p - q) <= tol for q in keep):
            keep.append(p)
    return np.array(keep)


def intersect_halfspaces_core(U, b, box=None):
    """Intersection of {u_i . x <= b_i} as a Polytope, maybe degenerate.

    U must have unit rows. box is an optional (lo, hi) pair bounding the
    region; without it a generous box derived from the offsets is used.
    Raises EmptyRegion when there is no feasible point at all.
    """
    U = np.asarray(U, dtype=float)
    b = np.asarray(b, dtype=float)
    d = U.shape[1]
    scale = max(1.0, float(np.abs(b).max()))
    if d == 1:
        up = b[U[:, 0] > 0.5]
        lo_ = -b[U[:, 0] < -0.5]
        hi_v = up.min() if up.size else np.inf
        lo_v = lo_.max() if lo_.size else -np.inf
        if box is not None:
            lo_v = max(lo_v, float(box[0][0]))
            hi_v = min(hi_v, float(box[1][0]))
        if not (np.isfinite(lo_v) and np.isfinite(hi_v)):
            raise DomainError("intersection is unbounded")
        if lo_v > hi_v + EPSILON * scale:
            raise EmptyRegion("empty interval")
        if hi_v - lo_v <= EPSILON * scale:
            return Polytope(np.array([[(lo_v + hi_v) / 2.0]]), degenerate=True)
        return Polytope(np.array([[lo_v], [hi_v]]), simplices=np.array([[0], [1]]),
                        normals=np.array([[-1.0], [1.0]]),
                        offsets=np.array([-lo_v, hi_v]),
                        volume=hi_v - lo_v, _sorted=True)

    if box is None:
        big = 1e6 * scale
        lo = np.full(d, -big)
        hi = np.full(d, big)
    else:
        lo = np.asarray(box[0], dtype=float)
        hi = np.asarray(box[1], dtype=float)
    cheb = _chebyshev_center(U, b, lo, hi)
    if cheb is None:
        raise EmptyRegion("halfspace intersection is empty")
    center, radius = cheb
    tol = EPSILON * max(scale, float(np.abs(center).max()))
    if radius <= tol:
        verts = _probe_vertices(U, b, lo, hi, tol)
        return Polytope(verts, degenerate=True)
    slack = b - U @ center
    dual = U / slack[:, None]
    dual_hull = convex_hull(dual)
    w = dual_hull.facet_normals
    h = dual_hull.facet_offsets
    if np.any(h <= 0):
        raise DomainError("intersection is unbounded")
    candidates = w / h[:, None] + center
    return convex_hull(candidates)


def halfspace_intersection(halfspaces, bounding_box: Polytope) -> Polytope:
    """Intersection of halfspaces {u . x <= b}, clipped to a bounding box.

    halfspaces: either an iterable of (u, b) pairs or a (U, b) tuple of
    arrays. Normal vectors need not be unit; they are normalised here.
    The bounding box polytope both guarantees boundedness and contributes
    its own facets to the intersection. Raises EmptyRegion if no point is
    feasible; returns a degenerate Polytope (volume 0) when the feasible
    set has empty interior.
    """
    if isinstance(halfspaces, tuple) and len(halfspaces) == 2:
        U = np.asarray(halfspaces[0], dtype=float)
        b = np.asarray(halfspaces[1], dtype=float)
    else:
        pairs = list(halfspaces)
        U = np.array([np.asarray(u, dtype=float).reshape(-1) for u, _ in pairs])
        b = np.array([float(bb) for _, bb in pairs])
    if U.ndim != 2:
        raise DimensionMismatch("halfspace normals must form a 2-d array")
    if bounding_box.dim != U.shape[1]:
        raise DimensionMismatch("bounding box dimension differs from halfspaces")
    lens = np.linalg.norm(U, axis=1)
    if np.any(lens <= 0):
        raise DomainError("zero normal vector in halfspace list")
    U = U / lens[:, None]
    b = b / lens
    U_all = np.vstack([U, bounding_box.facet_normals])
    b_all = np.concatenate([b, bounding_box.facet_offsets])
    lo = bounding_box.vertices.min(axis=0)
    hi = bounding_box.vertices.max(axis=0)
    return intersect_halfspaces_core(U_all, b_all, box=(lo, hi))


def _point_segment_distance(x, a, b):
    ab = b - a
    denom = float(ab @ ab)
    if denom <= 0:
        return float(np.linalg.norm(x - a))
    t = float(np.clip((x - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(x - (a + t * ab)))


def _point_simplex_distance(x, S):
    """Distance from x to conv(rows of S), exact via face enumeration."""
    k = S.shape[0]
    best = np.inf
    for r in range(1, k + 1):
        for subset in itertools.combinations(range(k), r):
            base = S[subset[0]]
            if r == 1:
                best = min(best, float(np.linalg.norm(x - base)))
                continue
            E = S[list(subset[1:])] - base
            G = E @ E.T
            try:
                mu = np.linalg.solve(G, E @ (x - base))
            except np.linalg.LinAlgError:
                continue
            if np.any(mu < -1e-12) or mu.sum() > 1.0 + 1e-12:
                continue
            proj = base + mu @ E
            best = min(best, float(np.linalg.norm(x - proj)))
    return best


def point_polytope_distance(x, P: Polytope) -> float:
    """Euclidean distance from x to P (0 when x is inside).

    Non-degenerate: minimum over boundary facets of the exact distance to
    the facet simplex. Degenerate polytopes are reduced to their affine
    hull and handled recursively.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != P.dim:
        raise DimensionMismatch("point dimension differs from polytope")
    V = P.vertices
    if P.degenerate:
        if V.shape[0] == 1:
            return float(np.linalg.norm(x - V[0]))
        c = V.mean(axis=0)
        Vc = V - c
        u_, s_, vt = np.linalg.svd(Vc, full_matrices=False)
        rank = int(np.sum(s_ > EPSILON * max(1.0, s_[0])))
        if rank == 0:
            return float(np.linalg.norm(x - c))
        B = vt[:rank].T  # (d, rank) orthonormal basis of the affine hull
        rel = x - c
        in_plane = B.T @ rel
        perp = rel - B @ in_plane
        Y = Vc @ B
        if rank == 1:
            lo_, hi_ = float(Y.min()), float(Y.max())
            t = float(np.clip(in_plane[0], lo_, hi_))
            d_in = abs(in_plane[0] - t)
        else:
            try:
                sub = convex_hull(Y)
                d_in = point_polytope_distance(in_plane, sub)
            except DegenerateInput:
                sub = Polytope(Y, degenerate=True)
                d_in = point_polytope_distance(in_plane, sub)
        return float(np.hypot(np.linalg.norm(perp), d_in))

    if P.dim == 1:
        lo_, hi_ = P.vertices[0, 0], P.vertices[-1, 0]
        return float(max(0.0, lo_ - x[0], x[0] - hi_))
    if P.contains(x):
        return 0.0
    corners = P.vertices[P.facet_simplices]
    if P.dim == 2:
        return min(_point_segment_distance(x, c[0], c[1]) for c in corners)
    return min(_point_simplex_distance(x, c) for c in corners)


def hausdorff_distance(P: Polytope, Q: Polytope) -> float:
    """Hausdorff distance between two convex polytopes.

    For convex bodies the supremum is attained at vertices, so this is the
    maximum over the vertices of each polytope of the distance to the
    other.
    """
    if P.dim != Q.dim:
        raise DimensionMismatch("polytopes live in different dimensions")
    d1 = max(point_polytope_distance(v, Q) for v in P.vertices)
    d2 = max(point_polytope_distance(v, P) for v in Q.vertices)
    return max(d1, d2)


def scale_about(P: Polytope, c: float, center) -> Polytope:
    """Homothety with factor c > 0 about the given center.

    Facet combinatorics are preserved, so no hull recomputation happens.
    """
    if not np.isfinite(c) or c <= 0:
        raise DomainError("scale factor must be positive and finite")
    center = np.asarray(center, dtype=float).reshape(-1)
    if center.shape[0] != P.dim:
        raise DimensionMismatch("center dimension differs from polytope")
    verts = center + c * (P.vertices - center)
    if not np.all(np.isfinite(verts)):
        raise DomainError("scaled vertices overflow")
    if P.degenerate:
        return Polytope(verts, degenerate=True)
    normals = P._normals
    offsets = P._offsets
    if normals is not None:
        offsets = c * offsets + (1.0 - c) * (normals @ center)
    vol = None if P._volume is None else P._volume * c ** P.dim
    return Polytope(verts, simplices=P._simplices, normals=normals,
                    offsets=offsets, volume=vol, _sorted=True)


def affine_image(P: Polytope, A, shift=None) -> Polytope:
    """Image of P under x -> A x + shift for invertible A.

    The facial structure of a polytope is preserved by invertible affine
    maps, so facet simplices are carried over and only the facet planes
    are recomputed (lazily).
    """
    A = np.asarray(A, dtype=float)
    d = P.dim
    if A.shape != (d, d):
        raise DimensionMismatch("matrix shape differs from polytope dimension")
    det = float(np.linalg.det(A))
    if abs(det) <= EPSILON:
        raise DegenerateInput("affine map is singular")
    shift = np.zeros(d) if shift is None else np.asarray(shift, dtype=float).reshape(-1)
    verts = P.vertices @ A.T + shift
    if P.degenerate:
        return Polytope(verts, degenerate=True)
    order = _lexsort_rows(verts)
    pos = np.empty(len(order), dtype=int)
    pos[order] = np.arange(len(order))
    simplices = None if P._simplices is None else pos[P._simplices]
    vol = None if P._volume is None else P._volume * abs(det)
    return Polytope(verts[order], simplices=simplices, volume=vol, _sorted=True)


def polytope_to_text(P: Polytope) -> str:
    """Serialise to text: header "d k", then k vertex rows of d floats.

    Floats are written with 17 significant digits, which round-trips IEEE
    doubles exactly, so write -> read -> write is byte-stable.
    """
    lines = [f"{P.dim} {P.n_vertices}"]
    for row in P.vertices:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def polytope_from_text(text: str) -> Polytope:
    """Inverse of polytope_to_text."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise DegenerateInput("empty polytope text")
    head = lines[0].split()
    if len(head) != 2:
        raise DegenerateInput("malformed polytope header")
    d, k = int(head[0]), int(head[1])
    if len(lines) != k + 1:
        raise DegenerateInput("vertex count does not match header")
    verts = np.array([[float(v) for v in ln.split()] for ln in lines[1:]])
    if verts.shape != (k, d):
        raise DegenerateInput("vertex rows do not match header")
    try:
        return convex_hull(verts)
    except DegenerateInput:
        return Polytope(verts, degenerate=True)
