"""Sample halfspace depth, Tukey regions and the deepest point.

Depth of x in sample X_1..X_n is the minimum, over closed halfspaces
containing x, of the fraction of sample points in the halfspace. All
depth values live on the grid {0, 1/n, ..., 1}; comparisons and ranking
work on the integer counts, never on the float quotients.

Three evaluation modes:

  exact2d        rotating-direction sweep in the plane, O(n log n) per
                 query. Sorts the angles of X_i - x and minimises the
                 closed halfplane count over all critical boundary lines.
  combinatorial  exact in any dimension by enumerating hyperplanes spanned
                 by the query point and d-1 sample points, with a recursive
                 correction for points lying on the candidate hyperplane.
                 Cost is combinatorial; guarded to n <= 80, d <= 4.
  approximate    minimum over a finite direction set; always an upper
                 bound for the exact depth, decreasing in the direction
                 count m.

Tukey regions {x : depth >= alpha}: in the plane the region is cut
exactly by halfplanes normal to lines through sample-point pairs (each
region edge lies on such a line); in higher dimensions a direction-based
outer approximation is used. Region extraction reduces the halfplane
family against a cheap outer polygon, then intersects the survivors by
the dual-hull transform.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateInput,
    DimensionMismatch,
    DomainError,
    EmptyRegion,
    ModeUnsupported,
)
from .geometry import (
    EPSILON,
    PointCloud,
    Polytope,
    convex_hull,
    intersect_halfspaces_core,
)

__all__ = [
    "DepthRegion",
    "hd",
    "depth_counts",
    "query_depth_counts",
    "direction_set",
    "tukey_region",
    "max_depth_and_median",
    "cutoff_for_probability",
]

# Angular window inside which two directions from a query point are
# treated as the same ray during the sweep.
_ANGLE_TOL = 1e-11

_COMBINATORIAL_MAX_N = 80
_COMBINATORIAL_MAX_D = 4


@dataclass(frozen=True)
class DepthRegion:
    """A Tukey region {x : depth >= alpha} together with its book-keeping.

    alpha is the requested level, k = ceil(alpha * n) the integer level
    actually cut, n_inside the number of sample points in the region.
    region may be degenerate (volume 0) at the deepest levels.
    """

    alpha: float
    k: int
    n: int
    region: Polytope
    n_inside: int
    mode: str

    @property
    def volume(self) -> float:
        return self.region.volume


def _points_of(P) -> np.ndarray:
    if isinstance(P, PointCloud):
        return P.points
    return PointCloud(P).points


def _scale_of(X, x=None) -> float:
    s = max(1.0, float(np.abs(X).max()))
    if x is not None and x.size:
        s = max(s, float(np.abs(x).max()))
    return s


# ---------------------------------------------------------------------------
# exact 2-d sweep


def _sweep_angles(rel: np.ndarray) -> np.ndarray:
    # +0.0 normalises away -0.0 so atan2 never returns -pi and equal rays
    # compare equal.
    return np.arctan2(rel[:, 1] + 0.0, rel[:, 0] + 0.0)


def _sweep_count_from_sorted(ts: np.ndarray, n0: int) -> int:
    """Minimal closed-halfplane count given sorted angles of the non-
    coincident points; n0 coincident points sit in every halfplane."""
    m = ts.shape[0]
    if m == 0:
        return n0
    ext = np.concatenate([ts, ts + 2.0 * np.pi])
    t = ts
    lo_eq = np.searchsorted(ext, t - _ANGLE_TOL, side="left")
    hi_eq = np.searchsorted(ext, t + _ANGLE_TOL, side="right")
    r_plus = hi_eq - lo_eq
    lo_op = np.searchsorted(ext, t + np.pi - _ANGLE_TOL, side="left")
    hi_op = np.searchsorted(ext, t + np.pi + _ANGLE_TOL, side="right")
    r_minus = hi_op - lo_op
    L = lo_op - hi_eq
    R = m - L - r_plus - r_minus
    cand = np.minimum(L, R) + np.minimum(r_plus, r_minus)
    return n0 + int(cand.min())


def _depth_count_2d(X: np.ndarray, x: np.ndarray) -> int:
    rel = X - x
    dist = np.hypot(rel[:, 0], rel[:, 1])
    tol = 1e-12 * _scale_of(X, x)
    coincident = dist <= tol
    n0 = int(coincident.sum())
    rel = rel[~coincident]
    if rel.shape[0] == 0:
        return n0
    ts = np.sort(_sweep_angles(rel))
    return _sweep_count_from_sorted(ts, n0)


def _depth_counts_2d_batch(X: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Sweep counts for many query points, vectorised across queries."""
    n = X.shape[0]
    q = Q.shape[0]
    tol = 1e-12 * max(_scale_of(X), _scale_of(Q))
    rel = X[None, :, :] - Q[:, None, :]  # (q, n, 2)
    dist = np.hypot(rel[..., 0], rel[..., 1])
    coincident = dist <= tol
    n0 = coincident.sum(axis=1)
    theta = np.arctan2(rel[..., 1] + 0.0, rel[..., 0] + 0.0)
    theta = np.where(coincident, np.inf, theta)  # push coincident to the end
    ts = np.sort(theta, axis=1)
    counts = np.empty(q, dtype=int)
    # Rows with any coincident point fall back to the scalar path (inf
    # entries would poison the row-offset searchsorted trick).
    messy = n0 > 0
    for i in np.nonzero(messy)[0]:
        counts[i] = _sweep_count_from_sorted(ts[i, : n - n0[i]], int(n0[i]))
    clean = ~messy
    if clean.any():
        tsc = ts[clean]
        rows = tsc.shape[0]
        # Row-offset trick: angles live in (-pi, 3pi], so spacing rows
        # 8pi apart keeps searches inside their own row.
        off = (8.0 * np.pi) * np.arange(rows)[:, None]
        flat = np.concatenate([tsc, tsc + 2.0 * np.pi], axis=1) + off
        flat = flat.ravel()
        base = tsc + off

        def count_leq(vals, side):
            idx = np.searchsorted(flat, vals.ravel(), side=side)
            return idx.reshape(rows, n) - 2 * n * (np.arange(rows)[:, None])

        lo_eq = count_leq(base - _ANGLE_TOL, "left")
        hi_eq = count_leq(base + _ANGLE_TOL, "right")
        lo_op = count_leq(base + np.pi - _ANGLE_TOL, "left")
        hi_op = count_leq(base + np.pi + _ANGLE_TOL, "right")
        r_plus = hi_eq - lo_eq
        r_minus = hi_op - lo_op
        L = lo_op - hi_eq
        R = n - L - r_plus - r_minus
        cand = np.minimum(L, R) + np.minimum(r_plus, r_minus)
        counts[clean] = cand.min(axis=1)
    return counts


# ---------------------------------------------------------------------------
# combinatorial exact depth (any d <= 4)


def _count_1d(v: np.ndarray, tol: float) -> int:
    neg = int((v < -tol).sum())
    pos = int((v > tol).sum())
    return min(neg, pos) + (v.shape[0] - neg - pos)


def _combinatorial_count(V: np.ndarray, tol_rel: float = 1e-11) -> int:
    """Exact minimal closed-halfspace count of the origin w.r.t. rows of V.

    Rows must be nonzero. Reduces to the affine span first, then
    enumerates candidate hyperplanes spanned by d-1 rows; points on a
    candidate hyperplane contribute their own lower-dimensional count.
    """
    m, d = V.shape
    if m == 0:
        return 0
    norms = np.linalg.norm(V, axis=1)
    scale = float(norms.max())
    if d > 1:
        u_, s_, vt = np.linalg.svd(V, full_matrices=False)
        rank = int((s_ > tol_rel * max(s_[0], 1e-300)).sum())
        if rank < d:
            if rank == 0:
                return m
            return _combinatorial_count(V @ vt[:rank].T, tol_rel)
    if d == 1:
        return _count_1d(V[:, 0], tol_rel * scale)
    if d == 2:
        cross = V[:, 0][:, None] * V[:, 1][None, :] - V[:, 1][:, None] * V[:, 0][None, :]
        dots = V @ V.T
        tol = tol_rel * norms[:, None] * norms[None, :]
        on = np.abs(cross) <= tol
        s_minus = (cross < -tol).sum(axis=1)
        s_plus = (cross > tol).sum(axis=1)
        r_plus = (on & (dots > 0)).sum(axis=1)
        r_minus = (on & (dots <= 0)).sum(axis=1)
        cand = np.minimum(s_minus, s_plus) + np.minimum(r_plus, r_minus)
        return int(cand.min())

    best = m
    for subset in itertools.combinations(range(m), d - 1):
        S = V[list(subset)]
        # Normal to span(S): null vector via SVD of the (d-1, d) block.
        u_, s_, vt = np.linalg.svd(S)
        if s_[-1] <= tol_rel * s_[0]:
            continue  # subset does not span a hyperplane
        normal = vt[-1]
        dots = V @ normal
        tol = tol_rel * norms
        on = np.abs(dots) <= tol
        s_minus = int((dots < -tol).sum())
        s_plus = int((dots > tol).sum())
        n_on = int(on.sum())
        if n_on == d - 1:
            extra = 0  # the spanning rows themselves can always be tipped out
        else:
            basis = vt[: d - 1]
            extra = _combinatorial_count(V[on] @ basis.T, tol_rel)
        best = min(best, min(s_minus, s_plus) + extra)
    return best


def _depth_count_combinatorial(X: np.ndarray, x: np.ndarray) -> int:
    rel = X - x
    tol = 1e-12 * _scale_of(X, x)
    dist = np.linalg.norm(rel, axis=1)
    coincident = dist <= tol
    n0 = int(coincident.sum())
    V = rel[~coincident]
    if V.shape[0] == 0:
        return n0
    return n0 + _combinatorial_count(V)


# ---------------------------------------------------------------------------
# approximate depth over a direction set

_DETERMINISTIC_SEED = 20120521


def direction_set(d: int, m: int, seed: int = 0) -> np.ndarray:
    """m unit directions: a deterministic half plus a seeded random half.

    The set is closed under negation (directions come in +/- pairs). In
    the plane the deterministic half is equispaced angles; in d = 3 a
    Fibonacci sphere; above that a fixed-seed Gaussian cloud.
    """
    if d < 1 or m < 2:
        raise DomainError("need d >= 1 and m >= 2 directions")
    if d == 1:
        return np.array([[1.0], [-1.0]])
    half = m // 2
    det_n = (half + 1) // 2
    rnd_n = half - det_n
    if d == 2:
        ang = np.pi * np.arange(det_n) / max(det_n, 1)
        det = np.c_[np.cos(ang), np.sin(ang)]
    elif d == 3:
        i = np.arange(det_n)
        z = 1.0 - (2.0 * i + 1.0) / max(det_n, 1)
        r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        golden = np.pi * (3.0 - math.sqrt(5.0))
        det = np.c_[r * np.cos(golden * i), r * np.sin(golden * i), z]
    else:
        g = np.random.default_rng(_DETERMINISTIC_SEED).standard_normal((det_n, d))
        det = g / np.linalg.norm(g, axis=1, keepdims=True)
    if rnd_n > 0:
        g = np.random.default_rng([_DETERMINISTIC_SEED, seed]).standard_normal((rnd_n, d))
        rnd = g / np.linalg.norm(g, axis=1, keepdims=True)
        base = np.vstack([det, rnd])
    else:
        base = det
    return np.vstack([base, -base])


def _approx_counts(X: np.ndarray, Q: np.ndarray, U: np.ndarray) -> np.ndarray:
    """min_u #{i : u.X_i <= u.q} for each query row q."""
    n = X.shape[0]
    tol = 1e-12 * max(_scale_of(X), _scale_of(Q))
    best = np.full(Q.shape[0], n, dtype=int)
    chunk = max(1, int(4e6 // max(n, 1)))
    for start in range(0, U.shape[0], chunk):
        Uc = U[start:start + chunk]
        proj = Uc @ X.T  # (c, n)
        proj.sort(axis=1)
        qproj = Q @ Uc.T  # (q, c)
        rows = proj.shape[0]
        span = proj[:, -1] - proj[:, 0] + 1.0
        off = np.cumsum(np.concatenate([[0.0], 4.0 * span[:-1]]))
        shift = (proj[:, 0] - 2.0 * span)
        flat = ((proj - shift[:, None]) + off[:, None]).ravel()
        # Clip queries into their row's slot so far-out points cannot
        # bleed into a neighbouring row of the flattened search array.
        qclip = np.clip(qproj.T, (proj[:, 0] - 0.5)[:, None],
                        (proj[:, -1] + 0.5)[:, None])
        targets = (qclip - shift[:, None] + off[:, None]) + tol
        idx = np.searchsorted(flat, targets.ravel(), side="right")
        counts = idx.reshape(rows, -1) - n * np.arange(rows)[:, None]
        counts = np.clip(counts, 0, n)
        best = np.minimum(best, counts.min(axis=0))
    return best


# ---------------------------------------------------------------------------
# public depth evaluation


def _resolve_mode(mode: str, d: int) -> str:
    if mode == "auto":
        if d == 2:
            return "exact2d"
        if d == 1:
            return "combinatorial"
        return "approximate"
    return mode


def query_depth_counts(Q, P, mode: str = "auto", m: int = 1000,
                       directions=None, seed: int = 0) -> np.ndarray:
    """Integer depth counts (depth * n) of each query row w.r.t. P."""
    X = _points_of(P)
    Q = np.asarray(Q, dtype=float)
    if Q.ndim == 1:
        Q = Q.reshape(1, -1)
    n, d = X.shape
    if Q.shape[1] != d:
        raise DimensionMismatch("query dimension differs from sample")
    mode = _resolve_mode(mode, d)
    if mode == "exact2d":
        if d != 2:
            raise ModeUnsupported("exact2d requires d = 2")
        if Q.shape[0] >= 8:
            return _depth_counts_2d_batch(X, Q)
        return np.array([_depth_count_2d(X, q) for q in Q])
    if mode == "combinatorial":
        if n > _COMBINATORIAL_MAX_N or d > _COMBINATORIAL_MAX_D:
            raise ModeUnsupported(
                f"combinatorial mode is guarded to n <= {_COMBINATORIAL_MAX_N}, "
                f"d <= {_COMBINATORIAL_MAX_D}")
        return np.array([_depth_count_combinatorial(X, q) for q in Q])
    if mode == "approximate":
        U = np.asarray(directions, dtype=float) if directions is not None \
            else direction_set(d, m, seed)
        if U.shape[1] != d:
            raise DimensionMismatch("direction dimension differs from sample")
        return _approx_counts(X, Q, U)
    raise ModeUnsupported(f"unknown depth mode {mode!r}")


def hd(x, P, mode: str = "auto", m: int = 1000, directions=None,
       seed: int = 0) -> float:
    """Sample halfspace depth of a single point, on the grid {0, 1/n, ...}."""
    X = _points_of(P)
    counts = query_depth_counts(np.asarray(x, dtype=float).reshape(1, -1), P,
                                mode=mode, m=m, directions=directions, seed=seed)
    return counts[0] / X.shape[0]


def depth_counts(P, mode: str = "auto", m: int = 1000, seed: int = 0) -> np.ndarray:
    """Integer depth counts of every sample point of P w.r.t. P."""
    X = _points_of(P)
    return query_depth_counts(X, P, mode=mode, m=m, seed=seed)


# ---------------------------------------------------------------------------
# Tukey regions


def _level_from_alpha(alpha: float, n: int) -> int:
    if not (0.0 < alpha <= 1.0):
        raise DomainError("alpha must lie in (0, 1]")
    return max(1, int(math.ceil(alpha * n - 1e-9)))


def _uniform_cut_dirs(d: int, count: int) -> np.ndarray:
    if d == 2:
        ang = 2.0 * np.pi * np.arange(count) / count
        return np.c_[np.cos(ang), np.sin(ang)]
    return direction_set(d, count, seed=0)


def _order_stat_offsets(U: np.ndarray, X: np.ndarray, k: int,
                        chunk_elems: float = 6e6) -> np.ndarray:
    """(n-k+1)-th smallest projection per direction row, chunked."""
    n = X.shape[0]
    out = np.empty(U.shape[0])
    rows = max(1, int(chunk_elems // max(n, 1)))
    for start in range(0, U.shape[0], rows):
        proj = U[start:start + rows] @ X.T
        if k == 1:
            out[start:start + rows] = proj.max(axis=1)
        else:
            out[start:start + rows] = np.partition(proj, n - k, axis=1)[:, n - k]
    return out


def _pair_directions_2d(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    ii, jj = np.triu_indices(n, 1)
    diff = X[jj] - X[ii]
    lens = np.hypot(diff[:, 0], diff[:, 1])
    keep = lens > 1e-13 * _scale_of(X)
    diff = diff[keep]
    lens = lens[keep]
    perp = np.c_[-diff[:, 1], diff[:, 0]] / lens[:, None]
    return perp


def _degenerate_sample_region(X: np.ndarray, k: int) -> Polytope:
    """Region of a sample that is not full-dimensional (affine rank < d)."""
    n, d = X.shape
    c = X.mean(axis=0)
    Xc = X - c
    u_, s_, vt = np.linalg.svd(Xc, full_matrices=False)
    rank = int((s_ > EPSILON * max(1.0, s_[0] if s_.size else 1.0)).sum())
    if rank == 0:
        return Polytope(c.reshape(1, -1), degenerate=True)
    if rank == 1:
        t = Xc @ vt[0]
        ts = np.sort(t)
        lo, hi = ts[k - 1], ts[n - k]
        if lo > hi:
            raise EmptyRegion(f"no point has depth {k}/{n}")
        verts = c + np.array([[lo], [hi]]) @ vt[:1]
        return Polytope(np.unique(verts, axis=0), degenerate=True)
    # Affine rank 2 <= rank < d: cut in the spanned plane, embed back.
    basis = vt[:rank]
    sub = _exact2d_region(Xc @ basis.T, k) if rank == 2 else \
        _directions_region(Xc @ basis.T, k, 2048, 0)
    verts = c + sub.vertices @ basis
    return Polytope(verts, degenerate=True)


def _reduce_and_intersect(U: np.ndarray, b: np.ndarray, X: np.ndarray,
                          sub_idx: np.ndarray, extraU: np.ndarray,
                          extrab: np.ndarray) -> Polytope:
    """Intersect the halfplane family, pruning against a coarse outer hull."""
    span = X.max(axis=0) - X.min(axis=0)
    pad = 0.01 * float(span.max()) + 1e-9
    box = (X.min(axis=0) - pad, X.max(axis=0) + pad)
    U0 = np.vstack([U[sub_idx], extraU])
    b0 = np.concatenate([b[sub_idx], extrab])
    outer = intersect_halfspaces_core(U0, b0, box=box)  # EmptyRegion propagates
    support = (U @ outer.vertices.T).max(axis=1)
    keep = b <= support + EPSILON * _scale_of(X)
    U1 = np.vstack([U[keep], U0])
    b1 = np.concatenate([b[keep], b0])
    return intersect_halfspaces_core(U1, b1, box=box)


def _exact2d_region_full(X: np.ndarray, k: int) -> Polytope:
    """Reference construction: cut along every pair-perpendicular at once."""
    n = X.shape[0]
    perp = _pair_directions_2d(X)
    if perp.shape[0] == 0:
        # all points coincide
        return Polytope(X[:1], degenerate=True)
    U = np.vstack([perp, -perp])
    b = np.empty(U.shape[0])
    rows = perp.shape[0]
    chunk = max(1, int(6e6 // max(n, 1)))
    for start in range(0, rows, chunk):
        stop = min(start + chunk, rows)
        proj = perp[start:stop] @ X.T
        if k > 1:
            part = np.partition(proj, (k - 1, n - k), axis=1)
            b[start:stop] = part[:, n - k]
            b[rows + start:rows + stop] = -part[:, k - 1]
        else:
            b[start:stop] = proj.max(axis=1)
            b[rows + start:rows + stop] = -proj.min(axis=1)
    extraU = _uniform_cut_dirs(2, 128)
    extrab = _order_stat_offsets(extraU, X, k)
    stride = max(1, U.shape[0] // 512)
    sub_idx = np.arange(0, U.shape[0], stride)
    return _reduce_and_intersect(U, b, X, sub_idx, extraU, extrab)


def _region_box(X: np.ndarray):
    span = X.max(axis=0) - X.min(axis=0)
    pad = 0.01 * float(span.max()) + 1e-9
    return X.min(axis=0) - pad, X.max(axis=0) + pad


class _PairAngles:
    """Sorted normal angles of the exact cut family (pair perpendiculars,
    both orientations), for windowed nearest-direction queries."""

    __slots__ = ("angles",)

    def __init__(self, X: np.ndarray):
        perp = _pair_directions_2d(X)
        ang = _sweep_angles(perp)
        flipped = np.where(ang > 0.0, ang - np.pi, ang + np.pi)
        self.angles = np.sort(np.concatenate([ang, flipped]))

    def window(self, center: float, width: float, cap: int = 192) -> np.ndarray:
        a = self.angles
        # normalize [center-width, center+width] into segments of (-pi, pi]
        lo = center - width
        hi = center + width
        segs = []
        for shift in (-2.0 * np.pi, 0.0, 2.0 * np.pi):
            s_lo = max(lo + shift, -np.pi)
            s_hi = min(hi + shift, np.pi)
            if s_lo < s_hi:
                i0 = np.searchsorted(a, s_lo, side="left")
                i1 = np.searchsorted(a, s_hi, side="right")
                if i1 > i0:
                    segs.append(a[i0:i1])
        if not segs:
            return np.empty(0)
        cand = np.concatenate(segs)
        if cand.size > cap:
            d = np.abs(((cand - center + np.pi) % (2.0 * np.pi)) - np.pi)
            cand = cand[np.argsort(d, kind="stable")[:cap]]
        return cand


def _violated_cut(X: np.ndarray, v: np.ndarray, k: int, table: _PairAngles):
    """The family constraint u.x <= s_(n-k+1)(u) most violated at v.

    The exact region is the intersection of the pair-perpendicular cuts,
    so a point outside it violates some family member. Candidate normals
    come from angle windows around the sweep's minimising boundary lines
    through v (where the binding directions live), plus a coarse fan for
    early macroscopic progress. Returns (u, offset) or None.
    """
    n = X.shape[0]
    rel = X - v
    dist = np.hypot(rel[:, 0], rel[:, 1])
    keep = dist > 1e-12 * _scale_of(X, v)
    relk = rel[keep]
    if relk.shape[0] == 0:
        return None
    ts = np.sort(_sweep_angles(relk))
    m = ts.shape[0]
    ext = np.concatenate([ts, ts + 2.0 * np.pi])
    lo_eq = np.searchsorted(ext, ts - _ANGLE_TOL, side="left")
    hi_eq = np.searchsorted(ext, ts + _ANGLE_TOL, side="right")
    lo_op = np.searchsorted(ext, ts + np.pi - _ANGLE_TOL, side="left")
    hi_op = np.searchsorted(ext, ts + np.pi + _ANGLE_TOL, side="right")
    r_plus = hi_eq - lo_eq
    r_minus = hi_op - lo_op
    L = lo_op - hi_eq
    R = m - L - r_plus - r_minus
    cand = np.minimum(L, R) + np.minimum(r_plus, r_minus)
    order = np.argsort(cand, kind="stable")[:4]
    psis = [2.0 * np.pi * np.arange(96) / 96 - np.pi]
    for i in order:
        t = float(ts[i])
        for side in (0.5 * np.pi, -0.5 * np.pi):
            psis.append(table.window(t + side, 0.03, cap=96))
            psis.append(t + side + np.array([1e-3, -1e-3, 1e-5, -1e-5]))
    psi = np.concatenate(psis)
    U = np.c_[np.cos(psi), np.sin(psi)]
    proj = U @ X.T  # (p, n)
    offsets = np.partition(proj, n - k, axis=1)[:, n - k]
    violation = U @ v - offsets
    best = int(np.argmax(violation))
    if violation[best] <= 1e-12 * _scale_of(X, v):
        return None
    return U[best], offsets[best]


_LAZY_MAX_ROUNDS = 60


def _exact2d_region(X: np.ndarray, k: int) -> Polytope:
    """Exact planar Tukey region by lazy constraint generation.

    Seeds with a direction subset, then alternates intersect / certify:
    every polytope vertex is depth-checked by the exact sweep, and each
    failing vertex contributes a strictly separating order-stat cut. The
    loop ends with a certificate: all cuts are valid region constraints
    (so Q contains the region) and all vertices of Q have depth >= k (so
    Q's extreme points, hence Q, lie inside the region). On the rare
    failure to separate it falls back to the full pair-family pass.
    """
    n = X.shape[0]
    if k == 1:
        return convex_hull(X)
    perp = _pair_directions_2d(X)
    if perp.shape[0] == 0:
        return Polytope(X[:1], degenerate=True)
    stride = max(1, perp.shape[0] // 192)
    seed_dirs = np.vstack([perp[::stride], -perp[::stride],
                           _uniform_cut_dirs(2, 128)])
    U = seed_dirs
    b = _order_stat_offsets(U, X, k)
    box = _region_box(X)
    table = _PairAngles(X)
    for _ in range(_LAZY_MAX_ROUNDS):
        poly = intersect_halfspaces_core(U, b, box=box)  # EmptyRegion: exact
        verts = poly.vertices
        counts = (_depth_counts_2d_batch(X, verts) if verts.shape[0] >= 8
                  else np.array([_depth_count_2d(X, v) for v in verts]))
        bad = np.nonzero(counts < k)[0]
        if bad.size == 0:
            return poly
        newU, newb = [], []
        for i in bad:
            hit = _violated_cut(X, verts[i], k, table)
            if hit is None:
                return _exact2d_region_full(X, k)
            newU.append(hit[0])
            newb.append(hit[1])
        U = np.vstack([U, np.asarray(newU)])
        b = np.concatenate([b, np.asarray(newb)])
    return _exact2d_region_full(X, k)


def _directions_region(X: np.ndarray, k: int, m: int, seed: int) -> Polytope:
    d = X.shape[1]
    U = direction_set(d, m, seed)
    b = _order_stat_offsets(U, X, k)
    stride = max(1, U.shape[0] // 512)
    sub_idx = np.arange(0, U.shape[0], stride)
    return _reduce_and_intersect(U, b, X, sub_idx, U[sub_idx][:0], b[sub_idx][:0])


def _region_at_level(X: np.ndarray, k: int, mode: str, m: int, seed: int) -> Polytope:
    n, d = X.shape
    if k > n:
        raise EmptyRegion(f"level {k} exceeds sample size {n}")
    if d == 1:
        ts = np.sort(X[:, 0])
        lo, hi = ts[k - 1], ts[n - k]
        if lo > hi:
            raise EmptyRegion(f"no point has depth {k}/{n}")
        if hi - lo <= EPSILON * _scale_of(X):
            return Polytope(np.array([[(lo + hi) / 2.0]]), degenerate=True)
        return Polytope(np.array([[lo], [hi]]))
    rank_def = np.linalg.matrix_rank(X - X.mean(axis=0),
                                     tol=EPSILON * _scale_of(X) * math.sqrt(n)) < d
    if rank_def:
        return _degenerate_sample_region(X, k)
    if mode == "exact2d":
        if d != 2:
            raise ModeUnsupported("exact2d requires d = 2")
        return _exact2d_region(X, k)
    if mode == "directions":
        return _directions_region(X, k, m, seed)
    raise ModeUnsupported(f"unknown region mode {mode!r}")


def _resolve_region_mode(mode: str, d: int) -> str:
    if mode == "auto":
        return "exact2d" if d == 2 else "directions"
    return mode


def tukey_region(P, alpha: float, mode: str = "auto", m: int = 5000,
                 seed: int = 0) -> DepthRegion:
    """Region of depth >= alpha as a DepthRegion.

    Raises EmptyRegion when no point reaches the level. In the plane the
    default is the exact pair-line construction; otherwise an outer
    approximation over m deterministic-plus-random directions.
    """
    X = _points_of(P)
    n, d = X.shape
    k = _level_from_alpha(alpha, n)
    mode = _resolve_region_mode(mode, d)
    poly = _region_at_level(X, k, mode, m, seed)
    if poly.degenerate:
        n_inside = int(sum(poly.contains(p) for p in X))
    else:
        n_inside = int(poly.contains_many(X).sum())
    return DepthRegion(alpha=alpha, k=k, n=n, region=poly,
                       n_inside=n_inside, mode=mode)


def max_depth_and_median(P, mode: str = "auto", m: int = 5000, seed: int = 0):
    """Maximal depth over the plane and the deepest-region barycenter.

    Returns (pi_n, median, DepthRegion at the top level). The level is
    found by binary search on the grid {1/n, ..., ceil(n/2)/n}, seeded
    from below by the deepest sample point.
    """
    X = _points_of(P)
    n, d = X.shape
    mode_r = _resolve_region_mode(mode, d)
    if d == 1:
        k_top = (n + 1) // 2
        poly = _region_at_level(X, k_top, mode_r, m, seed)
        region = DepthRegion(alpha=k_top / n, k=k_top, n=n, region=poly,
                             n_inside=int(sum(poly.contains(p) for p in X)),
                             mode="exact1d")
        return k_top / n, poly.barycenter, region
    counts = depth_counts(P, mode="exact2d" if mode_r == "exact2d" else "approximate",
                          m=min(m, 2000), seed=seed)
    k_lo = int(counts.max())
    k_hi = max((n + 1) // 2, k_lo)
    cache: dict[int, Polytope] = {}

    def feasible(k: int) -> bool:
        try:
            cache[k] = _region_at_level(X, k, mode_r, m, seed)
            return True
        except EmptyRegion:
            return False

    if not feasible(k_lo):
        # The deepest sample point guarantees feasibility at its own count;
        # numerical slack can hide it, fall back one step at a time.
        while k_lo > 1 and not feasible(k_lo):
            k_lo -= 1
    # The max plane depth usually sits a few grid steps above the deepest
    # sample point, so bracket by doubling steps before the binary search.
    lo, hi = k_lo, k_lo
    step = 1
    while hi < k_hi:
        probe = min(hi + step, k_hi)
        if feasible(probe):
            lo = hi = probe
            step *= 2
        else:
            hi = probe - 1
            break
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid - 1
    poly = cache[lo]
    if poly.degenerate:
        n_inside = int(sum(poly.contains(p) for p in X))
    else:
        n_inside = int(poly.contains_many(X).sum())
    region = DepthRegion(alpha=lo / n, k=lo, n=n, region=poly,
                         n_inside=n_inside, mode=mode_r)
    return lo / n, poly.barycenter, region


def cutoff_for_probability(P, p: float, mode: str = "auto", m: int = 1000,
                           seed: int = 0) -> float:
    """Largest grid depth delta with at least ceil(p n) sample points of
    depth >= delta."""
    if not (0.0 < p <= 1.0):
        raise DomainError("p must lie in (0, 1]")
    X = _points_of(P)
    n = X.shape[0]
    need = max(1, int(math.ceil(p * n - 1e-9)))
    counts = depth_counts(P, mode=mode, m=m, seed=seed)
    order = np.sort(counts)[::-1]
    return int(order[need - 1]) / n
