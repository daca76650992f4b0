"""Closed-form illumination of points onto ellipsoids.

For an ellipsoid E with center mu and shape matrix Sigma, the volume of
conv(E union {x}) depends on x only through the Mahalanobis distance
t = dist(x, mu) and equals vol(E) * g_d(t), where

    g_d(t) = 1 + kappa_d * [ (t/d) (1 - 1/t^2)^{(d+1)/2}
                             - integral_0^{arccos(1/t)} sin^d s ds ],
    kappa_d = Gamma(d/2 + 1) / (sqrt(pi) Gamma((d+1)/2)).

The bracket is the volume of the tangent cone from x minus the cap it
replaces, normalised by the volume of the unit ball. Numerically the
bracket cancels badly as t -> 1 (both terms are O((t-1)^{(d+1)/2})), so
near 1 we use the equivalent single-integral form

    g_d(t) - 1 = (kappa_d / d) * integral_0^{sqrt(t^2-1)} u^d (1+u^2)^{-d/2} du,

whose integrand is positive; the integral is summed as a binomial series.
Away from 1 the sine-power integral is evaluated by its exact recurrence.
g_d is strictly increasing and convex with g_d(1) = 1, g_1(t) = (t+1)/2,
and g_d(t)/t -> kappa_d/d as t -> infinity.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatch, DomainError

__all__ = [
    "Ellipsoid",
    "kappa",
    "cap_sine_integral",
    "cap_sine_integral_quadrature",
    "g",
    "g_excess",
    "g_prime",
    "g_inverse",
    "ellipsoid_volume",
    "illumination_ellipsoid",
    "unit_ball_volume",
]

# Seam between the binomial-series route (T < _SERIES_CUT) and the
# cone-minus-cap route, in terms of T = sqrt(t^2 - 1).
_SERIES_CUT = 0.5


def _check_dim(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise DomainError("dimension must be a positive integer")
    return int(d)


def kappa(d: int) -> float:
    """Gamma(d/2 + 1) / (sqrt(pi) Gamma((d+1)/2)).

    math.gamma is a Lanczos-type rational approximation with relative
    error well below 1e-13 on this argument range.
    """
    d = _check_dim(d)
    return math.gamma(d / 2.0 + 1.0) / (math.sqrt(math.pi) * math.gamma((d + 1) / 2.0))


def unit_ball_volume(d: int) -> float:
    """Volume of the d-dimensional unit ball."""
    d = _check_dim(d)
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def cap_sine_integral(d: int, theta: float) -> float:
    """integral_0^theta sin^d s ds via the exact reduction recurrence."""
    d = _check_dim(d)
    theta = float(theta)
    if theta < 0:
        raise DomainError("theta must be nonnegative")
    s, c = math.sin(theta), math.cos(theta)
    prev, cur = theta, 1.0 - c  # I_0, I_1
    if d == 0:
        return prev
    for k in range(2, d + 1):
        prev, cur = cur, ((k - 1) * prev - s ** (k - 1) * c) / k
    return cur if d >= 1 else prev


def cap_sine_integral_quadrature(d: int, theta: float, tol: float = 1e-12) -> float:
    """Same integral by adaptive Simpson; independent check of the recurrence."""
    d = _check_dim(d)

    def f(s):
        return math.sin(s) ** d

    def simpson(a, b, fa, fm, fb):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, eps, depth):
        m = (a + b) / 2.0
        lm, rm = (a + m) / 2.0, (m + b) / 2.0
        flm, frm = f(lm), f(rm)
        left = simpson(a, m, fa, flm, fm)
        right = simpson(m, b, fm, frm, fb)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return rec(a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + rec(
            m, b, fm, frm, fb, right, eps / 2.0, depth - 1
        )

    if theta == 0.0:
        return 0.0
    a, b = 0.0, float(theta)
    fa, fb = f(a), f(b)
    fm = f((a + b) / 2.0)
    return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 40)


def _j_series(d: int, T: float) -> float:
    """integral_0^T u^d (1+u^2)^{-d/2} du as a binomial series, for T < 1."""
    coef = 1.0
    total = T ** (d + 1) / (d + 1)
    T2 = T * T
    power = T ** (d + 1)
    m = d / 2.0
    for k in range(1, 120):
        coef *= -(m + k - 1.0) / k
        power *= T2
        term = coef * power / (d + 1 + 2 * k)
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return total


def g_excess(d: int, t: float) -> float:
    """g_d(t) - 1, computed without the cancellation that hits g near 1.

    Accurate in relative terms even when the excess is far below machine
    epsilon (it behaves like (t-1)^{(d+1)/2} as t decreases to 1).
    """
    d = _check_dim(d)
    t = float(t)
    if not np.isfinite(t) or t < 1.0:
        raise DomainError("g is defined for t >= 1")
    if t == 1.0:
        return 0.0
    if d == 1:
        return (t - 1.0) / 2.0
    T2 = t * t - 1.0
    kd = kappa(d)
    if T2 < _SERIES_CUT * _SERIES_CUT:
        return kd / d * _j_series(d, math.sqrt(T2))
    theta = math.acos(1.0 / t)
    cone = (t / d) * (T2 / (t * t)) ** ((d + 1) / 2.0)
    return kd * (cone - cap_sine_integral(d, theta))


def g(d: int, t: float) -> float:
    """Normalised illumination of a point at Mahalanobis distance t >= 1."""
    return 1.0 + g_excess(d, t)


def g_prime(d: int, t: float) -> float:
    """Derivative of g_d; equals (kappa_d/d) (1 - 1/t^2)^{(d-1)/2}."""
    d = _check_dim(d)
    t = float(t)
    if not np.isfinite(t) or t < 1.0:
        raise DomainError("g' is defined for t >= 1")
    if d == 1:
        return 0.5
    return kappa(d) / d * (1.0 - 1.0 / (t * t)) ** ((d - 1) / 2.0)


def g_inverse(d: int, y: float) -> float:
    """Inverse of g_d on [1, infinity): the t >= 1 with g_d(t) = y.

    Bisection-bracketed Newton; converges to |g(t) - y| <= 1e-12 (relative
    for large y) and refines t to near machine precision.
    """
    d = _check_dim(d)
    y = float(y)
    if not np.isfinite(y) or y < 1.0:
        raise DomainError("g_inverse is defined for y >= 1")
    if y == 1.0:
        return 1.0
    if d == 1:
        return 2.0 * y - 1.0
    lo = 1.0
    # Linear-growth bound: g(t) ~ (kappa_d/d) t, so this overshoots for
    # large y; doubling covers the rest.
    hi = max(2.0, y * d / kappa(d) + 1.0)
    while g(d, hi) < y:
        hi *= 2.0
        if not np.isfinite(hi):
            raise DomainError("g_inverse bracket overflow")
    t = min(hi, max(lo + 1e-8, y * d / kappa(d)))
    tol_y = 1e-12 * max(1.0, abs(y))
    for _ in range(200):
        val = g(d, t) - y
        if val > 0:
            hi = t
        else:
            lo = t
        if abs(val) <= tol_y and (hi - lo) <= 1e-12 * max(1.0, t):
            break
        deriv = g_prime(d, t)
        if deriv > 0:
            step = t - val / deriv
        else:
            step = (lo + hi) / 2.0
        if not (lo < step < hi):
            step = (lo + hi) / 2.0
        if abs(step - t) <= 1e-16 * max(1.0, t):
            t = step
            break
        t = step
    return t


class Ellipsoid:
    """Solid ellipsoid {x : (x - mu)' Sigma^{-1} (x - mu) <= 1}.

    Caches the Cholesky factor of Sigma (Sigma = L L') and its determinant.
    """

    __slots__ = ("center", "sigma", "chol", "det")

    def __init__(self, center, sigma):
        center = np.asarray(center, dtype=float).reshape(-1)
        sigma = np.asarray(sigma, dtype=float)
        d = center.shape[0]
        if sigma.shape != (d, d):
            raise DimensionMismatch("sigma shape differs from center dimension")
        if not np.allclose(sigma, sigma.T, rtol=1e-10, atol=1e-12):
            raise DomainError("sigma must be symmetric")
        try:
            chol = np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            raise DomainError("sigma must be positive definite") from None
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "chol", chol)
        object.__setattr__(self, "det", float(np.prod(np.diag(chol)) ** 2))

    def __setattr__(self, name, value):
        raise AttributeError("Ellipsoid is immutable")

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def mahalanobis(self, x) -> float:
        """sqrt((x - mu)' Sigma^{-1} (x - mu)) via a Cholesky solve."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise DimensionMismatch("point dimension differs from ellipsoid")
        z = np.linalg.solve(self.chol, x - self.center)
        return float(np.linalg.norm(z))

    def mahalanobis_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        z = np.linalg.solve(self.chol, (X - self.center).T)
        return np.linalg.norm(z, axis=0)

    def push_forward(self, Z) -> np.ndarray:
        """Map unit-ball coordinates to ellipsoid coordinates, mu + L z."""
        Z = np.asarray(Z, dtype=float)
        return self.center + Z @ self.chol.T


def ellipsoid_volume(E: Ellipsoid) -> float:
    """sqrt(det Sigma) times the unit-ball volume."""
    return math.sqrt(E.det) * unit_ball_volume(E.dim)


def illumination_ellipsoid(E: Ellipsoid, x) -> float:
    """Volume of conv(E union {x}): vol(E) for interior x, else vol(E) g_d(t)."""
    t = E.mahalanobis(x)
    vol = ellipsoid_volume(E)
    if t <= 1.0:
        return vol
    return vol * g(E.dim, t)
