"""Proximal maps for the function zoo used by the solvers and experiments.

Every function here is proper, closed and convex with a closed-form prox, so
resolvents never need an inner iterative solve. Conjugate proxes come for
free through the Moreau decomposition; subclasses only implement ``prox``.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = [
    "ProxFn",
    "BoxIndicator",
    "BallIndicator",
    "LineIndicator",
    "PointIndicator",
    "WeightedL1",
    "EuclideanNorm",
    "L21Norm",
    "TiltedFn",
    "prox",
    "prox_conjugate",
    "project_pixel_discs",
    "distance_to_set",
]

# Slack used when deciding set membership for indicator evaluation.
_MEMBERSHIP_ATOL = 1e-12


class ProxFn:
    """A closed convex function represented by its proximal map."""

    is_indicator = False

    def prox(self, x: np.ndarray, gamma: float) -> np.ndarray:
        raise NotImplementedError

    def conjugate_prox(self, x: np.ndarray, gamma: float) -> np.ndarray:
        """Prox of ``gamma * f*`` at x, via Moreau's decomposition."""
        x = np.asarray(x, dtype=float)
        return x - gamma * self.prox(x / gamma, 1.0 / gamma)

    def __call__(self, x) -> float:
        raise NotImplementedError(f"{type(self).__name__} has no value map")


class BoxIndicator(ProxFn):
    """Indicator of the axis-aligned box [lo, hi] (componentwise bounds)."""

    is_indicator = True

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if np.any(self.lo > self.hi):
            raise ValueError("box bounds require lo <= hi componentwise")

    def prox(self, x, gamma=1.0):
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        inside = np.all(x >= self.lo - _MEMBERSHIP_ATOL) and np.all(x <= self.hi + _MEMBERSHIP_ATOL)
        return 0.0 if inside else math.inf


class BallIndicator(ProxFn):
    """Indicator of the closed Euclidean ball with given center and radius."""

    is_indicator = True

    def __init__(self, center, radius: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        if self.radius <= 0.0:
            raise ValueError("radius must be strictly positive")

    def prox(self, x, gamma=1.0):
        x = np.asarray(x, dtype=float)
        u = x - self.center
        nu = np.linalg.norm(u)
        if nu <= self.radius:
            return x
        return self.center + (self.radius / nu) * u

    def __call__(self, x) -> float:
        nu = np.linalg.norm(np.asarray(x, dtype=float) - self.center)
        return 0.0 if nu <= self.radius + _MEMBERSHIP_ATOL else math.inf


class LineIndicator(ProxFn):
    """Indicator of the affine line {base + t * direction : t real}."""

    is_indicator = True

    def __init__(self, base, direction):
        self.base = np.asarray(base, dtype=float)
        self.direction = np.asarray(direction, dtype=float)
        nd = np.linalg.norm(self.direction)
        if nd == 0.0:
            raise ValueError("direction must be nonzero")
        self._dir_sq = float(nd * nd)

    def prox(self, x, gamma=1.0):
        x = np.asarray(x, dtype=float)
        t = float(np.dot(x - self.base, self.direction)) / self._dir_sq
        return self.base + t * self.direction

    def __call__(self, x) -> float:
        d = np.linalg.norm(np.asarray(x, dtype=float) - self.prox(x))
        return 0.0 if d <= _MEMBERSHIP_ATOL else math.inf


class PointIndicator(ProxFn):
    """Indicator of a single point; the origin when no point is given.

    Its prox is the constant map onto the point; with the origin, the
    conjugate is the zero function, whose prox is the identity.
    """

    is_indicator = True

    def __init__(self, point=None):
        self.point = None if point is None else np.asarray(point, dtype=float)

    @property
    def is_origin(self) -> bool:
        return self.point is None or not np.any(self.point)

    def prox(self, x, gamma=1.0):
        x = np.asarray(x, dtype=float)
        if self.point is None:
            return np.zeros_like(x)
        return np.broadcast_to(self.point, x.shape).astype(float)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        target = np.zeros_like(x) if self.point is None else self.point
        return 0.0 if np.linalg.norm(x - target) <= _MEMBERSHIP_ATOL else math.inf


def _soft_threshold(z: np.ndarray, t: float) -> np.ndarray:
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


class WeightedL1(ProxFn):
    """weight * ||x - shift||_1; prox is soft thresholding around the shift."""

    def __init__(self, weight: float = 1.0, shift=0.0):
        self.weight = float(weight)
        if self.weight <= 0.0:
            raise ValueError("weight must be strictly positive")
        self.shift = np.asarray(shift, dtype=float)

    def prox(self, x, gamma):
        x = np.asarray(x, dtype=float)
        z = x - self.shift
        return self.shift + _soft_threshold(z, gamma * self.weight)

    def __call__(self, x) -> float:
        return self.weight * float(np.abs(np.asarray(x, dtype=float) - self.shift).sum())


class EuclideanNorm(ProxFn):
    """The Euclidean norm ||x||; prox is the block soft threshold."""

    def prox(self, x, gamma):
        x = np.asarray(x, dtype=float)
        n = np.linalg.norm(x)
        if n <= gamma:
            return np.zeros_like(x)
        return (1.0 - gamma / n) * x

    def __call__(self, x) -> float:
        return float(np.linalg.norm(np.asarray(x, dtype=float)))


class L21Norm(ProxFn):
    """weight * sum_k sqrt(p_k^2 + q_k^2) on stacked pair fields concat(p, q).

    The argument holds two same-length fields back to back, one value pair
    per pixel; prox shrinks each pair radially.
    """

    def __init__(self, weight: float, n_pairs: int):
        self.weight = float(weight)
        self.n_pairs = int(n_pairs)
        if self.weight <= 0.0:
            raise ValueError("weight must be strictly positive")
        if self.n_pairs <= 0:
            raise ValueError("n_pairs must be positive")

    def _split(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[0] != 2 * self.n_pairs:
            raise ValueError(f"expected dim {2 * self.n_pairs}, got {x.shape[0]}")
        return x[: self.n_pairs], x[self.n_pairs :]

    def prox(self, x, gamma):
        p, q = self._split(x)
        r = np.hypot(p, q)
        t = gamma * self.weight
        factor = np.zeros_like(r)
        mask = r > t
        factor[mask] = 1.0 - t / r[mask]
        return np.concatenate([factor * p, factor * q])

    def __call__(self, x) -> float:
        p, q = self._split(x)
        return self.weight * float(np.hypot(p, q).sum())


class TiltedFn(ProxFn):
    """base(x) + <tilt, x>; prox shifts the argument by gamma * tilt."""

    def __init__(self, base: ProxFn, tilt):
        self.base = base
        self.tilt = np.asarray(tilt, dtype=float)

    def prox(self, x, gamma):
        x = np.asarray(x, dtype=float)
        return self.base.prox(x - gamma * self.tilt, gamma)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return self.base(x) + float(np.dot(self.tilt, x))


def prox(f: ProxFn, gamma: float, x) -> np.ndarray:
    """Minimizer of gamma * f(y) + 0.5 * ||y - x||^2."""
    if gamma <= 0.0:
        raise ValueError("gamma must be strictly positive")
    return f.prox(np.asarray(x, dtype=float), float(gamma))


def prox_conjugate(f: ProxFn, gamma: float, x) -> np.ndarray:
    """Prox of gamma * f* at x, computed as x - gamma * prox(f, 1/gamma, x/gamma)."""
    if gamma <= 0.0:
        raise ValueError("gamma must be strictly positive")
    return f.conjugate_prox(np.asarray(x, dtype=float), float(gamma))


def project_pixel_discs(alpha: float, p, q):
    """Per-pixel radial projection of (p, q) pairs onto discs of radius alpha.

    Pairs already inside their disc (including the boundary) are fixed
    points, so the map is exactly idempotent.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be strictly positive")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("p and q must have identical shape")
    r = np.hypot(p, q)
    scale = alpha / np.maximum(alpha, r)
    return p * scale, q * scale


def distance_to_set(omega: ProxFn, x) -> float:
    """Euclidean distance from x to the closed convex set indicated by omega."""
    if not omega.is_indicator:
        raise ValueError("distance_to_set requires an indicator function")
    x = np.asarray(x, dtype=float)
    return float(np.linalg.norm(x - omega.prox(x, 1.0)))
