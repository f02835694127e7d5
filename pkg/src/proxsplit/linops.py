"""Bounded linear operators with adjoints and certified norm bounds.

Operators act on flat float64 vectors; image-structured operators reshape
internally (row-major). ``norm_bound`` is a declared upper bound on the
operator norm: step-size validation trusts it, and power iteration
cross-checks it.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import correlate1d

__all__ = [
    "LinOp",
    "MatrixOp",
    "IdentityOp",
    "GradientOp",
    "HaarOp",
    "GaussianBlurOp",
    "CountingOp",
    "gradient_apply",
    "gradient_adjoint",
    "haar_forward",
    "haar_adjoint",
    "gaussian_kernel",
    "op_norm_estimate",
]


class LinOp:
    """Linear map between finite-dimensional spaces of flat vectors."""

    def __init__(self, in_dim: int, out_dim: int, norm_bound: float):
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)
        self.norm_bound = float(norm_bound)
        if self.in_dim <= 0 or self.out_dim <= 0:
            raise ValueError("dimensions must be positive")
        if self.norm_bound < 0.0:
            raise ValueError("norm_bound must be nonnegative")

    def apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)


class MatrixOp(LinOp):
    """Dense matrix operator; the default bound is the exact spectral norm."""

    def __init__(self, a, norm_bound: float | None = None):
        a = np.asarray(a, dtype=float)
        if a.ndim != 2:
            raise ValueError("matrix must be 2-D")
        if norm_bound is None:
            norm_bound = float(np.linalg.norm(a, 2)) if a.size else 0.0
        super().__init__(a.shape[1], a.shape[0], norm_bound)
        self.a = a

    def apply(self, x):
        return self.a @ np.asarray(x, dtype=float)

    def adjoint(self, y):
        return self.a.T @ np.asarray(y, dtype=float)


class IdentityOp(LinOp):
    def __init__(self, dim: int):
        super().__init__(dim, dim, 1.0)

    def apply(self, x):
        return np.asarray(x, dtype=float)

    def adjoint(self, y):
        return np.asarray(y, dtype=float)


def gradient_apply(image: np.ndarray):
    """Forward-difference gradient of a 2-D image.

    Returns the pair (vertical, horizontal) of difference fields, with the
    last row of the first and last column of the second set to zero.
    """
    x = np.asarray(image, dtype=float)
    if x.ndim != 2:
        raise ValueError("expected a 2-D image")
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    p[:-1, :] = x[1:, :] - x[:-1, :]
    q[:, :-1] = x[:, 1:] - x[:, :-1]
    return p, q


def gradient_adjoint(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Adjoint of :func:`gradient_apply` (a negative-divergence stencil)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 2:
        raise ValueError("p and q must be 2-D fields of identical shape")
    out = np.zeros_like(p)
    out[1:, :] += p[:-1, :]
    out[:-1, :] -= p[:-1, :]
    out[:, 1:] += q[:, :-1]
    out[:, :-1] -= q[:, :-1]
    return out


class GradientOp(LinOp):
    """Discrete image gradient as an operator on flat vectors.

    Output is concat(vertical, horizontal). The classical bound on the
    squared norm is 8, so norm_bound = sqrt(8).
    """

    def __init__(self, shape):
        m, n = (int(s) for s in shape)
        super().__init__(m * n, 2 * m * n, math.sqrt(8.0))
        self.shape = (m, n)

    def apply(self, x):
        p, q = gradient_apply(np.asarray(x, dtype=float).reshape(self.shape))
        return np.concatenate([p.ravel(), q.ravel()])

    def adjoint(self, y):
        y = np.asarray(y, dtype=float)
        half = self.in_dim
        p = y[:half].reshape(self.shape)
        q = y[half:].reshape(self.shape)
        return gradient_adjoint(p, q).ravel()


_SQRT2 = math.sqrt(2.0)


def _haar_split(block: np.ndarray, axis: int) -> np.ndarray:
    if axis == 0:
        e, o = block[0::2, :], block[1::2, :]
    else:
        e, o = block[:, 0::2], block[:, 1::2]
    return np.concatenate(((e + o) / _SQRT2, (e - o) / _SQRT2), axis=axis)


def _haar_merge(block: np.ndarray, axis: int) -> np.ndarray:
    out = np.empty_like(block)
    if axis == 0:
        h = block.shape[0] // 2
        s, d = block[:h, :], block[h:, :]
        out[0::2, :] = (s + d) / _SQRT2
        out[1::2, :] = (s - d) / _SQRT2
    else:
        h = block.shape[1] // 2
        s, d = block[:, :h], block[:, h:]
        out[:, 0::2] = (s + d) / _SQRT2
        out[:, 1::2] = (s - d) / _SQRT2
    return out


def _check_haar_dims(shape, levels: int):
    m, n = (int(s) for s in shape)
    step = 2 ** int(levels)
    if m % step or n % step:
        raise ValueError(f"grid dims {m}x{n} must be divisible by {step} for {levels} levels")
    return m, n


def haar_forward(image: np.ndarray, levels: int = 4) -> np.ndarray:
    """Orthonormal multilevel 2-D Haar analysis, returned as a flat vector."""
    x = np.asarray(image, dtype=float)
    if x.ndim != 2:
        raise ValueError("expected a 2-D image")
    m, n = _check_haar_dims(x.shape, levels)
    c = x.copy()
    cm, cn = m, n
    for _ in range(levels):
        c[:cm, :cn] = _haar_split(_haar_split(c[:cm, :cn], 0), 1)
        cm //= 2
        cn //= 2
    return c.ravel()


def haar_adjoint(coeffs: np.ndarray, shape, levels: int = 4) -> np.ndarray:
    """Inverse (= adjoint, by orthonormality) of :func:`haar_forward`."""
    m, n = _check_haar_dims(shape, levels)
    c = np.asarray(coeffs, dtype=float).reshape(m, n).copy()
    for k in range(levels - 1, -1, -1):
        cm, cn = m >> k, n >> k
        c[:cm, :cn] = _haar_merge(_haar_merge(c[:cm, :cn], 1), 0)
    return c


class HaarOp(LinOp):
    """Multilevel 2-D Haar transform on flat vectors.

    The transform is orthonormal, so its true operator norm is 1; a smaller
    declared norm_bound may be passed to reproduce published step-size
    arithmetic that assumes one.
    """

    def __init__(self, shape, levels: int = 4, norm_bound: float = 1.0):
        m, n = _check_haar_dims(shape, levels)
        super().__init__(m * n, m * n, norm_bound)
        self.shape = (m, n)
        self.levels = int(levels)

    def apply(self, x):
        return haar_forward(np.asarray(x, dtype=float).reshape(self.shape), self.levels)

    def adjoint(self, y):
        return haar_adjoint(y, self.shape, self.levels).ravel()


def gaussian_kernel(size: int, std: float) -> np.ndarray:
    """1-D Gaussian kernel of odd length, normalized to sum 1."""
    size = int(size)
    if size < 1 or size % 2 == 0:
        raise ValueError("kernel size must be a positive odd integer")
    if std <= 0.0:
        raise ValueError("std must be strictly positive")
    half = size // 2
    t = np.arange(-half, half + 1, dtype=float)
    k = np.exp(-(t * t) / (2.0 * std * std))
    return k / k.sum()


class GaussianBlurOp(LinOp):
    """Separable Gaussian averaging with reflected boundary handling.

    The boundary repeats the edge sample, which makes the induced matrix
    symmetric for the symmetric kernel: the operator is its own adjoint and
    all matrix rows sum to one, so constants are fixed and the norm is 1.
    """

    def __init__(self, shape, kernel_size: int = 9, std: float = 4.0):
        m, n = (int(s) for s in shape)
        super().__init__(m * n, m * n, 1.0)
        self.shape = (m, n)
        self.kernel = gaussian_kernel(kernel_size, std)

    def apply(self, x):
        img = np.asarray(x, dtype=float).reshape(self.shape)
        out = correlate1d(img, self.kernel, axis=0, mode="reflect")
        out = correlate1d(out, self.kernel, axis=1, mode="reflect")
        return out.ravel()

    adjoint = apply


class CountingOp(LinOp):
    """Wrapper counting apply/adjoint evaluations (test instrumentation)."""

    def __init__(self, inner: LinOp):
        super().__init__(inner.in_dim, inner.out_dim, inner.norm_bound)
        self.inner = inner
        self.n_apply = 0
        self.n_adjoint = 0

    def apply(self, x):
        self.n_apply += 1
        return self.inner.apply(x)

    def adjoint(self, y):
        self.n_adjoint += 1
        return self.inner.adjoint(y)

    def reset(self):
        self.n_apply = 0
        self.n_adjoint = 0


def op_norm_estimate(op: LinOp, iters: int = 100, seed: int = 0) -> float:
    """Power-iteration lower estimate of the operator norm.

    Runs on op composed with its adjoint from a seeded start vector; the
    returned estimate is nondecreasing in ``iters`` and never exceeds the
    true norm.
    """
    if iters < 1:
        raise ValueError("iters must be at least 1")
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(op.out_dim)
    ny = np.linalg.norm(y)
    if ny == 0.0:
        y = np.zeros(op.out_dim)
        y[0] = 1.0
        ny = 1.0
    y = y / ny
    best = 0.0
    for _ in range(int(iters)):
        z = op.apply(op.adjoint(y))
        # Rayleigh quotient of op*op^T at the unit vector y
        val = math.sqrt(max(float(np.dot(y, z)), 0.0))
        best = max(best, val)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return best
        y = z / nz
    return best
