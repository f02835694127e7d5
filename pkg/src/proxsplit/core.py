"""Vectors, product-space arithmetic, step configuration and error schedules.

Everything in this module is a plain value over float64 numpy arrays: objects
are never mutated after construction, so they can be shared freely between
threads and across solver runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "BlockVector",
    "ErrorSchedule",
    "IterateLog",
    "LogRow",
    "StepSizeError",
    "StepConfig",
    "as_vector",
    "dot",
    "make_power_error_schedule",
]


class StepSizeError(ValueError):
    """Raised when step sizes violate the admissible budget.

    Carries the computed value of ``tau * sum_i sigma_i * bound_i**2`` and the
    budget it had to stay strictly below.
    """

    def __init__(self, total: float, budget: float, detail: str = ""):
        self.total = float(total)
        self.budget = float(budget)
        msg = (
            f"step-size budget violated: tau * sum(sigma_i * bound_i^2) = "
            f"{self.total:.12g}, required < {self.budget:.12g}"
        )
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


def as_vector(x) -> np.ndarray:
    """Coerce to a 1-D float64 array without copying when possible."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    return v


def dot(u, v) -> float:
    """Euclidean inner product of two vectors of equal dimension."""
    u = as_vector(u)
    v = as_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return float(np.dot(u, v))


class BlockVector:
    """Element of a product space G_1 x ... x G_m, stored block by block.

    Supports the vector-space operations the solvers need; the inner product
    is the sum of per-block inner products. Instances are treated as
    immutable values: arithmetic returns new objects and the stored arrays
    must not be written to.
    """

    __slots__ = ("blocks",)

    def __init__(self, blocks: Sequence[np.ndarray]):
        self.blocks = tuple(as_vector(b) for b in blocks)

    @classmethod
    def zeros(cls, signature: Sequence[int]) -> "BlockVector":
        return cls([np.zeros(int(d)) for d in signature])

    @property
    def signature(self) -> tuple:
        return tuple(b.shape[0] for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.blocks[i]

    def __iter__(self):
        return iter(self.blocks)

    def __add__(self, other: "BlockVector") -> "BlockVector":
        return BlockVector([a + b for a, b in zip(self.blocks, other.blocks, strict=True)])

    def __sub__(self, other: "BlockVector") -> "BlockVector":
        return BlockVector([a - b for a, b in zip(self.blocks, other.blocks, strict=True)])

    def __mul__(self, s: float) -> "BlockVector":
        return BlockVector([s * b for b in self.blocks])

    __rmul__ = __mul__

    def __neg__(self) -> "BlockVector":
        return BlockVector([-b for b in self.blocks])

    def dot(self, other: "BlockVector") -> float:
        return float(sum(np.dot(a, b) for a, b in zip(self.blocks, other.blocks, strict=True)))

    def norm(self) -> float:
        return math.sqrt(max(self.dot(self), 0.0))

    def copy(self) -> "BlockVector":
        return BlockVector([b.copy() for b in self.blocks])

    def __repr__(self):
        return f"BlockVector(signature={self.signature})"


def _as_schedule(lam) -> Callable[[int], float]:
    if callable(lam):
        return lam
    value = float(lam)
    return lambda n: value


@dataclass(frozen=True)
class StepConfig:
    """Step sizes, relaxation schedule and iteration budget for a solver run.

    ``lambda_schedule`` may be given as a constant or as a total function of
    the iteration counter. When ``norm_bounds`` (declared operator-norm
    bounds, one per term) are supplied, construction enforces the strict
    budget inequality ``tau * sum_i sigmas[i] * norm_bounds[i]**2 <
    bound_budget``.
    """

    tau: float
    sigmas: tuple
    lambda_schedule: Callable[[int], float]
    max_iters: int
    bound_budget: float = 4.0
    norm_bounds: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "sigmas", tuple(float(s) for s in np.atleast_1d(self.sigmas)))
        object.__setattr__(self, "lambda_schedule", _as_schedule(self.lambda_schedule))
        object.__setattr__(self, "max_iters", int(self.max_iters))
        object.__setattr__(self, "bound_budget", float(self.bound_budget))
        if self.norm_bounds is not None:
            object.__setattr__(self, "norm_bounds", tuple(float(b) for b in self.norm_bounds))

        if self.tau <= 0.0:
            raise ValueError("tau must be strictly positive")
        if not self.sigmas or any(s <= 0.0 for s in self.sigmas):
            raise ValueError("every sigma must be strictly positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be a positive integer")
        if self.bound_budget <= 0.0:
            raise ValueError("bound_budget must be strictly positive")
        for n in range(self.max_iters):
            lam = float(self.lambda_schedule(n))
            if not 0.0 < lam < 2.0:
                raise ValueError(f"relaxation out of (0, 2) at n={n}: {lam}")
        if self.norm_bounds is not None:
            if len(self.norm_bounds) != len(self.sigmas):
                raise ValueError("norm_bounds and sigmas must have equal length")
            total = self.tau * sum(s * b * b for s, b in zip(self.sigmas, self.norm_bounds))
            if not total < self.bound_budget:
                raise StepSizeError(total, self.bound_budget)

    def lam(self, n: int) -> float:
        return float(self.lambda_schedule(n))


@dataclass(frozen=True)
class ErrorSchedule:
    """Additive perturbations injected after each resolvent evaluation.

    ``a(n)`` perturbs the primal resolvent, ``b(i, n)`` and ``d(i, n)`` the
    two dual resolvents of term ``i``. The exact schedule (``is_exact``)
    makes solvers skip the additions entirely, so an exact run is
    bit-identical to a run with no error machinery attached.
    """

    a: Callable[[int], np.ndarray]
    b: Callable[[int, int], np.ndarray]
    d: Callable[[int, int], np.ndarray]
    summability_exponent: float = math.inf
    is_exact: bool = False

    @staticmethod
    def exact() -> "ErrorSchedule":
        return ErrorSchedule(
            a=lambda n: 0.0,
            b=lambda i, n: 0.0,
            d=lambda i, n: 0.0,
            summability_exponent=math.inf,
            is_exact=True,
        )


def _seeded_unit(key, dim: int) -> np.ndarray:
    rng = np.random.default_rng(key)
    v = rng.standard_normal(dim)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        v = np.zeros(dim)
        v[0] = 1.0
        nv = 1.0
    return v / nv


def make_power_error_schedule(c: float, p: float, dims, seed: int) -> ErrorSchedule:
    """Error vectors of norm exactly ``c * (n+1)**(-p)`` in seeded directions.

    ``dims`` is the space signature ``(primal_dim, block_dims)``. Requires
    ``p > 1`` so that the generated norms are summable; ``c = 0`` returns the
    exact schedule.
    """
    if p <= 1.0:
        raise ValueError("error schedule requires p > 1 (summability)")
    if c < 0.0:
        raise ValueError("c must be nonnegative")
    if c == 0.0:
        return ErrorSchedule.exact()
    dim_h = int(dims[0])
    g_dims = tuple(int(d) for d in dims[1])
    seed = int(seed)

    def mag(n: int) -> float:
        return c * float(n + 1) ** (-p)

    return ErrorSchedule(
        a=lambda n: mag(n) * _seeded_unit((seed, 0, 0, n), dim_h),
        b=lambda i, n: mag(n) * _seeded_unit((seed, 1, i, n), g_dims[i]),
        d=lambda i, n: mag(n) * _seeded_unit((seed, 2, i, n), g_dims[i]),
        summability_exponent=float(p),
        is_exact=False,
    )


@dataclass(frozen=True)
class LogRow:
    """One logged iterate: counter, primal point, dual block, objective, residual."""

    n: int
    primal: np.ndarray
    duals: BlockVector
    objective: Optional[float]
    step_residual: float


@dataclass
class IterateLog:
    """Trajectory record with rows strictly increasing in the counter."""

    rows: list = field(default_factory=list)

    def append(self, row: LogRow) -> None:
        if self.rows and row.n <= self.rows[-1].n:
            raise ValueError("log rows must be strictly increasing in n")
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def final(self) -> LogRow:
        if not self.rows:
            raise ValueError("empty log")
        return self.rows[-1]
