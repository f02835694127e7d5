"""Primal-dual Douglas-Rachford iterations in resolvent-generic form.

Two schemes are provided. The first evaluates each linear term and its
adjoint twice per sweep and accesses the resolvents of the primal operator
and of the inverses of both dual operators. The second evaluates each linear
term and its adjoint only once, at the price of an extra dual block. A
reduced variant of the second scheme applies when every parallel-sum slot is
the zero-point reduction; it admits a larger step-size budget.

Both schemes tolerate summable additive errors after each resolvent
evaluation and share the prox-backed constructor :func:`make_prox_problem`.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    BlockVector,
    ErrorSchedule,
    IterateLog,
    LogRow,
    StepConfig,
    StepSizeError,
    as_vector,
)
from .linops import LinOp, op_norm_estimate
from .prox import PointIndicator, ProxFn

__all__ = [
    "DR1",
    "DR2",
    "DR2_REDUCED",
    "BUDGETS",
    "Term",
    "ProblemSpec",
    "Alg1State",
    "Alg2State",
    "DivergenceError",
    "make_prox_problem",
    "validate_steps",
    "weighted_bound_sum",
    "gamma_weights",
    "dr1_step",
    "dr2_step",
    "dr2_reduced_step",
    "run",
    "metric_apply_dr1",
    "vnorm_dr1",
    "metric_rho_dr1",
]

DR1 = "dr1"
DR2 = "dr2"
DR2_REDUCED = "dr2-reduced"

# Strict upper bounds on tau * sum_i sigma_i * ||L_i||^2 per variant.
BUDGETS = {DR1: 4.0, DR2: 0.25, DR2_REDUCED: 1.0}

ResolventMap = Callable[[float, np.ndarray], np.ndarray]


class DivergenceError(FloatingPointError):
    """A non-finite value appeared in an iterate."""

    def __init__(self, quantity: str, iteration: int):
        self.quantity = quantity
        self.iteration = int(iteration)
        super().__init__(f"non-finite value in {quantity} at iteration {iteration}")


@dataclass(frozen=True)
class Term:
    """One composite term: linear map, dual resolvents, shift, reduction flag.

    ``res_b_conj(sigma, y)`` is the resolvent of sigma * B_i^{-1},
    ``res_d_conj(sigma, y)`` the resolvent of sigma * D_i^{-1} and
    ``res_d(gamma, y)`` the resolvent of gamma * D_i. ``d_is_zero`` marks the
    zero-point reduction of the parallel-sum slot.
    """

    L: LinOp
    res_b_conj: ResolventMap
    res_d_conj: ResolventMap
    res_d: ResolventMap
    r: np.ndarray
    d_is_zero: bool = False


@dataclass(frozen=True)
class ProblemSpec:
    """Full problem template: primal resolvent, tilt vector, composite terms."""

    res_a: ResolventMap
    z: np.ndarray
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "z", as_vector(self.z))
        object.__setattr__(self, "terms", tuple(self.terms))
        if len(self.terms) < 1:
            raise ValueError("at least one composite term is required")
        for i, t in enumerate(self.terms):
            if t.L.in_dim != self.z.shape[0]:
                raise ValueError(f"term {i}: L.in_dim {t.L.in_dim} != primal dim {self.z.shape[0]}")
            r = as_vector(t.r)
            if t.L.out_dim != r.shape[0]:
                raise ValueError(f"term {i}: L.out_dim {t.L.out_dim} != r dim {r.shape[0]}")
            if t.L.norm_bound <= 0.0:
                raise ValueError(f"term {i}: operator must be nonzero (norm_bound > 0)")

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def dim(self) -> int:
        return self.z.shape[0]

    @property
    def block_signature(self) -> tuple:
        return tuple(t.L.out_dim for t in self.terms)

    @property
    def norm_bounds(self) -> tuple:
        return tuple(t.L.norm_bound for t in self.terms)


def make_prox_problem(f: ProxFn, z, terms: Sequence) -> ProblemSpec:
    """Build a :class:`ProblemSpec` from prox-capable functions.

    ``terms`` is a sequence of tuples ``(L, g, l, r)``; passing ``l = None``
    selects the zero-point reduction of the parallel-sum slot, whose
    conjugate resolvent is the identity and whose primal resolvent is the
    zero map.
    """
    built = []
    for L, g, l, r in terms:
        if l is None:
            l = PointIndicator()
        built.append(
            Term(
                L=L,
                res_b_conj=lambda s, y, g=g: g.conjugate_prox(y, s),
                res_d_conj=lambda s, y, l=l: l.conjugate_prox(y, s),
                res_d=lambda gma, y, l=l: l.prox(y, gma),
                r=as_vector(np.zeros(L.out_dim) if r is None else r),
                d_is_zero=isinstance(l, PointIndicator) and l.is_origin,
            )
        )
    return ProblemSpec(
        res_a=lambda t, x, f=f: f.prox(x, t),
        z=as_vector(z),
        terms=tuple(built),
    )


def weighted_bound_sum(spec: ProblemSpec, cfg: StepConfig, bounds=None) -> float:
    """tau * sum_i sigma_i * bound_i**2 with declared bounds by default."""
    if bounds is None:
        bounds = spec.norm_bounds
    return cfg.tau * sum(s * b * b for s, b in zip(cfg.sigmas, bounds, strict=True))


def validate_steps(spec: ProblemSpec, cfg: StepConfig, variant: str = DR1, strict: bool = False) -> None:
    """Check the strict step-size budget of the chosen variant.

    Raises :class:`StepSizeError` carrying the computed sum and the budget on
    violation. ``strict`` re-validates with power-iteration norm estimates in
    place of the declared bounds.
    """
    if variant not in BUDGETS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {sorted(BUDGETS)}")
    if len(cfg.sigmas) != spec.m:
        raise ValueError(f"expected {spec.m} sigmas, got {len(cfg.sigmas)}")
    if variant == DR2_REDUCED and not all(t.d_is_zero for t in spec.terms):
        raise ValueError("reduced scheme requires the zero-point reduction in every term")
    budget = BUDGETS[variant]
    total = weighted_bound_sum(spec, cfg)
    if not total < budget:
        raise StepSizeError(total, budget, detail=variant)
    if strict:
        est = tuple(op_norm_estimate(t.L, iters=200, seed=0) for t in spec.terms)
        total_est = weighted_bound_sum(spec, cfg, est)
        if not total_est < budget:
            raise StepSizeError(total_est, budget, detail=f"{variant}, power-iteration estimates")


def gamma_weights(spec: ProblemSpec, cfg: StepConfig) -> tuple:
    """Per-term resolvent weights sigma_i^{-1} * tau * sum_j sigma_j ||L_j||^2."""
    total = weighted_bound_sum(spec, cfg)
    return tuple(total / s for s in cfg.sigmas)


def _as_block(value, signature) -> BlockVector:
    if value is None:
        return BlockVector.zeros(signature)
    if isinstance(value, BlockVector):
        return value
    return BlockVector(value)


@dataclass(frozen=True)
class Alg1State:
    """Iterate bundle of the two-pass scheme, plus the producing step's records.

    ``p1``, ``duals`` and ``residual`` describe the step that produced this
    state: the primal resolvent output, the first-pass dual resolvent
    outputs, and the relaxed update norm in the product space.
    """

    x: np.ndarray
    v: BlockVector
    n: int = 0
    p1: Optional[np.ndarray] = None
    duals: Optional[BlockVector] = None
    residual: Optional[float] = None

    @classmethod
    def initial(cls, spec: ProblemSpec, x0=None, v0=None) -> "Alg1State":
        x = np.zeros(spec.dim) if x0 is None else as_vector(x0)
        v = _as_block(v0, spec.block_signature)
        if x.shape[0] != spec.dim or v.signature != spec.block_signature:
            raise ValueError("starting point does not match the problem dimensions")
        return cls(x=x, v=v, n=0)


@dataclass(frozen=True)
class Alg2State:
    """Iterate bundle of the single-pass scheme (extra dual block y)."""

    x: np.ndarray
    y: BlockVector
    v: BlockVector
    gammas: tuple
    n: int = 0
    p1: Optional[np.ndarray] = None
    duals: Optional[BlockVector] = None
    residual: Optional[float] = None

    @classmethod
    def initial(cls, spec: ProblemSpec, cfg: StepConfig, x0=None, y0=None, v0=None) -> "Alg2State":
        x = np.zeros(spec.dim) if x0 is None else as_vector(x0)
        y = _as_block(y0, spec.block_signature)
        v = _as_block(v0, spec.block_signature)
        if (
            x.shape[0] != spec.dim
            or y.signature != spec.block_signature
            or v.signature != spec.block_signature
        ):
            raise ValueError("starting point does not match the problem dimensions")
        return cls(x=x, y=y, v=v, gammas=gamma_weights(spec, cfg), n=0)


_EXECUTORS: dict = {}


def _n_threads() -> int:
    raw = os.environ.get("PROXSPLIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_terms(fn, m: int) -> list:
    # Per-term work is independent; reductions over the results are always
    # accumulated afterwards in ascending term order, so threaded execution
    # is bit-identical to the sequential loop.
    t = _n_threads()
    if t <= 1 or m <= 1:
        return [fn(i) for i in range(m)]
    ex = _EXECUTORS.get(t)
    if ex is None:
        ex = ThreadPoolExecutor(max_workers=t)
        _EXECUTORS[t] = ex
    return list(ex.map(fn, range(m)))


def _accumulate(parts, dim: int) -> np.ndarray:
    acc = np.zeros(dim)
    for part in parts:
        acc += part
    return acc


def _sq(u) -> float:
    return float(np.dot(u, u))


def dr1_step(spec: ProblemSpec, cfg: StepConfig, errs: Optional[ErrorSchedule], state: Alg1State) -> Alg1State:
    """One sweep of the two-pass scheme (two evaluations of each L_i and L_i*).

    Error vectors, when scheduled, are added right after the corresponding
    resolvent evaluations.
    """
    n = state.n
    tau = cfg.tau
    lam = cfg.lam(n)
    x, v = state.x, state.v
    m = spec.m
    exact = errs is None or errs.is_exact

    adj_v = _map_terms(lambda i: spec.terms[i].L.adjoint(v[i]), m)
    p1 = spec.res_a(tau, x - 0.5 * tau * _accumulate(adj_v, spec.dim) + tau * spec.z)
    if not exact:
        p1 = p1 + errs.a(n)
    w1 = 2.0 * p1 - x

    def first_pass(i):
        term = spec.terms[i]
        s = cfg.sigmas[i]
        p2 = term.res_b_conj(s, v[i] + 0.5 * s * term.L.apply(w1) - s * term.r)
        if not exact:
            p2 = p2 + errs.b(i, n)
        return p2

    p2s = _map_terms(first_pass, m)
    w2s = [2.0 * p2s[i] - v[i] for i in range(m)]

    adj_w2 = _map_terms(lambda i: spec.terms[i].L.adjoint(w2s[i]), m)
    z1 = w1 - 0.5 * tau * _accumulate(adj_w2, spec.dim)
    x_new = x + lam * (z1 - p1)
    u = 2.0 * z1 - w1

    def second_pass(i):
        term = spec.terms[i]
        s = cfg.sigmas[i]
        z2 = term.res_d_conj(s, w2s[i] + 0.5 * s * term.L.apply(u))
        if not exact:
            z2 = z2 + errs.d(i, n)
        return z2

    z2s = _map_terms(second_pass, m)
    v_new = [v[i] + lam * (z2s[i] - p2s[i]) for i in range(m)]

    res_sq = _sq(z1 - p1)
    for i in range(m):
        res_sq += _sq(z2s[i] - p2s[i])
    residual = lam * math.sqrt(res_sq)

    return Alg1State(
        x=x_new,
        v=BlockVector(v_new),
        n=n + 1,
        p1=p1,
        duals=BlockVector(p2s),
        residual=residual,
    )


def dr2_step(spec: ProblemSpec, cfg: StepConfig, errs: Optional[ErrorSchedule], state: Alg2State) -> Alg2State:
    """One sweep of the single-pass scheme (one evaluation of each L_i and L_i*)."""
    n = state.n
    tau = cfg.tau
    lam = cfg.lam(n)
    x, y, v = state.x, state.y, state.v
    m = spec.m
    exact = errs is None or errs.is_exact

    adj_v = _map_terms(lambda i: spec.terms[i].L.adjoint(v[i]), m)
    p1 = spec.res_a(tau, x - tau * (_accumulate(adj_v, spec.dim) - spec.z))
    if not exact:
        p1 = p1 + errs.a(n)
    x_new = x + lam * (p1 - x)
    u = 2.0 * p1 - x

    def per_term(i):
        term = spec.terms[i]
        s = cfg.sigmas[i]
        g = state.gammas[i]
        p2 = term.res_d(g, y[i] + g * v[i])
        if not exact:
            p2 = p2 + errs.d(i, n)
        y_i = y[i] + lam * (p2 - y[i])
        p3 = term.res_b_conj(s, v[i] + s * (term.L.apply(u) - (2.0 * p2 - y[i]) - term.r))
        if not exact:
            p3 = p3 + errs.b(i, n)
        v_i = v[i] + lam * (p3 - v[i])
        return p2, y_i, p3, v_i

    results = _map_terms(per_term, m)

    res_sq = _sq(p1 - x)
    for i, (p2, _, p3, _) in enumerate(results):
        res_sq += _sq(p2 - y[i])
        res_sq += _sq(p3 - v[i])
    residual = lam * math.sqrt(res_sq)

    return Alg2State(
        x=x_new,
        y=BlockVector([r[1] for r in results]),
        v=BlockVector([r[3] for r in results]),
        gammas=state.gammas,
        n=n + 1,
        p1=p1,
        duals=BlockVector([r[2] for r in results]),
        residual=residual,
    )


def dr2_reduced_step(spec: ProblemSpec, cfg: StepConfig, errs: Optional[ErrorSchedule], state: Alg2State) -> Alg2State:
    """Reduced single-pass sweep for problems whose parallel-sum slots all
    carry the zero-point reduction.

    With the extra dual block started at zero the full scheme keeps it at
    zero, so the sweep drops it; the admissible budget grows to 1. The
    trajectory matches :func:`dr2_step` bit for bit on configs both accept.
    """
    if not all(t.d_is_zero for t in spec.terms):
        raise ValueError("reduced scheme requires the zero-point reduction in every term")
    n = state.n
    tau = cfg.tau
    lam = cfg.lam(n)
    x, v = state.x, state.v
    m = spec.m
    exact = errs is None or errs.is_exact

    adj_v = _map_terms(lambda i: spec.terms[i].L.adjoint(v[i]), m)
    p1 = spec.res_a(tau, x - tau * (_accumulate(adj_v, spec.dim) - spec.z))
    if not exact:
        p1 = p1 + errs.a(n)
    x_new = x + lam * (p1 - x)
    u = 2.0 * p1 - x

    def per_term(i):
        term = spec.terms[i]
        s = cfg.sigmas[i]
        p3 = term.res_b_conj(s, v[i] + s * (term.L.apply(u) - term.r))
        if not exact:
            p3 = p3 + errs.b(i, n)
        return p3, v[i] + lam * (p3 - v[i])

    results = _map_terms(per_term, m)

    res_sq = _sq(p1 - x)
    for i, (p3, _) in enumerate(results):
        res_sq += _sq(p3 - v[i])
    residual = lam * math.sqrt(res_sq)

    return Alg2State(
        x=x_new,
        y=state.y,
        v=BlockVector([r[1] for r in results]),
        gammas=state.gammas,
        n=n + 1,
        p1=p1,
        duals=BlockVector([r[0] for r in results]),
        residual=residual,
    )


_STEPS = {DR1: dr1_step, DR2: dr2_step, DR2_REDUCED: dr2_reduced_step}


def _check_state(state, k: int) -> None:
    if not np.all(np.isfinite(state.p1)):
        raise DivergenceError("p1", k)
    for i, block in enumerate(state.duals):
        if not np.all(np.isfinite(block)):
            raise DivergenceError(f"dual resolvent output, term {i}", k)
    if not np.all(np.isfinite(state.x)):
        raise DivergenceError("x", k)
    for i, block in enumerate(state.v):
        if not np.all(np.isfinite(block)):
            raise DivergenceError(f"v, term {i}", k)


def run(
    spec: ProblemSpec,
    cfg: StepConfig,
    errs: Optional[ErrorSchedule] = None,
    variant: str = DR1,
    log_objective: Optional[Callable[[np.ndarray], float]] = None,
    n_iters: Optional[int] = None,
    residual_tol: Optional[float] = None,
    log_stride: int = 1,
    x0=None,
    v0=None,
    y0=None,
) -> IterateLog:
    """Drive one of the splitting iterations and collect an iterate log.

    Row ``k`` records the step taken from state ``k``: the primal resolvent
    output, the dual resolvent outputs, the objective at the primal point
    (when an evaluator is given) and the relaxed update norm. Rows are kept
    every ``log_stride`` steps plus the final one. ``n_iters`` overrides
    ``cfg.max_iters``; ``n_iters = 0`` evaluates a single step from the
    start without applying it. A finite ``residual_tol`` stops the run once
    the update norm drops below it (a non-finite tolerance never stops).
    Non-finite iterates abort with a :class:`DivergenceError` naming the
    first offending quantity.
    """
    validate_steps(spec, cfg, variant)
    if n_iters is None:
        n_iters = cfg.max_iters
    n_iters = int(n_iters)
    if n_iters < 0:
        raise ValueError("n_iters must be nonnegative")
    if log_stride < 1:
        raise ValueError("log_stride must be at least 1")

    if variant == DR1:
        state = Alg1State.initial(spec, x0, v0)
    else:
        state = Alg2State.initial(spec, cfg, x0, y0, v0)
    step = _STEPS[variant]

    log = IterateLog()

    def record(k, st):
        obj = float(log_objective(st.p1)) if log_objective is not None else None
        log.append(LogRow(n=k, primal=st.p1, duals=st.duals, objective=obj, step_residual=st.residual))

    if n_iters == 0:
        probe = step(spec, cfg, errs, state)
        _check_state(probe, 0)
        record(0, probe)
        return log

    for k in range(n_iters):
        state = step(spec, cfg, errs, state)
        _check_state(state, k)
        stop = (
            residual_tol is not None
            and math.isfinite(residual_tol)
            and state.residual < residual_tol
        )
        if k % log_stride == 0 or k == n_iters - 1 or stop:
            record(k, state)
        if stop:
            break
    return log


def metric_apply_dr1(spec: ProblemSpec, cfg: StepConfig, x, v: BlockVector):
    """Apply the self-adjoint metric operator of the two-pass scheme."""
    x = as_vector(x)
    m = spec.m
    adj_v = [spec.terms[i].L.adjoint(v[i]) for i in range(m)]
    out_x = x / cfg.tau - 0.5 * _accumulate(adj_v, spec.dim)
    out_v = [v[i] / cfg.sigmas[i] - 0.5 * spec.terms[i].L.apply(x) for i in range(m)]
    return out_x, BlockVector(out_v)


def vnorm_dr1(spec: ProblemSpec, cfg: StepConfig, x, v: BlockVector) -> float:
    """Norm induced by the two-pass scheme's metric operator."""
    mx, mv = metric_apply_dr1(spec, cfg, x, v)
    q = float(np.dot(as_vector(x), mx)) + v.dot(mv)
    return math.sqrt(max(q, 0.0))


def metric_rho_dr1(spec: ProblemSpec, cfg: StepConfig) -> float:
    """Strong-positivity constant of the two-pass scheme's metric operator."""
    total = weighted_bound_sum(spec, cfg)
    return (1.0 - 0.5 * math.sqrt(total)) * min(1.0 / cfg.tau, *(1.0 / s for s in cfg.sigmas))
