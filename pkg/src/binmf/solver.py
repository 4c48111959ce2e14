"""Solve the weighted problem for one fixed alpha.

    min_{E >= 0, A >= 0}  alpha J_X(E, A) + (1 - alpha) J_H(E, A)

Iterations alternate A- and E-updates until either the aggregated objective
reaches a local minimum of its trace or the iteration budget runs out.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .kernels import KernelSpec
from .matrix import NonNegMatrix, as_array
from .objectives import ObjectiveVector, _factors, check_alpha, eval_aggregated, gradient_a
from .updates import State, UpdateRule, _e_gradient, coordinate_descent_step

log = logging.getLogger(__name__)

STOP_STATIONARY = "stationary"
STOP_MAX_ITER = "max_iter"


@dataclass(frozen=True)
class SolveConfig:
    rank: int
    alpha: float
    kernel: KernelSpec
    rule: UpdateRule = field(default_factory=UpdateRule)
    max_iter: int = 300
    seed: int = 0
    init_scale: float = 1.0
    # Off only for diagnostics that need the full raw trace.
    stop_on_stationary: bool = True

    def __post_init__(self):
        if int(self.rank) != self.rank or self.rank < 1:
            raise ConfigError(f"rank must be a positive integer, got {self.rank!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError(f"max_iter must be a positive integer, got {self.max_iter!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not self.init_scale > 0:
            raise ConfigError(f"init_scale must be positive, got {self.init_scale!r}")
        check_alpha(self.alpha)
        self.rule.check_kernel(self.kernel)

    def with_alpha(self, alpha: float, seed: int | None = None) -> SolveConfig:
        return replace(self, alpha=alpha, seed=self.seed if seed is None else seed)

    def to_dict(self) -> dict:
        return {
            "rank": int(self.rank),
            "alpha": float(self.alpha),
            "kernel": self.kernel.to_dict(),
            "rule": self.rule.to_dict(),
            "max_iter": int(self.max_iter),
            "seed": int(self.seed),
            "init_scale": float(self.init_scale),
            "stop_on_stationary": bool(self.stop_on_stationary),
        }

    @classmethod
    def from_dict(cls, d: dict) -> SolveConfig:
        d = dict(d)
        d["kernel"] = KernelSpec.from_dict(d["kernel"])
        d["rule"] = UpdateRule(**d["rule"])
        return cls(**d)


@dataclass(frozen=True)
class SolutionRecord:
    e: NonNegMatrix
    a: NonNegMatrix
    objective: ObjectiveVector
    iterations_run: int
    trace: tuple[float, ...]
    stop_reason: str
    seed: int

    @property
    def alpha(self) -> float:
        return self.objective.alpha


def init_factors(L: int, N: int, T: int, seed: int, scale: float = 1.0):
    """Random strictly positive ``(E, A)`` with entries uniform on ``(0, scale]``.

    Uses numpy's PCG64 generator; E is drawn first, then A, both row-major.
    """
    for name, v in (("L", L), ("N", N), ("T", T)):
        if int(v) != v or v < 1:
            raise ConfigError(f"{name} must be a positive integer, got {v!r}")
    if not scale > 0:
        raise ConfigError(f"scale must be positive, got {scale!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    # random() samples [0, 1); flip it to (0, 1]
    E = scale * (1.0 - rng.random((L, N)))
    A = scale * (1.0 - rng.random((N, T)))
    return NonNegMatrix(E, copy=False), NonNegMatrix(A, copy=False)


def solve(x, cfg: SolveConfig) -> SolutionRecord:
    X = as_array(x)
    L, T = X.shape
    cfg.rule.check_kernel(cfg.kernel)
    E0, A0 = init_factors(L, cfg.rank, T, cfg.seed, cfg.init_scale)
    state = State(X, np.array(E0), np.array(A0), cfg.kernel, float(cfg.alpha))

    def objective(s):
        return eval_aggregated(X, s.e, s.a, cfg.kernel, cfg.alpha)

    trace = [objective(state).j_aggregated]
    stop_reason = STOP_MAX_ITER
    for it in range(1, cfg.max_iter + 1):
        candidate = coordinate_descent_step(state, cfg.rule)
        j_new = objective(candidate).j_aggregated
        # J^(n) <= min(J^(n-1), J^(n+1)) with n = it - 1: keep iterate n
        if cfg.stop_on_stationary and it >= 2 and trace[-1] <= trace[-2] and j_new >= trace[-1]:
            stop_reason = STOP_STATIONARY
            break
        state = candidate
        trace.append(j_new)
    iterations = len(trace) - 1
    log.debug("alpha=%g stopped after %d iterations (%s), J=%.6e",
              cfg.alpha, iterations, stop_reason, trace[-1])
    return SolutionRecord(
        e=NonNegMatrix(state.e, copy=False),
        a=NonNegMatrix(state.a, copy=False),
        objective=objective(state),
        iterations_run=iterations,
        trace=tuple(trace),
        stop_reason=stop_reason,
        seed=cfg.seed,
    )


def kkt_residual(x, e, a, k: KernelSpec, alpha: float) -> float:
    """Largest ``|min(value, gradient)|`` over every entry of E and A."""
    X, E, A = _factors(x, e, a)
    alpha = check_alpha(alpha)
    ga = gradient_a(X, E, A, k, alpha)
    ge = _e_gradient(X, E, A, k, alpha)
    return float(max(np.max(np.abs(np.minimum(A, ga))), np.max(np.abs(np.minimum(E, ge)))))
