"""Single optimization iterations for the weighted bi-objective NMF.

Two modes:

* ``additive``: projected gradient steps with fixed step sizes, any kernel.
* ``multiplicative``: ratio updates, gaussian kernel only.

Every block update reads only the matrices as they were before the block
started (Jacobi style), so the visiting order of entries does not matter.
An outer iteration updates A with E held fixed, then E with the new A.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, NumericError
from .kernels import KernelSpec, gram
from .matrix import as_array
from .objectives import _factors, check_alpha, gradient_a, gradient_e, gradient_e_gaussian

log = logging.getLogger(__name__)

MODES = ("multiplicative", "additive")


@dataclass(frozen=True)
class UpdateRule:
    mode: str = "multiplicative"
    step_a: float = 1e-3
    step_e: float = 1e-3
    epsilon: float = 1e-12

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown update mode {self.mode!r}; expected one of {MODES}")
        if not (self.step_a > 0 and self.step_e > 0):
            raise ConfigError("step sizes must be positive")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")

    def check_kernel(self, kernel: KernelSpec):
        if self.mode == "multiplicative" and kernel.family != "gaussian":
            raise ConfigError(
                f"multiplicative updates require the gaussian kernel, got {kernel.family}; "
                "use mode='additive' for other kernels")

    def to_dict(self) -> dict:
        return {"mode": self.mode, "step_a": self.step_a, "step_e": self.step_e,
                "epsilon": self.epsilon}


@dataclass(frozen=True)
class State:
    """Everything one outer iteration needs. ``e`` and ``a`` are plain arrays."""

    x: np.ndarray
    e: np.ndarray
    a: np.ndarray
    kernel: KernelSpec
    alpha: float


def _ratio(old, num, den, eps, what):
    active = den >= eps
    stalled = ~active & (num > 0)
    if np.any(stalled):
        log.warning("%d stalled %s entries (denominator below %g); left unchanged",
                    int(stalled.sum()), what, eps)
    q = np.divide(num, den, out=np.ones_like(num), where=active)
    return old * q


def a_quotient(x, e, a, k: KernelSpec, alpha: float, eps: float = 1e-12, Kx=None, Ke=None):
    """Numerator and denominator of the multiplicative A-rule, each shape (N, T)."""
    X, E, A = _factors(x, e, a)
    if Kx is None:
        Kx = gram(k, E, X)
    if Ke is None:
        Ke = gram(k, E, E)
    num = alpha * (E.T @ X) + (1.0 - alpha) * Kx
    den = alpha * ((E.T @ E) @ A) + (1.0 - alpha) * (Ke @ A)
    return num, den


def e_quotient(x, e, a, k: KernelSpec, alpha: float, Kx=None, Ke=None):
    """Numerator and denominator of the multiplicative E-rule, each shape (L, N)."""
    X, E, A = _factors(x, e, a)
    if Kx is None:
        Kx = gram(k, E, X)
    if Ke is None:
        Ke = gram(k, E, E)
    s2 = k.sigma ** 2
    W = A @ A.T
    Bx = A * Kx
    C = W * Ke
    num = alpha * s2 * (X @ A.T) + (1.0 - alpha) * (X @ Bx.T + E * C.sum(axis=1))
    den = alpha * s2 * (E @ W) + (1.0 - alpha) * (E * Bx.sum(axis=1) + E @ C.T)
    return num, den


def update_a_multiplicative(x, e, a, k: KernelSpec, alpha: float, eps: float = 1e-12) -> np.ndarray:
    if k.family != "gaussian":
        raise ConfigError("multiplicative A-update requires the gaussian kernel")
    alpha = check_alpha(alpha)
    num, den = a_quotient(x, e, a, k, alpha, eps)
    return _ratio(as_array(a), num, den, eps, "A")


def update_e_multiplicative(x, e, a, k: KernelSpec, alpha: float, eps: float = 1e-12) -> np.ndarray:
    if k.family != "gaussian":
        raise ConfigError("multiplicative E-update requires the gaussian kernel")
    alpha = check_alpha(alpha)
    num, den = e_quotient(x, e, a, k, alpha)
    return _ratio(as_array(e), num, den, eps, "E")


def _e_gradient(x, e, a, k, alpha):
    if k.family == "gaussian":
        return gradient_e_gaussian(x, e, a, k, alpha)
    return gradient_e(x, e, a, k, alpha)


def update_a_additive(x, e, a, k: KernelSpec, alpha: float, step: float) -> np.ndarray:
    g = gradient_a(x, e, a, k, check_alpha(alpha))
    if not np.all(np.isfinite(g)):
        n, t = np.argwhere(~np.isfinite(g))[0]
        raise NumericError(f"non-finite gradient at a[{n}, {t}]")
    return np.maximum(as_array(a) - step * g, 0.0)


def update_e_additive(x, e, a, k: KernelSpec, alpha: float, step: float) -> np.ndarray:
    g = _e_gradient(x, e, a, k, check_alpha(alpha))
    if not np.all(np.isfinite(g)):
        n = np.argwhere(~np.isfinite(g))[0][1]
        raise NumericError(f"non-finite gradient for column e_{n}")
    return np.maximum(as_array(e) - step * g, 0.0)


def update_additive(x, e, a, k: KernelSpec, alpha: float, rule: UpdateRule):
    """One projected-gradient pass: A first (E fixed), then E with the new A.

    Returns ``(E, A)``.
    """
    a_new = update_a_additive(x, e, a, k, alpha, rule.step_a)
    e_new = update_e_additive(x, e, a_new, k, alpha, rule.step_e)
    return e_new, a_new


def coordinate_descent_step(state: State, rule: UpdateRule) -> State:
    rule.check_kernel(state.kernel)
    x, k, alpha = state.x, state.kernel, state.alpha
    if rule.mode == "additive":
        e_new, a_new = update_additive(x, state.e, state.a, k, alpha, rule)
    else:
        a_new = update_a_multiplicative(x, state.e, state.a, k, alpha, rule.epsilon)
        e_new = update_e_multiplicative(x, state.e, a_new, k, alpha, rule.epsilon)
    return replace(state, e=e_new, a=a_new)
