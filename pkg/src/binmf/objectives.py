"""Input-space and feature-space objectives, their weighted sum, and gradients.

With ``x_t``, ``e_n`` the columns of X and E and ``a_nt`` the entries of A::

    J_X = 1/2 sum_t ||x_t - sum_n a_nt e_n||^2
    J_H = 1/2 sum_t ||phi(x_t) - sum_n a_nt phi(e_n)||^2
    J   = alpha J_X + (1 - alpha) J_H

J_H is expanded through kernel evaluations only. Reported values keep the
constant ``x_t'x_t`` and ``kappa(x_t, x_t)`` terms so they are true distances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, DomainError, NumericError, ShapeError
from .kernels import KernelSpec, grad_tensor, gram, kernel_eval, kernel_grad, self_gram
from .matrix import as_array, frobenius_sq_diff

# Feature-space residuals below this (relative to the size of the terms) are roundoff.
ROUNDOFF_TOL = 1e-12


@dataclass(frozen=True)
class ObjectiveVector:
    j_input: float
    j_feature: float
    alpha: float
    j_aggregated: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.j_input, self.j_feature)


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    return alpha


def _factors(x, e, a):
    X, E, A = as_array(x), as_array(e), as_array(a)
    L, T = X.shape
    if E.shape[0] != L or A.shape[1] != T or E.shape[1] != A.shape[0]:
        raise ShapeError(f"incompatible shapes X{X.shape}, E{E.shape}, A{A.shape}")
    return X, E, A


def eval_j_input(x, e, a) -> float:
    X, E, A = _factors(x, e, a)
    return 0.5 * frobenius_sq_diff(X, E @ A)


def feature_residuals(X, E, A, spec: KernelSpec, Kx=None, Ke=None) -> np.ndarray:
    """Per-sample ``||phi(x_t) - sum_n a_nt phi(e_n)||^2`` as a length-T vector."""
    if Kx is None:
        Kx = gram(spec, E, X)
    if Ke is None:
        Ke = gram(spec, E, E)
    quad = np.sum(A * (Ke @ A), axis=0)
    cross = np.sum(A * Kx, axis=0)
    diag = self_gram(spec, X)
    res = quad - 2.0 * cross + diag
    if not np.all(np.isfinite(res)):
        raise NumericError(f"non-finite feature-space residual ({spec.family} kernel)")
    scale = np.maximum(1.0, np.abs(quad) + 2.0 * np.abs(cross) + np.abs(diag))
    bad = res < -ROUNDOFF_TOL * scale
    if np.any(bad):
        t = int(np.argmax(bad))
        raise NumericError(
            f"negative feature-space distance {res[t]:.3e} at sample {t} "
            f"({spec.family} kernel is not positive definite here)")
    return np.maximum(res, 0.0)


def eval_j_feature(x, e, a, k: KernelSpec) -> float:
    X, E, A = _factors(x, e, a)
    return 0.5 * float(np.sum(feature_residuals(X, E, A, k)))


def eval_aggregated(x, e, a, k: KernelSpec, alpha: float) -> ObjectiveVector:
    alpha = check_alpha(alpha)
    j_in = eval_j_input(x, e, a)
    j_feat = eval_j_feature(x, e, a, k)
    return ObjectiveVector(j_in, j_feat, alpha, alpha * j_in + (1.0 - alpha) * j_feat)


def _check_index(name, i, size):
    if not 0 <= i < size:
        raise BoundsError(f"{name}={i} out of range [0, {size})")


def grad_a(x, e, a, k: KernelSpec, alpha: float, n: int, t: int) -> float:
    """Partial derivative of J with respect to the single entry ``a[n, t]``."""
    alpha = check_alpha(alpha)
    X, E, A = _factors(x, e, a)
    N, T = A.shape
    _check_index("n", n, N)
    _check_index("t", t, T)
    en, xt = E[:, n], X[:, t]
    linear = -en @ xt
    kern = -kernel_eval(k, en, xt)
    for m in range(N):
        linear += A[m, t] * (en @ E[:, m])
        kern += A[m, t] * kernel_eval(k, en, E[:, m])
    return float(alpha * linear + (1.0 - alpha) * kern)


def grad_e(x, e, a, k: KernelSpec, alpha: float, n: int) -> np.ndarray:
    """Gradient of J with respect to the column ``e_n``, any kernel."""
    alpha = check_alpha(alpha)
    X, E, A = _factors(x, e, a)
    N, T = A.shape
    _check_index("n", n, N)
    en = E[:, n]
    linear = np.zeros(E.shape[0])
    kern = np.zeros(E.shape[0])
    for t in range(T):
        if A[n, t] == 0.0:
            continue
        lin_t = -X[:, t] + E @ A[:, t]
        ker_t = -kernel_grad(k, en, X[:, t])
        for m in range(N):
            ker_t = ker_t + A[m, t] * kernel_grad(k, en, E[:, m])
        linear += A[n, t] * lin_t
        kern += A[n, t] * ker_t
    g = alpha * linear + (1.0 - alpha) * kern
    if not np.all(np.isfinite(g)):
        raise NumericError(f"non-finite gradient for column e_{n}")
    return g


def gradient_a(x, e, a, k: KernelSpec, alpha: float, Kx=None, Ke=None) -> np.ndarray:
    """All partial derivatives with respect to A at once, shape (N, T)."""
    X, E, A = _factors(x, e, a)
    if Kx is None:
        Kx = gram(k, E, X)
    if Ke is None:
        Ke = gram(k, E, E)
    linear = E.T @ E @ A - E.T @ X
    kern = Ke @ A - Kx
    return alpha * linear + (1.0 - alpha) * kern


def gradient_e(x, e, a, k: KernelSpec, alpha: float) -> np.ndarray:
    """All column gradients with respect to E, shape (L, N), via kernel gradient tensors."""
    X, E, A = _factors(x, e, a)
    linear = (E @ A - X) @ A.T
    W = A @ A.T
    Gx = grad_tensor(k, E, X)
    Ge = grad_tensor(k, E, E)
    kern = -np.einsum("lnt,nt->ln", Gx, A) + np.einsum("lnm,nm->ln", Ge, W)
    g = alpha * linear + (1.0 - alpha) * kern
    if not np.all(np.isfinite(g)):
        raise NumericError("non-finite gradient with respect to E")
    return g


def gradient_e_gaussian(x, e, a, k: KernelSpec, alpha: float, Kx=None, Ke=None) -> np.ndarray:
    """Closed form of `gradient_e` for the gaussian kernel.

    Column n is::

        alpha sum_t a_nt (-x_t + sum_m a_mt e_m)
        + (1 - alpha) / sigma^2 sum_t a_nt (k(e_n, x_t)(e_n - x_t)
                                            - sum_m a_mt k(e_n, e_m)(e_n - e_m))
    """
    if k.family != "gaussian":
        raise DomainError(f"closed-form E gradient needs the gaussian kernel, got {k.family}")
    X, E, A = _factors(x, e, a)
    if Kx is None:
        Kx = gram(k, E, X)
    if Ke is None:
        Ke = gram(k, E, E)
    linear = E @ (A @ A.T) - X @ A.T
    Bx = A * Kx
    C = (A @ A.T) * Ke
    to_data = E * Bx.sum(axis=1) - X @ Bx.T
    to_atoms = E * C.sum(axis=1) - E @ C.T
    return alpha * linear + (1.0 - alpha) / k.sigma ** 2 * (to_data - to_atoms)
