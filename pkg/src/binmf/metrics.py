"""Reconstruction errors in input and feature space.

    RE     = sqrt( 1/(TL) sum_t ||x_t - sum_n a_nt e_n||^2 )
    RE_phi = sqrt( 1/(TL) sum_t ||phi(x_t) - sum_n a_nt phi(e_n)||^2 )

Both use the same 1/(TL) normalization. RE_phi can be computed for any
factor pair, whatever produced it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kernels import KernelSpec
from .matrix import frobenius_sq_diff
from .objectives import _factors, eval_j_feature


@dataclass(frozen=True)
class MetricReport:
    re: float
    re_phi: float
    L: int
    T: int
    N: int
    kernel: KernelSpec


def reconstruction_error(x, e, a) -> float:
    X, E, A = _factors(x, e, a)
    L, T = X.shape
    return math.sqrt(frobenius_sq_diff(X, E @ A) / (T * L))


def reconstruction_error_feature(x, e, a, k: KernelSpec) -> float:
    X, E, A = _factors(x, e, a)
    L, T = X.shape
    # eval_j_feature raises on negative distances beyond roundoff
    return math.sqrt(2.0 * eval_j_feature(X, E, A, k) / (T * L))


def report(x, e, a, k: KernelSpec) -> MetricReport:
    X, E, A = _factors(x, e, a)
    L, T = X.shape
    return MetricReport(
        re=reconstruction_error(X, E, A),
        re_phi=reconstruction_error_feature(X, E, A, k),
        L=L, T=T, N=E.shape[1], kernel=k,
    )
