"""Bi-objective nonnegative matrix factorization: linear and kernel-based models.

Minimizes ``alpha * J_X + (1 - alpha) * J_H`` over nonnegative factors, where
J_X is the usual Frobenius fit and J_H the fit of the same factors in a
kernel feature space, and sweeps alpha to approximate the Pareto front.
"""

__version__ = "0.1.0"

from .errors import (BinmfError, BoundsError, ConfigError, DomainError, FormatError,  # noqa: E402
                     NumericError, ParseError, ShapeError)
from .kernels import KernelSpec, kernel_eval, kernel_grad  # noqa: E402
from .matrix import Dataset, NonNegMatrix, column, frobenius_sq_diff, matmul  # noqa: E402
from .metrics import (MetricReport, reconstruction_error,  # noqa: E402
                      reconstruction_error_feature, report)
from .objectives import (ObjectiveVector, eval_aggregated, eval_j_feature,  # noqa: E402
                         eval_j_input, grad_a, grad_e)
from .pareto import (ParetoFront, SweepConfig, dominates, filter_nondominated,  # noqa: E402
                     front_export, sweep)
from .solver import SolutionRecord, SolveConfig, init_factors, kkt_residual, solve  # noqa: E402
from .updates import UpdateRule, coordinate_descent_step  # noqa: E402

__all__ = [
    "BinmfError", "BoundsError", "ConfigError", "DomainError", "FormatError", "NumericError",
    "ParseError", "ShapeError", "KernelSpec", "kernel_eval", "kernel_grad", "Dataset",
    "NonNegMatrix", "column", "frobenius_sq_diff", "matmul", "MetricReport",
    "reconstruction_error", "reconstruction_error_feature", "report", "ObjectiveVector",
    "eval_aggregated", "eval_j_feature", "eval_j_input", "grad_a", "grad_e", "ParetoFront",
    "SweepConfig", "dominates", "filter_nondominated", "front_export", "sweep",
    "SolutionRecord", "SolveConfig", "init_factors", "kkt_residual", "solve", "UpdateRule",
    "coordinate_descent_step",
]
