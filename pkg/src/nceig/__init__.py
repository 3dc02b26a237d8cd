"""Eigenvalues of ``alpha * int_a^b k(x, u) f(u) du - x^2 f(x)`` by a degenerate kernel method.

The kernel is replaced by its piecewise Lagrange interpolant at Gauss points
and ``x^2`` by its value at subinterval midpoints; the resulting matrix is
assembled in closed form and its eigenvalues computed by Francis QR.
"""

__version__ = "0.1.0"

from .assembly import OperatorMatrix, assemble, degenerate_kernel_values, multiplication_coefficients
from .eigensolver import BACKEND, Spectrum, eigen_residual, eigenvalues
from .errors import (
    ConfigError,
    EigenConvergenceError,
    KernelError,
    KernelEvaluationError,
    KernelSyntaxError,
    NceigError,
    TrackingLossError,
    UnknownIdentifierError,
)
from .kernels import Kernel, eval_kernel, format_expr, parse_kernel
from .mesh import (
    BasisIndex,
    Partition,
    basis_eval,
    basis_l2_norm_sq,
    global_nodes,
    lagrange_eval,
    uniform_partition,
)
from .quadrature import GaussRule, gauss_rule, legendre_eval
from .spectrum import (
    ConvergenceReport,
    EssentialBand,
    convergence_study,
    essential_band,
    isolated_eigenvalues,
    match_eigenvalues,
)
