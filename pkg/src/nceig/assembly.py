"""Exact assembly of the discrete operator matrix.

Because the Gauss-point Lagrange basis is L2-orthogonal, the Galerkin-type
coefficient of the degenerate kernel collapses to
``k(t_i, t_j) * ||psi_i||^2`` and no quadrature is needed:

    a_ij = alpha * k(t_i, t_j) * (h_q(i) / 2) * w_p(i) - m_i * delta_ij

with ``m_i`` the squared midpoint of the subinterval holding node ``t_i``.
"""

from __future__ import annotations

import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import KernelEvaluationError
from .kernels import Kernel
from .mesh import Partition, basis_l2_norms_sq, basis_matrix, global_nodes
from .quadrature import GaussRule, gauss_rule

__all__ = [
    "OperatorMatrix",
    "assemble",
    "degenerate_kernel_values",
    "multiplication_coefficients",
    "worker_count",
]


def worker_count() -> int:
    """Thread cap from ``NCEIG_THREADS`` (0 or unset-on-one-core means sequential)."""
    raw = os.environ.get("NCEIG_THREADS")
    if raw is None or raw.strip() == "":
        return max((os.cpu_count() or 1) - 1, 0)
    try:
        return max(int(raw), 0)
    except ValueError:
        return 0


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray = field(repr=False)
    alpha: float
    kernel_source: str
    partition: Partition
    order: int

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def nodes(self) -> np.ndarray:
        return global_nodes(self.partition, gauss_rule(self.order))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for row in self.entries:
            buf.write(",".join(format(v, ".17g") for v in row))
            buf.write("\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "alpha": self.alpha,
            "kernel": self.kernel_source,
            "order": self.order,
            "breakpoints": list(self.partition.breakpoints),
            "entries": [float(v) for v in self.entries.ravel()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> OperatorMatrix:
        n = int(data["size"])
        entries = np.asarray(data["entries"], dtype=float).reshape(n, n)
        entries.setflags(write=False)
        return cls(
            entries=entries,
            alpha=float(data["alpha"]),
            kernel_source=data["kernel"],
            partition=Partition(tuple(data["breakpoints"])),
            order=int(data["order"]),
        )


def multiplication_coefficients(part: Partition, rule: GaussRule) -> np.ndarray:
    """Squared subinterval midpoints, repeated for the r nodes of each subinterval."""
    return np.repeat(part.midpoints**2, rule.order)


def _kernel_rows(kernel: Kernel, t: np.ndarray, start: int, stop: int) -> np.ndarray:
    return np.array(kernel.evaluate(t[start:stop, None], t[None, :]), dtype=float)


def _kernel_block(kernel: Kernel, t: np.ndarray, threads: int) -> np.ndarray:
    n = t.size
    if threads <= 1 or n < 256:
        return _kernel_rows(kernel, t, 0, n)
    bounds = np.linspace(0, n, threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        blocks = pool.map(lambda se: _kernel_rows(kernel, t, *se), zip(bounds[:-1], bounds[1:]))
        return np.vstack(list(blocks))


def assemble(kernel: Kernel, alpha: float, part: Partition, rule: GaussRule) -> OperatorMatrix:
    t = global_nodes(part, rule)
    kt = _kernel_block(kernel, t, worker_count())
    bad = ~np.isfinite(kt)
    if bad.any():
        i, j = np.unravel_index(np.argmax(bad), kt.shape)
        raise KernelEvaluationError(float(t[i]), float(t[j]), float(kt[i, j]), kernel.source)
    norms = basis_l2_norms_sq(part, rule)
    entries = alpha * kt * norms[:, None]
    idx = np.arange(t.size)
    entries[idx, idx] -= multiplication_coefficients(part, rule)
    entries.setflags(write=False)
    return OperatorMatrix(
        entries=entries,
        alpha=float(alpha),
        kernel_source=kernel.source,
        partition=part,
        order=rule.order,
    )


def degenerate_kernel_values(kernel: Kernel, part: Partition, rule: GaussRule, xs, us) -> np.ndarray:
    """Values of the finite-rank interpolant ``k_N`` on the grid ``xs x us``."""
    t = global_nodes(part, rule)
    kt = kernel(t[:, None], t[None, :])
    return basis_matrix(part, rule, xs) @ kt @ basis_matrix(part, rule, us).T
