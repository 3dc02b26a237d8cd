"""Partitions of [a, b] and the piecewise Lagrange basis built on Gauss points.

Global basis functions are numbered ``i = (q - 1) * r + p`` where ``q`` is the
subinterval and ``p`` the local Gauss node, all 1-based.  Array-returning
helpers use the same ordering with 0-based positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .quadrature import GaussRule

__all__ = [
    "BasisIndex",
    "Partition",
    "basis_eval",
    "basis_l2_norm_sq",
    "basis_l2_norms_sq",
    "basis_matrix",
    "global_nodes",
    "lagrange_eval",
    "lagrange_matrix",
    "uniform_partition",
]


@dataclass(frozen=True)
class Partition:
    """Strictly ascending breakpoints ``x_0 = a < ... < x_n = b``."""

    breakpoints: tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(x) for x in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        if len(bp) < 2:
            raise ConfigError("a partition needs at least two breakpoints")
        if not all(np.isfinite(bp)):
            raise ConfigError("breakpoints must be finite")
        if any(x1 <= x0 for x0, x1 in zip(bp, bp[1:])):
            raise ConfigError("breakpoints must be strictly increasing")

    @classmethod
    def from_breakpoints(cls, breakpoints) -> Partition:
        return cls(tuple(breakpoints))

    @property
    def a(self) -> float:
        return self.breakpoints[0]

    @property
    def b(self) -> float:
        return self.breakpoints[-1]

    @property
    def n(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(np.asarray(self.breakpoints))

    @property
    def mesh_norm(self) -> float:
        return float(self.lengths.max())

    @property
    def midpoints(self) -> np.ndarray:
        x = np.asarray(self.breakpoints)
        return (x[:-1] + x[1:]) / 2

    def subinterval_of(self, x: float) -> int:
        """1-based subinterval owning ``x``; left-closed, the last one closed."""
        if not self.a <= x <= self.b:
            raise ValueError(f"{x!r} lies outside [{self.a}, {self.b}]")
        q = int(np.searchsorted(self.breakpoints, x, side="right"))
        return min(q, self.n)


def uniform_partition(a: float, b: float, n: int) -> Partition:
    if not a < b:
        raise ConfigError(f"invalid interval: need a < b, got [{a}, {b}]")
    if n < 2:
        raise ConfigError(f"invalid size: need n >= 2, got {n}")
    step = (b - a) / n
    points = [a + j * step for j in range(n)]
    points.append(b)
    return Partition(tuple(points))


@dataclass(frozen=True)
class BasisIndex:
    global_index: int
    local_node: int
    subinterval: int

    @classmethod
    def from_global(cls, i: int, r: int) -> BasisIndex:
        if i < 1:
            raise IndexError(f"global basis index must be >= 1, got {i}")
        q, p = divmod(i - 1, r)
        return cls(i, p + 1, q + 1)

    @classmethod
    def from_local(cls, p: int, q: int, r: int) -> BasisIndex:
        if not 1 <= p <= r or q < 1:
            raise IndexError(f"local index ({p}, {q}) out of range for r={r}")
        return cls((q - 1) * r + p, p, q)


def _check_index(index: BasisIndex, part: Partition, rule: GaussRule):
    if not 1 <= index.local_node <= rule.order or not 1 <= index.subinterval <= part.n:
        raise IndexError(f"{index} out of range for n={part.n}, r={rule.order}")


def global_nodes(part: Partition, rule: GaussRule) -> np.ndarray:
    """All ``n * r`` interpolation nodes, ordered by global index."""
    x = np.asarray(part.breakpoints)
    tau = np.asarray(rule.nodes)
    left = ((1 - tau) / 2)[None, :] * x[:-1, None]
    right = ((1 + tau) / 2)[None, :] * x[1:, None]
    return (left + right).ravel()


def lagrange_eval(rule: GaussRule, p: int, t: float) -> float:
    """Value at ``t`` of the degree r-1 Lagrange polynomial for node ``p``."""
    if not 1 <= p <= rule.order:
        raise IndexError(f"local node {p} out of range 1..{rule.order}")
    tau = rule.nodes
    tp = tau[p - 1]
    value = 1.0
    for s, ts in enumerate(tau, start=1):
        if s != p:
            value *= (t - ts) / (tp - ts)
    return value


def lagrange_matrix(rule: GaussRule, t) -> np.ndarray:
    """Array of shape ``(len(t), r)`` holding every local basis polynomial at ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tau = np.asarray(rule.nodes)
    out = np.ones((t.size, rule.order))
    for p in range(rule.order):
        for s in range(rule.order):
            if s != p:
                out[:, p] *= (t - tau[s]) / (tau[p] - tau[s])
    return out


def basis_eval(part: Partition, rule: GaussRule, index: BasisIndex, x: float) -> float:
    _check_index(index, part, rule)
    q = part.subinterval_of(x)
    if q != index.subinterval:
        return 0.0
    x0, x1 = part.breakpoints[q - 1], part.breakpoints[q]
    t = (2 * x - x0 - x1) / (x1 - x0)
    return lagrange_eval(rule, index.local_node, t)


def basis_matrix(part: Partition, rule: GaussRule, xs) -> np.ndarray:
    """Dense ``(len(xs), n * r)`` matrix of every global basis function at ``xs``."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if xs.size and (xs.min() < part.a or xs.max() > part.b):
        raise ValueError("evaluation points must lie in [a, b]")
    bp = np.asarray(part.breakpoints)
    q = np.minimum(np.searchsorted(bp, xs, side="right"), part.n) - 1
    t = (2 * xs - bp[q] - bp[q + 1]) / (bp[q + 1] - bp[q])
    local = lagrange_matrix(rule, t)
    r = rule.order
    out = np.zeros((xs.size, part.n * r))
    cols = q[:, None] * r + np.arange(r)[None, :]
    np.put_along_axis(out, cols, local, axis=1)
    return out


def basis_l2_norm_sq(part: Partition, rule: GaussRule, index: BasisIndex) -> float:
    """Exact integral of the squared basis function: ``(h_q / 2) * w_p``.

    l_p^2 has degree 2r - 2, so the r-point rule integrates it exactly and
    the sum collapses to the single weight w_p.
    """
    _check_index(index, part, rule)
    h = part.breakpoints[index.subinterval] - part.breakpoints[index.subinterval - 1]
    return (h / 2) * rule.weights[index.local_node - 1]


def basis_l2_norms_sq(part: Partition, rule: GaussRule) -> np.ndarray:
    """Vector of :func:`basis_l2_norm_sq` over all global indices."""
    h = part.lengths
    return ((h / 2)[:, None] * np.asarray(rule.weights)[None, :]).ravel()
