"""Gauss-Legendre rules on [-1, 1].

Nodes are the roots of the Legendre polynomial P_r, located by Newton's
method from the usual cosine estimates; weights follow from P_r'.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

from .errors import ConfigError

__all__ = ["GaussRule", "MAX_ORDER", "gauss_rule", "legendre_eval"]

MAX_ORDER = 64
_NEWTON_TOL = 1e-15
_NEWTON_MAXITER = 100


@dataclass(frozen=True)
class GaussRule:
    """r-point Gauss-Legendre rule; nodes ascending, weights positive."""

    order: int
    nodes: tuple[float, ...]
    weights: tuple[float, ...]

    def __len__(self) -> int:
        return self.order


def legendre_eval(r: int, t: float) -> tuple[float, float]:
    """Return ``(P_r(t), P_r'(t))`` using the three-term recurrence."""
    if r < 0:
        raise ValueError("degree must be nonnegative")
    if r == 0:
        return 1.0, 0.0
    p0, p1 = 1.0, t
    dp0, dp1 = 0.0, 1.0
    for k in range(1, r):
        # (k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}, differentiated term by term
        p2 = ((2 * k + 1) * t * p1 - k * p0) / (k + 1)
        dp2 = ((2 * k + 1) * (p1 + t * dp1) - k * dp0) / (k + 1)
        p0, p1 = p1, p2
        dp0, dp1 = dp1, dp2
    return p1, dp1


def _newton_root(r: int, guess: float) -> float:
    t = guess
    for _ in range(_NEWTON_MAXITER):
        p, dp = legendre_eval(r, t)
        if abs(p) < _NEWTON_TOL:
            break
        step = p / dp
        t -= step
        if abs(step) <= 1e-17:
            break
    return t


def _build_rule(r: int) -> GaussRule:
    half = r // 2
    positive = []
    for i in range(1, half + 1):
        guess = math.cos(math.pi * (i - 0.25) / (r + 0.5))
        positive.append(_newton_root(r, guess))
    # positive[0] is the largest root; mirror to get the negative half
    nodes = [-t for t in positive]
    if r % 2:
        nodes.append(0.0)
    nodes.extend(reversed(positive))

    weights = []
    for t in nodes:
        _, dp = legendre_eval(r, t)
        weights.append(2.0 / ((1.0 - t * t) * dp * dp))
    return GaussRule(order=r, nodes=tuple(nodes), weights=tuple(weights))


_cache: dict[int, GaussRule] = {}
_cache_lock = threading.Lock()


def gauss_rule(r: int) -> GaussRule:
    """Return the cached r-point Gauss-Legendre rule, 1 <= r <= 64."""
    if isinstance(r, bool) or not isinstance(r, int) or not 1 <= r <= MAX_ORDER:
        raise ConfigError(f"quadrature order must be an integer in [1, {MAX_ORDER}], got {r!r}")
    rule = _cache.get(r)
    if rule is None:
        with _cache_lock:
            rule = _cache.get(r)
            if rule is None:
                rule = _build_rule(r)
                _cache[r] = rule
    return rule
