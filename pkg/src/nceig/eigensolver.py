"""Eigenvalues of dense real nonsymmetric matrices.

Pipeline: power-of-two balancing, Householder reduction to Hessenberg form,
then Francis implicit double-shift QR with deflation.  The loops live in a
compiled Cython core when it is importable; otherwise an equivalent
pure-Python implementation is used.  Set ``NCEIG_BACKEND`` to ``python`` or
``compiled`` to force a choice.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _eigen_py
from .errors import ConfigError, EigenConvergenceError

try:
    from . import _eigen_core
except ImportError:  # extension not built
    _eigen_core = None

__all__ = [
    "BACKEND",
    "Spectrum",
    "available_backends",
    "eigen_residual",
    "eigenvalues",
]


def available_backends() -> list[str]:
    names = ["python"]
    if _eigen_core is not None:
        names.insert(0, "compiled")
    return names


def _select_backend() -> str:
    wanted = os.environ.get("NCEIG_BACKEND", "auto").strip().lower()
    if wanted in ("", "auto"):
        return "compiled" if _eigen_core is not None else "python"
    if wanted == "compiled" and _eigen_core is None:
        raise ImportError("NCEIG_BACKEND=compiled but nceig._eigen_core is not built")
    if wanted not in ("compiled", "python"):
        raise ImportError(f"unknown NCEIG_BACKEND {wanted!r}")
    return wanted


BACKEND = _select_backend()


def _kernels(backend: str | None):
    backend = backend or BACKEND
    if backend == "compiled":
        if _eigen_core is None:
            raise ConfigError("compiled backend not available")
        return _eigen_core
    if backend == "python":
        return _eigen_py
    raise ConfigError(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class Spectrum:
    """All eigenvalues of a matrix, descending real part then ascending imaginary."""

    eigenvalues: tuple[complex, ...]
    size: int
    sweeps: int
    deflations: int
    backend: str = BACKEND

    def __len__(self):
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)

    @property
    def real(self) -> np.ndarray:
        return np.array([z.real for z in self.eigenvalues])

    @property
    def imag(self) -> np.ndarray:
        return np.array([z.imag for z in self.eigenvalues])


def _as_matrix(m) -> np.ndarray:
    entries = getattr(m, "entries", m)
    a = np.array(entries, dtype=float, order="C", copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ConfigError("matrix must have size >= 1")
    if not np.isfinite(a).all():
        raise ConfigError("matrix has non-finite entries")
    return a


def sort_eigenvalues(values) -> tuple[complex, ...]:
    values = [complex(z) for z in values]
    return tuple(sorted(values, key=lambda z: (-z.real, z.imag)))


def eigenvalues(m, backend: str | None = None) -> Spectrum:
    """All eigenvalues of ``m`` (an OperatorMatrix or a square array)."""
    a = _as_matrix(m)
    n = a.shape[0]
    core = _kernels(backend)
    # power-of-two scaling to unit magnitude keeps shift products clear of
    # underflow/overflow and is exact
    peak = float(np.abs(a).max())
    exponent = math.frexp(peak)[1] if peak > 0 else 0
    if exponent:
        a = np.ldexp(a, -exponent)
    core.balance(a)
    core.hessenberg(a)
    wr = np.zeros(n)
    wi = np.zeros(n)
    status, sweeps, deflations = core.hqr(a, wr, wi, 30 * n)
    if status:
        raise EigenConvergenceError(
            "Francis QR failed to deflate", sweeps=sweeps, found=n - status, size=n
        )
    if exponent:
        wr = np.ldexp(wr, exponent)
        wi = np.ldexp(wi, exponent)
    return Spectrum(
        eigenvalues=sort_eigenvalues(wr + 1j * wi),
        size=n,
        sweeps=int(sweeps),
        deflations=int(deflations),
        backend=backend or BACKEND,
    )


def eigen_residual(m, lam: complex, steps: int = 3) -> float:
    """Relative residual ``||A v - lam v|| / ||A||_F`` after inverse iteration."""
    a = np.asarray(getattr(m, "entries", m), dtype=float)
    n = a.shape[0]
    fro = float(np.linalg.norm(a))
    if fro == 0.0:
        return abs(lam)
    eye = np.eye(n)
    shift = complex(lam)
    shifted = a - shift * eye
    v = np.ones(n, dtype=complex) + 1j * np.linspace(0.0, 1.0, n) / max(n, 1)
    v /= np.linalg.norm(v)
    for _ in range(steps):
        try:
            y = np.linalg.solve(shifted, v)
        except np.linalg.LinAlgError:
            shift = shift + 1e-13 * fro
            shifted = a - shift * eye
            continue
        norm = np.linalg.norm(y)
        if not np.isfinite(norm) or norm == 0.0:
            shift = shift + 1e-13 * fro
            shifted = a - shift * eye
            continue
        v = y / norm
    return float(np.linalg.norm(a @ v - lam * v) / fro)
