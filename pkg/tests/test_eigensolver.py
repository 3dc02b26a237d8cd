import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nceig import eigensolver
from nceig.assembly import assemble
from nceig.eigensolver import eigen_residual, eigenvalues
from nceig.errors import ConfigError, EigenConvergenceError
from nceig.kernels import Kernel
from nceig.mesh import uniform_partition
from nceig.quadrature import gauss_rule


def as_multiset_distance(a, b):
    """Max distance under an optimal-ish greedy pairing of two small multisets."""
    b = list(b)
    worst = 0.0
    for z in a:
        k = min(range(len(b)), key=lambda i: abs(b[i] - z))
        worst = max(worst, abs(b.pop(k) - z))
    return worst


def test_diagonal(backend):
    s = eigenvalues(np.diag([2.0, 3.0]), backend=backend)
    assert s.eigenvalues == (3, 2)
    assert s.size == 2 and len(s) == 2


def test_rotation(backend):
    s = eigenvalues([[0.0, -1.0], [1.0, 0.0]], backend=backend)
    assert s.eigenvalues == pytest.approx([-1j, 1j], abs=1e-15)


def test_companion_cubic(backend):
    # lambda^3 - 6 lambda^2 + 11 lambda - 6 = (l-1)(l-2)(l-3)
    c = np.array([[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    s = eigenvalues(c, backend=backend)
    assert [z.real for z in s] == pytest.approx([3, 2, 1], abs=1e-10)
    assert max(abs(z.imag) for z in s) <= 1e-10


def test_hand_quadratic(backend):
    s = eigenvalues([[0.4375, 0.5], [0.5, -0.0625]], backend=backend)
    root = math.sqrt(1.25)
    assert [z.real for z in s] == pytest.approx([(0.375 + root) / 2, (0.375 - root) / 2], abs=1e-12)


def test_one_by_one(backend):
    assert eigenvalues([[-4.5]], backend=backend).eigenvalues == (-4.5,)


def test_triangular_and_zero(backend):
    t = np.triu(np.arange(1.0, 26.0).reshape(5, 5))
    s = eigenvalues(t, backend=backend)
    assert [z.real for z in s] == pytest.approx(sorted(np.diag(t), reverse=True), abs=1e-12)
    assert eigenvalues(np.zeros((4, 4)), backend=backend).eigenvalues == (0, 0, 0, 0)


def test_jordan_block(backend):
    j = np.eye(6, k=1) + 2 * np.eye(6)
    s = eigenvalues(j, backend=backend)
    assert all(abs(z - 2) < 1e-12 for z in s)


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros((0, 0)), [[np.nan]], [[np.inf, 0], [0, 1]]])
def test_invalid_input(bad):
    with pytest.raises(ConfigError):
        eigenvalues(bad)


def test_non_convergence_reported(monkeypatch):
    calls = {}

    def no_sweeps(a, wr, wi, max_sweeps):
        calls["max"] = max_sweeps
        return 2, max_sweeps, 1

    monkeypatch.setattr(eigensolver._eigen_py, "hqr", no_sweeps)
    with pytest.raises(EigenConvergenceError) as info:
        eigenvalues(np.random.default_rng(0).standard_normal((4, 4)), backend="python")
    assert calls["max"] == 120
    assert info.value.found == 2 and info.value.size == 4


def test_sweep_budget_exhaustion_real_kernel(backend):
    a = np.random.default_rng(1).standard_normal((6, 6))
    core = eigensolver._kernels(backend)
    h = np.ascontiguousarray(a)
    core.hessenberg(h)
    status, sweeps, _ = core.hqr(h, np.zeros(6), np.zeros(6), 0)
    assert status > 0 and sweeps == 0


def test_sorted_and_conjugate_pairs(backend):
    rng = np.random.default_rng(7)
    s = eigenvalues(rng.standard_normal((30, 30)), backend=backend)
    keys = [(-z.real, z.imag) for z in s]
    assert keys == sorted(keys)
    complex_ones = [z for z in s if z.imag != 0]
    for z in complex_ones:
        assert any(abs(w - z.conjugate()) <= 1e-12 * abs(z) for w in complex_ones)


def test_agrees_with_lapack(backend):
    rng = np.random.default_rng(3)
    for n in (3, 10, 40, 90):
        a = rng.standard_normal((n, n)) * rng.uniform(0.1, 10)
        ours = eigenvalues(a, backend=backend).eigenvalues
        assert as_multiset_distance(ours, np.linalg.eigvals(a)) <= 1e-10 * np.linalg.norm(a)


def test_badly_scaled_matrix(backend):
    rng = np.random.default_rng(5)
    d = np.diag(10.0 ** rng.integers(-6, 7, 12))
    a = d @ rng.standard_normal((12, 12)) @ np.linalg.inv(d)
    ours = eigenvalues(a, backend=backend).eigenvalues
    assert as_multiset_distance(ours, np.linalg.eigvals(a)) <= 1e-8


def test_backends_agree():
    if len(eigensolver.available_backends()) < 2:
        pytest.skip("compiled core not built")
    A = assemble(Kernel.cauchy(), 1.0, uniform_partition(-4, 4, 60), gauss_rule(2))
    c = eigenvalues(A, backend="compiled")
    p = eigenvalues(A, backend="python")
    assert np.max(np.abs(np.array(c.eigenvalues) - np.array(p.eigenvalues))) <= 1e-12
    assert c.backend == "compiled" and p.backend == "python"


def test_deterministic(backend):
    A = assemble(Kernel.gaussian(), 1.0, uniform_partition(-2, 2, 40), gauss_rule(3))
    assert eigenvalues(A, backend=backend) == eigenvalues(A, backend=backend)


def test_input_not_modified(backend):
    a = np.random.default_rng(2).standard_normal((8, 8))
    before = a.copy()
    eigenvalues(a, backend=backend)
    assert np.array_equal(a, before)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-100, 100, allow_subnormal=False)))
def test_symmetric_input_has_real_spectrum(m):
    s = m + m.T
    spec = eigenvalues(s)
    assert np.max(np.abs(spec.imag)) <= 1e-10 * max(np.linalg.norm(s), 1e-300)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_similarity_invariance(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    p, _ = np.linalg.qr(rng.standard_normal((n, n)))
    e1 = eigenvalues(a).eigenvalues
    e2 = eigenvalues(p @ a @ p.T).eigenvalues
    assert as_multiset_distance(e1, e2) <= 1e-8


def test_residual_examples():
    assert eigen_residual(np.array([[5.0]]), 5.0) <= 1e-15
    assert eigen_residual(np.array([[0.0, -1.0], [1.0, 0.0]]), 1j) < 1e-12
    assert eigen_residual(np.diag([1.0, 2.0, 3.0]), 2.0) <= 1e-15


def test_residual_detects_non_eigenvalue():
    a = np.diag([1.0, 2.0, 3.0])
    assert eigen_residual(a, 2.5) > 1e-2


def test_residual_random(backend):
    rng = np.random.default_rng(11)
    a = rng.standard_normal((50, 50))
    for lam in eigenvalues(a, backend=backend):
        assert eigen_residual(a, lam) < 1e-8


def test_operator_matrix_accepted():
    A = assemble(Kernel.gaussian(), 1.0, uniform_partition(-2, 2, 10), gauss_rule(2))
    s = eigenvalues(A)
    assert s.size == 20
    assert eigen_residual(A, s.eigenvalues[0]) < 1e-12


@settings(max_examples=60, deadline=None)
@given(
    arrays(
        np.float64,
        st.integers(1, 9).map(lambda n: (n, n)),
        elements=st.one_of(
            st.just(0.0),
            st.floats(-1e150, 1e150, allow_nan=False, allow_infinity=False, allow_subnormal=False),
        ),
    )
)
def test_wide_dynamic_range_converges(a):
    s = eigenvalues(a)
    assert len(s) == a.shape[0]
    assert all(np.isfinite(z.real) and np.isfinite(z.imag) for z in s)
