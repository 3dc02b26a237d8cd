import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nceig.errors import ConfigError
from nceig.mesh import (
    BasisIndex,
    Partition,
    basis_eval,
    basis_l2_norm_sq,
    basis_l2_norms_sq,
    basis_matrix,
    global_nodes,
    lagrange_eval,
    lagrange_matrix,
    uniform_partition,
)
from nceig.quadrature import gauss_rule


def simpson(f, lo, hi, panels=200):
    """Composite Simpson; exact for cubics on each panel."""
    x = np.linspace(lo, hi, 2 * panels + 1)
    y = f(x)
    h = (hi - lo) / (2 * panels)
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


def test_uniform_partition_examples():
    p = uniform_partition(0, 1, 2)
    assert p.breakpoints == (0.0, 0.5, 1.0)
    assert p.mesh_norm == 0.5

    p = uniform_partition(-2, 2, 4)
    assert p.breakpoints == (-2.0, -1.0, 0.0, 1.0, 2.0)
    assert p.mesh_norm == 1.0

    assert uniform_partition(-4, 4, 10).mesh_norm == pytest.approx(0.8, abs=1e-15)


@pytest.mark.parametrize("a, b, n", [(1, 1, 4), (2, 1, 4), (0, 1, 1), (0, 1, 0)])
def test_uniform_partition_errors(a, b, n):
    with pytest.raises(ConfigError):
        uniform_partition(a, b, n)


def test_partition_rejects_bad_breakpoints():
    with pytest.raises(ConfigError):
        Partition((0.0, 0.5, 0.5, 1.0))
    with pytest.raises(ConfigError):
        Partition((0.0,))


@given(
    a=st.floats(-10, 10),
    width=st.floats(0.1, 20),
    n=st.integers(2, 200),
)
def test_partition_invariants(a, width, n):
    b = a + width
    p = uniform_partition(a, b, n)
    assert p.a == a and p.b == b and p.n == n
    assert np.all(np.diff(p.breakpoints) > 0)
    assert abs(p.lengths.sum() - (b - a)) <= 1e-12 * (b - a)
    assert p.mesh_norm == p.lengths.max()


def test_graded_partition_supported():
    p = Partition.from_breakpoints([0.0, 0.1, 0.3, 0.7, 1.0])
    assert p.mesh_norm == pytest.approx(0.4)
    t = global_nodes(p, gauss_rule(3))
    assert t.size == 12
    assert np.all(np.diff(t) > 0)


def test_basis_index_bijection():
    r = 3
    for i in range(1, 31):
        idx = BasisIndex.from_global(i, r)
        assert (idx.subinterval - 1) * r + idx.local_node == i
        assert BasisIndex.from_local(idx.local_node, idx.subinterval, r) == idx
    with pytest.raises(IndexError):
        BasisIndex.from_global(0, 2)
    with pytest.raises(IndexError):
        BasisIndex.from_local(3, 1, 2)


def test_global_nodes_examples():
    assert global_nodes(uniform_partition(0, 1, 2), gauss_rule(1)) == pytest.approx([0.25, 0.75])
    one = Partition((0.0, 1.0))
    s = 0.5 / math.sqrt(3)
    assert global_nodes(one, gauss_rule(2)) == pytest.approx([0.5 - s, 0.5 + s], abs=1e-15)
    assert global_nodes(uniform_partition(-1, 1, 2), gauss_rule(1)) == pytest.approx([-0.5, 0.5])


@pytest.mark.parametrize("r", [1, 2, 3, 6])
def test_global_nodes_in_open_subintervals(r):
    p = uniform_partition(-3, 5, 7)
    t = global_nodes(p, gauss_rule(r)).reshape(p.n, r)
    bp = np.array(p.breakpoints)
    assert np.all(np.diff(t.ravel()) > 0)
    assert np.all(t > bp[:-1, None]) and np.all(t < bp[1:, None])


def test_lagrange_examples():
    rule = gauss_rule(2)
    t1, t2 = rule.nodes
    assert lagrange_eval(rule, 1, t1) == 1.0
    assert lagrange_eval(rule, 1, t2) == 0.0
    assert lagrange_eval(gauss_rule(1), 1, 0.42) == 1.0
    assert lagrange_eval(rule, 1, 0.0) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(IndexError):
        lagrange_eval(rule, 3, 0.0)
    with pytest.raises(IndexError):
        lagrange_eval(rule, 0, 0.0)


@pytest.mark.parametrize("r", [1, 2, 3, 5, 9])
def test_lagrange_matrix_matches_scalar(r):
    rule = gauss_rule(r)
    ts = np.linspace(-1, 1, 13)
    mat = lagrange_matrix(rule, ts)
    for k, t in enumerate(ts):
        for p in range(1, r + 1):
            assert mat[k, p - 1] == pytest.approx(lagrange_eval(rule, p, t), abs=1e-14)


@settings(max_examples=200)
@given(r=st.integers(1, 10), t=st.floats(-1, 1))
def test_partition_of_unity(r, t):
    rule = gauss_rule(r)
    assert abs(sum(lagrange_eval(rule, p, t) for p in range(1, r + 1)) - 1) < 1e-12


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_cardinality(r):
    p = uniform_partition(-2, 3, 5)
    rule = gauss_rule(r)
    t = global_nodes(p, rule)
    n_h = t.size
    for i in range(1, n_h + 1):
        idx = BasisIndex.from_global(i, r)
        for j in range(1, n_h + 1):
            expected = 1.0 if i == j else 0.0
            assert abs(basis_eval(p, rule, idx, t[j - 1]) - expected) <= 1e-13


def test_basis_compact_support_and_breakpoints():
    p = uniform_partition(0, 1, 4)
    rule = gauss_rule(2)
    first = BasisIndex.from_local(1, 1, 2)
    assert basis_eval(p, rule, first, 0.4) == 0.0
    # x = 0.25 belongs to the second subinterval (left-closed convention)
    second = BasisIndex.from_local(1, 2, 2)
    assert basis_eval(p, rule, first, 0.25) == 0.0
    assert basis_eval(p, rule, second, 0.25) != 0.0
    # right endpoint belongs to the last subinterval
    last = BasisIndex.from_local(2, 4, 2)
    assert basis_eval(p, rule, last, 1.0) != 0.0
    with pytest.raises(ValueError):
        basis_eval(p, rule, first, 1.5)
    with pytest.raises(IndexError):
        basis_eval(p, rule, BasisIndex(9, 1, 5), 0.5)


def test_basis_matrix_matches_scalar():
    p = Partition((-1.0, -0.2, 0.5, 2.0))
    rule = gauss_rule(3)
    xs = np.linspace(-1, 2, 41)
    mat = basis_matrix(p, rule, xs)
    for k, x in enumerate(xs):
        for i in range(1, 10):
            idx = BasisIndex.from_global(i, 3)
            assert mat[k, i - 1] == pytest.approx(basis_eval(p, rule, idx, x), abs=1e-14)


def test_norm_examples():
    p = uniform_partition(0, 1, 2)
    r1 = gauss_rule(1)
    assert [basis_l2_norm_sq(p, r1, BasisIndex.from_global(i, 1)) for i in (1, 2)] == [0.5, 0.5]

    p = Partition((0.0, 0.3, 1.0))
    r2 = gauss_rule(2)
    for i in range(1, 5):
        idx = BasisIndex.from_global(i, 2)
        h = p.lengths[idx.subinterval - 1]
        assert basis_l2_norm_sq(p, r2, idx) == pytest.approx(h / 2, abs=1e-15)

    p = uniform_partition(-2, 2, 4)
    r3 = gauss_rule(3)
    idx = BasisIndex.from_local(2, 3, 3)
    assert basis_l2_norm_sq(p, r3, idx) == pytest.approx(4 / 9, abs=1e-15)


def _psi_sq_integral(p, rule, idx, points=50):
    # independent oracle: numpy's own Gauss-Legendre rule on the support
    x, w = np.polynomial.legendre.leggauss(points)
    lo, hi = p.breakpoints[idx.subinterval - 1], p.breakpoints[idx.subinterval]
    xs = (lo + hi) / 2 + (hi - lo) / 2 * x
    vals = np.array([basis_eval(p, rule, idx, v) for v in xs])
    return (hi - lo) / 2 * np.dot(w, vals**2)


@pytest.mark.parametrize("r", [1, 2, 3, 5, 8])
def test_norm_against_numerical_integration(r):
    p = Partition((-1.0, -0.3, 0.2, 1.5))
    rule = gauss_rule(r)
    norms = basis_l2_norms_sq(p, rule)
    for i in range(1, 3 * r + 1):
        idx = BasisIndex.from_global(i, r)
        exact = basis_l2_norm_sq(p, rule, idx)
        assert exact == norms[i - 1]
        oracle = _psi_sq_integral(p, rule, idx)
        assert abs(exact - oracle) <= 1e-12 * oracle


def test_norm_composite_simpson_oracle():
    for n in (2, 3, 4):
        p = uniform_partition(0, 1, n)
        for r in (1, 2):
            rule = gauss_rule(r)
            for i in range(1, n * r + 1):
                idx = BasisIndex.from_global(i, r)
                lo, hi = p.breakpoints[idx.subinterval - 1], p.breakpoints[idx.subinterval]
                f = lambda xs: lagrange_matrix(rule, (2 * xs - lo - hi) / (hi - lo))[:, idx.local_node - 1] ** 2
                assert abs(simpson(f, lo, hi) - basis_l2_norm_sq(p, rule, idx)) < 1e-10
