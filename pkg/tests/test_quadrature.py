import numpy as np
import pytest
from numpy.polynomial import legendre as npleg

from gausscol import GaussRule, gauss_rule, legendre_eval, quad_integrate


def test_one_point_rule():
    rule = gauss_rule(1)
    assert rule.nodes.tolist() == [-1.0, 0.0, 1.0]
    assert rule.weights.tolist() == [2.0]


def test_two_point_rule():
    rule = gauss_rule(2)
    r = 1.0 / np.sqrt(3.0)
    assert np.abs(rule.interior - [-r, r]).max() <= 1e-15
    assert np.abs(rule.weights - [1.0, 1.0]).max() <= 1e-15


def test_three_point_rule():
    rule = gauss_rule(3)
    r = np.sqrt(0.6)
    assert np.abs(rule.interior - [-r, 0.0, r]).max() <= 1e-15
    assert rule.interior[1] == 0.0
    assert np.abs(rule.weights - [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0]).max() <= 1e-15


def test_rejects_empty_rule():
    with pytest.raises(ValueError):
        gauss_rule(0)


@pytest.mark.parametrize("degree", [0, 1, 2, 5, 12])
def test_legendre_eval_matches_numpy(degree):
    """Cross-check value and derivative against numpy's Legendre module."""
    coeffs = np.zeros(degree + 1)
    coeffs[degree] = 1.0
    ts = np.linspace(-1.0, 1.0, 23)
    p, dp = legendre_eval(degree, ts)
    assert np.abs(p - npleg.legval(ts, coeffs)).max() <= 1e-13
    assert np.abs(dp - npleg.legval(ts, npleg.legder(coeffs))).max() <= 1e-12


def test_legendre_eval_scalar():
    p, dp = legendre_eval(2, 0.5)
    assert isinstance(p, float) and isinstance(dp, float)
    # P2(t) = (3 t^2 - 1) / 2
    assert abs(p - (-0.125)) <= 1e-15
    assert abs(dp - 1.5) <= 1e-15


def test_legendre_eval_rejects_negative_degree():
    with pytest.raises(ValueError):
        legendre_eval(-1, 0.0)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20, 40, 100])
def test_weights_positive_and_sum_to_two(n):
    rule = gauss_rule(n)
    assert (rule.weights > 0).all()
    assert abs(rule.weights.sum() - 2.0) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 10, 17, 30, 40])
def test_exact_for_polynomials_below_twice_degree(n):
    """k-th monomials integrate exactly for all k <= 2N - 1."""
    rule = gauss_rule(n)
    for k in range(2 * n):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert abs(quad_integrate(rule, rule.interior**k) - exact) <= 1e-12


def test_degree_two_n_is_not_exact():
    # the first unreachable degree misses by a visible margin at low N
    rule = gauss_rule(5)
    err = abs(quad_integrate(rule, rule.interior**10) - 2.0 / 11.0)
    assert err > 1e-6


@pytest.mark.parametrize("n", [2, 3, 8, 25, 51, 100, 250, 500])
def test_mirror_symmetry_is_exact(n):
    """Nodes and weights mirror bitwise around zero."""
    rule = gauss_rule(n)
    assert np.array_equal(rule.interior, -rule.interior[::-1])
    assert np.array_equal(rule.weights, rule.weights[::-1])
    if n % 2 == 1:
        assert rule.interior[n // 2] == 0.0


@pytest.mark.parametrize("n", [1, 6, 33, 100])
def test_node_layout(n):
    rule = gauss_rule(n)
    assert rule.nodes.shape == (n + 2,)
    assert rule.weights.shape == (n,)
    assert rule.nodes[0] == -1.0 and rule.nodes[-1] == 1.0
    assert (np.diff(rule.nodes) > 0).all()
    assert isinstance(rule, GaussRule)


def test_interior_roots_interlace():
    a = gauss_rule(7).interior
    b = gauss_rule(8).interior
    # between consecutive roots of P8 lies exactly one root of P7
    for lo, hi, mid in zip(b[:-1], b[1:], a):
        assert lo < mid < hi


@pytest.mark.parametrize("n", [3, 50, 200])
def test_rule_is_deterministic(n):
    r1, r2 = gauss_rule(n), gauss_rule(n)
    assert np.array_equal(r1.nodes, r2.nodes)
    assert np.array_equal(r1.weights, r2.weights)


def test_rule_arrays_are_read_only():
    rule = gauss_rule(4)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0
    with pytest.raises(ValueError):
        rule.weights[0] = 0.0


def test_quad_integrate_checks_length():
    rule = gauss_rule(3)
    with pytest.raises(ValueError):
        quad_integrate(rule, np.ones(4))
    with pytest.raises(ValueError):
        quad_integrate(rule, np.ones((3, 1)))


def test_quad_integrate_constant():
    rule = gauss_rule(9)
    assert abs(quad_integrate(rule, np.ones(9)) - 2.0) <= 1e-13
