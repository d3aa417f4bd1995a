import numpy as np
import pytest

from gausscol import (
    bary_interp,
    bary_weights,
    build_D,
    build_Ddag,
    build_matrices,
    certify,
    check_p1,
    check_p2,
    costate_bary_weights,
    differentiate,
    flip_deviation,
    gauss_rule,
    state_bary_weights,
)

# regression values computed with this implementation
P1_BASELINE = {25: 1.995556969790499, 100: 1.9997137267734908}
P2_BASELINE = {25: 1.4122010822493074, 300: 1.4141991794444637}


def test_n1_matrices_by_hand():
    """N = 1: state nodes {-1, 0}, costate nodes {0, 1}.

    The state interpolant through (-1, x0) and (0, x1) has slope x1 - x0,
    so D = [-1, 1]; the costate matrix follows from w = 2 and flips sign
    on its last column: Ddag = [-1, 1].
    """
    rule = gauss_rule(1)
    D = build_D(rule)
    assert D.shape == (1, 2)
    assert np.abs(D - [[-1.0, 1.0]]).max() <= 1e-15
    Ddag = build_Ddag(rule, D)
    assert np.abs(Ddag - [[-1.0, 1.0]]).max() <= 1e-15


def test_build_ddag_validates_shape():
    rule = gauss_rule(3)
    with pytest.raises(ValueError):
        build_Ddag(rule, np.zeros((3, 3)))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 10, 20, 50])
def test_differentiates_polynomials_exactly(n):
    """D applied to monomial samples returns the derivative samples."""
    rule = gauss_rule(n)
    dm = build_matrices(rule)
    t = rule.nodes[:-1]
    for k in range(n + 1):
        want = k * rule.interior ** (k - 1) if k else np.zeros(n)
        err = np.abs(differentiate(dm, t**k) - want).max()
        assert err <= 1e-10


@pytest.mark.parametrize("n", [1, 4, 20, 50])
def test_random_polynomial_derivative(n):
    rng = np.random.default_rng(2024)
    rule = gauss_rule(n)
    dm = build_matrices(rule)
    coeffs = rng.normal(size=n + 1)
    t = rule.nodes[:-1]
    vals = np.polyval(coeffs, t)
    want = np.polyval(np.polyder(coeffs), rule.interior)
    assert np.abs(dm.D @ vals - want).max() <= 1e-10 * (1 + np.abs(coeffs).max())


def test_differentiate_validates_rows():
    dm = build_matrices(gauss_rule(4))
    with pytest.raises(ValueError):
        differentiate(dm, np.ones(4))


@pytest.mark.parametrize("n", [1, 2, 7, 30, 50])
def test_rows_annihilate_constants(n):
    dm = build_matrices(gauss_rule(n))
    assert np.abs(dm.D @ np.ones(n + 1)).max() <= 1e-11
    assert np.abs(dm.Ddag @ np.ones(n + 1)).max() <= 1e-11


def test_rows_annihilate_constants_large_n():
    # entry roundoff accumulates with the O(N^2) entry magnitudes
    dm = build_matrices(gauss_rule(100))
    assert np.abs(dm.D @ np.ones(101)).max() <= 2e-10
    assert np.abs(dm.Ddag @ np.ones(101)).max() <= 2e-10


@pytest.mark.parametrize("n", list(range(1, 51)) + [100])
def test_flip_identity(n):
    """Reversing rows and columns of one matrix gives the negative other."""
    dm = build_matrices(gauss_rule(n))
    assert flip_deviation(dm.D, dm.Ddag) <= 1e-10


def test_ddag_core_matches_weight_transform():
    # Ddag_ij = -(w_j / w_i) D_ji on the shared columns, by construction
    rule = gauss_rule(12)
    dm = build_matrices(rule)
    w = rule.weights
    core = -(w[None, :] / w[:, None]) * dm.D[:, 1:].T
    assert np.array_equal(dm.Ddag[:, :12], core)


def test_state_diagonal_closed_form():
    # interior diagonal entries equal 1 / ((1 - tau)(1 + tau))
    rule = gauss_rule(31)
    D = build_D(rule)
    t = rule.interior
    diag = np.array([D[i, i + 1] for i in range(31)])
    assert np.array_equal(diag, 1.0 / ((1.0 - t) * (1.0 + t)))


@pytest.mark.parametrize("n", [2, 5, 12, 20])
def test_analytic_weights_match_product_formula(n):
    """Closed-form barycentric weights agree with the O(N^2) products.

    Barycentric weights are defined up to one common scale, so compare
    the normalized vectors.
    """
    rule = gauss_rule(n)

    for analytic, nodes in (
        (state_bary_weights(rule), rule.nodes[:-1]),
        (costate_bary_weights(rule), rule.nodes[1:]),
    ):
        product = bary_weights(nodes)
        ratio = analytic / product
        assert np.abs(ratio / ratio[0] - 1.0).max() <= 1e-12


def test_costate_weights_n1():
    assert np.allclose(costate_bary_weights(gauss_rule(1)), [-1.0, 1.0])


def test_bary_interp_exact_at_nodes_and_reproduces_cubic():
    rule = gauss_rule(5)
    nodes = rule.nodes[:-1]
    vals = nodes**3
    for i, t in enumerate(nodes):
        assert bary_interp(nodes, vals, t) == vals[i]
    for t in np.linspace(-1.0, 1.0, 17):
        assert abs(bary_interp(nodes, vals, t) - t**3) <= 1e-12


def test_bary_interp_accepts_precomputed_weights():
    rule = gauss_rule(6)
    nodes = rule.nodes[:-1]
    vals = np.sin(nodes)
    w = state_bary_weights(rule)
    for t in (-0.7, 0.1, 0.93):
        assert abs(bary_interp(nodes, vals, t, w) - bary_interp(nodes, vals, t)) <= 1e-13


def test_p1_norm_against_identity_and_baseline():
    for n, baseline in P1_BASELINE.items():
        value = check_p1(n)
        rule = gauss_rule(n)
        assert abs(value - (1.0 + rule.interior[-1])) <= 1e-9
        assert abs(value - baseline) <= 1e-10
        assert value <= 2.0


def test_p1_monotone_in_n():
    values = [check_p1(n) for n in range(25, 301, 25)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert all(v <= 2.0 for v in values)


def test_p2_norm_baseline_and_bound():
    for n, baseline in P2_BASELINE.items():
        value, row = check_p2(n)
        assert abs(value - baseline) <= 1e-10
        assert row == n
        assert value <= np.sqrt(2.0) + 1e-9


def test_certify_report():
    report = certify([1, 10, 25])
    assert len(report.entries) == 3
    first = report.entries[0]
    assert first.n_collocation == 1
    assert first.p1_norm == 1.0
    assert first.flip_max_dev == 0.0
    assert report.flagged == ()
    for entry in report.entries:
        assert entry.flags == ()
        assert entry.p2_argmax_row == entry.n_collocation
