import numpy as np
import pytest

from stheat.sbp import build_sbp_1d, lgl_rule, verify_sbp


def poly_integral(coeffs, a, b):
    # exact integral of sum c_s x^s, used as the quadrature oracle
    return sum(c / (s + 1) * (b ** (s + 1) - a ** (s + 1)) for s, c in enumerate(coeffs))


def test_two_point_rule_is_trapezoid():
    rule = lgl_rule(2)
    np.testing.assert_allclose(rule.nodes, [-1.0, 1.0], atol=0)
    np.testing.assert_allclose(rule.weights, [1.0, 1.0], atol=0)


def test_three_point_rule_hand_derived():
    # roots of (1-x^2) P2'(x) = (1-x^2) 3x and w = 2/(6 P2(x)^2)
    rule = lgl_rule(3)
    np.testing.assert_allclose(rule.nodes, [-1.0, 0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(rule.weights, [1 / 3, 4 / 3, 1 / 3], atol=1e-15)


def test_five_point_nodes_closed_form():
    # (1-x^2) P4'(x) = 0  =>  x in {0, +-sqrt(3/7), +-1}
    rule = lgl_rule(5)
    r = np.sqrt(3 / 7)
    np.testing.assert_allclose(rule.nodes, [-1.0, -r, 0.0, r, 1.0], atol=1e-15)


def test_rule_rejects_single_node():
    with pytest.raises(ValueError):
        lgl_rule(1)


@pytest.mark.parametrize("n", range(2, 17))
def test_rule_invariants(n):
    rule = lgl_rule(n)
    assert abs(rule.weights.sum() - 2.0) <= 1e-13
    assert np.max(np.abs(rule.nodes + rule.nodes[::-1])) <= 1e-13
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(rule.weights > 0)
    # quadrature exact to degree 2n - 3 on random polynomials
    rng = np.random.default_rng(n)
    for _ in range(5):
        coeffs = rng.standard_normal(2 * n - 2)  # degrees 0 .. 2n-3
        u = np.polynomial.polynomial.polyval(rule.nodes, coeffs)
        quad = rule.weights @ u
        exact = poly_integral(coeffs, -1.0, 1.0)
        assert abs(quad - exact) <= 1e-12 * max(1.0, np.linalg.norm(u))


def test_diff_matrix_three_nodes_reference():
    # hand-differentiated Lagrange basis on {-1, 0, 1}
    op = build_sbp_1d(3, (-1.0, 1.0))
    expected = np.array([[-1.5, 2.0, -0.5], [-0.5, 0.0, 0.5], [0.5, -2.0, 1.5]])
    np.testing.assert_allclose(op.D, expected, atol=1e-14)


def test_diff_matrix_unit_interval_doubles():
    ref = build_sbp_1d(3, (-1.0, 1.0))
    op = build_sbp_1d(3, (0.0, 1.0))
    np.testing.assert_allclose(op.D, 2.0 * ref.D, atol=1e-14)
    np.testing.assert_allclose(op.weights, 0.5 * ref.weights, atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 5, 8, 13])
def test_constants_differentiate_to_zero(n):
    op = build_sbp_1d(n, (0.3, 1.9))
    assert np.max(np.abs(op.D @ np.ones(n))) <= 1e-12


@pytest.mark.parametrize("n", range(2, 17))
@pytest.mark.parametrize("interval", [(-1.0, 1.0), (0.0, 1.0), (-2.0, 1.0), (0.25, 0.55)])
def test_operator_invariants(n, interval):
    op = build_sbp_1d(n, interval)
    assert np.max(np.abs(op.Q + op.Q.T - op.E)) <= 1e-13
    x = op.nodes
    for s in range(n):
        exact = np.zeros_like(x) if s == 0 else s * x ** (s - 1)
        scale = max(1.0, np.max(np.abs(x)) ** s)
        assert np.max(np.abs(op.D @ x**s - exact)) <= 1e-11 * scale
    assert np.all(op.weights > 0)


@pytest.mark.parametrize("n", [2, 4, 7, 12])
def test_affine_covariance(n):
    ref = build_sbp_1d(n, (-1.0, 1.0))
    a, b = -0.7, 1.8
    op = build_sbp_1d(n, (a, b))
    np.testing.assert_allclose(op.D, ref.D * (2.0 / (b - a)), atol=1e-13)
    np.testing.assert_allclose(op.weights, ref.weights * ((b - a) / 2.0), atol=1e-13)


def test_verify_sbp_clean_operator():
    report = verify_sbp(build_sbp_1d(5, (0.0, 1.0)))
    assert report["sbp_identity"] <= 1e-12
    assert report["accuracy"] <= 1e-12
    assert report["spd"] == 0.0


def test_verify_sbp_detects_corrupted_q():
    op = build_sbp_1d(5, (0.0, 1.0))
    op.Q[2, 3] += 1e-3
    report = verify_sbp(op)
    assert report["sbp_identity"] == pytest.approx(1e-3, rel=1e-6)


def test_verify_sbp_two_point_linear_exactness():
    report = verify_sbp(build_sbp_1d(2, (-1.0, 1.0)))
    assert report["accuracy"] <= 1e-14
