import numpy as np
import pytest
from math import factorial

from stokesxt.quadrature import (
    TimeBasis,
    gauss_01,
    map_rule_to_simplices,
    prism_rule,
    radau_right_nodes,
    simplex_measure,
    simplex_rule,
)


def exact_simplex_monomial(alpha):
    # int_T prod x_i^a_i dx = prod(a_i!) / (d + sum a_i)!
    d = len(alpha)
    num = 1
    for a in alpha:
        num *= factorial(a)
    return num / factorial(d + sum(alpha))


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
@pytest.mark.parametrize("order", [1, 2, 4, 6])
def test_simplex_rule_exactness(dim, order):
    pts, wts = simplex_rule(dim, order)
    assert np.all(wts > 0)
    assert abs(wts.sum() - 1.0 / factorial(dim)) < 1e-13
    rng = np.random.default_rng(0)
    for _ in range(10):
        alpha = rng.integers(0, order + 1, size=dim)
        while alpha.sum() > order:
            alpha = rng.integers(0, order + 1, size=dim)
        approx = np.dot(wts, np.prod(pts ** alpha, axis=1))
        assert abs(approx - exact_simplex_monomial(alpha)) < 1e-13


def test_gauss_01_exactness():
    pts, wts = gauss_01(5)
    for p in range(6):
        assert abs(np.dot(wts, pts ** p) - 1.0 / (p + 1)) < 1e-14


def test_simplex_measure_embedded():
    # unit triangle in 3D, measure 1/2
    tri = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
    assert abs(simplex_measure(tri[None])[0] - 0.5) < 1e-14
    # segment in 2D
    seg = np.array([[0, 0], [3, 4]], dtype=float)
    assert abs(simplex_measure(seg[None])[0] - 5.0) < 1e-14


def test_map_rule_to_simplices():
    verts = np.array([[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]],
                      [[1.0, 1.0], [2.0, 1.0], [1.0, 3.0]]])
    pts, wts = map_rule_to_simplices(verts, order=3)
    assert np.allclose(wts.sum(axis=1), [2.0, 1.0])
    # integrate x over the first triangle: int_T x = 2^3 * 1/6 = 4/3
    val = np.sum(wts[0] * pts[0, :, 0])
    assert abs(val - 4.0 / 3.0) < 1e-13


def test_prism_rule_tensor_exactness():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    rule = prism_rule(verts, 0.0, 1.0, space_order=2, time_order=2)
    # int x1 over triangle x (0,1) = 1/6
    assert abs(np.dot(rule.weights, rule.points[:, 0]) - 1.0 / 6.0) < 1e-14
    # int x1 * t^2
    val = np.dot(rule.weights, rule.points[:, 0] * rule.points[:, 2] ** 2)
    assert abs(val - 1.0 / 18.0) < 1e-14


def test_radau_right_nodes():
    assert radau_right_nodes(0) == (1.0,)
    q1 = radau_right_nodes(1)
    assert np.allclose(q1, [1.0 / 3.0, 1.0])
    q2 = radau_right_nodes(2)
    assert abs(q2[-1] - 1.0) < 1e-14
    assert np.all(np.diff(q2) > 0)


@pytest.mark.parametrize("q", [0, 1, 2, 3])
def test_time_basis_lagrange_property(q):
    tb = TimeBasis(q)
    vals = tb.eval(tb.nodes)
    assert np.allclose(vals, np.eye(q + 1), atol=1e-12)
    # partition of unity and derivative consistency
    taus = np.linspace(0, 1, 7)
    assert np.allclose(tb.eval(taus).sum(axis=-1), 1.0, atol=1e-12)
    eps = 1e-6
    fd = (tb.eval(taus + eps) - tb.eval(taus - eps)) / (2 * eps)
    assert np.allclose(fd, tb.eval_deriv(taus), atol=1e-6)


def test_time_basis_endpoint_node():
    for q in range(4):
        tb = TimeBasis(q)
        at_one = tb.eval(1.0)
        expect = np.zeros(q + 1)
        expect[-1] = 1.0
        assert np.allclose(at_one, expect, atol=1e-12)


def test_unsupported_order_rejected():
    with pytest.raises(ValueError, match="supported range"):
        simplex_rule(2, 0)
    with pytest.raises(ValueError, match="supported range"):
        simplex_rule(2, 99)
