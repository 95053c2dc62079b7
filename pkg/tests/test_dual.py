import numpy as np
import pytest

from subshear import dual
from subshear.dual import DualScalar

from oracles import fd_gradient, fd_hessian


def f_poly(xs):
    x, y, z = xs
    return x * y * z + x ** 3 - 2.0 / (y + 4.0) + z * z * x


def f_trig(xs):
    x, y, z = xs
    return dual.sin(x * y) * dual.cos(z) + dual.sqrt(x * x + 2.0) * dual.exp(-y) + dual.log(z + 3.0)


@pytest.mark.parametrize("fn", [f_poly, f_trig])
@pytest.mark.parametrize("point", [(0.7, 1.3, -0.2), (2.0, 0.5, 1.1)])
def test_gradient_and_hessian_match_finite_differences(fn, point):
    xs = DualScalar.seed(point)
    out = fn(xs)

    def as_float(p):
        return fn(list(p))

    g_fd = fd_gradient(as_float, point)
    h_fd = fd_hessian(as_float, point)
    assert out.value == pytest.approx(fn(list(point)))
    assert np.allclose(out.grad, g_fd, atol=1e-7)
    assert np.allclose(out.hess, h_fd, atol=1e-5)


def test_hessian_is_exactly_symmetric():
    xs = DualScalar.seed((1.2, 0.3, 2.2))
    out = f_trig(xs)
    assert np.array_equal(out.hess, out.hess.T)


def test_product_rule_is_exact():
    # d(x*y) carries no truncation error: compare against hand values
    x, y = DualScalar.seed((3.0, 5.0))
    p = x * y
    assert p.value == 15.0
    assert np.array_equal(p.grad, [5.0, 3.0])
    assert np.array_equal(p.hess, [[0.0, 1.0], [1.0, 0.0]])


def test_quotient_and_power():
    (x,) = DualScalar.seed((2.0,))
    q = 1.0 / x
    assert q.value == 0.5
    assert q.grad[0] == pytest.approx(-0.25)
    assert q.hess[0, 0] == pytest.approx(0.25)
    c = x ** 3
    assert c.grad[0] == pytest.approx(12.0)
    assert c.hess[0, 0] == pytest.approx(12.0)
    r = x ** -1.5
    assert r.grad[0] == pytest.approx(-1.5 * 2.0 ** -2.5)


def test_constants_do_not_contribute_derivatives():
    xs = DualScalar.seed((1.0, 2.0))
    c = DualScalar.constant(7.0, 2)
    out = xs[0] * c + 3.0
    assert out.value == 10.0
    assert np.array_equal(out.grad, [7.0, 0.0])


def test_nested_pass_yields_third_order_information():
    # Differentiate g(u) = f'(u) where f(u) = u^4, via an inner first-order
    # dual whose coefficients are outer duals.  g(u) = 4u^3, g'(u) = 12u^2,
    # g''(u) = 24u.
    (u_outer,) = DualScalar.seed((1.5,))
    x_inner = DualScalar(u_outer, np.array([1.0]), np.zeros((1, 1)))
    f = x_inner * x_inner * x_inner * x_inner
    fprime = f.grad[0]  # outer DualScalar: 4u^3 and its outer derivatives
    assert isinstance(fprime, DualScalar)
    assert fprime.value == pytest.approx(4 * 1.5 ** 3)
    assert fprime.grad[0] == pytest.approx(12 * 1.5 ** 2)
    assert fprime.hess[0, 0] == pytest.approx(24 * 1.5)


def test_jet2_and_matrix_jet():
    def fn(xs):
        x, y = xs
        return [x * y, x + y, dual.sin(x)]

    vals, jac, hess = dual.jet2(fn, (0.4, 0.9))
    assert vals == pytest.approx([0.36, 1.3, np.sin(0.4)])
    assert jac[0] == pytest.approx([0.9, 0.4])
    assert hess[0, 0, 1] == pytest.approx(1.0)

    def mfn(xs):
        x, y = xs
        return [[x * x, x * y], [x * y, 1.0]]

    val, der, der2 = dual.matrix_jet(mfn, (2.0, 3.0))
    assert val[0, 0] == 4.0
    assert der[0, 0, 0] == pytest.approx(4.0)  # d(x^2)/dx
    assert der[1, 0, 1] == pytest.approx(2.0)  # d(xy)/dy
    assert der2[0, 0, 0, 0] == pytest.approx(2.0)
    assert der2[0, 1, 0, 1] == pytest.approx(1.0)
