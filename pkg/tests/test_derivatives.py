import itertools
import math
import warnings

import numpy as np
import pytest

from homranders.derivatives import (
    PLAIN_WEIGHTS,
    apply_stencil,
    central_diff,
    comb_half,
    jet_space,
    richardson_check,
    stencil_points,
)
from homranders.errors import NumericalAccuracyWarning


def _poly_jet(js, coeffs, y):
    """Jet of sum c_e prod (y+η)_v^e_v built from affine jets and products."""
    Y = js.affine(y)
    out = js.constant(0.0)
    for e, c in coeffs.items():
        term = js.constant(1.0)
        for v, k in enumerate(e):
            for _ in range(k):
                term = js.mul(term, Y[v])
        out = out + c * term
    return out


def _poly_deriv(coeffs, y, alpha):
    total = 0.0
    for e, c in coeffs.items():
        val = c
        for v, (k, a) in enumerate(zip(e, alpha)):
            if a > k:
                val = 0.0
                break
            val *= math.factorial(k) / math.factorial(k - a) * y[v] ** (k - a)
        total += val
    return total


def test_polynomial_derivatives_exact():
    rng = np.random.default_rng(0)
    js = jet_space(3, 4)
    coeffs = {e: rng.standard_normal() for e in itertools.product(range(3), repeat=3) if sum(e) <= 4}
    y = rng.standard_normal(3)
    jet = _poly_jet(js, coeffs, y)
    for alpha in js.monomials:
        exact = _poly_deriv(coeffs, y, alpha)
        assert abs(js.derivative(jet, alpha) - exact) <= 1e-13 * max(1.0, abs(exact))


def test_gradient_hessian_helpers():
    js = jet_space(2, 2)
    y = np.array([0.3, -1.2])
    # f = y0^2 y1 has no degree > 3 terms; truncated at order 2 around y
    jet = _poly_jet(js, {(2, 1): 1.0}, y)
    assert np.isclose(js.value(jet), y[0] ** 2 * y[1])
    assert np.allclose(js.gradient(jet), [2 * y[0] * y[1], y[0] ** 2])
    assert np.allclose(js.hessian(jet), [[2 * y[1], 2 * y[0]], [2 * y[0], 0.0]])


def test_sqrt_and_reciprocal():
    js = jet_space(2, 4)
    a = js.affine(np.array([2.0, 0.5]))
    s = js.mul(a[0], a[0]) + js.mul(a[1], a[1])
    r = js.sqrt(s)
    assert np.allclose(js.mul(r, r), s, atol=1e-13)
    assert np.allclose(js.mul(s, js.reciprocal(s)), js.constant(1.0), atol=1e-13)


def test_sqrt_rejects_nonpositive():
    js = jet_space(1, 2)
    with pytest.raises(ValueError):
        js.sqrt(js.constant(-1.0))


def test_matrix_inverse():
    rng = np.random.default_rng(1)
    js = jet_space(2, 3)
    A = rng.standard_normal((3, 3, js.size)) * 0.2
    A[..., 0] += np.eye(3) * 2
    P = js.matmul(A, js.inv(A))
    assert np.allclose(P, js.constant(np.eye(3)), atol=1e-12)


def test_deriv_drops_top_degree():
    js = jet_space(1, 2)
    x = js.affine(np.array([1.0]))[0]
    sq = js.mul(x, x)  # (1+η)^2
    d = js.deriv(sq, 0)
    assert np.allclose(d, [2.0, 2.0, 0.0])


def test_order_zero_space():
    js = jet_space(3, 0)
    assert js.size == 1
    assert np.allclose(js.affine(np.array([1.0, 2.0, 3.0])), [[1.0], [2.0], [3.0]])


def test_lower_order_is_prefix():
    hi, lo = jet_space(3, 4), jet_space(3, 2)
    assert hi.monomials[: lo.size] == lo.monomials


def test_comb_half():
    assert comb_half(0) == 1.0
    assert comb_half(1) == 0.5
    assert comb_half(2) == -0.125


def test_central_diff_polynomial():
    f = lambda x: np.array([x[0] ** 4 * x[1], np.sin(x[1])])
    x = np.array([0.7, -0.3])
    d = central_diff(f, x)
    exact = np.array([[4 * 0.7**3 * -0.3, 0.0], [0.7**4, np.cos(-0.3)]])
    assert np.allclose(d, exact, atol=1e-10)


def test_stencil_matches_central_diff():
    f = lambda x: np.exp(x[0]) * x[1] ** 3 - x[2]
    x = np.array([0.1, 0.4, -0.2])
    h = 1e-3
    vals = np.array([f(p) for p in stencil_points(x, h)])
    assert np.allclose(apply_stencil(vals, 3, h), central_diff(f, x, h), atol=1e-13)
    plain = apply_stencil(vals, 3, h, weights=PLAIN_WEIGHTS)
    assert np.allclose(plain, central_diff(f, x, h), atol=1e-5)


def test_richardson_warning():
    f = lambda x: np.array([np.sin(50 * x[0])])
    with pytest.warns(NumericalAccuracyWarning):
        central_diff(f, np.array([0.0]), h=1e-2, check=True)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        central_diff(lambda x: x**2, np.array([0.5]), check=True)
    with pytest.warns(NumericalAccuracyWarning):
        richardson_check(np.array([1.0]), np.array([1.1]))
