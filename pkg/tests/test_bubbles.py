from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate

from qgamma.bubbles import (
    Bubble,
    bubble_constant,
    bubble_energy,
    bubble_eval,
    bubble_norm_integral,
    bubble_pde_residual,
    bubble_ratio,
    bubble_tangents,
    kernel_check,
    lift_bubble,
    lift_tangents,
    linearized_operator,
    sphere_energy,
)
from qgamma.geometry import bubble_constant_closed_form, get_basis, make_params
from qgamma.utils.exceptions import ValidationError


@pytest.mark.parametrize("n, gamma", [(1, 0.25), (2, 0.5), (3, 0.5), (3, 1.0)])
def test_bubble_constant_matches_closed_form(n, gamma):
    params = make_params(n, gamma)
    lam, alpha = bubble_constant(params)
    assert lam == pytest.approx(bubble_constant_closed_form(params), rel=1e-6)
    assert alpha ** (params.p - 1.0) == pytest.approx(lam, rel=1e-12)


def test_yamabe_bubble(params_3d):
    lam, alpha = bubble_constant(params_3d)
    assert lam == pytest.approx(3.0, rel=1e-6)
    assert alpha == pytest.approx(3.0**0.25, rel=1e-6)


def test_ratio_is_constant(params_1d):
    _, ratio = bubble_ratio(params_1d)
    assert np.std(ratio) / np.mean(ratio) < 1e-6


def test_pde_residual_is_small(params_2d):
    assert bubble_pde_residual(params_2d) < 1e-6


def test_bubble_rejects_nonpositive_scale(params_1d):
    with pytest.raises(ValidationError, match="mu > 0"):
        Bubble(0.0, [0.0], params_1d)


def test_tangents_match_finite_differences(params_2d):
    b = Bubble(0.7, [0.3, -0.4], params_2d)
    x = np.array([[0.1, 0.2], [1.5, -0.3], [-2.0, 4.0]])
    analytic = bubble_tangents(b, x)
    h = 1e-6
    d_mu = (bubble_eval(Bubble(0.7 + h, b.xi, params_2d), x) - bubble_eval(Bubble(0.7 - h, b.xi, params_2d), x)) / (2 * h)
    assert np.allclose(analytic[:, 0], d_mu, atol=1e-7)
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        fd = (bubble_eval(Bubble(0.7, b.xi + e, params_2d), x) - bubble_eval(Bubble(0.7, b.xi - e, params_2d), x)) / (2 * h)
        assert np.allclose(analytic[:, i + 1], fd, atol=1e-7)


def test_norm_integral_against_quadrature(params_1d):
    b = Bubble.standard(params_1d)
    value, _ = integrate.quad(lambda x: bubble_eval(b, x) ** (params_1d.p + 1.0), -np.inf, np.inf)
    assert bubble_norm_integral(params_1d) == pytest.approx(value, rel=1e-8)


def test_lifted_standard_bubble_is_constant(params_1d):
    basis = get_basis(1, 8)
    v = lift_bubble(Bubble.standard(params_1d), basis)
    _, alpha = bubble_constant(params_1d)
    assert np.allclose(v.values(), alpha * 2.0 ** (-params_1d.s), atol=1e-12)
    # sphere energy of the lift equals the plane energy on Z
    assert sphere_energy(v, params_1d) == pytest.approx(bubble_energy(params_1d), rel=1e-10)


def test_lifted_tangents_shape(params_2d):
    basis = get_basis(2, 6)
    T = lift_tangents(Bubble.standard(params_2d), basis)
    assert T.shape == (3, basis.size)


@pytest.mark.parametrize("n, gamma, L", [(1, 0.25, 16), (2, 0.5, 8)])
def test_kernel_is_tangent_space(n, gamma, L):
    params = make_params(n, gamma)
    report = kernel_check(linearized_operator(Bubble.standard(params), L=L, threads=2))
    assert report.dim == n + 1
    assert max(report.angles) < 1e-6
    assert report.negatives == 1
    assert report.passed
    assert report.to_dict()["passed"] is True


def test_generic_perturbation_destroys_the_kernel(params_1d):
    lop = linearized_operator(Bubble.standard(params_1d), L=16)
    rng = np.random.default_rng(7)
    E = rng.standard_normal(lop.matrix.shape)
    E = E + E.T
    E *= 1e-3 * np.linalg.norm(lop.matrix, 2) / np.linalg.norm(E, 2)
    report = kernel_check(replace(lop, matrix=lop.matrix + E))
    assert report.dim == 0
    assert not report.passed


@pytest.mark.slow
@pytest.mark.parametrize("n, gamma, L", [(1, 0.25, 256), (2, 0.5, 48)])
def test_kernel_at_production_resolution(n, gamma, L):
    params = make_params(n, gamma)
    report = kernel_check(linearized_operator(Bubble.standard(params), L=L, threads=2))
    assert report.dim == n + 1
    assert report.negatives == 1
    assert max(report.angles) < 1e-3
