import numpy as np
import pytest

from qgamma.conditions import builtin_field
from qgamma.reduced import (
    HomogeneousModel,
    ReducedFunctional,
    a_xi,
    boundary_repulsion,
    c0,
    c0_closed_form,
    c1,
    gamma_eval,
    gamma_grad,
    gamma_hessian,
    gamma_hessian_mu0,
    landscape_scan,
)
from qgamma.utils.exceptions import DomainError, ValidationError


@pytest.fixture(scope="module")
def gaussian_rf(params_2d):
    return ReducedFunctional(builtin_field("gaussian", 2), params_2d)


@pytest.mark.parametrize("n, gamma", [(1, 0.25), (2, 0.5), (3, 1.0)])
def test_c0_matches_beta_closed_form(n, gamma):
    from qgamma.geometry import make_params

    params = make_params(n, gamma)
    assert c0(params) == pytest.approx(c0_closed_form(params), rel=1e-8)


def test_value_at_zero_scale_is_c0_K(gaussian_rf):
    rng = np.random.default_rng(0)
    for xi in rng.uniform(-1.5, 1.5, size=(5, 2)):
        expected = gaussian_rf.c0 * float(gaussian_rf.K.eval(xi))
        assert gamma_eval(0.0, xi, gaussian_rf) == pytest.approx(expected, rel=1e-14)


def test_even_in_mu(gaussian_rf):
    xi = np.array([0.4, -0.2])
    assert gamma_eval(-0.6, xi, gaussian_rf) == pytest.approx(gamma_eval(0.6, xi, gaussian_rf), rel=1e-14)


def test_mu_derivative_vanishes_at_zero(gaussian_rf):
    rng = np.random.default_rng(1)
    for xi in rng.uniform(-2.0, 2.0, size=(10, 2)):
        assert abs(gamma_grad(0.0, xi, gaussian_rf)[0]) <= 1e-9


def test_gradient_matches_finite_differences(gaussian_rf):
    mu, xi = 0.7, np.array([0.3, -0.5])
    grad = gamma_grad(mu, xi, gaussian_rf)
    h = 1e-5
    fd_mu = (gamma_eval(mu + h, xi, gaussian_rf) - gamma_eval(mu - h, xi, gaussian_rf)) / (2 * h)
    assert grad[0] == pytest.approx(fd_mu, abs=1e-6)
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        fd = (gamma_eval(mu, xi + e, gaussian_rf) - gamma_eval(mu, xi - e, gaussian_rf)) / (2 * h)
        assert grad[i + 1] == pytest.approx(fd, abs=1e-6)


def test_hessian_is_symmetric(gaussian_rf):
    H = gamma_hessian(0.5, [0.2, 0.1], gaussian_rf)
    assert H.shape == (3, 3)
    assert np.allclose(H, H.T, atol=1e-12)


def test_second_mu_derivative_matches_c1_laplacian(params_3d):
    """K = exp(-|x|^2) has Delta K(0) = -2n."""
    rf = ReducedFunctional(builtin_field("gaussian", 3), params_3d)
    h = gamma_hessian_mu0(np.zeros(3), rf)
    assert h.laplacian == pytest.approx(-6.0, rel=1e-12)
    assert h.value == pytest.approx(-6.0 * c1(params_3d), rel=1e-12)
    assert h.second_difference == pytest.approx(h.value, rel=1e-4)


def test_c1_diverges_in_low_dimension(params_2d):
    with pytest.raises(DomainError, match="divergent"):
        c1(params_2d)


def test_a_xi_rejects_beta_outside_range(params_2d):
    model = HomogeneousModel(2.5, lambda x: -np.sum(np.abs(x) ** 2.5, axis=-1))
    with pytest.raises(DomainError, match="1 < β < n"):
        a_xi(model, params_2d)


def test_a_xi_sign_and_homogeneity(params_2d):
    model = HomogeneousModel(1.5, lambda x: -np.sum(np.abs(x) ** 1.5, axis=-1))
    assert model.homogeneity_error(2) < 1e-12
    assert a_xi(model, params_2d) < 0.0
    assert model.A is not None


def test_landscape_scan_is_ordered(gaussian_rf):
    box = [[0.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]]
    table = landscape_scan(gaussian_rf, box, 5, threads=2)
    assert table.header == ["mu", "xi_1", "xi_2", "gamma", "grad_norm"]
    assert table.rows.shape == (125, 5)
    assert table.shape == (5, 5, 5)
    # row-major over (mu, xi_1, xi_2)
    assert np.allclose(table.rows[:5, 2], np.linspace(-1.0, 1.0, 5))
    again = landscape_scan(gaussian_rf, box, 5, threads=1)
    assert np.array_equal(table.rows, again.rows)


def test_landscape_rejects_wrong_box(gaussian_rf):
    with pytest.raises(ValidationError):
        landscape_scan(gaussian_rf, [[0.0, 1.0]], 3)


def test_boundary_repulsion_far_out(params_2d, two_bump_2d):
    rf = ReducedFunctional(two_bump_2d, params_2d, strict=False)
    result = boundary_repulsion(rf, 6.0, probes=32)
    assert result["passed"]
    assert result["max_inner"] < 0.0


def test_dimension_mismatch(params_1d):
    with pytest.raises(ValidationError):
        ReducedFunctional(builtin_field("gaussian", 2), params_1d)
