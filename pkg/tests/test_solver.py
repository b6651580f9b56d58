import numpy as np
import pytest
from scipy import optimize

from qgamma.bubbles import Bubble, bubble_energy, bubble_norm_integral, lift_bubble
from qgamma.geometry import get_basis, riesz_constant
from qgamma.reduced import ReducedFunctional
from qgamma.solver import (
    GalerkinProblem,
    continuation_sweep,
    decay_slope,
    dgamma_norm,
    energy,
    energy_gradient,
    fit_sweep,
    nearest_bubble,
    riesz_calibration,
    riesz_residual,
    solve_newton,
    sphere_constant_check,
)
from qgamma.utils.exceptions import ValidationError


@pytest.fixture(scope="module")
def basis_1d():
    return get_basis(1, 64)


@pytest.fixture(scope="module")
def symmetric_zero(params_1d, two_bump_1d):
    """(mu, 0) with D_mu Gamma = 0; xi = 0 is critical by symmetry."""
    rf = ReducedFunctional(two_bump_1d, params_1d, strict=False)
    mu = optimize.brentq(lambda m: rf.gradient(m, [0.0])[0], 0.2, 5.0, xtol=1e-12)
    return Bubble(mu, [0.0], params_1d)


class TestEnergy:
    def test_energy_on_Z(self, params_1d, basis_1d):
        v = lift_bubble(Bubble(0.6, [0.4], params_1d), basis_1d)
        assert energy(v, 0.0, None, params_1d) == pytest.approx(bubble_energy(params_1d), rel=1e-6)

    def test_plane_samples_are_accepted(self, params_1d, basis_1d):
        from qgamma.bubbles import bubble_eval

        b = Bubble.standard(params_1d)
        u = bubble_eval(b, basis_1d.plane_points())
        assert energy(u, 0.0, None, params_1d, basis=basis_1d) == pytest.approx(bubble_energy(params_1d), rel=1e-6)

    def test_bubbles_are_critical(self, params_1d, basis_1d):
        v = lift_bubble(Bubble.standard(params_1d), basis_1d)
        g = energy_gradient(v, 0.0, None, params_1d)
        assert g.l2_norm() < 1e-6 * v.l2_norm()

    def test_dgamma_norm_of_bubble(self, params_1d, basis_1d):
        v = lift_bubble(Bubble.standard(params_1d), basis_1d)
        assert dgamma_norm(v, params_1d) ** 2 == pytest.approx(bubble_norm_integral(params_1d), rel=1e-6)

    def test_unknown_metric(self, params_1d, basis_1d):
        v = lift_bubble(Bubble.standard(params_1d), basis_1d)
        with pytest.raises(ValidationError):
            energy_gradient(v, 0.0, None, params_1d, metric="h1")

    def test_jacobian_matches_finite_differences(self, params_2d, two_bump_2d):
        basis = get_basis(2, 6)
        problem = GalerkinProblem.for_curvature(params_2d, basis, two_bump_2d, 0.02)
        c = lift_bubble(Bubble(0.8, [0.1, 0.0], params_2d), basis).coeffs
        J = problem.jacobian_matrix(c, threads=2)
        d = np.random.default_rng(0).standard_normal(basis.size)
        h = 1e-6
        fd = (problem.residual(c + h * d) - problem.residual(c - h * d)) / (2 * h)
        assert np.allclose(J @ d, fd, atol=1e-6)


class TestNearestBubble:
    def test_recovers_parameters(self, params_1d, basis_1d):
        target = Bubble(0.7, [0.3], params_1d)
        v = lift_bubble(target, basis_1d)
        found, distance = nearest_bubble(v, params_1d)
        assert found.mu == pytest.approx(0.7, rel=1e-6)
        assert found.xi[0] == pytest.approx(0.3, abs=1e-6)
        assert distance < 1e-6


class TestSolve:
    def test_sphere_constant(self, params_1d):
        check = sphere_constant_check(params_1d)
        assert check.deviation <= 1e-10
        assert check.relative_difference < 1e-6

    def test_zero_epsilon_from_exact_seed(self, params_1d, basis_1d):
        b = Bubble.standard(params_1d)
        record = solve_newton(lift_bubble(b, basis_1d), 0.0, None, params_1d, seed_bubble=b)
        assert record.newton_iters <= 2
        assert record.distance_to_Z < 1e-6
        assert record.positivity_margin > 0.0

    def test_rejects_large_epsilon(self, params_1d, basis_1d, two_bump_1d):
        b = Bubble.standard(params_1d)
        with pytest.raises(ValidationError, match="perturbative range"):
            solve_newton(lift_bubble(b, basis_1d), 10.0, two_bump_1d, params_1d)

    @pytest.mark.slow
    def test_two_bump_solution(self, params_1d, two_bump_1d, symmetric_zero):
        basis = get_basis(1, 128)
        record = solve_newton(lift_bubble(symmetric_zero, basis), 0.02, two_bump_1d, params_1d, seed_bubble=symmetric_zero)
        assert record.residual_L2 <= 1e-9
        assert record.positivity_margin > 0.0
        assert record.decay_slope == pytest.approx(-2.0 * params_1d.s, abs=0.01)
        assert riesz_residual(record.field, 0.02, two_bump_1d, params_1d).value <= 5e-4
        header, rows = record.field_rows(params_1d)
        assert header == ["omega_0", "omega_1", "x_1", "v", "u"]
        assert len(rows) == basis.grid_shape[0]

    @pytest.mark.slow
    def test_distance_grows_linearly(self, params_1d, two_bump_1d, symmetric_zero):
        sweep = continuation_sweep(two_bump_1d, params_1d, [0.005, 0.01, 0.02, 0.04], symmetric_zero)
        assert not sweep.failures
        assert 0.85 <= sweep.slope <= 1.15
        assert sweep.monotone


class TestDiagnostics:
    def test_decay_of_bubble(self, params_2d):
        v = lift_bubble(Bubble.standard(params_2d), get_basis(2, 8))
        assert decay_slope(v, params_2d) == pytest.approx(-2.0 * params_2d.s, abs=1e-3)

    def test_riesz_calibration_matches_closed_form(self, params_1d):
        c, closed = riesz_calibration(params_1d)
        assert closed == riesz_constant(params_1d)
        assert c == pytest.approx(closed, rel=1e-4)

    def test_riesz_residual_of_bubble(self, params_1d, basis_1d):
        v = lift_bubble(Bubble.standard(params_1d), basis_1d)
        result = riesz_residual(v, 0.0, None, params_1d)
        assert result.available
        assert result.value <= 5e-4

    def test_riesz_residual_of_zero(self, params_1d):
        result = riesz_residual(lambda x: np.zeros(len(x)), 0.0, None, params_1d)
        assert result.value == 0.0

    def test_riesz_residual_needs_low_dimension(self, params_3d):
        with pytest.raises(ValidationError):
            riesz_residual(lambda x: np.ones(len(x)), 0.0, None, params_3d)


def test_fit_sweep_recovers_rate():
    rows = [{"epsilon": e, "status": "ok", "distance_to_Z": 3.0 * e} for e in (0.01, 0.02, 0.04)]
    rows.append({"epsilon": 0.08, "status": "failed", "error": "x"})
    slope, C, monotone = fit_sweep(rows)
    assert slope == pytest.approx(1.0)
    assert C == pytest.approx(3.0)
    assert monotone


def test_fit_sweep_needs_two_rows():
    assert fit_sweep([{"epsilon": 0.01, "status": "ok", "distance_to_Z": 0.1}]) == (None, None, None)
