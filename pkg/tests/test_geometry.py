import math

import numpy as np
import pytest

from qgamma.geometry import (
    RadialFunction,
    SphereField,
    bubble_constant_closed_form,
    conformal_factor,
    frac_laplacian_pv,
    frac_laplacian_radial,
    get_basis,
    inverse_stereographic,
    lift_plane_to_sphere,
    make_params,
    pull_sphere_to_plane,
    riesz_constant,
    sphere_multiplier,
    sphere_multiplier_array,
    stereographic,
)
from qgamma.utils.exceptions import ValidationError


class TestMakeParams:
    def test_critical_exponent(self):
        params = make_params(1, 0.25)
        assert params.p == pytest.approx(3.0)
        assert params.two_star == pytest.approx(4.0)
        assert params.s == pytest.approx(0.25)

    @pytest.mark.parametrize(
        "n, gamma, bound",
        [(0, 0.25, "n >= 1"), (4, 0.5, "n <= 3"), (2, 0.0, "gamma > 0"), (2, 1.0, "gamma < n/2")],
    )
    def test_rejects_out_of_range(self, n, gamma, bound):
        with pytest.raises(ValidationError, match=bound):
            make_params(n, gamma)

    def test_yamabe_constant(self):
        assert bubble_constant_closed_form(make_params(3, 1.0)) == pytest.approx(3.0)

    def test_riesz_constant_n3_gamma1(self):
        # Newtonian potential: 1 / (4 pi |x|)
        assert riesz_constant(make_params(3, 1.0)) == pytest.approx(1.0 / (4.0 * math.pi))


class TestRadial:
    def test_half_laplacian_of_cauchy_profile(self):
        """(-Delta)^{1/2} (1 + x^2)^{-1} = (1 - x^2) / (1 + x^2)^2 on the line."""
        params = make_params(1, 0.5)
        f = RadialFunction.from_profile(lambda r: 1.0 / (1.0 + r**2), -2.0)
        out = frac_laplacian_radial(f, params)
        r = f.nodes
        mask = (r > 1e-2) & (r < 1e2)
        expected = (1.0 - r**2) / (1.0 + r**2) ** 2
        assert np.max(np.abs(out.values[mask] - expected[mask])) < 1e-6

    def test_laplacian_of_gaussian(self, params_3d):
        f = RadialFunction.from_profile(lambda r: np.exp(-(r**2) / 2.0), -np.inf)
        out = frac_laplacian_radial(f, params_3d)
        r = f.nodes
        mask = (r > 1e-2) & (r < 4.0)
        expected = (3.0 - r**2) * np.exp(-(r**2) / 2.0)
        assert np.max(np.abs(out.values[mask] - expected[mask])) < 1e-6

    def test_rejects_non_decaying_profile(self, params_1d):
        from qgamma.utils.exceptions import NumericalAccuracyError

        f = RadialFunction.from_profile(lambda r: np.ones_like(r), 0.0)
        with pytest.raises(NumericalAccuracyError):
            frac_laplacian_radial(f, params_1d)

    def test_rejects_unsorted_nodes(self):
        with pytest.raises(ValidationError):
            RadialFunction(np.array([1.0, 3.0, 2.0, 4.0]), np.ones(4), -1.0)

    def test_continuous_in_gamma(self):
        f = RadialFunction.from_profile(lambda r: np.exp(-(r**2)), -np.inf)
        out = [frac_laplacian_radial(f, make_params(1, g)).values for g in (0.24, 0.25, 0.26)]
        mask = (f.nodes > 1e-2) & (f.nodes < 4.0)
        first = np.max(np.abs(out[2] - out[0])[mask])
        second = np.max(np.abs(out[2] - 2.0 * out[1] + out[0])[mask])
        assert 0.0 < first < 0.1
        assert second < 0.1 * first


class TestPrincipalValue:
    def test_matches_closed_form_on_the_line(self):
        params = make_params(1, 0.5)
        for x in (0.0, 0.5, 2.0):
            value = frac_laplacian_pv(lambda y: 1.0 / (1.0 + float(np.sum(y * y))), [x], params)
            assert value == pytest.approx((1.0 - x * x) / (1.0 + x * x) ** 2, rel=1e-5, abs=1e-7)

    def test_agrees_with_radial_evaluator_on_gaussian(self, params_1d):
        f = RadialFunction.from_profile(lambda r: np.exp(-(r**2)), -np.inf)
        radial = frac_laplacian_radial(f, params_1d)
        for target in (0.3, 1.0, 1.7):
            k = int(np.argmin(np.abs(radial.nodes - target)))
            r = float(radial.nodes[k])
            pv = frac_laplacian_pv(lambda y: math.exp(-float(np.sum(y * y))), [r], params_1d)
            assert pv == pytest.approx(float(radial.values[k]), rel=1e-5, abs=1e-8)


class TestSphere:
    def test_multipliers(self, params_2d):
        lam = sphere_multiplier_array(4, params_2d)
        # gamma = 1/2, n = 2: lambda_k = Gamma(k + 3/2) / Gamma(k + 1/2) = k + 1/2
        assert np.allclose(lam, np.arange(5) + 0.5)
        assert sphere_multiplier(0, params_2d) == pytest.approx(0.5)

    def test_stereographic_round_trip(self):
        x = np.array([[0.0, 0.0], [1.0, -2.0], [30.0, 4.0]])
        assert np.allclose(stereographic(inverse_stereographic(x)), x)
        # origin goes to the south pole
        assert np.allclose(inverse_stereographic(np.zeros((1, 2))), [[0.0, 0.0, -1.0]])

    @pytest.mark.parametrize("n", [1, 2])
    def test_transforms_are_exact_on_band_limited_fields(self, n):
        basis = get_basis(n, 6)
        rng = np.random.default_rng(3)
        coeffs = rng.standard_normal(basis.size)
        assert np.allclose(basis.analysis(basis.synthesis(coeffs)), coeffs, atol=1e-12)

    def test_lift_and_pull_preserve_plane_values(self, params_2d):
        basis = get_basis(2, 8)
        x = basis.plane_points()
        u = (2.0 / (1.0 + np.sum(x * x, axis=-1))) ** params_2d.s
        v = lift_plane_to_sphere(u, params_2d, basis)
        # u is the conformal factor itself, so its lift is the constant 1
        assert np.allclose(v.values(), 1.0, atol=1e-12)
        _, back = pull_sphere_to_plane(v, params_2d, np.array([[0.3, -0.2], [5.0, 1.0]]))
        pts = np.array([[0.3, -0.2], [5.0, 1.0]])
        assert np.allclose(back, (2.0 / (1.0 + np.sum(pts * pts, axis=1))) ** params_2d.s)

    def test_basis_rejects_three_dimensions(self):
        with pytest.raises(ValidationError):
            get_basis(3, 4)


@pytest.mark.parametrize("n, gamma", [(1, 0.25), (2, 0.5)])
def test_sphere_multipliers_match_radial_evaluator(n, gamma):
    """P_gamma on S^n pulled back equals (-Delta)^gamma on R^n (conformal covariance)."""
    params = make_params(n, gamma)
    basis = get_basis(n, 8)
    zeta = 1.0 - basis.one_minus_zeta()
    v = SphereField.from_values(basis, 1.0 + 0.3 * zeta)
    Pv = SphereField(basis, basis.multipliers(params) * v.coeffs)

    def profile(r):
        z = (r**2 - 1.0) / (r**2 + 1.0)
        return (2.0 / (1.0 + r**2)) ** params.s * (1.0 + 0.3 * z)

    f = RadialFunction.from_profile(profile, -2.0 * params.s)
    radial = frac_laplacian_radial(f, params)
    r = f.nodes[(f.nodes > 1e-2) & (f.nodes < 1e2)]
    x = np.zeros((r.size, n))
    x[:, 0] = r
    _, pulled = pull_sphere_to_plane(Pv, params, x)
    expected = pulled * conformal_factor(x, params) ** (params.p - 1.0)
    got = radial.values[(f.nodes > 1e-2) & (f.nodes < 1e2)]
    assert np.max(np.abs(got - expected)) < 1e-5
