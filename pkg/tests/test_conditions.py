import math

import numpy as np
import pytest

from qgamma.conditions import (
    CritEntry,
    builtin_field,
    check_K1,
    check_K2,
    check_K5,
    check_K6,
    estimate_beta_A,
    field_from_spec,
    fit_beta,
    global_bookkeeping,
    gradient_map,
    parse_expression,
    theorem_applicability,
)
from qgamma.conditions.checks import FAIL, PASS
from qgamma.config import KSpec
from qgamma.degree import brouwer_degree
from qgamma.geometry import make_params
from qgamma.reduced import ReducedFunctional
from qgamma.utils.exceptions import ValidationError


class TestLibrary:
    @pytest.mark.parametrize("name", ["radial-bump", "gaussian", "two-bump", "cusp"])
    def test_gradients_match_finite_differences(self, name):
        K = builtin_field(name, 2)
        x = np.array([[0.3, -0.7], [1.2, 0.4]])
        h = 1e-6
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            fd = (K.eval(x + e) - K.eval(x - e)) / (2 * h)
            assert np.allclose(K.grad(x)[:, i], fd, atol=1e-7)

    def test_unknown_builtin(self):
        with pytest.raises(ValidationError, match="Unknown built-in"):
            builtin_field("saddle", 2)

    def test_eta_override(self):
        assert builtin_field("gaussian", 2, eta=3.0).eta == 3.0


class TestExpressions:
    def test_grammar_matches_two_bump(self):
        K = parse_expression("gauss(a=1, c=(1,0), w=0.8) + gauss(a=1, c=(-1,0), w=0.8)", 2)
        ref = builtin_field("two-bump", 2)
        x = np.random.default_rng(0).uniform(-2, 2, size=(20, 2))
        assert np.allclose(K.eval(x), ref.eval(x), atol=1e-14)
        assert np.allclose(K.grad(x), ref.grad(x), atol=1e-14)
        assert not K.uses_fd

    def test_raw_expression_uses_finite_differences(self):
        K = parse_expression("exp(-r2) * (1 + 0.1 * x1)", 2)
        assert K.uses_fd
        x = np.array([[0.2, 0.5]])
        expected = math.exp(-0.29) * 1.02
        assert float(K.eval(x)[0]) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("text", ["__import__('os')", "x1.real", "foo(x1)", "'a' + 1"])
    def test_rejects_disallowed_expressions(self, text):
        with pytest.raises(ValidationError):
            parse_expression(text, 2)

    def test_field_from_spec(self):
        assert field_from_spec(KSpec(builtin="cusp"), 2).name == "cusp"
        assert field_from_spec(KSpec(expression="rational(a=2)"), 1).n == 1


class TestK1:
    def test_radial_bump_on_the_line(self):
        """<K'(x), x> = -2x^2 / (1 + x^2)^2 integrates to -pi."""
        verdict = check_K1(builtin_field("radial-bump", 1))
        assert verdict.status == PASS
        assert verdict.evidence["integral"] == pytest.approx(-math.pi, rel=1e-6)

    def test_gaussian_integral_by_divergence_theorem(self):
        """int <K'(x), x> = -n int K = -2 pi for exp(-|x|^2) in the plane."""
        verdict = check_K1(builtin_field("gaussian", 2))
        assert verdict.status == PASS
        assert verdict.evidence["integral"] == pytest.approx(-2.0 * math.pi, rel=1e-6)

    def test_slow_decay_diverges_in_the_plane(self):
        verdict = check_K1(builtin_field("radial-bump", 2))
        assert verdict.status == FAIL
        assert "diverges" in verdict.detail

    def test_unbounded(self):
        verdict = check_K1(builtin_field("paraboloid", 2))
        assert verdict.status == FAIL
        assert verdict.evidence["bounded"] is False

    def test_zero_is_degenerate(self):
        verdict = check_K1(builtin_field("zero", 2))
        assert verdict.status == FAIL
        assert verdict.evidence["degenerate"] is True

    def test_constant_has_no_negative_integral(self):
        assert check_K1(builtin_field("constant", 1)).status == FAIL


class TestK2:
    def test_two_bump_critical_set_on_the_line(self, two_bump_1d):
        verdict, search = check_K2(two_bump_1d)
        assert verdict.status == PASS
        assert len(search.zeros) == 3
        # two maxima (deg -1) around a minimum (deg +1)
        assert [z.deg_loc for z in search.zeros] == [-1, 1, -1]
        assert sum(z.deg_loc for z in search.zeros) == -1
        assert search.zeros[1].x[0] == pytest.approx(0.0, abs=1e-10)

    def test_two_bump_critical_set_in_the_plane(self, two_bump_2d):
        verdict, search = check_K2(two_bump_2d)
        assert verdict.status == PASS
        assert sorted(z.deg_loc for z in search.zeros) == [-1, 1, 1]

    def test_flat_tail_is_not_a_critical_point(self):
        verdict, search = check_K2(builtin_field("gaussian", 2, eta=2.5))
        assert verdict.status == PASS
        assert len(search.zeros) == 1
        assert not search.non_isolated

    def test_separated_bumps_with_wide_search_box(self):
        K = builtin_field("two-bump", 2, options={"separation": 2.0})
        verdict, search = check_K2(K)
        assert verdict.status == PASS
        assert [float(z.x[0]) for z in search.zeros] == pytest.approx([-2.0, 0.0, 2.0], abs=1e-6)
        assert [z.deg_loc for z in search.zeros] == [1, -1, 1]

        entries = [CritEntry(xi=z.x, deg_loc=z.deg_loc) for z in search.zeros]
        book = global_bookkeeping(K, entries, None, None)
        assert book["deg_K"]["value"] == 1
        assert book["deg_K"]["error"] == ""
        assert book["consistent"]

    @pytest.mark.parametrize("n", [1, 2])
    @pytest.mark.parametrize("name", ["radial-bump", "gaussian", "two-bump", "cusp"])
    def test_local_degrees_sum_to_the_box_degree(self, name, n):
        K = builtin_field(name, n)
        verdict, search = check_K2(K)
        assert verdict.status == PASS
        R = 2.0 * K.eta
        total = sum(z.deg_loc for z in search.zeros)
        assert total == brouwer_degree(gradient_map(K), [[-R, R]] * n).degree == (-1) ** n

    def test_constant_field_has_no_critical_points(self):
        verdict, search = check_K2(builtin_field("constant", 2))
        assert search.zeros == []
        assert search.diagnostics
        assert search.flat
        assert not search.non_isolated
        assert verdict.status == FAIL


class TestExpansion:
    def test_cusp_exponent_from_fit(self):
        beta, r2 = fit_beta(builtin_field("cusp", 2), np.zeros(2))
        assert beta == pytest.approx(1.5, abs=0.02)
        assert r2 > 0.99

    def test_cusp_uses_coordinate_data(self, params_2d):
        K = builtin_field("cusp", 2)
        rf = ReducedFunctional(K, params_2d, strict=False)
        entry = estimate_beta_A(K, np.zeros(2), rf)
        assert entry.route == "k6"
        assert entry.beta == 1.5
        assert entry.A < 0.0
        assert entry.verified

    def test_k6_on_cusp(self, params_2d):
        K = builtin_field("cusp", 2)
        _, search = check_K2(K)
        entries = [CritEntry(xi=z.x, deg_loc=z.deg_loc) for z in search.zeros]
        verdict = check_K6(K, entries, 2)
        # single maximum with a < 0: sum is 1 = (-1)^2
        assert verdict.status == FAIL
        assert verdict.evidence["sum"] == 1


class TestK5:
    def test_two_bump_passes(self, params_2d, two_bump_2d):
        _, search = check_K2(two_bump_2d)
        rf = ReducedFunctional(two_bump_2d, params_2d)
        entries = []
        for z in search.zeros:
            e = estimate_beta_A(two_bump_2d, z.x, rf)
            e.deg_loc = z.deg_loc
            entries.append(e)
        verdict = check_K5(entries, 2)
        assert verdict.status == PASS
        assert verdict.evidence["sum"] == 2

    def test_single_bump_fails(self, params_2d):
        K = builtin_field("gaussian", 2)
        _, search = check_K2(K)
        rf = ReducedFunctional(K, params_2d)
        entries = []
        for z in search.zeros:
            e = estimate_beta_A(K, z.x, rf)
            e.deg_loc = z.deg_loc
            entries.append(e)
        verdict = check_K5(entries, 2)
        assert verdict.status == FAIL
        assert verdict.evidence["sum"] == 1


@pytest.mark.slow
class TestApplicability:
    def test_two_bump_is_applicable(self, params_2d, two_bump_2d):
        report = theorem_applicability(two_bump_2d, params_2d, threads=2)
        assert report.verdict == "applicable"
        assert report.omega["degree"] != 0
        assert report.theta_plus
        assert report.bookkeeping["consistent"]
        assert report.bookkeeping["deg_gamma"]["value"] == -1
        sums = report.bookkeeping["sum_by_sign"]
        assert sums["positive"] + sums["negative"] == 1
        assert report.crit_equivalence["passed"]

    def test_single_bump_is_not_applicable(self, params_2d):
        report = theorem_applicability(builtin_field("gaussian", 2), params_2d, threads=2)
        assert report.verdict == "not-applicable"
        assert "(K4)" in report.reason or "(K5)" in report.reason
        data = report.to_dict()
        assert data["verdict"] == "not-applicable"
        assert set(data) >= {"k1", "k2", "k3", "k4", "k5", "k6", "crit_set", "bookkeeping"}

    def test_unbounded_reports_every_check(self):
        report = theorem_applicability(builtin_field("paraboloid", 2), make_params(2, 0.5))
        assert report.verdict == "not-applicable"
        assert "(K1)" in report.reason
        assert report.k5.status in (PASS, FAIL, "not-applicable", "unknown")
