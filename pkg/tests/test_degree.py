import numpy as np
import pytest

from qgamma.degree import (
    MapUnderTest,
    boundary_sign_shortcut,
    brouwer_degree,
    crit_points,
    local_degree,
    mollified_degree,
)
from qgamma.utils.exceptions import DegreeError, ValidationError


def identity(d):
    return MapUnderTest(d, lambda X: X, name="identity")


def antipodal(d):
    return MapUnderTest(d, lambda X: -X, name="antipodal")


def planar_square():
    def f(X):
        x, y = X[:, 0], X[:, 1]
        return np.stack([x * x - y * y, 2.0 * x * y], axis=1)

    return MapUnderTest(2, f, name="z^2")


def box(d, r=1.0):
    return [[-r, r]] * d


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_identity_has_degree_one(d):
    result = brouwer_degree(identity(d), box(d))
    assert result.degree == 1
    assert result.certified


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_antipodal_degree(d):
    assert brouwer_degree(antipodal(d), box(d)).degree == (-1) ** d


def test_planar_squaring_has_degree_two():
    assert brouwer_degree(planar_square(), box(2)).degree == 2


def test_zero_free_box_has_degree_zero():
    assert brouwer_degree(identity(2), [[1.0, 2.0], [1.0, 2.0]]).degree == 0


def test_volume_integral_agrees():
    assert mollified_degree(planar_square(), box(2)).degree == 2
    assert mollified_degree(antipodal(2), box(2)).degree == 1


def test_cross_check_passes():
    result = brouwer_degree(antipodal(3), box(3), cross_check=True)
    assert result.degree == -1


def test_boundary_zero_is_reported():
    shifted = MapUnderTest(2, lambda X: X - np.array([1.0, 0.0]))
    with pytest.raises(DegreeError) as info:
        brouwer_degree(shifted, box(2))
    assert info.value.min_boundary_norm <= 1e-10


def test_dimension_limit():
    with pytest.raises(ValidationError):
        brouwer_degree(identity(5), box(5))


def test_sign_shortcut_matches_degree():
    for d in (1, 2, 3):
        m = antipodal(d)
        assert boundary_sign_shortcut(m, 1.0) == (-1) ** d == brouwer_degree(m, box(d)).degree
    assert boundary_sign_shortcut(planar_square(), 1.0) is None


def test_local_degree_of_saddle():
    saddle = MapUnderTest(2, lambda X: np.stack([X[:, 0], -X[:, 1]], axis=1))
    assert local_degree(saddle, [0.0, 0.0], 0.1) == -1


def test_crit_points_of_cubic():
    """x^3 - x has zeros -1, 0, 1 with local degrees +1, -1, +1."""
    m = MapUnderTest(1, lambda X: X**3 - X, jacobian=lambda x: np.array([[3.0 * x[0] ** 2 - 1.0]]))
    search = crit_points(m, [[-2.0, 2.0]], grid=9)
    xs = [float(z.x[0]) for z in search.zeros]
    assert xs == pytest.approx([-1.0, 0.0, 1.0], abs=1e-9)
    assert [z.deg_loc for z in search.zeros] == [1, -1, 1]
    assert sum(z.deg_loc for z in search.zeros) == brouwer_degree(m, [[-2.0, 2.0]]).degree


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("name", ["gaussian", "two-bump", "cusp", "radial-bump"])
def test_excision_on_nested_boxes(name, n):
    """All zeros of K' sit in B_1.2, so every larger box has the same degree."""
    from qgamma.conditions import builtin_field, gradient_map

    m = gradient_map(builtin_field(name, n))
    degrees = [brouwer_degree(m, box(n, r)).degree for r in (1.5, 2.0, 2.7, 3.5, 5.0)]
    assert degrees == [(-1) ** n] * 5


def test_fast_decay_keeps_a_direction_on_the_boundary():
    # |F| is ~1e-21 at the corners, far below any absolute tolerance
    m = MapUnderTest(2, lambda X: -X * np.exp(-np.sum(X * X, axis=1))[:, None])
    result = brouwer_degree(m, box(2, 5.0))
    assert result.degree == 1
    assert result.min_boundary_norm < 1e-20


def test_tiny_endpoint_values_on_the_line():
    m = MapUnderTest(1, lambda X: -X * np.exp(-X * X))
    assert brouwer_degree(m, box(1, 6.0)).degree == -1


def test_constant_map_has_no_certified_zeros():
    flat = MapUnderTest(2, lambda X: np.zeros_like(X), name="zero")
    search = crit_points(flat, box(2))
    assert search.zeros == []
    assert search.diagnostics
    assert len(search.flat) == 25
    assert search.scale == 0.0


def test_decaying_tail_is_flat_not_a_zero():
    gauss_grad = MapUnderTest(2, lambda X: -2.0 * X * np.exp(-np.sum(X * X, axis=1))[:, None])
    search = crit_points(gauss_grad, box(2, 6.0), grid=7)
    assert len(search.zeros) == 1
    assert np.allclose(search.zeros[0].x, 0.0, atol=1e-12)
    assert search.zeros[0].deg_loc == 1
    assert not search.non_isolated
