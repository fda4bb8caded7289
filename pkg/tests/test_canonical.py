import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from expander_lab import (ParamGrid, evaluate_jet, expander_residual, make_cylinder,
                          make_hyperplane, make_sphere, radii_for_lambda)
from expander_lab.errors import InvalidDimension, NonPositiveRadius


@pytest.mark.parametrize("n, r, lam", [(2, 2.0, 2.0), (2, 1.0, 2.5), (3, 1.0, 3.5), (1, 2.0, 1.5)])
def test_sphere_lambda(n, r, lam):
    assert make_sphere(n, r).lam == pytest.approx(lam)


def test_cylinder_and_plane_lambda():
    assert make_cylinder(2, 3, 2.0).lam == pytest.approx(2.0)
    assert make_cylinder(1, 2, 1.0).lam == pytest.approx(1.5)
    assert make_hyperplane(2, 3.0).lam == pytest.approx(1.5)
    assert make_hyperplane(2, 3.0, sign=-1).lam == pytest.approx(-1.5)


def test_invalid_inputs():
    with pytest.raises(NonPositiveRadius):
        make_sphere(2, -1.0)
    with pytest.raises(ValueError):
        make_sphere(2, 0.0)
    with pytest.raises(InvalidDimension):
        make_cylinder(2, 2, 1.0)
    with pytest.raises(InvalidDimension):
        make_sphere(0, 1.0)
    with pytest.raises(ValueError):
        make_hyperplane(2, -1.0)


def test_radii_for_lambda():
    assert radii_for_lambda(2, 1.0) == []
    assert radii_for_lambda(2, 2.0) == [2.0]
    small, big = radii_for_lambda(2, 3.0)
    assert_allclose([small, big], [3 - math.sqrt(5), 3 + math.sqrt(5)])


@given(k=st.integers(1, 5), lam=st.floats(0.1, 50.0))
def test_radii_solve_the_radius_equation(k, lam):
    for r in radii_for_lambda(k, lam):
        assert k / r + r / 2 == pytest.approx(lam, rel=1e-12)


@pytest.mark.parametrize("make", [
    lambda: make_sphere(2, 0.5), lambda: make_sphere(3, 2.0), lambda: make_sphere(1, 1.5),
    lambda: make_cylinder(1, 2, math.sqrt(2)), lambda: make_cylinder(2, 3, 1.0),
    lambda: make_cylinder(1, 3, 0.7), lambda: make_hyperplane(2, 1.0),
    lambda: make_hyperplane(3, 2.0, sign=-1),
])
def test_closed_form_and_fd_residuals(make):
    ex = make()
    grid = ParamGrid(tuple(np.linspace(lo, hi, 7) for lo, hi in ex.patch.domain))
    J = ex.closed_form_grid(grid)
    assert np.abs(expander_residual(J, ex.spec)).max() <= 1e-12
    assert_allclose(J.principal, np.broadcast_to(ex.exact_principal(), J.principal.shape),
                    atol=1e-12)
    p = [lo + 0.4 * (hi - lo) for lo, hi in ex.patch.domain]
    assert abs(expander_residual(evaluate_jet(ex.patch, p, 1e-3), ex.spec)) <= 1e-6


def test_outward_normal_convention():
    S = make_sphere(2, 2.0)
    jet = S.closed_form_jet([1.0, 1.0])
    assert_allclose(jet.normal, jet.x / 2.0, atol=1e-14)
    assert jet.H == pytest.approx(1.0)
    circle = make_sphere(1, 2.0)
    jet = evaluate_jet(circle.patch, [1.0], 1e-3)
    assert_allclose(jet.normal, jet.x / 2.0, atol=1e-6)


def test_flipped_example_solves_negated_equation():
    S = make_sphere(2, 1.0).flipped()
    assert S.lam == pytest.approx(-2.5)
    J = S.closed_form_grid(ParamGrid.over(S.patch.domain, 0.2))
    assert np.abs(expander_residual(J, S.spec)).max() <= 1e-12


def test_rotated_chart_covers_the_poles():
    S = make_sphere(2, 1.0)
    main, rotated = S.charts()
    pole = np.array([0.0, 0.0, 1.0])
    # the main chart keeps away from (0, 0, +-1); the rotated one passes through it
    pts = ParamGrid.over(rotated.domain, 0.05).points
    xs = rotated.embedding(pts).reshape(-1, 3)
    assert np.min(np.linalg.norm(xs - pole, axis=1)) < 0.05
    jet = evaluate_jet(rotated, [math.pi / 2, math.pi / 2], 1e-3)
    assert abs(expander_residual(jet, S.spec)) < 1e-8
