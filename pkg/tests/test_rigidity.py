import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from expander_lab import (ExpanderSpec, check_cmc_identity, check_cylinder_conditions,
                          check_gap_lambda, check_huiss_condition, check_mean_convex_condition,
                          check_pinching, check_smoczyk_conditions, check_sphere_condition,
                          check_tu_condition, check_weighted_norm_condition, eigen_identity,
                          integrate_profile, make_cylinder, make_hyperplane, make_sphere,
                          radii_for_lambda, revolve)
from expander_lab.errors import (AlphaTooSmall, CurvatureGrowthTooLarge, LambdaBelowGap,
                                 LambdaZero, NotClosed, NotCMC)
from expander_lab.geometry import assemble_jets
from expander_lab.measure import LinearBound

CYL = make_cylinder(1, 2, 1.0)
S2 = make_sphere(2, 2.0)
BIG = make_sphere(2, 3 + math.sqrt(5))
SMALL = make_sphere(2, 3 - math.sqrt(5))


def eig_jet(eigs):
    k = np.asarray(eigs, dtype=float)
    n = len(k)
    nu = np.zeros((1, n + 1))
    nu[0, -1] = 1.0
    return assemble_jets(np.zeros((1, n + 1)), nu, np.eye(n, n + 1)[None], np.diag(k)[None],
                         principal=np.sort(k)[None])


def brute_force_rhs(k):
    return -sum(k[i] * k[j] * (k[i] - k[j]) ** 2
                for i in range(len(k)) for j in range(i + 1, len(k)))


def test_eigen_identity_examples():
    assert_allclose(eigen_identity([-1.0, -2.0]), (-2.0, -2.0))
    assert_allclose(eigen_identity([0.7] * 4), (0.0, 0.0), atol=1e-14)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=6))
def test_eigen_identity_property(eigs):
    lhs, rhs = eigen_identity(eigs)
    assert rhs == pytest.approx(brute_force_rhs(eigs), abs=1e-9 * (1 + abs(rhs)))
    assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs)) + 1e-12 * max(1.0, max(map(abs, eigs))) ** 4


def test_gap_lambda():
    assert check_gap_lambda(S2).worst_value == pytest.approx(0.0, abs=1e-12)
    assert check_gap_lambda(make_sphere(2, 1.0)).worst_value == pytest.approx(0.5)
    root = revolve(integrate_profile(-SMALL.r, ExpanderSpec(2, 3.0)))
    assert root.closed
    assert check_gap_lambda(root).worst_value == pytest.approx(1.0)
    for open_surface in (CYL, make_hyperplane(2, 1.0)):
        with pytest.raises(NotClosed):
            check_gap_lambda(open_surface)


def test_pinching():
    rep = check_pinching(S2)
    assert rep.holds_everywhere and abs(rep.worst_value) <= 1e-10
    assert rep.details["bound"] == pytest.approx(0.5)
    assert check_pinching(BIG).worst_value == pytest.approx(0.0, abs=1e-10)
    small = check_pinching(SMALL)
    assert small.worst_value < -1e-3 and not small.holds_everywhere
    assert small.details["predicted_radius"] == pytest.approx(BIG.r)
    with pytest.raises(LambdaBelowGap):
        check_pinching(CYL)


def test_mean_convex():
    for surface in (BIG, SMALL, CYL):
        rep = check_mean_convex_condition(surface)
        assert rep.holds_everywhere and abs(rep.worst_value) <= 1e-10
    rep = check_mean_convex_condition(eig_jet([-1.0, 0.5]), ExpanderSpec(2, 0.0))
    assert rep.details["min_H"] == pytest.approx(0.5)
    assert rep.worst_value == pytest.approx(-1.125)


def test_sphere_condition():
    for r in (0.5, 1.0, 2.0, 4.0):
        assert check_sphere_condition(make_sphere(2, r)).worst_value == \
            pytest.approx(0.0, abs=1e-10)
    assert check_sphere_condition(CYL).worst_value == pytest.approx(-2.0)
    assert check_sphere_condition(make_hyperplane(2, 2.0)).worst_value == pytest.approx(-4.0)
    assert check_sphere_condition(make_sphere(3, 1.0)).worst_value == pytest.approx(0.0, abs=1e-10)


def test_huisken_type_condition():
    rep = check_huiss_condition(make_hyperplane(2, 0.0))
    assert rep.worst_value == pytest.approx(0.0, abs=1e-12)
    rep = check_huiss_condition(CYL)
    assert rep.worst_value == pytest.approx(0.0, abs=1e-10) and rep.holds_everywhere
    r, lam = BIG.r, 3.0
    H, A2, tr3 = 2 / r, 2 / r ** 2, -2 / r ** 3
    rep = check_huiss_condition(BIG)
    assert rep.worst_value == pytest.approx(min(lam * ((H - lam) * tr3 - A2 / 2), lam - H),
                                            abs=1e-12)
    # truncated integral diagnostic grows with the radius
    vals = rep.details["truncated_integral"]
    assert len(vals) == 3 and vals[0] <= vals[1] <= vals[2]


def test_tu_condition():
    assert check_tu_condition(make_hyperplane(2, 1.0)).worst_value == pytest.approx(0, abs=1e-12)
    assert check_tu_condition(BIG).worst_value == pytest.approx(0.0, abs=1e-10)
    rep = check_tu_condition(CYL, alpha=1.0)
    # worst point sits at the far end of the flat factor, t = L
    t = CYL.L
    assert rep.worst_value == pytest.approx(-t * t / 4)
    with pytest.raises(ValueError):
        check_tu_condition(CYL, alpha=0.0)


def test_smoczyk_type_conditions():
    rep = check_smoczyk_conditions(CYL)
    assert rep.worst_value == pytest.approx(0.0, abs=1e-10)
    assert rep.details["nonempty"] and rep.details["ratio_local_max"]
    rep = check_smoczyk_conditions(make_hyperplane(2, 1.0))
    assert rep.holds_everywhere and rep.details["nonempty"]
    assert check_smoczyk_conditions(S2).worst_value == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(LambdaZero):
        check_smoczyk_conditions(make_hyperplane(2, 0.0))


def test_cmc_identity():
    for surface in (CYL, S2, make_hyperplane(2, 1.0)):
        rep = check_cmc_identity(surface)
        assert rep.holds_everywhere and rep.details["residual"] <= 1e-12
    non_cmc = revolve(integrate_profile(-1.5, ExpanderSpec(2, 3.0)).truncated(2.2))
    with pytest.raises(NotCMC):
        check_cmc_identity(non_cmc)


def test_weighted_norm_condition():
    assert check_weighted_norm_condition(make_hyperplane(2, 1.0)).worst_value == 0.0
    assert check_weighted_norm_condition(BIG).worst_value == pytest.approx(0.0, abs=1e-10)
    assert check_weighted_norm_condition(CYL).worst_value == pytest.approx(-2.0)


def test_cylinder_conditions():
    for surface in (CYL, make_hyperplane(2, 1.0), S2):
        rep = check_cylinder_conditions(surface)
        assert rep.worst_value == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(AlphaTooSmall):
        check_cylinder_conditions(CYL, alpha=0.1, bound=LinearBound(0.3, 0.0, 0.5625))
    with pytest.raises(CurvatureGrowthTooLarge):
        check_cylinder_conditions(CYL, bound=LinearBound(0.6, 0.0, math.inf, flagged=True))


COVARIANT = [check_sphere_condition, check_weighted_norm_condition, check_tu_condition,
             check_smoczyk_conditions, check_cmc_identity]


@pytest.mark.parametrize("check", COVARIANT)
@pytest.mark.parametrize("surface", [BIG, SMALL, CYL, make_hyperplane(2, 1.0)])
def test_orientation_covariance(check, surface):
    a = check(surface).to_dict()
    b = check(surface.flipped()).to_dict()
    assert a["holds"] == b["holds"]
    assert a["worst_value"] == pytest.approx(b["worst_value"], abs=1e-12)
    assert b["lambda"] == pytest.approx(-a["lambda"])


def test_report_schema():
    d = check_pinching(S2).to_dict()
    assert {"condition", "holds", "worst_value", "worst_point", "n_points", "lambda"} <= set(d)
    assert isinstance(d["holds"], bool) and d["n_points"] == 41 * 41
    assert len(d["worst_point"]) == 2
