import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greenlime.design import (
    ApproximateDesign,
    build_1d_design,
    build_corner_design,
    d_criterion_1d,
    d_criterion_m,
    design_distance,
    efficient_round,
    information_matrices,
    log_elasticity,
    mse_criterion,
    ode_design,
    optimal_distance,
    shoulder_distance,
)
from greenlime.errors import DomainError, NoInteriorMinimum, SingularInformation, TooFewUnits, ValidationError
from greenlime.locality import LocalityConfig
from oracles import corner_criterion_mp, corner_criterion_np, efficient_apportionments, grid_interior_min, information_sum

# per-coordinate minimizers of the corner criterion at kappa = 1, computed with
# grid_interior_min (step 1e-4, zoomed to 1e-11); 1/501 also checked in 50 digits
U_STAR = {
    (1, 1 / 501): 2.2304683031,
    (1, 1 / 12): 1.7043111704,
    (1, 1 / 11): 1.7013149717,
    (2, 1 / 501): 1.693569970283,
    (3, 1 / 51): 1.319982551964,
}


def test_single_center_point():
    d = ApproximateDesign([[0.0, 0.0]], [1.0])
    m11, mt = information_matrices(d, LocalityConfig(0.7))
    e = np.zeros((3, 3))
    e[0, 0] = 1.0
    np.testing.assert_array_equal(m11, e)
    np.testing.assert_array_equal(mt, e)


def test_symmetric_design_is_diagonal():
    m11, mt = information_matrices(build_1d_design(0.8, 0.1), LocalityConfig(0.5))
    assert abs(m11[0, 1]) < 1e-15 and abs(mt[0, 1]) < 1e-15
    assert m11[0, 0] == pytest.approx(0.1 + 0.9 * np.exp(-0.5 * (0.8 / 0.5) ** 2))


def test_information_matches_term_sums():
    rng = np.random.default_rng(4)
    for _ in range(20):
        k = rng.integers(2, 6)
        support = rng.normal(size=(k, 1))
        p = rng.dirichlet(np.ones(k))
        kappa = rng.uniform(0.2, 2.0)
        d = ApproximateDesign(support, p / p.sum())
        m11, mt = information_matrices(d, LocalityConfig(kappa))
        o11, ot = information_sum(d.support, d.weights, kappa)
        np.testing.assert_allclose(m11, o11, rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(mt, ot, rtol=1e-12, atol=1e-15)


def test_d_criterion_value():
    assert d_criterion_1d(1.0, 1.0, 0.1) == pytest.approx(1.1482237090814257, rel=1e-14)
    assert d_criterion_1d(1.0, 1.0, 0.1) == pytest.approx(1.1481, abs=2e-4)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 20), st.floats(0.05, 5), st.floats(0.001, 0.9))
def test_criterion_width_scaling(u, kappa, delta):
    lhs = d_criterion_1d(u, kappa, delta)
    rhs = d_criterion_1d(u / kappa, 1.0, delta) / kappa**2
    assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_corner_criterion_matches_high_precision(m):
    rng = np.random.default_rng(m)
    for _ in range(30):
        u, kappa, delta = rng.uniform(0.05, 5), rng.uniform(0.05, 5), rng.uniform(0.001, 0.9)
        assert d_criterion_m(u, kappa, delta, m) == pytest.approx(float(corner_criterion_mp(u, kappa, delta, m)), rel=1e-12)


def test_criterion_domain():
    with pytest.raises(DomainError):
        d_criterion_1d(0.0, 1.0, 0.1)
    with pytest.raises(DomainError):
        d_criterion_1d(1.0, 1.0, 1.0)
    assert d_criterion_1d(1e-6, 1.0, 0.1) > 1e9
    vals = [d_criterion_m(u, 1.0, 0.05, 3) for u in (1e-2, 1e-3, 1e-4)]
    assert vals[0] < vals[1] < vals[2]


def test_m1_specializes():
    for u in (0.3, 1.0, 2.5):
        assert d_criterion_m(u, 0.7, 0.2, 1) == d_criterion_1d(u, 0.7, 0.2)


def test_mse_matches_closed_form_1d():
    cfg = LocalityConfig(0.6)
    for u in (0.2, 0.6, 1.5):
        rep = mse_criterion(build_1d_design(u, 1 / 11), cfg)
        assert math.exp(rep.psi_d) == pytest.approx(d_criterion_1d(u, 0.6, 1 / 11), rel=1e-8)
        np.testing.assert_allclose(rep.R, np.linalg.inv(rep.M11) @ rep.M_tilde @ np.linalg.inv(rep.M11))


def test_m2_corner_design_matches_closed_form():
    cfg = LocalityConfig(0.4)
    d = build_corner_design(2, 0.5, 0.05)
    assert d.size == 5
    assert math.exp(mse_criterion(d, cfg).psi_d) == pytest.approx(d_criterion_m(0.5, 0.4, 0.05, 2), rel=1e-8)


def test_singular_information():
    # all support on the line u1 = u2: no affine span in 2-D
    d = ApproximateDesign([[0.0, 0.0], [0.5, 0.5], [-0.5, -0.5]], [0.2, 0.4, 0.4])
    with pytest.raises(SingularInformation):
        mse_criterion(d, LocalityConfig(1.0))


@pytest.mark.parametrize("key", sorted(U_STAR))
def test_optimal_distance_frozen(key):
    m, delta = key
    assert optimal_distance(delta, m) == pytest.approx(U_STAR[key], abs=1e-7)


def test_optimal_distance_matches_fresh_grid_search():
    for delta in (1 / 501, 1 / 101, 1 / 21, 1 / 8):
        oracle = grid_interior_min(lambda x: np.log(corner_criterion_np(x, 1.0, delta)), 1e-4, 10.0)
        assert optimal_distance(delta) == pytest.approx(oracle, abs=1e-7)


def test_one_dimensional_weight_at_optimum():
    # the three-point design lands near weight 1/12, not 1/18
    u = optimal_distance(1 / 501)
    assert math.exp(-u * u / 2) == pytest.approx(0.0831, abs=1e-4)


def test_boundary_behaviour():
    u = optimal_distance(1 / 501)
    assert d_criterion_1d(1e-3, 1.0, 1 / 501) > d_criterion_1d(u, 1.0, 1 / 501)
    assert d_criterion_1d(50.0, 1.0, 1 / 501) < d_criterion_1d(u, 1.0, 1 / 501)


@pytest.mark.parametrize("m, delta", [(1, 1 / 3), (1, 0.5), (2, 0.2), (3, 1 / 9)])
def test_no_interior_minimum(m, delta):
    with pytest.raises(NoInteriorMinimum):
        optimal_distance(delta, m)


def test_log_elasticity_matches_finite_differences():
    for m, delta, u in [(1, 0.1, 1.3), (2, 0.3, 0.9), (3, 0.02, 1.7)]:
        h = 1e-6
        fd = (math.log(d_criterion_m(u * math.exp(h), 1.0, delta, m)) - math.log(d_criterion_m(u * math.exp(-h), 1.0, delta, m))) / (2 * h)
        assert float(log_elasticity(u, delta, m)) == pytest.approx(fd, rel=1e-7, abs=1e-8)


def test_shoulder_continues_the_minimum_at_the_fold():
    # m = 1 loses its interior minimum near delta = 0.2354
    below, above = 0.2354, 0.2355
    u_min = optimal_distance(below)
    assert design_distance(above) == (shoulder_distance(above), False)
    assert shoulder_distance(above) == pytest.approx(u_min, abs=0.02)
    assert design_distance(1 / 11) == (optimal_distance(1 / 11), True)


@given(st.floats(0.001, 0.2), st.floats(0.05, 5.0))
@settings(max_examples=25, deadline=None)
def test_width_rescaling_of_optimum(delta, kappa):
    direct = grid_interior_min(lambda x: np.log(corner_criterion_np(x, kappa, delta)), 1e-4 * kappa, 10 * kappa, step=1e-4 * kappa)
    assert kappa * optimal_distance(delta) == pytest.approx(direct, abs=1e-6)


def test_1d_design():
    d = build_1d_design(1.2, 0.1)
    assert d.weights.sum() == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_array_equal(d.support[:, 0], [-1.2, 0.0, 1.2])
    np.testing.assert_array_equal(d.weights, [0.45, 0.1, 0.45])
    n = 11
    assert build_1d_design(1.0, 1 / n).weights[d.center_index()] == 1 / n


def test_corner_designs():
    assert build_corner_design(1, 1.2, 0.1).to_dict() == build_1d_design(1.2, 0.1).to_dict()
    d = build_corner_design(3, 0.7, 0.01)
    assert d.size == 9
    assert d.weights.sum() == pytest.approx(1.0, abs=1e-15)
    corners = np.delete(d.support, d.center_index(), axis=0)
    np.testing.assert_allclose(np.linalg.norm(corners, axis=1), math.sqrt(3) * 0.7)


def test_design_validation():
    with pytest.raises(ValidationError):
        ApproximateDesign([[0.0], [1.0]], [0.5, 0.6])
    with pytest.raises(ValidationError):
        ApproximateDesign([[1.0], [1.0]], [0.5, 0.5])


def test_ode_design():
    d = ode_design(1, 0.25, 501)
    assert d.delta == 1 / 501
    assert d.u_star == pytest.approx(0.25 * U_STAR[(1, 1 / 501)], abs=1e-7)
    assert ode_design(2, 1.0, 12).interior
    assert not ode_design(2, 1.0, 11).interior
    with pytest.raises(TooFewUnits):
        ode_design(2, 1.0, 4)


def test_efficient_round_examples():
    assert efficient_round([0.25] * 4, 500) == [125] * 4
    assert efficient_round([0.5, 0.3, 0.2], 5) == [2, 2, 1]
    with pytest.raises(TooFewUnits):
        efficient_round([0.5, 0.5], 1)
    with pytest.raises(ValidationError):
        efficient_round([1.0, 0.0], 4)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 40), min_size=1, max_size=6), st.integers(0, 80), st.randoms(use_true_random=False))
def test_efficient_round_contract(raw, extra, rnd):
    p = np.array(raw, dtype=float) / sum(raw)
    n = len(raw) + extra
    alloc = efficient_round(p, n)
    assert sum(alloc) == n and min(alloc) >= 1
    # permutation equivariance holds whenever the apportionment is unique
    perm = list(range(len(raw)))
    rnd.shuffle(perm)
    if len(raw) <= 4 and n <= 20 and len(efficient_apportionments(p, n)) == 1:
        permuted = efficient_round(p[perm], n)
        assert permuted == [alloc[i] for i in perm]


@given(st.lists(st.integers(1, 10), min_size=1, max_size=5), st.integers(1, 6))
def test_efficient_round_exact_on_multiples(raw, scale):
    n = sum(raw) * scale
    p = np.array(raw, dtype=float) / sum(raw)
    assert efficient_round(p, n) == [r * scale for r in raw]
