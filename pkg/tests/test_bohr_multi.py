import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jordanbohr.bohr_multi import (
    ConstantMap,
    IdentityMap,
    Verdict,
    bohr_sum,
    composed_test_map,
    extremal_closed_form_sum,
    extremal_map,
    homogeneous_component,
    homogeneous_components,
    p2_crossing,
    polynomial_self_map,
    theorem_bound_check,
    threshold_bounds,
)
from jordanbohr.jts_core import DomainError, make_domain
from jordanbohr.spectral import spectral_norm

from conftest import DOMAINS, DOMAIN_IDS, rand_point


def test_trivial_components(spec):
    rng = np.random.default_rng(0)
    z = rand_point(spec, rng, 0.5)
    u = rand_point(spec, rng, 0.7)
    comps = homogeneous_components(IdentityMap(spec), z, 6)
    np.testing.assert_allclose(comps[1], z, atol=1e-15)
    assert np.abs(np.delete(comps, 1, axis=0)).max() < 1e-15
    comps = homogeneous_components(ConstantMap(spec, u), z, 6)
    np.testing.assert_allclose(comps[0], u, atol=1e-15)
    assert np.abs(comps[1:]).max() < 1e-15


def test_quadrature_exact_for_polynomials(spec):
    rng = np.random.default_rng(1)
    f = polynomial_self_map(spec, rng, degree=6)
    z = rand_point(spec, rng, 0.8)
    comps = homogeneous_components(f, z, 10)
    for k in range(11):
        np.testing.assert_allclose(comps[k], f.component(k, z), atol=1e-12)
    np.testing.assert_allclose(homogeneous_component(f, 3, z), f.component(3, z), atol=1e-12)


def test_quadrature_too_coarse_rejected():
    s = make_domain("ball", 2)
    with pytest.raises(ValueError, match="quad_points"):
        homogeneous_components(IdentityMap(s), [0.1, 0], 8, quad_points=35)


def test_extremal_closed_form_components(spec):
    rng = np.random.default_rng(2)
    u = rand_point(spec, rng, 0.9)
    f = extremal_map(spec, u)
    z = rand_point(spec, rng, 0.7)
    comps = homogeneous_components(f, z, 24)
    for k in range(25):
        np.testing.assert_allclose(comps[k], f.closed_form_component(k, z), atol=1e-10)


def test_extremal_map_at_origin(spec):
    f = extremal_map(spec, np.zeros(spec.dim))
    rng = np.random.default_rng(3)
    z = rand_point(spec, rng, 0.5)
    assert np.abs(f.base_point).max() == 0
    frame = np.array(f.frame)
    expected = -(f.pairings(z) @ frame)
    np.testing.assert_allclose(f(z), expected, atol=1e-15)


def test_extremal_map_rejects_boundary():
    s = make_domain("typeI", 2, 2)
    with pytest.raises(DomainError):
        extremal_map(s, s.from_matrix(np.eye(2)))


def test_pairing_guard():
    s = make_domain("polydisc", 2)
    f = extremal_map(s, [0.5, 0.2])
    with pytest.raises(DomainError, match="pairing"):
        f.pairings([1.2, 0.0])


def test_constant_and_identity_sums(spec):
    rng = np.random.default_rng(4)
    u = rand_point(spec, rng, 0.75)
    z = rand_point(spec, rng, 0.6)
    rep = bohr_sum(spec, ConstantMap(spec, u), z)
    assert rep.partial_sum == pytest.approx(spectral_norm(spec, u), abs=1e-12)
    rep = bohr_sum(spec, IdentityMap(spec), z)
    assert rep.partial_sum == pytest.approx(0.6, abs=1e-12)
    assert rep.verdict is Verdict.BELOW_ONE


def test_extremal_golden_value(spec):
    rng = np.random.default_rng(5)
    u = rand_point(spec, rng, 0.9)
    f = extremal_map(spec, u)
    rep = bohr_sum(spec, f, 0.4 * f.frame[0])
    assert rep.partial_sum == pytest.approx(1.01875, abs=1e-9)
    assert rep.verdict is Verdict.ABOVE_ONE


def test_extremal_sum_degenerate_polydisc():
    s = make_domain("polydisc", 2)
    f = extremal_map(s, [0.9, 0.5])
    for a in (0.2, 0.4, 0.5):
        assert bohr_sum(s, f, [a, 0]).partial_sum == pytest.approx(extremal_closed_form_sum(0.9, a), abs=1e-9)


def test_bohr_sum_rejects_outside_points():
    s = make_domain("disc")
    with pytest.raises(DomainError):
        bohr_sum(s, IdentityMap(s), [1.0])
    with pytest.raises(DomainError):
        bohr_sum(s, ConstantMap(s, np.array([1.0 + 0j])), [0.1])


def test_threshold_examples():
    s = make_domain("typeIII", 2)
    assert tuple(threshold_bounds(s, np.zeros(s.dim))) == pytest.approx((0.5, 1.0))
    u = rand_point(s, np.random.default_rng(6), 0.9)
    assert tuple(threshold_bounds(s, u)) == pytest.approx((1 / 2.9, 1 / 2.8), rel=1e-12)
    u = rand_point(s, np.random.default_rng(6), 1 - 1e-12)
    assert tuple(threshold_bounds(s, u)) == pytest.approx((1 / 3, 1 / 3), rel=1e-10)


def test_theorem_check_examples():
    s = make_domain("ball", 2)
    third = np.array([[1 / 3, 0]])
    chk = theorem_bound_check(s, ConstantMap(s, np.array([0.5, 0j])), third)
    assert chk.bounds[0] == pytest.approx(0.875)
    assert chk.sums[0] == pytest.approx(0.5, abs=1e-12)
    assert chk.worst_margin == pytest.approx(0.375, abs=1e-12)
    chk = theorem_bound_check(s, IdentityMap(s), third)
    assert chk.bounds[0] == pytest.approx(0.5)
    assert chk.sums[0] == pytest.approx(1 / 3, abs=1e-12)
    disc = make_domain("disc")
    alpha = 0.9
    chk = theorem_bound_check(disc, extremal_map(disc, [alpha]), np.array([[1 / 3]]))
    r = 1 / 3
    assert chk.sums[0] == pytest.approx(2 * alpha - (alpha - r) / (1 - alpha * r), abs=1e-9)
    assert chk.passed


def test_crossing_brackets_threshold():
    for args in (("typeI", 2, 3), ("typeIV", 4)):
        s = make_domain(*args)
        u = rand_point(s, np.random.default_rng(7), 0.5)
        lo, hi = p2_crossing(s, u, resolution=1e-4)
        assert hi - lo <= 1e-4
        assert lo <= 0.5 <= hi


@pytest.mark.parametrize("args", DOMAINS, ids=DOMAIN_IDS)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_normalized_coefficient_bound(args, seed):
    s = make_domain(*args)
    rng = np.random.default_rng(seed)
    u = rand_point(s, rng, 0.99 * rng.random())
    z = rand_point(s, rng, 0.95 * rng.random())
    for f in (extremal_map(s, u), polynomial_self_map(s, rng), composed_test_map(s, rng)):
        rep = bohr_sum(s, f, z, k_max=32)
        for k in range(1, 33):
            assert rep.scaled_norms[k] <= rep.z_norm ** k + 1e-9


@pytest.mark.parametrize("args", DOMAINS, ids=DOMAIN_IDS)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_below_one_inside_guaranteed_radius(args, seed):
    s = make_domain(*args)
    rng = np.random.default_rng(seed)
    u = rand_point(s, rng, 0.99 * rng.random())
    f = extremal_map(s, u) if seed % 2 else composed_test_map(s, rng)
    p1, _ = threshold_bounds(s, f.base_point)
    z = rand_point(s, rng, p1 * (1 - 1e-9))
    assert bohr_sum(s, f, z).verdict is Verdict.BELOW_ONE
    rep = bohr_sum(s, f, rand_point(s, rng, 1 / 3 - 1e-6))
    assert rep.verdict is Verdict.BELOW_ONE
    assert rep.upper_sum <= 1 - (1 - rep.u_norm) ** 2 / 2 + 1e-6
