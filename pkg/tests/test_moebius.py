import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jordanbohr.jts_core import DomainError, RealLinearOp, make_domain
from jordanbohr.moebius import (
    apply_automorphism,
    automorphism_derivative,
    derivative_norms,
    finite_difference_derivative,
    make_automorphism,
    quasi_inverse,
    random_linear_automorphism,
)
from jordanbohr.spectral import bergman_power, spectral_norm

from conftest import DOMAINS, rand_point


def test_quasi_inverse_examples():
    disc = make_domain("disc")
    assert quasi_inverse(disc, [0.5], [0.4])[0] == pytest.approx(0.625, rel=1e-14)
    s = make_domain("typeI", 2, 2)
    rng = np.random.default_rng(0)
    z, u = rand_point(s, rng, 0.3), rand_point(s, rng, 0.3)
    np.testing.assert_allclose(quasi_inverse(s, z, np.zeros(4)), z)
    np.testing.assert_allclose(quasi_inverse(s, quasi_inverse(s, z, u), -u), z, atol=1e-13)


def test_quasi_inverse_singular_pair():
    disc = make_domain("disc")
    with pytest.raises(DomainError, match="singular"):
        quasi_inverse(disc, [1.0], [1.0])


def test_disc_moebius_matches_closed_form():
    disc = make_domain("disc")
    a = 0.35
    phi = make_automorphism(disc, [a])
    z = 0.8 * np.exp(2j * np.pi * np.linspace(0, 1, 9))[:, None] * np.linspace(0.1, 1, 9)[:, None]
    np.testing.assert_allclose(phi(z)[:, 0], (z[:, 0] - a) / (1 - a * z[:, 0]), atol=1e-14)
    d0 = automorphism_derivative(phi, [0.0])
    assert d0.linear[0, 0] == pytest.approx(1 - a * a, rel=1e-13)


def test_zero_base_point_is_identity(spec):
    rng = np.random.default_rng(1)
    phi = make_automorphism(spec, np.zeros(spec.dim))
    z = rand_point(spec, rng, 0.9)
    np.testing.assert_allclose(phi(z), z, atol=1e-15)
    assert (automorphism_derivative(phi, z) - RealLinearOp.identity(spec)).max_abs() < 1e-14


def test_automorphism_rejects_outside_points():
    s = make_domain("ball", 2)
    phi = make_automorphism(s, [0.3, 0.1j])
    with pytest.raises(DomainError):
        apply_automorphism(phi, [1.0, 0.0])
    with pytest.raises(DomainError):
        make_automorphism(s, [1.0, 0.0])
    with pytest.raises(ValueError):
        make_automorphism(s, [0.1, 0], direction="sideways")


def test_round_trip_and_domain_preservation(spec):
    rng = np.random.default_rng(2)
    for _ in range(4):
        u = rand_point(spec, rng, 0.95 * rng.random())
        phi = make_automorphism(spec, u)
        psi = make_automorphism(spec, u, "from_origin")
        assert np.abs(phi(u)).max() <= 1e-10
        zs = np.array([rand_point(spec, rng, 0.999 * rng.random()) for _ in range(10)])
        img = phi(zs)
        assert np.all(spectral_norm(spec, img) < 1)
        np.testing.assert_allclose(psi(img), zs, atol=1e-9)


def test_twisted_pair_is_inverse(spec):
    rng = np.random.default_rng(3)
    u = rand_point(spec, rng, 0.7)
    k = random_linear_automorphism(spec, rng)
    phi = make_automorphism(spec, u, linear_twist=k)
    z = rand_point(spec, rng, 0.8)
    np.testing.assert_allclose(phi.inverse()(phi(z)), z, atol=1e-10)
    assert np.abs(phi(u)).max() <= 1e-10


def test_non_isometric_twist_rejected():
    s = make_domain("typeI", 2, 2)
    k = RealLinearOp.complex_linear(s, 2 * np.eye(4))
    with pytest.raises(ValueError, match="spectral norm"):
        make_automorphism(s, np.zeros(4), linear_twist=k)


def test_derivative_at_base_point(spec):
    rng = np.random.default_rng(4)
    u = rand_point(spec, rng, 0.8)
    phi = make_automorphism(spec, u)
    b = bergman_power(spec, u, -0.5)
    assert (automorphism_derivative(phi, u) - b).max_abs() <= 1e-12 * b.max_abs()


@pytest.mark.parametrize("args", DOMAINS, ids=["-".join(map(str, d)) for d in DOMAINS])
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_derivative_matches_finite_differences(args, seed):
    s = make_domain(*args)
    rng = np.random.default_rng(seed)
    u = rand_point(s, rng, 0.9 * rng.random())
    z = rand_point(s, rng, 0.9 * rng.random())
    for direction in ("to_origin", "from_origin"):
        auto = make_automorphism(s, u, direction)
        exact = automorphism_derivative(auto, z)
        fd = finite_difference_derivative(s, auto, z)
        assert (exact - fd).max_abs() <= 1e-6 * exact.max_abs()


def test_derivative_norm_examples():
    disc = make_domain("disc")
    dn = derivative_norms(disc, [0.6])
    assert (dn.dphi_norm, dn.dphi_u_image_norm, dn.inverse_norm) == pytest.approx((1.5625, 0.9375, 0.64), rel=1e-14)
    s = make_domain("typeI", 2, 3)
    dn0 = derivative_norms(s, np.zeros(s.dim))
    assert (dn0.dphi_norm, dn0.dphi_u_image_norm, dn0.inverse_norm) == pytest.approx((1, 0, 1))
    m = np.zeros((2, 3))
    m[0, 0], m[1, 1] = 0.9, 0.2
    assert derivative_norms(s, s.from_matrix(m)).inverse_norm == pytest.approx(np.sqrt(0.96), rel=1e-12)


def test_derivative_norms_direct(spec):
    rng = np.random.default_rng(5)
    for _ in range(4):
        u = rand_point(spec, rng, 0.98 * rng.random())
        dn = derivative_norms(spec, u)
        assert dn.max_deviation() <= 1e-9
        n = spectral_norm(spec, u)
        assert dn.dphi_u_image_direct * (1 - n * n) == pytest.approx(n, abs=1e-9)
