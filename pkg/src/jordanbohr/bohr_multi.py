"""Normalized Bohr sums of holomorphic self-maps of a bounded symmetric domain.

Homogeneous parts ``f_k(z)`` are read off an ``N``-point ring
``f(exp(2 pi i j / N) z)`` with one FFT; the sum
``sum_k ||dphi(u) f_k(z)||_Omega / ||dphi(u)||_Omega`` (``u = f(0)``) is
bracketed with the geometric tail ``(1 - |u|^2) |z|^(K+1) / (1 - |z|)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .jts_core import (
    DomainError,
    DomainSpec,
    as_element,
    inner_fast,
    q_operator,
    triple_product,
)
from .spectral import bergman_power, peirce_data, spectral_decompose, spectral_norm

DEFAULT_K_MAX = 64


class HolomorphicMap:
    """Base class: a callable self-map of the domain, batched over leading axes."""

    spec: DomainSpec

    def __call__(self, z):
        raise NotImplementedError

    @property
    def base_point(self) -> np.ndarray:
        return self(np.zeros(self.spec.dim, dtype=complex))


@dataclass(frozen=True, eq=False)
class IdentityMap(HolomorphicMap):
    spec: DomainSpec

    def __call__(self, z):
        return as_element(self.spec, z).copy()


@dataclass(frozen=True, eq=False)
class ConstantMap(HolomorphicMap):
    spec: DomainSpec
    value: np.ndarray

    def __call__(self, z):
        z = as_element(self.spec, z)
        return np.broadcast_to(self.value, z.shape).copy()


@dataclass(frozen=True, eq=False)
class PolynomialMap(HolomorphicMap):
    """``f = sum_k components[k]`` with ``components[k]`` homogeneous of degree ``k``."""

    spec: DomainSpec
    components: tuple

    @property
    def degree(self) -> int:
        return len(self.components) - 1

    def component(self, k, z):
        z = as_element(self.spec, z)
        if k >= len(self.components):
            return np.zeros_like(z)
        return self.components[k](z)

    def __call__(self, z):
        z = as_element(self.spec, z)
        out = np.zeros(z.shape, dtype=complex)
        for part in self.components:
            out = out + part(z)
        return out


@dataclass(frozen=True, eq=False)
class Composition(HolomorphicMap):
    """``maps[0] o maps[1] o ... o maps[-1]``."""

    spec: DomainSpec
    maps: tuple

    def __call__(self, z):
        out = as_element(self.spec, z)
        for m in reversed(self.maps):
            out = m(out)
        return out


@dataclass(frozen=True, eq=False)
class ExtremalDiagonal(HolomorphicMap):
    """``z -> sum_i (lam_i - <z,e_i>) / (1 - lam_i <z,e_i>) e_i`` over a frame,
    with the pairing ``<z,e> = (z|e)/(e|e)``."""

    spec: DomainSpec
    values: tuple
    frame: tuple

    def pairings(self, z):
        z = as_element(self.spec, z)
        frame = np.array(self.frame)
        num = inner_fast(self.spec, z[..., None, :], frame)
        den = inner_fast(self.spec, frame, frame).real
        ell = num / den
        nz = np.asarray(spectral_norm(self.spec, z))
        mod = np.abs(ell)
        if np.any(mod >= 1.0) or np.any(mod > nz[..., None] + 1e-12 * (1 + nz[..., None])):
            raise DomainError(
                "frame pairing |(z|e_i)|/(e_i|e_i) is not below min(1, ||z||_Omega); "
                "the normalization of (z|e_i) is an unresolved choice, see extremal_map"
            )
        return ell

    def __call__(self, z):
        ell = self.pairings(z)
        lam = np.asarray(self.values)
        coef = (lam - ell) / (1.0 - lam * ell)
        return coef @ np.array(self.frame)

    def closed_form_component(self, k, z):
        """``sum_i (lam_i^(k+1) - lam_i^(k-1)) <z,e_i>^k e_i`` (``k >= 1``)."""
        if k == 0:
            return np.broadcast_to(self.base_point, np.shape(z)).copy()
        ell = self.pairings(z)
        lam = np.asarray(self.values)
        coef = (lam ** (k + 1) - lam ** (k - 1)) * ell ** k
        return coef @ np.array(self.frame)


def extremal_map(spec: DomainSpec, u) -> ExtremalDiagonal:
    """Extremal self-map ``f`` with ``f(0) = u`` built on ``u``'s frame.

    The frame (primitive tripotents, completed where ``u`` is not regular) is
    used rather than the merged tripotents, so the pairing guard holds for
    degenerate ``u`` as well.
    """
    sd = spectral_decompose(spec, u)
    if sd.norm >= 1.0:
        raise DomainError(f"||u||_Omega = {sd.norm:.17g} >= 1")
    return ExtremalDiagonal(spec, tuple(sd.frame_values), tuple(sd.frame))


def ring_points(z, quad_points: int) -> np.ndarray:
    w = np.exp(2j * np.pi * np.arange(quad_points) / quad_points)
    return w[:, None] * np.asarray(z)[None, :]


def homogeneous_components(f: Callable, z, k_max: int, quad_points: int | None = None) -> np.ndarray:
    """``f_0(z), ..., f_{k_max}(z)`` from one uniform ring of ``quad_points`` evaluations.

    Exact for polynomial maps of degree below ``quad_points - k``.
    """
    n = 4 * (k_max + 1) if quad_points is None else int(quad_points)
    if n < 4 * (k_max + 1):
        raise ValueError(f"quad_points={n} is below 4*(k_max+1)={4 * (k_max + 1)}")
    z = np.asarray(z, dtype=complex)
    ring = f(ring_points(z, n))
    return np.fft.fft(ring, axis=0)[: k_max + 1] / n


def homogeneous_component(f: Callable, k: int, z, quad_points: int | None = None) -> np.ndarray:
    return homogeneous_components(f, z, k, quad_points)[k]


class Verdict(str, enum.Enum):
    BELOW_ONE = "below_one"
    ABOVE_ONE = "above_one"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class BohrReport:
    terms: tuple
    partial_sum: float
    tail_bound: float
    k_max: int
    quad_points: int
    u_norm: float
    z_norm: float
    threshold_lower: float
    threshold_upper: float
    verdict: Verdict
    # ||dphi(u) f_k(z)||_Omega before normalization, for the coefficient bound
    scaled_norms: tuple = field(repr=False, default=())

    @property
    def upper_sum(self) -> float:
        return self.partial_sum + self.tail_bound

    def to_dict(self) -> dict:
        return {
            "terms": list(self.terms),
            "partial_sum": self.partial_sum,
            "tail_bound": self.tail_bound,
            "k_max": self.k_max,
            "quad_points": self.quad_points,
            "u_norm": self.u_norm,
            "z_norm": self.z_norm,
            "threshold_lower": self.threshold_lower,
            "threshold_upper": self.threshold_upper,
            "verdict": self.verdict.value,
        }


def _verdict(partial, upper):
    if upper < 1.0:
        return Verdict.BELOW_ONE
    if partial > 1.0:
        return Verdict.ABOVE_ONE
    return Verdict.INCONCLUSIVE


def bohr_sum(spec: DomainSpec, f: Callable, z, k_max: int = DEFAULT_K_MAX,
             quad_points: int | None = None) -> BohrReport:
    z = as_element(spec, z)
    nz = float(spectral_norm(spec, z))
    if nz >= 1.0:
        raise DomainError(f"||z||_Omega = {nz:.17g} >= 1")
    n = 4 * (k_max + 1) if quad_points is None else int(quad_points)
    u = as_element(spec, f(np.zeros(spec.dim, dtype=complex)))
    data = peirce_data(spec, u)
    nu = data[0].norm
    if nu >= 1.0:
        raise DomainError(f"f(0) has ||u||_Omega = {nu:.17g} >= 1")
    comps = homogeneous_components(f, z, k_max, n)
    comps[0] = u
    dphi = bergman_power(spec, u, -0.5, data)
    scaled = np.asarray(spectral_norm(spec, dphi(comps)), dtype=float)
    # ||dphi(u)||_Omega = 1 / (1 - |u|^2)
    weight = 1.0 - nu * nu
    terms = weight * scaled
    partial = float(np.sum(terms))
    tail = weight * nz ** (k_max + 1) / (1.0 - nz)
    return BohrReport(
        terms=tuple(float(t) for t in terms),
        partial_sum=partial,
        tail_bound=float(tail),
        k_max=k_max,
        quad_points=n,
        u_norm=nu,
        z_norm=nz,
        threshold_lower=1.0 / (2.0 + nu),
        threshold_upper=1.0 / (1.0 + 2.0 * nu),
        verdict=_verdict(partial, partial + tail),
        scaled_norms=tuple(float(s) for s in scaled),
    )


@dataclass(frozen=True)
class ThresholdBounds:
    p1_radius: float
    p2_radius: float

    def __iter__(self):
        return iter((self.p1_radius, self.p2_radius))


def threshold_bounds(spec: DomainSpec, u) -> ThresholdBounds:
    """Radii ``1/(2+|u|)`` (sum always below one) and ``1/(1+2|u|)`` (the extremal
    map's sum crosses one)."""
    nu = float(spectral_norm(spec, as_element(spec, u)))
    return ThresholdBounds(1.0 / (2.0 + nu), 1.0 / (1.0 + 2.0 * nu))


def extremal_closed_form_sum(u_norm: float, a: float) -> float:
    return u_norm + (1.0 - u_norm ** 2) * a / (1.0 - a * u_norm)


@dataclass(frozen=True)
class TheoremCheck:
    sums: tuple
    bounds: tuple
    worst_margin: float
    passed: bool


def theorem_bound_check(spec: DomainSpec, f: Callable, samples, k_max: int = DEFAULT_K_MAX,
                        quad_points: int | None = None, tol: float = 1e-9) -> TheoremCheck:
    """Check ``sum <= 1 - (1 - |f(0)|)^2 / 2`` at every sample point (norm 1/3)."""
    sums, bounds = [], []
    for z in np.atleast_2d(samples):
        rep = bohr_sum(spec, f, z, k_max, quad_points)
        sums.append(rep.upper_sum)
        bounds.append(1.0 - (1.0 - rep.u_norm) ** 2 / 2.0)
    margins = np.array(bounds) - np.array(sums)
    worst = float(margins.min())
    return TheoremCheck(tuple(sums), tuple(bounds), worst, worst >= -tol)


def p2_crossing(spec: DomainSpec, u, resolution: float = 1e-4, k_max: int = DEFAULT_K_MAX,
                lo: float = 0.2, hi: float = 0.95):
    """Bisect on ``a`` for the sign change of ``sum - 1`` along ``a * e_1`` for the
    extremal map of ``u``; returns ``(a_below, a_above)`` with width ``<= resolution``."""
    f = extremal_map(spec, u)
    e1 = f.frame[0]

    def above(a):
        rep = bohr_sum(spec, f, a * e1, k_max)
        if rep.verdict is Verdict.INCONCLUSIVE:
            raise ArithmeticError(f"inconclusive Bohr sum at a={a!r}")
        return rep.verdict is Verdict.ABOVE_ONE

    if above(lo) or not above(hi):
        raise ValueError(f"no crossing inside [{lo}, {hi}]")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if above(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


# -- polynomial self-maps used as test maps ----------------------------------

def _random_ball_point(spec, rng, radius):
    x = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    return x * radius / spectral_norm(spec, x)


def polynomial_self_map(spec: DomainSpec, rng, degree: int = 5, total: float = 0.95) -> PolynomialMap:
    """A random polynomial map with ``||f(z)|| <= total * max(1, ...) < 1`` on the domain.

    Degree-k parts are products of norm-nonincreasing pieces: a constant, a
    linear isometry, ``Q(z)y``, ``Q(z)Q(y)z`` and ``<z,e>^k e`` for a primitive
    tripotent ``e``; their weights have moduli summing to ``total``.
    """
    from .moebius import random_linear_automorphism

    weights = rng.dirichlet(np.ones(degree + 1)) * total
    weights = weights * np.exp(2j * np.pi * rng.random(degree + 1))
    w0 = _random_ball_point(spec, rng, 1.0)
    k1 = random_linear_automorphism(spec, rng)
    y2 = _random_ball_point(spec, rng, 1.0)
    y3 = _random_ball_point(spec, rng, 1.0)
    e = spectral_decompose(spec, _random_ball_point(spec, rng, 1.0)).frame[0]
    e_norm = inner_fast(spec, e, e).real
    qy3 = q_operator(spec, y3)

    def const(z, c=weights[0]):
        return np.broadcast_to(c * w0, z.shape).copy()

    def linear(z, c=weights[1]):
        return c * k1(z)

    def quadratic(z, c=weights[2 % (degree + 1)]):
        return c * qy2_apply(z)

    def cubic(z, c=weights[3 % (degree + 1)]):
        return c * 0.5 * triple_product(spec, z, qy3(z), z)

    def qy2_apply(z):
        return 0.5 * triple_product(spec, z, y2, z)

    def power(k):
        def part(z, c=weights[k]):
            ell = inner_fast(spec, z, e) / e_norm
            return c * (ell ** k)[..., None] * e
        return part

    parts = [const, linear, quadratic, cubic] + [power(k) for k in range(4, degree + 1)]
    return PolynomialMap(spec, tuple(parts[: degree + 1]))


def composed_test_map(spec: DomainSpec, rng, radius: float = 0.6) -> Composition:
    """``psi_v o g o phi_w``: a non-polynomial self-map with ``f(0) != 0``."""
    from .moebius import make_automorphism

    v = _random_ball_point(spec, rng, radius * rng.random())
    w = _random_ball_point(spec, rng, radius * rng.random())
    g = polynomial_self_map(spec, rng, degree=3, total=0.9)
    return Composition(spec, (make_automorphism(spec, v, "from_origin"), g, make_automorphism(spec, w)))
