"""One-variable Bohr theory: coefficients of disc self-maps, the majorant
``M_f(r) = sum |a_k| r^k``, Wiener/Caratheodory bounds and grid searches for
the Bohr numbers of the classes ``F_0``, ``F_{0,alpha}``, ``F_m``, ``F_{m,alpha}``.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from . import kernels

WIENER_TOL = 1e-9


class SeriesSource(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class CoefficientSeries:
    """Taylor coefficients ``a_0..a_K`` of a self-map of the unit disc."""

    coeffs: np.ndarray
    source: SeriesSource = SeriesSource.CLOSED_FORM
    quad_points: int = 0

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def a0(self) -> complex:
        return complex(self.coeffs[0])

    def validate(self, tol: float = WIENER_TOL) -> None:
        mag = np.abs(self.coeffs)
        if mag[0] > 1.0 + tol:
            raise ValueError(f"|a_0| = {mag[0]:.17g} exceeds 1")
        bad = np.nonzero(mag[1:] > 1.0 - mag[0] ** 2 + tol)[0]
        if bad.size:
            k = int(bad[0]) + 1
            raise ValueError(f"|a_{k}| = {mag[k]:.17g} violates the Wiener bound {1 - mag[0] ** 2:.17g}")


def moebius_coeffs(alpha: float, k_max: int) -> CoefficientSeries:
    """Coefficients of ``(alpha - z) / (1 - alpha z)``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    k = np.arange(1, k_max + 1)
    a = np.empty(k_max + 1, dtype=complex)
    a[0] = alpha
    a[1:] = alpha ** (k + 1) - alpha ** (k - 1)
    return CoefficientSeries(a)


def moebius_map(alpha: complex) -> Callable:
    return lambda z: (alpha - z) / (1.0 - np.conj(alpha) * z)


def default_eval_radius(k_max: int) -> float:
    """``max(0.5, 1e-5 ** (1/K))``: caps the ``r^-k`` amplification of rounding at ``1e5``."""
    return max(0.5, 1e-5 ** (1.0 / max(k_max, 1)))


def coeffs_from_map(f: Callable, k_max: int, quad_points: int | None = None,
                    r_eval: float | None = None) -> CoefficientSeries:
    """Recover ``a_0..a_K`` from ``quad_points`` samples of ``f`` on ``|z| = r_eval``."""
    n = 4 * (k_max + 1) if quad_points is None else int(quad_points)
    if n < 4 * (k_max + 1):
        raise ValueError(f"quad_points={n} is below 4*(k_max+1)={4 * (k_max + 1)}")
    r = default_eval_radius(k_max) if r_eval is None else float(r_eval)
    if not 0.0 < r < 1.0:
        raise ValueError(f"r_eval must lie in (0, 1), got {r!r}")
    z = r * np.exp(2j * np.pi * np.arange(n) / n)
    try:
        vals = np.asarray(f(z), dtype=complex)
    except (ArithmeticError, ValueError) as exc:
        raise ValueError(f"evaluation of f on |z| = {r} failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"f is not finite on |z| = {r}")
    c = np.fft.fft(vals) / n
    return CoefficientSeries(c[: k_max + 1] / r ** np.arange(k_max + 1), SeriesSource.QUADRATURE, n)


@dataclass(frozen=True)
class MajorantBracket:
    partial: float
    upper: float

    def __iter__(self):
        return iter((self.partial, self.upper))


def majorant_sum(series: CoefficientSeries, r: float) -> MajorantBracket:
    """``sum_{k<=K} |a_k| r^k`` and that plus the Wiener tail ``(1-|a_0|^2) r^(K+1)/(1-r)``."""
    if not 0.0 <= r < 1.0:
        raise ValueError(f"r must lie in [0, 1), got {r!r}")
    mag = np.abs(series.coeffs)
    partial = float(np.polynomial.polynomial.polyval(r, mag))
    tail = (1.0 - mag[0] ** 2) * r ** (series.degree + 1) / (1.0 - r)
    return MajorantBracket(partial, float(partial + max(tail, 0.0)))


@dataclass(frozen=True)
class BoundsReport:
    wiener_slack: float
    wiener_k: int
    caratheodory_slack: float
    caratheodory_k: int
    tol: float = WIENER_TOL

    @property
    def passed(self) -> bool:
        return min(self.wiener_slack, self.caratheodory_slack) >= -self.tol


def coefficient_bounds_check(series: CoefficientSeries) -> BoundsReport:
    """Worst slack of ``|a_k| <= 1 - |a_0|^2`` and ``|a_k| <= 2 (1 - |a_0|)`` over ``k >= 1``."""
    mag = np.abs(series.coeffs)
    w = (1.0 - mag[0] ** 2) - mag[1:]
    c = 2.0 * (1.0 - mag[0]) - mag[1:]
    kw, kc = int(np.argmin(w)), int(np.argmin(c))
    return BoundsReport(float(w[kw]), kw + 1, float(c[kc]), kc + 1)


@dataclass(frozen=True)
class RicciReport:
    majorant: MajorantBracket
    bound: float
    a1: float

    @property
    def margin(self) -> float:
        return self.bound - self.majorant.upper

    @property
    def passed(self) -> bool:
        return self.majorant.upper <= self.bound + WIENER_TOL


RICCI_RADIUS = 0.6


def ricci_check(f: Callable | CoefficientSeries, k_max: int = 64) -> RicciReport:
    """``M_f(3/5) <= 1 - (9/10)(1/3 - |a_1|)^2`` for a self-map with ``f(0) = 0``.

    The tail beyond ``K`` uses ``|a_k| <= 1 - |a_1|^2`` (Wiener applied to ``f/z``).
    """
    series = f if isinstance(f, CoefficientSeries) else coeffs_from_map(f, k_max)
    mag = np.abs(series.coeffs)
    if mag[0] > 1e-12:
        raise ValueError(f"f(0) = {series.a0!r} is not zero")
    r = RICCI_RADIUS
    a1 = float(mag[1])
    partial = float(np.polynomial.polynomial.polyval(r, mag))
    tail = max(1.0 - a1 * a1, 0.0) * r ** (series.degree + 1) / (1.0 - r)
    bound = 1.0 - 0.9 * (1.0 / 3.0 - a1) ** 2
    return RicciReport(MajorantBracket(partial, partial + tail), bound, a1)


# -- search families ---------------------------------------------------------

class DiscClass(str, enum.Enum):
    F0 = "F0"
    F0_ALPHA = "F0_alpha"
    FM = "Fm"
    FM_ALPHA = "Fm_alpha"


@dataclass(frozen=True)
class DiscFamilySpec:
    """A finite-parameter Blaschke-type family inside one of the classes.

    ``factors`` real Moebius factors ``phi_t(z) = (t - z)/(1 - t z)`` with
    ``t`` in ``[-1, 1)`` (``t = -1`` gives the constant ``-1``) build
    ``g = prod phi_t``; members are

    * ``F0``: ``g``
    * ``F0_alpha``: ``(alpha - z g)/(1 - alpha z g)``
    * ``Fm``: ``z^m g``
    * ``Fm_alpha``: ``z^m (alpha - z g)/(1 - alpha z g)``
    """

    cls: DiscClass
    m: int = 0
    alpha: float = 0.0
    factors: int = 1

    def __post_init__(self):
        object.__setattr__(self, "cls", DiscClass(self.cls))
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha!r}")
        if self.m < 0:
            raise ValueError("m must be >= 0")
        if not 1 <= self.factors <= 3:
            raise ValueError("families use between 1 and 3 Moebius factors")

    @property
    def name(self) -> str:
        if self.cls is DiscClass.F0:
            return "F0"
        if self.cls is DiscClass.F0_ALPHA:
            return f"F0_alpha({self.alpha:g})"
        if self.cls is DiscClass.FM:
            return f"F{self.m}"
        return f"F{self.m}_alpha({self.alpha:g})"

    def series(self, params: np.ndarray, k_max: int) -> np.ndarray:
        """Coefficients for a batch of parameter rows ``(M, factors)`` -> ``(M, K+1)``."""
        params = np.atleast_2d(np.asarray(params, dtype=float))
        if params.shape[1] != self.factors:
            raise ValueError(f"expected {self.factors} parameters per member")
        if np.any(params < -1.0) or np.any(params >= 1.0):
            raise ValueError("Moebius parameters must lie in [-1, 1)")
        k = np.arange(1, k_max + 1)
        g = None
        for t in params.T:
            phi = np.zeros((len(t), k_max + 1), dtype=complex)
            phi[:, 0] = t
            phi[:, 1:] = t[:, None] ** (k + 1) - t[:, None] ** (k - 1)
            g = phi if g is None else kernels.series_mul(g, phi)
        if self.cls in (DiscClass.F0_ALPHA, DiscClass.FM_ALPHA):
            zg = np.zeros_like(g)
            zg[:, 1:] = g[:, :-1]
            num = -zg
            num[:, 0] += self.alpha
            den = -self.alpha * zg
            den[:, 0] += 1.0
            g = kernels.series_mul(num, kernels.series_recip(den))
        if self.cls in (DiscClass.FM, DiscClass.FM_ALPHA) and self.m:
            out = np.zeros_like(g)
            out[:, self.m:] = g[:, : k_max + 1 - self.m]
            g = out
        return np.ascontiguousarray(g)

    def member(self, params) -> Callable:
        """The member as a callable, for cross-checks against the series."""
        params = tuple(float(p) for p in params)

        def f(z):
            z = np.asarray(z, dtype=complex)
            g = np.ones_like(z)
            for t in params:
                g = g * (t - z) / (1.0 - t * z)
            if self.cls in (DiscClass.F0_ALPHA, DiscClass.FM_ALPHA):
                g = (self.alpha - z * g) / (1.0 - self.alpha * z * g)
            if self.cls in (DiscClass.FM, DiscClass.FM_ALPHA):
                g = z ** self.m * g
            return g

        return f


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` (inclusive linspace) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} is not start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("grid count must be >= 1")
        return np.linspace(start, stop, count)
    return np.array([float(p) for p in text.split(",") if p.strip()])


def default_r_grid(step: float = 5e-4, stop: float = 0.95) -> np.ndarray:
    return np.round(np.arange(step, stop + step / 2, step), 12)


def default_param_grid(family: DiscFamilySpec, count: int | None = None) -> np.ndarray:
    if count is None:
        count = {1: 400, 2: 100, 3: 24}[family.factors]
    t = np.linspace(-1.0, 0.995, count)
    return np.array(list(itertools.product(t, repeat=family.factors)))


@dataclass(frozen=True)
class BohrBracket:
    family: str
    lower_certificate: float | None
    upper_witness: float | None
    witness_params: tuple | None
    witness_majorant: float | None
    members: int
    k_max: int
    sampled_only: bool = True

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "lower_certificate": self.lower_certificate,
            "lower_certificate_sampled_only": self.sampled_only,
            "upper_witness": self.upper_witness,
            "witness_params": None if self.witness_params is None else list(self.witness_params),
            "witness_majorant": self.witness_majorant,
            "members": self.members,
            "k_max": self.k_max,
        }


def bohr_number_bracket(family: DiscFamilySpec, r_grid: Sequence[float], param_grid,
                        k_max: int = 128, chunk: int = 4096) -> BohrBracket:
    """Grid bracket for the family's Bohr number.

    ``upper_witness`` is the smallest grid radius where some member's partial
    majorant (a lower bound for ``M_f``) exceeds one: a rigorous upper bound
    for the class Bohr number. ``lower_certificate`` is the largest grid radius
    below which every sampled member keeps ``M_f`` (with Wiener tail) at most
    one; it holds for the samples only.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    params = np.atleast_2d(np.asarray(param_grid, dtype=float))
    if r_grid.size == 0 or params.size == 0:
        raise ValueError("empty grid")
    if np.any(np.diff(r_grid) <= 0) or r_grid[0] < 0 or r_grid[-1] >= 1:
        raise ValueError("r_grid must be increasing inside [0, 1)")
    best_low, best_up, best_row = len(r_grid), len(r_grid), -1
    for start in range(0, len(params), chunk):
        block = params[start : start + chunk]
        coeffs = family.series(block, k_max)
        mags = np.ascontiguousarray(np.abs(coeffs))
        tail = np.ascontiguousarray(np.maximum(1.0 - mags[:, 0] ** 2, 0.0))
        low, up = kernels.majorant_crossings(mags, tail, r_grid)
        i = int(np.argmin(low))
        if low[i] < best_low:
            best_low, best_row = int(low[i]), start + i
        best_up = min(best_up, int(np.min(up)))
    if best_low < len(r_grid):
        r_w = float(r_grid[best_low])
        wp = tuple(float(p) for p in params[best_row])
        wm = majorant_sum(CoefficientSeries(family.series(params[best_row], k_max)[0]), r_w).partial
        witness = (r_w, wp, wm)
    else:
        witness = (None, None, None)
    lower = float(r_grid[best_up - 1]) if best_up > 0 else None
    return BohrBracket(family.name, lower, *witness, members=len(params), k_max=k_max)


# -- sampled self-maps ---------------------------------------------------------

def random_blaschke(rng, degree: int, zero_at_origin: bool = False) -> Callable:
    """``e^{i theta} prod (z - a_j)/(1 - conj(a_j) z)`` with zeros drawn in ``|a| < 0.95``."""
    rad = 0.95 * np.sqrt(rng.random(degree))
    zeros = rad * np.exp(2j * np.pi * rng.random(degree))
    if zero_at_origin:
        zeros[0] = 0.0
    phase = np.exp(2j * np.pi * rng.random())

    def f(z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, phase, dtype=complex)
        for a in zeros:
            out = out * (z - a) / (1.0 - np.conj(a) * z)
        return out

    f.zeros = zeros
    return f


def random_self_map(rng, degree: int, zero_at_origin: bool = False) -> Callable:
    """A Blaschke product scaled by ``s`` in ``(0, 1]`` (not inner when ``s < 1``)."""
    b = random_blaschke(rng, degree, zero_at_origin)
    s = 1.0 - 0.5 * rng.random() ** 2
    return lambda z: s * b(z)


def symmetrized(f: Callable, k: int) -> Callable:
    """``h_k`` with ``h_k(z^k) = (1/k) sum_j f(e^{2 pi i j/k} z)``, i.e. ``h_k = sum_m a_{km} z^m``."""
    roots = np.exp(2j * np.pi * np.arange(k) / k)

    def h(w):
        w = np.asarray(w, dtype=complex)
        z = w ** (1.0 / k)
        return np.mean([f(c * z) for c in roots], axis=0)

    return h


def sweep_moebius(alphas: Sequence[float], r_grid: Sequence[float], k_max: int = 128) -> Iterator:
    """``(alpha, r, partial, upper, 2 alpha - f(r))`` over the grid."""
    for a in alphas:
        s = moebius_coeffs(a, k_max)
        for r in r_grid:
            br = majorant_sum(s, r)
            yield a, r, br.partial, br.upper, 2 * a - (a - r) / (1 - a * r)
