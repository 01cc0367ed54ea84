"""Seeded verification suites behind the command-line harness.

Every sample draws from its own generator seeded by ``(seed, index)``, so a
suite's records do not depend on execution order or thread count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bohr_disc import (
    BohrBracket,
    DiscFamilySpec,
    bohr_number_bracket,
)
from .bohr_multi import (
    ConstantMap,
    IdentityMap,
    Verdict,
    bohr_sum,
    extremal_closed_form_sum,
    extremal_map,
    p2_crossing,
    threshold_bounds,
)
from .jts_core import (
    DomainError,
    DomainSpec,
    RealLinearOp,
    bergman_operator,
    d_operator,
    identity_residuals,
    orthonormal_maps,
    q_operator,
)
from .moebius import (
    automorphism_derivative,
    derivative_norms,
    finite_difference_derivative,
    make_automorphism,
)
from .spectral import (
    _beta_formula,
    beta_numeric,
    bergman_power,
    bergman_power_eig,
    frame_function_operator,
    op_norm_hermitian,
    op_norm_spectral,
    peirce_data,
    spectral_norm,
    spectral_norm_via_q,
)

THREADS_ENV = "BOHR_DOMAINS_THREADS"
BERGMAN_EXPONENTS = (-0.5, 0.5, 1.0, 2.0)
COVARIANCE_EXPONENTS = (-1.0, -0.5, 0.5, 1.0)


@dataclass(frozen=True)
class Tolerances:
    identity: float = 1e-10
    norm: float = 1e-9
    sampled: float = 1e-3
    derivative: float = 1e-6

    def __post_init__(self):
        for name in ("identity", "norm", "sampled", "derivative"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name!r} must be positive")


@dataclass(frozen=True)
class Record:
    name: str
    anchor: str
    value: float
    bound: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.bound)


def failure(name: str, anchor: str, exc: Exception) -> Record:
    return Record(f"{name}: {type(exc).__name__}: {exc}", anchor, math.nan, 0.0)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) % 2 ** 64, int(index)])


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def run_samples(fn: Callable[[int], list], samples: int, threads: int | None = None) -> list:
    """``fn(0) + fn(1) + ...`` in index order, evaluated on up to ``threads`` workers."""
    threads = thread_count() if threads is None else threads
    if threads <= 1 or samples <= 1:
        chunks = [fn(i) for i in range(samples)]
    else:
        with ThreadPoolExecutor(max_workers=min(threads, samples)) as pool:
            chunks = list(pool.map(fn, range(samples)))
    return [rec for chunk in chunks for rec in chunk]


def random_element(spec: DomainSpec, rng, target_norm: float | None = None) -> np.ndarray:
    """Uniform point of the Hermitian unit ball, optionally rescaled to a spectral norm."""
    n = spec.dim
    w = rng.normal(size=n) + 1j * rng.normal(size=n)
    w *= rng.random() ** (1.0 / (2 * n)) / np.linalg.norm(w)
    _, f_inv = orthonormal_maps(spec)
    z = f_inv @ w
    if target_norm is not None:
        z = z * (target_norm / spectral_norm(spec, z))
    return z


def _op_residual(a: RealLinearOp, b: RealLinearOp) -> float:
    return (a - b).max_abs()


# -- verify-identities --------------------------------------------------------

def identity_suite(spec: DomainSpec, samples: int, seed: int, tol: Tolerances,
                   threads: int | None = None) -> list:
    def one(i):
        rng = sample_rng(seed, i)
        try:
            x, y, u, v, w = (random_element(spec, rng) for _ in range(5))
            res = identity_residuals(spec, x, y, u, v, w)
        except (DomainError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            return [failure(f"identities[{i}]", "jordan-identity", exc)]
        return [
            Record(f"jordan_identity[{i}]", "jordan-identity", res.jordan, tol.identity),
            Record(f"fundamental_formula[{i}]", "fundamental-formula", res.fundamental, tol.identity),
            Record(f"bergman_q_covariance[{i}]", "bergman-q-covariance", res.bergman_q, tol.identity),
        ]

    return run_samples(one, samples, threads)


# -- verify-norms ---------------------------------------------------------------

def projector_residuals(family) -> tuple:
    """Worst idempotence / mutual-orthogonality residual and completeness residual."""
    n = family.spec.dim
    ps = [p.linear for p in family.projectors.values()]
    idem = max(np.abs(p @ p - p).max() for p in ps)
    cross = max((np.abs(p @ q).max() for a, p in enumerate(ps) for b, q in enumerate(ps) if a != b),
                default=0.0)
    complete = np.abs(sum(ps) - np.eye(n)).max()
    return float(max(idem, cross)), float(complete)


def norm_suite(spec: DomainSpec, samples: int, seed: int, tol: Tolerances,
               threads: int | None = None, budget: int = 2048, refine_steps: int = 160,
               starts: int = 8) -> list:
    def one(i):
        rng = sample_rng(seed, i)
        out = []
        try:
            u = random_element(spec, rng, target_norm=0.99 * rng.random())
            sd, family = data = peirce_data(spec, u)
            fv = sd.frame_values
            pieces = [
                ("peirce_d_reconstruction", "peirce-d-spectrum", d_operator(spec, u, u),
                 lambda v: v * v, "sum"),
                ("peirce_q_squared_reconstruction", "peirce-q-squared-spectrum",
                 q_operator(spec, u) @ q_operator(spec, u), lambda v: v * v, "prod"),
                ("peirce_bergman_reconstruction", "peirce-bergman-spectrum",
                 bergman_operator(spec, u, u), lambda v: 1.0 - v * v, "prod"),
            ]
            for name, anchor, op, fn, mode in pieces:
                if mode == "prod":
                    rebuilt = frame_function_operator(family, fv, fn)
                else:
                    lam = [0.0] + [float(v) for v in fv]
                    rebuilt = family.combine({(a, b): fn(lam[a]) + fn(lam[b]) for (a, b) in family.projectors})
                out.append(Record(f"{name}[{i}]", anchor, _op_residual(op, rebuilt), 1e-8))
            idem, complete = projector_residuals(family)
            out.append(Record(f"projector_idempotence[{i}]", "peirce-projectors", idem, tol.identity))
            out.append(Record(f"projector_completeness[{i}]", "peirce-projectors", complete, tol.identity))
            out.append(Record(f"spectral_reconstruction[{i}]", "spectral-decomposition",
                              float(np.abs(sd.reconstruct() - u).max()), tol.norm))
            out.append(Record(f"spectral_norm_q_route[{i}]", "spectral-norm-via-q",
                              abs(sd.norm ** 2 - spectral_norm_via_q(spec, u) ** 2), tol.norm))
            for t in BERGMAN_EXPONENTS:
                b = bergman_power(spec, u, t, data)
                out.append(Record(f"bergman_power_oracle[{i},t={t:g}]", "bergman-power-formula",
                                  _op_residual(b, bergman_power_eig(spec, u, t)) / max(1.0, b.max_abs()),
                                  tol.norm))
            z = random_element(spec, rng)
            for t in COVARIANCE_EXPONENTS:
                b = bergman_power(spec, u, t, data)
                lhs = q_operator(spec, b(z))
                out.append(Record(f"bergman_power_q_covariance[{i},t={t:g}]", "bergman-power-q-covariance",
                                  _op_residual(lhs, b @ q_operator(spec, z) @ b) / max(1.0, lhs.max_abs()),
                                  tol.norm))
            out.append(Record(f"beta_formula[{i}]", "largest-bergman-eigenvalue",
                              abs(_beta_formula(spec, sd) - beta_numeric(spec, u)), tol.identity))
            for t in BERGMAN_EXPONENTS:
                b = bergman_power(spec, u, t, data)
                exact = op_norm_hermitian(b)
                est = op_norm_spectral(spec, b, budget=budget, refine_steps=refine_steps, starts=starts,
                                       rng=np.random.default_rng([int(seed) % 2 ** 64, i, int(4 * t) + 8]))
                out.append(Record(f"two_norms_equal[{i},t={t:g}]", "bergman-power-two-norms",
                                  abs(est - exact) / exact, tol.sampled))
        except (DomainError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            out.append(failure(f"norms[{i}]", "spectral-decomposition", exc))
        return out

    return run_samples(one, samples, threads)


# -- verify-moebius -------------------------------------------------------------

def moebius_suite(spec: DomainSpec, samples: int, seed: int, tol: Tolerances,
                  threads: int | None = None) -> list:
    def one(i):
        rng = sample_rng(seed, i)
        out = []
        try:
            u = random_element(spec, rng, target_norm=0.95 * rng.random())
            z = random_element(spec, rng, target_norm=0.95 * rng.random())
            phi = make_automorphism(spec, u)
            psi = phi.inverse()
            out.append(Record(f"phi_u_sends_u_to_origin[{i}]", "moebius-base-point",
                              float(np.abs(phi(u)).max()), tol.identity))
            out.append(Record(f"psi_phi_round_trip[{i}]", "moebius-inverse",
                              float(np.abs(psi(phi(z)) - z).max()), tol.norm))
            b_mh = bergman_power(spec, u, -0.5)
            scale = b_mh.max_abs()
            out.append(Record(f"dphi_at_u_exact[{i}]", "moebius-derivative-at-base-point",
                              _op_residual(automorphism_derivative(phi, u), b_mh) / scale, tol.identity))
            fd = finite_difference_derivative(spec, phi, u)
            out.append(Record(f"dphi_at_u_finite_difference[{i}]", "moebius-derivative-at-base-point",
                              _op_residual(fd, b_mh) / scale, tol.derivative))
            dn = derivative_norms(spec, u)
            out.append(Record(f"dphi_norm[{i}]", "derivative-norm",
                              max(abs(v - dn.dphi_norm) for v in dn.dphi_norm_bracket), tol.norm))
            out.append(Record(f"dphi_u_image_norm[{i}]", "derivative-image-norm",
                              abs(dn.dphi_u_image_direct - dn.dphi_u_image_norm), tol.norm))
            out.append(Record(f"dphi_inverse_norm[{i}]", "derivative-inverse-norm",
                              max(abs(v - dn.inverse_norm) for v in dn.inverse_norm_bracket), tol.norm))
        except (DomainError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            out.append(failure(f"moebius[{i}]", "moebius-inverse", exc))
        return out

    return run_samples(one, samples, threads)


# -- bohr-sum -------------------------------------------------------------------

def bohr_sum_experiment(spec: DomainSpec, f, z, tol: Tolerances, k_max: int = 64):
    """Records for one Bohr sum: the normalized coefficient bound for every
    ``k >= 1`` and, inside the guaranteed radius, the sum staying below one."""
    rep = bohr_sum(spec, f, z, k_max)
    out = []
    for k in range(1, k_max + 1):
        out.append(Record(f"normalized_coefficient[k={k}]", "normalized-coefficient-bound",
                          rep.scaled_norms[k] - rep.z_norm ** k, tol.norm))
    if rep.z_norm <= rep.threshold_lower:
        out.append(Record("bohr_sum_below_one", "bohr-sum-guaranteed-radius", rep.upper_sum, 1.0))
    return rep, out


def build_map(spec: DomainSpec, kind: str, u):
    if kind == "extremal":
        return extremal_map(spec, u)
    if kind == "constant":
        return ConstantMap(spec, np.asarray(u, dtype=complex))
    if kind == "identity":
        return IdentityMap(spec)
    raise ValueError(f"unknown map {kind!r}")


# -- extremal-sweep ---------------------------------------------------------------

def extremal_sweep(spec: DomainSpec, u_norms, seed: int, tol: Tolerances,
                   resolution: float = 1e-4, threads: int | None = None) -> tuple:
    """Crossing radius of the extremal map and closed-form sums, one random ``u`` per norm."""
    u_norms = list(u_norms)

    def one(i):
        nu = float(u_norms[i])
        rng = sample_rng(seed, i)
        out = []
        try:
            u = random_element(spec, rng, target_norm=nu)
            f = extremal_map(spec, u)
            e1 = f.frame[0]
            p1, p2 = threshold_bounds(spec, u)
            lo, hi = p2_crossing(spec, u, resolution)
            out.append(Record(f"crossing_radius[|u|={nu:g}]", "extremal-crossing-radius",
                              abs(0.5 * (lo + hi) - p2), resolution))
            for a in sorted({0.4, p1, 0.5 * (p1 + p2)}):
                got = bohr_sum(spec, f, a * e1).partial_sum
                out.append(Record(f"extremal_closed_form[|u|={nu:g},a={a:.6g}]", "extremal-closed-form",
                                  abs(got - extremal_closed_form_sum(nu, a)), tol.norm))
            rep = bohr_sum(spec, f, (p1 - 1e-6) * e1)
            out.append(Record(f"below_one_inside_guaranteed_radius[|u|={nu:g}]", "bohr-sum-guaranteed-radius",
                              rep.upper_sum, 1.0))
            info = {"u_norm": nu, "p1_radius": p1, "p2_radius": p2, "crossing_bracket": [lo, hi]}
        except (DomainError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            out.append(failure(f"extremal_sweep[|u|={nu:g}]", "extremal-crossing-radius", exc))
            info = {"u_norm": nu, "error": str(exc)}
        return [(out, info)]

    records, infos = [], []
    for out, info in run_samples(one, len(u_norms), threads):
        records.extend(out)
        infos.append(info)
    return infos, records


# -- disc-search ------------------------------------------------------------------

KNOWN_BOHR_NUMBERS = {"F0": 1.0 / 3.0, "F1": 1.0 / math.sqrt(2.0)}


def disc_search(family: DiscFamilySpec, r_grid, param_grid, k_max: int = 128) -> tuple:
    br: BohrBracket = bohr_number_bracket(family, r_grid, param_grid, k_max)
    out = []
    if br.upper_witness is not None:
        out.append(Record("witness_majorant_exceeds_one", "bohr-number-witness",
                          1.0 - br.witness_majorant, 0.0))
        known = KNOWN_BOHR_NUMBERS.get(br.family)
        if known is not None:
            out.append(Record("known_bohr_number_not_above_witness", "bohr-number-witness",
                              known, br.upper_witness))
    if br.upper_witness is not None and br.lower_certificate is not None:
        out.append(Record("certificate_below_witness", "bohr-number-bracket",
                          br.lower_certificate, br.upper_witness))
    return br, out
