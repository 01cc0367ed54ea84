"""Acceptance gate: every criterion at its stated tolerance over desk-scale domains.

Each test prints one ``PASS``/``FAIL`` line. Run with ``pytest tests/test_acceptance.py -v``.
"""
import math
import time

import numpy as np
import pytest

from jordanbohr.bohr_disc import (
    DiscFamilySpec,
    bohr_number_bracket,
    coefficient_bounds_check,
    coeffs_from_map,
    default_param_grid,
    default_r_grid,
    majorant_sum,
    moebius_coeffs,
    random_blaschke,
    random_self_map,
    ricci_check,
)
from jordanbohr.bohr_multi import (
    ConstantMap,
    IdentityMap,
    Verdict,
    bohr_sum,
    composed_test_map,
    extremal_map,
    polynomial_self_map,
)
from jordanbohr.jts_core import make_domain
from jordanbohr.moebius import derivative_norms, make_automorphism
from jordanbohr.suites import (
    Tolerances,
    bohr_sum_experiment,
    extremal_sweep,
    identity_suite,
    moebius_suite,
    norm_suite,
    random_element,
    sample_rng,
)

# largest instance of every kind at desk scale, plus non-tube and small cases
DESK = [
    ("disc",),
    ("polydisc", 4),
    ("typeI", 2, 3),
    ("typeI", 3, 4),
    ("typeII", 3),
    ("typeII", 4),
    ("typeIII", 4),
    ("typeIV", 3),
    ("typeIV", 6),
    ("ball", 4),
]
SEED = 20240601
TOL = Tolerances()
SUITE_BUDGET_S = 60.0


def _timed(fn, domains=DESK):
    """Run ``fn(spec_args)`` per domain; returns results and the slowest per-domain time."""
    out, slowest = {}, 0.0
    for args in domains:
        t = time.perf_counter()
        out[args] = fn(args)
        slowest = max(slowest, time.perf_counter() - t)
    return out, slowest


def _report(capsys, label, records, elapsed):
    """``elapsed`` is the slowest single-domain suite run, which must fit the budget."""
    failed = [r for r in records if not r.passed]
    worst = max(records, key=lambda r: (r.value - r.bound) if math.isfinite(r.value) else math.inf)
    status = "PASS" if not failed else "FAIL"
    line = (f"{status} {label}: {len(records) - len(failed)}/{len(records)} checks, "
            f"worst {worst.name} value={worst.value:.3e} bound={worst.bound:.3e}, "
            f"slowest domain {elapsed:.1f}s")
    with capsys.disabled():
        print("\n" + line)
    assert not failed, [f"{r.name}: {r.value!r} > {r.bound!r}" for r in failed[:10]]
    assert elapsed <= SUITE_BUDGET_S


class _Check:
    """Minimal record for checks computed inline."""

    def __init__(self, name, value, bound):
        self.name, self.value, self.bound = name, float(value), float(bound)

    @property
    def passed(self):
        return self.value <= self.bound


@pytest.fixture(scope="module")
def norm_records():
    return _timed(lambda args: norm_suite(make_domain(*args), 20, SEED, TOL))


@pytest.fixture(scope="module")
def moebius_records():
    return _timed(lambda args: moebius_suite(make_domain(*args), 50, SEED, TOL))


def test_criterion_1_identities(capsys):
    t = time.perf_counter()
    recs = [r for args in DESK for r in identity_suite(make_domain(*args), 100, SEED, TOL)]
    assert len(recs) == 300 * len(DESK)
    _report(capsys, "criterion 1 (triple-product identities, 1e-10, 100 samples/kind)", recs,
            time.perf_counter() - t)


def test_criterion_2_peirce(capsys, norm_records):
    recs, elapsed = norm_records
    sel = [r for rs in recs.values() for r in rs
           if r.name.startswith(("peirce_", "projector_", "norms["))]
    recon = [r for r in sel if r.name.startswith("peirce_")]
    assert recon and all(r.bound == 1e-8 for r in recon)
    assert all(r.bound == 1e-10 for r in sel if r.name.startswith("projector_"))
    _report(capsys, "criterion 2 (Peirce reconstructions 1e-8, projectors 1e-10)", sel, elapsed)


def test_criterion_3_two_norms(capsys, norm_records):
    recs, elapsed = norm_records
    sel = [r for rs in recs.values() for r in rs if r.name.startswith(("two_norms_equal", "norms["))]
    assert len(sel) == 20 * 4 * len(DESK)
    assert all(r.bound == 1e-3 for r in sel)
    _report(capsys, "criterion 3 (sampled vs exact norm of Bergman powers, 1e-3 rel)", sel, elapsed)


def test_criterion_4_derivative_norms(capsys, moebius_records):
    recs, elapsed = moebius_records
    t = time.perf_counter()
    sel = [r for rs in recs.values() for r in rs if r.name.startswith(("dphi_norm", "dphi_u_image", "dphi_inverse"))]
    assert len(sel) == 50 * 3 * len(DESK)
    dn = derivative_norms(make_domain("disc"), [0.6])
    golden = (1.5625, 0.9375, 0.64)
    for name, got, want in zip(("dphi_norm", "dphi_u_image_norm", "inverse_norm"),
                               (dn.dphi_norm, dn.dphi_u_image_norm, dn.inverse_norm), golden):
        sel.append(_Check(f"disc_golden_{name}", abs(got - want), 1e-9))
    for args in DESK:
        s = make_domain(*args)
        for i in range(50):
            dn = derivative_norms(s, random_element(s, sample_rng(SEED + 4, i), 0.99 * sample_rng(SEED + 5, i).random()))
            sel.append(_Check(f"closed_forms_vs_direct[{args},{i}]", dn.max_deviation(), 1e-9))
    _report(capsys, "criterion 4 (derivative-norm closed forms 1e-9, disc golden)", sel,
            elapsed + time.perf_counter() - t)


def test_criterion_5_moebius(capsys, moebius_records):
    recs, elapsed = moebius_records
    t = time.perf_counter()
    sel = [r for rs in recs.values() for r in rs
           if r.name.startswith(("phi_u_sends", "dphi_at_u_finite", "moebius["))]
    assert all(r.bound == 1e-10 for r in sel if r.name.startswith("phi_u"))
    assert all(r.bound == 1e-6 for r in sel if r.name.startswith("dphi_at_u_finite"))
    for args in DESK:
        s = make_domain(*args)
        for i in range(5):
            rng = sample_rng(SEED + 6, i)
            u = random_element(s, rng, 0.95 * rng.random())
            phi = make_automorphism(s, u)
            psi = phi.inverse()
            zs = np.array([random_element(s, rng, 0.999 * rng.random()) for _ in range(50)])
            sel.append(_Check(f"round_trip_50_points[{args},{i}]", np.abs(psi(phi(zs)) - zs).max(), 1e-9))
    _report(capsys, "criterion 5 (base point 1e-10, round trip 1e-9, derivative vs FD 1e-6 rel)", sel,
            elapsed + time.perf_counter() - t)


def _test_maps(spec, rng):
    u = random_element(spec, rng, 0.99 * rng.random())
    return {
        "extremal": extremal_map(spec, u),
        "polynomial": polynomial_self_map(spec, rng),
        "composed": composed_test_map(spec, rng),
    }


def test_criterion_6_coefficient_bound(capsys):
    t = time.perf_counter()
    sel = []
    for args in DESK:
        s = make_domain(*args)
        for i in range(8):
            rng = sample_rng(SEED + 7, i)
            for kind, f in _test_maps(s, rng).items():
                z = random_element(s, rng, 0.98 * rng.random())
                _, recs = bohr_sum_experiment(s, f, z, TOL, k_max=32)
                coeff = [r for r in recs if r.name.startswith("normalized_coefficient")]
                assert len(coeff) == 32 and all(r.bound == 1e-9 for r in coeff)
                sel.extend(coeff)
    _report(capsys, "criterion 6 (normalized coefficient bound, k <= 32, +1e-9)", sel, time.perf_counter() - t)


def test_criterion_7_bohr_theorem_and_crossing(capsys):
    t = time.perf_counter()
    sel = []
    r = 1 / 3 - 1e-6
    for args in DESK:
        s = make_domain(*args)
        for i in range(6):
            rng = sample_rng(SEED + 8, i)
            maps = _test_maps(s, rng)
            maps["constant"] = ConstantMap(s, random_element(s, rng, 0.99 * rng.random()))
            maps["identity"] = IdentityMap(s)
            for kind, f in maps.items():
                rep = bohr_sum(s, f, random_element(s, rng, r))
                needed = (1 - rep.u_norm) ** 2 / 2 - 1e-6
                sel.append(_Check(f"below_one[{args},{kind},{i}]",
                                  0.0 if rep.verdict is Verdict.BELOW_ONE else 1.0, 0.0))
                sel.append(_Check(f"margin[{args},{kind},{i}]", needed - (1 - rep.upper_sum), 0.0))
        infos, recs = extremal_sweep(s, (0.5, 0.9, 0.99), SEED, TOL, resolution=1e-4)
        assert all("error" not in info for info in infos)
        sel.extend(recs)
        u = random_element(s, sample_rng(SEED + 9, 0), 0.9)
        f = extremal_map(s, u)
        sel.append(_Check(f"golden_1.01875[{args}]", abs(bohr_sum(s, f, 0.4 * f.frame[0]).partial_sum - 1.01875), 1e-9))
    _report(capsys, "criterion 7 (sum below one at 1/3 with margin; crossing to 1e-4; 1.01875)", sel,
            time.perf_counter() - t)


def test_criterion_8_disc(capsys):
    t = time.perf_counter()
    sel = []
    rng = np.random.default_rng(SEED)
    for i in range(200):
        rep = coefficient_bounds_check(coeffs_from_map(random_blaschke(rng, 1 + i % 6), 64))
        sel.append(_Check(f"wiener[{i}]", -rep.wiener_slack, 1e-9))
        sel.append(_Check(f"caratheodory[{i}]", -rep.caratheodory_slack, 1e-9))
    r_grid = np.linspace(0.0, 0.95, 96)
    for a in (0.1, 0.3, 0.5, 0.7, 0.9, 0.99):
        s = coeffs_from_map(lambda z, a=a: (a - z) / (1 - a * z), 128)
        closed = moebius_coeffs(a, 512)
        for r in r_grid:
            sel.append(_Check(f"moebius_majorant[a={a},r={r:.3f}]",
                              abs(majorant_sum(closed, r).partial - (2 * a - (a - r) / (1 - a * r))), 1e-10))
        sel.append(_Check(f"moebius_quadrature_coeffs[a={a}]", np.abs(s.coeffs - closed.coeffs[:129]).max(), 1e-10))
        r0 = 1 / (1 + 2 * a)
        for dr in (1e-4, 1e-2, 0.05):
            if r0 + dr < 1:
                sel.append(_Check(f"moebius_witness[a={a},r=r0+{dr:g}]",
                                  1 - majorant_sum(closed, r0 + dr).partial, 0.0))
    for i in range(100):
        rep = ricci_check(random_self_map(rng, 1 + i % 5, zero_at_origin=True))
        sel.append(_Check(f"ricci[{i}]", rep.majorant.upper, rep.bound + 1e-9))
    f0 = DiscFamilySpec("F0")
    br = bohr_number_bracket(f0, default_r_grid(), default_param_grid(f0))
    sel.append(_Check("disc_search_F0_witness", br.upper_witness, 0.34))
    sel.append(_Check("disc_search_F0_not_below_exact", 1 / 3, br.upper_witness))
    f1 = DiscFamilySpec("Fm", m=1, factors=2)
    br = bohr_number_bracket(f1, default_r_grid(), default_param_grid(f1))
    sel.append(_Check("disc_search_F1_witness", br.upper_witness, 0.72))
    sel.append(_Check("disc_search_F1_not_below_exact", 1 / math.sqrt(2), br.upper_witness))
    none = bohr_number_bracket(f1, [0.6], default_param_grid(f1))
    sel.append(_Check("disc_search_F1_no_witness_at_0.6", 0.0 if none.upper_witness is None else 1.0, 0.0))
    _report(capsys, "criterion 8 (disc: coefficient bounds, Moebius majorant, Ricci, searches)", sel,
            time.perf_counter() - t)
