"""Command-line harness: seeded verification suites and Bohr experiments.

Exit status is 0 when every record passes, 1 when some record fails and 2 on
usage or configuration errors. Reports for an identical configuration are
byte-identical (no timestamps unless ``--timing`` is given).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .bohr_disc import DiscFamilySpec, default_param_grid, default_r_grid, parse_grid
from .jts_core import DomainError, as_element, make_domain
from .suites import (
    Record,
    Tolerances,
    bohr_sum_experiment,
    build_map,
    disc_search,
    extremal_sweep,
    identity_suite,
    moebius_suite,
    norm_suite,
    thread_count,
)

SCHEMA_VERSION = "1"
COMMANDS = ("verify-identities", "verify-norms", "verify-moebius", "bohr-sum", "extremal-sweep", "disc-search")
CSV_COLUMNS = ("name", "anchor", "value", "bound", "pass")


class UsageError(Exception):
    pass


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _json_value(v) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def record_dict(rec: Record) -> dict:
    return {"name": rec.name, "anchor": rec.anchor, "value": rec.value, "bound": rec.bound, "pass": rec.passed}


def make_report(config: dict, records: list, result: dict | None = None, wall_clock: float | None = None) -> dict:
    passed = sum(r.passed for r in records)
    report = {
        "schema": SCHEMA_VERSION,
        "config": config,
        "records": [record_dict(r) for r in records],
        "summary": {"total": len(records), "passed": passed, "failed": len(records) - passed},
    }
    if result is not None:
        report["result"] = result
    if wall_clock is not None:
        report["wall_clock_s"] = wall_clock
    return report


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return _json_value(report) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in report["records"]:
            value = fmt_float(r["value"]) if math.isfinite(r["value"]) else "nan"
            w.writerow([r["name"], r["anchor"], value, fmt_float(r["bound"]), "true" if r["pass"] else "false"])
        return buf.getvalue()
    raise UsageError(f"unknown output format {fmt!r}")


def emit_report(report: dict, fmt: str, path: str | None) -> None:
    text = render_report(report, fmt)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def parse_complex_list(text: str) -> np.ndarray:
    try:
        return np.array([complex(p.strip().replace(" ", "")) for p in text.split(",") if p.strip()])
    except ValueError:
        raise UsageError(f"cannot parse {text!r} as comma-separated complex numbers") from None


def parse_domain(tokens):
    if not tokens:
        raise UsageError("--domain requires a kind")
    kind, rest = tokens[0], tokens[1:]
    try:
        dims = [int(t) for t in rest]
        return make_domain(kind, *dims)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"invalid domain {' '.join(tokens)!r}: {exc}") from None


def parse_family(args) -> DiscFamilySpec:
    name = args.disc_class
    m, cls = args.m, name
    if name.startswith("F") and name[1:].isdigit():
        m, cls = int(name[1:]), ("F0" if name == "F0" else "Fm")
    elif name.startswith("F") and name.endswith("_alpha") and name[1:-6].isdigit():
        m, cls = int(name[1:-6]), ("F0_alpha" if name[1:-6] == "0" else "Fm_alpha")
    try:
        return DiscFamilySpec(cls, m=m, alpha=args.alpha, factors=args.factors)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jordanbohr", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, domain=True):
        if domain:
            sp.add_argument("--domain", nargs="+", required=True, metavar="KIND_OR_DIM",
                            help="domain kind followed by its dimensions, e.g. typeI 2 3")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=20)
        sp.add_argument("--output", choices=("json", "csv"), default="json")
        sp.add_argument("--output-path", default="-")
        sp.add_argument("--tol-identity", type=float, default=1e-10)
        sp.add_argument("--tol-norm", type=float, default=1e-9)
        sp.add_argument("--tol-sampled", type=float, default=1e-3)
        sp.add_argument("--tol-derivative", type=float, default=1e-6)
        sp.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-identity)")

    for name in ("verify-identities", "verify-moebius"):
        common(sub.add_parser(name))
    sp = sub.add_parser("verify-norms")
    common(sp)
    sp.add_argument("--budget", type=int, default=2048, help="random maximal tripotents per norm estimate")

    sp = sub.add_parser("bohr-sum")
    common(sp)
    sp.add_argument("--u", default=None, help="f(0) as comma-separated coordinates")
    sp.add_argument("--z", required=True, help="evaluation point as comma-separated coordinates")
    sp.add_argument("--map", choices=("extremal", "constant", "identity"), default=None)
    sp.add_argument("--extremal", action="store_true", help="shorthand for --map extremal")
    sp.add_argument("--k-max", type=int, default=64)

    sp = sub.add_parser("extremal-sweep")
    common(sp)
    sp.add_argument("--u-norms", default="0.5,0.9,0.99")
    sp.add_argument("--resolution", type=float, default=1e-4)

    sp = sub.add_parser("disc-search")
    common(sp, domain=False)
    sp.add_argument("--class", dest="disc_class", required=True,
                    help="F0, F0_alpha, Fm, Fm_alpha, or Fm / Fm_alpha with m spelled out (F1, F2_alpha)")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--factors", type=int, default=None)
    sp.add_argument("--alpha-grid", default=None,
                    help="Moebius parameter grid start:stop:count for one-factor families")
    sp.add_argument("--param-grid", default=None, help="per-factor parameter grid (product over factors)")
    sp.add_argument("--r-grid", default=None, help="radius grid start:stop:count (default step 5e-4)")
    sp.add_argument("--k-max", type=int, default=128)
    return p


def _config(args) -> dict:
    skip = {"output_path", "timing"}
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        cfg[k] = list(v) if isinstance(v, list) else v
    return cfg


def run(args) -> tuple:
    """Execute a parsed command; returns ``(report, exit_status)``."""
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    try:
        tol = Tolerances(args.tol_identity, args.tol_norm, args.tol_sampled, args.tol_derivative)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    threads = thread_count()
    start = time.perf_counter()
    result = None
    cmd = args.command
    if cmd == "disc-search":
        if args.factors is None:
            args.factors = 1 if args.disc_class in ("F0", "F0_alpha") else 2
        family = parse_family(args)
        try:
            r_grid = parse_grid(args.r_grid) if args.r_grid else default_r_grid()
            if args.alpha_grid and args.param_grid:
                raise UsageError("give either --alpha-grid or --param-grid")
            grid_text = args.alpha_grid or args.param_grid
            if grid_text:
                t = parse_grid(grid_text)
                params = np.array(np.meshgrid(*([t] * family.factors), indexing="ij")).reshape(family.factors, -1).T
            else:
                params = default_param_grid(family)
            br, records = disc_search(family, r_grid, params, args.k_max)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        result = br.to_dict()
    else:
        spec = parse_domain(args.domain)
        if cmd == "verify-identities":
            records = identity_suite(spec, args.samples, args.seed, tol, threads)
        elif cmd == "verify-norms":
            records = norm_suite(spec, args.samples, args.seed, tol, threads, budget=args.budget)
        elif cmd == "verify-moebius":
            records = moebius_suite(spec, args.samples, args.seed, tol, threads)
        elif cmd == "bohr-sum":
            kind = "extremal" if args.extremal else (args.map or "identity")
            if args.extremal and args.map not in (None, "extremal"):
                raise UsageError("--extremal conflicts with --map")
            try:
                z = as_element(spec, parse_complex_list(args.z))
                u = None if args.u is None else as_element(spec, parse_complex_list(args.u))
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            if u is None and kind != "identity":
                raise UsageError(f"--map {kind} needs --u")
            try:
                f = build_map(spec, kind, u)
                rep, records = bohr_sum_experiment(spec, f, z, tol, args.k_max)
                result = rep.to_dict()
            except (DomainError, ArithmeticError) as exc:
                records = [Record(f"bohr_sum: {type(exc).__name__}: {exc}", "bohr-sum", math.nan, 0.0)]
        elif cmd == "extremal-sweep":
            norms = [float(v) for v in args.u_norms.split(",") if v.strip()]
            if not norms or any(not 0.0 <= v < 1.0 for v in norms):
                raise UsageError("--u-norms must list values in [0, 1)")
            infos, records = extremal_sweep(spec, norms, args.seed, tol, args.resolution, threads)
            result = {"sweep": infos}
        else:  # pragma: no cover - argparse restricts the choices
            raise UsageError(f"unknown command {cmd!r}")
    wall = time.perf_counter() - start if args.timing else None
    report = make_report(_config(args), records, result, wall)
    return report, (0 if report["summary"]["failed"] == 0 else 1)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, status = run(args)
        emit_report(report, args.output, args.output_path)
    except UsageError as exc:
        print(f"jordanbohr {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"jordanbohr {args.command}: cannot write report: {exc}", file=sys.stderr)
        return 2
    s = report["summary"]
    print(f"{args.command}: {s['passed']}/{s['total']} checks passed", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
