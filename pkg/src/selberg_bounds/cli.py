"""Command-line front end.

Exit codes: 0 success, 1 verification failure or incomplete enumeration,
2 configuration or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Callable, Optional

import numpy as np

from . import bounds as B
from .config import Config, ConfigError, load_config
from .geometry import holonomy_bounds_check
from .numerics import li_sandwich
from .reports import to_json
from .trace_kernels import cos_minus_one, kiss_shift, one_plus_cos, verify_sign_conditions
from .transform_pairs import fourier_check, make_bump_pair, verify_admissibility

__all__ = ["main", "build_parser", "parse_epsilon"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
SUITES = ("admissibility", "signs", "fourier", "holonomy", "li", "bounds")
LI_POINTS = (11.0, 1e2, 1e4, 1e6, 1e8)


class DomainError(ValueError):
    """Inputs outside the range where a bound is defined."""


def parse_epsilon(text: str) -> float:
    """A float, or the symbolic value ``2asinh1``."""
    t = text.strip().lower().replace(" ", "")
    if t in ("2asinh1", "2asinh(1)", "2*asinh(1)"):
        return B.SURFACE_EPSILON
    try:
        value = float(t)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse epsilon {text!r}") from exc
    if not value > 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


def _emit(doc, out: Optional[str]) -> None:
    text = to_json(doc)
    print(text)
    if out:
        if out.endswith(".csv"):
            buf = io.StringIO()
            w = csv.writer(buf)
            w.writerow(["key", "value"])
            for key, value in _flatten(doc):
                w.writerow([key, value])
            data = buf.getvalue()
        else:
            data = text + "\n"
        with open(out, "w", newline="") as fh:
            fh.write(data)


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    elif hasattr(obj, "to_dict"):
        yield from _flatten(obj.to_dict(), prefix)
    elif isinstance(obj, float):
        yield prefix, f"{obj:.12g}"
    else:
        yield prefix, obj


def _chain(fn: Callable, *args):
    try:
        return fn(*args)
    except B.MissingConstantError as exc:
        return {"unavailable": str(exc)}


def _ext_with_tol(cfg: Config, tol: Optional[float]) -> B.ExternalConstants:
    e = cfg.external
    return B.ExternalConstants(e.W, e.K, e.v, tol if tol is not None else cfg.quadrature_tol)


# ---------------------------------------------------------------- commands

def cmd_constants(args, cfg: Config) -> int:
    ext = _ext_with_tol(cfg, args.tol)
    n, delta = args.n, args.delta
    doc = {"command": "constants", "n": n, "delta": delta, "tol": ext.tol, "config": cfg.source}
    doc["A_n"] = B.constant_A(n, ext.tol)
    if n == 2:
        eps = args.epsilon if args.epsilon is not None else B.SURFACE_EPSILON
        doc["surface"] = B.surface_constants_report(eps, ext.tol)
    elif args.epsilon is not None:
        doc["notes"] = ["epsilon only affects the surface constant (n = 2)"]
    doc["interval_upper"] = _chain(B.interval_constants_upper, n, delta, ext)
    doc["cumulative_upper"] = _chain(B.cumulative_constant_upper, n, delta, ext)
    doc["interval_lower"] = _chain(B.interval_constants_lower, n, delta, ext)
    if delta <= 6:
        doc["cumulative_lower"] = _chain(B.cumulative_constants_lower, n, delta, ext)
    else:
        doc["cumulative_lower"] = {"unavailable": "needs delta <= 6"}
    doc["volume_corollary"] = _chain(B.corollary_constants, n, ext)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_bound(args, cfg: Config) -> int:
    ext = _ext_with_tol(cfg, args.tol)
    n = args.n
    if n in ext.v and args.vol < ext.v[n]:
        raise DomainError(f"volume {args.vol} is below the configured lower bound v_{n} = {ext.v[n]}")
    params = B.ManifoldParams(n, args.vol, args.sys, args.delta)
    doc = {"command": "bound", "inputs": {"n": n, "vol": args.vol, "sys": args.sys,
                                          "delta": args.delta, "L": args.L}}
    doc["kiss"] = B.kiss_upper_bound(params, ext)
    if n in ext.v:
        doc["volume_corollary"] = _chain(B.corollary_volume_bound, n, args.vol, ext)
    if args.L is not None:
        L, d = args.L, args.delta
        doc["interval_upper"] = _chain(B.interval_count_upper, n, d, args.vol, L, ext)
        doc["cumulative_upper"] = _chain(B.cumulative_upper, n, d, args.vol, L, ext)
        if L >= d:
            doc["interval_lower"] = _chain(B.interval_count_lower, n, d, args.vol, L, ext)
        if d <= 6:
            doc["cumulative_lower"] = _chain(B.cumulative_lower, n, d, args.vol, L, ext)
        doc["pgt_asymptotic"] = B.pgt_asymptotic(n, L)
        doc["hypotheses"] = {"sys_ge_2delta": args.sys >= 2 * d, "sys_ge_delta": args.sys >= d}
    _emit(doc, args.out)
    return EXIT_OK


def _run_spectrum(cfg: Config, label: str, lmax: float, depth: int, trace_cap=None):
    from .fuchsian import length_spectrum, load_group
    group = load_group(cfg.group(label))
    return length_spectrum(group, lmax, depth, trace_cap=trace_cap, element_cap=cfg.element_cap)


def cmd_spectrum(args, cfg: Config) -> int:
    from .fuchsian import write_csv, write_json
    lmax = args.lmax if args.lmax is not None else cfg.lmax
    depth = args.depth if args.depth is not None else cfg.depth
    sp = _run_spectrum(cfg, args.group, lmax, depth,
                         args.trace_cap if args.trace_cap is not None else cfg.trace_cap)
    if args.out_csv:
        write_csv(sp, args.out_csv)
    if args.out_json:
        write_json(sp, args.out_json)
    doc = {"command": "spectrum", "summary": sp.summary(),
           "entries": [e.to_dict() for e in sp.entries]}
    if not sp.complete:
        doc["warning"] = "enumeration incomplete: counts are heuristic beyond the horizon"
    print(to_json(doc))
    return EXIT_OK if sp.complete else EXIT_FAIL


# ------------------------------------------------------------------ suites

def suite_admissibility(args, cfg) -> dict:
    cases = [(n, B.epsilon_n(n)) for n in range(2, 6)]
    cases += [(2, B.SURFACE_EPSILON), (2, 0.5), (2, 1.0), (3, 0.5), (3, 1.0)]
    reports = [verify_admissibility(make_bump_pair(n, e)) for n, e in cases]
    return {"passed": all(r.passed for r in reports), "reports": reports}


def _sign_families():
    s = B.SURFACE_EPSILON
    return [
        kiss_shift(make_bump_pair(2, s), 2 * math.acosh(1 + math.sqrt(2))),
        kiss_shift(make_bump_pair(3, B.epsilon_n(3)), 1.0),
        cos_minus_one(make_bump_pair(2, 1.0), 6.0),
        cos_minus_one(make_bump_pair(3, 1.0), 6.0),
        one_plus_cos(make_bump_pair(2, 0.5), 6.0),
        one_plus_cos(make_bump_pair(3, 0.5), 6.0),
    ]


def suite_signs(args, cfg) -> dict:
    reports = [verify_sign_conditions(f) for f in _sign_families()]
    return {"passed": all(r.passed for r in reports), "reports": reports}


def suite_fourier(args, cfg) -> dict:
    rng = np.random.default_rng(args.seed)
    reports = []
    for n in (2, 3, 4, 5):
        for eps in (B.epsilon_n(n) * 64, 0.5, 1.0):
            xis = rng.uniform(0, 50, 100)
            reports.append(fourier_check(make_bump_pair(n, eps), xis, tol=1e-7))
    composite = []
    for f in _sign_families():
        xis = rng.uniform(0, 50, 100)
        dev = float(np.max(np.abs(f.numeric_transform(xis) - f.H(xis))))
        composite.append({"kind": f.kind.value, "n": f.base.n, "max_deviation": dev,
                          "passed": dev <= 1e-7})
    ok = all(r.passed for r in reports) and all(c["passed"] for c in composite)
    return {"passed": ok, "reports": reports, "composite": composite}


def suite_holonomy(args, cfg) -> dict:
    reports = [holonomy_bounds_check(n, args.trials, seed=args.seed + n) for n in range(2, 8)]
    return {"passed": all(r.passed for r in reports), "reports": reports}


def suite_li(args, cfg) -> dict:
    rows = li_sandwich(LI_POINTS)
    return {"passed": all(r["holds_standard"] for r in rows), "convention": "standard",
            "rows": rows}


def suite_bounds(args, cfg) -> dict:
    from .fuchsian import validate_bounds
    group = args.group or "bolza"
    sp = _run_spectrum(cfg, group, cfg.lmax, args.depth if args.depth is not None else cfg.depth,
                         cfg.trace_cap)
    ext = cfg.external
    params = B.ManifoldParams(2, cfg.group(group).volume or 0.0, sp.systole, 0.5)
    report = validate_bounds(sp, params, ext)
    return {"passed": bool(report.verdicts["passed"]) and sp.complete,
            "complete": sp.complete, "report": report}


SUITE_FUNCS = {"admissibility": suite_admissibility, "signs": suite_signs,
               "fourier": suite_fourier, "holonomy": suite_holonomy, "li": suite_li,
               "bounds": suite_bounds}


def cmd_verify(args, cfg: Config) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    results = {name: SUITE_FUNCS[name](args, cfg) for name in names}
    passed = all(r["passed"] for r in results.values())
    doc = {"command": "verify", "passed": passed,
           "summary": {k: v["passed"] for k, v in results.items()}, "suites": results}
    _emit(doc, args.out)
    return EXIT_OK if passed else EXIT_FAIL


# ------------------------------------------------------------------ parser

def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("value must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="selberg-bounds",
                                description="Explicit geodesic-count bounds and checks")
    p.add_argument("--config", help="JSON config file (default: $SELBERG_BOUNDS_CONFIG or built-in)")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="constant chains for dimension n")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--delta", type=_positive, default=0.5)
    c.add_argument("--epsilon", type=parse_epsilon)
    c.add_argument("--tol", type=_positive)
    c.add_argument("--out")
    c.set_defaults(func=cmd_constants)

    b = sub.add_parser("bound", help="evaluate bounds for given manifold data")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--vol", type=_positive, required=True)
    b.add_argument("--sys", type=_positive, required=True)
    b.add_argument("--delta", type=_positive, default=0.5)
    b.add_argument("--L", type=_positive)
    b.add_argument("--tol", type=_positive)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bound)

    s = sub.add_parser("spectrum", help="length spectrum of a configured group")
    s.add_argument("--group", required=True)
    s.add_argument("--lmax", type=_positive)
    s.add_argument("--depth", type=int)
    s.add_argument("--trace-cap", type=_positive)
    s.add_argument("--out-csv")
    s.add_argument("--out-json")
    s.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--trials", type=int, default=10_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--group")
    v.add_argument("--depth", type=int)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        if getattr(args, "n", 2) < 2:
            raise DomainError("n must be at least 2")
        return args.func(args, cfg)
    except (ConfigError, DomainError, B.MissingConstantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
