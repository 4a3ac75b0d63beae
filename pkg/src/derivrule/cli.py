"""Command-line front end: every dataset is written as CSV.

Exit status: 0 on success, 2 on usage errors (bad flags, unknown systems,
runs that need ``--heavy``), 1 when a computation fails.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DerivRuleError, UnknownSystem
from .interpolation import SHRINK, THIELE, InterpolationScheme
from .inversion import ANALYTIC, derivative_rule_invert, fit_convergence, histogram_invert
from .markov import resolvent_table
from .numerics import PrecisionContext, format_number
from .opsystems import chebyshev, gegenbauer, hermite, parse_system
from .photoeffect import DEFAULT_SCHEME, cross_section
from .quadrature import analytic_chebyshev_rule, gauss_rule, rule_to_csv
from .tables import render_table, write_table
from .universality import clock_probe, pollaczek_missing_mass, weight_ratio_probe

__all__ = ["main", "run", "build_parser", "RunConfig", "TABLES"]

# eigensolves above this order, or closed-form rules above the second, need --heavy
HEAVY_EIGEN_N = 1000
HEAVY_ANALYTIC_N = 20000

TABLES = {
    "table1": {"system": chebyshev(2), "N": (10, 15, 20, 40, 60), "heavy_N": (), "digits": 120,
               "analytic": True,
               "reference": {10: -10, 15: -15, 20: -25, 40: -58, 60: -99}},
    "table2": {"system": gegenbauer(20), "N": (11, 21, 41, 61, 101), "heavy_N": (201, 401),
               "digits": 100, "analytic": False,
               "reference": {11: -5.1, 21: -8.7, 41: -15.4, 61: -21.8, 101: -34.4, 201: -65.3, 401: -126.3}},
    "table3": {"system": hermite(), "N": (11, 21, 41, 61, 101), "heavy_N": (201, 401),
               "digits": 100, "analytic": False,
               "reference": {11: -5.5, 21: -8, 41: -15, 61: -21, 101: -34, 201: -64, 401: -127}},
}


class UsageError(Exception):
    pass


class RunConfig(argparse.Namespace):
    """Parsed flags; attribute names follow the long options."""


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational like 5/2, got {text}")


def _complex(text):
    try:
        re_, im_ = text.split(",")
        return complex(float(re_), float(im_))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re,im, got {text}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, help="working precision (>= 16; default 50, or the table's own)")
    common.add_argument("--guard", type=int, default=10, help="extra internal digits (>= 10)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--no-meta", action="store_true", help="omit '#' metadata lines")
    common.add_argument("--heavy", action="store_true", help="allow very large runs")

    sysopt = argparse.ArgumentParser(add_help=False)
    sysopt.add_argument("--system", required=True,
                        help="cheb1|cheb2|cheb3|cheb4|legendre|gegenbauer:l=<int>|hermite|"
                             "laguerre:alpha=<rat>|cp:l=<int>,Z=<rat>,lambda=<rat>")
    sysopt.add_argument("--N", type=_positive_int, required=True, help="number of nodes")
    sysopt.add_argument("--analytic", action="store_true",
                        help="Chebyshev only: closed-form nodes, weights and node derivatives")

    interp = argparse.ArgumentParser(add_help=False)
    interp.add_argument("--interp-order", type=_positive_int,
                        help="samples per interpolation window")
    interp.add_argument("--boundary", choices=("shrink", "thiele"), default="shrink")

    p = argparse.ArgumentParser(prog="derivrule", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("rule", parents=[common, sysopt], help="nodes and weights")
    sub.add_parser("invert", parents=[common, sysopt, interp], help="derivative-rule inversion")
    sub.add_parser("histogram", parents=[common, sysopt, interp], help="histogram inversion")
    sub.add_parser("clock", parents=[common, sysopt, interp], help="spacing / derivative probe")
    sub.add_parser("wratio", parents=[common, sysopt, interp], help="weight-ratio probe")
    r = sub.add_parser("resolvent", parents=[common, sysopt], help="pole-sum resolvent on a z list")
    r.add_argument("--z", type=_complex, action="append", required=True, help="re,im (repeatable)")
    ph = sub.add_parser("photoeffect", parents=[common], help="hydrogen photo cross section")
    ph.add_argument("--N", type=_positive_int, default=35)
    ph.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(5, 2))
    ph.add_argument("--l", type=int, default=1)
    ph.add_argument("--interp-order", type=_positive_int, default=DEFAULT_SCHEME.order)
    for name in TABLES:
        # parent actions are shared between subparsers, so the table's digits are applied in _context
        sub.add_parser(name, parents=[common], help=f"error sweep of {name}")
    return p


def _context(cfg) -> PrecisionContext:
    if cfg.digits is None:
        cfg.digits = TABLES[cfg.command]["digits"] if cfg.command in TABLES else 50
    try:
        return PrecisionContext(cfg.digits, cfg.guard, max(1000, cfg.digits + cfg.guard + 100))
    except ValueError as exc:
        raise UsageError(str(exc))


def _system(cfg):
    try:
        return parse_system(cfg.system)
    except UnknownSystem as exc:
        raise UsageError(str(exc))


def _rule(cfg, sys_, ctx):
    if cfg.analytic:
        if sys_.kind is None:
            raise UsageError("--analytic applies only to Chebyshev systems")
        if cfg.N > HEAVY_ANALYTIC_N and not cfg.heavy:
            raise UsageError(f"N > {HEAVY_ANALYTIC_N} needs --heavy")
        return analytic_chebyshev_rule(sys_.kind, cfg.N, ctx)
    if cfg.N > HEAVY_EIGEN_N and not cfg.heavy:
        raise UsageError(f"N > {HEAVY_EIGEN_N} with an eigensolve needs --heavy")
    return gauss_rule(sys_, cfg.N, ctx)


def _scheme(cfg, default_order):
    return InterpolationScheme(order=cfg.interp_order or default_order,
                               boundary_policy=THIELE if cfg.boundary == "thiele" else SHRINK)


def _emit(cfg, text_fn):
    """text_fn(path_or_None) returns the rendered CSV; print it when no --out."""
    text = text_fn(cfg.out)
    if not cfg.out:
        sys.stdout.write(text)


def _cmd_rule(cfg):
    ctx = _context(cfg)
    rule = _rule(cfg, _system(cfg), ctx)
    _emit(cfg, lambda path: rule_to_csv(rule, path, meta=not cfg.no_meta))


def _cmd_invert(cfg):
    ctx = _context(cfg)
    rule = _rule(cfg, _system(cfg), ctx)
    # default: one window through all nodes (polynomial degree N-1)
    scheme = ANALYTIC if cfg.analytic else _scheme(cfg, rule.n)
    rep = derivative_rule_invert(rule, scheme)
    _emit(cfg, lambda path: rep.to_csv(path, meta=not cfg.no_meta))


def _cmd_histogram(cfg):
    ctx = _context(cfg)
    rule = _rule(cfg, _system(cfg), ctx)
    rep = histogram_invert(rule, cfg.interp_order or 10)
    _emit(cfg, lambda path: rep.to_csv(path, meta=not cfg.no_meta))


def _cmd_clock(cfg):
    ctx = _context(cfg)
    rule = _rule(cfg, _system(cfg), ctx)
    probe = clock_probe(rule, ANALYTIC if cfg.analytic else _scheme(cfg, 10))
    _emit(cfg, lambda path: probe.to_csv(path, meta=not cfg.no_meta))


def _cmd_wratio(cfg):
    ctx = _context(cfg)
    rule = _rule(cfg, _system(cfg), ctx)
    probe = clock_probe(rule, ANALYTIC if cfg.analytic else _scheme(cfg, 10))
    res = weight_ratio_probe([rule])
    text = probe.to_csv(None, meta=False)
    meta = None
    if not cfg.no_meta:
        meta = {"system": rule.system.spec, "n": rule.n, "digits": ctx.digits,
                "max_interior_deviation": format_number(res.deviation[rule.system.spec], 6)}
        if rule.system.attractive:
            mass, count = pollaczek_missing_mass(rule)
            meta["nodes_below_support"] = count
            meta["missing_mass"] = format_number(mass, ctx.digits)
    header = text.splitlines()[0].split(",")
    rows = [line.split(",") for line in text.splitlines()[1:]]
    _emit(cfg, lambda path: (write_table(path, header, rows, ctx.digits, meta) if path
                             else render_table(header, rows, ctx.digits, meta)))


def _cmd_resolvent(cfg):
    ctx = _context(cfg)
    rule = _rule(cfg, _system(cfg), ctx)
    _emit(cfg, lambda path: resolvent_table(rule, cfg.z, path, meta=not cfg.no_meta))


def _cmd_photoeffect(cfg):
    ctx = _context(cfg)
    scheme = InterpolationScheme(order=cfg.interp_order, kind=DEFAULT_SCHEME.kind)
    spectrum = cross_section(cfg.N, cfg.l, cfg.lam, scheme, ctx)
    _emit(cfg, lambda path: spectrum.to_csv(path, meta=not cfg.no_meta))


def table_sweep(name: str, ctx: PrecisionContext, heavy: bool = False) -> list:
    """[(N, error at the node nearest 0)] for one of the reference sweeps.

    Each N uses a single interpolation window through all N nodes.
    """
    table = TABLES[name]
    sys_ = table["system"]
    out = []
    for N in table["N"] + (table["heavy_N"] if heavy else ()):
        if table["analytic"]:
            rule = analytic_chebyshev_rule(sys_.kind, N, ctx)
        else:
            rule = gauss_rule(sys_, N, ctx)
        centre = min(range(1, N + 1), key=lambda k: (abs(rule.nodes[k - 1]), k))
        rep = derivative_rule_invert(rule, InterpolationScheme(order=N), indices=[centre])
        out.append((N, rep.central_error))
    return out


def _cmd_table(cfg):
    ctx = _context(cfg)
    table = TABLES[cfg.command]
    rows = table_sweep(cfg.command, ctx, cfg.heavy)
    alpha = fit_convergence([(N, float(e)) for N, e in rows]) if len(rows) >= 3 else None
    mp = ctx.mp
    body = [(N, N - 1, e, format_number(mp.log10(e), 4), str(table["reference"].get(N, "")))
            for N, e in rows]
    header = ("N", "interp_degree", "error", "log10_error", "reference_log10_error")
    meta = None
    if not cfg.no_meta:
        meta = {"table": cfg.command, "system": table["system"].spec, "digits": ctx.digits,
                "alpha": f"{alpha:.6g}" if alpha else ""}
    _emit(cfg, lambda path: (write_table(path, header, body, ctx.digits, meta) if path
                             else render_table(header, body, ctx.digits, meta)))


COMMANDS = {
    "rule": _cmd_rule,
    "invert": _cmd_invert,
    "histogram": _cmd_histogram,
    "clock": _cmd_clock,
    "wratio": _cmd_wratio,
    "resolvent": _cmd_resolvent,
    "photoeffect": _cmd_photoeffect,
    "table1": _cmd_table,
    "table2": _cmd_table,
    "table3": _cmd_table,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        cfg = parser.parse_args(argv, namespace=RunConfig())
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"{parser.prog} {cfg.command}: usage error: {exc}", file=sys.stderr)
        return 2
    except DerivRuleError as exc:
        print(f"{parser.prog} {cfg.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{parser.prog} {cfg.command}: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
