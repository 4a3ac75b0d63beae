"""Recover the weight function from a quadrature rule.

Two routes: the derivative rule rho(x[k]) = w[k] / x'[k], with x' from
interpolating the nodes against their index, and the histogram baseline, which
differentiates a smooth interpolant of the cumulative weight sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import DegenerateFit, NoClosedForm, OutOfSupport, ZeroDerivative
from .interpolation import InterpolationScheme, derivative_at, local_derivative
from .numerics import PrecisionContext
from .opsystems import OPSystem, parse_system, weight
from .quadrature import QuadratureRule, analytic_chebyshev_derivative
from .tables import read_table, render_table, write_table

__all__ = [
    "NodeRecord",
    "InversionReport",
    "derivative_rule_invert",
    "histogram_invert",
    "fit_convergence",
    "ANALYTIC",
]

ANALYTIC = "analytic"


@dataclass(frozen=True)
class NodeRecord:
    k: int
    x: object
    rho_exact: Optional[object]
    rho_approx: object
    err_abs: Optional[object] = None
    err_rel: Optional[object] = None
    err_weighted: Optional[object] = None


def _record(k, x, exact, approx):
    if exact is None:
        return NodeRecord(k, x, None, approx)
    err = abs(exact - approx)
    rel = err / exact if exact > 0 else None
    return NodeRecord(k, x, exact, approx, err, rel, err * exact)


@dataclass(frozen=True)
class InversionReport:
    method: str  # "derivative_rule" or "histogram"
    system: OPSystem
    N: int
    interp: str  # human-readable scheme summary
    records: tuple
    ctx: PrecisionContext
    excluded_count: int = 0
    excluded_weight: object = 0
    alpha: Optional[float] = None
    power: Optional[float] = None

    def nearest_zero(self) -> NodeRecord:
        """Record at the node closest to x = 0 (lowest k on ties)."""
        return min(self.records, key=lambda r: (abs(r.x), r.k))

    @property
    def central_error(self):
        return self.nearest_zero().err_abs

    def max_error(self, interior: float = 0.0):
        """Largest err_abs over records with interior <= (k-1)/(N-1) <= 1 - interior."""
        sel = [r.err_abs for r in self.records
               if r.err_abs is not None and interior <= (r.k - 1) / max(self.N - 1, 1) <= 1 - interior]
        return max(sel) if sel else None

    HEADER = ("k", "x", "rho_exact", "rho_approx", "err_abs", "err_rel", "err_weighted")

    def meta(self) -> dict:
        info = {"method": self.method, "system": self.system.spec, "N": self.N,
                "interp": self.interp, "digits": self.ctx.digits, "guard": self.ctx.guard,
                "excluded_count": self.excluded_count,
                "excluded_weight": _fmt(self.excluded_weight, self.ctx.digits)}
        if self.alpha is not None:
            info["alpha"] = f"{self.alpha:.6g}"
        if self.power is not None:
            info["p"] = f"{self.power:.6g}"
        return info

    def to_csv(self, path=None, meta: bool = True) -> str:
        rows = [(r.k, r.x, r.rho_exact, r.rho_approx, r.err_abs, r.err_rel, r.err_weighted)
                for r in self.records]
        info = self.meta() if meta else None
        if path is None:
            return render_table(self.HEADER, rows, self.ctx.digits, info)
        return write_table(path, self.HEADER, rows, self.ctx.digits, info)

    @classmethod
    def from_csv(cls, source, system: Optional[OPSystem] = None,
                 ctx: Optional[PrecisionContext] = None) -> "InversionReport":
        meta, header, rows = read_table(source)
        if tuple(header) != cls.HEADER:
            raise ValueError(f"unexpected header {header}")
        ctx = ctx or PrecisionContext(int(meta.get("digits", 50)), int(meta.get("guard", 10)))
        system = system or parse_system(meta["system"])
        num = lambda s: ctx.num(s) if s else None
        records = tuple(NodeRecord(int(r[0]), *(num(v) for v in r[1:])) for r in rows)
        return cls(meta.get("method", "derivative_rule"), system, int(meta.get("N", len(rows))),
                   meta.get("interp", ""), records, ctx,
                   int(meta.get("excluded_count", 0)), num(meta.get("excluded_weight", "")) or 0,
                   float(meta["alpha"]) if "alpha" in meta else None,
                   float(meta["p"]) if "p" in meta else None)


def _fmt(x, digits):
    from .numerics import format_number
    return format_number(x, digits) if x else "0"


def _exact(sys, x, ctx):
    try:
        return weight(sys, x, ctx)
    except (NoClosedForm, OutOfSupport):
        return None


def _describe(scheme) -> str:
    if scheme == ANALYTIC:
        return ANALYTIC
    return f"{scheme.kind} order={scheme.order} boundary={scheme.boundary_policy}"


def derivative_rule_invert(rule: QuadratureRule,
                           scheme: Union[InterpolationScheme, str] = InterpolationScheme(),
                           indices: Optional[Iterable[int]] = None) -> InversionReport:
    """rho_approx[k] = w[k] / x'[k].

    ``scheme`` may be the string ``"analytic"`` for closed-form Chebyshev rules,
    in which case the exact node derivative replaces interpolation.  Nodes
    outside the support (attractive Coulomb-Pollaczek bound states) are left
    out of the interpolation and reported only as (count, weight sum).
    ``indices`` restricts evaluation to a subset of 1-based node numbers.
    """
    ctx = rule.ctx
    mp = ctx.mp
    keep = rule.in_support
    excluded = [i for i in range(rule.n) if i not in set(keep)]
    ex_weight = mp.fsum(rule.weights[i] for i in excluded)
    # index shifts leave dx/dk unchanged, so renumber the kept nodes 1..n'
    xs = [rule.nodes[i] for i in keep]
    wanted = list(range(1, len(keep) + 1))
    if indices is not None:
        pos = {i + 1: j + 1 for j, i in enumerate(keep)}
        wanted = [pos[k] for k in indices if k in pos]
    if scheme == ANALYTIC:
        kind = rule.system.kind
        if kind is None:
            raise ValueError("analytic derivatives exist only for Chebyshev systems")
        xp = [analytic_chebyshev_derivative(kind, rule.n, keep[j - 1] + 1, ctx) for j in wanted]
    else:
        xp = derivative_at(xs, scheme, wanted, ctx)
    records = []
    for j, d in zip(wanted, xp):
        i = keep[j - 1]
        if not d > 0:
            raise ZeroDerivative(f"x'[{i + 1}] = {mp.nstr(d, 6)} is not positive")
        x = rule.nodes[i]
        records.append(_record(i + 1, x, _exact(rule.system, x, ctx), rule.weights[i] / d))
    return InversionReport("derivative_rule", rule.system, rule.n, _describe(scheme),
                           tuple(records), ctx, len(excluded), ex_weight)


def histogram_invert(rule: QuadratureRule, interp_order: int = 10,
                     indices: Optional[Iterable[int]] = None) -> InversionReport:
    """Differentiate the cumulative weight sums interpolated at node midpoints.

    The step function mu_n equals S_i = w[1] + ... + w[i] on [x[i], x[i+1]);
    its value is attached to the midpoint (x[i] + x[i+1]) / 2, finite support
    endpoints carry 0 and the total mass, and a local polynomial of
    ``interp_order`` points through these data is differentiated at each x[k].
    """
    if rule.n < 4:
        raise ValueError(f"histogram inversion needs n >= 4, got {rule.n}")
    ctx = rule.ctx
    mp = ctx.mp
    xs, ws = rule.nodes, rule.weights
    sums, s = [], mp.zero
    for w in ws:
        s += w
        sums.append(s)
    abscissae = [(xs[i] + xs[i + 1]) / 2 for i in range(rule.n - 1)]
    values = sums[:-1]
    sup = rule.system.support
    if sup.lower is not None:
        abscissae.insert(0, ctx.num(sup.lower))
        values.insert(0, mp.zero)
    if sup.upper is not None:
        abscissae.append(ctx.num(sup.upper))
        values.append(sums[-1])
    wanted = list(indices) if indices is not None else list(range(1, rule.n + 1))
    derivs = local_derivative(abscissae, values, interp_order, [xs[k - 1] for k in wanted])
    records = tuple(
        _record(k, xs[k - 1], _exact(rule.system, xs[k - 1], ctx), d) for k, d in zip(wanted, derivs)
    )
    return InversionReport("histogram", rule.system, rule.n, f"midpoint polynomial order={interp_order}",
                           records, ctx)


def fit_convergence(errors: Sequence, law: str = "exp_alpha") -> float:
    """Fit err ~ 10^(-N/alpha) (``exp_alpha``) or err ~ C N^(-p) (``power_p``).

    The exponential law is fitted through the origin, so alpha is the
    least-squares solution of log10(err) = -N/alpha; the power law is a
    straight-line fit of log10(err) against log10(N) with free intercept.
    """
    pts = sorted((int(n), float(e)) for n, e in errors)
    if len(pts) < 3:
        raise DegenerateFit("need at least 3 points")
    if any(not e > 0 for _, e in pts):
        raise DegenerateFit("errors must be positive")
    if all(pts[i + 1][1] >= pts[i][1] for i in range(len(pts) - 1)):
        raise DegenerateFit("errors do not decrease with N")
    logs = [math.log10(e) for _, e in pts]
    if law == "exp_alpha":
        num = sum(n * n for n, _ in pts)
        den = -sum(n * y for (n, _), y in zip(pts, logs))
        if den <= 0:
            raise DegenerateFit("no exponential decay")
        return num / den
    if law == "power_p":
        lx = [math.log10(n) for n, _ in pts]
        mx, my = sum(lx) / len(lx), sum(logs) / len(logs)
        sxx = sum((a - mx) ** 2 for a in lx)
        if sxx == 0:
            raise DegenerateFit("all N equal")
        p = -sum((a - mx) * (b - my) for a, b in zip(lx, logs)) / sxx
        if p <= 0:
            raise DegenerateFit("no power-law decay")
        return p
    raise ValueError(f"unknown law {law!r}")
