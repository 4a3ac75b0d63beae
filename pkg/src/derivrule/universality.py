"""Large-n diagnostics: zero spacings, node derivatives and weight ratios
compared against the universal curve (pi/n) sqrt(1 - x^2)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import NoClosedForm, OutOfSupport
from .interpolation import InterpolationScheme, derivative_at
from .quadrature import QuadratureRule, analytic_chebyshev_derivative
from .opsystems import weight
from .tables import render_table, write_table

__all__ = [
    "ProbeRecord",
    "UniversalityProbe",
    "clock_probe",
    "weight_ratio_probe",
    "WeightRatioResult",
    "pollaczek_missing_mass",
    "interior",
    "INTERIOR_CUT",
]

INTERIOR_CUT = 0.05


def interior(k: int, n: int, cut: float = INTERIOR_CUT) -> bool:
    """cut <= k/n <= 1 - cut."""
    return cut <= k / n <= 1 - cut


@dataclass(frozen=True)
class ProbeRecord:
    k: int
    x: object
    delta: Optional[object]          # x[k] - x[k-1]; None at k = 1
    xprime: object                   # x'[k]
    ratio_backward: Optional[object]  # delta / x'[k]
    ratio_central: Optional[object]   # delta / x'[k - 1/2]
    wratio: Optional[object]          # w[k] / rho(x[k])
    universal: Optional[object]       # (pi/n) sqrt(1 - x^2), None outside [-1, 1]


@dataclass(frozen=True)
class UniversalityProbe:
    system: object
    n: int
    records: tuple
    in_theory: bool  # system belongs to the Nevai-Blumenthal class
    ctx: object

    HEADER = ("k", "x", "delta", "xprime", "ratio_backward", "ratio_central", "wratio", "universal")

    def interior_records(self, cut: float = INTERIOR_CUT) -> list:
        return [r for r in self.records if interior(r.k, self.n, cut)]

    def max_central_deviation(self, cut: float = INTERIOR_CUT):
        """max over interior k of |delta / x'[k - 1/2] - 1|."""
        return max(abs(r.ratio_central - 1) for r in self.interior_records(cut) if r.ratio_central is not None)

    def max_backward_deviation(self, cut: float = INTERIOR_CUT):
        return max(abs(r.ratio_backward - 1) for r in self.interior_records(cut) if r.ratio_backward is not None)

    def to_csv(self, path=None, meta: bool = True) -> str:
        rows = [(r.k, r.x, r.delta, r.xprime, r.ratio_backward, r.ratio_central, r.wratio, r.universal)
                for r in self.records]
        info = {"system": self.system.spec, "n": self.n, "digits": self.ctx.digits,
                "in_theory": self.in_theory} if meta else None
        if path is None:
            return render_table(self.HEADER, rows, self.ctx.digits, info)
        return write_table(path, self.HEADER, rows, self.ctx.digits, info)


def _node_derivatives(rule, scheme, points):
    ctx = rule.ctx
    if scheme == "analytic":
        kind = rule.system.kind
        if kind is None:
            raise ValueError("analytic derivatives exist only for Chebyshev systems")
        return [analytic_chebyshev_derivative(kind, rule.n, t, ctx) for t in points]
    return derivative_at(rule.nodes, scheme, points, ctx)


def _wratio(rule, k):
    try:
        return rule.weights[k - 1] / weight(rule.system, rule.nodes[k - 1], rule.ctx)
    except (NoClosedForm, OutOfSupport):
        return None


def clock_probe(rule: QuadratureRule,
                scheme: Union[InterpolationScheme, str] = InterpolationScheme()) -> UniversalityProbe:
    """Spacings, node derivatives and their ratios for every k.

    ``scheme="analytic"`` uses the closed-form Chebyshev node derivatives.
    Systems outside the Nevai-Blumenthal class are allowed and flagged.
    """
    if rule.n < 10:
        raise ValueError(f"clock probe needs n >= 10, got {rule.n}")
    ctx = rule.ctx
    mp = ctx.mp
    n = rule.n
    xp = _node_derivatives(rule, scheme, range(1, n + 1))
    half = _node_derivatives(rule, scheme, [k - mp.mpf(1) / 2 for k in range(2, n + 1)])
    records = []
    for k in range(1, n + 1):
        x = rule.nodes[k - 1]
        delta = x - rule.nodes[k - 2] if k > 1 else None
        universal = mp.pi / n * mp.sqrt(1 - x * x) if abs(x) < 1 else None
        records.append(ProbeRecord(
            k, x, delta, xp[k - 1],
            delta / xp[k - 1] if delta is not None else None,
            delta / half[k - 2] if delta is not None else None,
            _wratio(rule, k), universal,
        ))
    return UniversalityProbe(rule.system, n, tuple(records), rule.system.nevai_blumenthal, ctx)


@dataclass(frozen=True)
class WeightRatioResult:
    curves: dict        # system spec -> tuple of (k, x, wratio, universal)
    deviation: dict     # system spec -> max interior |wratio/universal - 1|
    cross_deviation: object  # max over system pairs and interior x of the normalised-ratio gap


def weight_ratio_probe(rules: Sequence[QuadratureRule], cut: float = INTERIOR_CUT) -> WeightRatioResult:
    """Compare w[k]/rho(x[k]) with (pi/n) sqrt(1 - x[k]^2) for each rule.

    The cross-system figure compares the normalised ratios
    wratio/universal of two systems at the same x, reading the second curve
    by linear interpolation between its nodes.
    """
    if not rules:
        raise ValueError("no rules given")
    n = rules[0].n
    if any(r.n != n for r in rules):
        raise ValueError("all rules must have the same n")
    curves, deviation, normalised = {}, {}, {}
    for rule in rules:
        if not rule.system.has_closed_form_weight:
            raise NoClosedForm(rule.system.spec)
        mp = rule.ctx.mp
        pts = []
        for k in range(1, n + 1):
            x = rule.nodes[k - 1]
            if not -1 < x < 1:
                continue
            wr = _wratio(rule, k)
            if wr is None:
                continue
            pts.append((k, x, wr, mp.pi / n * mp.sqrt(1 - x * x)))
        key = rule.system.spec
        curves[key] = tuple(pts)
        inner = [(x, wr / u) for k, x, wr, u in pts if interior(k, n, cut)]
        deviation[key] = max(abs(q - 1) for _, q in inner)
        normalised[key] = inner
    cross = 0
    keys = list(normalised)
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            cross = max(cross, _gap(normalised[a], normalised[b]))
    return WeightRatioResult(curves, deviation, cross)


def _gap(pa, pb):
    import bisect

    xb = [float(x) for x, _ in pb]
    worst = 0
    for x, q in pa:
        j = bisect.bisect_left(xb, float(x))
        if j == 0 or j == len(pb):
            continue
        (x0, q0), (x1, q1) = pb[j - 1], pb[j]
        qb = q0 + (q1 - q0) * (x - x0) / (x1 - x0)
        worst = max(worst, abs(q - qb))
    return worst


def pollaczek_missing_mass(rule: QuadratureRule):
    """(sum of weights at nodes below -1, number of such nodes)."""
    mp = rule.ctx.mp
    below = [w for x, w in zip(rule.nodes, rule.weights) if x < -1]
    return mp.fsum(below), len(below)
