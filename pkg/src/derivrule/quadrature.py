"""Gauss quadrature rules from Jacobi matrices or Chebyshev closed forms."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

from .errors import EvaluationFailure, OutOfSupport
from .numerics import PrecisionContext, eigen_tridiagonal
from .opsystems import OPSystem, chebyshev, jacobi_matrix, parse_system, weight
from .tables import read_table, render_table, write_table

__all__ = [
    "QuadratureRule",
    "gauss_rule",
    "analytic_chebyshev_rule",
    "analytic_chebyshev_node",
    "analytic_chebyshev_derivative",
    "analytic_chebyshev_weight",
    "integrate",
    "equivalent_weights",
    "rule_to_csv",
    "rule_from_csv",
]


@dataclass(frozen=True)
class QuadratureRule:
    """n ascending nodes with positive weights for ``system``.

    ``source`` is ``"jacobi"`` or ``"analytic"``.  Attractive Coulomb-Pollaczek
    rules keep their nodes below -1; ``below_support`` counts them.
    """

    system: OPSystem
    n: int
    nodes: tuple
    weights: tuple
    ctx: PrecisionContext
    source: str = "jacobi"

    @property
    def below_support(self) -> int:
        lo = self.system.support.lower
        if lo is None:
            return 0
        return sum(1 for x in self.nodes if x < lo)

    @property
    def in_support(self) -> list:
        """Indices (0-based) of nodes strictly inside the support."""
        sup = self.system.support
        return [i for i, x in enumerate(self.nodes) if sup.contains_strictly(x)]


@lru_cache(maxsize=256)
def gauss_rule(sys: OPSystem, n: int, ctx: PrecisionContext) -> QuadratureRule:
    """Nodes = eigenvalues of J_n, weights = mu0 * (first eigenvector component)^2."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    dec = eigen_tridiagonal(jacobi_matrix(sys, n, ctx), ctx)
    mu0 = sys.mu0(ctx)
    weights = tuple(mu0 * v * v for v in dec.first_components)
    return QuadratureRule(sys, n, dec.values, weights, ctx, "jacobi")


def _check_kind(kind):
    if kind not in (1, 2, 3, 4):
        raise ValueError(f"Chebyshev kind must be 1..4, got {kind}")


def _angle(kind, n, k, mp):
    """x[k] = -cos(angle); k may be fractional."""
    if kind == 1:
        return (2 * k - 1) * mp.pi / (2 * n)
    if kind == 2:
        return k * mp.pi / (n + 1)
    if kind == 3:
        return (2 * k - 1) * mp.pi / (2 * n + 1)
    return 2 * k * mp.pi / (2 * n + 1)


def _angle_rate(kind, n, mp):
    return {1: mp.pi / n, 2: mp.pi / (n + 1)}.get(kind) or 2 * mp.pi / (2 * n + 1)


def analytic_chebyshev_node(kind: int, n: int, k, ctx: PrecisionContext):
    _check_kind(kind)
    mp = ctx.mp
    return -mp.cos(_angle(kind, n, ctx.num(k), mp))


def analytic_chebyshev_derivative(kind: int, n: int, k, ctx: PrecisionContext):
    """dx[k]/dk of the closed-form node map, at integer or fractional k."""
    _check_kind(kind)
    mp = ctx.mp
    return _angle_rate(kind, n, mp) * mp.sin(_angle(kind, n, ctx.num(k), mp))


def analytic_chebyshev_weight(kind: int, n: int, k, ctx: PrecisionContext):
    _check_kind(kind)
    mp = ctx.mp
    k = ctx.num(k)
    if kind == 1:
        return mp.pi / n
    if kind == 2:
        return mp.pi / (n + 1) * mp.sin(k * mp.pi / (n + 1)) ** 2
    if kind == 3:
        return 4 * mp.pi / (2 * n + 1) * mp.sin((n - k + 1) * mp.pi / (2 * n + 1)) ** 2
    return 4 * mp.pi / (2 * n + 1) * mp.sin(k * mp.pi / (2 * n + 1)) ** 2


def analytic_chebyshev_rule(kind: int, n: int, ctx: PrecisionContext) -> QuadratureRule:
    """Closed-form Chebyshev rule; needs no eigensolve, so very large n is cheap."""
    _check_kind(kind)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    nodes = tuple(analytic_chebyshev_node(kind, n, k, ctx) for k in range(1, n + 1))
    weights = tuple(analytic_chebyshev_weight(kind, n, k, ctx) for k in range(1, n + 1))
    return QuadratureRule(chebyshev(kind), n, nodes, weights, ctx, "analytic")


def integrate(rule: QuadratureRule, g: Callable):
    """sum_k w[k] g(x[k])."""
    mp = rule.ctx.mp
    terms = []
    for k, (x, w) in enumerate(zip(rule.nodes, rule.weights), start=1):
        try:
            gx = g(x)
        except Exception as exc:
            raise EvaluationFailure(f"integrand failed at node k={k}, x={mp.nstr(x, 12)}: {exc}") from exc
        terms.append(w * gx)
    return mp.fsum(terms)


def equivalent_weights(rule: QuadratureRule, ctx: Optional[PrecisionContext] = None) -> tuple:
    """w[k] / rho(x[k]) for every node."""
    ctx = ctx or rule.ctx
    out = []
    for k, (x, w) in enumerate(zip(rule.nodes, rule.weights), start=1):
        try:
            out.append(w / weight(rule.system, x, ctx))
        except OutOfSupport as exc:
            raise OutOfSupport(f"node k={k}: {exc}") from exc
    return tuple(out)


RULE_HEADER = ("k", "x", "w")


def rule_to_csv(rule: QuadratureRule, path=None, meta: bool = True) -> str:
    """CSV text (also written to ``path`` if given) with header ``k,x,w``."""
    info = None
    if meta:
        info = {"system": rule.system.spec, "n": rule.n, "digits": rule.ctx.digits,
                "guard": rule.ctx.guard, "source": rule.source}
    rows = [(k, x, w) for k, (x, w) in enumerate(zip(rule.nodes, rule.weights), start=1)]
    if path is None:
        return render_table(RULE_HEADER, rows, rule.ctx.digits, info)
    return write_table(path, RULE_HEADER, rows, rule.ctx.digits, info)


def rule_from_csv(source, system: Optional[OPSystem] = None,
                  ctx: Optional[PrecisionContext] = None) -> QuadratureRule:
    meta, header, rows = read_table(source)
    if tuple(header) != RULE_HEADER:
        raise ValueError(f"expected header {','.join(RULE_HEADER)}, got {','.join(header)}")
    if system is None:
        system = parse_system(meta["system"])
    if ctx is None:
        digits = int(meta.get("digits", 50))
        ctx = PrecisionContext(max(digits, 16), int(meta.get("guard", 10)))
    nodes = tuple(ctx.num(r[1]) for r in rows)
    weights = tuple(ctx.num(r[2]) for r in rows)
    return QuadratureRule(system, len(rows), nodes, weights, ctx, meta.get("source", "jacobi"))
