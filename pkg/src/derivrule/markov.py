"""Finite-n approximants to the Stieltjes transform F(z) = int dmu(x) / (z - x)."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DivisionNearZero, PoleHit
from .numerics import PrecisionContext
from .opsystems import OPSystem, jacobi_matrix
from .quadrature import QuadratureRule
from .tables import render_table, write_table

__all__ = ["ResolventApproximant", "pole_sum", "continued_fraction", "resolvent_table"]


@dataclass(frozen=True)
class ResolventApproximant:
    """F_n(z) = sum_k w[k] / (z - x[k]) with the poles and residues of a Gauss rule."""

    rule: QuadratureRule

    def __call__(self, z):
        return pole_sum(self, z)


def _as_rule(appr):
    return appr.rule if isinstance(appr, ResolventApproximant) else appr


def pole_sum(appr, z):
    rule = _as_rule(appr)
    ctx = rule.ctx
    mp = ctx.mp
    z = mp.mpc(z)
    tol = ctx.tolerance * max(1, abs(z))
    total = mp.mpc(0)
    for k, (x, w) in enumerate(zip(rule.nodes, rule.weights), start=1):
        d = z - x
        if abs(d) <= tol:
            raise PoleHit(f"z is within {mp.nstr(tol, 3)} of the pole x[{k}]")
        total += w / d
    return total


def continued_fraction(sys: OPSystem, n: int, z, ctx: PrecisionContext):
    """n-th convergent mu0 / (z - b_1 - a_1^2 / (z - b_2 - ... a_{n-1}^2 / (z - b_n))).

    Evaluated from the bottom up.  Raises DivisionNearZero when a partial
    denominator falls below working precision, which means z sits on (or
    numerically at) a pole of some tail convergent.
    """
    mp = ctx.mp
    z = mp.mpc(z)
    J = jacobi_matrix(sys, n, ctx)
    tol = ctx.tolerance * max(1, abs(z))
    d = z - J.diag[-1]
    for j in range(n - 2, -1, -1):
        if abs(d) <= tol:
            raise DivisionNearZero(f"partial denominator {j + 2} vanished")
        a = J.offdiag[j]
        d = z - J.diag[j] - a * a / d
    if abs(d) <= tol:
        raise DivisionNearZero("leading denominator vanished")
    return sys.mu0(ctx) / d


RESOLVENT_HEADER = ("re_z", "im_z", "re_F", "im_F")


def resolvent_table(rule: QuadratureRule, zs, path=None, meta: bool = True) -> str:
    rows = []
    for z in zs:
        F = pole_sum(rule, z)
        z = rule.ctx.mp.mpc(z)
        rows.append((z.real, z.imag, F.real, F.imag))
    info = {"system": rule.system.spec, "n": rule.n, "digits": rule.ctx.digits} if meta else None
    if path is None:
        return render_table(RESOLVENT_HEADER, rows, rule.ctx.digits, info)
    return write_table(path, RESOLVENT_HEADER, rows, rule.ctx.digits, info)
