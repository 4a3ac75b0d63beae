"""Catalog of orthogonal-polynomial systems.

Each system is described by its orthonormal three-term recurrence

    x p_{n-1}(x) = a_{n-1} p_{n-2}(x) + b_n p_{n-1}(x) + a_n p_n(x),

so the order-n Jacobi matrix has diagonal b_1..b_n and off-diagonal
a_1..a_{n-1}.  ``mu0`` is the total mass of the orthogonality measure, which
for the attractive Coulomb-Pollaczek case includes the discrete part below -1.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import FavardViolation, NoClosedForm, OutOfSupport, UnknownSystem
from .numerics import PrecisionContext, SymTridiagonal

__all__ = [
    "OPSystem",
    "RecurrencePair",
    "FavardResult",
    "Support",
    "chebyshev",
    "legendre",
    "gegenbauer",
    "hermite",
    "laguerre",
    "coulomb_pollaczek",
    "parse_system",
    "recurrence",
    "jacobi_matrix",
    "weight",
    "favard_check",
    "moment",
    "moment_by_quadrature",
]

_CHEB = ("Chebyshev1", "Chebyshev2", "Chebyshev3", "Chebyshev4")
_NAMES = _CHEB + ("Legendre", "Gegenbauer", "Hermite", "Laguerre", "CoulombPollaczek")


@dataclass(frozen=True)
class Support:
    lower: Optional[float]  # None means -infinity
    upper: Optional[float]  # None means +infinity
    lower_closed: bool
    upper_closed: bool

    def contains_strictly(self, x) -> bool:
        return (self.lower is None or x > self.lower) and (self.upper is None or x < self.upper)


@dataclass(frozen=True)
class OPSystem:
    """A named system.  Parameters are exact (int or Fraction) so systems hash and compare."""

    name: str
    l: Optional[int] = None
    alpha: Optional[Fraction] = None
    Z: Optional[Fraction] = None
    lam: Optional[Fraction] = None

    def __post_init__(self):
        if self.name not in _NAMES:
            raise UnknownSystem(f"unknown system {self.name!r}")

    @property
    def kind(self) -> Optional[int]:
        """Chebyshev kind 1..4, else None."""
        return _CHEB.index(self.name) + 1 if self.name in _CHEB else None

    @property
    def coupling(self) -> Fraction:
        """2Z/lambda for Coulomb-Pollaczek."""
        return 2 * self.Z / self.lam

    @property
    def support(self) -> Support:
        if self.name == "Hermite":
            return Support(None, None, False, False)
        if self.name == "Laguerre":
            return Support(0.0, None, self.alpha >= 0, False)
        # endpoint closed iff the weight stays finite there
        lo_closed, hi_closed = {
            "Chebyshev1": (False, False),
            "Chebyshev3": (False, True),
            "Chebyshev4": (True, False),
            "CoulombPollaczek": (False, False),
        }.get(self.name, (True, True))
        return Support(-1.0, 1.0, lo_closed, hi_closed)

    @property
    def has_closed_form_weight(self) -> bool:
        return True

    @property
    def nevai_blumenthal(self) -> bool:
        """True when a_n -> 1/2, b_n -> 0 (a.c. spectrum on [-1, 1])."""
        return self.name not in ("Hermite", "Laguerre")

    @property
    def even(self) -> bool:
        """Weight symmetric about 0, so b_n = 0 for all n."""
        if self.name == "CoulombPollaczek":
            return self.Z == 0
        return self.name in ("Chebyshev1", "Chebyshev2", "Legendre", "Gegenbauer", "Hermite")

    @property
    def attractive(self) -> bool:
        return self.name == "CoulombPollaczek" and self.Z < 0

    def mu0(self, ctx: PrecisionContext):
        mp = ctx.mp
        name = self.name
        if name in ("Chebyshev1", "Chebyshev3", "Chebyshev4"):
            return +mp.pi
        if name == "Chebyshev2":
            return mp.pi / 2
        if name == "Legendre":
            return mp.mpf(2)
        if name == "Gegenbauer":
            return mp.sqrt(mp.pi) * mp.gamma(self.l + mp.mpf(3) / 2) / mp.gamma(self.l + 2)
        if name == "Hermite":
            return mp.sqrt(mp.pi)
        if name == "Laguerre":
            return mp.gamma(ctx.num(self.alpha) + 1)
        return mp.mpf(1)

    @property
    def spec(self) -> str:
        """Round-trippable CLI spelling, e.g. ``cp:l=0,Z=-1,lambda=4``."""
        if self.kind:
            return f"cheb{self.kind}"
        if self.name == "Legendre":
            return "legendre"
        if self.name == "Hermite":
            return "hermite"
        if self.name == "Gegenbauer":
            return f"gegenbauer:l={self.l}"
        if self.name == "Laguerre":
            return f"laguerre:alpha={self.alpha}"
        return f"cp:l={self.l},Z={self.Z},lambda={self.lam}"

    def __str__(self):
        return self.spec


@dataclass(frozen=True)
class RecurrencePair:
    n: int
    a: object
    b: object


@dataclass(frozen=True)
class FavardResult:
    passed: bool
    diagnostic: str

    def __bool__(self):
        return self.passed


def _rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


def chebyshev(kind: int) -> OPSystem:
    if kind not in (1, 2, 3, 4):
        raise UnknownSystem(f"Chebyshev kind must be 1..4, got {kind}")
    return OPSystem(_CHEB[kind - 1])


def legendre() -> OPSystem:
    return OPSystem("Legendre")


def gegenbauer(l: int) -> OPSystem:
    """Weight (1 - x^2)^(l + 1/2) on [-1, 1]."""
    return OPSystem("Gegenbauer", l=int(l))


def hermite() -> OPSystem:
    return OPSystem("Hermite")


def laguerre(alpha=0) -> OPSystem:
    return OPSystem("Laguerre", alpha=_rat(alpha))


def coulomb_pollaczek(l: int, Z, lam) -> OPSystem:
    return OPSystem("CoulombPollaczek", l=int(l), Z=_rat(Z), lam=_rat(lam))


_SIMPLE = {
    "cheb1": lambda: chebyshev(1),
    "cheb2": lambda: chebyshev(2),
    "cheb3": lambda: chebyshev(3),
    "cheb4": lambda: chebyshev(4),
    "legendre": legendre,
    "hermite": hermite,
}
_RAT = r"[+-]?\d+(?:/\d+)?"


def parse_system(text: str) -> OPSystem:
    """Parse the CLI system vocabulary; raises UnknownSystem on anything else."""
    s = text.strip()
    if s in _SIMPLE:
        return _SIMPLE[s]()
    m = re.fullmatch(r"gegenbauer:l=(\d+)", s)
    if m:
        return gegenbauer(int(m.group(1)))
    m = re.fullmatch(rf"laguerre:alpha=({_RAT})", s)
    if m:
        return laguerre(Fraction(m.group(1)))
    m = re.fullmatch(rf"cp:l=(\d+),Z=({_RAT}),lambda=({_RAT})", s)
    if m:
        try:
            return coulomb_pollaczek(int(m.group(1)), Fraction(m.group(2)), Fraction(m.group(3)))
        except ZeroDivisionError:
            pass
    raise UnknownSystem(
        f"unknown system {text!r}; expected cheb1|cheb2|cheb3|cheb4|legendre|"
        "gegenbauer:l=<int>|hermite|laguerre:alpha=<rat>|cp:l=<int>,Z=<rat>,lambda=<rat>"
    )


def favard_check(sys: OPSystem) -> FavardResult:
    """Whether every a_n is real and positive; diagnostic names the binding constraint."""
    if sys.name == "Gegenbauer":
        if sys.l < 0:
            return FavardResult(False, f"Gegenbauer needs l >= 0, got l={sys.l}")
        return FavardResult(True, "ok")
    if sys.name == "Laguerre":
        if sys.alpha <= -1:
            return FavardResult(False, f"Laguerre needs alpha > -1, got alpha={sys.alpha}")
        return FavardResult(True, "ok")
    if sys.name == "CoulombPollaczek":
        l, Z, lam = sys.l, sys.Z, sys.lam
        if l < 0:
            return FavardResult(False, f"need l >= 0, got l={l}")
        if lam <= 0:
            return FavardResult(False, f"need lambda > 0, got lambda={lam}")
        bound = -2 * Z / (l + 1)
        if l + 1 + 2 * Z / lam > 0:
            return FavardResult(True, f"ok: n + l + 2Z/lambda > 0 for all n >= 1 (lambda > {bound})")
        return FavardResult(
            False, f"n + l + 2Z/lambda <= 0 at n=1: requires lambda > {bound}, got lambda={lam}"
        )
    return FavardResult(True, "ok")


def _require_favard(sys):
    res = favard_check(sys)
    if not res:
        raise FavardViolation(f"{sys.spec}: {res.diagnostic}")


def _coefficients(sys: OPSystem, n: int, ctx: PrecisionContext):
    """(a_n, b_n) for a single index n >= 1."""
    mp = ctx.mp
    name = sys.name
    if name in _CHEB:
        a = mp.sqrt(mp.mpf(2)) / 2 if (name == "Chebyshev1" and n == 1) else mp.mpf(1) / 2
        b = mp.zero
        if n == 1 and name == "Chebyshev3":
            b = -mp.mpf(1) / 2
        elif n == 1 and name == "Chebyshev4":
            b = mp.mpf(1) / 2
        return a, b
    if name == "Legendre":
        return n / mp.sqrt(mp.mpf(4 * n * n - 1)), mp.zero
    if name == "Gegenbauer":
        l = sys.l
        return mp.sqrt(mp.mpf(n * (n + 2 * l + 1)) / (4 * (n + l + 1) * (n + l))), mp.zero
    if name == "Hermite":
        return mp.sqrt(mp.mpf(n) / 2), mp.zero
    if name == "Laguerre":
        al = ctx.num(sys.alpha)
        return mp.sqrt(n * (n + al)), 2 * n - 1 + al
    c = sys.coupling
    l = sys.l
    a2 = Fraction(n * (n + 2 * l + 1)) / ((n + l + 1 + c) * (n + l + c))
    return mp.sqrt(ctx.num(a2)) / 2, ctx.num(c / (n + l + c))


def recurrence(sys: OPSystem, n: int, ctx: PrecisionContext) -> RecurrencePair:
    if n < 1:
        raise ValueError(f"recurrence index must be >= 1, got {n}")
    _require_favard(sys)
    a, b = _coefficients(sys, n, ctx)
    return RecurrencePair(n, a, b)


def jacobi_matrix(sys: OPSystem, n: int, ctx: PrecisionContext) -> SymTridiagonal:
    _require_favard(sys)
    coeffs = [_coefficients(sys, i, ctx) for i in range(1, n + 1)]
    return SymTridiagonal([b for _, b in coeffs], [a for a, _ in coeffs[:-1]])


def weight(sys: OPSystem, x, ctx: PrecisionContext):
    """Closed-form weight rho(x); x must lie strictly inside the support."""
    mp = ctx.mp
    x = ctx.num(x)
    if not sys.has_closed_form_weight:
        raise NoClosedForm(sys.spec)
    if not sys.support.contains_strictly(x):
        raise OutOfSupport(f"{sys.spec}: x = {mp.nstr(x, 10)} is not inside the support")
    name = sys.name
    if name == "Chebyshev1":
        return 1 / mp.sqrt(1 - x * x)
    if name == "Chebyshev2":
        return mp.sqrt(1 - x * x)
    if name == "Chebyshev3":
        return mp.sqrt((1 - x) / (1 + x))
    if name == "Chebyshev4":
        return mp.sqrt((1 + x) / (1 - x))
    if name == "Legendre":
        return mp.mpf(1)
    if name == "Gegenbauer":
        return (1 - x * x) ** (sys.l + mp.mpf(1) / 2)
    if name == "Hermite":
        return mp.exp(-x * x)
    if name == "Laguerre":
        return x ** ctx.num(sys.alpha) * mp.exp(-x)
    return _pollaczek_weight(sys, x, ctx)


def _pollaczek_weight(sys, x, ctx):
    mp = ctx.mp
    l = sys.l
    lam = ctx.num(sys.lam)
    theta = mp.acos(x)
    kappa = mp.sqrt(lam * lam * (1 + x) / (4 * (1 - x)))
    gamma = ctx.num(sys.Z) / kappa
    c = ctx.num(sys.coupling)
    g2 = abs(mp.gamma(mp.mpc(l + 1, gamma))) ** 2
    return (
        mp.mpf(2) ** (2 * l + 1) / mp.pi
        * mp.exp(-(2 * theta - mp.pi) * gamma)
        * (1 - x * x) ** (l + mp.mpf(1) / 2)
        * g2 * (l + 1 + c) / mp.factorial(2 * l + 1)
    )


def _jacobi_exponents(sys):
    half = Fraction(1, 2)
    return {
        "Chebyshev1": (-half, -half),
        "Chebyshev2": (half, half),
        "Chebyshev3": (half, -half),
        "Chebyshev4": (-half, half),
        "Legendre": (Fraction(0), Fraction(0)),
    }.get(sys.name) or ((sys.l + half, sys.l + half) if sys.name == "Gegenbauer" else None)


def moment(sys: OPSystem, j: int, ctx: PrecisionContext):
    """Exact power moment  int x^j dmu  from closed forms.

    Jacobi-type weights (1-x)^a (1+x)^b use the finite Beta-function sum obtained
    from x = 2t - 1; Hermite and Laguerre use Gamma values.  Attractive
    Coulomb-Pollaczek measures have no closed form for their discrete part; use
    the recurrence instead (``mu0 * (J^j)_{11}``).
    """
    mp = ctx.mp
    if sys.name == "Hermite":
        return mp.zero if j % 2 else mp.gamma(mp.mpf(j + 1) / 2)
    if sys.name == "Laguerre":
        return mp.gamma(j + ctx.num(sys.alpha) + 1)
    ab = _jacobi_exponents(sys)
    if ab is None:
        raise NoClosedForm(f"{sys.spec}: no closed-form moments")
    a, b = ab
    work = ctx.with_extra(j // 2 + 5).mp
    A = work.mpf(a.numerator) / a.denominator
    B = work.mpf(b.numerator) / b.denominator
    total = work.fsum(
        work.binomial(j, i) * work.mpf(2) ** i * (-1) ** (j - i) * work.beta(i + B + 1, A + 1)
        for i in range(j + 1)
    )
    return ctx.num(work.mpf(2) ** (A + B + 1) * total)


def moment_by_quadrature(sys: OPSystem, j: int, ctx: PrecisionContext):
    """int x^j rho(x) dx over the a.c. support by adaptive tanh-sinh quadrature."""
    mp = ctx.mp
    f = lambda x: x ** j * weight(sys, x, ctx)
    if sys.name == "Hermite":
        return mp.quad(f, [-mp.inf, 0, mp.inf])
    if sys.name == "Laguerre":
        return mp.quad(f, [0, 1, mp.inf])
    return mp.quad(f, [-1, 0, 1])
