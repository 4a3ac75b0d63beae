"""Differentiate the node map k -> x[k] by local interpolation.

Polynomial windows use the Newton divided-difference form, differentiated
analytically with a Horner-type recurrence.  Near the ends of the index range
a Thiele (continued-fraction) interpolant through the same window is available
as an alternative; it usually follows square-root endpoint behaviour much
better than a polynomial does.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import NonMonotoneSamples, PoleInWindow, WindowTooSmall
from .numerics import PrecisionContext

__all__ = [
    "InterpolationScheme",
    "SHRINK",
    "THIELE",
    "derivative_at",
    "thiele_derivative",
    "newton_derivative",
    "local_derivative",
    "nearest_window",
]

SHRINK = "shrink_window"
THIELE = "thiele_fallback"


@dataclass(frozen=True)
class InterpolationScheme:
    """Window configuration.

    order: number of consecutive samples per window (degree order-1 for polynomials).
    boundary_policy: ``shrink_window`` keeps the order and shifts the window
        inward near the ends; ``thiele_fallback`` switches shifted windows to a
        Thiele interpolant over the same samples.
    kind: ``polynomial`` everywhere, or ``thiele`` everywhere (polynomial only
        where a reciprocal difference vanishes).
    """

    order: int = 10
    boundary_policy: str = SHRINK
    half_integer_support: bool = True
    kind: str = "polynomial"

    def __post_init__(self):
        if self.order < 2:
            raise WindowTooSmall(f"interpolation order must be >= 2, got {self.order}")
        if self.boundary_policy not in (SHRINK, THIELE):
            raise ValueError(f"unknown boundary policy {self.boundary_policy!r}")
        if self.kind not in ("polynomial", "thiele"):
            raise ValueError(f"unknown interpolant kind {self.kind!r}")


def nearest_window(t, n: int, m: int) -> tuple[int, bool]:
    """First index (1-based) of the m consecutive indices in [1, n] nearest to t.

    Ties go toward the centre of [1, n].  The flag reports whether the window
    had to be shifted to stay in range.
    """
    m = min(m, n)
    centre = (n + 1) / 2
    t = float(t)
    # a run [s, s+m-1] is nearest t when its midpoint s + (m-1)/2 is closest to t
    ideal = t - (m - 1) / 2
    lo, hi = math.floor(ideal), math.ceil(ideal)
    if lo == hi:
        start = lo
    else:
        dlo, dhi = abs(ideal - lo), abs(ideal - hi)
        if abs(dlo - dhi) < 1e-12:
            # shift toward the centre of the whole range
            start = hi if t < centre else lo
        else:
            start = lo if dlo < dhi else hi
    clamped = min(max(start, 1), n - m + 1)
    return clamped, clamped != start


def _divided_differences(xs, ys):
    c = list(ys)
    m = len(xs)
    for j in range(1, m):
        for i in range(m - 1, j - 1, -1):
            c[i] = (c[i] - c[i - 1]) / (xs[i] - xs[i - j])
    return c


def newton_derivative(xs: Sequence, ys: Sequence, t, coeffs: Optional[list] = None):
    """Value and first derivative at t of the polynomial through (xs, ys).

    ``coeffs`` may carry precomputed divided differences for the same data.
    """
    c = coeffs if coeffs is not None else _divided_differences(xs, ys)
    p = c[-1]
    dp = p * 0
    for j in range(len(xs) - 2, -1, -1):
        dt = t - xs[j]
        dp = dp * dt + p
        p = p * dt + c[j]
    return p, dp


def thiele_derivative(samples: Sequence, point, ctx: Optional[PrecisionContext] = None):
    """Derivative at ``point`` of the Thiele interpolant through ``samples``.

    ``samples`` is a sequence of (k, x) pairs; ``point`` lies inside their range.
    Inverse differences build the continued fraction
    x(t) = a0 + (t - k0)/(a1 + (t - k1)/(a2 + ...)), which is then differentiated
    from the bottom up.  Raises PoleInWindow if an inverse difference divides
    by zero before the fraction terminates.
    """
    if len(samples) < 4:
        raise WindowTooSmall(f"Thiele interpolation needs >= 4 samples, got {len(samples)}")
    ctx = ctx or PrecisionContext()
    mp = ctx.mp
    ks = [ctx.num(k) for k, _ in samples]
    phi = [ctx.num(x) for _, x in samples]
    t = ctx.num(point)
    if not min(ks) <= t <= max(ks):
        raise ValueError("point outside the sample range")
    eps = mp.mpf(10) ** (-ctx.digits)
    coeffs = [phi[0]]
    m = len(ks)
    for j in range(1, m):
        prev = coeffs[-1]
        diffs = [phi[i] - prev for i in range(j, m)]
        scale = max(abs(prev), max(abs(phi[i]) for i in range(j, m)))
        tiny = [abs(d) <= eps * scale for d in diffs]
        if all(tiny):
            break  # interpolant is exactly a shorter continued fraction
        if any(tiny):
            raise PoleInWindow(f"inverse difference of order {j} vanished")
        for i, d in zip(range(j, m), diffs):
            phi[i] = (ks[i] - ks[j - 1]) / d
        coeffs.append(phi[j])
    r, dr = coeffs[-1], mp.zero
    for j in range(len(coeffs) - 2, -1, -1):
        if not r:
            raise PoleInWindow("continued fraction has a pole at the evaluation point")
        dt = t - ks[j]
        r, dr = coeffs[j] + dt / r, 1 / r - dt * dr / (r * r)
    return dr


def _check_monotone(xs):
    for i in range(len(xs) - 1):
        if not xs[i] < xs[i + 1]:
            raise NonMonotoneSamples(f"samples not strictly increasing at k={i + 1}")


def derivative_at(samples: Sequence, scheme: InterpolationScheme,
                  eval_points: Iterable, ctx: Optional[PrecisionContext] = None) -> list:
    """x'(t) for each t in ``eval_points`` from samples x[1..n].

    ``samples`` is either the plain sequence x[1..n] or a sequence of (k, x)
    pairs with k = 1..n.  Eval points may be fractional (e.g. k - 1/2).
    """
    ctx = ctx or PrecisionContext()
    xs = [s[1] if isinstance(s, tuple) else s for s in samples]
    xs = [ctx.num(x) for x in xs]
    n = len(xs)
    if n < 2:
        raise WindowTooSmall("need at least 2 samples")
    _check_monotone(xs)
    m = min(scheme.order, n)
    ks_all = [ctx.num(k) for k in range(n + 1)]
    tables = {}  # window start -> divided differences
    out = []
    for t in eval_points:
        t = ctx.num(t)
        if not 1 <= t <= n:
            raise ValueError(f"eval point {t} outside [1, {n}]")
        if not scheme.half_integer_support and t != int(t):
            raise ValueError("scheme does not allow fractional eval points")
        start, shifted = nearest_window(t, n, m)
        ks = list(range(start, start + m))
        window = [xs[k - 1] for k in ks]
        use_thiele = m >= 4 and (scheme.kind == "thiele" or (shifted and scheme.boundary_policy == THIELE))
        if use_thiele:
            try:
                out.append(thiele_derivative(list(zip(ks, window)), t, ctx))
                continue
            except PoleInWindow:
                pass
        knots = ks_all[start:start + m]
        if start not in tables:
            tables[start] = _divided_differences(knots, window)
        out.append(newton_derivative(knots, window, t, tables[start])[1])
    return out


def local_derivative(abscissae: Sequence, values: Sequence, order: int, points: Iterable):
    """Derivative at each point of the polynomial through the ``order`` abscissae nearest it.

    Abscissae must be ascending; used for interpolating data at non-uniform
    positions, such as a cumulative distribution sampled between nodes.
    """
    import bisect

    n = len(abscissae)
    m = min(order, n)
    keys = [float(a) for a in abscissae]
    out = []
    for p in points:
        pos = bisect.bisect_left(keys, float(p))
        lo, hi = pos, pos  # window is [lo, hi)
        while hi - lo < m:
            if lo == 0:
                hi += 1
            elif hi == n:
                lo -= 1
            elif abs(keys[lo - 1] - float(p)) <= abs(keys[hi] - float(p)):
                lo -= 1
            else:
                hi += 1
        out.append(newton_derivative(abscissae[lo:hi], values[lo:hi], p)[1])
    return out
