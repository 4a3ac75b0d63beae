"""Working-precision context and the two symmetric eigensolvers.

Everything downstream (Gauss rules, the Coulomb discretization) is built on
these routines, so they run at an arbitrary decimal precision.  Public values
are ``mpmath`` numbers bound to a private :class:`mpmath.MPContext` owned by
the :class:`PrecisionContext`; the inner loops run on ``gmpy2.mpfr`` for speed.

Tridiagonal eigenvalues are isolated by vectorised Sturm-count bisection in
double precision and polished at full precision by Rayleigh-quotient steps
taken from a twisted factorisation, which also yields the eigenvector.  Dense
matrices go through cyclic Jacobi rotations.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional

import gmpy2
import mpmath
import numpy as np
from mpmath.libmp import to_str

from .errors import AsymmetricInput, NonPositiveOffdiagonal, PrecisionExhausted

__all__ = [
    "PrecisionContext",
    "SymTridiagonal",
    "EigenDecomposition",
    "eigen_tridiagonal",
    "eigen_dense_symmetric",
    "format_number",
]

ESCALATION_DIGITS = 50


@dataclass(frozen=True)
class PrecisionContext:
    """Decimal working precision plus guard digits.

    Arithmetic is carried at ``digits + guard`` decimal digits; results are
    promised to ``digits``.  Instances are immutable and hashable, so they can
    key caches, and each owns an independent mpmath context, so two contexts
    never interfere even across threads.
    """

    digits: int = 50
    guard: int = 10
    max_digits: int = 1000

    def __post_init__(self):
        if self.digits < 16:
            raise ValueError(f"digits must be >= 16, got {self.digits}")
        if self.guard < 10:
            raise ValueError(f"guard must be >= 10, got {self.guard}")
        if self.digits + self.guard > self.max_digits:
            raise ValueError(
                f"digits + guard = {self.digits + self.guard} exceeds max_digits = {self.max_digits}"
            )

    @property
    def dps(self) -> int:
        return self.digits + self.guard

    @cached_property
    def mp(self) -> mpmath.MPContext:
        ctx = mpmath.MPContext()
        ctx.dps = self.dps
        return ctx

    @property
    def bits(self) -> int:
        return self.mp.prec

    def num(self, x):
        """Convert int, Fraction, str, float or an mpmath number to this context."""
        if isinstance(x, Fraction):
            return self.mp.mpf(x.numerator) / x.denominator
        return self.mp.mpf(x)

    @property
    def tolerance(self):
        """``10**(-digits + guard)``, the package-wide agreement threshold."""
        return self.mp.mpf(10) ** (self.guard - self.digits)

    def escalated(self, extra: int = ESCALATION_DIGITS) -> "PrecisionContext":
        if self.digits + extra + self.guard > self.max_digits:
            raise PrecisionExhausted(
                f"cannot raise precision to {self.digits + extra} digits "
                f"(max_digits={self.max_digits})"
            )
        return PrecisionContext(self.digits + extra, self.guard, self.max_digits)

    def with_extra(self, extra: int) -> "PrecisionContext":
        """Same promise, more internal digits; ignores ``max_digits``."""
        return PrecisionContext(self.digits, self.guard + extra, self.max_digits + extra)


def format_number(x, digits: int) -> str:
    """Scientific notation with ``digits`` significant decimals, e.g. ``7.85e-1``."""
    if not hasattr(x, "_mpf_"):
        x = mpmath.mpf(x)
    if not x:
        return "0." + "0" * (digits - 1) + "e+0"
    return to_str(x._mpf_, digits, strip_zeros=False, min_fixed=1, max_fixed=0,
                  show_zero_exponent=True)


# -- mpmath <-> gmpy2 ------------------------------------------------------

def _to_mpfr(x):
    sign, man, exp, bc = x._mpf_
    if not man:
        if x._mpf_ != mpmath.libmp.fzero:
            raise ValueError(f"non-finite value {x}")
        return gmpy2.mpfr(0)
    v = gmpy2.mul_2exp(gmpy2.mpfr(man), exp)
    return -v if sign else v


def _from_mpfr(v, mp):
    man, exp = v.as_mantissa_exp()
    return mp.mpf((int(man), int(exp)))


def _bits_context(bits: int):
    return gmpy2.context(gmpy2.get_context(), precision=bits)


# -- tridiagonal -----------------------------------------------------------

@dataclass(frozen=True)
class SymTridiagonal:
    """Jacobi matrix with diagonal ``diag`` (length n) and off-diagonal ``offdiag`` (n-1)."""

    diag: tuple
    offdiag: tuple

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(self.diag))
        object.__setattr__(self, "offdiag", tuple(self.offdiag))
        if len(self.diag) < 1:
            raise ValueError("empty matrix")
        if len(self.offdiag) != len(self.diag) - 1:
            raise ValueError(
                f"offdiag length {len(self.offdiag)} != n-1 = {len(self.diag) - 1}"
            )

    @property
    def n(self) -> int:
        return len(self.diag)

    def leading(self, m: int) -> "SymTridiagonal":
        """Leading m x m principal submatrix."""
        return SymTridiagonal(self.diag[:m], self.offdiag[: m - 1])

    def to_dense(self) -> list:
        n = self.n
        zero = self.diag[0] * 0
        rows = [[zero] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = self.diag[i]
        for i, a in enumerate(self.offdiag):
            rows[i][i + 1] = a
            rows[i + 1][i] = a
        return rows


@dataclass(frozen=True)
class EigenDecomposition:
    values: tuple
    first_components: tuple
    vectors: Optional[tuple] = None   # vectors[i] is the unit eigenvector of values[i]
    max_residual: Optional[object] = None
    ctx: Optional[PrecisionContext] = None


def _count_below_float(d, e2, x, pivmin):
    # negative pivots of LDL^T(J - x) == eigenvalues below x
    q = d[0] - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def _float_brackets(d, e):
    """Sturm bisection for all eigenvalues at once, in double precision."""
    n = len(d)
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    e2 = e * e
    radius = np.zeros(n)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    glo = float(np.min(d - radius))
    ghi = float(np.max(d + radius))
    scale = max(abs(glo), abs(ghi), 1e-300)
    pad = 2 * np.finfo(float).eps * scale * n + 1e-300
    glo -= pad
    ghi += pad
    pivmin = np.finfo(float).tiny * max(1.0, float(e2.max()) if n > 1 else 1.0)
    lo = np.full(n, glo)
    hi = np.full(n, ghi)
    target = np.arange(n)
    eps = np.finfo(float).eps
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        above = _count_below_float(d, e2, mid, pivmin) > target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi - lo <= 4 * eps * np.maximum(np.abs(lo), np.abs(hi)) + 4 * pivmin):
            break
    return lo, hi


def _count_below_mp(d, e2, x, pivmin):
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    count += q < 0
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        count += q < 0
    return count


def _is_kth(d, e2, lam, k, delta, pivmin):
    return (_count_below_mp(d, e2, lam - delta, pivmin) == k
            and _count_below_mp(d, e2, lam + delta, pivmin) == k + 1)


def _twisted(d, e, e2, sigma, pivmin):
    """Twisted factorisation of J - sigma.

    Returns (gamma_r, z) with z[r] = 1 and (J - sigma) z = gamma_r e_r, where r
    minimises |gamma|.  z is the eigenvector estimate for the eigenvalue
    nearest sigma; gamma_r / |z|^2 is the Rayleigh-quotient correction.
    """
    n = len(d)
    if n == 1:
        return d[0] - sigma, [gmpy2.mpfr(1)]
    dp = [None] * n
    t = d[0] - sigma
    if not t:
        t = pivmin
    dp[0] = t
    for i in range(1, n):
        t = d[i] - sigma - e2[i - 1] / t
        if not t:
            t = pivmin
        dp[i] = t
    dm = [None] * n
    t = d[n - 1] - sigma
    if not t:
        t = pivmin
    dm[n - 1] = t
    for i in range(n - 2, -1, -1):
        t = d[i] - sigma - e2[i] / t
        if not t:
            t = pivmin
        dm[i] = t
    best = None
    r = 0
    for i in range(n):
        g = dp[i] + dm[i] - (d[i] - sigma)
        ag = abs(g)
        if best is None or ag < best:
            best, r, gamma = ag, i, g
    z = [None] * n
    z[r] = gmpy2.mpfr(1)
    for i in range(r - 1, -1, -1):
        z[i] = -e[i] * z[i + 1] / dp[i]
    for i in range(r + 1, n):
        z[i] = -e[i - 1] * z[i - 1] / dm[i]
    return gamma, z


def _residual(d, e, lam, v):
    n = len(d)
    worst = abs((d[0] - lam) * v[0] + (e[0] * v[1] if n > 1 else 0))
    for i in range(1, n):
        r = e[i - 1] * v[i - 1] + (d[i] - lam) * v[i]
        if i + 1 < n:
            r += e[i] * v[i + 1]
        r = abs(r)
        if r > worst:
            worst = r
    return worst


def _polish(d, e, e2, seed, bits, jnorm, pivmin):
    """Rayleigh-quotient polishing from ``seed``; returns (lam, unit vector)."""
    sigma = seed
    tol = gmpy2.mul_2exp(jnorm, 4 - bits)
    for _ in range(60):
        gamma, z = _twisted(d, e, e2, sigma, pivmin)
        nrm2 = gmpy2.fsum(zi * zi for zi in z)
        delta = gamma / nrm2
        sigma = sigma + delta
        if abs(delta) <= tol:
            break
    nrm = gmpy2.sqrt(nrm2)
    v = [zi / nrm for zi in z]
    if v[0] < 0:
        v = [-vi for vi in v]
    return sigma, v


def _bisect_mp(d, e2, lo, hi, k, bits, pivmin):
    """Full-precision Sturm bisection for the k-th eigenvalue inside [lo, hi]."""
    for _ in range(bits + 64):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        if _count_below_mp(d, e2, mid, pivmin) > k:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def _solve_tridiagonal(m: SymTridiagonal, ctx: PrecisionContext, keep_vectors: bool):
    n = m.n
    bits = ctx.bits
    flo, fhi = _float_brackets([float(x) for x in m.diag], [float(x) for x in m.offdiag])
    with _bits_context(bits):
        d = [_to_mpfr(ctx.num(x)) for x in m.diag]
        e = [_to_mpfr(ctx.num(x)) for x in m.offdiag]
        e2 = [x * x for x in e]
        jnorm = max(
            abs(d[i]) + (abs(e[i - 1]) if i > 0 else 0) + (abs(e[i]) if i < n - 1 else 0)
            for i in range(n)
        )
        if not jnorm:
            jnorm = gmpy2.mpfr(1)
        pivmin = gmpy2.mul_2exp(jnorm, -4 * bits)
        delta = gmpy2.mul_2exp(jnorm, 12 - bits)
        seeds = [(float(a) + float(b)) / 2 for a, b in zip(flo, fhi)]
        values, firsts, vectors, worst = [], [], [], gmpy2.mpfr(0)
        for k in range(n):
            seed = seeds[k]
            # isolation interval: halfway to the neighbouring seeds
            left = (seeds[k - 1] + seed) / 2 if k > 0 else float(flo[0]) - abs(seed) - 1.0
            right = (seed + seeds[k + 1]) / 2 if k < n - 1 else float(fhi[-1]) + abs(seed) + 1.0
            lam, v = _polish(d, e, e2, gmpy2.mpfr(seed), bits, jnorm, pivmin)
            if not (left < lam < right) or not _is_kth(d, e2, lam, k, delta, pivmin):
                # seeds not trustworthy (near-degenerate cluster); bisect at full precision
                lo, hi = gmpy2.mpfr(float(flo[0]) - 1.0 - abs(float(flo[0]))), gmpy2.mpfr(
                    float(fhi[-1]) + 1.0 + abs(float(fhi[-1])))
                start = _bisect_mp(d, e2, lo, hi, k, bits, pivmin)
                lam, v = _polish(d, e, e2, start, bits, jnorm, pivmin)
            res = _residual(d, e, lam, v)
            if res > worst:
                worst = res
            values.append(lam)
            firsts.append(v[0])
            if keep_vectors:
                vectors.append(v)
        mp = ctx.mp
        out_values = tuple(_from_mpfr(x, mp) for x in values)
        out_first = tuple(_from_mpfr(x, mp) for x in firsts)
        out_vectors = (
            tuple(tuple(_from_mpfr(x, mp) for x in v) for v in vectors) if keep_vectors else None
        )
        return out_values, out_first, out_vectors, _from_mpfr(worst, mp), _from_mpfr(jnorm, mp)


def eigen_tridiagonal(m: SymTridiagonal, ctx: PrecisionContext,
                      keep_vectors: bool = False) -> EigenDecomposition:
    """All eigenvalues (ascending) and first eigenvector components of a Jacobi matrix.

    Raises NonPositiveOffdiagonal if any off-diagonal entry is <= 0 and
    PrecisionExhausted if the residual target
    ``10**(-digits + guard/2) * ||J||_inf`` is missed even after one retry at
    50 extra digits.
    """
    for i, a in enumerate(m.offdiag):
        if not a > 0:
            raise NonPositiveOffdiagonal(f"offdiag[{i}] = {a} is not positive")
    attempt = ctx
    for retry in range(2):
        values, firsts, vectors, worst, jnorm = _solve_tridiagonal(m, attempt, keep_vectors)
        target = ctx.mp.mpf(10) ** (ctx.guard / 2 - ctx.digits) * jnorm
        ascending = all(values[i] < values[i + 1] for i in range(len(values) - 1))
        if worst <= target and ascending:
            break
        if retry == 0:
            attempt = ctx.escalated()
    else:
        raise PrecisionExhausted(
            f"eigen_tridiagonal: residual {mpmath.nstr(worst, 5)} above target "
            f"{mpmath.nstr(target, 5)} at {attempt.digits} digits"
        )
    conv = ctx.num
    return EigenDecomposition(
        values=tuple(conv(x) for x in values),
        first_components=tuple(conv(x) for x in firsts),
        vectors=tuple(tuple(conv(x) for x in v) for v in vectors) if vectors else None,
        max_residual=conv(worst),
        ctx=ctx,
    )


# -- dense symmetric -------------------------------------------------------

def _rows(matrix) -> list:
    if hasattr(matrix, "rows") and hasattr(matrix, "cols") and not isinstance(matrix, list):
        return [[matrix[i, j] for j in range(matrix.cols)] for i in range(matrix.rows)]
    return [list(r) for r in matrix]


def eigen_dense_symmetric(matrix, ctx: PrecisionContext) -> EigenDecomposition:
    """Full eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    ``matrix`` is a list of rows or an ``mpmath.matrix``.  Sweeps stop once the
    off-diagonal Frobenius mass drops below ``10**(-dps) * ||M||_F``.
    """
    rows = _rows(matrix)
    n = len(rows)
    if n < 1 or any(len(r) != n for r in rows):
        raise ValueError("matrix must be square and non-empty")
    mp = ctx.mp
    M = [[ctx.num(x) for x in r] for r in rows]
    norm_inf = max(sum(abs(x) for x in r) for r in M) or mp.mpf(1)
    asym = max((abs(M[i][j] - M[j][i]) for i in range(n) for j in range(i)), default=mp.zero)
    if asym > mp.mpf(10) ** (-ctx.digits / 2) * norm_inf:
        raise AsymmetricInput(f"max |M_ij - M_ji| = {mpmath.nstr(asym, 5)}")
    with _bits_context(ctx.bits):
        A = [[_to_mpfr(x) for x in r] for r in M]
        for i in range(n):
            for j in range(i):
                s = (A[i][j] + A[j][i]) / 2
                A[i][j] = A[j][i] = s
        V = [[gmpy2.mpfr(1) if i == j else gmpy2.mpfr(0) for j in range(n)] for i in range(n)]
        frob = gmpy2.sqrt(gmpy2.fsum(x * x for r in A for x in r)) or gmpy2.mpfr(1)
        thresh = frob * gmpy2.mpfr(10) ** (-ctx.dps)
        for _ in range(200):
            off = gmpy2.sqrt(gmpy2.fsum(A[i][j] * A[i][j] for i in range(n) for j in range(n) if i != j))
            if off <= thresh:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p][q]
                    if not apq:
                        continue
                    theta = (A[q][q] - A[p][p]) / (2 * apq)
                    t = 1 / (abs(theta) + gmpy2.sqrt(theta * theta + 1))
                    if theta < 0:
                        t = -t
                    c = 1 / gmpy2.sqrt(t * t + 1)
                    s = t * c
                    for row in A:
                        akp, akq = row[p], row[q]
                        row[p] = c * akp - s * akq
                        row[q] = s * akp + c * akq
                    Ap, Aq = A[p], A[q]
                    for k in range(n):
                        apk, aqk = Ap[k], Aq[k]
                        Ap[k] = c * apk - s * aqk
                        Aq[k] = s * apk + c * aqk
                    A[p][q] = A[q][p] = gmpy2.mpfr(0)
                    for row in V:
                        vkp, vkq = row[p], row[q]
                        row[p] = c * vkp - s * vkq
                        row[q] = s * vkp + c * vkq
        order = sorted(range(n), key=lambda i: A[i][i])
        values, vectors = [], []
        for i in order:
            v = [V[k][i] for k in range(n)]
            # deterministic sign: largest-magnitude entry positive
            pivot = max(range(n), key=lambda k: abs(v[k]))
            if v[pivot] < 0:
                v = [-x for x in v]
            values.append(_from_mpfr(A[i][i], mp))
            vectors.append(tuple(_from_mpfr(x, mp) for x in v))
    worst = mp.zero
    for lam, v in zip(values, vectors):
        for i in range(n):
            r = abs(mp.fsum(M[i][j] * v[j] for j in range(n)) - lam * v[i])
            if r > worst:
                worst = r
    return EigenDecomposition(
        values=tuple(values),
        first_components=tuple(v[0] for v in vectors),
        vectors=tuple(vectors),
        max_residual=worst,
        ctx=ctx,
    )
