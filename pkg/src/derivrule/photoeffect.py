"""Hydrogen photoionisation cross section from an L^2 discretisation.

The radial p-wave Coulomb Hamiltonian H = -1/2 d^2/dr^2 + l(l+1)/(2r^2) - 1/r
is represented in the orthonormalised basis

    theta_n(r) = exp(-t/2) t^(l+1) L_n^(2l+2)(t),   t = lambda r,   n = 0..N-1.

Its eigenpairs (E[i], psi[i]) give squared overlaps m2[i] with the dipole
source 2 r^2 exp(-r) (ground state times r).  Dividing by the equivalent
weight E'[i], obtained by differentiating i -> E[i], turns these into
energy-normalised values comparable with the exact cross section.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import NonMonotoneEnergies, NonPositiveEnergy, QuadratureOrderInsufficient
from .interpolation import InterpolationScheme, derivative_at
from .numerics import PrecisionContext, eigen_dense_symmetric
from .opsystems import laguerre
from .quadrature import gauss_rule
from .tables import render_table, write_table

__all__ = [
    "DiscretizedSpectrum",
    "hamiltonian_matrix",
    "overlap_matrix",
    "source_overlaps",
    "transition_moments",
    "cross_section",
    "exact_cross_section",
    "DEFAULT_SCHEME",
    "SOURCE_NORM2",
]

# energies are interpolated with Thiele windows over the continuum indices
DEFAULT_SCHEME = InterpolationScheme(order=14, kind="thiele")
# |2 r^2 exp(-r)|^2 integrated over r > 0
SOURCE_NORM2 = 3


def _laguerre_values(N, a, t):
    """L_0..L_{N-1}^{(a)}(t) and their t-derivatives."""
    L = [t * 0 + 1]
    if N > 1:
        L.append(1 + a - t)
    for k in range(1, N - 1):
        L.append(((2 * k + 1 + a - t) * L[k] - (k + a) * L[k - 1]) / (k + 1))
    dL = [t * 0] + [(k * L[k] - (k + a) * L[k - 1]) / t for k in range(1, N)]
    return L, dL


def _norms(N, l, lam, mp):
    # int_0^inf theta_n^2 dr = Gamma(n + 2l + 3) / (n! lambda)
    return [mp.sqrt(mp.gamma(n + 2 * l + 3) / mp.factorial(n) / lam) for n in range(N)]


def _assemble(N, l, lam, ctx, q):
    mp = ctx.mp
    a = 2 * l + 2
    rule = gauss_rule(laguerre(2 * l), q, ctx)
    norm = _norms(N, l, lam, mp)
    H = [[mp.zero] * N for _ in range(N)]
    S = [[mp.zero] * N for _ in range(N)]
    cen = mp.mpf(l * (l + 1)) / 2 * lam
    for t, w in zip(rule.nodes, rule.weights):
        L, dL = _laguerre_values(N, a, t)
        # d theta_n / dr = lambda e^{-t/2} t^l f_n(t)
        f = [(l + 1) * L[n] - t / 2 * L[n] + t * dL[n] for n in range(N)]
        for m in range(N):
            for n in range(m, N):
                LL = L[m] * L[n]
                H[m][n] += w * (lam / 2 * f[m] * f[n] + cen * LL - t * LL)
                S[m][n] += w * (t * t * LL / lam)
    for m in range(N):
        for n in range(m, N):
            s = norm[m] * norm[n]
            H[m][n] /= s
            S[m][n] /= s
            H[n][m], S[n][m] = H[m][n], S[m][n]
    return H, S


def _inner_order(N, l):
    return N + l + 3


def _scale(lam, ctx):
    return ctx.num(Fraction(lam) if isinstance(lam, str) else lam)


def _check_args(N, lam):
    if N < 2:
        raise ValueError(f"basis size N must be >= 2, got {N}")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")


def hamiltonian_matrix(N: int, l: int, lam, ctx: PrecisionContext, verify: bool = True) -> list:
    """Dense symmetric matrix of H in the orthonormalised basis.

    Every matrix element is a polynomial times t^(2l) exp(-t), so a
    Gauss-Laguerre rule of order N + l + 3 integrates it exactly.  With
    ``verify`` the assembly is repeated at twice that order and any element
    moving by more than 10^(-digits+guard) raises QuadratureOrderInsufficient.
    """
    lam = _scale(lam, ctx)
    _check_args(N, lam)
    q = _inner_order(N, l)
    H, _ = _assemble(N, l, lam, ctx, q)
    if verify:
        H2, _ = _assemble(N, l, lam, ctx, 2 * q)
        scale = max(abs(x) for row in H for x in row)
        worst = max(abs(H[i][j] - H2[i][j]) for i in range(N) for j in range(N))
        if worst > ctx.tolerance * scale:
            raise QuadratureOrderInsufficient(
                f"doubling the inner order to {2 * q} moved an element by {ctx.mp.nstr(worst, 3)}"
            )
    return H


def overlap_matrix(N: int, l: int, lam, ctx: PrecisionContext) -> list:
    """Gram matrix of the normalised basis (the identity, up to rounding)."""
    lam = _scale(lam, ctx)
    _check_args(N, lam)
    return _assemble(N, l, lam, ctx, _inner_order(N, l))[1]


def source_overlaps(N: int, l: int, lam, ctx: PrecisionContext) -> list:
    """<2 r^2 exp(-r), theta_n> / norm_n for n = 0..N-1.

    With t = lambda r and s = beta t, beta = 1/lambda + 1/2, the integrand
    becomes s^(l+3) exp(-s) times a polynomial, integrated exactly by
    Gauss-Laguerre with alpha = l + 3.
    """
    mp = ctx.mp
    lam = _scale(lam, ctx)
    beta = 1 / lam + mp.mpf(1) / 2
    rule = gauss_rule(laguerre(l + 3), _inner_order(N, l), ctx)
    norm = _norms(N, l, lam, mp)
    scale = 2 / lam ** 3 / beta ** (l + 4)
    g = [mp.zero] * N
    for s, w in zip(rule.nodes, rule.weights):
        L, _ = _laguerre_values(N, 2 * l + 2, s / beta)
        for n in range(N):
            g[n] += w * L[n]
    return [scale * g[n] / norm[n] for n in range(N)]


def transition_moments(vectors, overlaps, ctx: PrecisionContext) -> list:
    """m2[i] = (sum_n c_n[i] g_n)^2 for eigenvectors c[i] and source overlaps g."""
    mp = ctx.mp
    return [mp.fsum(c * g for c, g in zip(v, overlaps)) ** 2 for v in vectors]


def exact_cross_section(E, ctx: Optional[PrecisionContext] = None):
    """2^8 / (1+k^2)^5 exp(-4 atan(k)/k) / (1 - exp(-2 pi / k)),  k = sqrt(2E)."""
    ctx = ctx or PrecisionContext()
    mp = ctx.mp
    E = ctx.num(E)
    if not E > 0:
        raise NonPositiveEnergy(f"E must be positive, got {E}")
    k = mp.sqrt(2 * E)
    return mp.mpf(2) ** 8 / (1 + k * k) ** 5 * mp.exp(-4 * mp.atan(k) / k) / (-mp.expm1(-2 * mp.pi / k))


@dataclass(frozen=True)
class DiscretizedSpectrum:
    N: int
    l: int
    lam: object
    energies: tuple
    m2: tuple
    weq: tuple            # None at bound states
    sigma: tuple          # calibrated approximation, None at bound states
    sigma_exact: tuple    # None at bound states
    calibration: object   # constant C multiplying m2 / weq
    calibration_index: int
    ctx: PrecisionContext

    @property
    def bound(self) -> list:
        return [E < 0 for E in self.energies]

    @property
    def continuum(self) -> list:
        """0-based indices with E > 0."""
        return [i for i, E in enumerate(self.energies) if E > 0]

    def interior(self, trim: int = 2) -> list:
        """Continuum indices without the ``trim`` lowest and highest."""
        c = self.continuum
        return c[trim: len(c) - trim]

    def matching_digits(self, i: int):
        mp = self.ctx.mp
        rel = abs(self.sigma[i] / self.sigma_exact[i] - 1)
        return -mp.log10(rel) if rel else mp.inf

    HEADER = ("i", "E", "sigma_approx", "sigma_exact", "abs_err", "bound")

    def to_csv(self, path=None, meta: bool = True) -> str:
        rows = []
        for i, E in enumerate(self.energies):
            s, se = self.sigma[i], self.sigma_exact[i]
            err = abs(s - se) if s is not None else None
            rows.append((i + 1, E, s, se, err, 1 if E < 0 else 0))
        info = None
        if meta:
            info = {"N": self.N, "l": self.l, "lambda": self.ctx.mp.nstr(self.lam, 15),
                    "digits": self.ctx.digits, "calibration": self.ctx.mp.nstr(self.calibration, 20),
                    "calibration_index": self.calibration_index + 1}
        if path is None:
            return render_table(self.HEADER, rows, self.ctx.digits, info)
        return write_table(path, self.HEADER, rows, self.ctx.digits, info)


def cross_section(N: int = 35, l: int = 1, lam=Fraction(5, 2),
                  scheme: InterpolationScheme = DEFAULT_SCHEME,
                  ctx: Optional[PrecisionContext] = None,
                  calibrate: bool = True) -> DiscretizedSpectrum:
    """Diagonalise, project the dipole source, and renormalise by E'[i].

    Only positive energies enter the interpolation of i -> E[i].  The
    constant C in sigma = C m2 / E' is fixed at the middle continuum
    eigenvalue against the exact formula (it comes out as 1 up to the
    discretisation error); pass ``calibrate=False`` to force C = 1.
    """
    ctx = ctx or PrecisionContext(64)
    mp = ctx.mp
    lamv = _scale(lam, ctx)
    H = hamiltonian_matrix(N, l, lamv, ctx)
    dec = eigen_dense_symmetric(H, ctx)
    energies = dec.values
    for i in range(N - 1):
        if not energies[i] < energies[i + 1]:
            raise NonMonotoneEnergies(f"E[{i + 1}] >= E[{i + 2}]")
    g = source_overlaps(N, l, lamv, ctx)
    m2 = transition_moments(dec.vectors, g, ctx)
    cont = [i for i, E in enumerate(energies) if E > 0]
    if len(cont) < 2:
        raise NonMonotoneEnergies("fewer than two positive eigenvalues")
    xp = derivative_at([energies[i] for i in cont], scheme, range(1, len(cont) + 1), ctx)
    weq = [None] * N
    raw = [None] * N
    exact = [None] * N
    for i, d in zip(cont, xp):
        if not d > 0:
            raise NonMonotoneEnergies(f"E'[{i + 1}] = {mp.nstr(d, 5)} is not positive")
        weq[i] = d
        raw[i] = m2[i] / d
        exact[i] = exact_cross_section(energies[i], ctx)
    ci = cont[len(cont) // 2]
    C = exact[ci] / raw[ci] if calibrate else mp.mpf(1)
    sigma = tuple(C * r if r is not None else None for r in raw)
    return DiscretizedSpectrum(N, l, lamv, tuple(energies), tuple(m2), tuple(weq), sigma,
                               tuple(exact), C, ci, ctx)
