import threading
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from derivrule import (AsymmetricInput, NonPositiveOffdiagonal, PrecisionContext, SymTridiagonal,
                       eigen_dense_symmetric, eigen_tridiagonal)
from derivrule.numerics import format_number
from derivrule.opsystems import jacobi_matrix

from conftest import CATALOG, catalog_ids


def cheb2_matrix(n, ctx):
    return SymTridiagonal([ctx.mp.zero] * n, [ctx.mp.mpf(1) / 2] * (n - 1))


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(10)
    with pytest.raises(ValueError):
        PrecisionContext(50, guard=5)
    with pytest.raises(ValueError):
        PrecisionContext(995, guard=10, max_digits=1000)
    assert PrecisionContext(50).dps == 60


def test_context_num_conversions(ctx):
    assert ctx.num(Fraction(1, 3)) * 3 == 1
    assert ctx.num("0.25") == ctx.mp.mpf(1) / 4
    assert ctx.num(7) == 7


def test_contexts_are_independent():
    a, b = PrecisionContext(20), PrecisionContext(200)
    assert a.mp.dps == 30 and b.mp.dps == 210
    assert mpmath.nstr(b.mp.pi, 150) != mpmath.nstr(a.mp.pi, 150)


def test_escalation_respects_cap():
    ctx = PrecisionContext(50, 10, 100)
    with pytest.raises(Exception):
        ctx.escalated()
    assert PrecisionContext(50).escalated().digits == 100


def test_format_number():
    assert format_number(mpmath.mpf("0.785398163"), 3) == "7.85e-1"
    assert format_number(mpmath.mpf(1), 3) == "1.00e+0"
    assert format_number(0, 3) == "0.00e+0"


def test_one_by_one(ctx):
    dec = eigen_tridiagonal(SymTridiagonal([ctx.num("0.3")], []), ctx)
    assert dec.values == (ctx.num("0.3"),)
    assert dec.first_components == (1,)


def test_chebyshev2_n3(ctx):
    mp = ctx.mp
    dec = eigen_tridiagonal(cheb2_matrix(3, ctx), ctx)
    expect = [-mp.sqrt(2) / 2, 0, mp.sqrt(2) / 2]
    assert all(abs(a - b) < ctx.tolerance for a, b in zip(dec.values, expect))


def test_chebyshev1_n2(ctx):
    mp = ctx.mp
    m = SymTridiagonal([0, 0], [mp.sqrt(2) / 2])
    dec = eigen_tridiagonal(m, ctx)
    assert abs(dec.values[0] + mp.sqrt(2) / 2) < ctx.tolerance
    assert abs(dec.values[1] - mp.sqrt(2) / 2) < ctx.tolerance


def test_matches_closed_form_zeros_at_high_order():
    ctx = PrecisionContext(100)
    mp = ctx.mp
    n = 120
    dec = eigen_tridiagonal(cheb2_matrix(n, ctx), ctx)
    worst = max(abs(x + mp.cos(k * mp.pi / (n + 1))) for k, x in enumerate(dec.values, start=1))
    assert worst < ctx.tolerance


def test_nonpositive_offdiagonal(ctx):
    with pytest.raises(NonPositiveOffdiagonal):
        eigen_tridiagonal(SymTridiagonal([0, 0, 0], [1, 0]), ctx)
    with pytest.raises(NonPositiveOffdiagonal):
        eigen_tridiagonal(SymTridiagonal([0, 0], [-1]), ctx)


def test_deterministic(ctx):
    m = jacobi_matrix(CATALOG[5], 30, ctx)
    assert eigen_tridiagonal(m, ctx).values == eigen_tridiagonal(m, ctx).values


def _residuals(m, dec, ctx):
    """max_i ||J v - lambda v||_inf using full eigenvectors."""
    n = m.n
    worst = 0
    for lam, v in zip(dec.values, dec.vectors):
        for i in range(n):
            r = (m.diag[i] - lam) * v[i]
            if i > 0:
                r += m.offdiag[i - 1] * v[i - 1]
            if i < n - 1:
                r += m.offdiag[i] * v[i + 1]
            worst = max(worst, abs(r))
    return worst


@pytest.mark.parametrize("sys", CATALOG, ids=catalog_ids())
def test_residual_norm_and_gaps(sys, ctx30):
    ctx = ctx30
    mp = ctx.mp
    m = jacobi_matrix(sys, 25, ctx)
    dec = eigen_tridiagonal(m, ctx, keep_vectors=True)
    jnorm = max(abs(m.diag[i]) + (abs(m.offdiag[i - 1]) if i else 0)
                + (abs(m.offdiag[i]) if i < m.n - 1 else 0) for i in range(m.n))
    assert _residuals(m, dec, ctx) <= mp.mpf(10) ** (-ctx.digits + ctx.guard / 2) * jnorm
    for v in dec.vectors:
        assert abs(mp.fsum(x * x for x in v) - 1) < ctx.tolerance
    assert all(dec.values[i + 1] - dec.values[i] > 0 for i in range(m.n - 1))


@pytest.mark.parametrize("sys", CATALOG, ids=catalog_ids())
def test_interlacing(sys, ctx30):
    big = eigen_tridiagonal(jacobi_matrix(sys, 40, ctx30), ctx30).values
    small = eigen_tridiagonal(jacobi_matrix(sys, 39, ctx30), ctx30).values
    for k, y in enumerate(small):
        assert big[k] < y < big[k + 1]


def test_dense_identity(ctx):
    dec = eigen_dense_symmetric([[1 if i == j else 0 for j in range(5)] for i in range(5)], ctx)
    assert all(v == 1 for v in dec.values)


def test_dense_swap(ctx):
    mp = ctx.mp
    dec = eigen_dense_symmetric([[0, 1], [1, 0]], ctx)
    assert abs(dec.values[0] + 1) < ctx.tolerance and abs(dec.values[1] - 1) < ctx.tolerance
    s = 1 / mp.sqrt(2)
    v0, v1 = dec.vectors
    assert abs(abs(v0[0]) - s) < ctx.tolerance and abs(v0[0] + v0[1]) < ctx.tolerance
    assert abs(v1[0] - v1[1]) < ctx.tolerance


def test_dense_matches_tridiagonal(ctx):
    m = cheb2_matrix(10, ctx)
    a = eigen_dense_symmetric(m.to_dense(), ctx).values
    b = eigen_tridiagonal(m, ctx).values
    assert max(abs(x - y) for x, y in zip(a, b)) <= ctx.tolerance


def test_dense_orthonormal(ctx):
    mp = ctx.mp
    M = [[mp.mpf(1) / (i + j + 1) for j in range(6)] for i in range(6)]
    dec = eigen_dense_symmetric(M, ctx)
    V = dec.vectors
    for i in range(6):
        for j in range(6):
            dot = mp.fsum(a * b for a, b in zip(V[i], V[j]))
            assert abs(dot - (i == j)) < ctx.tolerance
    assert dec.max_residual < ctx.tolerance
    assert list(dec.values) == sorted(dec.values)


def test_dense_rejects_asymmetric(ctx):
    with pytest.raises(AsymmetricInput):
        eigen_dense_symmetric([[1, 2], [2.5, 1]], ctx)


def test_concurrent_solves_agree():
    ctxs = [PrecisionContext(20 + 10 * i) for i in range(4)]
    results = {}

    def work(c):
        results[c.digits] = eigen_tridiagonal(cheb2_matrix(30, c), c).values

    threads = [threading.Thread(target=work, args=(c,)) for c in ctxs]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for c in ctxs:
        assert results[c.digits] == eigen_tridiagonal(cheb2_matrix(30, c), c).values


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=12),
       st.lists(st.floats(0.01, 3), min_size=11, max_size=11))
def test_random_tridiagonal_trace_and_interlace(diag, off):
    ctx = PrecisionContext(30)
    n = len(diag)
    m = SymTridiagonal([ctx.num(x) for x in diag], [ctx.num(x) for x in off[: n - 1]])
    dec = eigen_tridiagonal(m, ctx)
    assert abs(ctx.mp.fsum(dec.values) - ctx.mp.fsum(m.diag)) < ctx.tolerance * (1 + sum(map(abs, diag)))
    assert abs(ctx.mp.fsum(v * v for v in dec.first_components) - 1) < ctx.tolerance
    if n > 2:
        sub = eigen_tridiagonal(m.leading(n - 1), ctx).values
        assert all(dec.values[k] < y < dec.values[k + 1] for k, y in enumerate(sub))
