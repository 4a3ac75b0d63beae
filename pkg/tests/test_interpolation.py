import pytest
from hypothesis import given, settings, strategies as st

from derivrule import (InterpolationScheme, NonMonotoneSamples, PoleInWindow, PrecisionContext,
                       WindowTooSmall, chebyshev, derivative_at, gauss_rule, gegenbauer,
                       thiele_derivative, weight)
from derivrule.interpolation import THIELE, local_derivative, nearest_window, newton_derivative


def test_quadratic_window_is_exact(ctx):
    xs = [k * k for k in range(1, 11)]
    assert derivative_at(xs, InterpolationScheme(order=3), [5], ctx) == [10]


def test_accepts_index_value_pairs(ctx):
    xs = [(k, k ** 3) for k in range(1, 9)]
    assert abs(derivative_at(xs, InterpolationScheme(order=4), [2], ctx)[0] - 12) < ctx.tolerance


def test_chebyshev2_global_window(ctx):
    mp = ctx.mp
    n = 40
    rule = gauss_rule(chebyshev(2), n, ctx)
    ks = range(15, 27)
    xp = derivative_at(rule.nodes, InterpolationScheme(order=39), ks, ctx)
    for k, d in zip(ks, xp):
        assert abs(d - mp.pi / (n + 1) * mp.sin(k * mp.pi / (n + 1))) < mp.mpf(10) ** -30


def test_chebyshev2_half_integer_points(ctx):
    mp = ctx.mp
    n = 40
    rule = gauss_rule(chebyshev(2), n, ctx)
    pts = [k - mp.mpf(1) / 2 for k in range(15, 27)]
    xp = derivative_at(rule.nodes, InterpolationScheme(order=39), pts, ctx)
    for t, d in zip(pts, xp):
        assert abs(d - mp.pi / (n + 1) * mp.sin(t * mp.pi / (n + 1))) < mp.mpf(10) ** -30


def test_half_integer_points_can_be_disabled(ctx):
    with pytest.raises(ValueError):
        derivative_at(list(range(1, 8)), InterpolationScheme(order=3, half_integer_support=False), ["2.5"], ctx)


def test_thiele_reproduces_rational(ctx):
    samples = [(k, ctx.mp.mpf(1) / k) for k in range(1, 7)]
    assert abs(thiele_derivative(samples, 2, ctx) + ctx.mp.mpf(1) / 4) < ctx.tolerance


def test_thiele_linear_samples(ctx):
    samples = [(k, 3 * k - 2) for k in range(1, 7)]
    assert thiele_derivative(samples, "3.5", ctx) == 3


def test_thiele_needs_four_samples(ctx):
    with pytest.raises(WindowTooSmall):
        thiele_derivative([(1, 1), (2, 2), (3, 4)], 2, ctx)


def test_thiele_pole_detected(ctx):
    # equal values at k=1 and k=3 make an inverse difference divide by zero
    with pytest.raises(PoleInWindow):
        thiele_derivative([(1, 0), (2, 1), (3, 0), (4, 5), (5, 2)], 2, ctx)


def test_thiele_outside_range(ctx):
    with pytest.raises(ValueError):
        thiele_derivative([(k, k) for k in range(1, 6)], 7, ctx)


def test_non_monotone_samples(ctx):
    with pytest.raises(NonMonotoneSamples):
        derivative_at([1, 2, 2, 3], InterpolationScheme(order=3), [2], ctx)


def test_scheme_validation():
    with pytest.raises(WindowTooSmall):
        InterpolationScheme(order=1)
    with pytest.raises(ValueError):
        InterpolationScheme(boundary_policy="extend")
    with pytest.raises(ValueError):
        InterpolationScheme(kind="spline")


def test_nearest_window():
    assert nearest_window(5, 10, 3) == (4, False)
    assert nearest_window(1, 10, 4) == (1, True)
    assert nearest_window(10, 10, 4) == (7, True)
    # even window at an integer point: the extra sample goes toward the centre
    assert nearest_window(3, 10, 4) == (2, False)
    assert nearest_window(8, 10, 4) == (6, False)
    assert nearest_window(2, 5, 9) == (1, True)


def test_eval_point_out_of_range(ctx):
    with pytest.raises(ValueError):
        derivative_at([1, 2, 3], InterpolationScheme(order=3), [4], ctx)


def test_local_derivative_nonuniform(ctx):
    mp = ctx.mp
    xs = [mp.mpf(x) / 7 for x in (0, 1, 3, 4, 8, 9, 13)]
    ys = [x ** 3 - x for x in xs]
    d = local_derivative(xs, ys, 4, [xs[2], mp.mpf("0.9")])
    assert abs(d[0] - (3 * xs[2] ** 2 - 1)) < ctx.tolerance
    assert abs(d[1] - (3 * mp.mpf("0.81") - 1)) < ctx.tolerance


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=7), st.integers(7, 15),
       st.fractions(min_value=1, max_value=15))
def test_polynomial_reproduction(coeffs, n, t):
    """Any polynomial of degree < window size is differentiated exactly."""
    ctx = PrecisionContext(30)
    mp = ctx.mp
    m = len(coeffs) + 1
    t = min(ctx.num(t), n)
    # a steep linear term keeps the samples increasing
    p = lambda k: 10 ** 8 * k + sum(c * k ** j for j, c in enumerate(coeffs))
    dp = lambda k: 10 ** 8 + sum(j * c * k ** (j - 1) for j, c in enumerate(coeffs) if j)
    got = derivative_at([p(mp.mpf(k)) for k in range(1, n + 1)], InterpolationScheme(order=m), [t], ctx)[0]
    assert abs(got - dp(t)) < ctx.tolerance * (1 + abs(dp(t))) * 100


def test_newton_value_and_slope(ctx):
    xs = [0, 1, 2, 3]
    p, dp = newton_derivative(xs, [1, 2, 5, 10], ctx.num(2))
    assert (p, dp) == (5, 4)


def test_thiele_fallback_gains_digits_at_boundary():
    """At the first Gegenbauer(l=20) node, a Thiele window of 40 samples beats
    a polynomial window of the same size (checked against w[1]/rho(x[1]))."""
    ctx = PrecisionContext(60)
    mp = ctx.mp
    n = 200
    rule = gauss_rule(gegenbauer(20), n, ctx)
    target = rule.weights[0] / weight(rule.system, rule.nodes[0], ctx)
    poly = derivative_at(rule.nodes, InterpolationScheme(order=40), [1], ctx)[0]
    thiele = derivative_at(rule.nodes, InterpolationScheme(order=40, boundary_policy=THIELE), [1], ctx)[0]
    gain = mp.log10(abs(poly / target - 1)) - mp.log10(abs(thiele / target - 1))
    assert gain > 3
