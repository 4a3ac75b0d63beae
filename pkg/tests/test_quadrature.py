import pytest

from derivrule import (EvaluationFailure, OutOfSupport, analytic_chebyshev_rule, chebyshev,
                       coulomb_pollaczek, equivalent_weights, gauss_rule, integrate, legendre)
from derivrule.quadrature import (analytic_chebyshev_derivative, analytic_chebyshev_node,
                                  rule_from_csv, rule_to_csv)

from conftest import CATALOG, catalog_ids
from oracles import reference_moment


def test_chebyshev1_four_point_weights(ctx):
    rule = gauss_rule(chebyshev(1), 4, ctx)
    assert all(abs(w - ctx.mp.pi / 4) < ctx.tolerance for w in rule.weights)


@pytest.mark.parametrize("kind", [1, 2, 3, 4])
@pytest.mark.parametrize("n", [1, 2, 5, 17])
def test_eigensolve_matches_closed_form(kind, n, ctx):
    a = gauss_rule(chebyshev(kind), n, ctx)
    b = analytic_chebyshev_rule(kind, n, ctx)
    assert max(abs(x - y) for x, y in zip(a.nodes, b.nodes)) < ctx.tolerance
    assert max(abs(x - y) for x, y in zip(a.weights, b.weights)) < ctx.tolerance
    assert b.source == "analytic"


@pytest.mark.parametrize("kind", [1, 2, 3, 4])
def test_analytic_derivative_is_slope_of_node_map(kind, ctx):
    mp = ctx.mp
    n, k = 12, mp.mpf("4.3")
    h = mp.mpf(10) ** -15
    slope = (analytic_chebyshev_node(kind, n, k + h, ctx) - analytic_chebyshev_node(kind, n, k - h, ctx)) / (2 * h)
    assert abs(slope - analytic_chebyshev_derivative(kind, n, k, ctx)) < mp.mpf(10) ** -25


def test_analytic_kind_rejected(ctx):
    with pytest.raises(ValueError):
        analytic_chebyshev_rule(5, 3, ctx)


@pytest.mark.parametrize("sys", CATALOG, ids=catalog_ids())
def test_rule_basic_shape(sys, ctx30):
    rule = gauss_rule(sys, 15, ctx30)
    assert list(rule.nodes) == sorted(rule.nodes)
    assert all(w > 0 for w in rule.weights)
    assert abs(ctx30.mp.fsum(rule.weights) - sys.mu0(ctx30)) < ctx30.tolerance * sys.mu0(ctx30)


@pytest.mark.parametrize("sys", CATALOG, ids=catalog_ids())
def test_degree_2n_minus_1_exactness(sys, ctx30):
    n = 8
    rule = gauss_rule(sys, n, ctx30)
    scale = lambda j: integrate(rule, lambda x: abs(x) ** j)
    for j in range(2 * n):
        ref = reference_moment(sys, j, ctx30)
        assert abs(integrate(rule, lambda x: x ** j) - ref) <= ctx30.tolerance * scale(j)


def test_degree_2n_is_not_exact(ctx):
    rule = gauss_rule(legendre(), 5, ctx)
    assert abs(integrate(rule, lambda x: x ** 10) - ctx.mp.mpf(2) / 11) > 1e-6


def test_integrate_reports_failing_node(ctx):
    rule = gauss_rule(legendre(), 4, ctx)
    with pytest.raises(EvaluationFailure, match="k=1"):
        integrate(rule, lambda x: 1 / 0)


def test_equivalent_weights_chebyshev1(ctx):
    mp = ctx.mp
    n = 9
    rule = gauss_rule(chebyshev(1), n, ctx)
    for x, w in zip(rule.nodes, equivalent_weights(rule)):
        assert abs(w - mp.pi / n * mp.sqrt(1 - x * x)) < ctx.tolerance


def test_equivalent_weights_out_of_support(ctx30):
    rule = gauss_rule(coulomb_pollaczek(0, -1, 4), 20, ctx30)
    assert rule.below_support > 0
    with pytest.raises(OutOfSupport, match="k=1"):
        equivalent_weights(rule)
    assert len(rule.in_support) == 20 - rule.below_support


def test_csv_round_trip(ctx):
    rule = gauss_rule(CATALOG[9], 7, ctx)
    text = rule_to_csv(rule)
    back = rule_from_csv(text)
    assert back.system == rule.system and back.n == 7
    assert rule_to_csv(back) == text
    assert max(abs(a / b - 1) for a, b in zip(back.nodes, rule.nodes)) < ctx.mp.mpf(10) ** (1 - ctx.digits)


def test_csv_header_checked(ctx):
    with pytest.raises(ValueError):
        rule_from_csv("# system: legendre\nk,y,w\n1,0,2\n")


def test_csv_written_to_path(tmp_path, ctx):
    rule = gauss_rule(chebyshev(2), 3, ctx)
    p = tmp_path / "r.csv"
    text = rule_to_csv(rule, p, meta=False)
    assert p.read_text() == text
    assert text.splitlines()[0] == "k,x,w"


def test_chebyshev2_three_point_rule(ctx):
    mp = ctx.mp
    rule = gauss_rule(chebyshev(2), 3, ctx)
    for x, y in zip(rule.nodes, (-mp.sqrt(2) / 2, 0, mp.sqrt(2) / 2)):
        assert abs(x - y) < ctx.tolerance
    for w, y in zip(rule.weights, (mp.pi / 8, mp.pi / 4, mp.pi / 8)):
        assert abs(w - y) < ctx.tolerance
    assert abs(integrate(rule, lambda x: x * x) - mp.pi / 8) < ctx.tolerance


def test_legendre_two_point_rule(ctx):
    mp = ctx.mp
    rule = gauss_rule(legendre(), 2, ctx)
    assert abs(rule.nodes[1] - 1 / mp.sqrt(3)) < ctx.tolerance
    assert all(abs(w - 1) < ctx.tolerance for w in rule.weights)
    assert equivalent_weights(rule) == rule.weights


def test_chebyshev4_first_weight(ctx):
    mp = ctx.mp
    rule = analytic_chebyshev_rule(4, 3, ctx)
    assert abs(rule.weights[0] - 4 * mp.pi / 7 * mp.sin(mp.pi / 7) ** 2) < ctx.tolerance


def test_chebyshev2_equivalent_weights(ctx):
    mp = ctx.mp
    n = 11
    rule = gauss_rule(chebyshev(2), n, ctx)
    for k, w in enumerate(equivalent_weights(rule), start=1):
        assert abs(w - mp.pi / (n + 1) * mp.sin(k * mp.pi / (n + 1))) < ctx.tolerance
