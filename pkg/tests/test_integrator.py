from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qeuler.families import euler_hr, euler_order_r, euler_q, euler_weighted, euler_weighted_star
from qeuler.integrator import (
    BudgetExceededError,
    Integrand,
    MeasureSpec,
    bracket_power_integrand,
    constant_integrand,
    fermionic_integral,
    fermionic_sum_level,
    multivariate_fermionic_integral,
    multivariate_sum_level,
    shift_relation_check,
)
from qeuler.numeric import PadicContext, RationalContext
from qeuler.qkit import q_bracket, q_pochhammer


def padic(p=3, prec=20):
    return PadicContext(p, prec)


@pytest.mark.parametrize("delta", [0, 1])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_constant_sums_to_one(delta, N):
    ctx = RationalContext(Fraction(4))
    assert fermionic_sum_level(ctx, constant_integrand(), delta, N, p=3) == 1


def test_identity_integrand_approximates_minus_half():
    ctx = padic(3)
    for N in (2, 3, 4):
        s = fermionic_sum_level(ctx, lambda c, x: c(x), 0, N)
        assert (s - Fraction(-1, 2)).valuation() >= N - 1


def test_constant_integral_report():
    ctx = padic(5, 12)
    res = fermionic_integral(ctx, constant_integrand(), 0, 3)
    assert res.value == 1
    assert all(d == float("inf") for d in res.diff_valuations)
    assert res.precision == ctx.prec
    assert res.stabilized


def test_square_bracket_matches_basic_family():
    ctx = padic(3)
    res = fermionic_integral(ctx, bracket_power_integrand(2), 0, 4)
    closed = euler_q(ctx, 2, 0)
    assert res.precision <= ctx.prec
    assert (res.value - closed).valuation() >= res.precision


def test_two_fold_constant():
    ctx = padic(3)
    res = multivariate_fermionic_integral(ctx, constant_integrand(arity=2), MeasureSpec.fermionic(2), 3)
    assert res.value == 1


def test_order_two_integral():
    ctx = padic(3)
    res = multivariate_fermionic_integral(ctx, bracket_power_integrand(2, arity=2), MeasureSpec.fermionic(2), 3)
    assert (res.value - euler_order_r(ctx, 2, 2, 0)).valuation() >= res.precision


@pytest.mark.parametrize("x", [0, 1])
def test_extended_weighted_integral(x):
    ctx = padic(3)
    n, h, r = 2, 2, 2
    res = multivariate_fermionic_integral(ctx, bracket_power_integrand(n, x, r), MeasureSpec.extended(h, r), 3)
    closed = euler_hr(ctx, n, h, r, x)
    assert (res.value - closed).valuation() >= res.precision >= 1


def test_moment_identity_m1_r2():
    # integral of q^{m(x+sum x_j)} q^{-sum j x_j} against mu_{-1}^r
    ctx = padic(3)
    m, r, x = 1, 2, 0
    f = Integrand(lambda c, a, b: c.q_pow(m * (x + a + b) - a - 2 * b), 2)
    res = multivariate_fermionic_integral(ctx, f, MeasureSpec.fermionic(2), 3)
    closed = 2**r * ctx.q_pow(m * x) / q_pochhammer(ctx, -ctx.q_pow(m - r), r)
    assert (res.value - closed).valuation() >= res.precision


def test_weighted_measures():
    ctx = padic(3)
    w, delta = (1, 1), (1, 2)
    f = bracket_power_integrand(1, 0, 2, w)
    res = multivariate_fermionic_integral(ctx, f, MeasureSpec(delta), 3)
    assert (res.value - euler_weighted(ctx, 1, 0, w, delta)).valuation() >= res.precision


def test_weighted_star_measure():
    ctx = padic(3)
    w, delta = (1, 2), (0, 1)
    f = bracket_power_integrand(1, 0, 2, w)
    res = multivariate_fermionic_integral(ctx, f, MeasureSpec((0, 0), delta), 3)
    assert (res.value - euler_weighted_star(ctx, 1, 0, w, delta)).valuation() >= res.precision


def test_linear_form_fast_path_equals_grid():
    sctx = RationalContext(Fraction(4))
    f = bracket_power_integrand(3, 1, 2, (1, 2))
    m = MeasureSpec((0, 1), (1, -1))
    for N in (1, 2):
        assert multivariate_sum_level(sctx, f, m, N, p=3) == \
            multivariate_sum_level(sctx, f.without_structure(), m, N, p=3)


@settings(max_examples=15)
@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1), st.integers(0, 1))
def test_separable_integrand_factorizes(a, b, d1, d2):
    sctx = RationalContext(Fraction(6))
    f1 = lambda c, x: q_bracket(c, x) ** a
    f2 = lambda c, x: q_bracket(c, x + 1) ** b
    prod = Integrand(lambda c, x, y: f1(c, x) * f2(c, y), 2)
    for N in (1, 2):
        joint = multivariate_sum_level(sctx, prod, MeasureSpec((d1, d2)), N, p=5)
        assert joint == fermionic_sum_level(sctx, f1, d1, N, p=5) * fermionic_sum_level(sctx, f2, d2, N, p=5)


def test_level_sum_by_geometric_summation():
    # f(x) = [x]_q at level 1, p = 3, mu_{-1}: sum_x [x] (-1)^x = 0 - 1 + (1 + q)
    q0 = Fraction(4)
    sctx = RationalContext(q0)
    assert fermionic_sum_level(sctx, lambda c, x: q_bracket(c, x), 0, 1, p=3) == q0
    # degree 2, level 2 against the closed geometric form
    N, p = 2, 3
    size = p**N
    s = fermionic_sum_level(sctx, lambda c, x: q_bracket(c, x) ** 2, 0, N, p=p)
    # [x]^2 = (1 - 2q^x + q^{2x})/(1-q)^2, and sum (-1)^x t^x = (1 + t^size)/(1 + t)
    geo = lambda t: (1 + t**size) / (1 + t)
    assert s == (geo(1) - 2 * geo(q0) + geo(q0**2)) / (1 - q0) ** 2


def test_budget_guard():
    ctx = padic(5)
    with pytest.raises(BudgetExceededError):
        multivariate_fermionic_integral(ctx, constant_integrand(arity=3), MeasureSpec.fermionic(3), 4)
    with pytest.raises(BudgetExceededError):
        fermionic_sum_level(ctx, constant_integrand(), 0, 3, budget=100)


def test_arity_mismatch():
    with pytest.raises(ValueError):
        multivariate_sum_level(padic(), constant_integrand(arity=2), MeasureSpec.fermionic(3), 1)


def test_shift_relation_constant():
    rep = shift_relation_check(padic(), lambda c, x: c.one, 1, [1, 2, 3])
    assert rep.defect_valuations == [float("inf")] * 3


def test_shift_relation_bracket():
    rep = shift_relation_check(padic(), lambda c, x: q_bracket(c, x), 2, [2, 3, 4])
    for N, v in zip(rep.levels, rep.defect_valuations):
        assert v >= N - 1
    assert rep.shrinking


def test_shift_relation_weighted_family():
    # n = 1 with f(x) = q^{(h-1)x}[x+c]^m
    h, c0, m = 2, 1, 2
    rep = shift_relation_check(padic(), lambda c, x: c.q_pow((h - 1) * x) * q_bracket(c, x + c0) ** m, 1, [1, 2, 3])
    assert rep.defect_valuations[-1] >= 2


def test_stabilization_flag_and_precision_cap():
    ctx = padic(3, 6)
    res = fermionic_integral(ctx, lambda c, x: c(x), 0, 4)
    assert res.precision <= 6
    assert res.precision == min(res.diff_valuations + [6])
    assert res.stabilized == all(d > 0 for d in res.diff_valuations)
    assert res.monotone == all(a <= b for a, b in zip(res.diff_valuations, res.diff_valuations[1:]))


def test_monotonicity_violation_is_reported_not_fatal():
    ctx = padic(3)
    res = multivariate_fermionic_integral(ctx, bracket_power_integrand(3, 2, 3), MeasureSpec.extended(3, 3), 3)
    assert res.diff_valuations == [8, 5]
    assert not res.monotone and res.stabilized


def test_nonconvergent_integrand_is_flagged():
    # x -> 1/(x+1) is not continuous on Z_p; its level sums do not settle
    ctx = padic(3)
    res = fermionic_integral(ctx, lambda c, x: c(Fraction(1, x + 1)), 0, 4)
    assert not res.stabilized


def test_corpus_stabilizes_monotonically():
    ctx = padic(3)
    nonmonotone = []
    for n in range(4):
        res = fermionic_integral(ctx, bracket_power_integrand(n), 0, 4)
        assert res.stabilized
        if not res.monotone:
            nonmonotone.append(n)
    assert nonmonotone == []


def test_padic_needs_matching_prime():
    with pytest.raises(ValueError):
        fermionic_sum_level(padic(3), constant_integrand(), 0, 1, p=5)
    with pytest.raises(ValueError):
        fermionic_sum_level(RationalContext(Fraction(4)), constant_integrand(), 0, 1)
