from fractions import Fraction
from math import comb

import pytest
from flint import fmpz_poly

from qeuler.families import (
    EulerFamilySpec,
    GeneratingSeries,
    VanishingDenominatorError,
    classical_euler_oracle,
    classical_euler_umbral,
    euler_h_neg_r,
    euler_h_neg_r_lform,
    euler_hr,
    euler_hr_reversed,
    euler_order_neg_r,
    euler_order_neg_r_lform,
    euler_order_r,
    euler_q,
    euler_q_measure_q,
    euler_weighted,
    euler_weighted_star,
    generating_series,
    series_tail_eval,
)
from qeuler.integrator import (
    MeasureSpec,
    bracket_power_integrand,
    fermionic_integral,
    multivariate_fermionic_integral,
)
from qeuler.numeric import FunctionFieldContext, PadicContext, RationalContext, RationalFunction, ratfunc_eval_at
from qeuler.qkit import DivergentSeriesError, q_bracket, q_pochhammer

ff = FunctionFieldContext()
q = RationalFunction.q()


def close(a, b, res):
    return (a - b).valuation() >= res.precision


# -- n = 0 values ----------------------------------------------------------

def test_n0_values():
    for r in range(1, 4):
        assert euler_q(ff, 0, 2) == 1
        assert euler_order_r(ff, 0, r, 1) == 1
        assert euler_order_neg_r(ff, 0, r) == 1
        for h in range(-1, r + 2):
            assert euler_hr(ff, 0, h, r) == 2**r / q_pochhammer(ff, -q ** (h - r), r)
            assert euler_h_neg_r(ff, 0, h, r) == q_pochhammer(ff, -q ** (h - r), r) / 2**r
    assert euler_weighted(ff, 0, 0, (1, 2), (1, 3)) == 1
    assert euler_weighted_star(ff, 0, 0, (1, 2), (1, 3)) == 4 / ((1 + q) * (1 + q**3))


def test_small_values():
    assert euler_order_neg_r(ff, 1, 1, 0) == Fraction(1, 2)
    assert euler_hr(ff, 0, 2, 2) == 2 / (1 + q)
    assert euler_hr(ff, 3, 5, 0, 2) == q_bracket(ff, 2) ** 3


def test_h1_at_n0():
    for h in range(-2, 5):
        base = q ** (h - 1)
        assert euler_hr(ff, 0, h, 1) == 2 / (1 + base)


@pytest.mark.parametrize("n", range(4))
def test_weighted_unit_weights_reduce_to_order_r(n):
    for r in (1, 2, 3):
        assert euler_weighted_star(ff, n, 0, (1,) * r, (0,) * r) == euler_order_r(ff, n, r, 0)


def test_weighted_with_delta_zero_is_basic_family():
    for n in range(5):
        assert euler_weighted(ff, n, 0, (1,), (0,)) == euler_q(ff, n, 0)


def test_weighted_with_delta_one_is_the_mu_q_family():
    for n in range(5):
        w1 = euler_weighted(ff, n, 0, (1,), (1,))
        assert w1 == euler_q_measure_q(ff, n, 0)
    assert euler_weighted(ff, 1, 0, (1,), (1,)) != euler_q(ff, 1, 0)


def test_unnormalized_weighted_drops_factor():
    v = euler_weighted(ff, 3, 1, (1, 2), (1, 0))
    assert euler_weighted(ff, 3, 1, (1, 2), (1, 0), normalized=False) == v * (1 - q) ** 3


# -- dual forms ------------------------------------------------------------

@pytest.mark.parametrize("n", range(5))
def test_dual_forms(n):
    for r in range(1, 4):
        for x in range(3):
            assert euler_order_neg_r(ff, n, r, x) == euler_order_neg_r_lform(ff, n, r, x)
            for h in range(-1, r + 2):
                assert euler_h_neg_r(ff, n, h, r, x) == euler_h_neg_r_lform(ff, n, h, r, x)
                assert euler_hr_reversed(ff, n, h, r, x) == euler_hr(ff, n, h, r, x)


def test_negative_x_is_accepted():
    v = euler_q(ff, 2, -1)
    assert v == euler_order_r(ff, 2, 1, -1)
    assert euler_order_neg_r(ff, 2, 1, -1) == euler_order_neg_r_lform(ff, 2, 1, -1)


def test_bad_parameters():
    with pytest.raises(ValueError):
        euler_q(ff, -1)
    with pytest.raises(ValueError):
        euler_order_r(ff, 1, 0)
    with pytest.raises(ValueError):
        euler_q(ff, 1, Fraction(1, 2))
    with pytest.raises(TypeError):
        euler_q(ff, 1, 1.5)
    with pytest.raises(ValueError):
        euler_weighted(ff, 1, 0, (1, 2), (1,))


def test_vanishing_denominator():
    with pytest.raises(VanishingDenominatorError):
        euler_q(RationalContext(Fraction(-1)), 1)


# -- classical limit -------------------------------------------------------

def test_classical_values():
    assert [classical_euler_oracle(n) for n in range(6)] == [1, Fraction(-1, 2), 0, Fraction(1, 4), 0, Fraction(-1, 2)]
    for n in range(9):
        assert classical_euler_oracle(n, 0, 1) == classical_euler_umbral(n, 0, 1)
        assert classical_euler_oracle(0, Fraction(n, 3)) == 1


def test_two_classical_oracles_agree():
    for n in range(9):
        for r in range(1, 4):
            for x in (0, 1, 2, Fraction(1, 3)):
                assert classical_euler_oracle(n, x, r) == classical_euler_umbral(n, x, r)


@pytest.mark.parametrize("n", range(7))
def test_q_to_one_limit(n):
    for x in range(3):
        assert ratfunc_eval_at(euler_q(ff, n, x), 1) == classical_euler_oracle(n, x)
        for r in range(1, 4):
            assert ratfunc_eval_at(euler_order_r(ff, n, r, x), 1) == classical_euler_oracle(n, x, r)


# -- denominators -----------------------------------------------------------

def _cyclotomic_type_product(n: int, j_max: int, mult: int) -> fmpz_poly:
    out = fmpz_poly([1, -1]) ** n * fmpz_poly([0, 1]) ** (4 * j_max)
    for j in range(1, j_max + 1):
        out *= fmpz_poly([1] + [0] * (j - 1) + [1]) ** mult
    return out


@pytest.mark.parametrize("n", range(5))
def test_denominators_divide_cyclotomic_type_products(n):
    values = [euler_q(ff, n, 1), euler_order_r(ff, n, 2, 0), euler_hr(ff, n, 3, 2, 1),
              euler_hr(ff, n, 0, 3, 0), euler_weighted(ff, n, 0, (1, 2), (1, 1))]
    bound = _cyclotomic_type_product(n, 2 * n + 4, 3)
    for v in values:
        den = fmpz_poly(v.denominator_coeffs())
        assert bound % den == 0


# -- integrals ---------------------------------------------------------------

P3 = PadicContext(3, 20)


def test_basic_family_is_the_mu_minus_one_integral():
    # level-N error of [x]^n sums has valuation >= N + 1 - n at q = 1 + 3
    N, n = 5, 2
    res = fermionic_integral(P3, bracket_power_integrand(n), 0, N)
    assert close(res.value, euler_q(P3, n, 0), res)
    assert (res.value - euler_q(P3, n, 0)).valuation() >= N + 1 - n
    res_q = fermionic_integral(P3, bracket_power_integrand(n), 1, N)
    assert (res_q.value - euler_q_measure_q(P3, n, 0)).valuation() >= N + 1 - n
    assert (res_q.value - euler_q(P3, n, 0)).valuation() < N + 1 - n


def test_order_r_integral():
    res = multivariate_fermionic_integral(P3, bracket_power_integrand(2, 0, 2), MeasureSpec.fermionic(2), 3)
    assert close(res.value, euler_order_r(P3, 2, 2, 0), res)


def test_hr_integral():
    res = multivariate_fermionic_integral(P3, bracket_power_integrand(2, 1, 2), MeasureSpec.extended(2, 2), 3)
    assert close(res.value, euler_hr(P3, 2, 2, 2, 1), res)


def test_h1_family_against_single_integral():
    for h in (0, 2, 3):
        for n in range(5):
            res = multivariate_fermionic_integral(P3, bracket_power_integrand(n, 0, 1),
                                                  MeasureSpec.extended(h, 1), 4)
            closed = euler_hr(P3, n, h, 1, 0)
            assert (res.value - closed).valuation() >= min(res.precision, 4 - n + 1)


def test_weighted_integrals():
    res = multivariate_fermionic_integral(P3, bracket_power_integrand(1, 0, 2, (1, 1)), MeasureSpec((1, 2)), 3)
    assert close(res.value, euler_weighted(P3, 1, 0, (1, 1), (1, 2)), res)
    res = multivariate_fermionic_integral(P3, bracket_power_integrand(1, 0, 2, (1, 2)),
                                          MeasureSpec((0, 0), (0, 1)), 3)
    assert close(res.value, euler_weighted_star(P3, 1, 0, (1, 2), (0, 1)), res)


def test_padic_x():
    ctx = PadicContext(3, 12)
    x = ctx(Fraction(1, 2))
    # [x]_q^n at a p-adic x: compare with the integer representative mod 3^K
    v = euler_q(ctx, 2, x)
    w = euler_q(ctx, 2, x.lift())
    assert (v - w).valuation() >= 6


# -- specs, series -----------------------------------------------------------

def test_spec_validation():
    with pytest.raises(ValueError):
        EulerFamilySpec("basic", 2, r=1)
    with pytest.raises(ValueError):
        EulerFamilySpec("hr", 2, r=1)
    with pytest.raises(ValueError):
        EulerFamilySpec("nope", 1)
    spec = EulerFamilySpec("hr", 2, r=2, h=3, x=1)
    assert spec.params() == {"n": 2, "h": 3, "r": 2, "x": 1}
    assert spec.evaluate(ff) == euler_hr(ff, 2, 3, 2, 1)
    assert EulerFamilySpec("classical", 3).evaluate() == Fraction(1, 4)


def test_generating_series():
    gs = generating_series(None, EulerFamilySpec("classical", 0), 5)
    assert gs.order == 5 and len(gs.coefficients) == 6
    assert gs.coefficients[3] == Fraction(1, 4)
    with pytest.raises(ValueError):
        GeneratingSeries(3, [1, 2])


def test_series_tail_hr():
    rep = series_tail_eval(RationalContext(Fraction(1, 2)), EulerFamilySpec("hr", 0, r=1, h=2), 60)
    assert rep.ok
    assert rep.remainder < Fraction(1, 2**40)
    assert rep.closed_form == 2 / (1 + Fraction(1, 2))


def test_series_tail_hr_higher_order():
    rep = series_tail_eval(RationalContext(Fraction(1, 3)), EulerFamilySpec("hr", 2, r=2, h=4, x=1), 60)
    assert rep.ok and rep.remainder < Fraction(1, 10**20)


def test_series_tail_basic():
    rep = series_tail_eval(RationalContext(Fraction(1, 3)), EulerFamilySpec("basic", 1), 80)
    assert rep.ok and rep.remainder < Fraction(1, 2**40)


def test_series_tail_rejections():
    ctx = RationalContext(Fraction(1, 2))
    for h in (0, 1, 2):
        with pytest.raises(DivergentSeriesError):
            series_tail_eval(ctx, EulerFamilySpec("hr", 1, r=2, h=h), 10)
    with pytest.raises(DivergentSeriesError):
        series_tail_eval(RationalContext(Fraction(2)), EulerFamilySpec("basic", 1), 10)
    with pytest.raises(DivergentSeriesError):
        series_tail_eval(ctx, EulerFamilySpec("r", 1, r=2), 10)
    with pytest.raises(TypeError):
        series_tail_eval(ff, EulerFamilySpec("basic", 1), 10)
