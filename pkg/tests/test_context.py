from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qeuler.numeric import (
    BackendMismatchError,
    FunctionFieldContext,
    PadicContext,
    RationalContext,
    RationalFunction,
    padic_from_rational,
    q_power_extended,
    scalar_arith,
)

q = RationalFunction.q()


def test_scalar_arith_rationals():
    assert scalar_arith(Fraction(1, 2), Fraction(1, 3), "add") == Fraction(5, 6)
    assert scalar_arith(Fraction(1, 2), Fraction(1, 3), "eq") is False
    assert scalar_arith(Fraction(1, 2), None, "neg") == Fraction(-1, 2)


def test_scalar_arith_function_field_cancels():
    assert scalar_arith((1 - q**2) / (1 - q), 1 + q, "div") == 1


def test_scalar_arith_padic_product():
    a = padic_from_rational(3, 3, 4)
    out = scalar_arith(a, a, "mul")
    assert (out.val, out.unit, out.prec) == (2, 1, 4)


def test_scalar_arith_rejects_mixed_backends():
    with pytest.raises(BackendMismatchError):
        scalar_arith(Fraction(1), q, "add")
    with pytest.raises(BackendMismatchError):
        scalar_arith(padic_from_rational(1, 3, 4), Fraction(1), "mul")


def test_scalar_arith_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        scalar_arith(Fraction(1), Fraction(0), "div")


def test_rational_backend_rejects_q_equal_one():
    with pytest.raises(ValueError):
        RationalContext(Fraction(1))


def test_padic_backend_needs_q_close_to_one():
    with pytest.raises(ValueError):
        PadicContext(3, 10, Fraction(2))
    assert PadicContext(3, 10).q_exact == 4


def test_q_power_extended_integers():
    ff = FunctionFieldContext()
    assert q_power_extended(ff, 0) == 1
    assert q_power_extended(ff, 3) == q**3
    assert q_power_extended(RationalContext(Fraction(1, 2)), -2) == 4


def test_q_power_extended_minus_one_as_padic_integer():
    ctx = PadicContext(3, 12)
    minus_one = ctx(-1)
    got = q_power_extended(ctx, minus_one)
    assert got == ctx(Fraction(1, 4))


def test_q_power_extended_rejects_nonintegral_outside_padic():
    with pytest.raises(TypeError):
        q_power_extended(RationalContext(Fraction(1, 2)), Fraction(1, 2))


@given(st.integers(-200, 200), st.integers(-200, 200), st.sampled_from([3, 5]))
def test_q_power_extended_is_additive(y1, y2, p):
    ctx = PadicContext(p, 10)
    a = q_power_extended(ctx, ctx(y1))
    b = q_power_extended(ctx, ctx(y2))
    c = q_power_extended(ctx, ctx(y1 + y2))
    assert a * b == c
    assert c == ctx.embed(Fraction(p + 1) ** (y1 + y2))


@given(st.fractions(max_denominator=50).filter(lambda f: f.denominator % 3 != 0))
def test_q_power_extended_at_rational_3adic_integer(y):
    ctx = PadicContext(3, 8)
    a = q_power_extended(ctx, ctx(y))
    b = q_power_extended(ctx, ctx(-y))
    assert a * b == 1


def test_inverse_q_substitution():
    ctx = RationalContext(Fraction(2, 3))
    assert ctx.at_inverse_q(lambda c: c.q) == Fraction(3, 2)
    ff = FunctionFieldContext()
    assert ff.at_inverse_q(lambda c: c.q + 1) == 1 / q + 1
