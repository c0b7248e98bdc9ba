from fractions import Fraction

from hypothesis import given, strategies as st

from qeuler.numeric import PadicNumber, RationalFunction, padic_from_rational
from qeuler.render import format_padic, format_scalar, parse_padic, parse_scalar

q = RationalFunction.q()


def test_padic_rendering_format():
    x = padic_from_rational(1 + 2 * 3 + 27, 3, 4)
    assert format_padic(x) == "3-adic val=0 digits=[1,2,0,1] prec=4"


def test_zero_padic_rendering():
    z = PadicNumber.zero(5, 7)
    text = format_padic(z)
    assert text == "5-adic val=inf digits=[] prec=7"
    assert parse_padic(text).is_zero()


def test_ratfunc_roundtrip_examples():
    for f in (2 / (1 + q), (1 - 3 * q**4) / (2 + q**2), RationalFunction(0), -q):
        assert parse_scalar(format_scalar(f), "func") == f


@given(st.fractions())
def test_fraction_roundtrip(x):
    assert parse_scalar(format_scalar(x)) == x


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=5),
       st.lists(st.integers(-9, 9), min_size=1, max_size=4).filter(any))
def test_ratfunc_roundtrip(num, den):
    f = RationalFunction.from_coeffs(num, den)
    back = parse_scalar(format_scalar(f), "func")
    assert isinstance(back, RationalFunction) and back == f


@given(st.fractions(max_denominator=1000), st.sampled_from([3, 5, 7]), st.integers(1, 12))
def test_padic_roundtrip(x, p, K):
    v = padic_from_rational(x, p, K)
    back = parse_scalar(format_scalar(v))
    assert (back.prime, back.prec, back.val, back.unit) == (v.prime, v.prec, v.val, v.unit)


def test_constant_ratfunc_needs_backend_hint():
    text = format_scalar(RationalFunction(3))
    assert parse_scalar(text) == Fraction(3)
    assert parse_scalar(text, "func") == RationalFunction(3)
