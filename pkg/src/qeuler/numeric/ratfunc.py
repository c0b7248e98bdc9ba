"""Rational functions in one indeterminate ``q`` with integer coefficients.

Numerator and denominator are ``flint.fmpz_poly`` values kept in canonical
form: coprime in Z[q] and with a positive leading denominator coefficient.
Because Z[q] is a UFD this form is unique, so equality of rational
functions is equality of the stored pairs.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from flint import fmpz_poly

_ONE = fmpz_poly([1])
_ZERO = fmpz_poly([])


def _poly_eval(coeffs: list[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _reverse(poly: fmpz_poly, degree: int) -> fmpz_poly:
    """``q**degree * poly(1/q)`` for ``degree >= deg(poly)``."""
    coeffs = [int(c) for c in poly.coeffs()]
    coeffs += [0] * (degree + 1 - len(coeffs))
    return fmpz_poly(coeffs[::-1])


class RationalFunction:
    """An element of Q(q), stored as a canonical ratio of fmpz_poly."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _canonical: bool = False):
        num = _as_poly_pair(num)
        if den is None:
            n, d = num
        else:
            den = _as_poly_pair(den)
            n, d = num[0] * den[1], num[1] * den[0]
        if d.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _canonical:
            n, d = _canonicalize(n, d)
        self.num = n
        self.den = d

    # -- constructors -------------------------------------------------
    @classmethod
    def q(cls) -> "RationalFunction":
        return cls._raw(fmpz_poly([0, 1]), _ONE)

    @classmethod
    def from_coeffs(cls, num: list[int], den: list[int] | None = None) -> "RationalFunction":
        """Build from ascending coefficient lists."""
        return cls(fmpz_poly(list(num)), fmpz_poly(list(den)) if den is not None else None)

    @classmethod
    def _raw(cls, num: fmpz_poly, den: fmpz_poly) -> "RationalFunction":
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    # -- queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree() == 0 and int(self.den[0]) == 1

    def numerator_coeffs(self) -> list[int]:
        return [int(c) for c in self.num.coeffs()]

    def denominator_coeffs(self) -> list[int]:
        return [int(c) for c in self.den.coeffs()]

    def eval_at(self, q0) -> Fraction:
        """Exact value at the rational point ``q0``; raises at a pole."""
        q0 = Fraction(q0)
        d = _poly_eval(self.denominator_coeffs(), q0)
        if d == 0:
            raise ZeroDivisionError(f"pole at q = {q0}")
        return _poly_eval(self.numerator_coeffs(), q0) / d

    def subs_inverse(self) -> "RationalFunction":
        """Substitute ``q -> 1/q`` and canonicalize."""
        dn, dd = max(self.num.degree(), 0), max(self.den.degree(), 0)
        n = _reverse(self.num, dn)
        d = _reverse(self.den, dd)
        # f(1/q) = q**dd * n / (q**dn * d)
        if dd >= dn:
            n = n * fmpz_poly([0] * (dd - dn) + [1])
        else:
            d = d * fmpz_poly([0] * (dn - dd) + [1])
        return RationalFunction(n, d)

    def canonical(self) -> "RationalFunction":
        return RationalFunction(self.num, self.den)

    # -- arithmetic ---------------------------------------------------
    def __neg__(self):
        return RationalFunction._raw(-self.num, self.den)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        if o.is_polynomial():
            return RationalFunction._raw(self.num + o.num * self.den, self.den)
        if self.is_polynomial():
            return RationalFunction._raw(o.num + self.num * o.den, o.den)
        g = self.den.gcd(o.den)
        if g.is_one():
            return RationalFunction._raw(self.num * o.den + o.num * self.den, self.den * o.den)
        d1 = self.den / g
        d2 = o.den / g
        n = self.num * d2 + o.num * d1
        g2 = n.gcd(g)
        if not g2.is_one():
            n = n / g2
            g = g / g2
        return RationalFunction(n, d1 * d2 * g)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return RationalFunction._raw(_ZERO, _ONE)
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n1, d2 = (self.num, o.den) if g1.is_one() else (self.num / g1, o.den / g1)
        n2, d1 = (o.num, self.den) if g2.is_one() else (o.num / g2, self.den / g2)
        return RationalFunction._raw(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        n, d = self.den, self.num
        if int(d.leading_coefficient()) < 0:
            n, d = -n, -d
        return RationalFunction._raw(n, d)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        return RationalFunction._raw(self.num**e, self.den**e)

    def __eq__(self, other) -> bool:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash((tuple(self.numerator_coeffs()), tuple(self.denominator_coeffs())))

    def __repr__(self) -> str:
        from ..render import format_ratfunc

        return f"RationalFunction({format_ratfunc(self)!r})"


def _canonicalize(n: fmpz_poly, d: fmpz_poly) -> tuple[fmpz_poly, fmpz_poly]:
    if n.is_zero():
        return _ZERO, _ONE
    g = n.gcd(d)
    if not g.is_one():
        n = n / g
        d = d / g
    if int(d.leading_coefficient()) < 0:
        n, d = -n, -d
    return n, d


def _as_poly_pair(value) -> tuple[fmpz_poly, fmpz_poly]:
    if isinstance(value, RationalFunction):
        return value.num, value.den
    if isinstance(value, fmpz_poly):
        return value, _ONE
    if isinstance(value, (int, Rational)) and not isinstance(value, bool):
        f = Fraction(value)
        return fmpz_poly([f.numerator]), fmpz_poly([f.denominator])
    raise TypeError(f"cannot interpret {value!r} as a rational function")


def _coerce(value):
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, (int, Rational)) and not isinstance(value, bool):
        f = Fraction(value)
        return RationalFunction._raw(fmpz_poly([f.numerator]), fmpz_poly([f.denominator]))
    return NotImplemented


def ratfunc_eval_at(f: RationalFunction, q0) -> Fraction:
    """Evaluate a canonical rational function at a rational point.

    Because ``f`` is stored reduced, removable singularities such as
    ``(1 - q**2)/(1 - q)`` at ``q = 1`` have already cancelled.
    """
    return f.eval_at(q0)
