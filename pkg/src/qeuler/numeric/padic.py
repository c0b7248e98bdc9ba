"""Finite-precision p-adic numbers with explicit precision bookkeeping.

A :class:`PadicNumber` stores ``p**val * unit`` known modulo ``p**prec``
(``prec`` is the *absolute* precision).  The unit is reduced modulo
``p**(prec - val)``, so the number of significant digits is ``prec - val``.

Precision propagates the way it does for honest interval arithmetic on
``Z_p``: sums keep the smaller absolute precision, products and quotients
keep the smaller relative precision.  No result claims more absolute
precision than the most precise p-adic operand it came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

INFINITY = math.inf


class PrecisionError(ArithmeticError):
    """Raised when an operation would leave no correct p-adic digits."""


class BackendMismatchError(TypeError):
    """Raised when scalars from incompatible backends are combined."""


def is_odd_prime(p: int) -> bool:
    if not isinstance(p, int) or p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def valuation(value, p: int) -> float:
    """Return v_p of an integer or rational (``INFINITY`` for zero)."""
    value = Fraction(value)
    if value == 0:
        return INFINITY
    return _int_val(value.numerator, p) - _int_val(value.denominator, p)


def _int_val(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _check_prime_and_prec(p: int, prec: int) -> None:
    if not is_odd_prime(p):
        raise ValueError(f"p must be an odd prime, got {p!r}")
    if not isinstance(prec, int) or prec < 1:
        raise ValueError(f"precision must be a positive integer, got {prec!r}")


@dataclass(frozen=True, eq=False)
class PadicNumber:
    prime: int
    prec: int
    val: float  # int, or INFINITY for zero
    unit: int   # 0 for zero

    __hash__ = None  # equality is "indistinguishable at shared precision"

    # -- construction -------------------------------------------------
    @classmethod
    def zero(cls, p: int, prec: int) -> "PadicNumber":
        return cls(p, prec, INFINITY, 0)

    @classmethod
    def _from_scaled(cls, p: int, prec: int, shift: int, m: int) -> "PadicNumber":
        """Normalize ``p**shift * m`` known modulo ``p**prec``."""
        if m == 0 or shift >= prec:
            return cls.zero(p, prec)
        m %= p ** (prec - shift)
        if m == 0:
            return cls.zero(p, prec)
        k = _int_val(m, p)
        v = shift + k
        return cls(p, prec, v, (m // p**k) % p ** (prec - v))

    # -- basic queries ------------------------------------------------
    def is_zero(self) -> bool:
        return self.val == INFINITY

    @property
    def relative_precision(self) -> float:
        return INFINITY if self.is_zero() else self.prec - self.val

    def valuation(self) -> float:
        return self.val

    def digits(self) -> list[int]:
        """Digits of the unit, least significant first."""
        if self.is_zero():
            return []
        out, u = [], self.unit
        for _ in range(int(self.prec - self.val)):
            u, d = divmod(u, self.prime)
            out.append(d)
        return out

    def to_fraction(self) -> Fraction:
        """The canonical rational representative ``p**val * unit``."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.prime) ** self.val

    def lift(self) -> int:
        """Integer representative in ``[0, p**prec)``; requires ``val >= 0``."""
        if self.is_zero():
            return 0
        if self.val < 0:
            raise ValueError("not a p-adic integer")
        return (self.unit * self.prime**self.val) % self.prime**self.prec

    def with_precision(self, prec: int) -> "PadicNumber":
        """Reduce to a lower absolute precision."""
        if prec > self.prec:
            raise ValueError("cannot raise precision")
        if self.is_zero():
            return PadicNumber.zero(self.prime, prec)
        return PadicNumber._from_scaled(self.prime, prec, int(self.val), self.unit)

    # -- coercion -----------------------------------------------------
    def _coerce(self, other) -> tuple["PadicNumber", bool]:
        """Return ``(other_as_padic, other_was_padic)``."""
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise BackendMismatchError(
                    f"{self.prime}-adic and {other.prime}-adic numbers do not mix"
                )
            return other, True
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            c = Fraction(other)
            vc = valuation(c, self.prime)
            # an exact constant must never be the precision bottleneck
            rel = self.prec if self.is_zero() else self.prec - self.val
            extra = 0 if vc == INFINITY else max(0, int(vc))
            prec = int(max(self.prec, rel + extra)) + abs(0 if vc == INFINITY else int(vc)) + 1
            return padic_from_rational(c, self.prime, prec), False
        return NotImplemented, False

    def _cap(self, other: "PadicNumber", other_padic: bool) -> int:
        return max(self.prec, other.prec) if other_padic else self.prec

    # -- arithmetic ---------------------------------------------------
    def __neg__(self) -> "PadicNumber":
        if self.is_zero():
            return self
        return PadicNumber(self.prime, self.prec, self.val,
                           (-self.unit) % self.prime ** int(self.prec - self.val))

    def __pos__(self) -> "PadicNumber":
        return self

    def __add__(self, other):
        b, _ = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        p = self.prime
        prec = min(self.prec, b.prec)
        if self.is_zero():
            return b.with_precision(prec) if b.prec > prec else b
        if b.is_zero():
            return self.with_precision(prec) if self.prec > prec else self
        v0 = int(min(self.val, b.val))
        m = self.unit * p ** int(self.val - v0) + b.unit * p ** int(b.val - v0)
        return PadicNumber._from_scaled(p, prec, v0, m)

    __radd__ = __add__

    def __sub__(self, other):
        b, _ = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self + (-b)

    def __rsub__(self, other):
        b, _ = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return b + (-self)

    def __mul__(self, other):
        b, was_padic = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        p = self.prime
        va = self.prec if self.is_zero() else self.val
        vb = b.prec if b.is_zero() else b.val
        prec = int(min(self.prec + vb, b.prec + va, self._cap(b, was_padic)))
        if self.is_zero() or b.is_zero():
            if prec <= 0:
                raise PrecisionError("product carries no correct digits")
            return PadicNumber.zero(p, prec)
        v = int(self.val + b.val)
        if prec - v <= 0:
            if prec <= 0:
                raise PrecisionError("product carries no correct digits")
            return PadicNumber.zero(p, prec)
        return PadicNumber(p, prec, v, (self.unit * b.unit) % p ** (prec - v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b, was_padic = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return _divide(self, b, self._cap(b, was_padic))

    def __rtruediv__(self, other):
        a, _ = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return _divide(a, self, self.prec)

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return 1 / (self ** (-e))
        result = padic_from_rational(1, self.prime, self.prec)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        b, _ = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return (self - b).is_zero()

    def __repr__(self) -> str:
        v = "inf" if self.is_zero() else int(self.val)
        return f"PadicNumber(p={self.prime}, val={v}, unit={self.unit}, prec={self.prec})"


def _divide(a: PadicNumber, b: PadicNumber, cap: int) -> PadicNumber:
    if b.is_zero():
        raise PrecisionError("divisor is indistinguishable from zero at its precision")
    p = a.prime
    vb = int(b.val)
    if a.is_zero():
        prec = min(a.prec - vb, cap)
        if prec <= 0:
            raise PrecisionError("quotient carries no correct digits")
        return PadicNumber.zero(p, prec)
    v = int(a.val) - vb
    rel = int(min(a.prec - a.val, b.prec - b.val))
    prec = min(v + rel, cap)
    if prec - v <= 0:
        raise PrecisionError("quotient carries no correct digits")
    mod = p ** (prec - v)
    return PadicNumber(p, prec, v, (a.unit * pow(b.unit, -1, mod)) % mod)


def padic_from_rational(r, p: int, prec: int) -> PadicNumber:
    """Embed a rational number into Q_p, known modulo ``p**prec``."""
    _check_prime_and_prec(p, prec)
    r = Fraction(r)
    if r == 0:
        return PadicNumber.zero(p, prec)
    a = _int_val(r.numerator, p)
    b = _int_val(r.denominator, p)
    v = a - b
    if v >= prec:
        return PadicNumber.zero(p, prec)
    mod = p ** (prec - v)
    num = r.numerator // p**a
    den = r.denominator // p**b
    return PadicNumber(p, prec, v, (num * pow(den, -1, mod)) % mod)


def padic_div_tracked(a: PadicNumber, b: PadicNumber) -> PadicNumber:
    """Quotient ``a / b``; the result's ``prec`` is the achieved precision.

    Raises :class:`PrecisionError` when no correct digit survives, which
    is what happens when dividing by ``(1 - q)**n`` with ``n * v_p(1 - q)``
    at or beyond the working precision.
    """
    return a / b
