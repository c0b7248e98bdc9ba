"""Field contexts: where ``q`` lives and how scalars are built.

Three backends share one small surface (``ctx(value)``, ``ctx.q``,
``ctx.q_pow(k)``, ``ctx.zero``/``ctx.one``) so that every q-analog and
every Euler family is written once:

* ``RationalContext``: q is a rational number, scalars are ``Fraction``.
* ``FunctionFieldContext``: q is the indeterminate, scalars are
  :class:`RationalFunction`.
* ``PadicContext``: q is a p-adic number with ``|1 - q|_p < 1``, scalars
  are :class:`PadicNumber`.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any, Callable

from .padic import (
    INFINITY,
    BackendMismatchError,
    PadicNumber,
    _check_prime_and_prec,
    padic_from_rational,
    valuation,
)
from .ratfunc import RationalFunction


class FieldContext:
    kind: str = ""

    def __post_init__(self):
        object.__setattr__(self, "_memo", {})
        object.__setattr__(self, "_powers", {})

    # subclasses provide: q, __call__, describe
    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def memo(self, key, thunk: Callable[[], Any]):
        """Memoize ``thunk()`` under ``key`` for the life of this context."""
        table = self._memo
        try:
            return table[key]
        except KeyError:
            value = table[key] = thunk()
            return value

    def q_pow(self, k: int):
        table = self._powers
        try:
            return table[k]
        except KeyError:
            value = table[k] = self.q**k
            return value

    def is_zero(self, a) -> bool:
        return a == 0

    def equal(self, a, b) -> bool:
        return a == b

    def at_inverse_q(self, fn: Callable[["FieldContext"], Any]):
        """Evaluate ``fn`` with q replaced by 1/q."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class RationalContext(FieldContext):
    q: Fraction
    kind: str = field(default="rat", init=False)

    def __post_init__(self):
        q = Fraction(self.q)
        if q == 1:
            raise ValueError("q = 1 is not allowed in the rational backend; "
                             "take the limit through the function field instead")
        object.__setattr__(self, "q", q)
        super().__post_init__()

    def __call__(self, value) -> Fraction:
        if isinstance(value, (RationalFunction, PadicNumber)):
            raise BackendMismatchError(f"{type(value).__name__} in the rational backend")
        return Fraction(value)

    def at_inverse_q(self, fn):
        return fn(RationalContext(1 / self.q))

    def describe(self) -> str:
        return f"rat q={self.q}"


@dataclass(frozen=True, eq=False)
class FunctionFieldContext(FieldContext):
    kind: str = field(default="func", init=False)

    @property
    def q(self) -> RationalFunction:
        return RationalFunction.q()

    def __call__(self, value) -> RationalFunction:
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, PadicNumber):
            raise BackendMismatchError("p-adic number in the function-field backend")
        return RationalFunction(value)

    def at_inverse_q(self, fn):
        return fn(self).subs_inverse()

    def describe(self) -> str:
        return "func"


@dataclass(frozen=True, eq=False)
class PadicContext(FieldContext):
    """p-adic backend.  ``q`` may be given as a rational or a PadicNumber.

    When q is rational (the usual ``q = 1 + p``) the exact value is kept in
    ``q_exact`` so that Riemann sums can be formed in exact arithmetic and
    embedded afterwards.
    """

    prime: int
    prec: int
    q_value: Any = None
    kind: str = field(default="padic", init=False)

    def __post_init__(self):
        _check_prime_and_prec(self.prime, self.prec)
        qv = self.q_value
        if qv is None:
            qv = 1 + self.prime
        if isinstance(qv, PadicNumber):
            q_exact = None
            q = qv
            if q.prime != self.prime:
                raise BackendMismatchError("q has the wrong prime")
        else:
            q_exact = Fraction(qv)
            q = padic_from_rational(q_exact, self.prime, self.prec)
        if (q - 1).valuation() < 1:
            raise ValueError("the p-adic backend needs |1 - q|_p < 1")
        object.__setattr__(self, "q_exact", q_exact)
        object.__setattr__(self, "q", q)
        super().__post_init__()

    def __call__(self, value) -> PadicNumber:
        if isinstance(value, PadicNumber):
            if value.prime != self.prime:
                raise BackendMismatchError("wrong prime")
            return value
        if isinstance(value, RationalFunction):
            raise BackendMismatchError("rational function in the p-adic backend")
        return padic_from_rational(value, self.prime, self.prec)

    def embed(self, value) -> PadicNumber:
        return padic_from_rational(value, self.prime, self.prec)

    def exact_shadow(self) -> RationalContext | None:
        """The rational backend with the same q, when q is rational."""
        if self.q_exact is None:
            return None
        return self.memo(("exact-shadow",), lambda: RationalContext(self.q_exact))

    def at_inverse_q(self, fn):
        inv = 1 / self.q_exact if self.q_exact is not None else 1 / self.q
        return fn(PadicContext(self.prime, self.prec, inv))

    def is_zero(self, a) -> bool:
        return self(a).is_zero()

    def describe(self) -> str:
        q = self.q_exact if self.q_exact is not None else self.q
        return f"padic p={self.prime} prec={self.prec} q={q}"


_OPS = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def _backend_of(x) -> str:
    if isinstance(x, RationalFunction):
        return "func"
    if isinstance(x, PadicNumber):
        return f"padic{x.prime}"
    if isinstance(x, (int, Rational)) and not isinstance(x, bool):
        return "rat"
    raise TypeError(f"not a scalar: {x!r}")


def scalar_arith(a, b, op: str):
    """Apply ``op`` in {add, sub, mul, div, neg, eq} to two same-backend scalars."""
    if op == "neg":
        return -a
    if _backend_of(a) != _backend_of(b):
        raise BackendMismatchError(f"cannot combine {_backend_of(a)} with {_backend_of(b)}")
    if op == "eq":
        return a == b
    if op == "div" and (b == 0 if not isinstance(b, PadicNumber) else False):
        raise ZeroDivisionError("division by zero")
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    return fn(a, b)


def q_power_extended(ctx: FieldContext, y):
    """``q**y`` for an integer ``y``, or a p-adic integer ``y`` in the p-adic backend.

    For p-adic ``y`` the value is the binomial series
    ``sum_i C(y, i) (q - 1)**i``, cut off once ``i * v_p(q - 1)`` reaches the
    working precision.  ``C(y, i)`` is taken at the integer representative of
    ``y``; the two agree modulo ``p**(prec_y - v_p(i!))``, which the factor
    ``(q - 1)**i`` more than absorbs.
    """
    if isinstance(y, int) and not isinstance(y, bool):
        return ctx.q_pow(y)
    if isinstance(y, Fraction) and y.denominator == 1:
        return ctx.q_pow(int(y))
    if not isinstance(ctx, PadicContext):
        raise TypeError("non-integer exponents need the p-adic backend")
    y = ctx(y)
    d = ctx.q - 1
    vd = d.valuation()
    if vd < 1:
        raise ValueError("q**y for p-adic y needs v_p(q - 1) >= 1")
    if y.is_zero():
        return ctx.one
    if y.valuation() < 0:
        raise ValueError("exponent is not a p-adic integer")
    target = int(min(ctx.prec, y.prec + vd))
    Y = y.lift()
    total = ctx.one
    term_pow = ctx.one
    coeff = 1
    i = 0
    while True:
        i += 1
        if i * vd >= target:
            break
        coeff = coeff * (Y - i + 1) // i
        term_pow = term_pow * d
        total = total + coeff * term_pow
    return total.with_precision(min(total.prec, target)) if total.prec > target else total


def padic_valuation_of(x, p: int) -> float:
    """v_p of a rational or PadicNumber (``INFINITY`` for zero)."""
    if isinstance(x, PadicNumber):
        return x.valuation()
    return valuation(x, p)


__all__ = [
    "FieldContext",
    "RationalContext",
    "FunctionFieldContext",
    "PadicContext",
    "scalar_arith",
    "q_power_extended",
    "padic_valuation_of",
    "INFINITY",
]
