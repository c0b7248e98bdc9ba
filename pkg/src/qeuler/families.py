"""Closed forms for the q-Euler families, the classical oracle and series tails.

Every family is written once against a :class:`~qeuler.numeric.FieldContext`.
The argument ``x`` is an integer in the rational and function-field
backends (negative values are fine, ``q^{lx}`` is then a Laurent monomial);
the p-adic backend also accepts a p-adic integer, handled through
:func:`~qeuler.numeric.q_power_extended`.

Naming: ``E^{(r)}_{n,q} = E^{(r)}_{n,q}(0)`` and ``E^{(-r)}_{n,q} = E^{(-r)}_{n,q}(0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Any

from .numeric.context import FieldContext, PadicContext, RationalContext, q_power_extended
from .numeric.padic import PadicNumber
from .qkit import DivergentSeriesError, gauss_binomial, q_bracket, q_pochhammer

__all__ = [
    "VanishingDenominatorError",
    "euler_q",
    "euler_q_measure_q",
    "euler_order_r",
    "euler_order_neg_r",
    "euler_order_neg_r_lform",
    "euler_hr",
    "euler_hr_reversed",
    "euler_h_neg_r",
    "euler_h_neg_r_lform",
    "euler_weighted",
    "euler_weighted_star",
    "classical_euler_oracle",
    "classical_euler_umbral",
    "EulerFamilySpec",
    "FAMILY_KINDS",
    "GeneratingSeries",
    "generating_series",
    "SeriesTailReport",
    "series_tail_eval",
]


class VanishingDenominatorError(ZeroDivisionError):
    """A closed form hit a zero denominator (only at degenerate q)."""


# -- helpers ---------------------------------------------------------------

def _check_x(ctx: FieldContext, x):
    if isinstance(x, PadicNumber):
        if not isinstance(ctx, PadicContext):
            raise TypeError("p-adic x needs the p-adic backend")
        return x
    if isinstance(x, Fraction):
        if x.denominator != 1:
            raise ValueError("x must be an integer (or a p-adic integer in the p-adic backend)")
        return int(x)
    if isinstance(x, bool) or not isinstance(x, int):
        raise TypeError(f"x must be an integer, got {x!r}")
    return x


def _q_lx(ctx, x, l: int):
    if isinstance(x, int):
        return ctx.q_pow(l * x)
    return q_power_extended(ctx, x) ** l


def _bracket_x(ctx, m: int, x):
    """[m + x]_q."""
    if isinstance(x, int):
        return q_bracket(ctx, m + x)
    return (1 - ctx.q_pow(m) * q_power_extended(ctx, x)) / (1 - ctx.q)


def _bracket_power(ctx, m: int, x, n: int):
    if n == 0:
        return ctx.one
    return _bracket_x(ctx, m, x) ** n


def _divide(ctx, num, den, what: str):
    if not isinstance(den, PadicNumber) and den == 0:
        raise VanishingDenominatorError(f"{what} vanishes at {ctx.describe()}")
    return num / den


def _l_form(ctx, n: int, x, weight, what: str):
    """(1-q)^{-n} sum_l C(n,l) (-1)^l q^{lx} weight(l)."""
    total = ctx.zero
    for l in range(n + 1):
        term = comb(n, l) * _q_lx(ctx, x, l) * weight(l)
        total = total + term if l % 2 == 0 else total - term
    if n == 0:
        return total
    return total / (1 - ctx.q) ** n


def _check_n(n: int):
    if n < 0:
        raise ValueError("n must be >= 0")


def _check_r(r: int, minimum: int = 1):
    if r < minimum:
        raise ValueError(f"r must be >= {minimum}")


# -- the families ---------------------------------------------------------

def euler_q(ctx: FieldContext, n: int, x=0):
    """E_{n,q}(x) = 2/(1-q)^n sum_l C(n,l)(-1)^l q^{lx}/(1+q^l).

    This is the mu_{-1} integral of [x+y]_q^n; see :func:`euler_q_measure_q`
    for the mu_{-q} version.
    """
    _check_n(n)
    x = _check_x(ctx, x)
    return euler_order_r(ctx, n, 1, x)


def euler_q_measure_q(ctx: FieldContext, n: int, x=0):
    """Integral of [x+y]_q^n against mu_{-q}:
    (1+q)/(1-q)^n sum_l C(n,l)(-1)^l q^{lx}/(1+q^{l+1})."""
    _check_n(n)
    x = _check_x(ctx, x)
    one_q = 1 + ctx.q
    return _l_form(ctx, n, x,
                   lambda l: _divide(ctx, one_q, 1 + ctx.q_pow(l + 1), "1+q^(l+1)"),
                   "mu_{-q}")


def euler_order_r(ctx: FieldContext, n: int, r: int, x=0):
    """E^{(r)}_{n,q}(x) = 2^r/(1-q)^n sum_l C(n,l)(-1)^l q^{lx} (1+q^l)^{-r}."""
    _check_n(n)
    _check_r(r)
    x = _check_x(ctx, x)

    def build():
        two_r = 2**r
        return _l_form(ctx, n, x,
                       lambda l: _divide(ctx, two_r, (1 + ctx.q_pow(l)) ** r, "1+q^l"),
                       "order r")

    if isinstance(x, int):
        return ctx.memo(("E_r", n, r, x), build)
    return build()


def euler_order_neg_r(ctx: FieldContext, n: int, r: int, x=0):
    """E^{(-r)}_{n,q}(x) = 2^{-r} sum_{m<=r} C(r,m) [m+x]_q^n."""
    _check_n(n)
    _check_r(r)
    x = _check_x(ctx, x)
    total = ctx.zero
    for m in range(r + 1):
        total = total + comb(r, m) * _bracket_power(ctx, m, x, n)
    return total / 2**r


def euler_order_neg_r_lform(ctx: FieldContext, n: int, r: int, x=0):
    """Same value as :func:`euler_order_neg_r` via (1+q^l)^r/2^r in the l-sum."""
    _check_n(n)
    _check_r(r)
    x = _check_x(ctx, x)
    return _l_form(ctx, n, x, lambda l: (1 + ctx.q_pow(l)) ** r / 2**r, "order -r")


def euler_hr(ctx: FieldContext, n: int, h: int, r: int, x=0):
    """E^{(h,r)}_{n,q}(x) = 2^r/(1-q)^n sum_l C(n,l)(-1)^l q^{lx}/(-q^{h-r+l};q)_r.

    ``r = 0`` is accepted and gives [x]_q^n (empty product of integrals).
    """
    _check_n(n)
    _check_r(r, 0)
    x = _check_x(ctx, x)

    def build():
        two_r = 2**r
        return _l_form(ctx, n, x,
                       lambda l: _divide(ctx, two_r, q_pochhammer(ctx, -ctx.q_pow(h - r + l), r),
                                         "(-q^(h-r+l);q)_r"),
                       "(h,r)")

    if isinstance(x, int):
        return ctx.memo(("E_hr", n, h, r, x), build)
    return build()


def euler_hr_reversed(ctx: FieldContext, n: int, h: int, r: int, x=0):
    """The (h,r) family with the Pochhammer taken downward: (-q^{h-1+l}; q^{-1})_r."""
    _check_n(n)
    _check_r(r)
    x = _check_x(ctx, x)
    two_r = 2**r
    return _l_form(ctx, n, x,
                   lambda l: _divide(ctx, two_r, q_pochhammer(ctx, -ctx.q_pow(h - 1 + l), r, -1),
                                     "(-q^(h-1+l);q^-1)_r"),
                   "(h,r) reversed")


def euler_h_neg_r(ctx: FieldContext, n: int, h: int, r: int, x=0):
    """E^{(h,-r)}_{n,q}(x) = 2^{-r} sum_{m<=r} q^{C(m,2)+(h-r)m} C_q(r,m) [m+x]_q^n."""
    _check_n(n)
    _check_r(r)
    x = _check_x(ctx, x)
    total = ctx.zero
    for m in range(r + 1):
        total = total + (ctx.q_pow(comb(m, 2) + (h - r) * m) * gauss_binomial(ctx, r, m)
                         * _bracket_power(ctx, m, x, n))
    return total / 2**r


def euler_h_neg_r_lform(ctx: FieldContext, n: int, h: int, r: int, x=0):
    """Same value via (-q^{h-r+l};q)_r / 2^r in the l-sum."""
    _check_n(n)
    _check_r(r)
    x = _check_x(ctx, x)
    return _l_form(ctx, n, x,
                   lambda l: q_pochhammer(ctx, -ctx.q_pow(h - r + l), r) / 2**r,
                   "(h,-r)")


def _weights(w, delta):
    w, delta = tuple(int(a) for a in w), tuple(int(d) for d in delta)
    if len(w) != len(delta) or not w:
        raise ValueError("weights and deltas must be nonempty and of equal length")
    return w, delta


def euler_weighted(ctx: FieldContext, n: int, x, w, delta, normalized: bool = True):
    """Integral of [x + sum w_j x_j]_q^n against prod_j mu_{-q^delta_j}.

    Closed form: sum_l C(n,l)(-1)^l q^{lx} prod_j (1+q^d_j)/(1+q^{d_j + l w_j}),
    times (1-q)^{-n}.  ``normalized=False`` drops that factor.
    """
    _check_n(n)
    x = _check_x(ctx, x)
    w, delta = _weights(w, delta)

    def weight(l):
        out = ctx.one
        for wj, dj in zip(w, delta):
            out = out * _divide(ctx, 1 + ctx.q_pow(dj), 1 + ctx.q_pow(dj + l * wj), "1+q^(d+lw)")
        return out

    value = _l_form(ctx, n, x, weight, "weighted")
    if not normalized and n:
        value = value * (1 - ctx.q) ** n
    return value


def euler_weighted_star(ctx: FieldContext, n: int, x, w, delta, normalized: bool = True):
    """Integral of q^{sum d_j x_j} [x + sum w_j x_j]_q^n against mu_{-1}^r.

    Closed form: 2^r sum_l C(n,l)(-1)^l q^{lx} / prod_j (1+q^{l w_j + d_j}),
    times (1-q)^{-n}.
    """
    _check_n(n)
    x = _check_x(ctx, x)
    w, delta = _weights(w, delta)
    two_r = 2 ** len(w)

    def weight(l):
        den = ctx.one
        for wj, dj in zip(w, delta):
            den = den * (1 + ctx.q_pow(l * wj + dj))
        return _divide(ctx, two_r, den, "prod (1+q^(lw+d))")

    value = _l_form(ctx, n, x, weight, "weighted star")
    if not normalized and n:
        value = value * (1 - ctx.q) ** n
    return value


# -- classical oracles ----------------------------------------------------

def classical_euler_oracle(n: int, x=0, r: int = 1) -> Fraction:
    """E^{(r)}_n(x) from the EGF (2/(e^t+1))^r e^{xt}, by exact series division."""
    _check_n(n)
    _check_r(r)
    x = Fraction(x)
    # A(t) = (e^t + 1)/2
    a = [Fraction(1)] + [Fraction(1, 2 * factorial(k)) for k in range(1, n + 1)]
    inv = [Fraction(1)]
    for k in range(1, n + 1):
        inv.append(-sum(a[i] * inv[k - i] for i in range(1, k + 1)))
    series = [Fraction(1)] + [Fraction(0)] * n
    for _ in range(r):
        series = [sum(series[i] * inv[k - i] for i in range(k + 1)) for k in range(n + 1)]
    coeff = sum(series[k] * x ** (n - k) / factorial(n - k) for k in range(n + 1))
    return coeff * factorial(n)


def classical_euler_umbral(n: int, x=0, r: int = 1) -> Fraction:
    """Same numbers from (E+1)^n + E_n = 2 delta_{n,0} and binomial convolution."""
    _check_n(n)
    _check_r(r)
    x = Fraction(x)
    e = [Fraction(1)]
    for m in range(1, n + 1):
        e.append(-sum(comb(m, j) * e[j] for j in range(m)) / 2)
    order = [Fraction(1)] + [Fraction(0)] * n
    for _ in range(r):
        order = [sum(comb(m, k) * order[k] * e[m - k] for k in range(m + 1)) for m in range(n + 1)]
    return sum(comb(n, k) * order[k] * x ** (n - k) for k in range(n + 1))


# -- specs, generating series, tails ---------------------------------------

FAMILY_KINDS = ("basic", "r", "neg-r", "hr", "h-neg-r", "weighted", "weighted-star", "classical")

_PARAMS = {
    "basic": ("x",),
    "r": ("r", "x"),
    "neg-r": ("r", "x"),
    "hr": ("h", "r", "x"),
    "h-neg-r": ("h", "r", "x"),
    "weighted": ("x", "weights", "deltas"),
    "weighted-star": ("x", "weights", "deltas"),
    "classical": ("x", "r"),
}


@dataclass(frozen=True)
class EulerFamilySpec:
    kind: str
    n: int
    r: int | None = None
    h: int | None = None
    x: Any = 0
    weights: tuple[int, ...] | None = None
    deltas: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in _PARAMS:
            raise ValueError(f"unknown family {self.kind!r}; expected one of {', '.join(FAMILY_KINDS)}")
        _check_n(self.n)
        allowed = _PARAMS[self.kind]
        for name in ("r", "h", "weights", "deltas"):
            if getattr(self, name) is not None and name not in allowed:
                raise ValueError(f"family {self.kind!r} takes no {name}")
        required = [name for name in allowed if name != "x"]
        if self.kind == "classical":
            required = []
        for name in required:
            if getattr(self, name) is None:
                raise ValueError(f"family {self.kind!r} needs {name}")
        if self.r is not None:
            _check_r(self.r)
        if self.weights is not None:
            w, d = _weights(self.weights, self.deltas)
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "deltas", d)

    def with_n(self, n: int) -> "EulerFamilySpec":
        return EulerFamilySpec(self.kind, n, self.r, self.h, self.x, self.weights, self.deltas)

    def params(self) -> dict:
        out = {"n": self.n}
        for name in _PARAMS[self.kind]:
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out

    def evaluate(self, ctx: FieldContext | None = None):
        k = self.kind
        if k == "classical":
            return classical_euler_oracle(self.n, self.x, self.r or 1)
        if ctx is None:
            raise ValueError(f"family {k!r} needs a field context")
        if k == "basic":
            return euler_q(ctx, self.n, self.x)
        if k == "r":
            return euler_order_r(ctx, self.n, self.r, self.x)
        if k == "neg-r":
            return euler_order_neg_r(ctx, self.n, self.r, self.x)
        if k == "hr":
            return euler_hr(ctx, self.n, self.h, self.r, self.x)
        if k == "h-neg-r":
            return euler_h_neg_r(ctx, self.n, self.h, self.r, self.x)
        if k == "weighted":
            return euler_weighted(ctx, self.n, self.x, self.weights, self.deltas)
        return euler_weighted_star(ctx, self.n, self.x, self.weights, self.deltas)


@dataclass
class GeneratingSeries:
    """Coefficients c_0..c_M of sum c_n t^n/n!."""

    order: int
    coefficients: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.coefficients) != self.order + 1:
            raise ValueError("a series of order M has M+1 coefficients")


def generating_series(ctx: FieldContext | None, spec: EulerFamilySpec, M: int) -> GeneratingSeries:
    return GeneratingSeries(M, [spec.with_n(n).evaluate(ctx) for n in range(M + 1)])


@dataclass
class SeriesTailReport:
    terms: int
    partial_sum: Fraction
    closed_form: Fraction
    remainder: Fraction
    remainder_bound: Fraction

    @property
    def ok(self) -> bool:
        return self.remainder <= self.remainder_bound


def series_tail_eval(ctx: RationalContext, spec: EulerFamilySpec, M: int) -> SeriesTailReport:
    """M+1 terms of a convergent series form, with a geometric tail bound.

    * ``hr`` with h > r: 2^r sum_m q^{(h-r)m} (-1)^m C_q(m+r-1, m) [x+m]_q^n.
    * ``basic``: the mu_{-q} series (1+q) sum_m (-q)^m [m+x]_q^n, compared with
      :func:`euler_q_measure_q`.

    Needs the rational backend, |q| < 1 and an integer x >= 0.
    """
    if not isinstance(ctx, RationalContext):
        raise TypeError("series evaluation runs in the rational backend")
    aq = abs(ctx.q)
    if aq >= 1:
        raise DivergentSeriesError("need |q| < 1")
    x = _check_x(ctx, spec.x)
    if x < 0:
        raise ValueError("series evaluation needs x >= 0")
    n = spec.n
    bracket_bound = (2 / (1 - aq)) ** n
    q = ctx.q
    partial = Fraction(0)
    if spec.kind == "hr":
        h, r = spec.h, spec.r
        if h <= r:
            raise DivergentSeriesError(
                "the (h,r) series converges only for h > r; check the identity "
                "algebraically with q_binomial_theorem_check instead")
        s = h - r
        for m in range(M + 1):
            partial += (-1) ** m * q ** (s * m) * gauss_binomial(ctx, m + r - 1, m) * _bracket_power(ctx, m, x, n)
        partial *= 2**r
        closed = euler_hr(ctx, n, h, r, x)
        coeff = Fraction(1)
        for j in range(1, r):
            coeff *= (1 + aq**j) / (1 - aq**j)
        bound = 2**r * coeff * bracket_bound * aq ** (s * (M + 1)) / (1 - aq**s)
    elif spec.kind == "basic":
        for m in range(M + 1):
            partial += (-q) ** m * _bracket_power(ctx, m, x, n)
        partial *= 1 + q
        closed = euler_q_measure_q(ctx, n, x)
        bound = (1 + aq) * bracket_bound * aq ** (M + 1) / (1 - aq)
    else:
        raise DivergentSeriesError(
            f"no convergent series form for family {spec.kind!r}; use the closed form "
            "or q_binomial_theorem_check")
    return SeriesTailReport(M + 1, partial, closed, abs(partial - closed), bound)
