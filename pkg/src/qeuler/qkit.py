"""q-analog combinatorics over any field context.

Brackets, factorials, Gaussian binomials, q-Pochhammer products, the
q-difference operator and Carlitz's q-Stirling numbers.  All functions
take a :class:`~qeuler.numeric.FieldContext` first and return scalars of
that backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Callable, Sequence

from .numeric.context import FieldContext, RationalContext

__all__ = [
    "q_bracket",
    "q_bracket_signed",
    "q_factorial",
    "gauss_binomial",
    "gauss_binomial_product",
    "q_pochhammer",
    "q_binomial_finite_sum",
    "q_binomial_theorem_check",
    "QBinomialReport",
    "DivergentSeriesError",
    "q_difference",
    "q_newton_interpolate",
    "q_stirling2",
    "q_stirling2_operator",
    "q_stirling1",
    "QStirlingTable",
    "q_stirling_table",
    "falling_bracket_product",
]


class DivergentSeriesError(ValueError):
    """The requested infinite series does not converge absolutely."""


def q_bracket(ctx: FieldContext, x: int):
    """[x]_q = (1 - q^x)/(1 - q), formed without dividing by 1 - q."""
    key = ("bracket", x)
    return ctx.memo(key, lambda: _bracket(ctx, x))


def _bracket(ctx, x):
    if x >= 0:
        total = ctx.zero
        for i in range(x):
            total = total + ctx.q_pow(i)
        return total
    # [-k]_q = -q^{-k} [k]_q
    return -ctx.q_pow(x) * _bracket(ctx, -x)


def q_bracket_signed(ctx: FieldContext, x: int):
    """[x]_{-q} = (1 - (-q)^x)/(1 + q)."""
    if x >= 0:
        total = ctx.zero
        for i in range(x):
            total = total + (-1) ** i * ctx.q_pow(i)
        return total
    # [-k]_{-q} = -(-1)^k q^{-k} [k]_{-q}
    sign = 1 if x % 2 == 0 else -1
    return -sign * ctx.q_pow(x) * q_bracket_signed(ctx, -x)


def q_factorial(ctx: FieldContext, n: int):
    if n < 0:
        raise ValueError("q-factorial needs n >= 0")

    def build():
        out = ctx.one
        for k in range(1, n + 1):
            out = out * q_bracket(ctx, k)
        return out

    return ctx.memo(("qfact", n), build)


def gauss_binomial(ctx: FieldContext, n: int, k: int):
    """Gaussian binomial, built from the Pascal rule (no division).

    Returns 0 outside ``0 <= k <= n``.
    """
    if n < 0 or k < 0 or k > n:
        return ctx.zero
    if k == 0 or k == n:
        return ctx.one
    key = ("gauss", n, k)
    table = ctx._memo
    if key in table:
        return table[key]
    # fill row by row to avoid deep recursion
    rows = ctx.memo(("gauss-rows",), lambda: [[ctx.one]])
    while len(rows) <= n:
        prev = rows[-1]
        m = len(rows)
        row = [ctx.one]
        for j in range(1, m):
            row.append(prev[j - 1] + ctx.q_pow(j) * prev[j])
        row.append(ctx.one)
        rows.append(row)
    value = table[key] = rows[n][k]
    return value


def gauss_binomial_product(ctx: FieldContext, n: int, k: int):
    """Gaussian binomial straight from [n]_q! / ([n-k]_q! [k]_q!)."""
    if n < 0 or k < 0 or k > n:
        return ctx.zero
    return q_factorial(ctx, n) / (q_factorial(ctx, n - k) * q_factorial(ctx, k))


def q_pochhammer(ctx: FieldContext, b, n: int, base_exp: int = 1):
    """(b; q)_n = prod_{j<n} (1 - b q^j).

    ``base_exp`` replaces the base q by q**base_exp, so ``base_exp=-1``
    gives (b; q^{-1})_n.
    """
    if n < 0:
        raise ValueError("q-Pochhammer needs n >= 0")
    b = ctx(b)
    out = ctx.one
    for j in range(n):
        out = out * (1 - b * ctx.q_pow(base_exp * j))
    return out


def q_binomial_finite_sum(ctx: FieldContext, b, n: int):
    """sum_i C_q(n, i) q^{C(i,2)} (-1)^i b^i, the expansion of (b; q)_n."""
    b = ctx(b)
    total = ctx.zero
    bp = ctx.one
    for i in range(n + 1):
        total = total + (-1) ** i * gauss_binomial(ctx, n, i) * ctx.q_pow(comb(i, 2)) * bp
        bp = bp * b
    return total


@dataclass
class QBinomialReport:
    n: int
    finite_ok: bool
    terms: int | None = None
    partial_sum: Any = None
    exact: Any = None
    remainder: Fraction | None = None
    remainder_bound: Fraction | None = None

    @property
    def ok(self) -> bool:
        if not self.finite_ok:
            return False
        if self.remainder is None:
            return True
        return self.remainder <= self.remainder_bound


def q_binomial_theorem_check(ctx: FieldContext, b, n: int, M: int | None = None) -> QBinomialReport:
    """Check both q-binomial formulas for (b; q)_n.

    The finite alternating expansion is compared exactly in any backend.
    With ``M`` given, the series ``sum_{i<=M} C_q(n+i-1, i) b^i`` is compared
    with ``1/(b; q)_n`` in the rational backend; |q| < 1 and |b| < 1 are
    required.  The tail bound uses ``|C_q(n+i-1, i)| <= prod_{j<n} (1+|q|^j)/(1-|q|^j)``.
    """
    product = q_pochhammer(ctx, b, n)
    report = QBinomialReport(n=n, finite_ok=(q_binomial_finite_sum(ctx, b, n) == product))
    if M is None:
        return report
    if not isinstance(ctx, RationalContext):
        raise TypeError("the infinite q-binomial series is checked in the rational backend")
    b = Fraction(b)
    aq, ab = abs(ctx.q), abs(b)
    if aq >= 1 or ab >= 1:
        raise DivergentSeriesError("need |q| < 1 and |b| < 1 for the infinite form")
    partial = Fraction(0)
    bp = Fraction(1)
    for i in range(M + 1):
        partial += gauss_binomial(ctx, n + i - 1, i) * bp if n > 0 else (1 if i == 0 else 0)
        bp *= b
    exact = 1 / product
    coeff_bound = Fraction(1)
    for j in range(1, n):
        coeff_bound *= (1 + aq**j) / (1 - aq**j)
    report.terms = M + 1
    report.partial_sum = partial
    report.exact = exact
    report.remainder = abs(partial - exact)
    report.remainder_bound = coeff_bound * ab ** (M + 1) / (1 - ab)
    return report


def q_difference(ctx: FieldContext, f: Sequence | Callable[[int], Any], n: int):
    """Delta_q^n f(0) = sum_k C_q(n,k) (-1)^k q^{C(k,2)} f(n-k)."""
    if callable(f):
        values = [f(i) for i in range(n + 1)]
    else:
        if len(f) < n + 1:
            raise ValueError(f"q_difference of order {n} needs {n + 1} values, got {len(f)}")
        values = f
    total = ctx.zero
    for k in range(n + 1):
        total = total + (-1) ** k * gauss_binomial(ctx, n, k) * ctx.q_pow(comb(k, 2)) * ctx(values[n - k])
    return total


def q_newton_interpolate(ctx: FieldContext, values: Sequence, x: int):
    """Rebuild f(x) from the forward q-differences of f(0..len-1)."""
    total = ctx.zero
    for n in range(len(values)):
        total = total + gauss_binomial(ctx, x, n) * q_difference(ctx, values, n)
    return total


def _bracket_power(ctx, m: int, n: int):
    # 0^0 = 1
    if n == 0:
        return ctx.one
    return q_bracket(ctx, m) ** n


def q_stirling2(ctx: FieldContext, n: int, k: int):
    """Carlitz q-Stirling number of the second kind (explicit alternating sum)."""
    if n < 0 or k < 0:
        raise ValueError("q-Stirling numbers need n, k >= 0")

    def build():
        total = ctx.zero
        for j in range(k + 1):
            total = total + ((-1) ** j * ctx.q_pow(comb(j, 2)) * gauss_binomial(ctx, k, j)
                             * _bracket_power(ctx, k - j, n))
        return ctx.q_pow(-comb(k, 2)) * total / q_factorial(ctx, k)

    return ctx.memo(("S2", n, k), build)


def q_stirling2_operator(ctx: FieldContext, n: int, k: int):
    """Same numbers via q^{-C(k,2)}/[k]_q! * Delta_q^k applied to y -> [y]_q^n at 0."""
    seq = [_bracket_power(ctx, y, n) for y in range(k + 1)]
    return ctx.q_pow(-comb(k, 2)) * q_difference(ctx, seq, k) / q_factorial(ctx, k)


def q_stirling1(ctx: FieldContext, n: int) -> list:
    """Coefficients S_1(n, k; q), k = 0..n, of prod_{k=1}^n (1 + [k]_q z)."""
    if n < 0:
        raise ValueError("q_stirling1 needs n >= 0")

    def build():
        row = [ctx.one]
        for k in range(1, n + 1):
            b = q_bracket(ctx, k)
            new = row + [ctx.zero]
            for i in range(1, len(new)):
                new[i] = new[i] + b * row[i - 1]
            row = new
        return row

    return list(ctx.memo(("S1", n), build))


def falling_bracket_product(ctx: FieldContext, z, m: int):
    """prod_{k=0}^{m-1} (z - [k]_q)."""
    z = ctx(z)
    out = ctx.one
    for k in range(m):
        out = out * (z - q_bracket(ctx, k))
    return out


@dataclass
class QStirlingTable:
    kind: str
    ctx: FieldContext
    entries: dict = field(default_factory=dict)

    def __getitem__(self, nk):
        n, k = nk
        if self.kind == "second" and k > n:
            return self.ctx.zero
        return self.entries[n, k]


def q_stirling_table(ctx: FieldContext, kind: str, n_max: int) -> QStirlingTable:
    table = QStirlingTable(kind, ctx)
    for n in range(n_max + 1):
        if kind == "second":
            for k in range(n + 1):
                table.entries[n, k] = q_stirling2(ctx, n, k)
        elif kind == "first":
            for k, c in enumerate(q_stirling1(ctx, n)):
                table.entries[n, k] = c
        else:
            raise ValueError("kind must be 'first' or 'second'")
    return table
