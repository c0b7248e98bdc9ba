"""Fermionic p-adic integrals as truncated Riemann sums.

At level N the integral of ``f`` against ``mu_{-q^delta}`` is approximated by

    (1 + q^delta) / (1 + q^(delta * p^N)) * sum_{x < p^N} f(x) (-q^delta)^x

(``delta = 0`` gives the ``mu_{-1}`` sum with prefactor 1).  Multivariate
integrals take the product measure, optionally with per-coordinate weights
``q^(a_j x_j)``.

When the p-adic backend has a rational q, sums are formed exactly in the
rational backend and embedded at the end.  Integrands that depend on the
coordinates only through a linear form ``sum c_j x_j`` are summed by
convolving the per-coordinate measure sequences, which visits each value of
the linear form once instead of every grid point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .numeric.context import FieldContext, PadicContext, padic_valuation_of
from .numeric.padic import INFINITY
from .qkit import q_bracket

DEFAULT_BUDGET = 10**7


class BudgetExceededError(RuntimeError):
    """The Riemann-sum grid is larger than the configured budget."""


@dataclass(frozen=True)
class Integrand:
    """A function on residues, ``fn(ctx, x_1, ..., x_r) -> scalar``.

    If ``outer`` and ``coeffs`` are set, ``fn(ctx, *xs)`` must equal
    ``outer(ctx, sum(c * x for c, x in zip(coeffs, xs)))``; the integrator
    then sums over values of the linear form instead of the full grid.
    """

    fn: Callable[..., Any]
    arity: int = 1
    outer: Callable[[FieldContext, int], Any] | None = None
    coeffs: tuple[int, ...] | None = None

    def __call__(self, ctx, *xs):
        return self.fn(ctx, *xs)

    @classmethod
    def of_linear_form(cls, outer, coeffs: Sequence[int]) -> "Integrand":
        coeffs = tuple(coeffs)

        def fn(ctx, *xs):
            return outer(ctx, sum(c * x for c, x in zip(coeffs, xs)))

        return cls(fn, len(coeffs), outer, coeffs)

    def without_structure(self) -> "Integrand":
        """Same function, but forces a plain grid sum."""
        return Integrand(self.fn, self.arity)


def constant_integrand(c=1, arity: int = 1) -> Integrand:
    return Integrand.of_linear_form(lambda ctx, s: ctx(c), (1,) * arity)


def bracket_power_integrand(n: int, shift: int = 0, arity: int = 1,
                            coeffs: Sequence[int] | None = None) -> Integrand:
    """``[shift + sum c_j x_j]_q^n``."""
    coeffs = tuple(coeffs) if coeffs is not None else (1,) * arity

    def outer(ctx, s):
        if n == 0:
            return ctx.one
        return q_bracket(ctx, shift + s) ** n

    return Integrand.of_linear_form(outer, coeffs)


@dataclass(frozen=True)
class MeasureSpec:
    """Per-coordinate measure ``mu_{-q^delta_j}`` and weight ``q^(a_j x_j)``."""

    deltas: tuple[int, ...]
    weights: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(self.deltas))
        w = tuple(self.weights) if self.weights is not None else (0,) * len(self.deltas)
        if len(w) != len(self.deltas):
            raise ValueError("weights and deltas must have the same length")
        object.__setattr__(self, "weights", w)

    @property
    def arity(self) -> int:
        return len(self.deltas)

    @classmethod
    def fermionic(cls, r: int) -> "MeasureSpec":
        return cls((0,) * r)

    @classmethod
    def extended(cls, h: int, r: int) -> "MeasureSpec":
        """mu_{-1}^r with weights q^{(h-j) x_j}, j = 1..r."""
        return cls((0,) * r, tuple(h - j for j in range(1, r + 1)))


@dataclass
class IntegralResult:
    value: Any
    level: int
    level_values: list = field(default_factory=list)
    diff_valuations: list = field(default_factory=list)
    precision: float = INFINITY
    stabilized: bool = True
    monotone: bool = True


def _sum_context(ctx: FieldContext):
    """Context to sum in, plus a function embedding results back into ``ctx``."""
    if isinstance(ctx, PadicContext):
        shadow = ctx.exact_shadow()
        if shadow is not None:
            return shadow, ctx.embed
    return ctx, (lambda v: v)


def _resolve_prime(ctx: FieldContext, p: int | None) -> int:
    if isinstance(ctx, PadicContext):
        if p is not None and p != ctx.prime:
            raise ValueError("p disagrees with the p-adic backend")
        return ctx.prime
    if p is None:
        raise ValueError("a prime p is needed outside the p-adic backend")
    return p


def _prefactor(sctx, delta: int, size: int):
    if delta == 0:
        return sctx.one
    return (1 + sctx.q_pow(delta)) / (1 + sctx.q_pow(delta * size))


def _coordinate_sequence(sctx, delta: int, weight: int, size: int) -> list:
    """m_j(x) = prefactor * q^{weight x} (-q^delta)^x for x < size."""
    pre = _prefactor(sctx, delta, size)
    step = sctx.q_pow(weight + delta)
    out = []
    cur = pre
    for x in range(size):
        out.append(cur if x % 2 == 0 else -cur)
        cur = cur * step
    return out


def fermionic_sum_level(ctx: FieldContext, f: Integrand | Callable, delta: int, N: int,
                        p: int | None = None, budget: int = DEFAULT_BUDGET):
    """Level-N Riemann sum of a one-variable integrand against mu_{-q^delta}."""
    p = _resolve_prime(ctx, p)
    if N < 1:
        raise ValueError("level N must be >= 1")
    size = p**N
    if size > budget:
        raise BudgetExceededError(f"{size} residues exceed the budget of {budget}")
    if not isinstance(f, Integrand):
        f = Integrand(f)
    sctx, embed = _sum_context(ctx)
    seq = sctx.memo(("coord-seq", delta, 0, size), lambda: _coordinate_sequence(sctx, delta, 0, size))
    total = sctx.zero
    for x in range(size):
        total = total + f(sctx, x) * seq[x]
    return embed(total)


def multivariate_sum_level(ctx: FieldContext, f: Integrand, measure: MeasureSpec, N: int,
                           p: int | None = None, budget: int = DEFAULT_BUDGET):
    """Level-N Riemann sum over the full grid (p^N)^r for the product measure."""
    p = _resolve_prime(ctx, p)
    r = measure.arity
    if f.arity != r:
        raise ValueError(f"integrand arity {f.arity} does not match measure arity {r}")
    size = p**N
    if size**r > budget:
        raise BudgetExceededError(
            f"grid of {size}^{r} = {size**r} points exceeds the budget of {budget}")
    sctx, embed = _sum_context(ctx)
    seqs = [sctx.memo(("coord-seq", d, w, size), lambda d=d, w=w: _coordinate_sequence(sctx, d, w, size))
            for d, w in zip(measure.deltas, measure.weights)]
    if f.outer is not None and all(c >= 0 for c in f.coeffs):
        key = ("linear-form-dist", p, N, measure.deltas, measure.weights, f.coeffs)
        dist = sctx.memo(key, lambda: _linear_form_distribution(sctx, seqs, f.coeffs))
        total = sctx.zero
        for s, w in enumerate(dist):
            if w != 0:
                total = total + f.outer(sctx, s) * w
        return embed(total)
    total = sctx.zero
    for xs in itertools.product(range(size), repeat=r):  # row-major
        w = sctx.one
        for seq, x in zip(seqs, xs):
            w = w * seq[x]
        total = total + f(sctx, *xs) * w
    return embed(total)


def _linear_form_distribution(sctx, seqs: list, coeffs: tuple) -> list:
    """Measure of {sum c_j x_j = s} for each s under the product measure."""
    dist = [sctx.one]
    for c, seq in zip(coeffs, seqs):
        if c == 0:
            mass = sctx.zero
            for v in seq:
                mass = mass + v
            dist = [d * mass for d in dist]
        else:
            dist = _convolve_strided(dist, seq, c, sctx.zero)
    return dist


def _convolve_strided(dist: list, seq: list, c: int, zero) -> list:
    """Distribution of s + c*x where s ~ dist and x ~ seq."""
    out = [zero] * (len(dist) + c * (len(seq) - 1))
    for x, wx in enumerate(seq):
        off = c * x
        for s, ws in enumerate(dist):
            out[off + s] = out[off + s] + ws * wx
    return out


def _stabilization(ctx: FieldContext, p: int, values: list) -> tuple[list, float, bool, bool]:
    diffs = [padic_valuation_of(b - a, p) for a, b in zip(values, values[1:])]
    cap = ctx.prec if isinstance(ctx, PadicContext) else INFINITY
    # level differences need not shrink monotonically, so take the worst one
    precision = min(min(diffs), cap) if diffs else cap
    stabilized = all(d > 0 for d in diffs)
    monotone = all(d1 <= d2 for d1, d2 in zip(diffs, diffs[1:]))
    return diffs, precision, stabilized, monotone


def fermionic_integral(ctx: FieldContext, f: Integrand | Callable, delta: int, N_max: int,
                       p: int | None = None, N_min: int = 1,
                       budget: int = DEFAULT_BUDGET) -> IntegralResult:
    """Run levels N_min..N_max and report how the sums stabilize.

    ``precision`` is the smallest valuation among consecutive differences
    (capped by the working precision).  ``stabilized`` is False when some
    pair of consecutive levels disagrees already mod p; ``monotone`` is False
    when the difference valuations ever decrease, which happens for
    converging sums too and is only reported.
    """
    p = _resolve_prime(ctx, p)
    values = [fermionic_sum_level(ctx, f, delta, N, p, budget) for N in range(N_min, N_max + 1)]
    return IntegralResult(values[-1], N_max, values, *_stabilization(ctx, p, values))


def multivariate_fermionic_integral(ctx: FieldContext, f: Integrand, measure: MeasureSpec, N: int,
                                    p: int | None = None, N_min: int = 1,
                                    budget: int = DEFAULT_BUDGET) -> IntegralResult:
    p = _resolve_prime(ctx, p)
    # refuse before doing any work
    if (p**N) ** measure.arity > budget:
        raise BudgetExceededError(
            f"grid of {p**N}^{measure.arity} = {(p**N)**measure.arity} points exceeds the budget of {budget}")
    values = [multivariate_sum_level(ctx, f, measure, n, p, budget) for n in range(N_min, N + 1)]
    return IntegralResult(values[-1], N, values, *_stabilization(ctx, p, values))


@dataclass
class ShiftReport:
    shift: int
    levels: list
    defect_valuations: list
    shrinking: bool


def shift_relation_check(ctx: FieldContext, f: Callable[[FieldContext, int], Any], n: int,
                         levels: Sequence[int], p: int | None = None) -> ShiftReport:
    """Compare I(f_n) with (-1)^n I(f) + 2 sum_{l<n} (-1)^(n-1-l) f(l) level by level (mu_{-1})."""
    p = _resolve_prime(ctx, p)
    sctx, embed = _sum_context(ctx)
    shifted = Integrand(lambda c, x: f(c, x + n))
    plain = Integrand(f)
    correction = sctx.zero
    for l in range(n):
        correction = correction + 2 * (-1) ** (n - 1 - l) * f(sctx, l)
    defects = []
    for N in levels:
        lhs = fermionic_sum_level(sctx, shifted, 0, N, p)
        rhs = (-1) ** n * fermionic_sum_level(sctx, plain, 0, N, p) + correction
        defects.append(padic_valuation_of(embed(lhs - rhs), p))
    shrinking = all(a <= b for a, b in zip(defects, defects[1:]))
    return ShiftReport(n, list(levels), defects, shrinking)


__all__ = [
    "DEFAULT_BUDGET",
    "BudgetExceededError",
    "Integrand",
    "MeasureSpec",
    "IntegralResult",
    "ShiftReport",
    "constant_integrand",
    "bracket_power_integrand",
    "fermionic_sum_level",
    "fermionic_integral",
    "multivariate_sum_level",
    "multivariate_fermionic_integral",
    "shift_relation_check",
]
