"""Scalar backends: exact rationals, the rational function field Q(q), and Q_p."""

from .context import (
    FieldContext,
    FunctionFieldContext,
    PadicContext,
    RationalContext,
    padic_valuation_of,
    q_power_extended,
    scalar_arith,
)
from .padic import (
    INFINITY,
    BackendMismatchError,
    PadicNumber,
    PrecisionError,
    padic_div_tracked,
    padic_from_rational,
    valuation,
)
from .ratfunc import RationalFunction, ratfunc_eval_at

__all__ = [
    "FieldContext",
    "FunctionFieldContext",
    "PadicContext",
    "RationalContext",
    "RationalFunction",
    "PadicNumber",
    "PrecisionError",
    "BackendMismatchError",
    "INFINITY",
    "padic_from_rational",
    "padic_div_tracked",
    "padic_valuation_of",
    "q_power_extended",
    "ratfunc_eval_at",
    "scalar_arith",
    "valuation",
]
