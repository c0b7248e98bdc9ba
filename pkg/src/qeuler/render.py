"""Exact text forms for scalars, and their parsers.

* rationals: ``"5/6"``, ``"-1/2"``, ``"3"``
* rational functions: ascending polynomials in ``q``, e.g. ``"2/(1+q)"``,
  ``"1+q+2*q^2+q^3+q^4"``, ``"(1-q)/(3+q^2)"``
* p-adic numbers: ``"3-adic val=0 digits=[2,1,0,1] prec=4"`` with digits
  least significant first

Every rendered value parses back to an equal scalar.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .numeric.padic import INFINITY, PadicNumber
from .numeric.ratfunc import RationalFunction


def format_poly(coeffs: list[int]) -> str:
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        if k == 0:
            body = str(abs(c))
        else:
            mono = "q" if k == 1 else f"q^{k}"
            body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += sign + body
    return out


def _nterms(coeffs: list[int]) -> int:
    return sum(1 for c in coeffs if c)


def format_ratfunc(f: RationalFunction) -> str:
    nc, dc = f.numerator_coeffs(), f.denominator_coeffs()
    num = format_poly(nc)
    if dc == [1]:
        return num
    if _nterms(nc) > 1:
        num = f"({num})"
    den = format_poly(dc)
    if _nterms(dc) > 1 or (len(dc) > 1 and dc[-1] != 1):
        den = f"({den})"
    return f"{num}/{den}"


_TERM = re.compile(r"([+-]?)(\d*)(\*?)(q(?:\^(\d+))?)?")


def parse_poly(text: str) -> list[int]:
    text = text.replace(" ", "")
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    if text == "0":
        return [0]
    coeffs: dict[int, int] = {}
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial {text!r}")
        sign, digits, star, mono, power = m.groups()
        if not digits and not mono:
            raise ValueError(f"cannot parse polynomial {text!r}")
        if star and not (digits and mono):
            raise ValueError(f"cannot parse polynomial {text!r}")
        c = int(digits) if digits else 1
        if sign == "-":
            c = -c
        k = 0 if not mono else (int(power) if power else 1)
        coeffs[k] = coeffs.get(k, 0) + c
        pos = m.end()
    deg = max(coeffs)
    return [coeffs.get(k, 0) for k in range(deg + 1)]


def parse_ratfunc(text: str) -> RationalFunction:
    text = text.replace(" ", "")
    depth = 0
    split = None
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            split = i
    if split is None:
        return RationalFunction.from_coeffs(parse_poly(text))
    return RationalFunction.from_coeffs(parse_poly(text[:split]), parse_poly(text[split + 1:]))


def format_padic(x: PadicNumber) -> str:
    val = "inf" if x.is_zero() else str(int(x.val))
    digits = ",".join(str(d) for d in x.digits())
    return f"{x.prime}-adic val={val} digits=[{digits}] prec={x.prec}"


_PADIC = re.compile(r"(\d+)-adic val=(inf|-?\d+) digits=\[([\d,]*)\] prec=(-?\d+)")


def parse_padic(text: str) -> PadicNumber:
    m = _PADIC.fullmatch(text.strip())
    if not m:
        raise ValueError(f"cannot parse p-adic value {text!r}")
    p, val, digits, prec = int(m[1]), m[2], m[3], int(m[4])
    if val == "inf":
        return PadicNumber.zero(p, prec)
    unit = sum(int(d) * p**i for i, d in enumerate(digits.split(",")) if d != "")
    return PadicNumber(p, prec, int(val), unit)


def format_scalar(x) -> str:
    if isinstance(x, RationalFunction):
        return format_ratfunc(x)
    if isinstance(x, PadicNumber):
        return format_padic(x)
    return str(Fraction(x))


def parse_scalar(text: str, kind: str | None = None):
    """Inverse of :func:`format_scalar`; ``kind`` forces a backend."""
    text = text.strip()
    if kind == "padic" or (kind is None and "-adic" in text):
        return parse_padic(text)
    if kind == "func" or (kind is None and "q" in text):
        return parse_ratfunc(text)
    return Fraction(text)


def format_valuation(v) -> str:
    return "inf" if v == INFINITY else str(int(v))
