"""Command line: ``qeuler {compute,table,integrate,verify}``.

Exit codes: 0 success, 1 computation error (precision exhausted, budget
exceeded, vanishing denominator, ...), 2 usage error.  Values are printed as
exact strings; timings go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from .families import (
    FAMILY_KINDS,
    EulerFamilySpec,
    euler_hr,
    euler_order_r,
    euler_weighted,
)
from .identities import Grid, resolve_selection, run_suite
from .integrator import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    MeasureSpec,
    bracket_power_integrand,
    multivariate_fermionic_integral,
)
from .numeric.context import FunctionFieldContext, PadicContext, RationalContext
from .numeric.padic import PadicNumber, PrecisionError
from .render import format_scalar, format_valuation


class UsageError(Exception):
    """Bad flag combination; reported with exit code 2."""


# -- argument helpers ---------------------------------------------------------

def parse_range(text: str | None, default: tuple[int, int] | None = None) -> range:
    """``"A..B"`` (inclusive) or a single integer."""
    if text is None:
        if default is None:
            raise UsageError("missing range")
        return range(default[0], default[1] + 1)
    text = str(text)
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return range(int(a), int(b) + 1)
        v = int(text)
        return range(v, v + 1)
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected A..B or an integer") from None


def parse_int_list(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        return tuple(int(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None


def _parse_q(text: str | None, p: int | None):
    """Returns (kind_hint, q) for the q grammar ``a/b``, ``1+p`` or omitted."""
    if text is None:
        return None, None
    t = text.replace(" ", "")
    if t == "1+p":
        if p is None:
            raise UsageError("--q 1+p needs --p")
        return "padic", Fraction(1 + p)
    try:
        return "rat", Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad q literal {text!r}; expected a/b, 1+p, or nothing") from None


def make_context(backend: str | None, q_text: str | None, p: int | None, prec: int | None):
    hint, q = _parse_q(q_text, p)
    backend = backend or hint or ("padic" if p is not None else "func")
    if backend == "func":
        if q is not None:
            raise UsageError("the function-field backend takes no --q")
        return FunctionFieldContext()
    if backend == "rat":
        if q is None:
            raise UsageError("the rational backend needs --q a/b")
        try:
            return RationalContext(q)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if backend == "padic":
        if p is None:
            raise UsageError("the p-adic backend needs --p")
        try:
            return PadicContext(p, prec or 20, q)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError(f"unknown backend {backend!r}")


def _parse_x(ctx, text):
    if text is None:
        return 0
    try:
        x = Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad x {text!r}") from None
    if x.denominator == 1:
        return int(x)
    if isinstance(ctx, PadicContext):
        return ctx(x)
    if ctx is None:
        return x
    raise UsageError("non-integer x needs the p-adic backend")


def _spec(args, ctx, n: int, r=None, h=None) -> EulerFamilySpec:
    kind = args.family
    x = _parse_x(ctx if kind != "classical" else None, args.x)
    weights = parse_int_list(args.w)
    deltas = parse_int_list(args.delta)
    if kind in ("weighted", "weighted-star"):
        if weights is None:
            raise UsageError(f"family {kind} needs --w")
        if deltas is None:
            deltas = (0,) * len(weights)
    try:
        return EulerFamilySpec(kind, n, r=r, h=h, x=x, weights=weights, deltas=deltas)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _backend_name(ctx) -> str:
    return "exact" if ctx is None else ctx.describe()


def _record(spec: EulerFamilySpec, ctx, value) -> dict:
    rec = {"family": spec.kind}
    for k, v in spec.params().items():
        k = {"weights": "w", "deltas": "delta"}.get(k, k)
        if isinstance(v, PadicNumber):
            v = format_scalar(v)
        elif isinstance(v, tuple):
            v = ",".join(str(a) for a in v)
        elif isinstance(v, Fraction):
            v = str(v)
        rec[k] = v
    rec["backend"] = _backend_name(ctx)
    rec["value"] = format_scalar(value)
    if isinstance(value, PadicNumber):
        rec["precision"] = value.prec
    return rec


def _emit(rec: dict, fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(rec) + "\n")
    else:
        out.write("\t".join(f"{k}={v}" for k, v in rec.items()) + "\n")


# -- commands -----------------------------------------------------------------

def _family_context(args):
    if args.family is None:
        raise UsageError("--family is required")
    if args.func is cmd_compute and args.n is None:
        raise UsageError("--n is required")
    if args.family == "classical":
        if args.q is not None or args.backend not in (None, "rat"):
            raise UsageError("the classical family is q-free; drop --q/--backend")
        return None
    return make_context(args.backend, args.q, args.p, args.prec)


def cmd_compute(args) -> int:
    ctx = _family_context(args)
    spec = _spec(args, ctx, args.n, args.r, args.h)
    value = spec.evaluate(ctx)
    _emit(_record(spec, ctx, value), args.format)
    return 0


TABLE_COLUMNS = ["family", "n", "r", "h", "x", "w", "delta", "backend", "value"]


def cmd_table(args) -> int:
    ctx = _family_context(args)
    n_range = parse_range(args.n, (0, 5))
    r_range = parse_range(args.r) if args.r is not None else [None]
    h_range = parse_range(args.h) if args.h is not None else [None]
    rows = []
    for n in n_range:
        for r in r_range:
            for h in h_range:
                spec = _spec(args, ctx, n, r, h)
                rec = _record(spec, ctx, spec.evaluate(ctx))
                rec.pop("precision", None)
                rows.append({c: rec.get(c, "") for c in TABLE_COLUMNS})
    fmt = args.format if args.format in ("csv", "json") else "csv"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps({"columns": TABLE_COLUMNS, "rows": rows}, indent=2) + "\n"
    _write(args.out, text)
    return 0


def _write(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def cmd_integrate(args) -> int:
    if args.p is None:
        raise UsageError("integrate needs --p")
    ctx = make_context("padic", args.q, args.p, args.prec)
    levels = parse_range(args.levels, (1, 3))
    if len(levels) == 0 or levels.start < 1:
        raise UsageError("--levels must be a nonempty range of positive integers")
    n, x = args.n, _parse_x(ctx, args.x)
    weights, deltas = parse_int_list(args.w), parse_int_list(args.delta)
    if weights is not None:
        if args.h is not None:
            raise UsageError("give either --h or --w, not both")
        deltas = deltas or (0,) * len(weights)
        if len(deltas) != len(weights):
            raise UsageError("--w and --delta need the same length")
        measure = MeasureSpec(deltas)
        f = bracket_power_integrand(n, shift=x if isinstance(x, int) else 0, coeffs=weights)
        closed = lambda: euler_weighted(ctx, n, x, weights, deltas)
        label = "weighted"
    else:
        r = args.r or 1
        if args.h is not None:
            if deltas is not None:
                raise UsageError("--h uses mu_{-1}; drop --delta")
            measure = MeasureSpec.extended(args.h, r)
            closed = lambda: euler_hr(ctx, n, args.h, r, x)
            label = "hr"
        else:
            d = deltas[0] if deltas else 0
            if deltas and len(set(deltas)) > 1:
                raise UsageError("without --w, --delta takes a single exponent")
            measure = MeasureSpec((d,) * r)
            closed = (lambda: euler_order_r(ctx, n, r, x)) if d == 0 else \
                (lambda: euler_weighted(ctx, n, x, (1,) * r, (d,) * r))
            label = "r" if d == 0 else "weighted"
        f = bracket_power_integrand(n, shift=x if isinstance(x, int) else 0, arity=r)
    if not isinstance(x, int):
        raise UsageError("integrate takes an integer --x")
    res = multivariate_fermionic_integral(ctx, f, measure, levels.stop - 1, N_min=levels.start,
                                          budget=args.budget)
    closed_value = closed()
    agreement = (res.value - closed_value).valuation()
    rec = {
        "command": "integrate",
        "closed_form": label,
        "p": args.p,
        "q": str(ctx.q_exact),
        "n": n,
        "x": x,
        "deltas": ",".join(map(str, measure.deltas)),
        "weights": ",".join(map(str, measure.weights)) if weights is None else ",".join(map(str, weights)),
        "levels": [{"N": N, "value": format_scalar(v)} for N, v in zip(levels, res.level_values)],
        "diff_valuations": [format_valuation(v) for v in res.diff_valuations],
        "achieved_precision": format_valuation(res.precision),
        "stabilized": res.stabilized,
        "monotone": res.monotone,
        "closed_form_value": format_scalar(closed_value),
        "agreement_valuation": format_valuation(agreement),
    }
    if args.format == "json":
        sys.stdout.write(json.dumps(rec, indent=2) + "\n")
    else:
        for lv in rec["levels"]:
            sys.stdout.write(f"N={lv['N']}  {lv['value']}\n")
        sys.stdout.write(f"diff valuations: {' '.join(rec['diff_valuations']) or '-'}\n")
        sys.stdout.write(f"achieved precision: {rec['achieved_precision']}\n")
        sys.stdout.write(f"stabilized: {rec['stabilized']}\n")
        sys.stdout.write(f"monotone differences: {rec['monotone']}\n")
        sys.stdout.write(f"closed form ({label}): {rec['closed_form_value']}\n")
        sys.stdout.write(f"agreement valuation: {rec['agreement_valuation']}\n")
    return 0


def cmd_verify(args) -> int:
    try:
        ids = resolve_selection(args.suite)
    except KeyError as exc:
        raise UsageError(f"unknown identity id {exc.args[0]!r}") from None
    backends = [b for b in (args.backend or "func,padic").split(",") if b]
    for b in backends:
        if b not in ("func", "rat", "padic"):
            raise UsageError(f"unknown backend {b!r}")
    kw = {}
    if args.max_n is not None:
        kw["n_max"] = args.max_n
    if args.max_r is not None:
        kw["r_max"] = args.max_r
    report = run_suite(ids, Grid(**kw), backends)
    for check in report.checks:
        sys.stdout.write(check.summary_line() + "\n")
    rate = report.pass_rate
    sys.stdout.write(f"pass rate: {'undefined' if rate is None else f'{rate} ({float(rate):.4f})'}\n")
    if report.documented_discrepancies:
        sys.stdout.write("documented discrepancies:\n")
        for label in report.documented_discrepancies:
            sys.stdout.write(f"  {label}\n")
    if report.undocumented_failures:
        sys.stdout.write("UNDOCUMENTED FAILURES: " + ", ".join(report.undocumented_failures) + "\n")
    if args.report:
        _write(args.report, report.to_json())
    return 0 if report.ok else 1


# -- parser -------------------------------------------------------------------

def _add_family_flags(sp, table: bool = False):
    sp.add_argument("--family", choices=FAMILY_KINDS)
    if table:
        sp.add_argument("--n", help="range A..B (default 0..5)")
        sp.add_argument("--r", help="range A..B or integer")
        sp.add_argument("--h", help="range A..B or integer")
    else:
        sp.add_argument("--n", type=int)
        sp.add_argument("--r", type=int)
        sp.add_argument("--h", type=int)
    sp.add_argument("--x", help="integer; a rational p-adic integer in the p-adic backend")
    sp.add_argument("--w", help="comma list of weights (weighted families)")
    sp.add_argument("--delta", help="comma list of exponents (weighted families)")
    _add_backend_flags(sp)


def _add_backend_flags(sp):
    sp.add_argument("--q", help='"a/b", "1+p", or omitted for symbolic q')
    sp.add_argument("--backend", choices=("rat", "func", "padic"))
    sp.add_argument("--p", type=int)
    sp.add_argument("--prec", type=int, default=20)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qeuler", description="q-Euler numbers and polynomials of Norlund type")
    parser.add_argument("--config", help="JSON file whose keys mirror the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("compute", help="one family value")
    _add_family_flags(sp)
    sp.add_argument("--format", choices=("plain", "json"), default="plain")
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("table", help="family values over parameter ranges")
    _add_family_flags(sp, table=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("integrate", help="Riemann sums with level diagnostics")
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--r", type=int)
    sp.add_argument("--h", type=int)
    sp.add_argument("--x", default="0")
    sp.add_argument("--w")
    sp.add_argument("--delta")
    sp.add_argument("--levels", default="1..3")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--format", choices=("plain", "json"), default="plain")
    _add_backend_flags(sp)
    sp.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("verify", help="run the identity suite")
    sp.add_argument("--suite", default="all", help="all, a group, or comma-separated identity ids")
    sp.add_argument("--max-n", type=int)
    sp.add_argument("--max-r", type=int)
    sp.add_argument("--backend", help="comma list from func,rat,padic (default func,padic)")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_verify)
    return parser


_STRING_FLAGS = {"x", "q", "w", "delta", "levels", "suite", "backend", "report", "out"}


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        config = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(config, dict):
        raise UsageError("config must be a JSON object")
    defaults = {}
    for key, value in config.items():
        key = key.replace("-", "_")
        if isinstance(value, list):
            value = ",".join(str(a) for a in value)
        elif key in _STRING_FLAGS and value is not None:
            value = str(value)
        defaults[key] = value
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            sp.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"qeuler: error: {exc}\n")
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        code = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"qeuler: error: {exc}\n")
        return 2
    except BudgetExceededError as exc:
        sys.stderr.write(f"qeuler: refused: {exc}\n")
        return 1
    except (PrecisionError, ZeroDivisionError, ArithmeticError, ValueError, TypeError) as exc:
        sys.stderr.write(f"qeuler: computation failed: {exc}\n")
        return 1
    sys.stderr.write(f"time: {time.perf_counter() - start:.3f}s\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
