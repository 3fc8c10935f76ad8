"""Command-line front end.

Every command writes one report (JSON by default) carrying ``"schema": 1``
and a manifest with the configuration, code version, field moduli and cache
statistics.  Reports contain no timestamps and are emitted with sorted keys,
so reruns with the same manifest are byte-identical.

Exit codes: 0 success, 1 a checked identity failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import __version__
from .cache import CacheStore, resolve_cache_dir
from .finite_field import make_field
from .hecke import power_sum_S, trace_Up
from .kloosterman import kl_values
from .padics import (
    DEFAULT_COEFFS,
    DEFAULT_PRECISION,
    L_sym_infty_euler,
    L_sym_infty_limit,
    L_unit,
    PadicNum,
    PrecisionError,
    newton_polygon,
    slopes_report,
    valuation,
)
from .quadratic_forms import class_number_h
from .symL import IntPoly, check_functional_equation, check_purity, factor_even, sym_power_L
from .verify import STATEMENTS, SUITES

SCHEMA = 1

# the statement a command's internal checks stand for
COMMAND_STATEMENT = {
    "klsum": STATEMENTS["congruence"],
    "freq": STATEMENTS["class-number"],
    "classno": STATEMENTS["class-number"],
    "trace": STATEMENTS["traces"],
    "symL": STATEMENTS["polynomiality"],
    "newton": STATEMENTS["newton"],
    "padic": STATEMENTS["sym-infinity"],
    "unitroot": STATEMENTS["unit-root"],
    "verify": "verification suite",
}


class UsageError(ValueError):
    pass


class CheckFailed(AssertionError):
    def __init__(self, statement: str, detail: str):
        super().__init__(f"violated: {statement} ({detail})")
        self.statement = statement


# -- argument helpers ---------------------------------------------------------------

_MOD_RE = re.compile(r"^\s*(-?\d+)\s*mod\s*(\d+)\s*\^\s*(\d+)\s*$")
_DIGITS_RE = re.compile(r"^\s*\.\.\.(\d+)\s*$")


def parse_kappa(text: str, p: int) -> int | PadicNum:
    """Accepts "a mod p^e", a plain integer, or "...d_n...d_1d_0" (base-p digits, known to n+1 places)."""
    m = _MOD_RE.match(text)
    if m:
        a, base, e = int(m[1]), int(m[2]), int(m[3])
        if base != p:
            raise UsageError(f"kappa modulus {base}^{e} does not match p = {p}")
        return PadicNum(p, a, e)
    m = _DIGITS_RE.match(text)
    if m:
        digits = m[1]
        if any(int(d) >= p for d in digits):
            raise UsageError(f"{digits!r} is not a base-{p} digit string")
        return PadicNum(p, int(digits, p), len(digits))
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"cannot parse kappa {text!r}") from None


def _kappa_json(kappa: int | PadicNum) -> object:
    if isinstance(kappa, PadicNum):
        return {"residue": str(kappa.value), "modulus": f"{kappa.p}^{kappa.prec}"}
    return kappa


def _frac(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


def _need(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError(f"{args.command} needs " + ", ".join("--" + n for n in missing))


# -- report assembly ------------------------------------------------------------------

class Run:
    def __init__(self, args):
        self.args = args
        self.store = CacheStore(resolve_cache_dir(args.cache_dir))
        self.fields: set[tuple[int, int]] = set()

    def use_fields(self, p: int, ms) -> None:
        for m in ms:
            self.fields.add((p, m))

    def manifest(self) -> dict:
        cfg = {k: v for k, v in sorted(vars(self.args).items()) if k not in ("cache_dir", "out")}
        if isinstance(cfg.get("kappa"), str):
            cfg["kappa"] = cfg["kappa"].strip()
        moduli = {f"{p}^{m}": list(make_field(p, m).modulus) for p, m in sorted(self.fields)}
        return {"config": cfg, "code_version": __version__, "modulus_tables": moduli,
                "cache": self.store.summary()}

    def report(self, result: dict) -> dict:
        return {"schema": SCHEMA, "command": self.args.command, "manifest": self.manifest(), "result": result}


def _polygon_rows(coeffs, p: int) -> tuple[list[dict], list[list[int]]]:
    vals = [valuation(c, p) for c in coeffs]
    pts = [(n, v) for n, v in enumerate(vals) if v is not None]
    poly = newton_polygon(vals)
    verts = [list(v) for v in poly.vertices]
    rows = [{"n": n, "valuation": v, "vertex": [n, v] in verts, "bound": n * (n - 1)} for n, v in pts]
    return rows, verts


# -- commands ------------------------------------------------------------------------

def cmd_klsum(run: Run) -> tuple[dict, int]:
    a = run.args
    _need(a, "p", "m")
    ctx = make_field(a.p, a.m)
    run.use_fields(a.p, [a.m])
    kl = kl_values(ctx, shards=a.shards)
    codes = [a.t] if a.t is not None else range(1, ctx.q)
    for c in codes:
        if not 0 < c < ctx.q:
            raise UsageError(f"t code {c} outside 1..{ctx.q - 1}")
    return {"p": a.p, "m": a.m, "q": ctx.q, "values": {str(c): int(kl[c]) for c in codes}}, 0


def cmd_freq(run: Run) -> tuple[dict, int]:
    a = run.args
    _need(a, "p")
    ms = [a.m] if a.m is not None else range(1, (a.m_max or 1) + 1)
    run.use_fields(a.p, ms)
    tables = []
    for m in ms:
        tab = run.store.freq(a.p, m, a.shards)
        if tab.total() != a.p**m - 1:
            raise CheckFailed("frequency table covers F_q^*", f"q={a.p**m}, total {tab.total()}")
        tables.append(tab.to_json())
    return {"tables": tables}, 0


def cmd_classno(run: Run) -> tuple[dict, int]:
    a = run.args
    _need(a, "D")
    try:
        cn = run.store.class_numbers(a.D)
        out = {str(D): {"h": _frac(class_number_h(D)), "H": _frac(cn.H(D))} for D in a.D}
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return {"class_numbers": out}, 0


def cmd_trace(run: Run) -> tuple[dict, int]:
    a = run.args
    _need(a, "p", "k")
    m_max = a.m_max or (10 if a.p == 2 else 6)
    run.use_fields(a.p, range(1, m_max + 1))
    rows, bad = [], []
    for m in range(1, m_max + 1):
        tr = trace_Up(a.p, a.k + 2, m)
        s = power_sum_S(a.p, a.k, m)
        rows.append({"m": m, "trace": str(tr), "S_m": str(s), "ok": tr == -1 - s})
        if tr != -1 - s:
            bad.append(m)
    if bad:
        raise CheckFailed(STATEMENTS["traces"], f"p={a.p}, k={a.k}, m in {bad}")
    return {"p": a.p, "k": a.k, "weight": a.k + 2, "rows": rows}, 0


def _sym(run: Run):
    a = run.args
    _need(a, "p", "k")
    L = sym_power_L(a.p, a.k)
    run.use_fields(a.p, range(1, len(L.power_sums) + 1))
    return L


def cmd_symL(run: Run) -> tuple[dict, int]:
    a = run.args
    L = _sym(run)
    p, k = a.p, a.k
    rows, verts = _polygon_rows(L.poly.coeffs, p)
    out = {"p": p, "k": k, "coeffs": L.poly.to_json(), "degree": L.degree, "newton_vertices": verts}
    if k % 2 == 0:
        fac = factor_even(L.poly, p, k)
        if fac.product() != L.poly:
            raise CheckFailed(STATEMENTS["even-factorization"], "round trip")
        c = check_functional_equation(fac.M, p, k)
        pur = check_purity(fac.M, p, k + 1)
        out.update({"multiplicities": {"1-s": 1, f"1+{p}^{k // 2}s": fac.plus_mult,
                                       f"1-{p}^{k // 2}s": fac.minus_mult},
                    "M": fac.M.to_json(), "functional_equation_c": str(c)})
        statement = STATEMENTS["even-factorization"]
    else:
        pur = check_purity(L.poly.exact_div(IntPoly([1, -1])), p, k + 1)
        out["multiplicities"] = {"1-s": 1}
        statement = STATEMENTS["odd-purity"]
    out["purity"] = {"weight": k + 1, "exact_certified": pur.exact_certified,
                     "max_rel_deviation": f"{pur.max_rel_deviation:.3e}"}
    if not pur.ok:
        raise CheckFailed(statement, f"p={p}, k={k}")
    return out, 0


def cmd_newton(run: Run) -> tuple[dict, int]:
    a = run.args
    L = _sym(run)
    rows, verts = _polygon_rows(L.poly.coeffs, a.p)
    out = {"p": a.p, "k": a.k, "rows": rows, "vertices": verts}
    if any(r["valuation"] < r["bound"] for r in rows):
        raise CheckFailed(STATEMENTS["newton"], "lower bound")
    if a.p == 2 and a.k % 2 and any(r["valuation"] != r["bound"] for r in rows):
        raise CheckFailed(STATEMENTS["newton"], "equality for odd k")
    return out, 0


def _padic_setup(run: Run):
    a = run.args
    _need(a, "p", "kappa")
    kappa = parse_kappa(a.kappa, a.p)
    N = a.coeffs or DEFAULT_COEFFS
    M = a.precision or DEFAULT_PRECISION
    run.use_fields(a.p, range(1, N + 1))
    return kappa, N, M


def cmd_padic(run: Run) -> tuple[dict, int]:
    kappa, N, M = _padic_setup(run)
    p = run.args.p
    euler = L_sym_infty_euler(p, kappa, N, M, run.store.orbits)
    limit = L_sym_infty_limit(p, kappa, N, M)
    table = [{"n": n, "euler_precision": e.prec, "limit_precision": l.prec, "agreement": e.agreement(l)}
             for n, (e, l) in enumerate(zip(euler, limit.values))]
    poly = slopes_report(euler)
    out = {"p": p, "kappa": _kappa_json(kappa), "coeffs": [c.to_json() for c in euler],
           "schedule": [str(k) for k in limit.schedule], "route_agreement": table,
           "newton": poly.to_json()}
    bad = [r["n"] for r in table if r["agreement"] < min(r["euler_precision"], r["limit_precision"])]
    if bad:
        raise CheckFailed(STATEMENTS["sym-infinity"], f"coefficients {bad}")
    return out, 0


def cmd_unitroot(run: Run) -> tuple[dict, int]:
    kappa, N, M = _padic_setup(run)
    p = run.args.p
    cmp = L_unit(p, kappa, N, M, run.store.orbits)
    out = {"p": p, "kappa": _kappa_json(kappa), "direct": [c.to_json() for c in cmp.direct],
           "ratio": None if cmp.ratio is None else [c.to_json() for c in cmp.ratio],
           "agreement": cmp.agreement, "newton": slopes_report(cmp.direct).to_json()}
    return out, 0


def cmd_verify(run: Run) -> tuple[dict, int]:
    name = run.args.suite or "all"
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    results = [SUITES[n]() for n in names]
    for r in results:
        line = f"{'PASS' if r.ok else 'FAIL'}  {r.name:20s} {r.statement}"
        print(line, file=sys.stderr)
        for f in r.failures:
            print(f"      {f}", file=sys.stderr)
    return {"suites": [r.to_json() for r in results]}, 0 if all(r.ok for r in results) else 1


COMMANDS: dict[str, Callable[[Run], tuple[dict, int]]] = {
    "klsum": cmd_klsum,
    "freq": cmd_freq,
    "classno": cmd_classno,
    "trace": cmd_trace,
    "symL": cmd_symL,
    "newton": cmd_newton,
    "padic": cmd_padic,
    "unitroot": cmd_unitroot,
    "verify": cmd_verify,
}


# -- CSV ---------------------------------------------------------------------------

def to_csv(command: str, result: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "freq":
        w.writerow(["p", "m", "f", "count"])
        for tab in result["tables"]:
            for f, c in sorted(tab["freq"].items(), key=lambda kv: int(kv[0])):
                w.writerow([tab["p"], tab["m"], f, c])
    elif command in ("symL", "newton"):
        coeffs = result["coeffs"] if command == "symL" else None
        rows = _polygon_rows([int(c) for c in coeffs], result["p"])[0] if coeffs else result["rows"]
        w.writerow(["n", "valuation", "bound", "vertex"])
        for r in rows:
            w.writerow([r["n"], r["valuation"], r["bound"], int(r["vertex"])])
    elif command in ("padic", "unitroot"):
        series = result["coeffs"] if command == "padic" else result["direct"]
        poly = result["newton"]
        verts = {v[0] for v in poly["vertices"]}
        w.writerow(["n", "valuation", "precision", "margin", "vertex"])
        for n, c in enumerate(series):
            w.writerow([n, c["valuation"], c["precision"], poly["margins"].get(str(n), ""), int(n in verts)])
    else:
        raise UsageError(f"no CSV form for {command}")
    return buf.getvalue()


# -- entry point ---------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="kloverify", description="Exact Kloosterman-sum and L-function computations.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--p", type=int, choices=(2, 3))
    ap.add_argument("--m", type=int, help="field degree (klsum, freq)")
    ap.add_argument("--t", type=int, help="integer code of t (klsum)")
    ap.add_argument("--D", type=int, nargs="+", help="discriminants (classno)")
    ap.add_argument("--k", type=int)
    ap.add_argument("--kappa", type=str, help='integer, "a mod p^e" or "...digits"')
    ap.add_argument("--m-max", type=int)
    ap.add_argument("--coeffs", type=int)
    ap.add_argument("--precision", type=int)
    ap.add_argument("--shards", type=int, default=1)
    ap.add_argument("--cache-dir", type=str)
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--suite", type=str)
    ap.add_argument("--out", type=str, help="write the report here instead of stdout")
    return ap


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.shards < 1:
            raise UsageError("--shards must be >= 1")
        for name in ("m", "m_max", "coeffs", "precision"):
            val = getattr(args, name)
            if val is not None and val < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be >= 1")
        if args.k is not None and args.k < 1:
            raise UsageError("--k must be >= 1")
        run = Run(args)
        try:
            result, code = COMMANDS[args.command](run)
        except CheckFailed:
            raise
        except (PrecisionError, ArithmeticError, AssertionError) as exc:
            raise CheckFailed(COMMAND_STATEMENT[args.command], str(exc)) from exc
        if args.format == "csv":
            text = to_csv(args.command, result)
        else:
            text = json.dumps(run.report(result), sort_keys=True, indent=2) + "\n"
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except CheckFailed as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
