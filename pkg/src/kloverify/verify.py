"""Verification suites, one per mathematical statement checked by the package.

Each suite returns a :class:`SuiteResult`; ranges default to the full release
configuration and can be narrowed for quick runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .finite_field import make_field
from .hecke import power_sum_S, trace_Up
from .kloosterman import admissible_traces, ec_count, freq_table, kl_values
from .padics import (
    L_sym_infty_euler,
    L_sym_infty_limit,
    L_unit,
    PadicNum,
    scale_argument,
    slopes_report,
    valuation,
)
from .quadratic_forms import kronecker_H_many
from .symL import IntPoly, NonExactDivision, check_functional_equation, check_purity, factor_even, sym_power_L

__all__ = ["SuiteResult", "SUITES", "STATEMENTS", "run_suite", "run_all"]


@dataclass
class SuiteResult:
    name: str
    statement: str
    ok: bool = True
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    def fail(self, msg: str) -> None:
        self.ok = False
        if len(self.failures) < 20:
            self.failures.append(msg)

    def expect(self, cond: bool, msg: str) -> None:
        self.checked += 1
        if not cond:
            self.fail(msg)

    def to_json(self) -> dict:
        return {"name": self.name, "statement": self.statement, "ok": self.ok,
                "checked": self.checked, "failures": self.failures}


STATEMENTS = {
    "congruence": "-Kl_q(t) = 1 mod 4 (p=2) or mod 3 (p=3), and Kl_q(t)^2 < 4q",
    "class-number": "F(q, f) = H(f^2 - 4q) for every admissible f",
    "elliptic": "-Kl_q(t) = q + 1 - #E_t(F_q)",
    "traces": "Tr(U_p^m | S_{k+2}) = -1 - S_m",
    "polynomiality": "L(Sym^k Kl, s) is a polynomial; L(Sym^1 Kl/F_2, s) = 1 - s",
    "newton": "ord_p a_m >= m(m-1), with equality for p = 2 and odd k",
    "even-factorization": "L = (1 - s) P_k M_k for even k, M_k pure with a functional equation",
    "odd-purity": "L/(1 - s) is pure of weight k + 1 for odd k",
    "sym-infinity": "Euler product and finite-k limit of L(Sym^{infty,kappa}) agree; slopes 2n",
    "unit-root": "L_unit(kappa, s) = L(Sym^{infty,kappa})(s) / L(Sym^{infty,kappa-2})(ps)",
}

FULL_M = {"congruence": {2: range(2, 14), 3: range(1, 9)},
          "class-number": {2: range(2, 11), 3: range(1, 7)},
          "elliptic": {2: range(1, 11), 3: range(1, 7)},
          "traces": {2: range(1, 11), 3: range(1, 7)}}


def _modulus(p: int) -> int:
    return 4 if p == 2 else 3


def suite_congruence(ranges: dict[int, Sequence[int]] | None = None) -> SuiteResult:
    res = SuiteResult("congruence", STATEMENTS["congruence"])
    for p, ms in (ranges or FULL_M["congruence"]).items():
        for m in ms:
            q = p**m
            kl = kl_values(make_field(p, m))[1:]
            bad_cong = np.nonzero((-kl) % _modulus(p) != 1)[0]
            bad_weil = np.nonzero(kl * kl >= 4 * q)[0]
            res.checked += len(kl)
            if len(bad_cong):
                res.fail(f"q={q}: congruence fails at t code {int(bad_cong[0]) + 1}")
            if len(bad_weil):
                res.fail(f"q={q}: Kl^2 >= 4q at t code {int(bad_weil[0]) + 1}")
    return res


def suite_class_number(ranges: dict[int, Sequence[int]] | None = None) -> SuiteResult:
    res = SuiteResult("class-number", STATEMENTS["class-number"])
    for p, ms in (ranges or FULL_M["class-number"]).items():
        for m in ms:
            q = p**m
            tab = freq_table(make_field(p, m))
            fs = admissible_traces(p, m)
            hs = kronecker_H_many([f * f - 4 * q for f in fs])
            for f, h in zip(fs, hs):
                res.expect(tab[f] == h, f"q={q}, f={f}: F={tab[f]} but H={h}")
            stray = sorted(set(tab.counts) - set(fs))
            res.expect(not stray, f"q={q}: values {stray} outside the admissible set")
    return res


def suite_elliptic(ranges: dict[int, Sequence[int]] | None = None) -> SuiteResult:
    res = SuiteResult("elliptic", STATEMENTS["elliptic"])
    for p, ms in (ranges or FULL_M["elliptic"]).items():
        for m in ms:
            ctx = make_field(p, m)
            kl = kl_values(ctx)
            for t in range(1, ctx.q):
                n = ec_count(ctx, t)
                res.expect(-int(kl[t]) == ctx.q + 1 - n,
                           f"q={ctx.q}, t code {t}: -Kl={-int(kl[t])}, q+1-#E={ctx.q + 1 - n}")
    return res


def suite_traces(ks: Sequence[int] = range(1, 21),
                 ranges: dict[int, Sequence[int]] | None = None) -> SuiteResult:
    res = SuiteResult("traces", STATEMENTS["traces"])
    for p, ms in (ranges or FULL_M["traces"]).items():
        for k in ks:
            for m in ms:
                tr = trace_Up(p, k + 2, m)
                s = power_sum_S(p, k, m, "direct")
                res.expect(tr == -1 - s, f"p={p}, k={k}, m={m}: trace {tr} but -1 - S_m = {-1 - s}")
                if p == 2 and m == 1:
                    # Kl_2(1) = 1: S_1 from the roots of x^2 + x + 2
                    res.expect(power_sum_S(2, k, 1) == s, f"k={k}: q=2 special case disagrees")
    return res


def suite_polynomiality(ks: Sequence[int] = range(1, 21), slack: int = 8) -> SuiteResult:
    res = SuiteResult("polynomiality", STATEMENTS["polynomiality"])
    for p in (2, 3):
        for k in ks:
            try:
                L = sym_power_L(p, k, slack=slack)
            except ValueError as exc:
                res.fail(f"p={p}, k={k}: {exc}")
                continue
            res.expect(all(c == 0 for c in L.computed[L.degree + 1:]) and L.slack >= slack,
                       f"p={p}, k={k}: nonzero tail")
    res.expect(sym_power_L(2, 1).poly == IntPoly([1, -1]), "L(Sym^1 Kl/F_2, s) != 1 - s")
    return res


def suite_newton(ks: Sequence[int] = range(1, 21),
                 equality_ks: Sequence[int] = (1, 3, 5, 7, 9, 11)) -> SuiteResult:
    res = SuiteResult("newton", STATEMENTS["newton"])
    for p in (2, 3):
        for k in ks:
            coeffs = sym_power_L(p, k).poly.coeffs
            for m, a in enumerate(coeffs):
                if a:
                    res.expect(valuation(a, p) >= m * (m - 1), f"p={p}, k={k}: ord a_{m} < {m * (m - 1)}")
    for k in equality_ks:
        coeffs = sym_power_L(2, k).poly.coeffs
        for m, a in enumerate(coeffs):
            res.expect(a != 0 and valuation(a, 2) == m * (m - 1),
                       f"k={k}: ord_2 a_{m} != {m * (m - 1)}")
    return res


def suite_even(ks: Sequence[int] = (4, 6, 8, 10, 12), rel_tol: float = 1e-9) -> SuiteResult:
    res = SuiteResult("even-factorization", STATEMENTS["even-factorization"])
    for p in (2, 3):
        for k in ks:
            L = sym_power_L(p, k).poly
            fac = factor_even(L, p, k)
            res.expect(fac.product() == L, f"p={p}, k={k}: factorization does not multiply back")
            r = p ** (k // 2)
            res.expect(_roots_are(fac.P, {r, -r}), f"p={p}, k={k}: P_k has a root other than +-p^(k/2)")
            try:
                c = check_functional_equation(fac.M, p, k)
                res.expect(c is not None and c != 0, f"p={p}, k={k}: zero functional-equation constant")
            except ArithmeticError as exc:
                res.fail(f"p={p}, k={k}: {exc}")
            if fac.M.degree:
                pur = check_purity(fac.M, p, k + 1, rel_tol=rel_tol)
                res.expect(pur.numeric_ok and pur.exact_certified,
                           f"p={p}, k={k}: M_k not pure (deviation {pur.max_rel_deviation:.3g})")
    return res


def _roots_are(P: IntPoly, recips: set[int]) -> bool:
    """Every reciprocal root of P lies in ``recips`` (checked by exact division)."""
    rest = P
    while rest.degree > 0:
        for r in recips:
            try:
                rest = rest.exact_div(IntPoly([1, -r]))
                break
            except NonExactDivision:
                continue
        else:
            return False
    return True


def suite_odd(ks: Sequence[int] = (3, 5, 7, 9), rel_tol: float = 1e-9) -> SuiteResult:
    res = SuiteResult("odd-purity", STATEMENTS["odd-purity"])
    for p in (2, 3):
        for k in ks:
            L = sym_power_L(p, k).poly
            try:
                Q = L.exact_div(IntPoly([1, -1]))
            except ArithmeticError:
                res.fail(f"p={p}, k={k}: (1 - s) does not divide L")
                continue
            pur = check_purity(Q, p, k + 1, rel_tol=rel_tol)
            res.expect(pur.numeric_ok and pur.exact_certified,
                       f"p={p}, k={k}: deviation {pur.max_rel_deviation:.3g}")
    return res


SYMINF_KAPPAS = {2: ((1, -1, 5, -3), 40), 3: ((1, -1), 25)}


def suite_sym_infinity(kappas: dict[int, tuple[Sequence[int], int]] | None = None,
                       N: int = 6) -> SuiteResult:
    res = SuiteResult("sym-infinity", STATEMENTS["sym-infinity"])
    for p, (ks, M) in (kappas or SYMINF_KAPPAS).items():
        for kappa in ks:
            euler = L_sym_infty_euler(p, kappa, N, M)
            limit = L_sym_infty_limit(p, kappa, N, M).values
            for n, (a, b) in enumerate(zip(euler, limit)):
                res.expect(a.agreement(b) >= M, f"p={p}, kappa={kappa}: c_{n} agrees only mod p^{a.agreement(b)}")
            poly = slopes_report(euler)
            if p == 2 and kappa % 2:
                res.expect(poly.certified and poly.vertices == [(n, n * (n - 1)) for n in range(N + 1)],
                           f"kappa={kappa}: vertices {poly.vertices}")
            else:
                res.expect(all(y >= x * (x - 1) for x, y in poly.vertices),
                           f"p={p}, kappa={kappa}: hull dips below n(n-1)")
    return res


UNIT_KAPPAS = {2: ((1, -1, 3), 40), 3: ((1, -1), 25)}


def _interlacing(p: int, kappa: int, N: int, M: int) -> bool:
    num = slopes_report(L_sym_infty_euler(p, kappa, N, M))
    den = slopes_report(scale_argument(L_sym_infty_euler(p, kappa - 2, N, M), p))
    return (num.certified and den.certified
            and num.vertices == [(n, n * (n - 1)) for n in range(N + 1)]
            and den.vertices == [(n, n * n) for n in range(N + 1)]
            and not set(num.slopes) & set(den.slopes))


def suite_unit_root(kappas: dict[int, tuple[Sequence[int], int]] | None = None,
                    N: int = 6, interlace_n: int = 5) -> SuiteResult:
    res = SuiteResult("unit-root", STATEMENTS["unit-root"])
    for p, (ks, M) in (kappas or UNIT_KAPPAS).items():
        for kappa in ks:
            try:
                L_unit(p, kappa, N, M)
                res.checked += 1
            except ArithmeticError as exc:
                res.fail(f"p={p}, kappa={kappa}: {exc}")
            if p == 2 and kappa % 2:
                res.expect(_interlacing(p, kappa, interlace_n, M),
                           f"kappa={kappa}: zeros and poles not interlaced through n={interlace_n}")
        # kappa = 0 against the torus zeta function (1 - s)/(1 - ps)
        direct = L_unit(p, 0, N, M).direct
        closed = [1] + [p**n - p ** (n - 1) for n in range(1, N + 1)]
        res.expect(all(c.congruent(PadicNum(p, e, M), M) for c, e in zip(direct, closed)),
                   f"p={p}: L_unit(0) != (1 - s)/(1 - ps)")
    return res


SUITES: dict[str, Callable[[], SuiteResult]] = {
    "congruence": suite_congruence,
    "class-number": suite_class_number,
    "elliptic": suite_elliptic,
    "traces": suite_traces,
    "polynomiality": suite_polynomiality,
    "newton": suite_newton,
    "even-factorization": suite_even,
    "odd-purity": suite_odd,
    "sym-infinity": suite_sym_infinity,
    "unit-root": suite_unit_root,
}


def run_suite(name: str) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[name]()


def run_all() -> list[SuiteResult]:
    return [fn() for fn in SUITES.values()]
