"""Symmetric-power L-functions L(Sym^k Kl, s) as exact integer polynomials.

The polynomial is assembled from power sums through Newton's identities,
n a_n = sum_{j=1}^n S_j a_{n-j}, then split as (1 - s) P_k(s) M_k(s) for even
k.  Functional-equation and weight checks are exact; a complex root check is
offered alongside as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import sympy

from .hecke import power_sum_S

__all__ = [
    "IntPoly",
    "Factorization",
    "PurityReport",
    "LFunction",
    "NonExactDivision",
    "assemble_L",
    "coefficients_from_power_sums",
    "power_sums_from_coefficients",
    "detect_degree",
    "sym_power_L",
    "factor_even",
    "check_functional_equation",
    "check_purity",
    "DEFAULT_SLACK",
]

DEFAULT_SLACK = 8


class NonExactDivision(ArithmeticError):
    pass


class IntPoly:
    """Polynomial with exact integer coefficients, constant term first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[int]):
        c = [int(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[int, ...] = tuple(c) or (0,)

    @property
    def degree(self) -> int:
        return -1 if self.coeffs == (0,) else len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n] if 0 <= n < len(self.coeffs) else 0

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"IntPoly({list(self.coeffs)})"

    def __mul__(self, other: "IntPoly") -> "IntPoly":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    def __pow__(self, e: int) -> "IntPoly":
        out = IntPoly([1])
        for _ in range(e):
            out = out * self
        return out

    def divmod(self, other: "IntPoly") -> tuple["IntPoly", "IntPoly"]:
        """Division over Z; raises NonExactDivision if a quotient digit is fractional."""
        num = list(self.coeffs)
        den = other.coeffs
        dd = other.degree
        if dd < 0:
            raise ZeroDivisionError("division by the zero polynomial")
        if self.degree < dd:
            return IntPoly([0]), IntPoly(num)
        quo = [0] * (len(num) - dd)
        for i in range(len(num) - 1, dd - 1, -1):
            c, r = divmod(num[i], den[-1])
            if r:
                raise NonExactDivision(f"coefficient {i} not divisible by {den[-1]}")
            quo[i - dd] = c
            for j, d in enumerate(den):
                num[i - dd + j] -= c * d
        return IntPoly(quo), IntPoly(num[:dd] or [0])

    def exact_div(self, other: "IntPoly") -> "IntPoly":
        quo, rem = self.divmod(other)
        if rem.degree >= 0:
            raise NonExactDivision(f"nonzero remainder {rem}")
        return quo

    def __call__(self, s):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]


def coefficients_from_power_sums(sums: Sequence[int], exact: bool = True) -> list[int]:
    """a_0..a_N of exp(sum_m S_m s^m / m) given S_1..S_N."""
    a = [1]
    for n in range(1, len(sums) + 1):
        total = sum(sums[j - 1] * a[n - j] for j in range(1, n + 1))
        q, r = divmod(total, n)
        if r and exact:
            raise NonExactDivision(f"n a_n not divisible by n at n = {n}")
        a.append(q)
    return a


def power_sums_from_coefficients(coeffs: Sequence[int], count: int) -> list[int]:
    """Inverse of :func:`coefficients_from_power_sums`: S_m = m a_m - sum_{j<m} S_j a_{m-j}."""
    a = list(coeffs)
    if a[0] != 1:
        raise ValueError("constant term must be 1")
    S: list[int] = []
    for m in range(1, count + 1):
        am = a[m] if m < len(a) else 0
        S.append(m * am - sum(S[j - 1] * (a[m - j] if m - j < len(a) else 0) for j in range(1, m)))
    return S


def assemble_L(p: int, k: int, n_coeffs: int, mode: str = "auto") -> list[int]:
    """First ``n_coeffs`` + 1 coefficients of L(Sym^k Kl, s) from S_1..S_{n_coeffs}."""
    if k < 1:
        raise ValueError("k must be >= 1")
    sums = [power_sum_S(p, k, m, mode) for m in range(1, n_coeffs + 1)]
    return coefficients_from_power_sums(sums)


def detect_degree(coeffs: Sequence[int], min_slack: int = 5) -> int:
    """Largest n with a_n != 0, provided at least ``min_slack`` zeros follow it."""
    nonzero = [i for i, c in enumerate(coeffs) if c]
    if not nonzero:
        raise ValueError("all coefficients vanish")
    deg = nonzero[-1]
    if len(coeffs) - 1 - deg < min_slack:
        raise ValueError(f"ambiguous tail: only {len(coeffs) - 1 - deg} trailing zeros after degree {deg}")
    return deg


@dataclass
class LFunction:
    p: int
    k: int
    poly: IntPoly
    computed: list[int]           # all coefficients computed, tail included
    power_sums: list[int]

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def slack(self) -> int:
        return len(self.computed) - 1 - self.degree


def sym_power_L(p: int, k: int, slack: int = DEFAULT_SLACK, mode: str = "auto",
                max_coeffs: int = 40) -> LFunction:
    """L(Sym^k Kl, s), computing coefficients until ``slack`` consecutive zeros appear."""
    if k < 1:
        raise ValueError("k must be >= 1")
    sums: list[int] = []
    a = [1]
    for n in range(1, max_coeffs + 1):
        sums.append(power_sum_S(p, k, n, mode))
        a = coefficients_from_power_sums(sums)
        deg = max(i for i, c in enumerate(a) if c)
        if n - deg >= slack:
            return LFunction(p, k, IntPoly(a[:deg + 1]), a, sums)
    raise ValueError(f"no {slack}-zero tail within {max_coeffs} coefficients")


# -- even k: (1 - s) P_k(s) M_k(s) --------------------------------------------

@dataclass
class Factorization:
    p: int
    k: int
    trivial: IntPoly
    plus_mult: int          # multiplicity of (1 + p^{k/2} s)
    minus_mult: int         # multiplicity of (1 - p^{k/2} s)
    M: IntPoly

    @property
    def P(self) -> IntPoly:
        r = self.p ** (self.k // 2)
        return IntPoly([1, r]) ** self.plus_mult * IntPoly([1, -r]) ** self.minus_mult

    def product(self) -> IntPoly:
        return self.trivial * self.P * self.M


def _strip_factor(poly: IntPoly, factor: IntPoly) -> tuple[IntPoly, int]:
    mult = 0
    while poly.degree >= factor.degree:
        try:
            poly = poly.exact_div(factor)
        except NonExactDivision:
            break
        mult += 1
    return poly, mult


def factor_even(L: IntPoly, p: int, k: int) -> Factorization:
    if k % 2:
        raise ValueError("factor_even needs even k")
    trivial = IntPoly([1, -1])
    try:
        rest = L.exact_div(trivial)
    except NonExactDivision as exc:
        raise ArithmeticError("(1 - s) does not divide L(Sym^k Kl, s)") from exc
    r = p ** (k // 2)
    rest, plus = _strip_factor(rest, IntPoly([1, r]))
    rest, minus = _strip_factor(rest, IntPoly([1, -r]))
    return Factorization(p, k, trivial, plus, minus, rest)


def check_functional_equation(M: IntPoly, p: int, k: int) -> Fraction:
    """Return c with M(s) = c s^d M(1/(p^{k+1} s)); raise if no single c works.

    Coefficientwise: m_{d-j} p^{(k+1)j} = c m_j for every j.
    """
    d = M.degree
    if d <= 0:
        return Fraction(M[0]) if d == 0 else Fraction(0)
    P = p ** (k + 1)
    c = None
    for j in range(d + 1):
        lhs, rhs = M[d - j] * P**j, M[j]
        if rhs == 0:
            if lhs != 0:
                raise ArithmeticError(f"functional equation fails at j = {j}")
            continue
        cj = Fraction(lhs, rhs)
        if c is None:
            c = cj
        elif cj != c:
            raise ArithmeticError(f"no single constant: {c} vs {cj} at j = {j}")
    return c


# -- weight checks ----------------------------------------------------------------

@dataclass
class PurityReport:
    p: int
    weight: int
    degree: int
    exact_certified: bool
    max_rel_deviation: float
    numeric_ok: bool
    details: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.exact_certified and self.numeric_ok


def _dickson_reduce(Q: IntPoly, P: int) -> IntPoly:
    """For Q of even degree 2n with q_{n+i} = P^i q_{n-i}, return R with
    Q(s) = s^n R(1/s + P s).  Roots of R are the traces alpha + P/alpha."""
    n = Q.degree // 2
    # D_0 = 2, D_1 = u, D_{i+1} = u D_i - P D_{i-1}
    dick = [IntPoly([2]), IntPoly([0, 1])]
    for i in range(1, n):
        nxt = IntPoly([0, 1]) * dick[i]
        prev = dick[i - 1]
        dick.append(IntPoly([a - P * b for a, b in zip(nxt.coeffs, list(prev.coeffs) + [0] * len(nxt.coeffs))]))
    R = [0] * (n + 1)
    R[0] = Q[n]
    for i in range(1, n + 1):
        for j, c in enumerate(dick[i].coeffs):
            R[j] += Q[n - i] * c
    return IntPoly(R)


def _exact_unit_circle_certificate(Q: IntPoly, p: int, w: int, details: list[str]) -> bool:
    """Exact check that every reciprocal root alpha of Q has |alpha|^2 = p^w.

    Self-paired roots +-p^{w/2} are split off first; the rest must pair as
    (1 - y s + p^w s^2) with real y, y^2 <= 4 p^w, certified by real-root
    isolation of the Dickson-reduced polynomial.
    """
    P = p**w
    poly = Q
    # self-paired roots
    candidates = [IntPoly([1, 0, -P])]
    if w % 2 == 0:
        r = p ** (w // 2)
        candidates += [IntPoly([1, -r]), IntPoly([1, r])]
    for fac in candidates:
        poly, mult = _strip_factor(poly, fac)
        if mult:
            details.append(f"split off {fac} x{mult}")
    if poly.degree <= 0:
        return True
    if poly.degree % 2:
        details.append("odd degree after removing self-paired roots")
        return False
    n = poly.degree // 2
    if any(poly[n + i] != P**i * poly[n - i] for i in range(n + 1)):
        details.append("coefficients are not self-reciprocal")
        return False
    R = _dickson_reduce(poly, P)
    if not _real_rooted_within(R, 0, None):
        details.append("trace polynomial has non-real roots")
        return False
    # y^2 <= 4P for every root y: the squared roots lie in [0, 4P]
    even = R * IntPoly([(-1) ** j * c for j, c in enumerate(R.coeffs)])
    squares = IntPoly(even.coeffs[0::2])
    if not _real_rooted_within(squares, 0, 4 * P):
        details.append("a trace y violates y^2 <= 4 p^w")
        return False
    return True


def _real_rooted_within(poly: IntPoly, lo: int, hi: int | None) -> bool:
    """All complex roots real (with multiplicity), and inside [lo, hi] when hi is given."""
    u = sympy.Symbol("u")
    sp = sympy.Poly(list(reversed(poly.coeffs)), u)
    total = 0
    for (a, b), mult in sp.intervals():
        total += mult
        if hi is None:
            continue
        while a < lo <= b or a <= hi < b:
            if a == b:
                break
            a, b = sp.refine_root(a, b, eps=(b - a) / 8)
        if a < lo or b > hi:
            return False
    return total == poly.degree


def check_purity(poly: IntPoly, p: int, weight: int, rel_tol: float = 1e-9, dps: int = 60) -> PurityReport:
    """Check every reciprocal root alpha of ``poly`` has |alpha| = p^{weight/2}.

    Numeric: mpmath roots at ``dps`` digits, relative deviation against ``rel_tol``.
    Exact: self-reciprocity plus real-root isolation of the trace polynomial.
    """
    details: list[str] = []
    d = poly.degree
    if d <= 0:
        return PurityReport(p, weight, max(d, 0), True, 0.0, True, ["constant polynomial"])
    with mpmath.workdps(dps):
        target = mpmath.mpf(p) ** (mpmath.mpf(weight) / 2)
        # roots of sum a_j s^j; reciprocal roots are 1/s
        roots = mpmath.polyroots(list(reversed(poly.coeffs)), maxsteps=400, extraprec=4 * dps)
        devs = [abs(abs(1 / r) / target - 1) for r in roots]
        worst = float(max(devs))
    exact = _exact_unit_circle_certificate(poly, p, weight, details)
    return PurityReport(p, weight, d, exact, worst, worst <= rel_tol, details)
