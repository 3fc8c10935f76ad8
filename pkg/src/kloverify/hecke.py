"""Traces of T_q = U_p^m on S_w(Gamma_1(4)) (p = 2) and S_w(Gamma_1(3)) (p = 3),
and the power sums S_m that the symmetric-power L-function is built from.

Both rest on the kernel c_j(f, q) = (rho^(j+1) - rhobar^(j+1)) / (rho - rhobar)
for the roots rho, rhobar of X^2 - fX + q, evaluated by its integer recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .finite_field import make_field
from .kloosterman import DIRECT_LIMIT, FreqTable, admissible_traces, freq_table, freq_table_from_class_numbers
from .quadratic_forms import kronecker_H_many

__all__ = [
    "TraceSeq",
    "cheb",
    "cheb_mod",
    "trace_Tq_gamma1_4",
    "trace_Tq_gamma1_3",
    "trace_Up",
    "trace_sequence",
    "power_sum_S",
    "power_sums",
    "frequencies",
    "EXTENDED_MAX_M",
]

EXTENDED_MAX_M = 24


def cheb(j: int, f: int, q: int) -> int:
    """c_j(f, q): c_0 = 1, c_1 = f, c_{j+1} = f c_j - q c_{j-1}."""
    if j < 0:
        raise ValueError("index must be >= 0")
    prev, cur = 0, 1
    for _ in range(j):
        prev, cur = cur, f * cur - q * prev
    return cur


def cheb_mod(j: int, f: int, q: int, modulus: int) -> int:
    """c_j(f, q) mod ``modulus`` in O(log j) steps, for very large j."""
    if j < 0:
        raise ValueError("index must be >= 0")
    # (c_n, c_{n-1}) = A^n (1, 0) with A = [[f, -q], [1, 0]]
    a, b, c, d = 1, 0, 0, 1
    ea, eb, ec, ed = f % modulus, (-q) % modulus, 1, 0
    n = j
    while n:
        if n & 1:
            a, b, c, d = (a * ea + b * ec) % modulus, (a * eb + b * ed) % modulus, \
                (c * ea + d * ec) % modulus, (c * eb + d * ed) % modulus
        ea, eb, ec, ed = (ea * ea + eb * ec) % modulus, (ea * eb + eb * ed) % modulus, \
            (ec * ea + ed * ec) % modulus, (ec * eb + ed * ed) % modulus
        n >>= 1
    return a % modulus


def _require_integer(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise ArithmeticError(f"{what} is not an integer: {value}")
    return value.numerator


def _class_number_sum(p: int, j: int, m: int) -> Fraction:
    q = p**m
    fs = admissible_traces(p, m)
    hs = kronecker_H_many([f * f - 4 * q for f in fs])
    return sum((cheb(j, f, q) * h for f, h in zip(fs, hs)), Fraction(0))


def trace_Tq_gamma1_4(w: int, m: int) -> int:
    """Tr(T_{2^m} | S_w(Gamma_1(4))) from the Eichler-Selberg formula, w >= 3."""
    if w < 3:
        raise ValueError("weight must be >= 3 for Gamma_1(4)")
    if m < 1:
        raise ValueError("m must be >= 1")
    q = 2**m
    sign = -1 if (q * w // 2) % 2 else 1
    return _require_integer(-1 - sign * _class_number_sum(2, w - 2, m), f"Tr(T_{q}) at weight {w}")


def trace_Tq_gamma1_3(w: int, m: int) -> int:
    """Tr(T_{3^m} | S_w(Gamma_1(3))) from the Eichler-Selberg formula, w >= 3."""
    if w < 3:
        raise ValueError("weight must be >= 3")
    if m < 1:
        raise ValueError("m must be >= 1")
    return _require_integer(-1 - _class_number_sum(3, w - 2, m), f"Tr(T_{3**m}) at weight {w}")


def trace_Up(p: int, w: int, m: int) -> int:
    if p == 2:
        return trace_Tq_gamma1_4(w, m)
    if p == 3:
        return trace_Tq_gamma1_3(w, m)
    raise ValueError(f"unsupported p={p}")


@dataclass(frozen=True)
class TraceSeq:
    """Tr(U_p^m | S_w(Gamma)) for m = 1..len(values)."""

    p: int
    weight: int
    values: tuple[int, ...]

    def __post_init__(self):
        if not all(isinstance(v, int) for v in self.values):
            raise TypeError("trace values must be exact integers")


def trace_sequence(p: int, w: int, max_m: int) -> TraceSeq:
    return TraceSeq(p, w, tuple(trace_Up(p, w, m) for m in range(1, max_m + 1)))


@lru_cache(maxsize=None)
def frequencies(p: int, m: int, mode: str = "auto") -> FreqTable:
    """Frequency table F(p^m, .), by enumeration or synthesised from class numbers.

    ``auto`` enumerates up to ``DIRECT_LIMIT`` and synthesises above it.  The
    q = 2 table always comes from enumeration.
    """
    q = p**m
    if mode == "direct" or (mode == "auto" and q <= DIRECT_LIMIT[p]) or (p == 2 and m == 1):
        if q > DIRECT_LIMIT[p]:
            raise ValueError(f"direct enumeration capped at q <= {DIRECT_LIMIT[p]}, got {q}")
        return freq_table(make_field(p, m))
    if mode not in ("auto", "classnumber"):
        raise ValueError(f"unknown mode {mode!r}")
    if m > EXTENDED_MAX_M:
        raise ValueError(f"m={m} beyond the extended range {EXTENDED_MAX_M}")
    return freq_table_from_class_numbers(p, m)


def power_sum_S(p: int, k: int, m: int, mode: str = "auto") -> int:
    """S_m = sum over t in F_{p^m}^* of c_k(-Kl(t), p^m).

    ``direct`` uses the enumerated frequency table; ``classnumber`` evaluates
    sum_f c_k(f, p^m) H(f^2 - 4p^m).  For p = 2, m = 1 both use Kl_2(1) = 1,
    i.e. the roots of x^2 + x + 2.
    """
    if p not in (2, 3):
        raise ValueError(f"unsupported p={p}")
    if k < 0 or m < 1:
        raise ValueError("need k >= 0 and m >= 1")
    q = p**m
    if p == 2 and m == 1 and mode != "direct":
        return cheb(k, -1, 2)
    if mode == "classnumber":
        return _require_integer(_class_number_sum(p, k, m), f"S_{m}")
    tab = frequencies(p, m, "direct" if mode == "direct" else "auto")
    return sum(count * cheb(k, f, q) for f, count in tab.items())


def power_sums(p: int, k: int, max_m: int, mode: str = "auto") -> list[int]:
    return [power_sum_S(p, k, m, mode) for m in range(1, max_m + 1)]
