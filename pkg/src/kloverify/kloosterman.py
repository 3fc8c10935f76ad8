"""Kloosterman sums over F_{2^m} and F_{3^m}, their value frequencies, and
the elliptic-curve point counts that reproduce them.

For p = 2, 3 the sum Kl_q(t) = sum_x zeta_p^Tr(x + t/x) is a rational
integer.  It is computed from the trace-fiber counts N_c = #{x : Tr(x + t/x)
= c}: Kl = N_0 - N_1 for p = 2, and Kl = N_0 - N_1 when p = 3 (where
N_1 = N_2 is forced by reality of the sum and checked).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .finite_field import FqElem, FqField, TABLE_LIMIT, make_field

__all__ = [
    "KloostermanRecord",
    "FreqTable",
    "FieldArithmeticError",
    "kl_sum",
    "kl_values",
    "kl_records",
    "freq_table",
    "freq_table_from_class_numbers",
    "admissible_traces",
    "ec_count_p2",
    "ec_count_p3",
    "ec_count",
    "ec_count_bruteforce",
    "DIRECT_LIMIT",
]

# largest q for which frequency tables are built by direct enumeration
DIRECT_LIMIT = {2: 2**13, 3: 3**8}


class FieldArithmeticError(AssertionError):
    """An identity that holds in any correct model of F_q has failed."""


@dataclass(frozen=True)
class KloostermanRecord:
    q: int
    t_index: int
    value: int


@dataclass
class FreqTable:
    """Histogram f -> F(q, f) = #{t in F_q^* : -Kl_q(t) = f}."""

    p: int
    m: int
    counts: dict[int, int]
    source: str = "enumeration"
    modulus: tuple[int, ...] = field(default=())

    @property
    def q(self) -> int:
        return self.p**self.m

    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, f: int) -> int:
        return self.counts.get(f, 0)

    def items(self):
        return sorted(self.counts.items())

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "modulus": list(self.modulus),
            "source": self.source,
            "freq": {str(f): c for f, c in self.items()},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FreqTable":
        return cls(
            p=int(doc["p"]),
            m=int(doc["m"]),
            counts={int(f): int(c) for f, c in doc["freq"].items()},
            source=doc.get("source", "enumeration"),
            modulus=tuple(doc.get("modulus", ())),
        )


def _fiber_counts_to_kl(counts: np.ndarray, p: int) -> np.ndarray:
    """counts has shape (..., p); returns N_0 - N_1, checking N_1 = N_2 for p = 3."""
    if p == 3 and not np.array_equal(counts[..., 1], counts[..., 2]):
        raise FieldArithmeticError("N_1 != N_2: Kloosterman sum over F_3^m is not real")
    return counts[..., 0] - counts[..., 1]


def kl_sum(ctx: FqField, t: FqElem | int) -> int:
    """Kl_q(t) for a single nonzero t, by tallying Tr(x + t/x) over x in F_q^*."""
    tc = t.code if isinstance(t, FqElem) else int(t)
    if tc == 0:
        raise ValueError("t must be nonzero")
    if ctx.q <= TABLE_LIMIT:
        x = np.arange(1, ctx.q, dtype=np.int64)
        y = ctx.add_vec(x, ctx.mul_vec(np.full_like(x, tc), ctx.inv_vec(x)))
        counts = np.bincount(ctx.trace_table[y], minlength=ctx.p)
    else:
        counts = np.zeros(ctx.p, dtype=np.int64)
        for xc in range(1, ctx.q):
            y = ctx.add(xc, ctx.mul(tc, ctx.inv(xc)))
            counts[ctx.trace_code(y)] += 1
    return int(_fiber_counts_to_kl(counts, ctx.p))


def _cyclic_correlation(u: np.ndarray, v: np.ndarray, rows: np.ndarray, chunk: int) -> np.ndarray:
    """r[j] = sum_i u[i] * v[(j - i) mod n] for j in ``rows``."""
    n = len(u)
    w = v[(-np.arange(n)) % n]          # w[i] = v[-i]
    ww = np.concatenate([w, w])
    windows = sliding_window_view(ww, n)  # windows[s][i] = w[(s + i) mod n]
    out = np.empty(len(rows), dtype=np.int64)
    for lo in range(0, len(rows), chunk):
        js = rows[lo:lo + chunk]
        # v[(j - i) mod n] = w[(i - j) mod n] = windows[(n - j) mod n][i]
        out[lo:lo + chunk] = windows[(n - js) % n] @ u
    return out


def kl_values(ctx: FqField, shards: int = 1) -> np.ndarray:
    """Array ``kl`` with kl[code] = Kl_q(t) for every nonzero code (kl[0] = 0).

    Uses the discrete-log model: for t = g^j, Tr(x + t/x) = Tr(g^i) + Tr(g^(j-i)),
    so each Kl_q(g^j) is a cyclic correlation of the trace sequence with itself.
    The t-range can be split into ``shards`` independent pieces.
    """
    p, n = ctx.p, ctx.q - 1
    tr = ctx.trace_table[ctx.exp_table]
    chunk = max(1, 2**22 // max(n, 1))
    by_log = np.empty(n, dtype=np.int64)
    bounds = [(n * i) // shards for i in range(shards + 1)]
    indicators = [(tr == c).astype(np.int64) for c in range(p)]
    for s in range(shards):
        rows = np.arange(bounds[s], bounds[s + 1])
        if len(rows) == 0:
            continue
        if p == 2:
            sign = 1 - 2 * tr
            by_log[rows] = _cyclic_correlation(sign, sign, rows, chunk)
            continue
        counts = np.zeros((len(rows), 3), dtype=np.int64)
        for a in range(3):
            for b in range(a, 3):
                corr = _cyclic_correlation(indicators[a], indicators[b], rows, chunk)
                counts[:, (a + b) % 3] += corr if a == b else 2 * corr
        by_log[rows] = _fiber_counts_to_kl(counts, 3)
    out = np.zeros(ctx.q, dtype=np.int64)
    out[ctx.exp_table] = by_log
    return out


def kl_records(ctx: FqField) -> list[KloostermanRecord]:
    kl = kl_values(ctx)
    return [KloostermanRecord(ctx.q, c, int(kl[c])) for c in range(1, ctx.q)]


def freq_table(ctx: FqField, shards: int = 1) -> FreqTable:
    """Exact histogram of -Kl_q(t) over t in F_q^*, by direct enumeration."""
    kl = kl_values(ctx, shards=shards)
    vals, cnts = np.unique(-kl[1:], return_counts=True)
    counts = {int(v): int(c) for v, c in zip(vals, cnts)}
    return FreqTable(ctx.p, ctx.m, counts, "enumeration", ctx.modulus)


def admissible_traces(p: int, m: int) -> list[int]:
    """Integers f with f = 1 mod 4 (p = 2) or mod 3 (p = 3) and f^2 < 4 p^m."""
    q = p**m
    modulus = 4 if p == 2 else 3
    bound = isqrt(4 * q - 1)
    return [f for f in range(-bound, bound + 1) if f % modulus == 1 and f * f < 4 * q]


def freq_table_from_class_numbers(p: int, m: int) -> FreqTable:
    """F(q, f) synthesised as H(f^2 - 4q) over the admissible f.

    Valid for p = 3, m >= 1 and p = 2, m >= 2; the result is flagged with
    ``source="class-number"`` so it is never mistaken for an enumeration.
    """
    from .quadratic_forms import kronecker_H_many

    if p == 2 and m < 2:
        raise ValueError("class-number synthesis needs m >= 2 when p = 2")
    fs = admissible_traces(p, m)
    hs = kronecker_H_many([f * f - 4 * p**m for f in fs])
    counts = {}
    for f, h in zip(fs, hs):
        if h.denominator != 1:
            raise FieldArithmeticError(f"non-integral H({f * f - 4 * p**m}) = {h}")
        if h:
            counts[f] = int(h)
    return FreqTable(p, m, counts, "class-number", make_field(p, m).modulus)


# -- elliptic curve oracle ---------------------------------------------------

def ec_count_p2(ctx: FqField, t: FqElem | int) -> int:
    """#E_t(F_q) for E_t: Y^2 + XY = X^3 + tX over F_{2^m}, point at infinity included.

    X = 0 forces Y = 0.  For X != 0, Y = XZ turns the equation into
    Z^2 + Z = (X^3 + tX)/X^2, which has two roots iff that right side has trace 0.
    """
    if ctx.p != 2:
        raise ValueError("ec_count_p2 needs characteristic 2")
    tc = t.code if isinstance(t, FqElem) else int(t)
    x = np.arange(1, ctx.q, dtype=np.int64)
    rhs = ctx.add_vec(ctx.mul_vec(ctx.mul_vec(x, x), x), ctx.mul_vec(x, np.full_like(x, tc)))
    z = ctx.mul_vec(rhs, ctx.inv_vec(ctx.mul_vec(x, x)))
    solvable = ctx.trace_table[z] == 0
    return 1 + 1 + 2 * int(np.count_nonzero(solvable))


def ec_count_p3(ctx: FqField, t: FqElem | int) -> int:
    """#E_t(F_q) for E_t: Y^2 = X^3 + X^2 - t over F_{3^m}, via the quadratic character."""
    if ctx.p != 3:
        raise ValueError("ec_count_p3 needs characteristic 3")
    tc = t.code if isinstance(t, FqElem) else int(t)
    x = np.arange(ctx.q, dtype=np.int64)
    x2 = ctx.mul_vec(x, x)
    rhs = ctx.add_vec(ctx.add_vec(ctx.mul_vec(x2, x), x2), np.full_like(x, ctx.neg(tc)))
    return 1 + int(np.sum(1 + ctx.square_class(rhs)))


def ec_count(ctx: FqField, t: FqElem | int) -> int:
    return ec_count_p2(ctx, t) if ctx.p == 2 else ec_count_p3(ctx, t)


def ec_count_bruteforce(ctx: FqField, t: FqElem | int) -> int:
    """Count points by testing every (X, Y) pair; only sensible for tiny q."""
    tc = t.code if isinstance(t, FqElem) else int(t)
    n = 1
    for X in range(ctx.q):
        x2 = ctx.mul(X, X)
        x3 = ctx.mul(x2, X)
        for Y in range(ctx.q):
            y2 = ctx.mul(Y, Y)
            if ctx.p == 2:
                lhs, rhs = ctx.add(y2, ctx.mul(X, Y)), ctx.add(x3, ctx.mul(tc, X))
            else:
                lhs, rhs = y2, ctx.sub(ctx.add(x3, x2), tc)
            n += lhs == rhs
    return n

