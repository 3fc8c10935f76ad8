"""Arithmetic in F_q for q = 2^m and q = 3^m.

Elements are stored as integer codes: the power-basis coordinate vector
``(c_0, ..., c_{m-1})`` packed as ``sum(c_i * p**i)``.  For fields with at
most ``TABLE_LIMIT`` elements, exp/log/trace tables are built lazily and used
for vectorised scans; every result is independent of that acceleration.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np
from sympy import factorint

__all__ = [
    "FqField",
    "FqElem",
    "MODULUS_TABLE",
    "TABLE_LIMIT",
    "make_field",
    "trace",
    "enumerate_units",
    "unit_ranges",
    "is_irreducible",
]

MAX_DEGREE = 30
TABLE_LIMIT = 2**20

# First primitive monic polynomial of degree m over F_p, ordered by the
# integer value of its coefficient vector read as base-p digits.
# Coefficients are listed constant term first, leading 1 omitted.
MODULUS_TABLE: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1,),
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (2, 5): (1, 0, 1, 0, 0),
    (2, 6): (1, 1, 0, 0, 0, 0),
    (2, 7): (1, 1, 0, 0, 0, 0, 0),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0),
    (2, 9): (1, 0, 0, 0, 1, 0, 0, 0, 0),
    (2, 10): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0),
    (2, 11): (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 12): (1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0),
    (2, 13): (1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 14): (1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 15): (1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 16): (1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (3, 1): (1,),
    (3, 2): (2, 1),
    (3, 3): (1, 2, 0),
    (3, 4): (2, 1, 0, 0),
    (3, 5): (1, 2, 0, 0, 0),
    (3, 6): (2, 1, 0, 0, 0, 0),
    (3, 7): (1, 2, 1, 0, 0, 0, 0),
    (3, 8): (2, 0, 0, 1, 0, 0, 0, 0),
    (3, 9): (1, 0, 1, 2, 0, 0, 0, 0, 0),
    (3, 10): (2, 1, 0, 1, 0, 0, 0, 0, 0, 0),
    (3, 11): (1, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (3, 12): (2, 2, 2, 1, 2, 0, 0, 0, 0, 0, 0, 0),
    (3, 13): (1, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (3, 14): (2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (3, 15): (1, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (3, 16): (2, 2, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
}


# -- polynomials over F_p as coefficient lists, constant term first ---------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = [c % p for c in a]
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    for d in range(len(a) - 1, df - 1, -1):
        c = a[d] * inv_lead % p
        if c:
            for i in range(df + 1):
                a[d - df + i] = (a[d - df + i] - c * f[i]) % p
    return _trim(a[:df] if len(a) > df else a)


def _poly_mulmod(a: list[int], b: list[int], f: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    r = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                r[i + j] += x * y
    return _poly_mod(r, f, p)


def _poly_powmod(a: list[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(list(a), f, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        a, b = b, _poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic ``f`` (constant term first) over F_p."""
    f = list(f)
    m = len(f) - 1
    if m < 1 or f[-1] % p != 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    if _poly_powmod(x, p**m, f, p) != _poly_mod(x, f, p):
        return False
    for r in factorint(m):
        h = _poly_powmod(x, p ** (m // r), f, p)
        h = h + [0] * max(0, 2 - len(h))
        h[1] = (h[1] - 1) % p
        if len(_poly_gcd(f, _trim(h), p)) != 1:
            return False
    return True


def _first_irreducible(p: int, m: int) -> tuple[int, ...]:
    for low in range(1, p**m):
        coeffs = [(low // p**i) % p for i in range(m)]
        if coeffs[0] and is_irreducible(coeffs + [1], p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# -- field context ------------------------------------------------------------

class FqField:
    """The field F_{p^m} = F_p[x]/(modulus).  Immutable once built."""

    def __init__(self, p: int, m: int, modulus: Sequence[int]):
        self.p = p
        self.m = m
        self.q = p**m
        # monic modulus, constant term first, including the leading 1
        self.modulus = tuple(int(c) % p for c in modulus)
        if len(self.modulus) != m + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree m")
        self._pows = tuple(p**i for i in range(m))
        # codes of x^m reduced, for the shift-and-reduce multiplication
        self._red = sum(((-c) % p) * self._pows[i] for i, c in enumerate(self.modulus[:m]))

    def __repr__(self) -> str:
        return f"FqField(p={self.p}, m={self.m}, modulus={list(self.modulus)})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FqField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.modulus))

    # element construction
    def __call__(self, value: int | Sequence[int]) -> "FqElem":
        if isinstance(value, (int, np.integer)):
            code = int(value) % self.p if self.m == 1 else int(value)
            if not 0 <= code < self.q:
                raise ValueError(f"code {value} out of range for F_{self.q}")
            return FqElem(self, code)
        return FqElem(self, self.encode(value))

    def encode(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.m:
            raise ValueError("too many coefficients")
        return sum((int(c) % self.p) * self._pows[i] for i, c in enumerate(coeffs))

    def decode(self, code: int) -> tuple[int, ...]:
        p = self.p
        out = []
        for _ in range(self.m):
            code, r = divmod(code, p)
            out.append(r)
        return tuple(out)

    @property
    def zero(self) -> "FqElem":
        return FqElem(self, 0)

    @property
    def one(self) -> "FqElem":
        return FqElem(self, 1)

    @property
    def gen(self) -> "FqElem":
        """The class of x in F_p[x]/(modulus)."""
        return FqElem(self, self.p % self.q if self.m > 1 else (-self.modulus[0]) % self.p)

    # code-level arithmetic
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        out = 0
        for w in self._pows:
            out += ((a // w + b // w) % 3) * w
        return out

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        out = 0
        for w in self._pows:
            out += ((-(a // w)) % 3) * w
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def scale(self, c: int, a: int) -> int:
        c %= self.p
        if c == 0:
            return 0
        if c == 1:
            return a
        return self.neg(a)  # c == 2 in characteristic 3

    def mul_x(self, a: int) -> int:
        """Multiply a code by the class of x."""
        p, m = self.p, self.m
        if m == 1:
            return a * self._red % p
        top = a // self._pows[-1]
        shifted = (a % self._pows[-1]) * p
        if top == 0:
            return shifted
        return self.add(shifted, self.scale(top, self._red))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if self.p == 2:
            m, red = self.m, self._red
            top = 1 << (self.m - 1)
            out = 0
            while b:
                if b & 1:
                    out ^= a
                b >>= 1
                a = ((a ^ top) << 1) ^ red if a & top else a << 1
            return out
        # characteristic 3: Horner on the digits of b, most significant first
        out = 0
        for c in reversed(self.decode(b)):
            out = self.mul_x(out)
            if c:
                out = self.add(out, self.scale(c, a))
        return out

    def power(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self.power(a, self.q - 2)

    def frobenius(self, a: int) -> int:
        return self.power(a, self.p)

    def trace_code(self, a: int) -> int:
        """Absolute trace as the Frobenius-orbit sum a + a^p + ... + a^(p^(m-1))."""
        total, y = 0, a
        for _ in range(self.m):
            total = self.add(total, y)
            y = self.frobenius(y)
        if total >= self.p:
            raise AssertionError("trace fell outside the prime field")
        return total

    # structure
    @cached_property
    def order_factors(self) -> tuple[int, ...]:
        return tuple(sorted(factorint(self.q - 1)))

    def is_primitive(self, a: int) -> bool:
        if a == 0:
            return False
        n = self.q - 1
        return self.power(a, n) == 1 and all(self.power(a, n // r) != 1 for r in self.order_factors)

    @cached_property
    def primitive_code(self) -> int:
        g = self.gen.code
        if self.is_primitive(g):
            return g
        return next(c for c in range(2, self.q) if self.is_primitive(c))

    @cached_property
    def basis_traces(self) -> np.ndarray:
        t = [self.trace_code(self._pows[i] if self.m > 1 else 1) for i in range(self.m)]
        return np.array(t, dtype=np.int64)

    # vectorised tables
    def _require_tables(self) -> None:
        if self.q > TABLE_LIMIT:
            raise ValueError(f"tables unavailable for q = {self.q} > {TABLE_LIMIT}")

    @cached_property
    def digits(self) -> np.ndarray:
        """(q, m) array of power-basis coordinates of every code."""
        self._require_tables()
        codes = np.arange(self.q, dtype=np.int64)
        return np.stack([(codes // w) % self.p for w in self._pows], axis=1)

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Tr(a) for every code a, by linearity of the trace."""
        self._require_tables()
        return (self.digits @ self.basis_traces) % self.p

    @cached_property
    def exp_table(self) -> np.ndarray:
        """exp_table[i] = code of g^i for the primitive element g, i < q - 1."""
        self._require_tables()
        n = self.q - 1
        out = np.empty(n, dtype=np.int64)
        g = self.primitive_code
        step = self.mul_x if g == self.gen.code and self.m > 1 else (lambda a: self.mul(a, g))
        a = 1
        for i in range(n):
            out[i] = a
            a = step(a)
        if a != 1:
            raise AssertionError("generator order mismatch")
        return out

    @cached_property
    def log_table(self) -> np.ndarray:
        """log_table[code] = discrete log; -1 for zero."""
        out = np.full(self.q, -1, dtype=np.int64)
        out[self.exp_table] = np.arange(self.q - 1, dtype=np.int64)
        return out

    def add_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return np.bitwise_xor(a, b)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for w in self._pows:
            out += ((a // w + b // w) % 3) * w
        return out

    def neg_vec(self, a: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return a
        out = np.zeros_like(a)
        for w in self._pows:
            out += ((-(a // w)) % 3) * w
        return out

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        log, exp = self.log_table, self.exp_table
        la, lb = log[a], log[b]
        prod = exp[(la + lb) % (self.q - 1)]
        return np.where((la < 0) | (lb < 0), 0, prod)

    def inv_vec(self, a: np.ndarray) -> np.ndarray:
        la = self.log_table[a]
        if np.any(la < 0):
            raise ZeroDivisionError("inverse of zero in F_q")
        return self.exp_table[(-la) % (self.q - 1)]

    def square_class(self, a: np.ndarray) -> np.ndarray:
        """Quadratic character: 1 on nonzero squares, -1 on non-squares, 0 at 0."""
        la = self.log_table[a]
        return np.where(la < 0, 0, np.where(la % 2 == 0, 1, -1))


@dataclass(frozen=True)
class FqElem:
    field: FqField
    code: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.decode(self.code)

    def _coerce(self, other: object) -> int:
        if isinstance(other, FqElem):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other.code
        if isinstance(other, int):
            return self.field.scale(other, 1)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else FqElem(self.field, self.field.add(self.code, b))

    __radd__ = __add__

    def __neg__(self):
        return FqElem(self.field, self.field.neg(self.code))

    def __sub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else FqElem(self.field, self.field.sub(self.code, b))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else FqElem(self.field, self.field.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return FqElem(self.field, self.field.mul(self.code, self.field.inv(b)))

    def __rtruediv__(self, other):
        return FqElem(self.field, self.field.inv(self.code)) * other

    def __pow__(self, e: int):
        return FqElem(self.field, self.field.power(self.code, e))

    def __bool__(self) -> bool:
        return self.code != 0

    def inverse(self) -> "FqElem":
        return FqElem(self.field, self.field.inv(self.code))

    def frobenius(self) -> "FqElem":
        return FqElem(self.field, self.field.frobenius(self.code))

    def trace(self) -> int:
        return self.field.trace_code(self.code)

    def __repr__(self) -> str:
        return f"FqElem({list(self.coeffs)} in F_{self.field.q})"


@lru_cache(maxsize=None)
def make_field(p: int, m: int, max_degree: int = MAX_DEGREE) -> FqField:
    """Field context for F_{p^m} with a deterministic modulus.

    Degrees up to 16 use ``MODULUS_TABLE``; beyond that the first irreducible
    polynomial in the same ordering is used.
    """
    if p not in (2, 3):
        raise ValueError(f"unsupported characteristic p={p}; only 2 and 3")
    if not 1 <= m <= max_degree:
        raise ValueError(f"extension degree m={m} outside [1, {max_degree}]")
    low = MODULUS_TABLE.get((p, m)) or _first_irreducible(p, m)
    return FqField(p, m, list(low) + [1])


def trace(ctx: FqField, x: FqElem | int) -> int:
    code = x.code if isinstance(x, FqElem) else int(x)
    return ctx.trace_code(code)


def unit_ranges(ctx: FqField, shards: int) -> list[range]:
    """Split the unit codes 1..q-1 into ``shards`` contiguous disjoint ranges."""
    if shards < 1:
        raise ValueError("shards must be >= 1")
    n = ctx.q - 1
    bounds = [1 + (n * i) // shards for i in range(shards + 1)]
    return [range(bounds[i], bounds[i + 1]) for i in range(shards)]


def enumerate_units(ctx: FqField, part: range | None = None) -> Iterator[FqElem]:
    """Yield each nonzero element once (optionally only the codes in ``part``)."""
    codes = range(1, ctx.q) if part is None else part
    for c in codes:
        yield FqElem(ctx, c)
