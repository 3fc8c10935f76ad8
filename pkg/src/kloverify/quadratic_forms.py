"""Class numbers of positive-definite binary quadratic forms.

``class_number_h(D)`` counts primitive reduced forms (a, b, c) with
b^2 - 4ac = D, weighted 1/3 at D = -3 and 1/2 at D = -4.  ``kronecker_H(D)``
sums it over the square divisors f^2 of D with D/f^2 still a discriminant,
which is the weighted count of all (not necessarily primitive) reduced forms.

Two enumerations are provided: the (a, b) loop over reduced forms, and a
b-loop that lists the divisors a of (b^2 - D)/4.  The latter is also compiled
with numba for the large discriminants the extended trace range needs.
"""

from __future__ import annotations

import json
import threading
from fractions import Fraction
from math import gcd, isqrt
from pathlib import Path
from typing import Iterable

import numpy as np
from numba import njit
from sympy import divisors, factorint

__all__ = [
    "class_number_h",
    "class_number_h_bloop",
    "class_number_h_fast",
    "kronecker_H",
    "kronecker_H_many",
    "ClassNumberCache",
    "reduced_forms",
    "check_discriminant",
]

# above this |D| the compiled b-loop replaces the pure-Python form loop
FAST_THRESHOLD = 200_000


def check_discriminant(D: int) -> None:
    if D >= 0:
        raise ValueError(f"discriminant must be negative, got {D}")
    if D % 4 not in (0, 1):
        raise ValueError(f"{D} is not 0 or 1 mod 4")


def _weight(D: int) -> Fraction:
    return Fraction(1, 3) if D == -3 else Fraction(1, 2) if D == -4 else Fraction(1)


def reduced_forms(D: int, primitive: bool = True) -> list[tuple[int, int, int]]:
    """Reduced forms (a, b, c): |b| <= a <= c, b >= 0 if |b| = a or a = c."""
    check_discriminant(D)
    out = []
    for a in range(1, isqrt(-D // 3) + 1):
        for b in range(-a + 1, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if primitive and gcd(gcd(a, b), c) != 1:
                continue
            out.append((a, b, c))
    return out


def class_number_h(D: int) -> Fraction:
    """Weighted number of reduced forms of discriminant D."""
    return len(reduced_forms(D)) * _weight(D)


def class_number_h_bloop(D: int) -> Fraction:
    """Same count as :func:`class_number_h`, enumerated by b then divisors a of (b^2-D)/4."""
    check_discriminant(D)
    count = 0
    for b in range(D % 2, isqrt(-D // 3) + 1, 2):
        n = (b * b - D) // 4
        for a in range(max(b, 1), isqrt(n) + 1):
            if n % a:
                continue
            c = n // a
            if gcd(gcd(a, b), c) != 1:
                continue
            if b == 0:
                count += 1
            else:
                count += 1 if (a == b or a == c) else 2
    return count * _weight(D)


# -- compiled b-loop ----------------------------------------------------------

_sieve_lock = threading.Lock()
_spf = np.zeros(2, dtype=np.int64)


def _smallest_prime_factors(limit: int) -> np.ndarray:
    global _spf
    with _sieve_lock:
        if len(_spf) > limit:
            return _spf
        size = max(limit + 1, 2 * len(_spf))
        spf = np.zeros(size, dtype=np.int32)
        spf[1] = 1
        for i in range(2, isqrt(size - 1) + 1):
            if spf[i] == 0:
                block = spf[i * i::i]
                block[block == 0] = i
        unset = np.nonzero(spf == 0)[0]
        spf[unset] = unset
        _spf = spf
        return spf


@njit(cache=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _count_forms_bloop(D, spf):
    """Number of primitive reduced forms of discriminant D (unweighted)."""
    count = 0
    bmax = int(np.sqrt(-D / 3.0)) + 1
    while 3 * bmax * bmax > -D:
        bmax -= 1
    divs = np.empty(4096, dtype=np.int64)
    b = D & 1
    while b <= bmax:
        n = (b * b - D) // 4
        # divisors of n from its factorisation
        nd = 1
        divs[0] = 1
        x = n
        while x > 1:
            pr = spf[x]
            e = 0
            while x % pr == 0:
                x //= pr
                e += 1
            base = nd
            pw = 1
            for _ in range(e):
                pw *= pr
                for i in range(base):
                    divs[nd] = divs[i] * pw
                    nd += 1
        lo = b if b > 1 else 1
        for i in range(nd):
            a = divs[i]
            if a < lo or a * a > n:
                continue
            c = n // a
            if _gcd(_gcd(a, b), c) != 1:
                continue
            if b == 0 or a == b or a == c:
                count += 1
            else:
                count += 2
        b += 2
    return count


def class_number_h_fast(D: int) -> Fraction:
    """Compiled b-loop; needs a prime sieve up to |D|/3."""
    check_discriminant(D)
    spf = _smallest_prime_factors(-D // 3 + 2)
    return int(_count_forms_bloop(np.int64(D), spf)) * _weight(D)


# -- Kronecker/Hurwitz sum ------------------------------------------------------

class ClassNumberCache:
    """Read-mostly memo of H(D); persisted as JSON {"D": [num, den]}."""

    def __init__(self):
        self._h: dict[int, Fraction] = {}
        self._H: dict[int, Fraction] = {}
        self._lock = threading.Lock()

    def h(self, D: int) -> Fraction:
        val = self._h.get(D)
        if val is None:
            val = class_number_h(D) if -D <= FAST_THRESHOLD else class_number_h_fast(D)
            with self._lock:
                self._h[D] = val
        return val

    def H(self, D: int) -> Fraction:
        val = self._H.get(D)
        if val is None:
            check_discriminant(D)
            val = sum((self.h(D // (f * f)) for f in _square_divisors(D)), Fraction(0))
            with self._lock:
                self._H[D] = val
        return val

    @property
    def entries(self) -> dict[int, Fraction]:
        return dict(self._H)

    def to_json(self) -> dict:
        return {str(D): [v.numerator, v.denominator] for D, v in sorted(self._H.items())}

    def load_json(self, doc: dict) -> None:
        for D, (num, den) in doc.items():
            self._H[int(D)] = Fraction(num, den)

    def save(self, path: Path) -> None:
        path.write_text(json.dumps(self.to_json(), sort_keys=True))


def _square_divisors(D: int) -> list[int]:
    """f >= 1 with f^2 | D and D/f^2 = 0 or 1 mod 4."""
    g = 1
    for prime, e in factorint(-D).items():
        g *= prime ** (e // 2)
    return [f for f in divisors(g) if (D // (f * f)) % 4 in (0, 1)]


_default_cache = ClassNumberCache()


def kronecker_H(D: int, cache: ClassNumberCache | None = None) -> Fraction:
    """H(D) = sum of class_number_h(D/f^2) over admissible square divisors f^2 of D."""
    return (cache or _default_cache).H(D)


def kronecker_H_many(Ds: Iterable[int], cache: ClassNumberCache | None = None) -> list[Fraction]:
    cache = cache or _default_cache
    Ds = list(Ds)
    big = [D for D in Ds if -D > FAST_THRESHOLD]
    if big:
        _smallest_prime_factors(-min(big) // 3 + 2)
    return [cache.H(D) for D in Ds]
