"""Truncated p-adic arithmetic, Newton polygons, and the p-adic symmetric power
and unit-root L-functions of the Kloosterman family over F_p.

L(Sym^{infty,kappa} Kl, s) is computed by two independent routes:

* ``L_sym_infty_euler``: the Euler product over closed points t of G_m/F_p
  of prod_i 1/(1 - pi_0(t)^{kappa-i} pi_1(t)^i s^deg(t)), with pi_0 the unit
  root of x^2 + Kl(t) x + p^deg(t) found by Hensel lifting;
* ``L_sym_infty_limit``: coefficients of the finite L(Sym^k Kl, s) along
  integers k -> kappa p-adically, built from frequency tables and the
  Chebyshev kernel only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .finite_field import make_field
from .hecke import cheb_mod, frequencies
from .kloosterman import kl_values

__all__ = [
    "PadicNum",
    "PrecisionError",
    "NewtonPolygon",
    "UnitRoot",
    "ClosedPoint",
    "LimitResult",
    "UnitRootComparison",
    "valuation",
    "newton_polygon",
    "unit_root",
    "kappa_power",
    "kappa_power_bruteforce",
    "closed_points",
    "L_sym_infty_euler",
    "L_unit_direct",
    "L_unit",
    "finite_from_infinite",
    "L_sym_infty_limit",
    "finite_sym_coeffs_mod",
    "kappa_schedule",
    "default_schedule",
    "slopes_report",
    "series_divide",
    "scale_argument",
    "DEFAULT_PRECISION",
    "DEFAULT_COEFFS",
]

DEFAULT_PRECISION = 64
DEFAULT_COEFFS = 8


class PrecisionError(ArithmeticError):
    pass


def valuation(x: int, p: int) -> int | None:
    """ord_p of a nonzero integer; None for zero."""
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _vfloor(x: int, p: int, cap: int) -> int:
    v = valuation(x % p**cap, p)
    return cap if v is None else v


@dataclass(frozen=True)
class PadicNum:
    """An element of Z_p known modulo p^prec; ``value`` is the residue in [0, p^prec)."""

    p: int
    value: int
    prec: int

    def __post_init__(self):
        if self.prec < 0:
            raise PrecisionError("negative precision")
        object.__setattr__(self, "value", self.value % self.p**self.prec)

    @classmethod
    def exact(cls, p: int, x: int, prec: int) -> "PadicNum":
        return cls(p, x, prec)

    @property
    def valuation(self) -> int | None:
        """ord_p, or None when the value is 0 to the known precision (valuation >= prec)."""
        return valuation(self.value, self.p) if self.value else None

    def _v(self) -> int:
        v = self.valuation
        return self.prec if v is None else v

    def _check(self, other: "PadicNum") -> None:
        if other.p != self.p:
            raise ValueError("mixing different primes")

    def _lift(self, other) -> "PadicNum":
        if isinstance(other, PadicNum):
            self._check(other)
            return other
        if isinstance(other, int):
            return PadicNum(self.p, other, max(self.prec, 1) + 10**6)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return PadicNum(self.p, self.value + o.value, min(self.prec, o.prec))

    __radd__ = __add__

    def __neg__(self):
        return PadicNum(self.p, -self.value, self.prec)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return PadicNum(self.p, self.value - o.value, min(self.prec, o.prec))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        prec = min(self.prec + o._v(), o.prec + self._v())
        return PadicNum(self.p, self.value * o.value, prec)

    __rmul__ = __mul__

    def is_unit(self) -> bool:
        return self.prec > 0 and self.value % self.p != 0

    def inverse(self) -> "PadicNum":
        if not self.is_unit():
            raise ZeroDivisionError("only units are invertible in Z_p")
        return PadicNum(self.p, pow(self.value, -1, self.p**self.prec), self.prec)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __pow__(self, e: int) -> "PadicNum":
        if e < 0:
            return self.inverse() ** (-e)
        out = PadicNum(self.p, 1, self.prec)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def congruent(self, other: "PadicNum", n: int) -> bool:
        if n > min(self.prec, other.prec):
            raise PrecisionError(f"cannot compare modulo p^{n}")
        return (self.value - other.value) % self.p**n == 0

    def agreement(self, other: "PadicNum") -> int:
        """Largest n <= min precision with self = other mod p^n."""
        cap = min(self.prec, other.prec)
        return _vfloor(self.value - other.value, self.p, cap)

    def digits(self) -> list[int]:
        out, x = [], self.value
        for _ in range(self.prec):
            x, r = divmod(x, self.p)
            out.append(r)
        return out

    def signed(self) -> int:
        """Representative of least absolute value."""
        mod = self.p**self.prec
        return self.value - mod if self.value > mod // 2 else self.value

    def to_json(self) -> dict:
        v = self.valuation
        return {"valuation": v if v is not None else f">={self.prec}",
                "residue": str(self.value), "precision": self.prec}

    def __repr__(self) -> str:
        return f"{self.signed()} + O({self.p}^{self.prec})"


# -- Newton polygons ----------------------------------------------------------

@dataclass
class NewtonPolygon:
    """Lower convex hull of (n, ord_p a_n).

    ``bounds`` holds points known only from below (coefficient zero to its
    precision).  ``margins[n]`` is precision minus valuation of a_n.
    """

    points: list[tuple[int, int]]
    vertices: list[tuple[int, int]]
    bounds: list[tuple[int, int]] = field(default_factory=list)
    margins: dict[int, int] = field(default_factory=dict)
    certified: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def slopes(self) -> list[Fraction]:
        """Slope multiset, one entry per unit of horizontal length."""
        out: list[Fraction] = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            out += [Fraction(y1 - y0, x1 - x0)] * (x1 - x0)
        return out

    def height(self, x: float) -> Fraction:
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x0 <= x <= x1:
                return Fraction(y0) + Fraction(y1 - y0, x1 - x0) * (x - x0)
        if self.vertices and x == self.vertices[0][0]:
            return Fraction(self.vertices[0][1])
        raise ValueError(f"{x} outside the polygon")

    def to_json(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "slopes": [str(s) for s in self.slopes],
            "margins": {str(n): m for n, m in sorted(self.margins.items())},
            "certified": self.certified,
            "notes": self.notes,
        }


def _lower_hull(points: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    pts = sorted(points)
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the segment hull[-2] -> pt
            if (y1 - y0) * (pt[0] - x0) >= (pt[1] - y0) * (x1 - x0):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon(valuations: Sequence[int | None]) -> NewtonPolygon:
    """Newton polygon from ord_p a_n (None marks a_n = 0)."""
    pts = [(n, v) for n, v in enumerate(valuations) if v is not None]
    if not pts:
        raise ValueError("all coefficients are zero")
    if valuations[0] is None:
        raise ValueError("a_0 must be nonzero")
    return NewtonPolygon(pts, _lower_hull(pts))


def slopes_report(series: Sequence[PadicNum]) -> NewtonPolygon:
    """Newton polygon of a truncated series with per-coefficient precision margins.

    Coefficients that vanish to their precision give lower bounds (n, prec);
    the polygon is certified when no such bound dips below the hull of the
    exactly known points.
    """
    exact, bounds, margins = [], [], {}
    for n, c in enumerate(series):
        v = c.valuation
        if v is None:
            bounds.append((n, c.prec))
        else:
            exact.append((n, v))
            margins[n] = c.prec - v
    if not exact or exact[0][0] != 0:
        raise PrecisionError("constant term not known to be a unit")
    hull = _lower_hull(exact)
    poly = NewtonPolygon(exact, hull, bounds, margins)
    last_x = hull[-1][0]
    for n, b in bounds:
        if n <= last_x and Fraction(b) < poly.height(n):
            poly.certified = False
            poly.notes.append(f"coefficient {n} known only to be >= {b}, below the hull")
    return poly


# -- unit roots and kappa-powers --------------------------------------------------

@dataclass(frozen=True)
class UnitRoot:
    p: int
    degree: int
    kl: int
    pi0: PadicNum

    @property
    def pi1(self) -> PadicNum:
        """The companion root p^d / pi_0, of valuation d."""
        return PadicNum(self.p, self.p**self.degree, self.pi0.prec + self.degree) * self.pi0.inverse()


def unit_root(p: int, d: int, kl: int, M: int = DEFAULT_PRECISION) -> UnitRoot:
    """Unit root of x^2 + kl x + p^d to precision p^M, by Newton-Hensel iteration."""
    if kl % p == 0:
        raise ValueError("-Kl must be a p-adic unit")
    mod = p**M
    x = (-kl) % p
    q = p**d
    for _ in range(2 * M.bit_length() + 4):
        fx = (x * x + kl * x + q) % mod
        if fx == 0:
            break
        x = (x - fx * pow((2 * x + kl) % mod, -1, mod)) % mod
    else:
        raise ArithmeticError("Hensel iteration did not converge")
    return UnitRoot(p, d, kl, PadicNum(p, x, M))


def _binomial_power(x: int, kappa: int, p: int, M: int) -> int:
    """(1 + x)^kappa mod p^M for p | x and an integer kappa, via the binomial series."""
    mod = p**M
    vx = _vfloor(x, p, M)
    if vx == 0:
        raise ValueError("binomial series needs p | x")
    total, term_binom, xpow = 0, 1, 1
    n = 0
    while n * vx < M:
        total = (total + term_binom * xpow) % mod
        term_binom = term_binom * (kappa - n) // (n + 1)
        xpow = xpow * x % mod
        n += 1
        if term_binom == 0:
            break
    return total


def kappa_power(u: PadicNum, kappa: int | PadicNum, M: int | None = None) -> PadicNum:
    """u^kappa for a unit u and kappa in Z_p.

    An ``int`` kappa is exact; a ``PadicNum`` kappa is known modulo p^e, which
    caps the result's precision at e + ord_p(u' - 1) where u' is the 1-unit
    used.  For p = 2 and u = 3 mod 4 the sign is split off: u = -v,
    u^kappa = (-1)^(kappa mod 2) v^kappa.
    """
    p = u.p
    M = u.prec if M is None else M
    if M > u.prec:
        raise PrecisionError(f"u known only modulo p^{u.prec}")
    if not u.is_unit():
        raise ValueError("kappa-powers need a unit")
    if isinstance(kappa, PadicNum):
        if kappa.p != p:
            raise ValueError("kappa lives in a different Z_p")
        k_int, k_prec = kappa.value, kappa.prec
    else:
        k_int, k_prec = int(kappa), None
    sign = 1
    val = u.value % p**M
    if p == 2 and val % 4 == 3:
        if k_prec is not None and k_prec < 1:
            raise PrecisionError("kappa mod 2 unknown")
        sign = -1 if k_int % 2 else 1
        val = (-val) % p**M
    elif p != 2 and val % p != 1:
        raise ValueError("kappa-powers need a 1-unit for odd p")
    x = val - 1
    prec = M
    if k_prec is not None:
        prec = min(M, k_prec + _vfloor(x, p, M))
    res = _binomial_power(x, k_int, p, M) * sign
    return PadicNum(p, res, prec)


def kappa_power_bruteforce(u: PadicNum, k: int) -> PadicNum:
    """u^k for an integer k by repeated multiplication (or Python's modular inverse)."""
    mod = u.p**u.prec
    return PadicNum(u.p, pow(u.value, k, mod), u.prec)


# -- closed points and Euler products ---------------------------------------------

@dataclass(frozen=True)
class ClosedPoint:
    """A Frobenius orbit of size ``degree`` in F_{p^degree}^*."""

    p: int
    degree: int
    key: tuple[int, ...]       # minimal polynomial over F_p, constant term first
    representative: int        # smallest code in the orbit
    kl: int                    # Kl_{p^degree}(t)


def _minimal_polynomial(ctx, orbit: Sequence[int]) -> tuple[int, ...]:
    poly = [1]
    for r in orbit:
        neg_r = ctx.neg(r)
        nxt = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = ctx.add(nxt[i + 1], c)
            nxt[i] = ctx.add(nxt[i], ctx.mul(c, neg_r))
        poly = nxt
    if any(c >= ctx.p for c in poly):
        raise ArithmeticError("minimal polynomial not defined over F_p")
    return tuple(poly)


@lru_cache(maxsize=None)
def closed_points(p: int, d: int) -> tuple[ClosedPoint, ...]:
    """Closed points of G_m/F_p of degree d, sorted by minimal polynomial."""
    ctx = make_field(p, d)
    kl = kl_values(ctx)
    seen = set()
    pts = []
    for t in range(1, ctx.q):
        if t in seen:
            continue
        orbit = [t]
        y = ctx.frobenius(t)
        while y != t:
            orbit.append(y)
            y = ctx.frobenius(y)
        seen.update(orbit)
        if len(orbit) != d:
            continue
        vals = {int(kl[c]) for c in orbit}
        if len(vals) != 1:
            raise ArithmeticError("Kloosterman sum not constant on a Frobenius orbit")
        pts.append(ClosedPoint(p, d, _minimal_polynomial(ctx, orbit), min(orbit), vals.pop()))
    pts.sort(key=lambda pt: pt.key)
    return tuple(pts)


def _kappa_precision(p: int, kappa: int | PadicNum, M: int) -> int:
    if isinstance(kappa, PadicNum):
        # every pi_0 here is 1 mod p (p = 3) or 1 mod 4 (p = 2)
        return min(M, kappa.prec + (2 if p == 2 else 1))
    return M


PointSource = Callable[[int, int], Sequence[ClosedPoint]]


def _series_from_points(p: int, kappa: int | PadicNum, N: int, M: int, all_i: bool,
                        points: PointSource) -> list[PadicNum]:
    mod = p**M
    series = [1] + [0] * N
    for d in range(1, N + 1):
        for pt in points(p, d):
            pi0 = unit_root(p, d, pt.kl, M).pi0
            u = kappa_power(pi0, kappa, M).value
            ratio = p**d * pow(pi0.value, -2, mod) % mod
            e = u
            i = 0
            while e and (i == 0 or all_i) and i * d < M:
                for n in range(d, N + 1):
                    series[n] = (series[n] + e * series[n - d]) % mod
                e = e * ratio % mod
                i += 1
    prec = _kappa_precision(p, kappa, M)
    return [PadicNum(p, c, prec) for c in series]


def L_sym_infty_euler(p: int, kappa: int | PadicNum, N: int = DEFAULT_COEFFS,
                      M: int = DEFAULT_PRECISION, points: PointSource = closed_points) -> list[PadicNum]:
    """c_0..c_N of L(Sym^{infty,kappa} Kl, s) from its Euler product, modulo p^M.

    Local factors with i * deg(t) >= M are 1 modulo p^M and are skipped.
    """
    return _series_from_points(p, kappa, N, M, True, points)


def L_unit_direct(p: int, kappa: int | PadicNum, N: int = DEFAULT_COEFFS,
                  M: int = DEFAULT_PRECISION, points: PointSource = closed_points) -> list[PadicNum]:
    """prod_t 1/(1 - pi_0(t)^kappa T^deg(t)), truncated at T^N."""
    return _series_from_points(p, kappa, N, M, False, points)


def series_divide(num: Sequence[PadicNum], den: Sequence[PadicNum]) -> list[PadicNum]:
    """num/den as power series; den must have unit constant term."""
    if not den[0].is_unit():
        raise ZeroDivisionError("constant term of the divisor is not a unit")
    inv0 = den[0].inverse()
    out: list[PadicNum] = []
    for n in range(len(num)):
        acc = num[n]
        for j in range(1, min(n, len(den) - 1) + 1):
            acc = acc - den[j] * out[n - j]
        out.append(acc * inv0)
    return out


def scale_argument(series: Sequence[PadicNum], factor: int) -> list[PadicNum]:
    """f(s) -> f(factor * s)."""
    return [c * factor**n for n, c in enumerate(series)]


def _minus_two(kappa: int | PadicNum) -> int | PadicNum:
    return kappa - 2 if isinstance(kappa, int) else PadicNum(kappa.p, kappa.value - 2, kappa.prec)


@dataclass
class UnitRootComparison:
    direct: list[PadicNum]
    ratio: list[PadicNum] | None      # None when kappa is 0 or 2
    agreement: list[int] | None


def L_unit(p: int, kappa: int | PadicNum, N: int = DEFAULT_COEFFS,
           M: int = DEFAULT_PRECISION, points: PointSource = closed_points) -> UnitRootComparison:
    """L_unit(kappa, s) both directly and as L(Sym^{infty,kappa})(s) / L(Sym^{infty,kappa-2})(ps).

    Raises when the two disagree at the working precision.  The ratio route
    is skipped for kappa = 0, 2.
    """
    direct = L_unit_direct(p, kappa, N, M, points)
    k_int = kappa if isinstance(kappa, int) else None
    if k_int in (0, 2):
        return UnitRootComparison(direct, None, None)
    num = L_sym_infty_euler(p, kappa, N, M, points)
    den = scale_argument(L_sym_infty_euler(p, _minus_two(kappa), N, M, points), p)
    ratio = series_divide(num, den)
    agreement = [a.agreement(b) for a, b in zip(direct, ratio)]
    for n, (a, b) in enumerate(zip(direct, ratio)):
        if agreement[n] < min(a.prec, b.prec):
            raise ArithmeticError(f"unit-root ratio identity fails at s^{n}: {a} vs {b}")
    return UnitRootComparison(direct, ratio, agreement)


def finite_from_infinite(p: int, k: int, N: int = DEFAULT_COEFFS,
                         M: int = DEFAULT_PRECISION) -> list[PadicNum]:
    """L(Sym^k Kl, s) mod p^M as L(Sym^{infty,k})(s) / L(Sym^{infty,-(k+2)})(p^(k+1) s)."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    num = L_sym_infty_euler(p, k, N, M)
    den = scale_argument(L_sym_infty_euler(p, -(k + 2), N, M), p ** (k + 1))
    return series_divide(num, den)


# -- limits of finite symmetric powers ------------------------------------------------

def finite_sym_coeffs_mod(p: int, k: int, N: int, W: int) -> list[PadicNum]:
    """c_0..c_N of L(Sym^k Kl, s) modulo p^W (less the loss from dividing by n).

    Uses S_m = sum_t c_k(-Kl(t), p^m) mod p^W with the kernel evaluated by
    matrix powering, so k may be astronomically large.
    """
    mod = p**W
    sums = []
    for m in range(1, N + 1):
        tab = frequencies(p, m)
        sums.append(sum(cnt * cheb_mod(k, f, p**m, mod) for f, cnt in tab.items()) % mod)
    vals, precs = [1], [W]
    for n in range(1, N + 1):
        total = sum(sums[j - 1] * vals[n - j] for j in range(1, n + 1))
        v = valuation(n, p)
        unit = n // p**v
        prec = min(precs) - v
        if prec <= 0:
            raise PrecisionError(f"working precision {W} exhausted at n = {n}")
        if total % p**v:
            raise ArithmeticError(f"Newton identity not divisible by {n}")
        vals.append((total // p**v) * pow(unit, -1, p**prec) % p**prec)
        precs.append(prec)
    return [PadicNum(p, x, pr) for x, pr in zip(vals, precs)]


def kappa_schedule(p: int, kappa: int | PadicNum, exponents: Sequence[int]) -> list[int]:
    """Positive integers k_i = kappa mod p^{e_i}, each at least p^{e_i} - 1 >= e_i."""
    out = []
    for e in exponents:
        if isinstance(kappa, PadicNum):
            if e > kappa.prec:
                raise PrecisionError(f"kappa known only mod p^{kappa.prec}")
            r = kappa.value % p**e
        else:
            r = kappa % p**e
        while r <= e or r < 1:
            r += p**e
        out.append(r)
    return out


def default_schedule(p: int, kappa: int | PadicNum, M: int) -> tuple[list[int], int]:
    """Schedule and stabilisation target for the limit route.

    An exact kappa uses k = kappa mod p^e for e = M, M + 4, M + 8.  A kappa known
    only modulo p^e uses three integers r + j p^e, all congruent to it, and the
    target drops to e.
    """
    if isinstance(kappa, PadicNum):
        e = kappa.prec
        r = kappa.value
        return [r + j * p**e for j in (1, 2, 3)], min(M, e)
    return kappa_schedule(p, kappa, [M, M + 4, M + 8]), M


@dataclass
class LimitResult:
    schedule: list[int]
    values: list[PadicNum]            # stabilised coefficients, precision = agreement
    agreement: list[int]              # per-coefficient pairwise agreement of the last three
    profile: list[list[PadicNum]]     # all schedule entries, for divergence reports


def L_sym_infty_limit(p: int, kappa: int | PadicNum, N: int = DEFAULT_COEFFS,
                      M: int = DEFAULT_PRECISION, schedule: Sequence[int] | None = None,
                      target: int | None = None) -> LimitResult:
    """p-adic limit of c_0..c_N of L(Sym^k Kl, s) along k -> kappa.

    The last three schedule entries must agree pairwise modulo p^target; see
    :func:`default_schedule` for the defaults.
    """
    if schedule is None:
        schedule, default_target = default_schedule(p, kappa, M)
        target = default_target if target is None else target
    target = M if target is None else target
    if len(schedule) < 3:
        raise ValueError("need at least three schedule entries")
    # extra digits absorb the division by n in Newton's identities
    loss = sum(valuation(n, p) for n in range(1, N + 1))
    W = M + loss + 2
    profile = [finite_sym_coeffs_mod(p, k, N, W) for k in schedule]
    last = profile[-3:]
    agreement, values = [], []
    for n in range(N + 1):
        a = min(last[i][n].agreement(last[j][n]) for i in range(3) for j in range(i + 1, 3))
        agreement.append(a)
        values.append(PadicNum(p, last[-1][n].value, min(a, M)))
    bad = [n for n, a in enumerate(agreement) if a < target]
    if bad:
        raise PrecisionError(f"no stabilisation modulo p^{target} at coefficients {bad}; "
                             f"agreement profile {agreement}")
    return LimitResult(list(schedule), values, agreement, profile)
