from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kloverify.padics import (
    L_sym_infty_euler,
    L_sym_infty_limit,
    L_unit,
    L_unit_direct,
    PadicNum,
    PrecisionError,
    closed_points,
    default_schedule,
    finite_from_infinite,
    kappa_power,
    kappa_power_bruteforce,
    kappa_schedule,
    newton_polygon,
    series_divide,
    slopes_report,
    unit_root,
    valuation,
)
from kloverify.symL import sym_power_L

primes = st.sampled_from([2, 3])


@settings(max_examples=100, deadline=None)
@given(primes, st.integers(-10**9, 10**9), st.integers(-10**9, 10**9), st.integers(1, 30))
def test_padic_ring_ops_match_integers(p, a, b, M):
    x, y = PadicNum(p, a, M), PadicNum(p, b, M)
    mod = p**M
    assert (x + y).value == (a + b) % mod
    assert (x - y).value == (a - b) % mod
    prod = x * y
    assert prod.prec >= M
    assert prod.value == (a * b) % p**prod.prec
    if b % p:
        assert ((x / y) * y).congruent(x, M)


def test_precision_loss_in_products():
    # 2 + O(2^5) times 4 + O(2^5): error 2^5 * 2 dominates
    x = PadicNum(2, 2, 5) * PadicNum(2, 4, 5)
    assert x.prec == 6
    assert PadicNum(2, 0, 7).valuation is None
    assert PadicNum(2, 0, 7).to_json()["valuation"] == ">=7"
    assert PadicNum(3, 18, 5).valuation == 2


def test_non_unit_inverse():
    with pytest.raises(ZeroDivisionError):
        PadicNum(2, 6, 10).inverse()
    with pytest.raises(PrecisionError):
        PadicNum(2, 1, 3).congruent(PadicNum(2, 1, 10), 5)


def test_digits_and_signed():
    x = PadicNum(2, -1, 6)
    assert x.digits() == [1] * 6
    assert x.signed() == -1
    assert repr(x) == "-1 + O(2^6)"


def test_unit_root_over_f2():
    r = unit_root(2, 1, 1, 40)
    x = r.pi0.value
    assert (x * x + x + 2) % 2**40 == 0
    assert x % 16 == 5
    assert r.pi1.valuation == 1
    assert (r.pi0 * r.pi1).congruent(PadicNum(2, 2, 40), 40)


@pytest.mark.parametrize("p,d", [(2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3)])
def test_unit_roots_are_one_units(p, d):
    for pt in closed_points(p, d):
        r = unit_root(p, d, pt.kl, 30)
        x = r.pi0.value
        assert (x * x + pt.kl * x + p**d) % p**30 == 0
        assert x % (4 if p == 2 else 3) == 1
        assert r.pi1.valuation == d
        # the other root is not a unit
        assert ((-pt.kl - x) % p**30) % p == 0


def test_unit_root_needs_unit_seed():
    with pytest.raises(ValueError):
        unit_root(3, 1, 3, 10)


@pytest.mark.parametrize("u", [1, 5, 13, 3, 7, 2**20 - 1])
def test_kappa_power_integer_exponents_p2(u):
    x = PadicNum(2, u, 48)
    for k in range(0, 51):
        assert kappa_power(x, k) == kappa_power_bruteforce(x, k)
    for k in range(-12, 0):
        assert kappa_power(x, k) == kappa_power_bruteforce(x, k)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3**20).map(lambda n: 3 * n + 1), st.integers(-50, 50))
def test_kappa_power_integer_exponents_p3(u, k):
    x = PadicNum(3, u, 30)
    assert kappa_power(x, k) == kappa_power_bruteforce(x, k)


def test_kappa_power_minus_one_is_inverse():
    x = PadicNum(2, 12345, 40)
    assert (kappa_power(x, -1) * x).congruent(PadicNum(2, 1, 40), 40)


def test_kappa_power_inexact_exponent():
    u = PadicNum(2, 5, 40)
    kap = PadicNum(2, 3, 10)           # known mod 2^10
    res = kappa_power(u, kap)
    assert res.prec == 12              # 10 digits of kappa plus ord_2(5 - 1)
    assert res.congruent(kappa_power(u, 3 + 2**10 * 7), 12)


def test_kappa_power_rejects_non_one_unit_for_p3():
    with pytest.raises(ValueError):
        kappa_power(PadicNum(3, 2, 10), 5)
    with pytest.raises(ValueError):
        kappa_power(PadicNum(2, 4, 10), 5)


def test_newton_polygon_examples():
    poly = newton_polygon([0, 0])                          # 1 - s
    assert poly.slopes == [0]
    poly = newton_polygon([0, 3, 1, None, 6])
    assert poly.vertices == [(0, 0), (2, 1), (4, 6)]
    assert poly.slopes == [Fraction(1, 2)] * 2 + [Fraction(5, 2)] * 2
    with pytest.raises(ValueError):
        newton_polygon([None, None])


@pytest.mark.parametrize("k", [1, 3, 5, 7, 9, 11])
def test_sym_power_polygon_equality(k):
    coeffs = sym_power_L(2, k).poly.coeffs
    poly = newton_polygon([valuation(c, 2) for c in coeffs])
    assert poly.vertices == [(m, m * (m - 1)) for m in range(len(coeffs))]


def test_slopes_report_flags_uncertain_bounds():
    series = [PadicNum(2, 1, 20), PadicNum(2, 1, 20), PadicNum(2, 0, 1), PadicNum(2, 2**6, 20)]
    rep = slopes_report(series)
    assert not rep.certified
    series[2] = PadicNum(2, 0, 15)
    assert slopes_report(series).certified


def test_closed_points_count():
    # Moebius count of monic irreducibles with nonzero constant term
    assert [len(closed_points(2, d)) for d in range(1, 7)] == [1, 1, 2, 3, 6, 9]
    assert [len(closed_points(3, d)) for d in range(1, 5)] == [2, 3, 8, 18]
    assert closed_points(2, 1)[0].kl == 1


@pytest.mark.parametrize("p,k", [(2, 1), (2, 4), (2, 7), (3, 2), (3, 5)])
def test_finite_identity(p, k):
    L = sym_power_L(p, k).poly
    got = finite_from_infinite(p, k, 8, 40)
    for n, c in enumerate(got):
        assert c.congruent(PadicNum(p, L[n] if n <= L.degree else 0, 40), c.prec)


@pytest.mark.parametrize("p,kappa,M", [(2, 1, 24), (2, -3, 24), (3, -1, 15), (3, 4, 15)])
def test_routes_agree(p, kappa, M):
    euler = L_sym_infty_euler(p, kappa, 5, M)
    limit = L_sym_infty_limit(p, kappa, 5, M).values
    assert [a.agreement(b) for a, b in zip(euler, limit)] == [M] * 6


def test_limit_detects_missing_stabilisation():
    with pytest.raises(PrecisionError):
        L_sym_infty_limit(2, 1, 4, 20, schedule=[3, 4, 5])


def test_schedules():
    assert kappa_schedule(2, 1, [3, 6]) == [9, 65]
    assert all(k % 2**e == (-1) % 2**e for k, e in zip(kappa_schedule(2, -1, [4, 8]), [4, 8]))
    ks, target = default_schedule(3, PadicNum(3, 5, 7), 20)
    assert target == 7 and all(k % 3**7 == 5 for k in ks)


@pytest.mark.parametrize("p,kappa", [(2, 3), (3, -1)])
def test_precision_tracking_is_sound(p, kappa):
    lo = L_sym_infty_euler(p, kappa, 5, 16)
    hi = L_sym_infty_euler(p, kappa, 5, 24)
    assert all(a.agreement(b) >= a.prec for a, b in zip(lo, hi))


@pytest.mark.parametrize("p", [2, 3])
def test_unit_root_l_function_kappa_zero(p):
    direct = L_unit_direct(p, 0, 6, 20)
    closed = series_divide([PadicNum(p, c, 20) for c in (1, -1, 0, 0, 0, 0, 0)],
                           [PadicNum(p, c, 20) for c in (1, -p)])
    assert direct == closed
    assert L_unit(p, 0, 4, 20).ratio is None
    assert L_unit(p, 2, 4, 20).ratio is None


@pytest.mark.parametrize("p,kappa", [(2, 1), (2, -1), (2, 6), (3, 1), (3, 7)])
def test_unit_root_ratio(p, kappa):
    cmp = L_unit(p, kappa, 5, 20)
    assert cmp.agreement == [20] * 6


@pytest.mark.parametrize("kappa", [0, 2, 4, -2])
def test_even_kappa_hull_bound(kappa):
    poly = slopes_report(L_sym_infty_euler(2, kappa, 6, 50))
    assert all(y >= x * (x - 1) for x, y in poly.vertices)
