import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import GF, Poly, symbols

from kloverify.finite_field import (
    MODULUS_TABLE,
    FqElem,
    FqField,
    enumerate_units,
    is_irreducible,
    make_field,
    trace,
    unit_ranges,
)

X = symbols("x")

SMALL = [(2, m) for m in range(1, 9)] + [(3, m) for m in range(1, 6)]


def _sympy_poly(p, coeffs):
    return Poly(list(reversed(coeffs)), X, domain=GF(p))


@pytest.mark.parametrize("p,m", sorted(MODULUS_TABLE))
def test_table_moduli_are_primitive(p, m):
    ctx = make_field(p, m)
    assert _sympy_poly(p, ctx.modulus).is_irreducible
    assert ctx.is_primitive(ctx.gen.code)


@pytest.mark.parametrize("p,m", [(2, 4), (2, 6), (3, 3), (3, 4)])
def test_table_modulus_is_first_primitive(p, m):
    # no smaller code gives a primitive polynomial
    target = MODULUS_TABLE[(p, m)]
    code = sum(c * p**i for i, c in enumerate(target))
    for low in range(1, code):
        coeffs = [(low // p**i) % p for i in range(m)]
        if not coeffs[0] or not is_irreducible(coeffs + [1], p):
            continue
        ctx = FqField(p, m, coeffs + [1])
        assert not ctx.is_primitive(ctx.gen.code)


@pytest.mark.parametrize("p,m", [(2, 17), (3, 17)])
def test_large_degree_uses_irreducible(p, m):
    ctx = make_field(p, m)
    assert _sympy_poly(p, ctx.modulus).is_irreducible


@pytest.mark.parametrize("p", [2, 3])
def test_rabin_matches_sympy(p):
    for m in range(1, 6):
        for low in range(p**m):
            coeffs = [(low // p**i) % p for i in range(m)] + [1]
            assert is_irreducible(coeffs, p) == _sympy_poly(p, coeffs).is_irreducible


def test_bad_parameters():
    with pytest.raises(ValueError):
        make_field(5, 2)
    with pytest.raises(ValueError):
        make_field(2, 0)
    with pytest.raises(ValueError):
        make_field(2, 31)
    with pytest.raises(ZeroDivisionError):
        make_field(3, 2).inv(0)


def _elems(p, m):
    q = p**m
    return st.integers(min_value=0, max_value=q - 1)


@pytest.mark.parametrize("p,m", [(2, 5), (3, 3), (2, 13), (3, 7)])
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_field_axioms(p, m, data):
    ctx = make_field(p, m)
    a, b, c = (ctx(data.draw(_elems(p, m))) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ctx.zero
    assert a * ctx.one == a
    if a:
        assert a * a.inverse() == ctx.one
    # Frobenius is additive and multiplicative
    assert (a + b).frobenius() == a.frobenius() + b.frobenius()
    assert (a * b).frobenius() == a.frobenius() * b.frobenius()


@pytest.mark.parametrize("p,m", SMALL)
def test_trace_table_matches_orbit_sum(p, m):
    ctx = make_field(p, m)
    tab = ctx.trace_table
    for code in range(ctx.q):
        assert tab[code] == ctx.trace_code(code)


@pytest.mark.parametrize("p,m", SMALL)
def test_exp_log_tables(p, m):
    ctx = make_field(p, m)
    exp, log = ctx.exp_table, ctx.log_table
    assert sorted(exp.tolist()) == list(range(1, ctx.q))
    assert np.all(exp[log[1:]] == np.arange(1, ctx.q))
    assert exp[0] == 1
    if ctx.q > 2:
        assert exp[1] == ctx.primitive_code


@pytest.mark.parametrize("p,m", [(2, 3), (3, 2)])
def test_vector_ops_match_scalar(p, m):
    ctx = make_field(p, m)
    codes = np.arange(ctx.q)
    for b in range(ctx.q):
        bs = np.full_like(codes, b)
        assert ctx.mul_vec(codes, bs).tolist() == [ctx.mul(a, b) for a in range(ctx.q)]
        assert ctx.add_vec(codes, bs).tolist() == [ctx.add(a, b) for a in range(ctx.q)]
    nz = codes[1:]
    assert ctx.inv_vec(nz).tolist() == [ctx.inv(a) for a in range(1, ctx.q)]


def test_trace_is_onto_prime_field_and_balanced():
    for p, m in SMALL:
        ctx = make_field(p, m)
        counts = np.bincount(ctx.trace_table, minlength=p)
        assert counts.tolist() == [p ** (m - 1)] * p


def test_f4_multiplication_table():
    ctx = make_field(2, 2)         # x^2 = x + 1
    w = ctx.gen
    assert w * w == w + 1
    assert w**3 == ctx.one
    assert trace(ctx, w) == 1
    assert trace(ctx, ctx.one) == 0


def test_f9_structure():
    ctx = make_field(3, 2)         # x^2 + x + 2 = 0
    x = ctx.gen
    assert x * x == -x - 2
    assert x**8 == ctx.one and x**4 != ctx.one


def test_shards_partition_units():
    ctx = make_field(3, 4)
    for shards in (1, 3, 7, 80):
        parts = unit_ranges(ctx, shards)
        seen = [c for part in parts for c in part]
        assert seen == list(range(1, ctx.q))
    assert [e.code for e in enumerate_units(ctx, unit_ranges(ctx, 4)[1])] == list(unit_ranges(ctx, 4)[1])
    with pytest.raises(ValueError):
        unit_ranges(ctx, 0)


def test_elements_from_other_fields_rejected():
    a = make_field(2, 3).gen
    b = make_field(2, 4).gen
    with pytest.raises(ValueError):
        a + b
    assert isinstance(a + 1, FqElem)
