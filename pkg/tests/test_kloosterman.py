import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kloverify.finite_field import make_field
from kloverify.kloosterman import (
    FieldArithmeticError,
    FreqTable,
    _fiber_counts_to_kl,
    admissible_traces,
    ec_count,
    ec_count_bruteforce,
    freq_table,
    freq_table_from_class_numbers,
    kl_records,
    kl_sum,
    kl_values,
)


def kl_complex(ctx, t):
    """Character sum evaluated literally with complex roots of unity and scalar arithmetic."""
    z = cmath.exp(2j * cmath.pi / ctx.p)
    total = 0
    for x in range(1, ctx.q):
        y = ctx.add(x, ctx.mul(t, ctx.inv(x)))
        total += z ** ctx.trace_code(y)
    assert abs(total.imag) < 1e-9
    return round(total.real)


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (2, 3), (2, 5), (3, 1), (3, 2), (3, 3)])
def test_values_match_complex_sum(p, m):
    ctx = make_field(p, m)
    kl = kl_values(ctx)
    for t in range(1, ctx.q):
        assert kl[t] == kl_complex(ctx, t)


@pytest.mark.parametrize("p,m", [(2, 8), (3, 5)])
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_correlation_matches_per_t_tally(p, m, data):
    ctx = make_field(p, m)
    t = data.draw(st.integers(1, ctx.q - 1))
    assert kl_values(ctx)[t] == kl_sum(ctx, t)


@pytest.mark.parametrize("p,m", [(2, 7), (3, 4)])
def test_shards_do_not_change_values(p, m):
    ctx = make_field(p, m)
    base = kl_values(ctx)
    for shards in (2, 5, 17):
        assert np.array_equal(kl_values(ctx, shards=shards), base)


@pytest.mark.parametrize("p,m,expected", [
    (2, 1, {-1: 1}),
    (2, 2, {-3: 1, 1: 2}),
    (2, 3, {-3: 3, 1: 3, 5: 1}),
    (3, 1, {-2: 1, 1: 1}),
    (3, 2, {-5: 1, -2: 3, 1: 2, 4: 2}),
])
def test_small_frequency_tables(p, m, expected):
    tab = freq_table(make_field(p, m))
    assert tab.counts == expected
    assert tab.total() == p**m - 1


def test_kl_over_f2():
    # Kl_2(1) = sum over x = 1 of (-1)^Tr(1 + 1) = 1
    assert kl_sum(make_field(2, 1), 1) == 1


def test_frobenius_invariance():
    ctx = make_field(3, 4)
    kl = kl_values(ctx)
    for t in range(1, ctx.q):
        assert kl[ctx.frobenius(t)] == kl[t]


def test_real_sum_guard():
    bad = np.array([[3, 1, 2]])
    with pytest.raises(FieldArithmeticError):
        _fiber_counts_to_kl(bad, 3)


def test_zero_t_rejected():
    with pytest.raises(ValueError):
        kl_sum(make_field(2, 3), 0)


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3)])
def test_curve_counts_match_bruteforce(p, m):
    ctx = make_field(p, m)
    for t in range(1, ctx.q):
        assert ec_count(ctx, t) == ec_count_bruteforce(ctx, t)


@pytest.mark.parametrize("p,m", [(2, 6), (3, 4)])
def test_curve_counts_give_kloosterman(p, m):
    ctx = make_field(p, m)
    kl = kl_values(ctx)
    for t in range(1, ctx.q):
        assert -kl[t] == ctx.q + 1 - ec_count(ctx, t)


def test_admissible_traces():
    assert admissible_traces(2, 2) == [-3, 1]
    assert admissible_traces(3, 1) == [-2, 1]
    for p, m in [(2, 6), (3, 4)]:
        for f in admissible_traces(p, m):
            assert f * f < 4 * p**m


@pytest.mark.parametrize("p,m", [(2, 2), (2, 5), (2, 9), (3, 1), (3, 4), (3, 6)])
def test_class_number_synthesis_matches_enumeration(p, m):
    syn = freq_table_from_class_numbers(p, m)
    enum = freq_table(make_field(p, m))
    assert syn.counts == enum.counts
    assert syn.source == "class-number"
    assert enum.source == "enumeration"


def test_class_number_synthesis_excludes_f2():
    with pytest.raises(ValueError):
        freq_table_from_class_numbers(2, 1)


def test_freq_json_roundtrip():
    tab = freq_table(make_field(3, 3))
    again = FreqTable.from_json(tab.to_json())
    assert again.counts == tab.counts
    assert again.modulus == tab.modulus
    assert tab.to_json()["freq"] == {str(f): c for f, c in sorted(tab.counts.items())}


def test_records():
    recs = kl_records(make_field(2, 2))
    assert [(r.t_index, r.value) for r in recs] == [(1, 3), (2, -1), (3, -1)]
