import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algoqkd.gf2 import (
    BitString,
    EnumerationLimitError,
    Gf2Error,
    Gf2Matrix,
    all_bitstrings,
    check_enumerable,
    dot,
    hamming_distance,
    hamming_weight,
    nullspace,
    rank,
    solve,
    xor,
)

bitstrings = st.integers(1, 24).flatmap(
    lambda n: st.lists(st.integers(0, 1), min_size=n, max_size=n).map(BitString))


def pair(n_max=24):
    return st.integers(1, n_max).flatmap(lambda n: st.tuples(
        *[st.lists(st.integers(0, 1), min_size=n, max_size=n).map(BitString)] * 3))


def test_bitstring_basics():
    b = BitString("1011")
    assert len(b) == 4 and str(b) == "1011" and b[0] == 1 and b[1] == 0
    assert b + BitString("01") == BitString("101101")
    assert BitString.from_int(6, 4) == BitString("0110")  # least significant bit first
    assert BitString.from_int(6, 4).to_int() == 6
    assert hash(b) == hash(BitString([1, 0, 1, 1]))
    with pytest.raises(IndexError):
        b[4]
    with pytest.raises(IndexError):
        b[-1]
    with pytest.raises(ValueError):
        b.bits[0] = 0


def test_xor_dot_examples():
    assert xor(BitString("1100"), BitString("1010")) == BitString("0110")
    assert dot(BitString("1101"), BitString("1011")) == 0
    assert dot(BitString("111"), BitString("100")) == 1
    assert hamming_weight(BitString("10110")) == 3
    assert hamming_distance(BitString("000"), BitString("111")) == 3
    with pytest.raises(Gf2Error):
        xor(BitString("1"), BitString("10"))


@given(pair())
def test_xor_is_a_group(t):
    a, b, c = t
    assert a ^ b ^ b == a
    assert (a ^ b) ^ c == a ^ (b ^ c)
    assert hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c)


@given(pair())
def test_dot_bilinear(t):
    a, b, c = t
    assert dot(a ^ b, c) == dot(a, c) ^ dot(b, c)
    assert dot(a, b) == int(np.dot(a.bits.astype(int), b.bits.astype(int)) % 2)


def _brute_rank(rows):
    span = {0}
    for r in rows:
        span |= {s ^ r for s in span}
    return len(span).bit_length() - 1


@settings(max_examples=60)
@given(st.integers(1, 6), st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_rank_and_nullspace_against_enumeration(r, c, seed):
    m = Gf2Matrix(np.random.default_rng(seed).integers(0, 2, (r, c), dtype=np.uint8))
    ints = m.row_ints()
    assert rank(m) == _brute_rank(ints)
    ns = nullspace(m)
    assert ns.rows == c - rank(m)
    for v in ns:
        assert all(dot(row, v) == 0 for row in m)
    # kernel size by enumeration
    kernel = sum(all(dot(row, BitString(x)) == 0 for row in m) for x in all_bitstrings(c))
    assert kernel == 2 ** ns.rows


def test_solve():
    m = Gf2Matrix([[1, 1, 0], [0, 1, 1]])
    x = solve(m, BitString("10"))
    assert BitString([dot(row, x) for row in m]) == BitString("10")
    assert solve(Gf2Matrix([[1, 1], [1, 1]]), BitString("10")) is None


def test_enumeration_limit():
    check_enumerable(24)
    with pytest.raises(EnumerationLimitError):
        check_enumerable(25)


def test_all_bitstrings():
    table = all_bitstrings(3)
    assert table.shape == (8, 3)
    assert {tuple(r) for r in table} == set(itertools.product((0, 1), repeat=3))
