import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algoqkd.gf2 import BitString, EnumerationLimitError, dot
from algoqkd.lincode import (
    CodeConstructionError,
    CodeRequirement,
    LinearCode,
    character_sum,
    construct_code,
    distance_floor,
    dual_coset,
    min_distance,
    privacy_amplify,
    read_code,
    write_code,
)


def _brute_distance(code):
    rows = [np.array(list(map(int, str(r)))) for r in code.generators]
    best = code.n
    for coeffs in itertools.product((0, 1), repeat=code.m):
        if any(coeffs):
            w = sum(c * r for c, r in zip(coeffs, rows)) % 2
            best = min(best, int(w.sum()))
    return best


def test_hamming_code_distance():
    code = LinearCode.from_generators(["1110000", "1001100", "0101010", "1101001"])
    assert code.min_distance == 3 == min_distance(code)


def test_distance_floor_and_requirement():
    assert distance_floor(100, 0.11, 0.01) == 24
    assert CodeRequirement.for_protocol(100, 4, 0.11, 0.01).distance_floor == 24
    with pytest.raises(ValueError):
        CodeRequirement(4, 5, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 14), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_construct_code_meets_floor(n, m, seed):
    m = min(m, n - 1)
    floor = n // 4
    try:
        code = construct_code(CodeRequirement(n, m, floor), seed, max_attempts=300)
    except CodeConstructionError:
        return
    assert code.min_distance > floor
    assert code.min_distance == _brute_distance(code)


def test_construct_code_large_n():
    code = construct_code(CodeRequirement.for_protocol(1024, 12, 0.0, 0.05), seed=1)
    assert code.n == 1024 and code.min_distance > 102


def test_infeasible_codes_raise():
    with pytest.raises(CodeConstructionError):
        construct_code(CodeRequirement(5, 5, 1), seed=0)
    with pytest.raises(CodeConstructionError):
        construct_code(CodeRequirement(5, 2, 5), seed=0)
    with pytest.raises(EnumerationLimitError):
        construct_code(CodeRequirement(40, 25, 1), seed=0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dual_coset_is_the_fibre(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 10))
    m = int(rng.integers(1, n))
    code = construct_code(CodeRequirement(n, m, 0), seed=seed)
    y = BitString.random(m, rng)
    fibre = {BitString(x) for x in itertools.product((0, 1), repeat=n)
             if privacy_amplify(code, BitString(x)) == y}
    assert dual_coset(code, y) == fibre
    assert len(fibre) == 2 ** (n - m)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_character_sum_against_direct_sum(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 10))
    code = construct_code(CodeRequirement(n, int(rng.integers(1, n)), 0), seed=seed)
    y = BitString.random(code.m, rng)
    s, t = BitString.random(n, rng), BitString.random(n, rng)
    direct = sum((-1) ** dot(x, s ^ t) for x in dual_coset(code, y))
    assert character_sum(code, y, s, t) == direct


def test_character_sum_orthogonality():
    code = construct_code(CodeRequirement(12, 3, 5), seed=4)
    r = (code.min_distance - 1) // 2
    rng = np.random.default_rng(0)
    for _ in range(50):
        y = BitString.random(3, rng)
        s = BitString.zeros(12)
        t = BitString([1] * r + [0] * (12 - r))
        assert character_sum(code, y, s, s) == 2 ** 9
        assert character_sum(code, y, s, t) == (2 ** 9 if r == 0 else 0)


@given(st.integers(0, 2**32 - 1))
def test_privacy_amplification_is_linear(seed):
    rng = np.random.default_rng(seed)
    code = construct_code(CodeRequirement(16, 4, 3), seed=3)
    a, b = BitString.random(16, rng), BitString.random(16, rng)
    assert privacy_amplify(code, a ^ b) == privacy_amplify(code, a) ^ privacy_amplify(code, b)


def test_code_file_round_trip():
    code = construct_code(CodeRequirement(20, 5, 4), seed=9)
    assert read_code(write_code(code)).generators == code.generators
    bad = write_code(code).replace(f" {code.min_distance}\n", f" {code.min_distance + 1}\n", 1)
    with pytest.raises(ValueError):
        read_code(bad)
