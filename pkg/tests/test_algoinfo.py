import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algoqkd.algoinfo import (
    LZ78Model,
    chain_rule_audit,
    counting_check,
    dl,
    gamma_decode,
    gamma_encode,
    joint_dl,
    length_profile,
    otp_experiment,
)
from algoqkd.gf2 import BitString, EnumerationLimitError

MODEL = LZ78Model()
bits = st.lists(st.integers(0, 1), max_size=200).map(BitString)


def test_gamma_examples():
    assert gamma_encode(1) == "1"
    assert gamma_encode(5) == "00101"
    assert gamma_decode("00101111") == (5, 5)
    with pytest.raises(ValueError):
        gamma_encode(0)


@given(st.integers(1, 10**9))
def test_gamma_round_trip(n):
    assert gamma_decode(gamma_encode(n) + "1") == (n, len(gamma_encode(n)))


@settings(max_examples=300)
@given(bits, bits)
def test_round_trip_with_side(x, side):
    code = MODEL.encode(x, side)
    assert MODEL.decode(code, side) == x
    assert dl(MODEL, x, side) == len(code)


@settings(max_examples=100)
@given(bits, bits, st.text(alphabet="01", max_size=30))
def test_self_delimiting_in_a_stream(x, side, tail):
    got, used = MODEL.decode_prefix(MODEL.encode(x, side) + tail, side)
    assert got == x and used == MODEL.dl(x, side)


def test_prefix_free_over_all_short_strings():
    words = [MODEL.encode(BitString.from_int(k, m)) for m in range(9) for k in range(1 << m)]
    assert len(set(words)) == len(words)
    ws = sorted(words)
    # in sorted order a prefix sits immediately before some extension of it
    assert not any(b.startswith(a) for a, b in zip(ws, ws[1:]))


@given(bits)
def test_literal_overhead_bound(x):
    assert MODEL.dl(x) <= len(x) + MODEL.c_model(len(x))


def test_compressible_and_conditional_examples():
    assert MODEL.dl(BitString.zeros(256)) < 128
    x = BitString.random(64, np.random.default_rng(0))
    assert MODEL.dl(x, x) < MODEL.dl(x)


def test_counting_law_every_threshold():
    for m in range(1, 11):
        lengths = length_profile(MODEL, m)
        for t in range(-1, int(lengths.max()) + 2):
            c = counting_check(MODEL, m, t)
            assert c.count == int((lengths <= t).sum()) and c.holds
    with pytest.raises(EnumerationLimitError):
        counting_check(MODEL, 17, 5)


def test_otp_experiment_brute_force_small():
    key = BitString("10110010")
    r = otp_experiment(MODEL, 8, 0.1, key_seed=0, key=key)
    thr = MODEL.dl(key) - 0.8 - MODEL.c_model(8)
    count = sum(MODEL.dl(x, x ^ key) <= thr
                for x in (BitString.from_int(k, 8) for k in range(256)))
    assert r.b_delta_size == count and r.holds and r.bound == 2 ** 7.2
    with pytest.raises(EnumerationLimitError):
        otp_experiment(MODEL, 15, 0.25, 0)


def test_joint_dl_symmetric():
    rng = np.random.default_rng(4)
    a, b = BitString.random(20, rng), BitString.random(20, rng)
    assert joint_dl(MODEL, a, b) == joint_dl(MODEL, b, a)


def test_chain_rule_audit_stable_across_seeds():
    audits = [chain_rule_audit(MODEL, 200, 12, seed) for seed in (1, 2)]
    totals = [a.c1 + a.c3 + a.c4 for a in audits]
    assert abs(totals[0] - totals[1]) <= 0.2 * max(totals)
    for field in ("c1", "c2", "c3", "c4"):
        assert abs(getattr(audits[0], field) - getattr(audits[1], field)) <= 1
    # dl(k | k) is a header plus a zero-width copy, i.e. exactly c_model(m)
    assert all(a.identical_pair_excess == 1 + MODEL.c_model(12) for a in audits)
