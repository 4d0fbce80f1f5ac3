import json
from dataclasses import replace

import numpy as np
import pytest

from algoqkd.algoinfo import LZ78Model
from algoqkd.analysis import aggregate_sessions, binary_entropy
from algoqkd.gf2 import BitString, hamming_weight
from algoqkd.lincode import CodeRequirement, construct_code, privacy_amplify
from algoqkd.protocol import (
    AttackStrategy,
    ConfigError,
    KeyPool,
    PoolExhausted,
    ProtocolConfig,
    ProtocolTranscript,
    QubitBatch,
    abort_threshold,
    eve_channel,
    eve_guess_proxy,
    eve_side_information,
    reconcile_cost,
    run_session,
    session_seed,
)

NONE = AttackStrategy.none()
RANDOM = AttackStrategy.intercept_resend("random_per_qubit")


def make_config(n=64, m=6, p=0.02, eps=0.05, **kw):
    code = construct_code(CodeRequirement.for_protocol(n, m, p, eps), seed=3)
    return ProtocolConfig(n=n, p=p, epsilon=eps, delta=0.05, code=code, seed=1, **kw)


def test_noiseless_session_agrees():
    cfg = make_config()
    t = run_session(cfg, NONE, KeyPool(10**6))
    assert not t.aborted and t.observed_error_count == 0
    assert t.final_key == t.final_key_bob == privacy_amplify(cfg.code, t.sifted_alice)
    assert len(t.test_set) == 64 and len(set(t.test_set)) == 64
    assert len(t.sifted_alice) == 64 and len(t.eve_record) == 0


def test_abort_rule_boundary():
    assert abort_threshold(100, 0.11) == 11
    assert abort_threshold(64, 0.0) == 0
    # with detector noise, the abort decision must follow count > floor(N p)
    cfg = make_config(noise=0.03)
    for i in range(40):
        t = run_session(replace(cfg, seed=i), NONE, KeyPool(10**6))
        assert t.observed_error_count == hamming_weight(t.z_t ^ t.z_t_bob)
        assert t.aborted == (t.observed_error_count > abort_threshold(64, 0.02))
        assert t.boundary_hit == (t.observed_error_count == abort_threshold(64, 0.02))


def test_reconcile_debit_and_pool():
    cfg = make_config()
    expected = int(np.ceil(64 * binary_entropy(0.02))) + 32
    assert reconcile_cost(64, 0.02) == expected
    pool = KeyPool(expected)
    t = run_session(cfg, NONE, pool)
    assert t.pool_debit == expected and pool.remaining_bits == 0
    with pytest.raises(PoolExhausted):
        run_session(cfg, NONE, pool)
    assert pool.consumed_bits == expected


def test_aborted_sessions_are_not_debited():
    cfg = make_config(n=256, m=6, p=0.0, eps=0.05)
    pool = KeyPool(10**6)
    t = run_session(cfg, RANDOM, pool)
    assert t.aborted and t.final_key is None and t.pool_debit == 0
    assert pool.consumed_bits == 0


@pytest.mark.parametrize("field,value,needle", [
    ("epsilon", 0.0, "epsilon > 0"),
    ("p", 0.48, "p + epsilon < 1/2"),
    ("delta", 0.0, "delta > 0"),
    ("channel_mode", "bogus", "channel_mode"),
])
def test_config_invariants_named(field, value, needle):
    with pytest.raises(ConfigError, match=needle.replace("+", r"\+")):
        replace(make_config(), **{field: value}).validate()


def test_distance_invariant():
    weak = construct_code(CodeRequirement(64, 6, 0), seed=0)
    cfg = replace(make_config(), code=weak)
    if weak.min_distance <= 8:
        with pytest.raises(ConfigError, match="d\\(C\\)"):
            cfg.validate()


def test_determinism_and_json_round_trip():
    cfg = make_config()
    a = run_session(cfg, RANDOM, KeyPool(10**6))
    b = run_session(cfg, RANDOM, KeyPool(10**6))
    assert a.to_json() == b.to_json()
    back = ProtocolTranscript.from_json(a.to_json(), cfg.code)
    assert back.to_json() == a.to_json()
    assert json.loads(a.to_json())["schema"] == "v1"
    assert run_session(replace(cfg, seed=2), RANDOM, KeyPool(10**6)).to_json() != a.to_json()


@pytest.mark.parametrize("attack", [NONE, RANDOM, AttackStrategy.intercept_resend("always_plus")])
def test_joint_statevector_matches_per_qubit(attack):
    code = construct_code(CodeRequirement.for_protocol(6, 1, 0.1, 0.1), seed=0)
    base = ProtocolConfig(n=6, p=0.1, epsilon=0.1, delta=0.1, code=code, seed=0)
    for s in range(5):
        per = run_session(replace(base, seed=s), attack, KeyPool(10**6)).to_dict()
        joint = run_session(replace(base, seed=s, channel_mode="joint_statevector"), attack,
                            KeyPool(10**6)).to_dict()
        per["params"].pop("channel_mode")
        joint["params"].pop("channel_mode")
        assert per == joint


def test_intercept_plus_errors_only_on_times_basis():
    rng = np.random.default_rng(0)
    values = rng.integers(0, 2, 20_000, dtype=np.uint8)
    bases = rng.integers(0, 2, 20_000, dtype=np.uint8)
    out, rec = eve_channel(QubitBatch(values, bases),
                           AttackStrategy.intercept_resend("always_plus"), rng)
    assert set(rec.bases) == {0}
    plus = bases == 0
    assert np.array_equal(out.values[plus], values[plus])
    assert abs(np.mean(out.values[~plus]) - 0.5) < 0.02


def test_session_seeds_distinct():
    seeds = {session_seed(5, i) for i in range(1000)}
    assert len(seeds) == 1000 and session_seed(5, 3) == session_seed(5, 3)


def test_proxy_and_aggregate():
    cfg = make_config()
    ts = [run_session(replace(cfg, seed=session_seed(0, i)), NONE, KeyPool(10**6))
          for i in range(20)]
    side = eve_side_information(ts[0])
    # no Eve record; basis, test mask, two test strings, generators
    assert len(side) == 128 + 128 + 64 + 64 + 64 * 6
    bits, deficiency = eve_guess_proxy(ts[0], LZ78Model())
    assert deficiency == 6 - bits
    r = aggregate_sessions(ts, LZ78Model(), 0.05)
    assert r.sessions == 20 and r.bad_events == 0 and "PROXY" in r.caveat
    with pytest.raises(ValueError):
        aggregate_sessions([], LZ78Model(), 0.05)
