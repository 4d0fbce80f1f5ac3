"""BB84 session engine with a pre-shared-key reconciliation budget.

One session:

1. Alice draws ``2N`` uniform bits and ``2N`` uniform bases and sends the
   corresponding qubits.
2. After Bob confirms receipt Alice announces the bases, and Bob measures
   every qubit in the announced basis. Nothing is discarded.
3. Alice picks a uniform test set ``T`` of size ``N`` and announces her test
   bits ``z_T``.
4. The session aborts if Bob's test bits ``z'_T`` disagree in more than
   ``floor(N p)`` places.
5. Reconciliation is idealised: Bob's information bits are corrected, and
   ``ceil(N h(p)) + reconcile_const`` bits are debited from the key pool.
6. Both sides apply the privacy-amplification map of the public code.

Two channel simulations are available. ``per_qubit`` tracks each BB84
eigenstate classically and samples outcomes exactly by the Born rule.
``joint_statevector`` evolves the full 2N-qubit state vector and is limited
to 2N <= 12. Both consume the same random numbers in the same order, so for
a given seed they produce identical transcripts.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import binary_entropy
from .gf2 import BitString, hamming_weight, xor
from .lincode import LinearCode, distance_floor, privacy_amplify
from .qsim import MAX_VECTOR_QUBITS, PLUS, TIMES

SCHEMA_VERSION = "v1"
DEFAULT_RECONCILE_CONST = 32
CHANNEL_MODES = ("per_qubit", "joint_statevector")


class ConfigError(ValueError):
    """A protocol configuration violates one of its invariants."""


class PoolExhausted(RuntimeError):
    """The pre-shared key pool cannot cover a reconciliation debit."""


@dataclass(frozen=True)
class ProtocolConfig:
    n: int
    p: float
    epsilon: float
    delta: float
    code: LinearCode
    seed: int
    channel_mode: str = "per_qubit"
    noise: float = 0.0  # probability that Bob's detector flips an outcome
    reconcile_const: int = DEFAULT_RECONCILE_CONST

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError("invariant violated: n >= 1")
        if self.p < 0:
            raise ConfigError("invariant violated: 0 <= p")
        if not self.epsilon > 0:
            raise ConfigError("invariant violated: epsilon > 0")
        if not self.p + self.epsilon < 0.5:
            raise ConfigError("invariant violated: p + epsilon < 1/2")
        if self.delta <= 0:
            raise ConfigError("invariant violated: delta > 0")
        if self.code.n != self.n:
            raise ConfigError(
                f"invariant violated: code.n == n (code.n={self.code.n}, n={self.n})"
            )
        floor = distance_floor(self.n, self.p, self.epsilon)
        if self.code.min_distance <= floor:
            raise ConfigError(
                "invariant violated: d(C) > 2 n (p + epsilon) "
                f"(d={self.code.min_distance}, 2n(p+eps)={2 * self.n * (self.p + self.epsilon):g})"
            )
        if self.channel_mode not in CHANNEL_MODES:
            raise ConfigError(f"invariant violated: channel_mode in {CHANNEL_MODES}")
        if self.channel_mode == "joint_statevector" and 2 * self.n > MAX_VECTOR_QUBITS:
            raise ConfigError(
                f"invariant violated: joint_statevector needs 2n <= {MAX_VECTOR_QUBITS}"
            )
        if not 0.0 <= self.noise <= 1.0:
            raise ConfigError("invariant violated: 0 <= noise <= 1")
        if self.reconcile_const < 0:
            raise ConfigError("invariant violated: reconcile_const >= 0")

    @property
    def abort_threshold(self) -> int:
        return abort_threshold(self.n, self.p)

    @property
    def reconcile_debit(self) -> int:
        return reconcile_cost(self.n, self.p, self.reconcile_const)

    def params(self) -> dict:
        return {"n": self.n, "m": self.code.m, "p": self.p, "epsilon": self.epsilon,
                "delta": self.delta, "channel_mode": self.channel_mode, "noise": self.noise,
                "reconcile_const": self.reconcile_const, "code_sha256": code_digest(self.code)}


def code_digest(code: LinearCode) -> str:
    from .lincode import write_code
    return hashlib.sha256(write_code(code).encode("ascii")).hexdigest()


def abort_threshold(n: int, p: float) -> int:
    # tiny slack so that e.g. 100 * 0.11 counts as 11, not 10.999...
    return int(math.floor(n * p + 1e-9))


def reconcile_cost(n: int, p: float, reconcile_const: int = DEFAULT_RECONCILE_CONST) -> int:
    return int(math.ceil(n * binary_entropy(p) - 1e-9)) + reconcile_const


@dataclass
class KeyPool:
    remaining_bits: int
    consumed_bits: int = 0

    def __post_init__(self):
        if self.remaining_bits < 0:
            raise ValueError("key pool cannot start negative")

    def require(self, bits: int) -> None:
        if bits > self.remaining_bits:
            raise PoolExhausted(f"need {bits} pre-shared bits, pool holds {self.remaining_bits}")

    def debit(self, bits: int) -> None:
        self.require(bits)
        self.remaining_bits -= bits
        self.consumed_bits += bits


@dataclass(frozen=True)
class AttackStrategy:
    kind: str = "none"
    basis_policy: str | None = None

    KINDS = ("none", "intercept_resend")
    POLICIES = ("random_per_qubit", "always_plus", "always_times")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}")
        if self.kind == "intercept_resend" and self.basis_policy not in self.POLICIES:
            raise ValueError(f"intercept_resend needs a basis policy from {self.POLICIES}")
        if self.kind == "none" and self.basis_policy is not None:
            raise ValueError("attack 'none' takes no basis policy")

    @classmethod
    def none(cls) -> "AttackStrategy":
        return cls()

    @classmethod
    def intercept_resend(cls, policy: str = "random_per_qubit") -> "AttackStrategy":
        return cls("intercept_resend", policy)

    @property
    def label(self) -> str:
        return self.kind if self.kind == "none" else f"{self.kind}:{self.basis_policy}"


@dataclass(frozen=True)
class QubitBatch:
    """Product of BB84 eigenstates: qubit ``i`` is ``|values[i]>`` in ``bases[i]``."""

    values: np.ndarray
    bases: np.ndarray

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class EveRecord:
    bases: BitString
    outcomes: BitString

    def __len__(self) -> int:
        return len(self.bases)

    def as_pairs(self) -> list[tuple[str, int]]:
        return [("+x"[b], o) for b, o in zip(self.bases, self.outcomes)]


def _measure_batch(batch: QubitBatch, bases: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Born-rule outcomes; ``P(0)`` is 1, 0 or 1/2 for BB84 eigenstates."""
    same = batch.bases == bases
    p0 = np.where(same, 1.0 - batch.values, 0.5)
    return (uniforms >= p0).astype(np.uint8)


def _eve_bases(attack: AttackStrategy, rng: np.random.Generator, count: int) -> np.ndarray:
    # draw unconditionally so the stream layout never depends on the policy
    drawn = rng.integers(0, 2, size=count, dtype=np.uint8)
    if attack.basis_policy == "always_plus":
        return np.full(count, PLUS, dtype=np.uint8)
    if attack.basis_policy == "always_times":
        return np.full(count, TIMES, dtype=np.uint8)
    return drawn


def eve_channel(qubit_states: QubitBatch, attack: AttackStrategy,
                seed: int | np.random.Generator) -> tuple[QubitBatch, EveRecord]:
    """Apply the eavesdropper to qubits in flight.

    ``none`` forwards the states untouched with an empty record.
    ``intercept_resend`` measures each qubit in the policy basis and forwards
    the post-measurement eigenstate, recording ``(basis, outcome)``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    count = len(qubit_states)
    bases = _eve_bases(attack, rng, count)
    uniforms = rng.random(count)
    if attack.kind == "none":
        return qubit_states, EveRecord(BitString(), BitString())
    outcomes = _measure_batch(qubit_states, bases, uniforms)
    return QubitBatch(outcomes, bases.copy()), EveRecord(BitString(bases), BitString(outcomes))


def estimate_error(z_t: BitString, z_t_bob: BitString, p: float) -> tuple[int, bool]:
    """Observed test errors and the abort decision ``count > floor(N p)``."""
    count = hamming_weight(xor(z_t, z_t_bob))
    return count, count > abort_threshold(len(z_t), p)


def reconcile(alice_x: BitString, bob_x: BitString, pool: KeyPool, p: float,
              reconcile_const: int = DEFAULT_RECONCILE_CONST) -> tuple[BitString, int]:
    """Idealised one-time-pad error correction with the exact pre-shared-key cost.

    Bob ends with Alice's string; the pool is debited ``ceil(N h(p)) + const``
    bits whatever the actual error pattern was.
    """
    if len(alice_x) != len(bob_x):
        raise ValueError("sifted keys differ in length")
    debit = reconcile_cost(len(alice_x), p, reconcile_const)
    pool.debit(debit)
    return BitString(alice_x), debit


@dataclass
class ProtocolTranscript:
    basis: BitString
    test_set: list[int]
    z_t: BitString
    z_t_bob: BitString
    observed_error_count: int
    aborted: bool
    sifted_alice: BitString
    sifted_bob: BitString
    reconciled: bool
    final_key: BitString | None
    final_key_bob: BitString | None
    pool_debit: int
    eve_record: EveRecord
    seed: int
    attack: str
    boundary_hit: bool
    params: dict
    code: LinearCode | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        key = lambda b: None if b is None else str(b)  # noqa: E731
        return {
            "schema": SCHEMA_VERSION,
            "seed": self.seed,
            "attack": self.attack,
            "params": self.params,
            "basis": str(self.basis),
            "test_set": [int(i) for i in self.test_set],
            "z_t": str(self.z_t),
            "z_t_bob": str(self.z_t_bob),
            "observed_error_count": self.observed_error_count,
            "abort_threshold": abort_threshold(self.params["n"], self.params["p"]),
            "boundary_hit": self.boundary_hit,
            "aborted": self.aborted,
            "sifted_alice": str(self.sifted_alice),
            "sifted_bob": str(self.sifted_bob),
            "reconciled": self.reconciled,
            "final_key": key(self.final_key),
            "final_key_bob": key(self.final_key_bob),
            "pool_debit": self.pool_debit,
            "eve_record": {"bases": str(self.eve_record.bases),
                           "outcomes": str(self.eve_record.outcomes)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict, code: LinearCode | None = None) -> "ProtocolTranscript":
        if d.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported transcript schema {d.get('schema')!r}")
        opt = lambda s: None if s is None else BitString(s)  # noqa: E731
        return cls(
            basis=BitString(d["basis"]), test_set=list(d["test_set"]), z_t=BitString(d["z_t"]),
            z_t_bob=BitString(d["z_t_bob"]), observed_error_count=d["observed_error_count"],
            aborted=d["aborted"], sifted_alice=BitString(d["sifted_alice"]),
            sifted_bob=BitString(d["sifted_bob"]), reconciled=d["reconciled"],
            final_key=opt(d["final_key"]), final_key_bob=opt(d["final_key_bob"]),
            pool_debit=d["pool_debit"],
            eve_record=EveRecord(BitString(d["eve_record"]["bases"]),
                                 BitString(d["eve_record"]["outcomes"])),
            seed=d["seed"], attack=d["attack"], boundary_hit=d["boundary_hit"],
            params=d["params"], code=code,
        )

    @classmethod
    def from_json(cls, text: str, code: LinearCode | None = None) -> "ProtocolTranscript":
        return cls.from_dict(json.loads(text), code)


def _session_streams(seed: int):
    alice, eve, bob, sample = np.random.SeedSequence(seed).spawn(4)
    return tuple(np.random.default_rng(s) for s in (alice, eve, bob, sample))


def _joint_channel(values, bases, attack, eve_bases, eve_uniforms, bob_uniforms):
    """Same physics as the per-qubit path, on the full 2N-qubit state vector."""
    from .qsim import prepare_bb84_qubit

    count = values.size
    psi = np.ones(1, dtype=complex)
    for v, b in zip(values, bases):
        psi = np.kron(psi, prepare_bb84_qubit(int(v), int(b)).amplitudes)
    psi = psi.reshape((2,) * count)
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)

    def measure_qubit(state, i, basis, u):
        s = np.moveaxis(state, i, 0)
        if basis == TIMES:
            s = np.tensordot(h, s, axes=(1, 0))
        p0 = float(np.sum(np.abs(s[0]) ** 2))
        outcome = int(u >= p0)
        post = np.zeros_like(s)
        post[outcome] = s[outcome] / np.sqrt(p0 if outcome == 0 else 1.0 - p0)
        if basis == TIMES:
            post = np.tensordot(h, post, axes=(1, 0))
        return outcome, np.moveaxis(post, 0, i)

    eve_out = np.zeros(count, dtype=np.uint8)
    if attack.kind == "intercept_resend":
        for i in range(count):
            eve_out[i], psi = measure_qubit(psi, i, int(eve_bases[i]), eve_uniforms[i])
    bob = np.zeros(count, dtype=np.uint8)
    for i in range(count):
        bob[i], psi = measure_qubit(psi, i, int(bases[i]), bob_uniforms[i])
    return eve_out, bob


def run_session(config: ProtocolConfig, attack: AttackStrategy, pool: KeyPool) -> ProtocolTranscript:
    """Execute one full session; deterministic in ``(config, attack)``."""
    config.validate()
    debit_needed = config.reconcile_debit
    pool.require(debit_needed)

    n, count = config.n, 2 * config.n
    rng_alice, rng_eve, rng_bob, rng_sample = _session_streams(config.seed)

    # (i) Alice's random bits and bases
    values = rng_alice.integers(0, 2, size=count, dtype=np.uint8)
    bases = rng_alice.integers(0, 2, size=count, dtype=np.uint8)
    sent = QubitBatch(values, bases)

    # (ii) channel, basis announcement, Bob measures in Alice's basis
    if config.channel_mode == "per_qubit":
        delivered, record = eve_channel(sent, attack, rng_eve)
        bob_uniforms = rng_bob.random(count)
        bob_raw = _measure_batch(delivered, bases, bob_uniforms)
    else:
        eve_bases = _eve_bases(attack, rng_eve, count)
        eve_uniforms = rng_eve.random(count)
        bob_uniforms = rng_bob.random(count)
        eve_out, bob_raw = _joint_channel(values, bases, attack, eve_bases, eve_uniforms,
                                          bob_uniforms)
        if attack.kind == "none":
            record = EveRecord(BitString(), BitString())
        else:
            record = EveRecord(BitString(eve_bases), BitString(eve_out))
    flips = (rng_bob.random(count) < config.noise).astype(np.uint8)
    bob_bits = bob_raw ^ flips

    # (iii) random test set; Alice announces her test bits
    from .analysis import split_test_positions
    test_set = split_test_positions(rng_sample, n)
    info = np.setdiff1d(np.arange(count), test_set)
    alice_bits = BitString(values)
    bob_all = BitString(bob_bits)
    z_t, z_t_bob = alice_bits[test_set], bob_all[test_set]

    # (iv) error-rate test
    errors, aborted = estimate_error(z_t, z_t_bob, config.p)
    sifted_alice, sifted_bob = alice_bits[info], bob_all[info]

    final_key = final_key_bob = None
    debit = 0
    reconciled = False
    if not aborted:
        # (v) reconciliation against the pre-shared key pool
        corrected, debit = reconcile(sifted_alice, sifted_bob, pool, config.p,
                                     config.reconcile_const)
        reconciled = True
        # (vi) privacy amplification
        final_key = privacy_amplify(config.code, sifted_alice)
        final_key_bob = privacy_amplify(config.code, corrected)

    return ProtocolTranscript(
        basis=BitString(bases), test_set=[int(i) for i in test_set], z_t=z_t, z_t_bob=z_t_bob,
        observed_error_count=errors, aborted=aborted, sifted_alice=sifted_alice,
        sifted_bob=sifted_bob, reconciled=reconciled, final_key=final_key,
        final_key_bob=final_key_bob, pool_debit=debit, eve_record=record, seed=config.seed,
        attack=attack.label, boundary_hit=errors == config.abort_threshold,
        params=config.params(), code=config.code,
    )


def session_seed(master_seed: int, index: int) -> int:
    """Per-session 64-bit seed derived from a master seed and a session index."""
    return int(np.random.SeedSequence(master_seed, spawn_key=(index,)).generate_state(1, np.uint64)[0])


def eve_side_information(transcript: ProtocolTranscript) -> BitString:
    """Eve's record followed by every public datum: ``b``, ``T``, ``z_T``, ``z'_T``, ``C``."""
    if transcript.code is None:
        raise ValueError("transcript carries no code; attach one before proxying")
    count = len(transcript.basis)
    t_mask = np.zeros(count, dtype=np.uint8)
    t_mask[np.asarray(transcript.test_set, dtype=np.int64)] = 1
    return (transcript.eve_record.bases + transcript.eve_record.outcomes + transcript.basis
            + BitString(t_mask) + transcript.z_t + transcript.z_t_bob
            + transcript.code.describe())


def eve_guess_proxy(transcript: ProtocolTranscript, model) -> tuple[int, float]:
    """Proxy for Eve's uncertainty about the final key.

    Returns ``(dl_bits, deficiency)`` with ``dl_bits = dl(final key | side)``
    for the side information of :func:`eve_side_information` and
    ``deficiency = M - dl_bits``.
    """
    if transcript.aborted or transcript.final_key is None:
        raise ValueError("the proxy is defined only for sessions that did not abort")
    side = eve_side_information(transcript)
    bits = model.dl(transcript.final_key, side)
    return bits, float(len(transcript.final_key) - bits)
