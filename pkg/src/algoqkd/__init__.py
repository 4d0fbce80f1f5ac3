"""BB84 key distribution simulator with algorithmic-information verification tools."""

__version__ = "0.1.0"

from .gf2 import BitString, Gf2Matrix, dot, hamming_weight, rank, xor
from .lincode import (
    CodeRequirement,
    LinearCode,
    character_sum,
    construct_code,
    dual_coset,
    min_distance,
    privacy_amplify,
)
from .algoinfo import LZ78Model, chain_rule_audit, counting_check, dl, otp_experiment
from .analysis import (
    aggregate_sessions,
    binary_entropy,
    key_rate,
    sampling_tail_mc,
    security_bound,
)
from .protocol import (
    AttackStrategy,
    KeyPool,
    ProtocolConfig,
    ProtocolTranscript,
    eve_channel,
    eve_guess_proxy,
    run_session,
)

__all__ = [
    "AttackStrategy", "BitString", "CodeRequirement", "Gf2Matrix", "KeyPool", "LZ78Model",
    "LinearCode", "ProtocolConfig", "ProtocolTranscript", "aggregate_sessions",
    "binary_entropy", "chain_rule_audit", "character_sum", "construct_code", "counting_check",
    "dl", "dot", "dual_coset", "eve_channel", "eve_guess_proxy", "hamming_weight", "key_rate",
    "min_distance", "otp_experiment", "privacy_amplify", "rank", "run_session",
    "sampling_tail_mc", "security_bound", "xor",
]
