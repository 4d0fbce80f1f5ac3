"""Computable description lengths and the counting experiments built on them.

Kolmogorov complexity is uncomputable, so every experiment here runs against
a concrete lossless, self-delimiting code. Such a code still obeys the
counting law the one-time-pad argument rests on: at most ``2^(l+1) - 1``
strings can have descriptions of length ``<= l``. Nothing stronger is
claimed, and the gap between a compressor and true K is unbounded in general.

Codeword layout of :class:`LZ78Model` for a string ``x`` given side input ``s``::

    gamma(len(x) + 1)                       Elias gamma length header
    [mode, payload]                         omitted when x is empty
        '0'  + LZ78 phrases                 dictionary primed by parsing s
        '10' + x verbatim                   literal fallback
        '11' + offset of x inside s         copy; ceil(log2(len(s)-len(x)+1)) bits

LZ78 phrase indices are written with ``ceil(log2 D)`` bits where ``D`` is the
current dictionary size, which both ends know. The decoder never needs
look-ahead, so the code is prefix-free for each fixed side input.
"""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .gf2 import BitString, EnumerationLimitError, check_enumerable

CAVEAT = (
    "Description lengths are produced by a computable compressor. They only "
    "witness the counting skeleton of the Kolmogorov-complexity statements; "
    "the constant c of a universal machine is replaced by the model's "
    "measured header overhead."
)

COUNTING_LIMIT = 16
OTP_LIMIT = 14


def gamma_encode(n: int) -> str:
    """Elias gamma code of a positive integer."""
    if n < 1:
        raise ValueError("Elias gamma encodes positive integers only")
    b = bin(n)[2:]
    return "0" * (len(b) - 1) + b


def gamma_decode(stream: str, pos: int = 0) -> tuple[int, int]:
    """Decode one gamma codeword at ``pos``; return ``(value, next_pos)``."""
    zeros = 0
    while stream[pos + zeros] == "0":
        zeros += 1
    end = pos + 2 * zeros + 1
    if end > len(stream):
        raise ValueError("truncated Elias gamma codeword")
    return int(stream[pos + zeros:end], 2), end


def _width(d: int) -> int:
    return (d - 1).bit_length()


class _Dictionary:
    """LZ78 trie; node 0 is the empty phrase."""

    __slots__ = ("children", "phrases")

    def __init__(self):
        self.children: dict[tuple[int, str], int] = {}
        self.phrases: list[str] = [""]

    def __len__(self) -> int:
        return len(self.phrases)

    def add(self, node: int, bit: str) -> None:
        self.children[(node, bit)] = len(self.phrases)
        self.phrases.append(self.phrases[node] + bit)

    def prime(self, text: str) -> None:
        node = 0
        children = self.children
        for bit in text:
            nxt = children.get((node, bit))
            if nxt is None:
                self.add(node, bit)
                node = 0
            else:
                node = nxt


def _lz78_payload(x: str, dictionary: _Dictionary) -> list[str]:
    out = []
    i, n = 0, len(x)
    children = dictionary.children
    while i < n:
        node = 0
        while i < n:
            nxt = children.get((node, x[i]))
            if nxt is None:
                break
            node = nxt
            i += 1
        w = _width(len(dictionary))
        out.append(format(node, f"0{w}b") if w else "")
        if i < n:
            out.append(x[i])
            dictionary.add(node, x[i])
            i += 1
    return out


@dataclass(frozen=True)
class LZ78Model:
    """LZ78 coder with literal and copy-from-side fallbacks (see module docstring)."""

    name: str = "lz78-gamma"

    def header_bits(self, length: int) -> int:
        return len(gamma_encode(length + 1))

    def c_model(self, length: int) -> int:
        """Overhead of the literal fallback: ``dl(x, .) <= len(x) + c_model``."""
        return self.header_bits(length) + 2

    def _candidates(self, x: str, side: str) -> list[str]:
        cands = []
        d = _Dictionary()
        d.prime(side)
        cands.append("0" + "".join(_lz78_payload(x, d)))
        cands.append("10" + x)
        pos = side.find(x)
        if pos >= 0:
            w = _width(len(side) - len(x) + 1)
            cands.append("11" + (format(pos, f"0{w}b") if w else ""))
        return cands

    def encode(self, x: BitString, side: BitString = BitString()) -> str:
        xs, ss = str(x), str(side)
        header = gamma_encode(len(xs) + 1)
        if not xs:
            return header
        best = min(self._candidates(xs, ss), key=len)  # ties keep the earliest mode
        return header + best

    def dl(self, x: BitString, side: BitString = BitString()) -> int:
        return len(self.encode(x, side))

    def decode_prefix(self, stream: str, side: BitString = BitString()) -> tuple[BitString, int]:
        """Decode the codeword at the start of ``stream``; return ``(x, bits_used)``."""
        length, pos = gamma_decode(stream, 0)
        length -= 1
        if length == 0:
            return BitString(), pos
        ss = str(side)
        if stream[pos] == "0":
            pos += 1
            d = _Dictionary()
            d.prime(ss)
            out: list[str] = []
            produced = 0
            while produced < length:
                w = _width(len(d))
                node = int(stream[pos:pos + w], 2) if w else 0
                pos += w
                phrase = d.phrases[node]
                out.append(phrase)
                produced += len(phrase)
                if produced < length:
                    bit = stream[pos]
                    pos += 1
                    out.append(bit)
                    produced += 1
                    d.add(node, bit)
            x = "".join(out)
        elif stream[pos:pos + 2] == "10":
            pos += 2
            x = stream[pos:pos + length]
            pos += length
        else:
            pos += 2
            w = _width(len(ss) - length + 1)
            offset = int(stream[pos:pos + w], 2) if w else 0
            pos += w
            x = ss[offset:offset + length]
        if len(x) != length:
            raise ValueError("codeword does not decode to the declared length")
        return BitString(x), pos

    def decode(self, codeword: str, side: BitString = BitString()) -> BitString:
        x, used = self.decode_prefix(codeword, side)
        if used != len(codeword):
            raise ValueError(f"{len(codeword) - used} trailing bits after codeword")
        return x


def dl(model: LZ78Model, x: BitString, side: BitString = BitString()) -> int:
    """Exact codeword length of ``x`` given ``side``."""
    return model.dl(x, side)


def _all_strings(m: int):
    for k in range(1 << m):
        yield BitString.from_int(k, m)


@dataclass
class CountingCheck:
    count: int
    bound: int
    holds: bool


def counting_check(model: LZ78Model, m: int, threshold: int) -> CountingCheck:
    """Count length-``m`` strings with ``dl(x) <= threshold`` against ``2^(threshold+1) - 1``."""
    if m > COUNTING_LIMIT:
        raise EnumerationLimitError(f"m={m} exceeds the counting limit {COUNTING_LIMIT}")
    lengths = length_profile(model, m)
    count = int(np.count_nonzero(lengths <= threshold))
    bound = (1 << (threshold + 1)) - 1 if threshold >= 0 else 0
    return CountingCheck(count, bound, count <= bound)


def length_profile(model: LZ78Model, m: int, side: BitString = BitString()) -> np.ndarray:
    """``dl(x, side)`` for every ``x`` in ``{0,1}^m``, indexed by integer value."""
    check_enumerable(m)
    return _cached_profile(model, m, side).copy()


@functools.lru_cache(maxsize=32)
def _cached_profile(model: LZ78Model, m: int, side: BitString) -> np.ndarray:
    return np.array([model.dl(x, side) for x in _all_strings(m)], dtype=np.int64)


@dataclass
class OtpExperimentReport:
    m: int
    delta: float
    dl_of_key: int
    threshold: float
    b_delta_size: int
    bound: float
    exhaustive: bool
    holds: bool
    c_model: int
    key: str
    model: str
    caveat: str = CAVEAT

    def to_dict(self) -> dict:
        return asdict(self)


def otp_experiment(model: LZ78Model, m: int, delta: float, key_seed: int,
                   key: BitString | None = None) -> OtpExperimentReport:
    """Exhaustively count ``{x : dl(x | x xor k) <= dl(k) - delta m - c}``.

    ``k`` is drawn uniformly from ``key_seed`` unless given explicitly.
    """
    if m > OTP_LIMIT:
        raise EnumerationLimitError(f"m={m} exceeds the exhaustive one-time-pad limit {OTP_LIMIT}")
    if key is None:
        key = BitString.random(m, np.random.default_rng(key_seed))
    elif len(key) != m:
        raise ValueError("key length must equal m")
    c = model.c_model(m)
    dl_k = model.dl(key)
    threshold = dl_k - delta * m - c
    count = 0
    if threshold >= 0:
        for x in _all_strings(m):
            if model.dl(x, x ^ key) <= threshold:
                count += 1
    bound = 2.0 ** ((1.0 - delta) * m)
    return OtpExperimentReport(
        m=m, delta=delta, dl_of_key=dl_k, threshold=threshold, b_delta_size=count,
        bound=bound, exhaustive=True, holds=bool(count <= bound), c_model=c,
        key=str(key), model=model.name,
    )


def joint_dl(model: LZ78Model, x: BitString, k: BitString) -> int:
    """Self-delimiting pair code: one order bit, then ``a`` and ``b`` given ``a``.

    Uses whichever of the two orders is shorter.
    """
    return 1 + min(model.dl(k) + model.dl(x, k), model.dl(x) + model.dl(k, x))


@dataclass
class ChainRuleAudit:
    samples: int
    m: int
    seed: int
    c1: int  # max |dl(x,k) - (dl(k) + dl(x|k))|
    c2: int  # max |dl(x,k) - dl(x^k, k)|
    c3: int  # max of dl(x,k) - dl(x^k) - dl(x | x^k)
    c4: int  # max of dl(x^k) - m
    identical_pair_excess: int  # max of dl(k,k) - dl(k) over the sampled k
    caveat: str = CAVEAT
    per_sample: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("per_sample")
        return d


def chain_rule_audit(model: LZ78Model, samples: int, m: int, seed: int) -> ChainRuleAudit:
    """Empirical constants of the four inequalities in the one-time-pad proof."""
    if m > OTP_LIMIT:
        raise EnumerationLimitError(f"m={m} exceeds {OTP_LIMIT}")
    rng = np.random.default_rng(seed)
    c1 = c2 = c3 = c4 = same = -math.inf
    for _ in range(samples):
        x = BitString.random(m, rng)
        k = BitString.random(m, rng)
        u = x ^ k
        j = joint_dl(model, x, k)
        dl_k, dl_u = model.dl(k), model.dl(u)
        c1 = max(c1, abs(j - (dl_k + model.dl(x, k))))
        c2 = max(c2, abs(j - joint_dl(model, u, k)))
        c3 = max(c3, j - dl_u - model.dl(x, u))
        c4 = max(c4, dl_u - m)
        same = max(same, joint_dl(model, k, k) - dl_k)
    return ChainRuleAudit(samples=samples, m=m, seed=seed, c1=int(c1), c2=int(c2),
                          c3=int(c3), c4=int(c4), identical_pair_excess=int(same))
