"""Binary linear codes used for privacy amplification.

A code is given by ``m`` independent generator rows ``v_1..v_m`` in
``GF(2)^n``. The privacy-amplification map sends a sifted key ``x`` to
``(x.v_1, ..., x.v_m)``; its fibres are cosets of the dual code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .gf2 import (
    BitString,
    EnumerationLimitError,
    Gf2Error,
    Gf2Matrix,
    check_enumerable,
    nullspace,
    parity,
    rank,
    solve,
)

COSET_ENUMERATION_LIMIT = 20


class CodeConstructionError(RuntimeError):
    """No code meeting the requirement was found (infeasible or unlucky)."""


@dataclass(frozen=True)
class CodeRequirement:
    n: int
    m: int
    distance_floor: int  # strict: require d(C) > distance_floor

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("code dimension m must be at least 1")
        if self.distance_floor < 0:
            raise ValueError("distance_floor must be non-negative")
        if self.m > self.n:
            raise ValueError(f"dimension m={self.m} exceeds block length n={self.n}")

    @classmethod
    def for_protocol(cls, n: int, m: int, p: float, epsilon: float) -> "CodeRequirement":
        """Requirement ``d(C) > 2 n (p + epsilon)`` expressed on integer weights."""
        return cls(n=n, m=m, distance_floor=distance_floor(n, p, epsilon))


def distance_floor(n: int, p: float, epsilon: float) -> int:
    return int(np.floor(2 * n * (p + epsilon)))


def _codeword_weights(rows: list[int]) -> Iterable[int]:
    """Weights of all nonzero codewords, walked in Gray-code order."""
    word = 0
    for k in range(1, 1 << len(rows)):
        word ^= rows[(k & -k).bit_length() - 1]
        yield word.bit_count()


def exact_min_distance(generators: Gf2Matrix) -> int:
    """Minimum nonzero codeword weight over all ``2**m - 1`` combinations.

    Returns ``0`` when the rows are dependent (a nonzero combination vanishes)
    and ``n + 1`` by convention for the empty code.
    """
    check_enumerable(generators.rows, "code dimension")
    rows = generators.row_ints()
    if not rows:
        return generators.cols + 1
    return min(_codeword_weights(rows))


@dataclass(frozen=True)
class LinearCode:
    n: int
    m: int
    generators: Gf2Matrix
    min_distance: int

    def __post_init__(self):
        if self.generators.rows != self.m or self.generators.cols != self.n:
            raise Gf2Error(
                f"generator shape {self.generators.rows}x{self.generators.cols} != {self.m}x{self.n}"
            )
        if self.m > self.n:
            raise ValueError("code dimension exceeds block length")

    @classmethod
    def from_generators(cls, rows) -> "LinearCode":
        """Build a code from generator rows, verifying independence and distance exactly."""
        g = Gf2Matrix(rows)
        if rank(g) != g.rows:
            raise ValueError("generator rows are linearly dependent")
        return cls(n=g.cols, m=g.rows, generators=g, min_distance=exact_min_distance(g))

    def codewords(self) -> np.ndarray:
        """All ``2**m`` codewords as an ``(2**m, n)`` bit array (row 0 is zero)."""
        check_enumerable(self.m, "code dimension")
        msgs = ((np.arange(1 << self.m)[:, None] >> np.arange(self.m)) & 1).astype(np.int64)
        return ((msgs @ self.generators.entries.astype(np.int64)) & 1).astype(np.uint8)

    def dual_basis(self) -> Gf2Matrix:
        return nullspace(self.generators)

    def describe(self) -> BitString:
        """Generators flattened row-major into one bitstring."""
        return BitString(self.generators.entries.reshape(-1))


def min_distance(code: LinearCode) -> int:
    return exact_min_distance(code.generators)


def construct_code(req: CodeRequirement, seed: int, max_attempts: int = 1000) -> LinearCode:
    """Rejection-sample ``m`` random independent rows until ``d(C) > floor``.

    The distance of every candidate is verified by enumerating its ``2**m``
    codewords, so ``m`` is capped at 24 while ``n`` is not.
    """
    if req.m > req.n:
        raise CodeConstructionError("infeasible: m exceeds n")
    check_enumerable(req.m, "code dimension")
    if req.m == req.n and req.distance_floor >= 1:
        raise CodeConstructionError(
            f"infeasible: the full space GF(2)^{req.n} has minimum distance 1"
        )
    if req.distance_floor >= req.n:
        raise CodeConstructionError(
            f"infeasible: no nonzero word of length {req.n} has weight > {req.distance_floor}"
        )
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        rows = rng.integers(0, 2, size=(req.m, req.n), dtype=np.uint8)
        g = Gf2Matrix(rows)
        if rank(g) != req.m:
            continue
        d = exact_min_distance(g)
        if d > req.distance_floor:
            return LinearCode(n=req.n, m=req.m, generators=g, min_distance=d)
    raise CodeConstructionError(
        f"no [{req.n},{req.m}] code with d > {req.distance_floor} found in {max_attempts} attempts"
    )


def privacy_amplify(code: LinearCode, x: BitString) -> BitString:
    """Final key ``f(x) = (x.v_1, ..., x.v_m)``."""
    if len(x) != code.n:
        raise Gf2Error(f"input has {len(x)} bits, code has block length {code.n}")
    g = code.generators.entries.astype(np.int64)
    return BitString((g @ x.bits.astype(np.int64)) & 1)


def _coset_ints(code: LinearCode, y: BitString) -> np.ndarray:
    if code.n > COSET_ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            f"block length {code.n} exceeds coset enumeration limit {COSET_ENUMERATION_LIMIT}"
        )
    if len(y) != code.m:
        raise Gf2Error(f"y has {len(y)} bits, code dimension is {code.m}")
    w = solve(code.generators, y)
    if w is None:
        raise ValueError(f"{y} is not in the image of the privacy-amplification map")
    dual = [r.to_int() for r in code.dual_basis()]
    k = len(dual)
    combos = np.arange(1 << k, dtype=np.int64)
    words = np.full(1 << k, w.to_int(), dtype=np.int64)
    for j, v in enumerate(dual):
        words ^= np.where((combos >> j) & 1, np.int64(v), np.int64(0))
    return words


def dual_coset(code: LinearCode, y: BitString) -> set[BitString]:
    """The fibre ``{x : f(x) = y}``, i.e. ``w_y + C_perp``."""
    return {BitString.from_int(int(v), code.n) for v in _coset_ints(code, y)}


def character_sum(code: LinearCode, y: BitString, s: BitString, t: BitString) -> int:
    """``sum over x with f(x) = y of (-1)^(x.(s xor t))``, computed exactly."""
    if len(s) != code.n or len(t) != code.n:
        raise Gf2Error("s and t must have the code's block length")
    words = _coset_ints(code, y)
    u = (s ^ t).to_int()
    odd = int(parity(words & np.int64(u)).sum())
    return words.size - 2 * odd


def write_code(code: LinearCode) -> str:
    """Text form: header ``"N M d"`` then one generator per line."""
    lines = [f"{code.n} {code.m} {code.min_distance}"]
    lines += [str(r) for r in code.generators]
    return "\n".join(lines) + "\n"


def read_code(text: str) -> LinearCode:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    try:
        n, m, d = (int(v) for v in lines[0].split())
    except (IndexError, ValueError) as exc:
        raise ValueError("code file header must be 'N M d'") from exc
    rows = lines[1:]
    if len(rows) != m:
        raise ValueError(f"code file declares M={m} but lists {len(rows)} generators")
    if any(len(r) != n for r in rows):
        raise ValueError(f"every generator must have N={n} bits")
    code = LinearCode.from_generators(rows)
    if code.min_distance != d:
        raise ValueError(f"declared distance {d} but generators have distance {code.min_distance}")
    return code
