"""Bit-exact GF(2) vectors and matrices.

Bits are held as read-only ``uint8`` numpy arrays. Whenever a string is
converted to a Python integer, bit ``i`` of the integer is position ``i`` of
the string (LSB-first). The textual form is always ASCII ``'0'``/``'1'`` with
index 0 first.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

ENUMERATION_LIMIT = 24


class Gf2Error(ValueError):
    """Raised on malformed GF(2) operands (length or shape mismatch)."""


class EnumerationLimitError(ValueError):
    """Raised when an exhaustive enumeration would exceed 2**24 items."""


def check_enumerable(length: int, what: str = "length") -> None:
    if length > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            f"{what} {length} exceeds the exhaustive enumeration limit of {ENUMERATION_LIMIT}"
        )


def _as_bits(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise Gf2Error("bit values must be 0 or 1")
    out = arr.astype(np.uint8)
    out.setflags(write=False)
    return out


class BitString:
    """Immutable fixed-length bit sequence.

    >>> BitString("1010") ^ BitString("0110")
    BitString('1100')
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: str | Iterable[int] | np.ndarray = ()):
        if isinstance(bits, BitString):
            self._bits = bits._bits
            return
        if isinstance(bits, str):
            if any(c not in "01" for c in bits):
                raise Gf2Error(f"invalid character in bitstring {bits!r}")
            bits = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
        self._bits = _as_bits(bits)

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls(np.ones(n, dtype=np.uint8))

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitString":
        """Inverse of :meth:`to_int` (bit ``i`` of ``value`` is position ``i``)."""
        if value < 0 or value >> n:
            raise Gf2Error(f"{value} does not fit in {n} bits")
        return cls([(value >> i) & 1 for i in range(n)])

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "BitString":
        return cls(rng.integers(0, 2, size=n, dtype=np.uint8))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def __len__(self) -> int:
        return int(self._bits.size)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return BitString(self._bits[i])
        if isinstance(i, (list, np.ndarray)):
            return BitString(self._bits[np.asarray(i)])
        n = len(self)
        if not 0 <= i < n:
            raise IndexError(f"bit index {i} out of range for length {n}")
        return int(self._bits[i])

    def __iter__(self):
        return iter(int(b) for b in self._bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return len(self) == len(other) and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((len(self), self._bits.tobytes()))

    def __xor__(self, other: "BitString") -> "BitString":
        return xor(self, other)

    def __add__(self, other: "BitString") -> "BitString":
        """Concatenation."""
        return BitString(np.concatenate([self._bits, other._bits]))

    def __str__(self) -> str:
        return (self._bits + ord("0")).tobytes().decode("ascii")

    def __repr__(self) -> str:
        return f"BitString({str(self)!r})"

    def to_int(self) -> int:
        if not len(self):
            return 0
        return int.from_bytes(np.packbits(self._bits, bitorder="little").tobytes(), "little")

    @property
    def weight(self) -> int:
        return hamming_weight(self)


class Gf2Matrix:
    """Immutable row-major matrix over GF(2)."""

    __slots__ = ("_entries",)

    def __init__(self, rows: Sequence | np.ndarray, cols: int | None = None):
        if isinstance(rows, Gf2Matrix):
            self._entries = rows._entries
            return
        if isinstance(rows, np.ndarray) and rows.ndim == 2:
            arr = rows
        else:
            rows = [r.bits if isinstance(r, BitString) else
                    BitString(r).bits if isinstance(r, str) else r for r in rows]
            if not rows:
                arr = np.zeros((0, cols or 0), dtype=np.uint8)
            else:
                lengths = {len(r) for r in rows}
                if len(lengths) != 1:
                    raise Gf2Error("all rows must have the same length")
                arr = np.array(rows)
        if cols is not None and arr.shape[1] != cols:
            raise Gf2Error(f"expected {cols} columns, got {arr.shape[1]}")
        entries = _as_bits(arr).reshape(arr.shape)
        entries.setflags(write=False)
        self._entries = entries

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Gf2Matrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def rows(self) -> int:
        return int(self._entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self._entries.shape[1])

    def row(self, i: int) -> BitString:
        return BitString(self._entries[i])

    def __iter__(self):
        return (BitString(r) for r in self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gf2Matrix):
            return NotImplemented
        return self._entries.shape == other._entries.shape and bool(
            np.array_equal(self._entries, other._entries)
        )

    def __hash__(self) -> int:
        return hash((self._entries.shape, self._entries.tobytes()))

    def __repr__(self) -> str:
        return f"Gf2Matrix({[str(r) for r in self]!r})"

    def row_ints(self) -> list[int]:
        return [r.to_int() for r in self]


def _check_same_length(a: BitString, b: BitString) -> None:
    if len(a) != len(b):
        raise Gf2Error(f"length mismatch: {len(a)} != {len(b)}")


def xor(a: BitString, b: BitString) -> BitString:
    _check_same_length(a, b)
    return BitString(a.bits ^ b.bits)


def hamming_weight(a: BitString) -> int:
    return int(a.bits.sum(dtype=np.int64))


def hamming_distance(a: BitString, b: BitString) -> int:
    return hamming_weight(xor(a, b))


def dot(a: BitString, b: BitString) -> int:
    """Inner product over GF(2): ``sum(a[i] * b[i]) mod 2``."""
    _check_same_length(a, b)
    return int(np.bitwise_and(a.bits, b.bits).sum(dtype=np.int64) & 1)


def row_reduce(m: Gf2Matrix | np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2); returns ``(rref, pivot_columns)``."""
    a = np.array(m.entries if isinstance(m, Gf2Matrix) else m, dtype=np.uint8) & 1
    n_rows, n_cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r >= n_rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Gf2Matrix) -> int:
    return len(row_reduce(m)[1])


def nullspace(m: Gf2Matrix) -> Gf2Matrix:
    """Basis of ``{x : m x = 0}``, one basis vector per row."""
    rref, pivots = row_reduce(m)
    n = m.cols
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, p in enumerate(pivots):
            basis[k, p] = rref[i, f]
    return Gf2Matrix(basis) if free else Gf2Matrix.zeros(0, n)


def solve(m: Gf2Matrix, rhs: BitString) -> BitString | None:
    """One solution ``x`` of ``m x = rhs``, or ``None`` if inconsistent."""
    if rhs.bits.size != m.rows:
        raise Gf2Error(f"right-hand side has {len(rhs)} bits, matrix has {m.rows} rows")
    aug = np.concatenate([m.entries, rhs.bits[:, None]], axis=1)
    rref, pivots = row_reduce(aug)
    if m.cols in pivots:
        return None
    x = np.zeros(m.cols, dtype=np.uint8)
    for i, p in enumerate(pivots):
        x[p] = rref[i, -1]
    return BitString(x)


def popcount(values: np.ndarray) -> np.ndarray:
    """Vectorised popcount of non-negative integer arrays."""
    return np.bitwise_count(values)


def parity(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(values) & 1


def all_bitstrings(n: int) -> np.ndarray:
    """All ``2**n`` strings as an ``(2**n, n)`` uint8 array, row ``k`` encoding integer ``k``."""
    check_enumerable(n)
    k = np.arange(1 << n, dtype=np.int64)
    return ((k[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)


def bits_to_ints(bits: np.ndarray) -> np.ndarray:
    """Pack each row of a ``(k, n)`` bit array (n <= 62) into an int64, LSB-first."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape[-1] > 62:
        raise Gf2Error("packing into int64 supports at most 62 bits")
    return (bits << np.arange(bits.shape[-1], dtype=np.int64)).sum(axis=-1)
