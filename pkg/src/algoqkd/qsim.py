"""Dense state-vector / density-matrix simulation for small registers.

Only what the protocol and the verification sweeps need: BB84 state
preparation, Hadamard-conjugate basis vectors, Hamming-ball projectors,
projective measurements, partial traces and the projection-perturbation
inequality ``|tr(rho Q) - tr(rho P Q P)| <= 3 sqrt(tr(rho (1 - P)))``.

Tolerances: 1e-10 for construction invariants, 1e-9 for verification
comparisons, 1e-6 for user-facing warnings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Mapping, Sequence

import numpy as np

from .gf2 import BitString

CONSTRUCT_TOL = 1e-10
VERIFY_TOL = 1e-9
WARN_TOL = 1e-6

MAX_VECTOR_QUBITS = 12
MAX_JOINT_DIM = 2**7

PLUS, TIMES = 0, 1  # basis labels; bit 0 encodes '+', bit 1 encodes 'x'


class QuantumStateError(ValueError):
    """A state or operator violates its structural invariants."""


class RegisterTooLarge(ValueError):
    pass


def _check_qubits(n: int) -> None:
    if n > MAX_VECTOR_QUBITS:
        raise RegisterTooLarge(f"{n} qubits exceeds the dense limit of {MAX_VECTOR_QUBITS}")


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 1 << self.n_qubits:
            raise QuantumStateError(f"expected {1 << self.n_qubits} amplitudes, got {amps.size}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > CONSTRUCT_TOL:
            raise QuantumStateError(f"state norm^2 is {norm}, not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(self.n_qubits + other.n_qubits, np.kron(self.amplitudes, other.amplitudes))


def _hermitian_residue(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise QuantumStateError("density operator must be square")
        if _hermitian_residue(m) > CONSTRUCT_TOL:
            raise QuantumStateError("density operator is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > CONSTRUCT_TOL:
            raise QuantumStateError(f"density operator has trace {tr}")
        if np.linalg.eigvalsh(m).min() < -VERIFY_TOL:
            raise QuantumStateError("density operator has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim) / dim)

    def tensor(self, other: "DensityOperator") -> "DensityOperator":
        return DensityOperator(np.kron(self.matrix, other.matrix))


@dataclass(frozen=True, eq=False)
class HermitianOp:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise QuantumStateError("operator must be square")
        if _hermitian_residue(m) > CONSTRUCT_TOL:
            raise QuantumStateError("operator is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def identity(cls, dim: int) -> "HermitianOp":
        return cls(np.eye(dim))

    @classmethod
    def projector_onto(cls, vectors: np.ndarray) -> "HermitianOp":
        """Projector onto the span of orthonormal columns of ``vectors``."""
        v = np.asarray(vectors, dtype=complex)
        return cls(v @ v.conj().T)

    def projector_residue(self) -> float:
        return float(np.max(np.abs(self.matrix @ self.matrix - self.matrix))) if self.dim else 0.0

    def is_projector(self, tol: float = VERIFY_TOL) -> bool:
        return self.projector_residue() <= tol

    def rank(self, tol: float = WARN_TOL) -> int:
        """Number of eigenvalues at 1 (meaningful for projectors)."""
        return int(np.sum(np.abs(np.linalg.eigvalsh(self.matrix) - 1.0) < tol))

    def tensor(self, other: "HermitianOp") -> "HermitianOp":
        return HermitianOp(np.kron(self.matrix, other.matrix))


@dataclass(frozen=True, eq=False)
class Pvm:
    elements: Mapping[Hashable, HermitianOp]
    dim: int = field(init=False)

    def __post_init__(self):
        items = dict(self.elements)
        if not items:
            raise QuantumStateError("a PVM needs at least one element")
        dims = {e.dim for e in items.values()}
        if len(dims) != 1:
            raise QuantumStateError("PVM elements have inconsistent dimensions")
        object.__setattr__(self, "elements", items)
        object.__setattr__(self, "dim", dims.pop())
        for label, e in items.items():
            if not e.is_projector():
                raise QuantumStateError(f"PVM element {label!r} is not a projector")
        if self.completeness_residue() > VERIFY_TOL:
            raise QuantumStateError("PVM elements do not sum to the identity")
        if self.orthogonality_residue() > VERIFY_TOL:
            raise QuantumStateError("PVM elements are not mutually orthogonal")

    def completeness_residue(self) -> float:
        total = sum(e.matrix for e in self.elements.values())
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def orthogonality_residue(self) -> float:
        worst = 0.0
        for a, b in combinations(self.elements.values(), 2):
            worst = max(worst, float(np.max(np.abs(a.matrix @ b.matrix))))
        return worst

    @classmethod
    def computational(cls, n_qubits: int) -> "Pvm":
        """``{|x><x|}`` labelled by the integer value of ``x``."""
        dim = 1 << n_qubits
        out = {}
        for k in range(dim):
            e = np.zeros((dim, dim))
            e[k, k] = 1.0
            out[k] = HermitianOp(e)
        return cls(out)

    @classmethod
    def qubit_basis(cls, basis: int) -> "Pvm":
        """Single-qubit PVM in the ``+`` (basis=0) or ``x`` (basis=1) basis."""
        return cls({b: HermitianOp(np.outer(v, v.conj()))
                    for b, v in ((0, _qubit_vec(0, basis)), (1, _qubit_vec(1, basis)))})


_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def _qubit_vec(bit: int, basis: int) -> np.ndarray:
    v = np.zeros(2, dtype=complex)
    v[bit] = 1.0
    return _H @ v if basis == TIMES else v


def prepare_bb84_qubit(bit: int, basis: int | str) -> StateVector:
    """``|0>, |1>`` for the ``+`` basis and ``(|0> +/- |1>)/sqrt 2`` for ``x``."""
    if isinstance(basis, str):
        basis = {"+": PLUS, "x": TIMES, "×": TIMES}[basis]
    if bit not in (0, 1) or basis not in (PLUS, TIMES):
        raise ValueError(f"invalid BB84 preparation ({bit}, {basis})")
    return StateVector(1, _qubit_vec(bit, basis))


def hadamard_matrix(n: int) -> np.ndarray:
    """``H^{(x) n}`` as a dense real matrix; entry ``[x, z] = 2^{-n/2} (-1)^{x.z}``."""
    _check_qubits(n)
    k = np.arange(1 << n)
    signs = np.bitwise_count(k[:, None] & k[None, :]) & 1
    return (1.0 - 2.0 * signs) / np.sqrt(float(1 << n))


def conjugate_basis_state(z: BitString) -> StateVector:
    """``|z_bar> = H^{(x) n} |z>``.

    Index ``k`` of a register vector is the bitstring ``BitString.from_int(k, n)``.
    """
    n = len(z)
    _check_qubits(n)
    k = np.arange(1 << n)
    signs = np.bitwise_count(k & z.to_int()) & 1
    return StateVector(n, (1.0 - 2.0 * signs) / np.sqrt(float(1 << n)))


def hamming_ball_projector(center: BitString, radius: int) -> HermitianOp:
    """``sum over |s| <= radius of |center+s bar><center+s bar|``."""
    n = len(center)
    _check_qubits(n)
    if not 0 <= radius <= n:
        raise ValueError(f"radius {radius} outside [0, {n}]")
    k = np.arange(1 << n)
    inside = np.bitwise_count(k ^ center.to_int()) <= radius
    h = hadamard_matrix(n)[:, inside]
    return HermitianOp(h @ h.T)


def expectation(state: DensityOperator, op: HermitianOp) -> float:
    """``tr(rho op)``; raises if the imaginary residue exceeds 1e-6."""
    if state.dim != op.dim:
        raise ValueError(f"dimension mismatch: state {state.dim}, operator {op.dim}")
    val = np.trace(state.matrix @ op.matrix)
    if abs(val.imag) > WARN_TOL:
        raise QuantumStateError(f"expectation has imaginary part {val.imag}")
    return float(val.real)


def measure(state: DensityOperator, pvm: Pvm, rng: np.random.Generator | int):
    """Draw an outcome by the Born rule; return ``(label, post_state)``."""
    if state.dim != pvm.dim:
        raise ValueError(f"dimension mismatch: state {state.dim}, PVM {pvm.dim}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    labels = list(pvm.elements)
    probs = np.array([expectation(state, pvm.elements[k]) for k in labels])
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if total <= VERIFY_TOL:
        raise QuantumStateError("all outcome probabilities vanish")
    idx = int(rng.choice(len(labels), p=probs / total))
    e = pvm.elements[labels[idx]].matrix
    post = e @ state.matrix @ e
    post = post / np.trace(post).real
    return labels[idx], DensityOperator((post + post.conj().T) / 2)


def partial_trace(state: DensityOperator, keep: Sequence[int] | Sequence[bool],
                  dims: Sequence[int]) -> DensityOperator:
    """Trace out every factor not listed in ``keep``.

    ``keep`` is either a list of factor indices or a boolean mask over ``dims``.
    """
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != state.dim:
        raise ValueError(f"factor dimensions {dims} do not multiply to {state.dim}")
    if len(keep) == len(dims) and all(isinstance(k, (bool, np.bool_)) for k in keep):
        keep = [i for i, k in enumerate(keep) if k]
    keep = sorted(int(k) for k in keep)
    n = len(dims)
    t = state.matrix.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise ValueError("too many tensor factors")
    row = list(letters[:n])
    col = [letters[n + i] if i in keep else letters[i] for i in range(n)]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    reduced = np.einsum(f"{''.join(row)}{''.join(col)}->{''.join(out)}", t)
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return DensityOperator(reduced.reshape(d, d))


@dataclass(frozen=True)
class PerturbationCheck:
    lhs: float
    rhs: float
    holds: bool

    @property
    def ratio(self) -> float:
        if self.rhs > 0:
            return self.lhs / self.rhs
        return 0.0 if self.lhs <= VERIFY_TOL else float("inf")


def verify_projection_perturbation(rho: DensityOperator, p: HermitianOp,
                                   q: HermitianOp) -> PerturbationCheck:
    """Check ``|tr(rho Q) - tr(rho P Q P)| <= 3 tr(rho (1 - P))^(1/2)``."""
    if not (rho.dim == p.dim == q.dim):
        raise ValueError("dimension mismatch")
    for name, op in (("P", p), ("Q", q)):
        if not op.is_projector():
            raise QuantumStateError(f"{name} is not a projector")
    r, pm, qm = rho.matrix, p.matrix, q.matrix
    lhs = abs(np.trace(r @ qm).real - np.trace(r @ pm @ qm @ pm).real)
    leak = max(np.trace(r @ (np.eye(rho.dim) - pm)).real, 0.0)
    rhs = 3.0 * np.sqrt(leak)
    return PerturbationCheck(float(lhs), float(rhs), bool(lhs <= rhs + VERIFY_TOL))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Random mixed state ``G G^dag / tr`` with Ginibre ``G`` of the given rank."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityOperator(m / np.trace(m).real)


def random_projector(dim: int, rank: int, rng: np.random.Generator) -> HermitianOp:
    """Projector onto a Haar-random ``rank``-dimensional subspace."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    qmat, _ = np.linalg.qr(g)
    v = qmat[:, :rank]
    m = v @ v.conj().T
    return HermitianOp((m + m.conj().T) / 2)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    qmat, r = np.linalg.qr(g)
    return qmat * (np.diag(r) / np.abs(np.diag(r)))
