"""Synthetic Alice/Bob/Eve instances for the listing-bound inequality.

An instance fixes a code ``C`` (privacy amplification ``f``), a finite set of
program labels ``L``, a partition of Alice's strings into sets ``E_t``
(``t`` in ``L``) plus a remainder that no listed program reproduces, and a
pure state on Alice (n qubits) x Bob (n qubits) x Eve (``eve_dim``).

For every ``t`` Eve owns a PVM ``{E_t(y)}``. The state is built so that,
whenever Alice's outcome ``x`` lies in ``E_t``, Eve's conditional state is
supported inside ``E_t(f(x))``. Hence ``tr(E_t(y) rho^E_x) = [f(x) == y]``
holds by construction, which is what makes

    Q_L = sum_t sum_y A_t(y) (x) E_t(y),    A_t(y) = sum_{x in E_t, f(x)=y} |x><x|

a projector whose expectation is the classical probability that ``x`` falls
in the union of the ``E_t``. The verifier then checks

    tr(rho Q_L) <= |L| 2^-M + 3 sqrt(Pr(|z_I xor z'_I| > r))

where ``z_I, z'_I`` are Alice's and Bob's outcomes in the conjugate basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gf2 import BitString
from .lincode import LinearCode
from .qsim import (
    MAX_JOINT_DIM,
    VERIFY_TOL,
    DensityOperator,
    HermitianOp,
    Pvm,
    hadamard_matrix,
    random_unitary,
)

MAX_ALICE_QUBITS = 6
MAX_TRIPARTITE_DIM = 2**13
FAMILIES = ("generic", "product", "bell")
OUTSIDE = -1  # label for strings not covered by any listed program


class DimensionBudgetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SyntheticSecurityInstance:
    n_alice: int
    code: LinearCode
    eve_dim: int
    family: str
    psi: np.ndarray  # amplitudes indexed [alice, bob, eve]
    joint_state: DensityOperator  # Alice (x) Eve
    programs: tuple[int, ...]
    assignment: np.ndarray  # program label of each x, OUTSIDE if none
    pvm_family: dict[int, Pvm]
    coset_projectors: dict[tuple[int, int], HermitianOp]
    q_l: HermitianOp
    identification_residue: float
    q_projector_residue: float
    extras: dict = field(default_factory=dict)

    @property
    def alice_dim(self) -> int:
        return 1 << self.n_alice

    def alice_probabilities(self) -> np.ndarray:
        return np.sum(np.abs(self.psi) ** 2, axis=(1, 2))


def _eve_dim(n: int, m: int) -> int:
    base = 1 << m
    for e in (2 * base, base):
        if (1 << n) * e <= MAX_JOINT_DIM and (1 << (2 * n)) * e <= MAX_TRIPARTITE_DIM:
            return e
    raise DimensionBudgetError(
        f"n={n}, M={m} needs an Alice(x)Eve operator of dimension {(1 << n) * base} "
        f"> {MAX_JOINT_DIM}"
    )


def _key_values(code: LinearCode) -> np.ndarray:
    """``f(x)`` as an integer for every ``x`` (row index = integer value of x)."""
    n = code.n
    xs = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.int64)
    ys = (xs @ code.generators.entries.T.astype(np.int64)) & 1
    return (ys << np.arange(code.m)).sum(axis=1) if code.m else np.zeros(1 << n, dtype=np.int64)


def _random_unit(shape, rng) -> np.ndarray:
    v = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return v / np.linalg.norm(v)


def build_synthetic_instance(code: LinearCode, seed: int, program_count: int,
                             family: str = "generic") -> SyntheticSecurityInstance:
    """Sample an instance; Eve identifies f(x) exactly on every listed x, by construction.

    ``family`` selects the joint state:

    * ``generic``: random amplitudes, Bob partially copies Alice, Eve knows
      ``f(x)`` whenever ``x`` is covered by a listed program.
    * ``product``: Eve is in a fixed state uncorrelated with Alice; each
      ``E_t`` then lies inside a single fibre of ``f``.
    * ``bell``: as ``product`` with Alice and Bob maximally entangled, so
      their conjugate-basis outcomes always agree.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if program_count < 1:
        raise ValueError("program_count must be at least 1")
    n, m = code.n, code.m
    if n > MAX_ALICE_QUBITS:
        raise DimensionBudgetError(f"n={n} exceeds {MAX_ALICE_QUBITS} Alice qubits")
    e = _eve_dim(n, m)
    rng = np.random.default_rng(seed)
    dim_a = 1 << n
    n_y = 1 << m
    ys = _key_values(code)
    programs = tuple(range(program_count))

    # Eve's PVMs: a random orthonormal basis per program, columns grouped by y.
    fixed_eve = _random_unit(e, rng) if family != "generic" else None
    target_y = {t: int(rng.integers(n_y)) for t in programs}
    eve_blocks: dict[int, dict[int, np.ndarray]] = {}
    pvm_family: dict[int, Pvm] = {}
    for t in programs:
        u = random_unitary(e, rng)
        if fixed_eve is not None:
            # first column is Eve's fixed state, so it must land in E_t(target_y[t])
            u[:, 0] = fixed_eve
            q, _ = np.linalg.qr(u)
            q[:, 0] = fixed_eve
            u = q
            others = [y for y in range(n_y) if y != target_y[t]]
            owner = np.concatenate([[target_y[t]], rng.permutation(others),
                                    rng.integers(n_y, size=e - n_y)]).astype(np.int64)
        else:
            owner = np.concatenate([rng.permutation(n_y), rng.integers(n_y, size=e - n_y)])
        blocks = {y: u[:, owner == y] for y in range(n_y)}
        eve_blocks[t] = blocks
        pvm_family[t] = Pvm({y: HermitianOp.projector_onto(blocks[y]) for y in range(n_y)})

    # Which listed program (if any) reproduces f(x) for each x.
    assignment = np.full(dim_a, OUTSIDE, dtype=np.int64)
    for x in range(dim_a):
        if family == "generic":
            options = list(programs) + [OUTSIDE]
        else:
            options = [t for t in programs if target_y[t] == ys[x]] + [OUTSIDE]
        assignment[x] = options[int(rng.integers(len(options)))]

    psi = np.zeros((dim_a, dim_a, e), dtype=complex)
    if family == "generic":
        alpha = _random_unit(dim_a, rng)
        eta = float(rng.uniform())
        for x in range(dim_a):
            t = assignment[x]
            if t == OUTSIDE:
                basis = np.eye(e, dtype=complex)
            else:
                basis = eve_blocks[t][ys[x]]
            k = basis.shape[1]
            eve_vec = basis @ _random_unit(k, rng)
            phi = np.zeros((dim_a, e), dtype=complex)
            phi[x] = np.sqrt(1.0 - eta) * eve_vec
            phi += np.sqrt(eta) * (_random_unit((dim_a, k), rng) @ basis.T)
            psi[x] = alpha[x] * phi / np.linalg.norm(phi)
    else:
        if family == "bell":
            alpha = np.full(dim_a, 1.0 / np.sqrt(dim_a), dtype=complex)
        else:
            alpha = _random_unit(dim_a, rng)
        for x in range(dim_a):
            psi[x, x] = alpha[x] * fixed_eve
    psi /= np.linalg.norm(psi)

    rho_ae = np.einsum("abe,cbf->aecf", psi, psi.conj()).reshape(dim_a * e, dim_a * e)
    joint = DensityOperator((rho_ae + rho_ae.conj().T) / 2)

    coset_projectors: dict[tuple[int, int], HermitianOp] = {}
    q = np.zeros((dim_a * e, dim_a * e), dtype=complex)
    for t in programs:
        for y in range(n_y):
            diag = ((assignment == t) & (ys == y)).astype(float)
            a_ty = HermitianOp(np.diag(diag))
            coset_projectors[(t, y)] = a_ty
            q += np.kron(a_ty.matrix, pvm_family[t].elements[y].matrix)
    q = (q + q.conj().T) / 2
    q_l = HermitianOp(q)

    ident = _identification_residue(psi, assignment, ys, pvm_family)
    return SyntheticSecurityInstance(
        n_alice=n, code=code, eve_dim=e, family=family, psi=psi, joint_state=joint,
        programs=programs, assignment=assignment, pvm_family=pvm_family,
        coset_projectors=coset_projectors, q_l=q_l, identification_residue=ident,
        q_projector_residue=q_l.projector_residue(),
        extras={"seed": seed},
    )


def eve_conditional_state(psi: np.ndarray, x: int) -> np.ndarray | None:
    """Eve's reduced state given Alice measured ``x``; ``None`` if ``p(x) = 0``."""
    phi = psi[x]
    px = float(np.vdot(phi, phi).real)
    if px <= 1e-14:
        return None
    return (phi.T @ phi.conj()) / px


def _identification_residue(psi, assignment, ys, pvm_family) -> float:
    """Max over covered x and all y of ``|tr(E_t(y) rho^E_x) - [f(x) == y]|``."""
    worst = 0.0
    for x in np.flatnonzero(assignment != OUTSIDE):
        rho_e = eve_conditional_state(psi, int(x))
        if rho_e is None:
            continue
        pvm = pvm_family[int(assignment[x])]
        for y, proj in pvm.elements.items():
            val = np.trace(proj.matrix @ rho_e).real
            worst = max(worst, abs(val - (1.0 if y == ys[x] else 0.0)))
    return float(worst)


@dataclass(frozen=True)
class ListingBoundCheck:
    lhs: float
    rhs: float
    holds: bool
    radius: int
    tail_probability: float
    classical_probability: float
    classical_residue: float
    conditional_holds: bool
    conditional_worst_slack: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else float("inf")


def conjugate_outcome_distribution(psi: np.ndarray) -> np.ndarray:
    """Joint law of Alice's and Bob's conjugate-basis outcomes ``(z_I, z'_I)``."""
    dim = psi.shape[0]
    h = hadamard_matrix(int(dim).bit_length() - 1)
    rotated = np.einsum("za,wb,abe->zwe", h, h, psi)
    return np.sum(np.abs(rotated) ** 2, axis=2)


def verify_listing_bound(instance: SyntheticSecurityInstance,
                         radius_fraction: float) -> ListingBoundCheck:
    """Evaluate both sides of the listing bound at radius ``floor(n * radius_fraction)``.

    Also re-checks the identity ``tr(rho Q_L) = Pr(x in union E_t)`` and the
    same inequality conditioned on each of Bob's conjugate outcomes.
    """
    code = instance.code
    n = instance.n_alice
    if instance.identification_residue > VERIFY_TOL or instance.q_projector_residue > VERIFY_TOL:
        raise ValueError("malformed instance: distinguishability or projector check failed")
    radius = int(np.floor(n * radius_fraction + 1e-12))
    if not 0 <= radius <= n:
        raise ValueError(f"radius {radius} outside [0, {n}]")
    if code.min_distance <= 2 * radius:
        raise ValueError(
            f"malformed instance: d(C)={code.min_distance} must exceed 2*radius={2 * radius}"
        )

    n_l = len(instance.programs)
    listing_term = n_l * 2.0 ** (-code.m)
    lhs = float(np.trace(instance.joint_state.matrix @ instance.q_l.matrix).real)

    covered = instance.assignment != OUTSIDE
    classical = float(instance.alice_probabilities()[covered].sum())

    joint = conjugate_outcome_distribution(instance.psi)
    k = np.arange(joint.shape[0])
    far = np.bitwise_count(k[:, None] ^ k[None, :]) > radius
    tail = float(joint[far].sum())
    rhs = listing_term + 3.0 * np.sqrt(max(tail, 0.0))

    # per Bob outcome z': <Q_L> conditioned on z' against its own tail term
    dim_a = joint.shape[0]
    e = instance.eve_dim
    h = hadamard_matrix(n)
    bob_rot = np.einsum("wb,abe->wae", h, instance.psi)
    worst = np.inf
    for w in range(dim_a):
        vec = bob_rot[w].reshape(dim_a * e)
        pw = float(np.vdot(vec, vec).real)
        if pw <= 1e-14:
            continue
        cond_q = float(np.vdot(vec, instance.q_l.matrix @ vec).real) / pw
        cond_tail = float(joint[far[:, w], w].sum()) / pw
        slack = listing_term + 3.0 * np.sqrt(max(cond_tail, 0.0)) - cond_q
        worst = min(worst, slack)

    return ListingBoundCheck(
        lhs=lhs, rhs=float(rhs), holds=bool(lhs <= rhs + VERIFY_TOL), radius=radius,
        tail_probability=tail, classical_probability=classical,
        classical_residue=abs(lhs - classical),
        conditional_holds=bool(worst >= -VERIFY_TOL), conditional_worst_slack=float(worst),
    )
