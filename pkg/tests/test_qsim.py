import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algoqkd.gf2 import BitString
from algoqkd.qsim import (
    DensityOperator,
    HermitianOp,
    Pvm,
    QuantumStateError,
    conjugate_basis_state,
    expectation,
    hadamard_matrix,
    hamming_ball_projector,
    measure,
    partial_trace,
    prepare_bb84_qubit,
    random_density,
    random_projector,
    verify_projection_perturbation,
)


def test_bb84_states():
    s = 1 / math.sqrt(2)
    assert np.allclose(prepare_bb84_qubit(0, "+").amplitudes, [1, 0])
    assert np.allclose(prepare_bb84_qubit(1, 0).amplitudes, [0, 1])
    assert np.allclose(prepare_bb84_qubit(0, "x").amplitudes, [s, s])
    assert np.allclose(prepare_bb84_qubit(1, 1).amplitudes, [s, -s])


def test_hadamard_unitary_and_sign_convention():
    h = hadamard_matrix(3)
    assert np.allclose(h @ h.T, np.eye(8))
    for x in range(8):
        for z in range(8):
            sign = (-1) ** bin(x & z).count("1")
            assert math.isclose(h[x, z], sign / math.sqrt(8))
    v = conjugate_basis_state(BitString("10")).amplitudes
    assert np.allclose(np.abs(v) ** 2, 0.25)


def test_hamming_ball_rank():
    for n, r in [(3, 0), (3, 1), (4, 2)]:
        p = hamming_ball_projector(BitString.zeros(n), r)
        assert p.is_projector()
        assert p.rank() == sum(math.comb(n, k) for k in range(r + 1))


def test_density_validation():
    with pytest.raises(QuantumStateError):
        DensityOperator(np.diag([0.7, 0.7]))
    with pytest.raises(QuantumStateError):
        DensityOperator(np.diag([1.2, -0.2]))


def test_measure_statistics():
    rho = prepare_bb84_qubit(0, "x").density()
    rng = np.random.default_rng(1)
    outcomes = [measure(rho, Pvm.qubit_basis(0), rng)[0] for _ in range(4000)]
    assert abs(np.mean(outcomes) - 0.5) < 0.03
    out, post = measure(prepare_bb84_qubit(1, "+").density(), Pvm.computational(1), 0)
    assert out == 1 and np.allclose(post.matrix, np.diag([0, 1]))


def test_partial_trace_of_product():
    rng = np.random.default_rng(3)
    a, b = random_density(2, rng), random_density(4, rng)
    joint = a.tensor(b)
    assert np.allclose(partial_trace(joint, [0], [2, 4]).matrix, a.matrix)
    assert np.allclose(partial_trace(joint, [1], [2, 4]).matrix, b.matrix)


def test_expectation_of_projector():
    rho = DensityOperator.maximally_mixed(4)
    assert math.isclose(expectation(rho, HermitianOp.identity(4)), 1.0)
    with pytest.raises(ValueError):
        Pvm({0: HermitianOp(np.diag([1.0, 0.0]))})  # incomplete


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 16), st.integers(0, 2**32 - 1))
def test_projection_perturbation_property(dim, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(dim, rng)
    p = random_projector(dim, int(rng.integers(0, dim + 1)), rng)
    q = random_projector(dim, int(rng.integers(0, dim + 1)), rng)
    check = verify_projection_perturbation(rho, p, q)
    assert check.holds
    # oracle: recompute both sides from the definitions
    tq = np.trace(rho.matrix @ q.matrix).real
    tpqp = np.trace(rho.matrix @ p.matrix @ q.matrix @ p.matrix).real
    tp = np.trace(rho.matrix @ p.matrix).real
    assert math.isclose(check.lhs, abs(tq - tpqp), abs_tol=1e-12)
    # compare squares: sqrt magnifies rounding when tr(rho P) is 1 - O(1e-16)
    assert math.isclose((check.rhs / 3) ** 2, max(1 - tp, 0), abs_tol=1e-12)
