import numpy as np
import pytest
from hypothesis import given, settings

from conftest import circuit_unitary, paulis
from perfectstego.clifford import GateSequence
from perfectstego.code import reference_single_error_table
from perfectstego.pauli import pauli_parse
from perfectstego.protocol import default_setup
from perfectstego.statevector import (
    STEGO_QUBITS,
    StateVector,
    apply_gates,
    apply_pauli,
    apply_syndrome_swap,
    fidelity,
    one_probability,
    register_is_zero,
    split_product,
)


def random_state(n, seed):
    return StateVector.random(n, np.random.default_rng(seed))


def swap_matrices(table):
    u1 = np.zeros((512, 512), dtype=complex)
    for i in range(16):
        proj = np.zeros((16, 16))
        proj[i, i] = 1
        u1 += np.kron(proj, table.by_ancilla_index(i).swap_operator.to_matrix())
    u2 = np.zeros((512, 512), dtype=complex)
    for j in range(16):
        xs = pauli_parse("".join("X" if (j >> (3 - q)) & 1 else "I" for q in range(4))).to_matrix()
        proj = np.zeros((16, 16))
        proj[j, j] = 1
        u2 += np.kron(np.kron(xs, proj), np.eye(2))
    return u1, u2


def test_constructors():
    assert StateVector.zero(3).amplitudes[0] == 1
    assert StateVector.basis(2, 3).amplitudes[3] == 1
    np.testing.assert_allclose(StateVector.qubit(np.pi, 0).amplitudes, [0, 1], atol=1e-15)
    with pytest.raises(ValueError):
        StateVector(10, np.zeros(1024))
    with pytest.raises(ValueError):
        StateVector(2, np.zeros(3))


def test_amplitudes_read_only():
    s = StateVector.zero(2)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


@given(paulis(3))
@settings(max_examples=40, deadline=None)
def test_apply_pauli_matches_matrix(p):
    s = random_state(3, 1)
    np.testing.assert_allclose(apply_pauli(s, p).amplitudes, p.to_matrix() @ s.amplitudes, atol=1e-12)


def test_apply_pauli_offset():
    s = random_state(4, 2)
    p = pauli_parse("-YZ")
    full = np.kron(np.kron(np.eye(2), p.to_matrix()), np.eye(2))
    np.testing.assert_allclose(apply_pauli(s, p, 1).amplitudes, full @ s.amplitudes, atol=1e-12)
    with pytest.raises(ValueError):
        apply_pauli(s, p, 3)


def test_apply_gates_matches_unitary():
    _, _, circuit, _ = default_setup()
    s = random_state(5, 3)
    np.testing.assert_allclose(apply_gates(s, circuit).amplitudes, circuit_unitary(circuit) @ s.amplitudes,
                               atol=1e-12)


def test_apply_gates_rejects_out_of_range():
    with pytest.raises(ValueError):
        apply_gates(StateVector.zero(2), GateSequence((("CX", 0, 1),), 2), qubit_offset=1)
    with pytest.raises(ValueError):
        apply_gates(StateVector.zero(2), [("T", 0)])


@pytest.mark.parametrize("which", [0, 3])
def test_syndrome_swap_matches_dense_oracle(which):
    table = default_setup()[3][which]
    u1, u2 = swap_matrices(table)
    s = random_state(4, 4).tensor(StateVector.zero(4)).tensor(random_state(1, 5))
    fwd = apply_syndrome_swap(s, table)
    np.testing.assert_allclose(fwd.amplitudes, u2 @ u1 @ s.amplitudes, atol=1e-12)
    assert register_is_zero(fwd, STEGO_QUBITS)
    back = apply_syndrome_swap(fwd, table, "inverse")
    np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-12)


def test_syndrome_swap_with_printed_table():
    table = reference_single_error_table()
    s = random_state(4, 6).tensor(StateVector.zero(5))
    assert register_is_zero(apply_syndrome_swap(s, table), STEGO_QUBITS)


def test_syndrome_swap_arguments():
    table = default_setup()[3][0]
    with pytest.raises(ValueError):
        apply_syndrome_swap(StateVector.zero(5), table)
    with pytest.raises(ValueError):
        apply_syndrome_swap(StateVector.zero(9), table, "sideways")


def test_fidelity_and_probabilities():
    a = random_state(3, 7)
    assert fidelity(a, a) == pytest.approx(1.0)
    assert fidelity(StateVector.basis(1, 0), StateVector.basis(1, 1)) == 0
    assert one_probability(StateVector.basis(3, 0b010), [1]) == pytest.approx(1.0)
    assert one_probability(StateVector.basis(3, 0b010), [0, 2]) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        fidelity(a, random_state(2, 0))


def test_split_product():
    a, b = random_state(2, 8), random_state(3, 9)
    left, right = split_product(a.tensor(b), 2)
    assert fidelity(left, a) == pytest.approx(1.0)
    assert fidelity(right, b) == pytest.approx(1.0)
    np.testing.assert_allclose(left.tensor(right).amplitudes, a.tensor(b).amplitudes, atol=1e-12)
    bell = StateVector(2, np.array([1, 0, 0, 1]) / np.sqrt(2))
    with pytest.raises(ValueError):
        split_product(bell, 1)


def test_dump_text():
    assert StateVector.zero(1).dump_text().splitlines()[0] == "0\t1\t0"
