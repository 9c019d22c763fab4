import numpy as np
import pytest
from hypothesis import given, settings

from conftest import circuit_unitary, gate_matrix, paulis
from perfectstego import tables
from perfectstego.clifford import (
    CliffordMap,
    GateSequence,
    SynthesisError,
    circuit_to_clifford,
    clifford_to_circuit,
    conjugate_by_encoder,
    conjugate_by_gate,
    derive_syndrome_swap_table,
    derived_encoding_tables,
    encoder_from_table,
    synthesize_encoder,
)
from perfectstego.code import LABEL_PERM, reference_single_error_table, single_error_set, validate_encoding_table
from perfectstego.gf2 import gf2_inv, gf2_rank, gf2_solve
from perfectstego.pauli import PauliOperator, pauli_parse

@pytest.fixture(scope="module")
def encoder(code):
    return synthesize_encoder(code)


@pytest.fixture(scope="module")
def circuit(encoder):
    return clifford_to_circuit(encoder)


def test_gf2_helpers():
    a = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 0]], dtype=np.uint8)
    assert gf2_rank(a) == 3
    np.testing.assert_array_equal((a @ gf2_inv(a)) % 2, np.eye(3, dtype=np.uint8))
    x = gf2_solve(a, [1, 0, 1])
    np.testing.assert_array_equal((a @ x) % 2, [1, 0, 1])
    with pytest.raises(np.linalg.LinAlgError):
        gf2_solve(np.array([[1, 1], [1, 1]]), [1, 0])


@pytest.mark.parametrize("gate", [("H", 0), ("S", 1), ("CX", 0, 2), ("CX", 2, 1)])
@given(p=paulis(3))
@settings(max_examples=30, deadline=None)
def test_gate_conjugation_matches_matrices(gate, p):
    g = gate_matrix(gate, 3)
    want = g @ p.to_matrix() @ g.conj().T
    np.testing.assert_allclose(conjugate_by_gate(p, gate).to_matrix(), want, atol=1e-12)


def test_encoder_maps_ancilla_z_to_generators(code, encoder):
    assert encoder.problems() == []
    for j in range(4):
        assert encoder.z_images[j] == code.generators[j]
    assert encoder.z_images[4] == code.logical_z
    assert encoder.x_images[4] == code.logical_x


def test_encoder_symplectic(encoder):
    m = encoder.symplectic_matrix().astype(int)
    omega = np.block([[np.zeros((5, 5)), np.eye(5)], [np.eye(5), np.zeros((5, 5))]]).astype(int)
    np.testing.assert_array_equal((m @ omega @ m.T) % 2, omega)


def test_circuit_reproduces_encoder(encoder, circuit):
    rebuilt = circuit_to_clifford(circuit)
    assert rebuilt.x_images == encoder.x_images
    assert rebuilt.z_images == encoder.z_images
    assert len(circuit) <= 200
    assert {g[0] for g in circuit} <= {"H", "S", "CX"}


def test_circuit_unitary_oracle(encoder, circuit):
    u = circuit_unitary(circuit)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(32), atol=1e-12)
    for j in range(5):
        for letter, images in (("X", encoder.x_images), ("Z", encoder.z_images)):
            p = PauliOperator.single(5, j, letter)
            np.testing.assert_allclose(u @ p.to_matrix() @ u.conj().T, images[j].to_matrix(), atol=1e-12)


def test_encoded_zero_is_stabilized(code, circuit):
    psi = circuit_unitary(circuit)[:, 0]
    for g in code.generators:
        np.testing.assert_allclose(g.to_matrix() @ psi, psi, atol=1e-12)
    np.testing.assert_allclose(code.logical_z.to_matrix() @ psi, psi, atol=1e-12)


def test_inverse_circuit(circuit):
    u = circuit_unitary(circuit)
    np.testing.assert_allclose(circuit_unitary(circuit.inverse()) @ u, np.eye(32), atol=1e-12)


def test_gate_text_round_trip(circuit):
    assert GateSequence.from_text(circuit.to_text(), 5) == circuit
    with pytest.raises(ValueError):
        GateSequence.from_text("T 0\n", 5)
    with pytest.raises(ValueError):
        GateSequence.from_text("CX 0 7\n", 5)


@given(paulis(5))
@settings(max_examples=50, deadline=None)
def test_forward_inverse_round_trip(encoder, p):
    assert encoder.inverse(encoder.forward(p)) == p
    assert conjugate_by_encoder(encoder, p, "inverse") == encoder.inverse(p)


@given(paulis(5))
@settings(max_examples=20, deadline=None)
def test_forward_matches_unitary(encoder, circuit, p):
    u = circuit_unitary(circuit)
    np.testing.assert_allclose(encoder.forward(p).to_matrix(), u @ p.to_matrix() @ u.conj().T, atol=1e-12)


def test_derived_tables_pre_images_exact(code, encoder, circuit):
    u = circuit_unitary(circuit)
    for table in derived_encoding_tables(code, encoder):
        for row in table:
            want = u.conj().T @ row.encoded_error.to_matrix() @ u
            np.testing.assert_allclose(row.swap_operator.to_matrix(), want, atol=1e-12)


def test_ancilla_x_part_is_generator_order_syndrome(code, encoder):
    rows = [row for t in derived_encoding_tables(code, encoder) for row in t]
    assert len(rows) == 16 * 7
    for row in rows:
        assert encoder.inverse(row.encoded_error).x_bits[:4] == code.anticommutation_bits(row.encoded_error)


def test_derived_tables_validate(code, encoder):
    tables_ = derived_encoding_tables(code, encoder)
    assert [t.name for t in tables_] == ["single"] + [f"double-{m}" for m in range(1, 7)]
    for i, t in enumerate(tables_):
        assert validate_encoding_table(code, t, "single" if i == 0 else "double").ok


def test_label_order_makes_x_part_the_printed_label(code):
    enc = synthesize_encoder(code, LABEL_PERM)
    for row in derive_syndrome_swap_table(enc, code, single_error_set(code)):
        assert row.ancilla_index == row.syndrome.value


def test_printed_single_table_x_parts_are_labels():
    for e, _, _, s in tables.SINGLE_ERROR_ENCODING:
        assert pauli_parse(e).x_mask == int(s, 2)


def test_printed_table_implies_label_order_encoder(code):
    enc = encoder_from_table(code, reference_single_error_table())
    assert enc.problems() == []
    assert enc.generator_order == LABEL_PERM
    assert enc.forward(pauli_parse("IIIIZ")).equal_up_to_phase(pauli_parse("IIZXZ"))


def test_printed_double_pre_images_agree(code):
    enc = encoder_from_table(code, reference_single_error_table())
    for rows in tables.double_error_groups(True).values():
        for swap, encoded in rows:
            assert enc.inverse(pauli_parse(encoded)).equal_up_to_phase(pauli_parse(swap.lstrip("-")))


def test_synthesis_rejects_bad_order(code):
    with pytest.raises(ValueError):
        synthesize_encoder(code, (0, 0, 1, 2))


def test_wrong_order_table_derivation_raises(code, encoder):
    wrong = CliffordMap(encoder.x_images, encoder.z_images, LABEL_PERM)
    with pytest.raises(SynthesisError):
        derive_syndrome_swap_table(wrong, code, single_error_set(code))
