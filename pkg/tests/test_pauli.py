import itertools

import numpy as np
import pytest
from hypothesis import given

from conftest import label_matrix, paulis
from perfectstego.pauli import (
    PauliOperator,
    PauliParseError,
    enumerate_pauli_errors,
    low_weight_errors,
    pauli_commutes,
    pauli_multiply,
    pauli_parse,
    pauli_weight,
    symplectic_product,
)


def test_parse_generator_bits():
    p = pauli_parse("XZZXI")
    assert p.z_bits == (0, 1, 1, 0, 0)
    assert p.x_bits == (1, 0, 0, 1, 0)
    assert p.to_label() == "XZZXI"


@pytest.mark.parametrize("label", ["Y", "-Y", "iXYZ", "-iYYI", "-IXYY", "ZZZZZ", "IIIII"])
def test_label_round_trip_and_matrix(label):
    p = pauli_parse(label)
    assert p.to_label() == label
    np.testing.assert_allclose(p.to_matrix(), label_matrix(label), atol=1e-15)


def test_plus_prefix_and_sign_argument():
    assert pauli_parse("+XZ") == pauli_parse("XZ")
    assert pauli_parse("XZ", sign=-1) == pauli_parse("-XZ")
    assert pauli_parse("+iY").to_label() == "iY"


@pytest.mark.parametrize("bad", ["XQZ", "", "-", "x", "XY Z"])
def test_parse_errors_name_position(bad):
    with pytest.raises(PauliParseError):
        pauli_parse(bad)


def test_parse_error_reports_position():
    with pytest.raises(PauliParseError, match="position 1"):
        pauli_parse("XQZ")


def test_xz_anticommute_and_product_phase():
    x, z = pauli_parse("X"), pauli_parse("Z")
    assert not pauli_commutes(x, z)
    assert (x * z).to_label() == "-iY"
    assert (z * x).to_label() == "iY"


def test_generators_commute_and_weight():
    gens = [pauli_parse(g) for g in ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")]
    for a, b in itertools.combinations(gens, 2):
        assert pauli_commutes(a, b)
    assert all(pauli_weight(g) == 4 for g in gens)


def test_mismatched_lengths():
    with pytest.raises(ValueError):
        pauli_multiply(pauli_parse("XX"), pauli_parse("XXX"))
    with pytest.raises(ValueError):
        symplectic_product(pauli_parse("X"), pauli_parse("XX"))


def test_enumeration_sizes():
    assert len(enumerate_pauli_errors(5, 1)) == 15
    assert len(enumerate_pauli_errors(5, 2)) == 90
    ops = low_weight_errors()
    assert len(ops) == 106
    assert len({op.letters for op in ops}) == 106
    assert ops[0] == PauliOperator.identity(5)


def test_enumeration_order_is_deterministic():
    assert [p.letters for p in enumerate_pauli_errors(2, 1)] == ["XI", "YI", "ZI", "IX", "IY", "IZ"]


def test_adjoint_and_hermitian():
    y = pauli_parse("Y")
    assert y.is_hermitian and y.adjoint() == y
    iy = pauli_parse("iY")
    assert not iy.is_hermitian
    assert iy.adjoint() == pauli_parse("-iY")


def test_restrict_and_tensor():
    p = pauli_parse("-XYZIY")
    assert p.restrict(1, 3).to_label() == "YZ"
    assert pauli_parse("XY").tensor(pauli_parse("-Z")).to_label() == "-XYZ"


def test_masks_msb_first():
    p = pauli_parse("XIIZY")
    assert p.x_mask == 0b10001
    assert p.z_mask == 0b00011


@given(paulis(3), paulis(3))
def test_product_matches_matrices(a, b):
    np.testing.assert_allclose((a * b).to_matrix(), a.to_matrix() @ b.to_matrix(), atol=1e-12)


@given(paulis(3), paulis(3))
def test_commutation_matches_matrices(a, b):
    ma, mb = a.to_matrix(), b.to_matrix()
    assert pauli_commutes(a, b) == np.allclose(ma @ mb, mb @ ma)


@given(paulis(4))
def test_label_matrix_agrees_with_to_matrix(a):
    np.testing.assert_allclose(a.to_matrix(), label_matrix(a.to_label()), atol=1e-12)


@given(paulis(3))
def test_adjoint_matches_conjugate_transpose(a):
    np.testing.assert_allclose(a.adjoint().to_matrix(), a.to_matrix().conj().T, atol=1e-12)


@given(paulis(3), paulis(3), paulis(3))
def test_product_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(paulis(4))
def test_square_is_plus_or_minus_identity(a):
    sq = a * a
    assert sq.weight == 0
    assert sq.phase_exp in ((0,) if a.is_hermitian else (2,))
