import numpy as np
import pytest
from hypothesis import strategies as st

from perfectstego.code import build_perfect_code
from perfectstego.clifford import GateSequence
from perfectstego.pauli import PauliOperator

_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_PREFIX = {"": 1, "i": 1j, "-": -1, "-i": -1j}


def label_matrix(label: str) -> np.ndarray:
    """Dense matrix straight from a signed label, independent of the library."""
    for prefix in ("-i", "i", "-", ""):
        if label.startswith(prefix) and label[len(prefix):].isalpha() and label[len(prefix):].isupper():
            body, coeff = label[len(prefix):], _PREFIX[prefix]
            break
    mat = np.ones((1, 1), dtype=complex)
    for ch in body:
        mat = np.kron(mat, _MATS[ch])
    return coeff * mat


_H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
_S = np.diag([1, 1j])


def gate_matrix(gate, n):
    """Dense unitary of one gate, qubit 0 most significant."""
    if gate[0] in ("H", "S"):
        m = _H if gate[0] == "H" else _S
        return np.kron(np.kron(np.eye(2 ** gate[1]), m), np.eye(2 ** (n - gate[1] - 1)))
    c, t = gate[1], gate[2]
    dim = 2**n
    u = np.zeros((dim, dim))
    for i in range(dim):
        bits = [(i >> (n - 1 - q)) & 1 for q in range(n)]
        if bits[c]:
            bits[t] ^= 1
        j = sum(b << (n - 1 - q) for q, b in enumerate(bits))
        u[j, i] = 1
    return u


def circuit_unitary(gates: GateSequence):
    u = np.eye(2**gates.n, dtype=complex)
    for g in gates:
        u = gate_matrix(g, gates.n) @ u
    return u


def paulis(n):
    return st.builds(
        PauliOperator,
        st.tuples(*[st.integers(0, 1)] * n),
        st.tuples(*[st.integers(0, 1)] * n),
        st.integers(0, 3),
    )


@pytest.fixture(scope="session")
def code():
    return build_perfect_code()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
