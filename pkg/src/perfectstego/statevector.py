"""Dense state vectors for exact protocol checks (up to 9 qubits).

Qubit 0 is the most significant bit of the amplitude index, matching the
leftmost letter of a Pauli label. The full protocol register is laid out as

    qubits 0-3   stego register S
    qubits 4-7   ancillas (ancilla j sits on qubit 4 + j)
    qubit  8     cover qubit

so the five-qubit codeword is qubits 4-8.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .clifford import GateSequence
from .code import EncodingTable
from .pauli import PauliOperator

MAX_QUBITS = 9
STEGO_QUBITS = (0, 1, 2, 3)
ANCILLA_QUBITS = (4, 5, 6, 7)
COVER_QUBIT = 8
CODEWORD_QUBITS = (4, 5, 6, 7, 8)
NORM_TOL = 1e-12

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"{self.n} qubits outside 1..{MAX_QUBITS}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.n:
            raise ValueError(f"{amps.size} amplitudes for {self.n} qubits")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n: int) -> StateVector:
        amps = np.zeros(2**n, dtype=complex)
        amps[0] = 1
        return cls(n, amps)

    @classmethod
    def basis(cls, n: int, index: int) -> StateVector:
        amps = np.zeros(2**n, dtype=complex)
        amps[index] = 1
        return cls(n, amps)

    @classmethod
    def from_amplitudes(cls, amps: Sequence[complex], normalize: bool = False) -> StateVector:
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size)))
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> StateVector:
        """Haar-random pure state."""
        amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        return cls(n, amps / np.linalg.norm(amps))

    @classmethod
    def qubit(cls, theta: float, phi: float) -> StateVector:
        """``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``."""
        return cls(1, [np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self, other: StateVector) -> StateVector:
        return StateVector(self.n + other.n, np.kron(self.amplitudes, other.amplitudes))

    def expectation(self, p: PauliOperator, qubit_offset: int = 0) -> complex:
        return complex(np.vdot(self.amplitudes, apply_pauli(self, p, qubit_offset).amplitudes))

    def _tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n).copy()

    def dump_text(self) -> str:
        """Debug dump, one ``index<TAB>re<TAB>im`` line per amplitude."""
        return "".join(f"{i}\t{a.real:.17g}\t{a.imag:.17g}\n" for i, a in enumerate(self.amplitudes))


def _from_tensor(t: np.ndarray) -> StateVector:
    return StateVector(t.ndim, t.reshape(-1))


def _check_range(state: StateVector, width: int, offset: int):
    if offset < 0 or offset + width > state.n:
        raise ValueError(f"{width} qubits at offset {offset} exceed a {state.n}-qubit state")


def apply_pauli(state: StateVector, p: PauliOperator, qubit_offset: int = 0) -> StateVector:
    _check_range(state, p.n, qubit_offset)
    t = state._tensor()
    for j in range(p.n):
        axis = qubit_offset + j
        if p.x_bits[j]:
            t = np.flip(t, axis=axis)
    for j in range(p.n):
        axis = qubit_offset + j
        if p.z_bits[j]:
            idx = [slice(None)] * t.ndim
            idx[axis] = 1
            t[tuple(idx)] *= -1
    return _from_tensor(t * (1j**p.phase_exp))


def _apply_1q(t: np.ndarray, mat: np.ndarray, axis: int) -> np.ndarray:
    t = np.tensordot(mat, t, axes=([1], [axis]))
    return np.moveaxis(t, 0, axis)


def _apply_cx(t: np.ndarray, control: int, target: int) -> np.ndarray:
    idx = [slice(None)] * t.ndim
    idx[control] = 1
    sub = t[tuple(idx)]
    t_axis = target - (1 if target > control else 0)
    t[tuple(idx)] = np.flip(sub, axis=t_axis).copy()
    return t


def apply_gates(state: StateVector, gates: GateSequence | Iterable[tuple], qubit_offset: int = 0) -> StateVector:
    width = gates.n if isinstance(gates, GateSequence) else 0
    _check_range(state, width, qubit_offset)
    t = state._tensor()
    for gate in gates:
        qs = [qubit_offset + q for q in gate[1:]]
        if any(not 0 <= q < state.n for q in qs):
            raise ValueError(f"gate {gate} at offset {qubit_offset} is outside the register")
        if gate[0] == "H":
            t = _apply_1q(t, _H, qs[0])
        elif gate[0] == "S":
            t = _apply_1q(t, _S, qs[0])
        elif gate[0] == "CX":
            t = _apply_cx(t, qs[0], qs[1])
        else:
            raise ValueError(f"unknown gate {gate!r}")
    return _from_tensor(t)


def _apply_pauli_tensor(t: np.ndarray, p: PauliOperator) -> np.ndarray:
    """Apply ``p`` to all axes of a (2,)*p.n tensor."""
    for j in range(p.n):
        if p.x_bits[j]:
            t = np.flip(t, axis=j)
    t = t.copy()
    for j in range(p.n):
        if p.z_bits[j]:
            idx = [slice(None)] * t.ndim
            idx[j] = 1
            t[tuple(idx)] *= -1
    return t * (1j**p.phase_exp)


def _swap_u1(psi: np.ndarray, table: EncodingTable, inverse: bool) -> np.ndarray:
    # psi has shape (16, 2, 2, 2, 2, 2): stego value, then ancillas + cover
    out = np.empty_like(psi)
    for i in range(16):
        op = table.by_ancilla_index(i).swap_operator
        if inverse:
            op = op.adjoint()
        out[i] = _apply_pauli_tensor(psi[i], op)
    return out


def _swap_u2(psi: np.ndarray) -> np.ndarray:
    # psi has shape (16, 16, 2): stego value, ancilla value, cover
    out = np.empty_like(psi)
    for j in range(16):
        out[np.arange(16) ^ j, j, :] = psi[:, j, :]
    return out


def apply_syndrome_swap(state: StateVector, table: EncodingTable, direction: str = "forward") -> StateVector:
    """Swap the stego register into (``forward``) or out of (``inverse``) the syndrome space.

    ``U1 = sum_i |i><i|_S (x) E_i (x) O_i`` with row ``i`` chosen so that
    ``E_i|0000> ~ |i>``, and ``U2 = sum_j X^j_S (x) |j><j|_anc``. Forward
    applies U1 then U2; inverse applies U2 then U1^dagger.
    """
    if state.n != MAX_QUBITS:
        raise ValueError(f"syndrome swap needs a 9-qubit register, got {state.n}")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    psi = state.amplitudes.reshape(16, 2, 2, 2, 2, 2)
    if direction == "forward":
        psi = _swap_u1(psi, table, inverse=False)
        psi = _swap_u2(psi.reshape(16, 16, 2))
    else:
        psi = _swap_u2(psi.reshape(16, 16, 2))
        psi = _swap_u1(psi.reshape(16, 2, 2, 2, 2, 2), table, inverse=True)
    return StateVector(MAX_QUBITS, psi.reshape(-1))


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|^2``."""
    if a.n != b.n:
        raise ValueError(f"states have {a.n} and {b.n} qubits")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def register_is_zero(state: StateVector, qubits: Sequence[int], tol: float = 1e-10) -> bool:
    """True iff the probability of reading any 1 on ``qubits`` is below ``tol``."""
    return one_probability(state, qubits) < tol


def one_probability(state: StateVector, qubits: Sequence[int]) -> float:
    if any(not 0 <= q < state.n for q in qubits):
        raise ValueError(f"qubits {tuple(qubits)} outside a {state.n}-qubit state")
    probs = np.abs(state._tensor()) ** 2
    idx = [slice(None)] * state.n
    for q in qubits:
        idx[q] = 0
    return float(max(0.0, 1.0 - probs[tuple(idx)].sum()))


def split_product(state: StateVector, n_left: int, tol: float = 1e-10) -> tuple[StateVector, StateVector]:
    """Factor a product state into its first ``n_left`` qubits and the rest.

    Raises if the Schmidt rank across the cut exceeds one (beyond ``tol``).
    """
    mat = state.amplitudes.reshape(2**n_left, -1)
    u, s, vh = np.linalg.svd(mat)
    if s.size > 1 and s[1] ** 2 > tol:
        raise ValueError(f"state is entangled across the cut (second Schmidt weight {s[1] ** 2:.3g})")
    left = StateVector(n_left, u[:, 0])
    right = StateVector(state.n - n_left, s[0] * vh[0] / abs(s[0]))
    return left, right
