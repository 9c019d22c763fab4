"""Phase-tracked Pauli operators in symplectic (Z|X) form.

An operator on ``n`` qubits is stored as

    i**phase_exp * Z^z_bits X^x_bits

where ``Z^z X^x`` is shorthand for the tensor product of ``Z^{z_j} X^{x_j}``
over qubits ``j = 0..n-1`` (qubit 0 is the leftmost letter of the text form
and the most significant qubit of a dense matrix). With this layout a
product only needs one sign correction, ``(-1)^(x_a . z_b)``, which keeps the
phase bookkeeping exact.

The text form uses Hermitian letters. A ``Y`` in text is the Hermitian
``Y = -i ZX``, so each ``Y`` letter contributes ``3`` to ``phase_exp``.
Tables written with the ``Y = ZX`` convention differ from this by a global
phase only; use :meth:`PauliOperator.equal_up_to_phase` when comparing against
them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from math import comb
from typing import Iterator, Sequence

import numpy as np

_LETTERS = "IXYZ"
# (z, x) bits for each letter
_BITS = {"I": (0, 0), "X": (0, 1), "Z": (1, 0), "Y": (1, 1)}
_LETTER = {bits: letter for letter, bits in _BITS.items()}
_SIGN_PREFIX = {0: "", 1: "i", 2: "-", 3: "-i"}

_I2 = np.eye(2, dtype=complex)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_Z2 = np.array([[1, 0], [0, -1]], dtype=complex)


class PauliParseError(ValueError):
    """Raised for malformed Pauli text."""


@dataclass(frozen=True)
class PauliOperator:
    """An n-qubit Pauli operator ``i**phase_exp * Z^z_bits X^x_bits``."""

    z_bits: tuple[int, ...]
    x_bits: tuple[int, ...]
    phase_exp: int = 0

    def __post_init__(self):
        if len(self.z_bits) != len(self.x_bits):
            raise ValueError(
                f"z_bits and x_bits differ in length ({len(self.z_bits)} != {len(self.x_bits)})"
            )
        object.__setattr__(self, "z_bits", tuple(int(b) & 1 for b in self.z_bits))
        object.__setattr__(self, "x_bits", tuple(int(b) & 1 for b in self.x_bits))
        object.__setattr__(self, "phase_exp", int(self.phase_exp) % 4)

    # -- construction -------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls((0,) * n, (0,) * n, 0)

    @classmethod
    def from_label(cls, text: str, sign: int = 1) -> PauliOperator:
        return pauli_parse(text, sign)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliOperator:
        """Single-qubit Pauli ``letter`` on ``qubit`` of an ``n``-qubit register."""
        chars = ["I"] * n
        chars[qubit] = letter
        return pauli_parse("".join(chars))

    # -- basic properties ---------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.z_bits)

    @property
    def weight(self) -> int:
        return pauli_weight(self)

    @property
    def num_y(self) -> int:
        return sum(z & x for z, x in zip(self.z_bits, self.x_bits))

    @property
    def hermitian_phase(self) -> int:
        """Exponent k such that the operator equals ``i**k`` times its Hermitian letters."""
        return (self.phase_exp + self.num_y) % 4

    @property
    def is_hermitian(self) -> bool:
        return self.hermitian_phase % 2 == 0

    @property
    def letters(self) -> str:
        return "".join(_LETTER[(z, x)] for z, x in zip(self.z_bits, self.x_bits))

    @property
    def z_mask(self) -> int:
        """Z bits packed into an int, qubit 0 as the most significant bit."""
        return _pack(self.z_bits)

    @property
    def x_mask(self) -> int:
        return _pack(self.x_bits)

    def to_label(self) -> str:
        """Canonical text form: optional ``-``/``i``/``-i`` prefix then letters."""
        return _SIGN_PREFIX[self.hermitian_phase] + self.letters

    def __str__(self) -> str:
        return self.to_label()

    def __repr__(self) -> str:
        return f"PauliOperator({self.to_label()!r})"

    # -- algebra --------------------------------------------------------------
    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return pauli_multiply(self, other)

    def __neg__(self) -> PauliOperator:
        return PauliOperator(self.z_bits, self.x_bits, self.phase_exp + 2)

    def commutes_with(self, other: PauliOperator) -> bool:
        return pauli_commutes(self, other)

    def adjoint(self) -> PauliOperator:
        # (Z^z X^x)^dagger = X^x Z^z = (-1)^(z.x) Z^z X^x
        overlap = sum(z & x for z, x in zip(self.z_bits, self.x_bits))
        return PauliOperator(self.z_bits, self.x_bits, -self.phase_exp + 2 * overlap)

    def sign_free(self) -> PauliOperator:
        """Same letters with a ``+`` Hermitian sign."""
        return PauliOperator(self.z_bits, self.x_bits, -self.num_y)

    def equal_up_to_phase(self, other: PauliOperator) -> bool:
        return self.z_bits == other.z_bits and self.x_bits == other.x_bits

    def tensor(self, other: PauliOperator) -> PauliOperator:
        """``self`` on the leading qubits, ``other`` on the trailing ones."""
        return PauliOperator(
            self.z_bits + other.z_bits,
            self.x_bits + other.x_bits,
            self.phase_exp + other.phase_exp,
        )

    def restrict(self, start: int, stop: int) -> PauliOperator:
        """The factor on qubits ``start..stop-1``, phase dropped."""
        return PauliOperator(self.z_bits[start:stop], self.x_bits[start:stop], 0).sign_free()

    def to_matrix(self) -> np.ndarray:
        """Dense ``2**n x 2**n`` matrix (qubit 0 most significant)."""
        factors = [
            (_Z2 if z else _I2) @ (_X2 if x else _I2) for z, x in zip(self.z_bits, self.x_bits)
        ]
        mat = reduce(np.kron, factors, np.ones((1, 1), dtype=complex))
        return (1j ** self.phase_exp) * mat


def _pack(bits: Sequence[int]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | b
    return value


def pauli_parse(text: str, sign: int = 1) -> PauliOperator:
    """Parse ``"±{I,X,Y,Z}^n"`` text.

    A leading ``-``, ``+``, ``i`` or ``-i`` sets the Hermitian sign; ``sign=-1``
    multiplies by an extra ``-1``.

    >>> pauli_parse("XZZXI").z_bits
    (0, 1, 1, 0, 0)
    >>> pauli_parse("-IXYY").to_label()
    '-IXYY'
    """
    if sign not in (1, -1):
        raise PauliParseError(f"sign must be +1 or -1, got {sign!r}")
    body = text.strip()
    phase = 0
    for prefix, k in (("-i", 2 + 1), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
        if body.startswith(prefix):
            phase = k
            body = body[len(prefix):]
            break
    if not body:
        raise PauliParseError(f"empty Pauli string in {text!r}")
    offset = len(text.strip()) - len(body)
    z, x = [], []
    for pos, ch in enumerate(body):
        if ch not in _BITS:
            raise PauliParseError(
                f"invalid character {ch!r} at position {pos + offset} in {text!r}"
            )
        zb, xb = _BITS[ch]
        z.append(zb)
        x.append(xb)
    num_y = sum(a & b for a, b in zip(z, x))
    if sign == -1:
        phase += 2
    # each Hermitian Y = i**3 * ZX
    return PauliOperator(tuple(z), tuple(x), phase + 3 * num_y)


def pauli_multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Exact product ``a @ b`` including phase."""
    if a.n != b.n:
        raise ValueError(f"cannot multiply Paulis on {a.n} and {b.n} qubits")
    # moving X^{x_a} past Z^{z_b} costs (-1)^(x_a . z_b)
    swap = sum(xa & zb for xa, zb in zip(a.x_bits, b.z_bits))
    return PauliOperator(
        tuple(p ^ q for p, q in zip(a.z_bits, b.z_bits)),
        tuple(p ^ q for p, q in zip(a.x_bits, b.x_bits)),
        a.phase_exp + b.phase_exp + 2 * swap,
    )


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    if a.n != b.n:
        raise ValueError(f"Paulis act on {a.n} and {b.n} qubits")
    return sum(
        (za & xb) ^ (xa & zb) for za, xa, zb, xb in zip(a.z_bits, a.x_bits, b.z_bits, b.x_bits)
    ) & 1


def pauli_commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return symplectic_product(a, b) == 0


def pauli_weight(a: PauliOperator) -> int:
    return sum(z | x for z, x in zip(a.z_bits, a.x_bits))


def iter_pauli_errors(n: int, w: int) -> Iterator[PauliOperator]:
    """Sign-free Paulis of weight exactly ``w``.

    Order: support positions in lexicographic order, then letters X < Y < Z
    with the leftmost position varying slowest.
    """
    if not 0 <= w <= n:
        raise ValueError(f"weight {w} outside [0, {n}]")
    for support in itertools.combinations(range(n), w):
        for letters in itertools.product("XYZ", repeat=w):
            chars = ["I"] * n
            for pos, letter in zip(support, letters):
                chars[pos] = letter
            yield pauli_parse("".join(chars))


def enumerate_pauli_errors(n: int, w: int) -> list[PauliOperator]:
    ops = list(iter_pauli_errors(n, w))
    assert len(ops) == comb(n, w) * 3**w
    return ops


def low_weight_errors(n: int = 5, max_weight: int = 2) -> list[PauliOperator]:
    """All sign-free errors of weight ``0..max_weight`` in enumeration order."""
    return [op for w in range(max_weight + 1) for op in iter_pauli_errors(n, w)]
