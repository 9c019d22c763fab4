"""Encoding Clifford for the perfect code.

The encoder ``U`` is described by where it sends the single-qubit Paulis
under conjugation (``P -> U P U^dagger``). Qubits 0-3 are ancillas and qubit 4
is the cover qubit. By default ancilla ``j`` carries generator ``g_{j+1}``,
so ``U Z_j U^dagger = g_{j+1}``, ``U Z_4 U^dagger`` is logical Z and
``U X_4 U^dagger`` is logical X. The images of ``X_0..X_3`` (destabilizers)
are not fixed by the code; they are chosen by solving linear constraints.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .code import (
    EncodingRow,
    EncodingTable,
    StabilizerCode,
    partition_double_errors,
    single_error_set,
    syndrome_of,
)
from .gf2 import gf2_inv, gf2_solve
from .pauli import PauliOperator, pauli_commutes, symplectic_product

GENERATOR_ORDER = (0, 1, 2, 3)


class SynthesisError(RuntimeError):
    pass


@dataclass(frozen=True)
class CliffordMap:
    """Conjugation images of ``X_j`` and ``Z_j`` under the encoder."""

    x_images: tuple[PauliOperator, ...]
    z_images: tuple[PauliOperator, ...]
    generator_order: tuple[int, ...] = GENERATOR_ORDER

    @property
    def n(self) -> int:
        return len(self.x_images)

    def symplectic_matrix(self) -> np.ndarray:
        """Rows are ``[z|x]`` bits of the images of ``Z_0..Z_{n-1}, X_0..X_{n-1}``."""
        rows = [p.z_bits + p.x_bits for p in self.z_images + self.x_images]
        return np.array(rows, dtype=np.uint8)

    def problems(self) -> list[str]:
        found = []
        n = self.n
        for a in range(n):
            for b in range(n):
                if symplectic_product(self.x_images[a], self.x_images[b]):
                    found.append(f"X{a} and X{b} images anticommute")
                if symplectic_product(self.z_images[a], self.z_images[b]):
                    found.append(f"Z{a} and Z{b} images anticommute")
                if symplectic_product(self.x_images[a], self.z_images[b]) != (a == b):
                    found.append(f"X{a}/Z{b} commutation not preserved")
        for p in self.x_images + self.z_images:
            if not p.is_hermitian:
                found.append(f"image {p} is not Hermitian")
        return found

    def forward(self, p: PauliOperator) -> PauliOperator:
        """``U p U^dagger``."""
        return _apply_images(p, self.z_images, self.x_images)

    @cached_property
    def _inverse_images(self) -> tuple[tuple[PauliOperator, ...], tuple[PauliOperator, ...]]:
        n = self.n
        s_inv = gf2_inv(self.symplectic_matrix())
        zs, xs = [], []
        for basis_index in range(2 * n):
            row = s_inv[basis_index]
            guess = PauliOperator(tuple(row[:n]), tuple(row[n:]), 0)
            image = self.forward(guess)
            target_phase = 0  # basis elements Z_j, X_j carry no phase
            fixed = PauliOperator(guess.z_bits, guess.x_bits, target_phase - image.phase_exp)
            (zs if basis_index < n else xs).append(fixed)
        return tuple(zs), tuple(xs)

    def inverse(self, p: PauliOperator) -> PauliOperator:
        """``U^dagger p U``."""
        zs, xs = self._inverse_images
        return _apply_images(p, zs, xs)


def _apply_images(p: PauliOperator, zs, xs) -> PauliOperator:
    out = PauliOperator((0,) * p.n, (0,) * p.n, p.phase_exp)
    for j, bit in enumerate(p.z_bits):
        if bit:
            out = out * zs[j]
    for j, bit in enumerate(p.x_bits):
        if bit:
            out = out * xs[j]
    return out


def conjugate_by_encoder(cliff: CliffordMap, p: PauliOperator, direction: str = "forward") -> PauliOperator:
    if p.n != cliff.n:
        raise ValueError(f"Pauli acts on {p.n} qubits, encoder on {cliff.n}")
    if direction == "forward":
        return cliff.forward(p)
    if direction == "inverse":
        return cliff.inverse(p)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def _as_row(p: PauliOperator) -> np.ndarray:
    # symplectic_product(v, p) = v_z . p_x + v_x . p_z
    return np.array(p.x_bits + p.z_bits, dtype=np.uint8)


def synthesize_encoder(code: StabilizerCode, generator_order: Sequence[int] = GENERATOR_ORDER) -> CliffordMap:
    """Encoder with ``Z_j -> g[generator_order[j]]`` and the logical pair on the cover qubit.

    Passing ``generator_order=code.label_perm`` makes ancilla ``j`` carry
    printed syndrome bit ``j``.
    """
    order = tuple(generator_order)
    if sorted(order) != list(range(len(code.generators))):
        raise ValueError(f"generator_order {order} is not a permutation")
    n = code.n
    stabs = [code.generators[k] for k in order]
    z_images = stabs + [code.logical_z]
    constraints = np.array([_as_row(p) for p in stabs + [code.logical_x, code.logical_z]])
    destabs: list[PauliOperator] = []
    for j in range(len(stabs)):
        rhs = np.zeros(len(constraints), dtype=np.uint8)
        rhs[j] = 1
        try:
            bits = gf2_solve(constraints, rhs)
        except np.linalg.LinAlgError as exc:
            raise SynthesisError(f"no destabilizer for generator {order[j] + 1}") from exc
        d = PauliOperator(tuple(bits[:n]), tuple(bits[n:]))
        for k, earlier in enumerate(destabs):
            if not pauli_commutes(d, earlier):
                d = d * stabs[k]
        destabs.append(d.sign_free())
    x_images = destabs + [code.logical_x]
    cliff = CliffordMap(tuple(x_images), tuple(z_images), order)
    problems = cliff.problems()
    if problems:
        raise SynthesisError("; ".join(problems))
    return cliff


def derive_syndrome_swap_table(
    cliff: CliffordMap,
    code: StabilizerCode,
    error_set: Sequence[PauliOperator],
    name: str = "",
) -> EncodingTable:
    """Pre-encoding operators ``E_i (x) O_i = U^dagger F U`` for each encoded error ``F``.

    The sign of the pre-image is carried on ``E_i``; ``O_i`` is sign-free.
    The X-part of every ``E_i`` equals the anticommutation bits of ``F``
    taken in the encoder's generator order, which is what lets the swap
    unitaries move the stego register into the syndrome.
    """
    n_anc = code.n - 1
    rows = []
    for f in error_set:
        pre = cliff.inverse(f)
        cover = pre.restrict(n_anc, code.n)
        anc = PauliOperator(pre.z_bits[:n_anc], pre.x_bits[:n_anc], pre.phase_exp - cover.phase_exp)
        bits = code.anticommutation_bits(f)
        expected = tuple(bits[k] for k in cliff.generator_order)
        if anc.x_bits != expected:
            raise SynthesisError(
                f"{f}: ancilla X-part {anc.x_bits} != anticommutation bits {expected}"
            )
        rows.append(EncodingRow(syndrome_of(code, f), anc, cover, f))
    rows.sort(key=lambda r: r.syndrome)
    return EncodingTable(tuple(rows), name)


def derived_encoding_tables(code: StabilizerCode, cliff: CliffordMap) -> list[EncodingTable]:
    """The single-error table followed by the six double-error tables."""
    out = [derive_syndrome_swap_table(cliff, code, single_error_set(code), "single")]
    for m, error_set in enumerate(partition_double_errors(code)):
        out.append(derive_syndrome_swap_table(cliff, code, error_set, f"double-{m + 1}"))
    return out


# -- gate sequences -------------------------------------------------------------

@dataclass(frozen=True)
class GateSequence:
    """Gates in time order: ``("H", q)``, ``("S", q)`` or ``("CX", c, t)``."""

    gates: tuple[tuple, ...]
    n: int

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def to_text(self) -> str:
        return "".join(" ".join(str(g) for g in gate) + "\n" for gate in self.gates)

    @classmethod
    def from_text(cls, text: str, n: int) -> GateSequence:
        gates = []
        for lineno, line in enumerate(text.splitlines(), 1):
            parts = line.split()
            if not parts:
                continue
            name, args = parts[0], tuple(int(a) for a in parts[1:])
            if (name, len(args)) not in (("H", 1), ("S", 1), ("CX", 2)):
                raise ValueError(f"line {lineno}: unknown gate {line!r}")
            if any(not 0 <= a < n for a in args):
                raise ValueError(f"line {lineno}: qubit out of range in {line!r}")
            gates.append((name, *args))
        return cls(tuple(gates), n)

    def inverse(self) -> GateSequence:
        out = []
        for gate in reversed(self.gates):
            if gate[0] == "S":
                out.extend([gate] * 3)
            else:
                out.append(gate)
        return GateSequence(tuple(_simplify(out)), self.n)


def conjugate_by_gate(p: PauliOperator, gate: tuple) -> PauliOperator:
    """``G p G^dagger`` for a single gate."""
    z, x, k = list(p.z_bits), list(p.x_bits), p.phase_exp
    name = gate[0]
    if name == "H":
        q = gate[1]
        k += 2 * (z[q] & x[q])
        z[q], x[q] = x[q], z[q]
    elif name == "S":
        q = gate[1]
        # S X S^dagger = Y = i^3 Z X
        k += 3 * x[q]
        z[q] ^= x[q]
    elif name == "CX":
        c, t = gate[1], gate[2]
        z[c] ^= z[t]
        x[t] ^= x[c]
    else:
        raise ValueError(f"unknown gate {gate!r}")
    return PauliOperator(tuple(z), tuple(x), k)


def conjugate_by_gates(p: PauliOperator, gates: GateSequence | Sequence[tuple]) -> PauliOperator:
    """``U p U^dagger`` for the circuit ``U`` given in time order."""
    for gate in gates:
        p = conjugate_by_gate(p, gate)
    return p


def circuit_to_clifford(gates: GateSequence, generator_order: Sequence[int] = GENERATOR_ORDER) -> CliffordMap:
    n = gates.n
    xs = tuple(conjugate_by_gates(PauliOperator.single(n, j, "X"), gates) for j in range(n))
    zs = tuple(conjugate_by_gates(PauliOperator.single(n, j, "Z"), gates) for j in range(n))
    return CliffordMap(xs, zs, tuple(generator_order))


def _simplify(gates: list[tuple]) -> list[tuple]:
    """Cancel adjacent ``H H`` and fold runs of ``S`` on one qubit mod 4."""
    out: list[tuple] = []
    for gate in gates:
        if out and gate[0] == "H" and out[-1] == gate:
            out.pop()
            continue
        if gate[0] == "S":
            run = 0
            while run < len(out) and out[-1 - run] == gate:
                run += 1
            if run == 3:
                del out[-3:]
                continue
        out.append(gate)
    return out


def clifford_to_circuit(cliff: CliffordMap) -> GateSequence:
    """An {H, S, CX} circuit whose conjugation action reproduces ``cliff``.

    The tableau of images is reduced qubit by qubit to the identity; the
    circuit is the inverse of the reducing gates. The result is checked by
    re-extracting every image.
    """
    n = cliff.n
    xs = list(cliff.x_images)
    zs = list(cliff.z_images)
    reducing: list[tuple] = []

    def apply(gate):
        reducing.append(gate)
        for rows in (xs, zs):
            for i, p in enumerate(rows):
                rows[i] = conjugate_by_gate(p, gate)

    for j in range(n):
        a = xs[j]
        for k in range(j, n):
            if a.z_bits[k] and not a.x_bits[k]:
                apply(("H", k))
            elif a.z_bits[k] and a.x_bits[k]:
                apply(("S", k))
        a = xs[j]
        if not a.x_bits[j]:
            k = next((k for k in range(j + 1, n) if a.x_bits[k]), None)
            if k is None:
                raise SynthesisError(f"row X{j} has no support on qubits >= {j}")
            apply(("CX", k, j))
        for k in range(j + 1, n):
            if xs[j].x_bits[k]:
                apply(("CX", j, k))
        b = zs[j]
        if b.x_bits[j]:
            if not b.z_bits[j]:
                raise SynthesisError(f"Z{j} image commutes with X{j} image")
            for gate in (("H", j), ("S", j), ("H", j)):
                apply(gate)
        for k in range(j + 1, n):
            b = zs[j]
            if b.x_bits[k] and not b.z_bits[k]:
                apply(("H", k))
            elif b.x_bits[k] and b.z_bits[k]:
                apply(("S", k))
                apply(("H", k))
            if zs[j].z_bits[k]:
                apply(("CX", k, j))
    for j in range(n):
        if xs[j].hermitian_phase == 2:
            apply(("S", j))
            apply(("S", j))
        if zs[j].hermitian_phase == 2:
            for gate in (("H", j), ("S", j), ("S", j), ("H", j)):
                apply(gate)
    for j in range(n):
        if xs[j] != PauliOperator.single(n, j, "X") or zs[j] != PauliOperator.single(n, j, "Z"):
            raise SynthesisError(f"reduction left qubit {j} at {xs[j]}, {zs[j]}")

    circuit = GateSequence(tuple(reducing), n).inverse()
    rebuilt = circuit_to_clifford(circuit, cliff.generator_order)
    if rebuilt.x_images != cliff.x_images or rebuilt.z_images != cliff.z_images:
        raise SynthesisError("synthesized circuit does not reproduce the Clifford map")
    return circuit


def encoder_from_table(code: StabilizerCode, table: EncodingTable) -> CliffordMap:
    """Recover the encoder implied by a single-error table.

    The rows give ``U^dagger F U`` for every single-qubit ``F``, which pins
    down ``U`` up to phases on the images. The generator order is read off
    from which generator each ancilla ``Z`` lands on.
    """
    pre = {row.encoded_error.letters: row.swap_operator for row in table}
    n = code.n
    try:
        xs = tuple(pre[PauliOperator.single(n, j, "X").letters] for j in range(n))
        zs = tuple(pre[PauliOperator.single(n, j, "Z").letters] for j in range(n))
    except KeyError as exc:
        raise SynthesisError(f"table lacks a row for {exc.args[0]}") from None
    inverse_map = CliffordMap(xs, zs)
    problems = inverse_map.problems()
    if problems:
        raise SynthesisError("; ".join(problems))
    fx = tuple(inverse_map.inverse(PauliOperator.single(n, j, "X")) for j in range(n))
    fz = tuple(inverse_map.inverse(PauliOperator.single(n, j, "Z")) for j in range(n))
    order = []
    for z in fz[: n - 1]:
        match = [k for k, g in enumerate(code.generators) if g.equal_up_to_phase(z)]
        if not match:
            raise SynthesisError(f"ancilla Z image {z} is not a generator")
        order.append(match[0])
    return CliffordMap(fx, fz, tuple(order))
