"""The [[5,1,3]] perfect code: generators, syndromes and encoding tables."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import tables
from .pauli import PauliOperator, enumerate_pauli_errors, pauli_parse, symplectic_product

N_QUBITS = 5
N_SYNDROMES = 16

# printed syndrome bit k is the anticommutation bit of generator LABEL_PERM[k];
# i.e. printed (s1 s2 s3 s4) = (a4, a1, a3, a2)
LABEL_PERM = (3, 0, 2, 1)


class CodeConstructionError(RuntimeError):
    """The generator/logical table fails its self-check."""


class ExactCoverError(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class SyndromeLabel:
    """A printed 4-bit syndrome, ``value`` in ``0..15`` with bit 0 leftmost."""

    value: int

    def __post_init__(self):
        if not 0 <= self.value < N_SYNDROMES:
            raise ValueError(f"syndrome value {self.value} outside 0..15")

    @classmethod
    def from_bits(cls, bits: str | Sequence[int]) -> SyndromeLabel:
        if isinstance(bits, str):
            bits = [int(c) for c in bits]
        value = 0
        for b in bits:
            value = (value << 1) | int(b)
        return cls(value)

    @property
    def bits(self) -> str:
        return format(self.value, "04b")

    @property
    def name(self) -> str:
        return f"s{self.value}"

    def __str__(self) -> str:
        return self.bits

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value


@dataclass(frozen=True)
class CheckMatrix:
    z_part: np.ndarray
    x_part: np.ndarray

    @classmethod
    def from_generators(cls, generators: Sequence[PauliOperator]) -> CheckMatrix:
        z = np.array([g.z_bits for g in generators], dtype=np.uint8)
        x = np.array([g.x_bits for g in generators], dtype=np.uint8)
        return cls(z, x)

    def symplectic(self) -> np.ndarray:
        """The ``r x 2n`` matrix ``[Z | X]``."""
        return np.hstack([self.z_part, self.x_part])

    def rank(self) -> int:
        from .gf2 import gf2_rank

        return gf2_rank(self.symplectic())


@dataclass(frozen=True)
class StabilizerCode:
    generators: tuple[PauliOperator, ...]
    logical_x: PauliOperator
    logical_z: PauliOperator
    label_perm: tuple[int, ...] = LABEL_PERM

    @property
    def n(self) -> int:
        return self.logical_x.n

    @property
    def check(self) -> CheckMatrix:
        return CheckMatrix.from_generators(self.generators)

    def anticommutation_bits(self, error: PauliOperator) -> tuple[int, ...]:
        """``a_j = 1`` iff ``error`` anticommutes with generator ``j`` (generator order)."""
        return tuple(symplectic_product(error, g) for g in self.generators)

    def label_from_bits(self, bits: Sequence[int]) -> SyndromeLabel:
        return SyndromeLabel.from_bits([bits[j] for j in self.label_perm])

    def bits_from_label(self, label: SyndromeLabel) -> tuple[int, ...]:
        printed = [int(c) for c in label.bits]
        bits = [0] * len(self.label_perm)
        for k, j in enumerate(self.label_perm):
            bits[j] = printed[k]
        return tuple(bits)

    def syndrome_values(self, z: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Vectorised printed syndrome values for arrays of (z, x) bit rows."""
        chk = self.check
        anti = (z @ chk.x_part.T.astype(np.int64) + x @ chk.z_part.T.astype(np.int64)) & 1
        weights = 1 << np.arange(len(self.label_perm) - 1, -1, -1)
        return anti[:, list(self.label_perm)] @ weights

    def problems(self) -> list[str]:
        """Self-check; empty when the code is consistent."""
        found = []
        gens = self.generators
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                if symplectic_product(gens[i], gens[j]):
                    found.append(f"g{i + 1} anticommutes with g{j + 1}")
        for name, op in (("logical X", self.logical_x), ("logical Z", self.logical_z)):
            for j, g in enumerate(gens):
                if symplectic_product(op, g):
                    found.append(f"{name} anticommutes with g{j + 1}")
        if not symplectic_product(self.logical_x, self.logical_z):
            found.append("logical X commutes with logical Z")
        if self.check.rank() != len(gens):
            found.append("generators are linearly dependent")
        if sorted(self.label_perm) != list(range(len(gens))):
            found.append(f"label_perm {self.label_perm} is not a permutation")
        return found


def build_perfect_code(generators: Sequence[str] | None = None, validate: bool = True) -> StabilizerCode:
    """The perfect code with the standard generator table.

    ``generators`` overrides the four generator labels (for negative controls);
    set ``validate=False`` to build a deliberately broken code.
    """
    labels = tables.GENERATOR_LABELS if generators is None else tuple(generators)
    code = StabilizerCode(
        generators=tuple(pauli_parse(g) for g in labels),
        logical_x=pauli_parse(tables.LOGICAL_X_LABEL),
        logical_z=pauli_parse(tables.LOGICAL_Z_LABEL),
    )
    if validate:
        problems = code.problems()
        if problems:
            raise CodeConstructionError("; ".join(problems))
    return code


def syndrome_of(code: StabilizerCode, error: PauliOperator) -> SyndromeLabel:
    if error.n != code.n:
        raise ValueError(f"error acts on {error.n} qubits, code has {code.n}")
    return code.label_from_bits(code.anticommutation_bits(error))


@dataclass
class VerificationReport:
    """Pass/fail tally for a batch of named checks."""

    name: str
    passed: int = 0
    total: int = 0
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def check(self, ok: bool, message: str) -> bool:
        self.total += 1
        if ok:
            self.passed += 1
        else:
            self.failures.append(message)
        return ok

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        text = f"{self.name}: {self.passed}/{self.total}"
        if self.failures:
            text += f" FAILED ({self.failures[0]})"
        return text


def verify_syndrome_table(
    code: StabilizerCode, table: Iterable[tuple[str, str]] = tables.SYNDROME_TABLE
) -> VerificationReport:
    """Check each printed (error, syndrome) pair and that the map is a bijection."""
    report = VerificationReport("Table II")
    seen = {}
    for label, printed in table:
        got = syndrome_of(code, pauli_parse(label))
        report.check(got.bits == printed, f"{label}: expected {printed}, got {got.bits}")
        seen[label] = got
    distinct = len(set(seen.values()))
    if distinct != len(seen):
        report.failures.append(f"only {distinct} distinct syndromes for {len(seen)} operators")
    report.notes.append(f"bijective: {distinct == len(seen) == N_SYNDROMES}")
    return report


def single_error_set(code: StabilizerCode) -> tuple[PauliOperator, ...]:
    """Identity plus the 15 single-qubit errors, indexed by syndrome value."""
    slots: list[PauliOperator | None] = [None] * N_SYNDROMES
    for op in enumerate_pauli_errors(code.n, 0) + enumerate_pauli_errors(code.n, 1):
        s = syndrome_of(code, op).value
        if slots[s] is not None:
            raise CodeConstructionError(f"{op} and {slots[s]} share syndrome {s:04b}")
        slots[s] = op
    return tuple(slots)  # type: ignore[arg-type]


def _algorithm_x(columns: dict, rows: dict, partial: list):
    """Knuth's Algorithm X over dict-of-sets; yields solutions in deterministic order."""
    if not columns:
        yield list(partial)
        return
    col = min(columns, key=lambda c: (len(columns[c]), c))
    for r in sorted(columns[col]):
        partial.append(r)
        removed = _cover(columns, rows, r)
        yield from _algorithm_x(columns, rows, partial)
        _uncover(columns, rows, r, removed)
        partial.pop()


def _cover(columns, rows, r):
    removed = []
    for j in rows[r]:
        for i in columns[j]:
            for k in rows[i]:
                if k != j:
                    columns[k].discard(i)
        removed.append(columns.pop(j))
    return removed


def _uncover(columns, rows, r, removed):
    for j in reversed(rows[r]):
        columns[j] = removed.pop()
        for i in columns[j]:
            for k in rows[i]:
                if k != j:
                    columns[k].add(i)


def partition_double_errors(code: StabilizerCode, n_sets: int = 6) -> list[tuple[PauliOperator, ...]]:
    """Split the 90 weight-2 errors into ``n_sets`` sets, one error per nonzero syndrome.

    Solved as an exact cover: every error is used once and every
    (set, syndrome) slot is filled once. Each returned set has 16 entries
    indexed by syndrome value, with the identity at index 0.
    """
    errors = enumerate_pauli_errors(code.n, 2)
    synd = [syndrome_of(code, e).value for e in errors]
    if 0 in synd:
        raise ExactCoverError("a weight-2 error has trivial syndrome")
    rows = {}
    for ei, s in enumerate(synd):
        for m in range(n_sets):
            # sort keys: errors first, then slots
            rows[(ei, m)] = [(0, ei, 0), (1, m, s)]
    columns = defaultdict(set)
    for r, cols in rows.items():
        for c in cols:
            columns[c].add(r)
    needed = {(0, ei, 0) for ei in range(len(errors))}
    needed |= {(1, m, s) for m in range(n_sets) for s in range(1, N_SYNDROMES)}
    if set(columns) != needed:
        raise ExactCoverError("syndrome classes are not all the same size")
    solution = next(_algorithm_x(dict(columns), rows, []), None)
    if solution is None:
        raise ExactCoverError("no exact cover of the weight-2 errors exists")
    identity = PauliOperator.identity(code.n)
    sets = [[identity] + [None] * (N_SYNDROMES - 1) for _ in range(n_sets)]
    for ei, m in sorted(solution, key=lambda r: (r[1], synd[r[0]])):
        sets[m][synd[ei]] = errors[ei]
    return [tuple(s) for s in sets]


@dataclass(frozen=True)
class EncodingRow:
    syndrome: SyndromeLabel
    ancilla_op: PauliOperator
    cover_op: PauliOperator
    encoded_error: PauliOperator

    @property
    def swap_operator(self) -> PauliOperator:
        """``E_i (x) O_i`` on ancilla + cover."""
        return self.ancilla_op.tensor(self.cover_op)

    @property
    def ancilla_index(self) -> int:
        """X-part of ``E_i`` read as a 4-bit number; ``E_i|0> ~ |ancilla_index>``."""
        return self.ancilla_op.x_mask


@dataclass(frozen=True)
class EncodingTable:
    rows: tuple[EncodingRow, ...]
    name: str = ""

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def by_syndrome(self, syndrome: int | SyndromeLabel) -> EncodingRow:
        value = int(syndrome)
        for row in self.rows:
            if row.syndrome.value == value:
                return row
        raise KeyError(f"no row with syndrome {value:04b}")

    def by_ancilla_index(self, index: int) -> EncodingRow:
        for row in self.rows:
            if row.ancilla_index == index:
                return row
        raise KeyError(f"no row whose ancilla operator has X-part {index:04b}")

    def to_text(self) -> str:
        lines = [
            f"{r.syndrome.bits}\t{r.ancilla_op.to_label()}\t{r.cover_op.to_label()}\t"
            f"{r.encoded_error.to_label()}"
            for r in self.rows
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "") -> EncodingTable:
        rows = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ValueError(f"line {lineno}: expected 4 tab-separated fields, got {len(fields)}")
            s, e, o, f = fields
            rows.append(EncodingRow(SyndromeLabel.from_bits(s), pauli_parse(e), pauli_parse(o), pauli_parse(f)))
        return cls(tuple(rows), name)

    @classmethod
    def from_printed(cls, entries: Iterable[tuple[str, str, str, str]], name: str = "") -> EncodingTable:
        """Rows from ``(E, O, encoded error, syndrome)`` label tuples."""
        return cls(
            tuple(
                EncodingRow(SyndromeLabel.from_bits(s), pauli_parse(e), pauli_parse(o), pauli_parse(f))
                for e, o, f, s in entries
            ),
            name,
        )


def reference_single_error_table() -> EncodingTable:
    return EncodingTable.from_printed(tables.SINGLE_ERROR_ENCODING, name="single")


def reference_double_error_tables(corrected: bool = True) -> list[EncodingTable]:
    """The six printed double-error encodings (entry m of every syndrome group)."""
    groups = tables.double_error_groups(corrected)
    identity = ("IIII", "I", "IIIII", "0000")
    out = []
    for m in range(6):
        entries = [identity]
        for syndrome in sorted(groups):
            swap, encoded = groups[syndrome][m]
            sign = "-" if swap.startswith("-") else ""
            body = swap.lstrip("-")
            entries.append((sign + body[:4], body[4], encoded, syndrome))
        out.append(EncodingTable.from_printed(entries, name=f"double-{m + 1}"))
    return out


def validate_encoding_table(
    code: StabilizerCode, table: EncodingTable, profile: str | None = None
) -> VerificationReport:
    """Structural check of an encoding table.

    ``profile`` is ``"single"`` (every encoded error has weight <= 1),
    ``"double"`` (every nonzero row has weight 2) or ``None`` to infer it.
    """
    report = VerificationReport(f"encoding table {table.name}".strip())
    report.check(len(table) == N_SYNDROMES, f"{len(table)} rows, expected 16")
    counts = Counter(r.syndrome.value for r in table)
    dupes = sorted(s for s, c in counts.items() if c > 1)
    report.check(not dupes and set(counts) == set(range(N_SYNDROMES)),
                 f"syndromes not a permutation of 0..15 (duplicates {dupes})")
    for row in table:
        got = syndrome_of(code, row.encoded_error)
        report.check(got == row.syndrome,
                     f"row {row.syndrome}: {row.encoded_error} has syndrome {got}")
        report.check(row.ancilla_op.n == code.n - 1 and row.cover_op.n == 1,
                     f"row {row.syndrome}: operator sizes {row.ancilla_op.n}+{row.cover_op.n}")
    zero_rows = [r for r in table if r.syndrome.value == 0]
    if zero_rows:
        z = zero_rows[0]
        report.check(z.encoded_error.weight == 0 and z.ancilla_op.weight == 0 and z.cover_op.weight == 0,
                     "syndrome-0 row is not all identity")
    indices = Counter(r.ancilla_index for r in table)
    report.check(len(indices) == len(table),
                 "ancilla X-parts are not distinct; the swap cannot clear the stego register")
    nonzero = [r.encoded_error.weight for r in table if r.syndrome.value != 0]
    if profile is None:
        profile = "single" if all(w <= 1 for w in nonzero) else "double"
    if profile == "single":
        report.check(all(w <= 1 for w in nonzero), "weight profile: some encoded error has weight > 1")
    elif profile == "double":
        report.check(all(w == 2 for w in nonzero), "weight profile: some nonzero row is not weight 2")
    else:
        raise ValueError(f"unknown profile {profile!r}")
    report.notes.append(f"profile: {profile}")
    return report
