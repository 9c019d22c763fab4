"""Batch checks of the printed reference tables and of the derived encoder."""
from __future__ import annotations

from collections import Counter
from typing import Sequence

import numpy as np

from . import tables
from .clifford import (
    CliffordMap,
    SynthesisError,
    circuit_to_clifford,
    clifford_to_circuit,
    derived_encoding_tables,
    encoder_from_table,
    synthesize_encoder,
)
from .code import (
    N_SYNDROMES,
    CodeConstructionError,
    EncodingTable,
    StabilizerCode,
    VerificationReport,
    build_perfect_code,
    reference_single_error_table,
    syndrome_of,
    validate_encoding_table,
    verify_syndrome_table,
)
from .pauli import pauli_parse

# generator whose first letter is swapped, for the negative control
CORRUPTED_GENERATORS = ("YZZXI",) + tables.GENERATOR_LABELS[1:]


def verify_generators(code: StabilizerCode) -> VerificationReport:
    report = VerificationReport("Table I")
    for problem in code.problems():
        report.check(False, problem)
    chk = code.check
    report.check(np.array_equal(chk.z_part, np.array(tables.CHECK_MATRIX_Z)), "check matrix Z part differs")
    report.check(np.array_equal(chk.x_part, np.array(tables.CHECK_MATRIX_X)), "check matrix X part differs")
    return report


def verify_single_error_table(code: StabilizerCode) -> VerificationReport:
    """Every printed encoded error has its printed syndrome."""
    report = VerificationReport("Table III")
    for _, _, encoded, printed in tables.SINGLE_ERROR_ENCODING:
        got = syndrome_of(code, pauli_parse(encoded)).bits
        report.check(got == printed, f"{encoded}: expected {printed}, got {got}")
    return report


def verify_double_error_groups(code: StabilizerCode, corrected: bool = True) -> VerificationReport:
    """Every printed double error has its group's syndrome; each of the six sets covers 1..15 once."""
    report = VerificationReport("Table IV")
    groups = tables.double_error_groups(corrected)
    for syndrome, rows in sorted(groups.items()):
        for pos, (_, encoded) in enumerate(rows):
            got = syndrome_of(code, pauli_parse(encoded)).bits
            report.check(got == syndrome, f"group {syndrome} entry {pos + 1} {encoded}: syndrome {got}")
    for m in range(6):
        seen = Counter(syndrome_of(code, pauli_parse(rows[m][1])).value for rows in groups.values())
        ok = sorted(seen) == list(range(1, N_SYNDROMES)) and set(seen.values()) == {1}
        report.check(ok, f"set {m + 1} does not cover the 15 nonzero syndromes exactly once")
    everything = [pauli_parse(e).letters for rows in groups.values() for _, e in rows]
    report.check(len(set(everything)) == len(everything), "some double error appears twice")
    if corrected:
        for (syndrome, pos), (printed, fixed) in tables.DOUBLE_ERROR_ERRATA.items():
            report.notes.append(f"misprint corrected: group {syndrome} entry {pos + 1} {printed} -> {fixed}")
    return report


def verify_printed_pre_images(code: StabilizerCode) -> VerificationReport:
    """The printed swap operators of both tables all come from one encoder."""
    report = VerificationReport("printed pre-images")
    try:
        encoder = encoder_from_table(code, reference_single_error_table())
    except SynthesisError as exc:
        report.check(False, f"single-error table does not define a Clifford: {exc}")
        return report
    for e, o, encoded, _ in tables.SINGLE_ERROR_ENCODING:
        pre = pauli_parse(e.lstrip("-") + o)
        report.check(encoder.inverse(pauli_parse(encoded)).equal_up_to_phase(pre), f"{encoded}: pre-image is not {pre}")
    for syndrome, rows in sorted(tables.double_error_groups(True).items()):
        for swap, encoded in rows:
            pre = pauli_parse(swap.lstrip("-"))
            report.check(encoder.inverse(pauli_parse(encoded)).equal_up_to_phase(pre),
                         f"{encoded}: pre-image is not {pre}")
    report.notes.append(f"ancilla Z images land on generators {[g + 1 for g in encoder.generator_order]}")
    return report


def verify_encoder(code: StabilizerCode, encoder: CliffordMap | None = None) -> tuple[VerificationReport, list[EncodingTable]]:
    """Synthesized encoder, its circuit, and the ancilla X-part property of every derived row."""
    report = VerificationReport("encoder")
    encoder = encoder or synthesize_encoder(code)
    for problem in encoder.problems():
        report.check(False, problem)
    for j, k in enumerate(encoder.generator_order):
        report.check(encoder.z_images[j].equal_up_to_phase(code.generators[k]),
                     f"ancilla Z{j} maps to {encoder.z_images[j]}, not generator {k + 1}")
    circuit = clifford_to_circuit(encoder)
    rebuilt = circuit_to_clifford(circuit, encoder.generator_order)
    report.check(rebuilt.x_images == encoder.x_images and rebuilt.z_images == encoder.z_images,
                 "circuit does not reproduce the encoder")
    report.notes.append(f"circuit: {len(circuit)} gates")
    derived = derived_encoding_tables(code, encoder)
    for table in derived:
        for row in table:
            pre = encoder.inverse(row.encoded_error)
            bits = code.anticommutation_bits(row.encoded_error)
            expected = tuple(bits[k] for k in encoder.generator_order)
            report.check(pre.x_bits[: code.n - 1] == expected,
                         f"{table.name} {row.encoded_error}: ancilla X-part {pre.x_bits[:4]} != {expected}")
    return report, derived


def verify_derived_tables(code: StabilizerCode, derived: Sequence[EncodingTable]) -> VerificationReport:
    report = VerificationReport("derived encodings")
    for i, table in enumerate(derived):
        sub = validate_encoding_table(code, table, "single" if i == 0 else "double")
        report.check(sub.ok, f"{table.name}: {sub.failures[:1]}")
    sizes = [len(t) for t in derived[1:]]
    report.notes.append(f"double-error encodings: {len(sizes)} x {sizes[0] if sizes else 0} rows")
    return report


def verify_all(corrupt_generator: bool = False) -> list[VerificationReport]:
    """Run every table check; stops after Table II if the code itself is broken."""
    labels = CORRUPTED_GENERATORS if corrupt_generator else None
    try:
        code = build_perfect_code(labels)
    except CodeConstructionError as exc:
        report = VerificationReport("Table I")
        report.check(False, str(exc))
        code = build_perfect_code(labels, validate=False)
        return [report, verify_syndrome_table(code)]
    reports = [
        verify_generators(code),
        verify_syndrome_table(code),
        verify_single_error_table(code),
        verify_double_error_groups(code),
        verify_printed_pre_images(code),
    ]
    try:
        enc_report, derived = verify_encoder(code)
    except (SynthesisError, CodeConstructionError) as exc:
        failed = VerificationReport("encoder")
        failed.check(False, str(exc))
        return reports + [failed]
    return reports + [enc_report, verify_derived_tables(code, derived)]
