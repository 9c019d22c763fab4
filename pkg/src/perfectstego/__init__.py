"""Hiding four qubits in the syndromes of the five-qubit perfect code."""
from .channel import (
    ErrorDistribution,
    EveReport,
    SyndromeHistogram,
    chi_squared_test,
    depolarize_frame,
    eve_report,
    stego_error_distribution,
    syndrome_histogram,
    truncated_error_distribution,
    tv_distance,
)
from .clifford import CliffordMap, GateSequence, clifford_to_circuit, derived_encoding_tables, synthesize_encoder
from .code import (
    EncodingRow,
    EncodingTable,
    StabilizerCode,
    SyndromeLabel,
    build_perfect_code,
    partition_double_errors,
    syndrome_of,
    validate_encoding_table,
    verify_syndrome_table,
)
from .pauli import PauliOperator, pauli_commutes, pauli_multiply, pauli_parse, pauli_weight
from .protocol import (
    BlockRecord,
    EncodingClass,
    KeyStream,
    ProtocolConfig,
    Transcript,
    alice_encode_block,
    bob_decode_block,
    run_stream,
    select_encoding,
    twirl,
    untwirl,
)
from .rates import (
    block_probs,
    emit_rate_csv,
    encoding_fractions,
    key_rate_asymptotic,
    key_rate_blockwise,
    n_avg,
    r_enc,
    r_typ,
    shannon_entropy_rate,
)
from .statevector import StateVector, apply_gates, apply_pauli, apply_syndrome_swap, fidelity
