"""Alice/Bob protocol: keyed twirl, class selection, block encode/decode, key accounting.

Two simulation paths share the same key handling:

* ``exact`` pushes a 4-qubit payload state through the full 9-qubit
  register (twirl, syndrome swap, encoder) and back;
* ``frame`` tracks only the Pauli error applied to the clean codeword, with
  a 4-bit payload standing in for a computational-basis stego state.
"""
from __future__ import annotations

import enum
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .channel import LOW_WEIGHT, operator_index
from .clifford import (
    CliffordMap,
    GateSequence,
    SynthesisError,
    clifford_to_circuit,
    derived_encoding_tables,
    encoder_from_table,
    synthesize_encoder,
)
from .code import (
    N_SYNDROMES,
    EncodingTable,
    StabilizerCode,
    build_perfect_code,
    reference_double_error_tables,
    reference_single_error_table,
    syndrome_of,
    validate_encoding_table,
)
from .pauli import PauliOperator
from .rates import encoding_fractions
from .statevector import (
    STEGO_QUBITS,
    StateVector,
    apply_gates,
    apply_pauli,
    apply_syndrome_swap,
    fidelity,
    one_probability,
    split_product,
)

SELECT_STREAM = 0
TWIRL_STREAM = 1
PAYLOAD_STREAM = 2
EVE_STREAM = 3

TWIRL_BITS = 8
SELECT_BITS = 3
PRIME_BITS = 32
STREAM_PRECISION = 40  # bits of residual entropy kept before each stream-mode draw
S_REGISTER_TOL = 1e-10
_BELOW_ONE = math.nextafter(1.0, 0.0)


class ProtocolError(RuntimeError):
    """Internal inconsistency, e.g. the stego register is not cleared by the swap."""


class ChannelCorruptionError(ProtocolError):
    """Bob saw a syndrome the agreed encoding cannot produce."""


# -- key stream -------------------------------------------------------------

class KeyStream:
    """Deterministic shared secret bits.

    ``KeyStream(seed, stream)`` for the same pair always yields the same bit
    sequence, however the draws are split up. Distinct ``stream`` numbers
    give independent substreams of one shared seed.
    """

    CHUNK_BYTES = 512

    def __init__(self, seed: int, stream: int = 0):
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed {seed} is not a 64-bit value")
        self.seed = seed
        self.stream = stream
        self._rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))
        self._buf = np.empty(0, dtype=np.uint8)
        self._pos = 0
        self.bits_consumed = 0
        self._selectors: dict = {}

    def _refill(self, chunks: int = 1):
        # whole chunks only, so the bit sequence does not depend on draw sizes
        raw = np.frombuffer(self._rng.bytes(chunks * self.CHUNK_BYTES), dtype=np.uint8)
        self._buf = np.concatenate([self._buf[self._pos:], np.unpackbits(raw)])
        self._pos = 0

    def take(self, n: int) -> np.ndarray:
        """The next ``n`` bits as a uint8 array."""
        if n < 0:
            raise ValueError(f"cannot take {n} bits")
        short = n - (self._buf.size - self._pos)
        if short > 0:
            self._refill(-(-short // (8 * self.CHUNK_BYTES)))
        out = self._buf[self._pos:self._pos + n].copy()
        self._pos += n
        self.bits_consumed += n
        return out

    def take_int(self, width: int) -> int:
        value = 0
        for b in self.take(width):
            value = (value << 1) | int(b)
        return value

    def next_bit(self) -> int:
        if self._pos >= self._buf.size:
            self._refill()
        b = int(self._buf[self._pos])
        self._pos += 1
        self.bits_consumed += 1
        return b

    def selector(self, fractions: Sequence[float], mode: str) -> EncodingSelector:
        """The persistent selector bound to this key for ``(fractions, mode)``."""
        k = (tuple(float(f) for f in fractions), mode)
        if k not in self._selectors:
            self._selectors[k] = EncodingSelector(fractions, mode)
        return self._selectors[k]


# -- encoding classes -------------------------------------------------------

class EncodingClass(enum.IntEnum):
    TRIVIAL = 0
    SINGLE = 1
    DOUBLE_1 = 2
    DOUBLE_2 = 3
    DOUBLE_3 = 4
    DOUBLE_4 = 5
    DOUBLE_5 = 6
    DOUBLE_6 = 7

    @classmethod
    def double(cls, index: int) -> EncodingClass:
        if not 1 <= index <= 6:
            raise ValueError(f"double-error encoding index {index} outside 1..6")
        return cls(index + 1)

    @property
    def double_index(self) -> int | None:
        return self.value - 1 if self.value >= 2 else None

    @property
    def table_index(self) -> int | None:
        """Position in the seven-table list (single first), None for trivial."""
        return None if self is EncodingClass.TRIVIAL else self.value - 1

    @property
    def label(self) -> str:
        if self is EncodingClass.TRIVIAL:
            return "Trivial"
        if self is EncodingClass.SINGLE:
            return "SingleError"
        return f"DoubleError({self.double_index})"

    @classmethod
    def from_label(cls, text: str) -> EncodingClass:
        for c in cls:
            if c.label == text:
                return c
        raise ValueError(f"unknown encoding class {text!r}")


def class_probabilities(fractions: Sequence[float]) -> np.ndarray:
    """Normalized probabilities of the eight classes from ``(Q0, Q1, Q2)``."""
    if len(fractions) != 3:
        raise ValueError(f"need three fractions, got {len(fractions)}")
    q0, q1, q2 = (float(f) for f in fractions)
    if min(q0, q1, q2) < 0 or not all(map(math.isfinite, (q0, q1, q2))):
        raise ValueError(f"invalid fractions {fractions}")
    total = q0 + q1 + q2
    if total <= 0:
        raise ValueError("fractions sum to zero")
    return np.array([q0, q1] + [q2 / 6] * 6) / total


class EncodingSelector:
    """Key-driven choice of encoding class with randomness recycling.

    The selector keeps a residual ``r`` uniform on [0, 1) that is independent
    of all classes chosen so far. Each draw mixes fresh key bits into ``r``,
    reads the class off the cumulative distribution, and rescales the
    position inside the chosen interval back to [0, 1) for next time. Draws
    are therefore exact samples of the class distribution.

    ``blockwise`` spends exactly three key bits per block (plus a one-off
    priming of ``PRIME_BITS``, reported as ``setup_bits``). ``stream`` only
    tops the residual up to ``STREAM_PRECISION`` bits of entropy, so its
    long-run cost per block approaches the entropy of the class distribution.
    """

    def __init__(self, fractions: Sequence[float], mode: str = "blockwise"):
        if mode not in ("blockwise", "stream"):
            raise ValueError(f"key mode must be 'blockwise' or 'stream', got {mode!r}")
        self.mode = mode
        self.probs = class_probabilities(fractions)
        cdf = np.cumsum(self.probs)
        nonzero = np.nonzero(self.probs > 0)[0]
        last = int(nonzero[-1])
        self._uppers = [float(u) for u in cdf]
        for c in range(last, len(self._uppers)):
            self._uppers[c] = math.inf
        self._lowers = [0.0] + [float(u) for u in cdf[:-1]]
        self._inv_q = [1.0 / q if q > 0 else 0.0 for q in self.probs]
        self._cost = [-math.log2(q) if q > 0 else 0.0 for q in self.probs]
        self.degenerate = nonzero.size == 1
        self._only = int(nonzero[0])
        self._r = 0.0
        self._entropy = 0.0
        self._primed = False
        self.setup_bits = 0

    def _prime(self, key: KeyStream):
        if not self._primed and not self.degenerate:
            self._r = key.take_int(PRIME_BITS) / 2.0**PRIME_BITS
            self.setup_bits += PRIME_BITS
        self._primed = True

    def draw(self, key: KeyStream) -> EncodingClass:
        classes, _ = self.draw_many(key, 1)
        return EncodingClass(int(classes[0]))

    def draw_many(self, key: KeyStream, count: int) -> tuple[np.ndarray, np.ndarray]:
        """``count`` classes and the selection bits each one consumed (setup excluded)."""
        if self.mode == "blockwise":
            return self._draw_blockwise(key, count)
        return self._draw_stream(key, count)

    def _draw_blockwise(self, key, count):
        self._prime(key)
        bits = key.take(SELECT_BITS * count).reshape(count, SELECT_BITS)
        words = (bits[:, 0].astype(np.int64) << 2 | bits[:, 1] << 1 | bits[:, 2]).tolist()
        cost = np.full(count, SELECT_BITS, dtype=np.int64)
        if self.degenerate:
            return np.full(count, self._only, dtype=np.int8), cost
        uppers, lowers, inv_q = self._uppers, self._lowers, self._inv_q
        r = self._r
        chosen = []
        push = chosen.append
        for w in words:
            u = (w + r) * 0.125
            c = bisect_right(uppers, u)
            r = (u - lowers[c]) * inv_q[c]
            if r >= 1.0:
                r = _BELOW_ONE
            elif r < 0.0:
                r = 0.0
            push(c)
        self._r = r
        return np.array(chosen, dtype=np.int8), cost

    def _draw_stream(self, key, count):
        out = np.empty(count, dtype=np.int8)
        used = np.zeros(count, dtype=np.int64)
        if self.degenerate:
            out[:] = self._only
            return out, used
        uppers, lowers, inv_q, cost = self._uppers, self._lowers, self._inv_q, self._cost
        r, ent = self._r, self._entropy
        for i in range(count):
            n = 0
            while ent < STREAM_PRECISION:
                r = (key.next_bit() + r) * 0.5
                ent += 1.0
                n += 1
            c = bisect_right(uppers, r)
            r = (r - lowers[c]) * inv_q[c]
            if r >= 1.0:
                r = _BELOW_ONE
            elif r < 0.0:
                r = 0.0
            ent -= cost[c]
            out[i] = c
            used[i] = n
        self._r, self._entropy = r, ent
        return out, used


def select_encoding(key: KeyStream, fractions: Sequence[float], mode: str = "blockwise") -> EncodingClass:
    """Draw the next class; repeated calls on one key continue the same selector."""
    return key.selector(fractions, mode).draw(key)


# -- twirl ------------------------------------------------------------------

def twirl_operator(bits: Sequence[int]) -> PauliOperator:
    """Hermitian Pauli from bit pairs: 00 I, 01 X, 10 Z, 11 Y (first qubit first)."""
    bits = [int(b) for b in bits]
    if len(bits) % 2:
        raise ValueError("twirl needs an even number of key bits")
    z = tuple(bits[0::2])
    x = tuple(bits[1::2])
    op = PauliOperator(z, x, 0)
    return PauliOperator(z, x, op.hermitian_phase)


def _flip_mask(bits: np.ndarray) -> np.ndarray:
    """X-part of each twirl as a 4-bit number (qubit 0 most significant)."""
    x = np.asarray(bits).reshape(-1, TWIRL_BITS)[:, 1::2].astype(np.int64)
    return x[:, 0] << 3 | x[:, 1] << 2 | x[:, 2] << 1 | x[:, 3]


def twirl(state: StateVector, stego_qubits: Sequence[int], key: KeyStream) -> StateVector:
    """Apply a keyed random Pauli to each of four stego qubits (8 key bits)."""
    stego_qubits = tuple(stego_qubits)
    if len(stego_qubits) != 4:
        raise ValueError(f"twirl acts on 4 stego qubits, got {len(stego_qubits)}")
    if any(not 0 <= q < state.n for q in stego_qubits):
        raise ValueError(f"stego qubits {stego_qubits} outside a {state.n}-qubit state")
    op = twirl_operator(key.take(TWIRL_BITS))
    z = [0] * state.n
    x = [0] * state.n
    for j, q in enumerate(stego_qubits):
        z[q], x[q] = op.z_bits[j], op.x_bits[j]
    full = PauliOperator(tuple(z), tuple(x), 0)
    return apply_pauli(state, PauliOperator(full.z_bits, full.x_bits, full.hermitian_phase))


untwirl = twirl


# -- configuration ----------------------------------------------------------

@lru_cache(maxsize=None)
def default_setup() -> tuple[StabilizerCode, CliffordMap, GateSequence, tuple[EncodingTable, ...]]:
    code = build_perfect_code()
    encoder = synthesize_encoder(code)
    return code, encoder, clifford_to_circuit(encoder), tuple(derived_encoding_tables(code, encoder))


def reference_tables() -> tuple[EncodingTable, ...]:
    """The printed single-error table and six double-error tables (misprint corrected)."""
    return (reference_single_error_table(), *reference_double_error_tables(corrected=True))


def tables_to_text(tables: Sequence[EncodingTable]) -> str:
    return "".join(f"## {t.name}\n{t.to_text()}" for t in tables)


def tables_from_text(text: str) -> tuple[EncodingTable, ...]:
    sections: list[tuple[str, list[str]]] = []
    for line in text.splitlines():
        if line.startswith("## "):
            sections.append((line[3:].strip(), []))
        elif line.strip() and not line.startswith("#"):
            if not sections:
                raise ValueError("table rows before the first '## name' header")
            sections[-1][1].append(line)
    return tuple(EncodingTable.from_text("\n".join(rows), name) for name, rows in sections)


@dataclass(frozen=True)
class FrameLookup:
    """Per-class arrays indexed by twirled nibble or by syndrome."""

    syndrome: np.ndarray  # [class, nibble] -> syndrome value
    error_index: np.ndarray  # [class, nibble] -> index into LOW_WEIGHT
    nibble: np.ndarray  # [class, syndrome] -> nibble


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything both parties agree on before any block is sent.

    ``cover_state`` is ``(theta, phi)`` of the cover qubit. ``tables`` is the
    single-error table followed by the six double-error tables; ``encoder``
    must be the Clifford those tables were derived from.
    """

    p: float
    cover_state: tuple[float, float] = (0.0, 0.0)
    mode: str = "frame"
    tables: tuple[EncodingTable, ...] | None = None
    code: StabilizerCode | None = None
    encoder: CliffordMap | None = None
    circuit: GateSequence | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "frame"):
            raise ValueError(f"mode must be 'exact' or 'frame', got {self.mode!r}")
        encoding_fractions(self.p)  # domain check
        code, encoder, circuit, tables = default_setup()
        if self.code is not None:
            code = self.code
        if self.tables is not None:
            tables = tuple(self.tables)
            try:
                encoder = self.encoder or encoder_from_table(code, tables[0])
            except SynthesisError as exc:
                raise ValueError(f"single-error table does not define an encoder: {exc}") from None
            circuit = self.circuit or clifford_to_circuit(encoder)
        elif self.encoder is not None:
            encoder = self.encoder
            circuit = self.circuit or clifford_to_circuit(encoder)
            tables = tuple(derived_encoding_tables(code, encoder))
        object.__setattr__(self, "code", code)
        object.__setattr__(self, "encoder", encoder)
        object.__setattr__(self, "circuit", circuit)
        object.__setattr__(self, "tables", tables)
        object.__setattr__(self, "cover_state", tuple(float(a) for a in self.cover_state))
        problems = self.problems()
        if problems:
            raise ValueError("invalid encoding tables: " + "; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if len(self.tables) != 7:
            return [f"need 7 tables, got {len(self.tables)}"]
        for i, table in enumerate(self.tables):
            report = validate_encoding_table(self.code, table, "single" if i == 0 else "double")
            out += [f"{table.name}: {f}" for f in report.failures]
            for row in table:
                if not self.encoder.inverse(row.encoded_error).equal_up_to_phase(row.swap_operator):
                    out.append(f"{table.name}: {row.swap_operator} is not the pre-image of {row.encoded_error}")
        return out

    @property
    def fractions(self) -> tuple[float, float, float]:
        return encoding_fractions(self.p)

    @property
    def cover(self) -> StateVector:
        return StateVector.qubit(*self.cover_state)

    def table_for(self, cls: EncodingClass) -> EncodingTable:
        if cls.table_index is None:
            raise ProtocolError("the trivial class has no encoding table")
        return self.tables[cls.table_index]

    @cached_property
    def frame_lookup(self) -> FrameLookup:
        synd = np.zeros((8, 16), dtype=np.int64)
        err = np.zeros((8, 16), dtype=np.int64)
        nib = np.zeros((8, 16), dtype=np.int64)
        for t, table in enumerate(self.tables, start=1):
            for row in table:
                synd[t, row.ancilla_index] = row.syndrome.value
                err[t, row.ancilla_index] = operator_index(row.encoded_error)
                nib[t, row.syndrome.value] = row.ancilla_index
        for a in (synd, err, nib):
            a.setflags(write=False)
        return FrameLookup(synd, err, nib)


# -- blocks -----------------------------------------------------------------

@dataclass(frozen=True)
class Codeword:
    """What goes over the channel: a 5-qubit state (exact) or a Pauli frame."""

    state: StateVector | None = None
    frame: PauliOperator | None = None
    stego_residual: float = 0.0  # probability of a 1 on S before transmission


@dataclass(frozen=True)
class BlockRecord:
    index: int
    encoding_class: EncodingClass
    syndrome: int | None  # None when the codeword is a superposition of syndromes
    key_bits: int
    payload: object = None
    cover: StateVector | None = None

    def __post_init__(self):
        if self.encoding_class is EncodingClass.TRIVIAL:
            if self.syndrome not in (0, None) or self.payload is not None:
                raise ProtocolError("trivial block must carry syndrome 0000 and no payload")
        elif self.payload is None:
            raise ProtocolError("nontrivial block without payload")


class KeyRing:
    """One party's key material: selection and twirl substreams of a shared seed."""

    def __init__(self, seed: int, fractions: Sequence[float], key_mode: str = "blockwise"):
        self.select_key = KeyStream(seed, SELECT_STREAM)
        self.twirl_key = KeyStream(seed, TWIRL_STREAM)
        self.selector = EncodingSelector(fractions, key_mode)

    def select(self) -> EncodingClass:
        return self.selector.draw(self.select_key)

    @property
    def bits_consumed(self) -> int:
        return self.select_key.bits_consumed + self.twirl_key.bits_consumed


def _trivial_frame(n: int) -> PauliOperator:
    return PauliOperator.identity(n)


def alice_encode_block(payload, cls: EncodingClass, key: KeyStream, config: ProtocolConfig) -> Codeword:
    """Hide ``payload`` in one block using class ``cls`` (twirl bits come from ``key``).

    In exact mode ``payload`` is a 4-qubit :class:`StateVector`; in frame mode
    it is an int in 0..15. Trivial blocks ignore the payload and use no key.
    """
    cls = EncodingClass(cls)
    if config.mode == "frame":
        if cls is EncodingClass.TRIVIAL:
            return Codeword(frame=_trivial_frame(config.code.n))
        if not 0 <= int(payload) < 16:
            raise ValueError(f"frame payload {payload} is not a 4-bit value")
        flips = int(_flip_mask(key.take(TWIRL_BITS))[0])
        row = config.table_for(cls).by_ancilla_index(int(payload) ^ flips)
        return Codeword(frame=row.encoded_error)

    cover = config.cover
    if cls is EncodingClass.TRIVIAL:
        logical = StateVector.zero(4).tensor(cover)
        residual = 0.0
    else:
        if not isinstance(payload, StateVector) or payload.n != 4:
            raise ValueError("exact-mode payload must be a 4-qubit StateVector")
        full = twirl(payload, range(4), key).tensor(StateVector.zero(4)).tensor(cover)
        full = apply_syndrome_swap(full, config.table_for(cls), "forward")
        residual = one_probability(full, STEGO_QUBITS)
        if residual > S_REGISTER_TOL:
            raise ProtocolError(f"stego register not cleared by the swap (weight {residual:.3g} on nonzero values)")
        amps = full.amplitudes[:32]
        logical = StateVector(5, amps / np.linalg.norm(amps))
    return Codeword(state=apply_gates(logical, config.circuit), stego_residual=residual)


def bob_decode_block(codeword: Codeword, keys: KeyRing, config: ProtocolConfig,
                     index: int = 0) -> tuple[object, BlockRecord]:
    """Recover the payload; the class is re-derived from Bob's own key."""
    before = keys.bits_consumed
    cls = keys.select()
    if config.mode == "frame":
        if codeword.frame is None:
            raise ValueError("frame mode needs a Pauli-frame codeword")
        s = syndrome_of(config.code, codeword.frame).value
        if cls is EncodingClass.TRIVIAL:
            if s != 0:
                raise ChannelCorruptionError(f"syndrome {s:04b} on a block Bob expects to be clean")
            return None, BlockRecord(index, cls, 0, keys.bits_consumed - before)
        row = config.table_for(cls).by_syndrome(s)
        if not row.encoded_error.equal_up_to_phase(codeword.frame):
            raise ChannelCorruptionError(f"{codeword.frame} is not in table {config.table_for(cls).name}")
        payload = row.ancilla_index ^ int(_flip_mask(keys.twirl_key.take(TWIRL_BITS))[0])
        return payload, BlockRecord(index, cls, s, keys.bits_consumed - before, payload)

    if codeword.state is None:
        raise ValueError("exact mode needs a state codeword")
    logical = apply_gates(codeword.state, config.circuit.inverse())
    if cls is EncodingClass.TRIVIAL:
        anc, cover = split_product(logical, 4)
        if one_probability(anc, range(4)) > S_REGISTER_TOL:
            raise ChannelCorruptionError("nonzero syndrome on a block Bob expects to be clean")
        return None, BlockRecord(index, cls, 0, keys.bits_consumed - before, cover=cover)
    full = StateVector.zero(4).tensor(logical)
    full = apply_syndrome_swap(full, config.table_for(cls), "inverse")
    stego, rest = split_product(full, 4)
    anc, cover = split_product(rest, 4)
    if one_probability(anc, range(4)) > S_REGISTER_TOL:
        raise ChannelCorruptionError("ancillas not returned to |0000>")
    payload = untwirl(stego, range(4), keys.twirl_key)
    return payload, BlockRecord(index, cls, None, keys.bits_consumed - before, payload, cover)


def syndrome_probabilities(state: StateVector, code: StabilizerCode) -> np.ndarray:
    """Outcome distribution of measuring all four generators on a codeword state."""
    out = np.zeros(N_SYNDROMES)
    psi = state.amplitudes
    for pattern in range(N_SYNDROMES):
        bits = [(pattern >> (3 - j)) & 1 for j in range(4)]
        proj = psi.copy()
        for j, b in enumerate(bits):
            gproj = apply_pauli(StateVector(state.n, proj), code.generators[j]).amplitudes
            proj = (proj + (-1) ** b * gproj) / 2
        out[code.label_from_bits(bits).value] = float(np.vdot(proj, proj).real)
    return out / out.sum()


# -- streams ----------------------------------------------------------------

@dataclass
class Transcript:
    p: float
    seed: int
    mode: str
    key_mode: str
    classes: np.ndarray
    syndromes: np.ndarray
    key_bits: np.ndarray
    error_index: np.ndarray | None = None
    setup_bits: int = 0
    payload_ok: np.ndarray | None = None
    fidelities: np.ndarray | None = None
    stego_residuals: np.ndarray | None = None

    @property
    def blocks(self) -> int:
        return int(self.classes.size)

    @property
    def nontrivial(self) -> int:
        return int(np.count_nonzero(self.classes))

    @property
    def payload_qubits(self) -> int:
        return 4 * self.nontrivial

    @property
    def payload_per_qubit(self) -> float:
        return self.payload_qubits / (5 * self.blocks)

    @property
    def key_bits_total(self) -> int:
        return int(self.key_bits.sum()) + self.setup_bits

    @property
    def key_bits_per_qubit(self) -> float:
        return self.key_bits_total / (5 * self.blocks)

    @property
    def twirl_bits_total(self) -> int:
        return TWIRL_BITS * self.nontrivial

    @property
    def selection_bits_total(self) -> int:
        """Bits spent choosing classes, setup included; the entropy-limited part of the key."""
        return self.key_bits_total - self.twirl_bits_total

    @property
    def selection_bits_per_qubit(self) -> float:
        return self.selection_bits_total / (5 * self.blocks)

    def syndrome_string(self) -> str:
        """All syndromes concatenated, four characters per block."""
        return "".join(f"{int(s):04b}" for s in self.syndromes)

    def records(self) -> Iterator[BlockRecord]:
        for i in range(self.blocks):
            cls = EncodingClass(int(self.classes[i]))
            payload = None if cls is EncodingClass.TRIVIAL else "ok"
            yield BlockRecord(i, cls, int(self.syndromes[i]), int(self.key_bits[i]), payload)

    def summary(self) -> dict[str, float]:
        out = {
            "blocks": self.blocks,
            "nontrivial_blocks": self.nontrivial,
            "payload_per_qubit": self.payload_per_qubit,
            "key_bits_per_qubit": self.key_bits_per_qubit,
            "selection_bits_per_qubit": self.selection_bits_per_qubit,
            "setup_bits": self.setup_bits,
        }
        if self.payload_ok is not None:
            out["payload_errors"] = int(np.count_nonzero(~self.payload_ok))
        if self.fidelities is not None and self.fidelities.size:
            out["min_fidelity"] = float(self.fidelities.min())
        return out

    def to_text(self) -> str:
        head = (f"# p={self.p!r} seed={self.seed} mode={self.mode} key_mode={self.key_mode} "
                f"blocks={self.blocks} setup_bits={self.setup_bits}\n"
                "# block_index\tclass\tsyndrome\tkey_bits\n")
        names = [c.label for c in EncodingClass]
        body = "".join(
            f"{i}\t{names[c]}\t{s:04b}\t{k}\n"
            for i, (c, s, k) in enumerate(zip(self.classes.tolist(), self.syndromes.tolist(), self.key_bits.tolist()))
        )
        return head + body

    @classmethod
    def from_text(cls, text: str) -> Transcript:
        meta: dict[str, str] = {}
        classes, syndromes, key_bits = [], [], []
        for line in text.splitlines():
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = v
                continue
            if not line.strip():
                continue
            idx, c, s, k = line.split("\t")
            if int(idx) != len(classes):
                raise ValueError(f"block index {idx} out of sequence")
            classes.append(EncodingClass.from_label(c).value)
            syndromes.append(int(s, 2))
            key_bits.append(int(k))
        return cls(
            p=float(meta.get("p", "nan")), seed=int(meta.get("seed", 0)), mode=meta.get("mode", "frame"),
            key_mode=meta.get("key_mode", "blockwise"), classes=np.array(classes, dtype=np.int8),
            syndromes=np.array(syndromes, dtype=np.int64), key_bits=np.array(key_bits, dtype=np.int64),
            setup_bits=int(meta.get("setup_bits", 0)),
        )


def _payload_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(PAYLOAD_STREAM,)))


def _forced(cls: EncodingClass | int, m: int):
    return np.full(m, int(cls), dtype=np.int8), np.zeros(m, dtype=np.int64)


def run_stream(M: int, config: ProtocolConfig, seed: int = 0, key_mode: str = "blockwise",
               decode: bool = True, force_class: EncodingClass | None = None) -> Transcript:
    """Send ``M`` blocks from Alice to Bob over a noiseless channel.

    ``decode=False`` skips Bob (enough for channel statistics). ``force_class``
    bypasses key-driven selection; it exists for negative controls.
    """
    if M < 1:
        raise ValueError(f"need at least one block, got {M}")
    if config.mode == "frame":
        return _run_frame(M, config, seed, key_mode, decode, force_class)
    return _run_exact(M, config, seed, key_mode, force_class)


def _run_frame(M, config, seed, key_mode, decode, force_class):
    fractions = config.fractions
    alice = KeyRing(seed, fractions, key_mode)
    if force_class is None:
        classes, sel_bits = alice.selector.draw_many(alice.select_key, M)
    else:
        classes, sel_bits = _forced(force_class, M)
    nt = classes != 0
    n_nt = int(np.count_nonzero(nt))
    flips = _flip_mask(alice.twirl_key.take(TWIRL_BITS * n_nt))
    payload = _payload_rng(seed).integers(0, 16, size=n_nt)
    twirled = payload ^ flips
    lut = config.frame_lookup
    cls_nt = classes[nt].astype(np.int64)
    syndromes = np.zeros(M, dtype=np.int64)
    error_index = np.zeros(M, dtype=np.int64)
    syndromes[nt] = lut.syndrome[cls_nt, twirled]
    error_index[nt] = lut.error_index[cls_nt, twirled]
    key_bits = sel_bits + TWIRL_BITS * nt
    payload_ok = None
    if decode:
        bob = KeyRing(seed, fractions, key_mode)
        if force_class is None:
            b_classes, b_bits = bob.selector.draw_many(bob.select_key, M)
        else:
            b_classes, b_bits = _forced(force_class, M)
        if not np.array_equal(b_classes, classes) or not np.array_equal(b_bits, sel_bits):
            raise ProtocolError("Bob's key-derived classes differ from Alice's")
        if syndromes[~nt].any():
            raise ChannelCorruptionError("nonzero syndrome on a trivial block")
        b_flips = _flip_mask(bob.twirl_key.take(TWIRL_BITS * n_nt))
        recovered = lut.nibble[cls_nt, syndromes[nt]] ^ b_flips
        payload_ok = recovered == payload
        if bob.bits_consumed != alice.bits_consumed:
            raise ProtocolError("key consumption differs between Alice and Bob")
    return Transcript(config.p, seed, "frame", key_mode, classes, syndromes, key_bits, error_index,
                      alice.selector.setup_bits, payload_ok)


def _run_exact(M, config, seed, key_mode, force_class):
    fractions = config.fractions
    alice = KeyRing(seed, fractions, key_mode)
    bob = KeyRing(seed, fractions, key_mode)
    prng = _payload_rng(seed)
    eve_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(EVE_STREAM,)))
    if force_class is not None:
        alice.selector = bob.selector = _ForcedSelector(force_class)
    classes = np.zeros(M, dtype=np.int8)
    syndromes = np.zeros(M, dtype=np.int64)
    key_bits = np.zeros(M, dtype=np.int64)
    fids, residuals = [], []
    for i in range(M):
        start = alice.bits_consumed
        cls = alice.select()
        payload = StateVector.random(4, prng)
        cw = alice_encode_block(payload, cls, alice.twirl_key, config)
        out, record = bob_decode_block(cw, bob, config, i)
        if record.encoding_class != cls or bob.bits_consumed != alice.bits_consumed:
            raise ProtocolError(f"block {i}: key use differs between Alice and Bob")
        classes[i] = cls
        key_bits[i] = alice.bits_consumed - start
        if cls is not EncodingClass.TRIVIAL:
            syndromes[i] = eve_rng.choice(N_SYNDROMES, p=syndrome_probabilities(cw.state, config.code))
            fids.append(fidelity(out, payload))
            residuals.append(cw.stego_residual)
    return Transcript(config.p, seed, "exact", key_mode, classes, syndromes, key_bits,
                      None, alice.selector.setup_bits, None, np.array(fids), np.array(residuals))


class _ForcedSelector:
    setup_bits = 0

    def __init__(self, cls):
        self.cls = EncodingClass(cls)

    def draw(self, key):
        return self.cls


__all__ = [
    "BlockRecord", "ChannelCorruptionError", "Codeword", "EncodingClass", "EncodingSelector",
    "KeyRing", "KeyStream", "ProtocolConfig", "ProtocolError", "Transcript", "alice_encode_block",
    "bob_decode_block", "class_probabilities", "default_setup", "reference_tables", "run_stream",
    "select_encoding", "syndrome_probabilities", "tables_from_text", "tables_to_text", "twirl",
    "twirl_operator", "untwirl", "LOW_WEIGHT",
]
