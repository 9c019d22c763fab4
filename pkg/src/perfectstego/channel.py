"""Depolarizing-channel sampling and Eve's distinguishability tests."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .code import N_QUBITS, N_SYNDROMES, EncodingTable, StabilizerCode, build_perfect_code, syndrome_of
from .pauli import PauliOperator, low_weight_errors
from .rates import DomainError, block_probs, encoding_fractions

LOW_WEIGHT = tuple(low_weight_errors(N_QUBITS, 2))  # identity, 15 singles, 90 doubles
MIN_EXPECTED = 5.0


def _mask_key(z_mask: int, x_mask: int) -> int:
    return (z_mask << N_QUBITS) | x_mask


def _build_index() -> np.ndarray:
    index = np.full(1 << (2 * N_QUBITS), -1, dtype=np.int64)
    for i, op in enumerate(LOW_WEIGHT):
        index[_mask_key(op.z_mask, op.x_mask)] = i
    return index


_LOW_WEIGHT_INDEX = _build_index()


def operator_index(op: PauliOperator) -> int:
    """Position of ``op`` (phase ignored) in :data:`LOW_WEIGHT`, or -1 for weight >= 3."""
    return int(_LOW_WEIGHT_INDEX[_mask_key(op.z_mask, op.x_mask)])


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    weights = 1 << np.arange(bits.shape[1] - 1, -1, -1)
    return bits.astype(np.int64) @ weights


def operator_indices(z: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`operator_index` for ``(N, 5)`` bit arrays."""
    return _LOW_WEIGHT_INDEX[(_pack_rows(z) << N_QUBITS) | _pack_rows(x)]


def _check_p(p: float):
    if not 0.0 <= p <= 0.75:
        raise DomainError(f"p = {p} outside [0, 3/4]")


def sample_depolarizing(p: float, size: int, rng: np.random.Generator, n: int = N_QUBITS):
    """``size`` i.i.d. depolarizing frames as ``(z, x)`` uint8 arrays of shape ``(size, n)``."""
    _check_p(p)
    hit = rng.random((size, n)) < p
    letter = rng.integers(0, 3, size=(size, n))  # 0: X, 1: Y, 2: Z
    z = (hit & (letter >= 1)).astype(np.uint8)
    x = (hit & (letter <= 1)).astype(np.uint8)
    return z, x


def depolarize_frame(p: float, rng: np.random.Generator, n: int = N_QUBITS) -> PauliOperator:
    """One depolarizing error on ``n`` qubits, as a Hermitian Pauli."""
    z, x = sample_depolarizing(p, 1, rng, n)
    op = PauliOperator(tuple(int(b) for b in z[0]), tuple(int(b) for b in x[0]), 0)
    return PauliOperator(op.z_bits, op.x_bits, op.hermitian_phase)


@dataclass(frozen=True)
class ErrorDistribution:
    """Probabilities over the 106 sign-free errors of weight at most two."""

    probs: np.ndarray
    operators: tuple[PauliOperator, ...] = LOW_WEIGHT

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (len(self.operators),):
            raise ValueError(f"{probs.size} probabilities for {len(self.operators)} operators")
        if (probs < 0).any():
            raise ValueError("negative probability")
        if abs(probs.sum() - 1) > 1e-12:
            raise ValueError(f"probabilities sum to {probs.sum()!r}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return len(self.operators)

    def __getitem__(self, op: PauliOperator) -> float:
        i = operator_index(op)
        if i < 0:
            return 0.0
        return float(self.probs[i])

    def as_dict(self) -> dict[str, float]:
        return {op.letters: float(q) for op, q in zip(self.operators, self.probs)}

    def syndrome_marginal(self, code: StabilizerCode | None = None) -> np.ndarray:
        code = code or build_perfect_code()
        out = np.zeros(N_SYNDROMES)
        for op, q in zip(self.operators, self.probs):
            out[syndrome_of(code, op).value] += q
        return out


def truncated_error_distribution(p: float) -> ErrorDistribution:
    """Depolarizing channel on a block, conditioned on weight at most two."""
    encoding_fractions(p)  # domain check
    p0, p1, p2 = block_probs(p)
    norm = p0 + p1 + p2
    per_weight = (p0 / norm, p1 / (15 * norm), p2 / (90 * norm))
    return ErrorDistribution(np.array([per_weight[op.weight] for op in LOW_WEIGHT]))


def stego_error_distribution(p: float, tables: Sequence[EncodingTable]) -> ErrorDistribution:
    """Exact distribution of the error the scheme transmits.

    Each class is picked with its normalized fraction; within a nontrivial
    class the twirl makes all 16 rows equally likely.
    """
    if len(tables) != 7:
        raise ValueError(f"need the single table and six double tables, got {len(tables)}")
    q0, q1, q2 = encoding_fractions(p)
    norm = q0 + q1 + q2
    weights = [q1 / norm] + [q2 / (6 * norm)] * 6
    probs = np.zeros(len(LOW_WEIGHT))
    probs[0] += q0 / norm
    for w, table in zip(weights, tables):
        for row in table:
            i = operator_index(row.encoded_error)
            if i < 0:
                raise ValueError(f"table {table.name} emits {row.encoded_error}, weight > 2")
            probs[i] += w / len(table)
    return ErrorDistribution(probs)


def residual_mass(p: float) -> float:
    """Channel weight on errors of weight three or more, which the scheme never emits."""
    return 1.0 - sum(block_probs(p))


@dataclass
class SyndromeHistogram:
    counts: np.ndarray = field(default_factory=lambda: np.zeros(N_SYNDROMES, dtype=np.int64))

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (N_SYNDROMES,):
            raise ValueError(f"need {N_SYNDROMES} counts, got shape {self.counts.shape}")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: SyndromeHistogram) -> SyndromeHistogram:
        return SyndromeHistogram(self.counts + other.counts)

    def frequencies(self) -> np.ndarray:
        if self.total == 0:
            raise ValueError("empty histogram")
        return self.counts / self.total


def syndrome_histogram(source, code: StabilizerCode | None = None) -> SyndromeHistogram:
    """Histogram of syndromes from a transcript, an array of syndrome values or Pauli errors."""
    syndromes = getattr(source, "syndromes", None)
    if syndromes is None:
        items = list(source)
        if items and isinstance(items[0], PauliOperator):
            code = code or build_perfect_code()
            syndromes = [syndrome_of(code, op).value for op in items]
        else:
            syndromes = items
    values = np.asarray(syndromes, dtype=np.int64)
    return SyndromeHistogram(np.bincount(values, minlength=N_SYNDROMES))


def operator_histogram(error_index: np.ndarray) -> np.ndarray:
    """Counts over :data:`LOW_WEIGHT` from an array of operator indices."""
    error_index = np.asarray(error_index, dtype=np.int64)
    if (error_index < 0).any():
        raise ValueError("stream contains errors outside the weight <= 2 set")
    return np.bincount(error_index, minlength=len(LOW_WEIGHT))


def _as_probs(obj) -> np.ndarray:
    if isinstance(obj, ErrorDistribution):
        return obj.probs
    if isinstance(obj, SyndromeHistogram):
        return obj.frequencies()
    arr = np.asarray(obj, dtype=float)
    total = arr.sum()
    if total <= 0:
        raise ValueError("empty histogram")
    return arr / total


def tv_distance(a, b) -> float:
    """Half the L1 distance between two normalized distributions over the same cells."""
    pa, pb = _as_probs(a), _as_probs(b)
    if pa.shape != pb.shape:
        raise ValueError(f"supports differ: {pa.shape} vs {pb.shape}")
    return float(0.5 * np.abs(pa - pb).sum())


@dataclass(frozen=True)
class ChiSquaredResult:
    statistic: float
    p_value: float
    dof: int

    def __iter__(self):
        return iter((self.statistic, self.p_value))


def _merge_cells(observed: np.ndarray, expected: np.ndarray, min_expected: float):
    """Pool cells whose expected count is below ``min_expected``.

    The pooled cell is kept if it clears the threshold itself, otherwise it is
    folded into the smallest remaining cell.
    """
    small = expected < min_expected
    if not small.any():
        return observed, expected
    obs, exp = list(observed[~small]), list(expected[~small])
    pooled_o, pooled_e = observed[small].sum(), expected[small].sum()
    if pooled_e >= min_expected or not exp:
        obs.append(pooled_o)
        exp.append(pooled_e)
    else:
        k = int(np.argmin(exp))
        obs[k] += pooled_o
        exp[k] += pooled_e
    return np.array(obs, dtype=float), np.array(exp, dtype=float)


def chi_squared_test(observed, expected, min_expected: float = MIN_EXPECTED) -> ChiSquaredResult:
    """Pearson goodness of fit of ``observed`` counts against ``expected`` probabilities.

    Cells with zero expected probability and zero counts are dropped; a count
    in a zero-probability cell gives an infinite statistic. Cells expecting
    fewer than ``min_expected`` counts are pooled before testing.
    """
    obs = np.asarray(observed.counts if isinstance(observed, SyndromeHistogram) else observed, dtype=float)
    probs = np.asarray(expected.probs if isinstance(expected, ErrorDistribution) else expected, dtype=float)
    if obs.shape != probs.shape:
        raise ValueError(f"supports differ: {obs.shape} vs {probs.shape}")
    n = obs.sum()
    if n <= 0:
        raise ValueError("empty histogram")
    if probs.sum() <= 0:
        raise ValueError("degenerate expected distribution: no mass")
    probs = probs / probs.sum()
    if (obs[probs == 0] > 0).any():
        return ChiSquaredResult(float("inf"), 0.0, int((probs > 0).sum()) - 1)
    keep = probs > 0
    o, e = _merge_cells(obs[keep], n * probs[keep], min_expected)
    if o.size < 2:
        raise ValueError("degenerate expected distribution: fewer than two cells after merging")
    statistic = float(((o - e) ** 2 / e).sum())
    dof = o.size - 1
    return ChiSquaredResult(statistic, float(stats.chi2.sf(statistic, dof)), dof)


@dataclass
class EveReport:
    p: float
    n: int
    seed: int | None
    granularity: str
    labels: list[str]
    observed: np.ndarray
    expected: np.ndarray
    tv: float
    statistic: float
    p_value: float
    dof: int
    residual_weight3_mass: float

    @property
    def residuals(self) -> np.ndarray:
        """Pearson residuals ``(O - E) / sqrt(E)``; zero where nothing is expected or seen."""
        with np.errstate(divide="ignore", invalid="ignore"):
            r = (self.observed - self.expected) / np.sqrt(self.expected)
        r[(self.expected == 0) & (self.observed == 0)] = 0.0
        return r

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# p={self.p!r}, N={self.n}, seed={self.seed}, granularity={self.granularity}\n")
        buf.write(f"# tv={self.tv:.12g}, chi2={self.statistic:.12g}, dof={self.dof}, "
                  f"p_value={self.p_value:.12g}, residual_weight3_mass={self.residual_weight3_mass:.12g}\n")
        writer = csv.writer(buf, lineterminator="\n")
        first = "syndrome" if self.granularity == "syndrome" else "operator"
        writer.writerow([first, "observed", "expected", "residual"])
        for label, o, e, r in zip(self.labels, self.observed, self.expected, self.residuals):
            writer.writerow([label, int(o), f"{e:.12g}", f"{r:.12g}"])
        return buf.getvalue()


def eve_report(stream, p: float, granularity: str = "syndrome", seed: int | None = None,
               code: StabilizerCode | None = None) -> EveReport:
    """Compare a stego stream against the truncated depolarizing channel at ``p``.

    ``stream`` is a transcript (anything with ``syndromes`` and, for operator
    granularity, ``error_index`` arrays).
    """
    reference = truncated_error_distribution(p)
    if granularity == "syndrome":
        observed = syndrome_histogram(stream).counts.astype(float)
        probs = reference.syndrome_marginal(code)
        labels = [f"{s:04b}" for s in range(N_SYNDROMES)]
    elif granularity == "operator":
        error_index = getattr(stream, "error_index", stream)
        observed = operator_histogram(error_index).astype(float)
        probs = reference.probs
        labels = [op.letters for op in LOW_WEIGHT]
    else:
        raise ValueError(f"granularity must be 'syndrome' or 'operator', got {granularity!r}")
    n = int(observed.sum())
    if n == 0:
        raise ValueError("empty stream")
    try:
        result = chi_squared_test(observed, probs)
    except ValueError:
        # point-mass reference (p = 0): the test degenerates to an exact match check
        ok = bool((observed[probs == 0] == 0).all())
        result = ChiSquaredResult(0.0 if ok else float("inf"), 1.0 if ok else 0.0, 0)
    return EveReport(
        p=p, n=n, seed=seed, granularity=granularity, labels=labels,
        observed=observed, expected=n * probs, tv=tv_distance(observed, probs),
        statistic=result.statistic, p_value=result.p_value, dof=result.dof,
        residual_weight3_mass=residual_mass(p),
    )
