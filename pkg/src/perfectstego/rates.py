"""Closed-form rate and key-consumption formulas for the perfect-code scheme.

All rates are per physical qubit unless the name says otherwise; ``n_avg``
and ``shannon_entropy_rate`` are per five-qubit block.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass
from math import comb, lgamma, log, log2
from typing import Iterable, Sequence

import numpy as np

P_MAX = 0.5  # Q0 hits zero here
P_ASYMPTOTIC_MAX = 0.2  # log2(1 - 5p) needs p < 1/5
DEFAULT_DELTA = 0.005


class DomainError(ValueError):
    """Parameter outside the range where a formula is meaningful."""


def _check_block_domain(p: float):
    if not 0.0 <= p <= P_MAX:
        raise DomainError(
            f"p = {p} outside [0, {P_MAX}]: the trivial-encoding fraction Q0 = p0 - (p1 + p2)/15 "
            "must stay non-negative"
        )


def _check_asymptotic_domain(p: float):
    if not 0.0 < p < P_ASYMPTOTIC_MAX:
        raise DomainError(f"p = {p} outside (0, {P_ASYMPTOTIC_MAX}): log2(1 - 5p) is undefined")


def block_probs(p: float) -> tuple[float, float, float]:
    """Probabilities of no error, one error and two errors on a block."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p = {p} outside [0, 1]")
    return (1 - p) ** 5, 5 * p * (1 - p) ** 4, 10 * p**2 * (1 - p) ** 3


def encoding_fractions(p: float) -> tuple[float, float, float]:
    """How often to use the trivial, single-error and double-error classes.

    Chosen so that the emitted syndromes and weights match the depolarizing
    channel up to weight two. The fractions sum to ``p0 + p1 + p2``, not 1.
    """
    _check_block_domain(p)
    p0, p1, p2 = block_probs(p)
    q0 = p0 - (p1 + p2) / 15
    return max(q0, 0.0), 16 / 15 * p1, 16 / 15 * p2


def n_avg(p: float) -> float:
    """Average stego qubits per block, ``4 (Q1 + Q2)``."""
    _, q1, q2 = encoding_fractions(p)
    return 4 * (q1 + q2)


def n_avg_from_block_probs(p: float) -> float:
    """The same quantity written as ``(64/15)(p1 + p2)``."""
    _check_block_domain(p)
    _, p1, p2 = block_probs(p)
    return 64 / 15 * (p1 + p2)


def key_rate_blockwise(p: float) -> float:
    """Key bits per qubit when every block is encoded on its own."""
    _, q1, q2 = encoding_fractions(p)
    return (3 + 8 * (q1 + q2)) / 5


def _xlog2x(x: float) -> float:
    return x * log2(x) if x > 0 else 0.0


@dataclass(frozen=True)
class KeyRate:
    as_printed: float
    normalized: float


def key_rate_asymptotic(p: float) -> KeyRate:
    """Entropy-limited key usage per qubit.

    ``as_printed`` plugs the raw fractions into the entropy formula;
    ``normalized`` is the entropy of the eight-way class distribution after
    dividing by ``Q0 + Q1 + Q2``.
    """
    q0, q1, q2 = encoding_fractions(p)
    printed = -_xlog2x(q0) - _xlog2x(q1) - (q2 * log2(q2 / 6) if q2 > 0 else 0.0)
    total = q0 + q1 + q2
    probs = [q0 / total, q1 / total] + [q2 / (6 * total)] * 6
    normalized = -sum(_xlog2x(x) for x in probs)
    return KeyRate(printed / 5 + 0.0, normalized / 5 + 0.0)


def shannon_entropy_rate(p: float) -> float:
    """Small-p approximation of the per-block syndrome entropy.

    ``-(1-5p) log2(1-5p) - 5p log2(5p) + 5p log2(15)``.
    """
    if p == 0:
        return 0.0
    _check_asymptotic_domain(p)
    a = 1 - 5 * p
    return -a * log2(a) - 5 * p * log2(5 * p) + 5 * p * log2(15)


def shannon_entropy_exact(p: float) -> float:
    """Per-block entropy with all error mass spread over the 15 nonzero syndromes."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p = {p} outside [0, 1]")
    p0 = (1 - p) ** 5
    rest = 1 - p0
    return -_xlog2x(p0) - (rest * log2(rest / 15) if rest > 0 else 0.0)


def r_typ(p: float) -> float:
    """Typical-sequence stego rate per qubit."""
    if p == 0:
        return 0.0
    _check_asymptotic_domain(p)
    return -log2(1 - 5 * p) / 5 + p * log2(3 * (1 - 5 * p) / p)


def r_enc(p: float, delta: float = DEFAULT_DELTA) -> float:
    """Stego rate per qubit of the weight-window encoding with spread ``delta``."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta = {delta} outside (0, 1)")
    if p == 0:
        return 0.0
    _check_asymptotic_domain(p)
    a = 1 - 5 * p
    b = 5 * p
    return -log2(a) / 5 + p * log2(a * b**delta / (b * a**delta))


def log2_window_strings(p: float, blocks: float, delta: float = DEFAULT_DELTA) -> float:
    """``log2 C`` for ``M = blocks`` with the weight fixed at ``k = 5 M p (1 - delta)``.

    ``k`` is treated as a real number. Dividing by ``5 M`` gives :func:`r_enc`.
    """
    _check_asymptotic_domain(p)
    k = 5 * blocks * p * (1 - delta)
    return -k * log2(p / 3) + (k - blocks) * log2(1 - 5 * p) - k * log2(15)


def log2_weight_probability(p: float, blocks: int, k: int) -> float:
    """``log2 p_k`` for strings of weight ``k``, small-p form, including the ``15^k`` factor as printed."""
    _check_asymptotic_domain(p)
    if not 0 <= k <= blocks:
        raise DomainError(f"weight {k} outside [0, {blocks}]")
    log2_binom = (lgamma(blocks + 1) - lgamma(k + 1) - lgamma(blocks - k + 1)) / log(2)
    return log2_binom + k * log2(p / 3) + (blocks - k) * log2(1 - 5 * p) + k * log2(15)


@dataclass(frozen=True)
class RateParameters:
    p: float
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        _check_block_domain(self.p)
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta = {self.delta} outside (0, 1)")

    @property
    def block_probs(self) -> tuple[float, float, float]:
        return block_probs(self.p)

    @property
    def fractions(self) -> tuple[float, float, float]:
        return encoding_fractions(self.p)

    def row(self) -> dict[str, float]:
        """One CSV row of every rate at this ``p``."""
        navg = n_avg(self.p)
        return {
            "p": self.p,
            "n_avg": navg,
            "n_avg_per_qubit": navg / 5,
            "H": shannon_entropy_rate(self.p),
            "r_typ": r_typ(self.p),
            "r_enc": r_enc(self.p, self.delta),
            "K": key_rate_asymptotic(self.p).as_printed,
            "K_blockwise": key_rate_blockwise(self.p),
        }


RATE_COLUMNS = ("p", "n_avg", "n_avg_per_qubit", "H", "r_typ", "r_enc", "K", "K_blockwise")


def default_grid() -> np.ndarray:
    return np.round(np.arange(1, 101) * 1e-3, 12)


def rate_table(p_grid: Iterable[float], delta: float = DEFAULT_DELTA) -> list[dict[str, float]]:
    return [RateParameters(float(p), delta).row() for p in p_grid]


def format_rate_csv(rows: Sequence[dict[str, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RATE_COLUMNS)
    for row in rows:
        writer.writerow([f"{row[c]:.12g}" for c in RATE_COLUMNS])
    return buf.getvalue()


def write_atomic(path: str | os.PathLike, text: str):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_rate_csv(p_grid: Iterable[float], delta: float, path: str | os.PathLike) -> str:
    """Write the rate curves to ``path`` and return the CSV text."""
    text = format_rate_csv(rate_table(p_grid, delta))
    write_atomic(path, text)
    return text


__all__ = [
    "DomainError", "KeyRate", "RateParameters", "RATE_COLUMNS", "block_probs", "comb",
    "default_grid", "emit_rate_csv", "encoding_fractions", "format_rate_csv",
    "key_rate_asymptotic", "key_rate_blockwise", "log2_weight_probability",
    "log2_window_strings", "n_avg", "n_avg_from_block_probs", "r_enc", "r_typ",
    "rate_table", "shannon_entropy_exact", "shannon_entropy_rate", "write_atomic",
]
