import numpy as np
import pytest

from perfectstego.channel import (
    LOW_WEIGHT,
    ChiSquaredResult,
    ErrorDistribution,
    SyndromeHistogram,
    chi_squared_test,
    depolarize_frame,
    eve_report,
    operator_histogram,
    operator_index,
    operator_indices,
    residual_mass,
    sample_depolarizing,
    stego_error_distribution,
    syndrome_histogram,
    truncated_error_distribution,
    tv_distance,
)
from perfectstego.code import syndrome_of
from perfectstego.pauli import PauliOperator
from perfectstego.protocol import EncodingClass, ProtocolConfig, run_stream
from perfectstego.rates import DomainError, block_probs


@pytest.fixture(scope="module")
def tables():
    return ProtocolConfig(0.1).tables


# -- sampling ---------------------------------------------------------------

def test_p0_gives_identity(rng):
    z, x = sample_depolarizing(0.0, 1000, rng)
    assert not z.any() and not x.any()
    assert depolarize_frame(0.0, rng).weight == 0


def test_depolarizing_weight_frequencies(rng):
    z, x = sample_depolarizing(0.1, 10**6, rng)
    w = (z | x).sum(axis=1)
    for k, want in ((0, 0.59049), (2, 0.0729)):
        f = np.mean(w == k)
        assert abs(f - want) < 3 * np.sqrt(want * (1 - want) / 1e6)
    # X, Y, Z equally likely on a hit
    hit = (z | x).astype(bool)
    letters = (2 * z + x)[hit]  # 1: X, 3: Y, 2: Z
    counts = np.bincount(letters, minlength=4)[1:]
    assert chi_squared_test(counts, [1, 1, 1]).p_value > 1e-3


def test_depolarize_frame_is_hermitian(rng):
    for _ in range(50):
        op = depolarize_frame(0.5, rng)
        m = op.to_matrix()
        np.testing.assert_allclose(m, m.conj().T)


def test_sampling_domain():
    with pytest.raises(DomainError):
        sample_depolarizing(0.9, 1, np.random.default_rng())


def test_operator_indexing():
    assert len(LOW_WEIGHT) == 106
    for i, op in enumerate(LOW_WEIGHT):
        assert operator_index(op) == i
    assert operator_index(PauliOperator.from_label("XXXII")) == -1
    z = np.array([[op.z_bits[j] for j in range(5)] for op in LOW_WEIGHT], dtype=np.uint8)
    x = np.array([[op.x_bits[j] for j in range(5)] for op in LOW_WEIGHT], dtype=np.uint8)
    np.testing.assert_array_equal(operator_indices(z, x), np.arange(106))


# -- distributions ----------------------------------------------------------

def test_truncated_distribution_entries():
    d = truncated_error_distribution(0.1)
    assert len(d) == 106
    assert d[PauliOperator.from_label("IIYII")] == pytest.approx(0.32805 / (15 * 0.99144), rel=1e-12)
    assert d[PauliOperator.from_label("IIYII")] == pytest.approx(0.0220588235, abs=1e-10)
    assert d[PauliOperator.from_label("XIIIZ")] == pytest.approx(0.0729 / (90 * 0.99144), rel=1e-12)
    assert d[PauliOperator.from_label("XXXII")] == 0.0
    assert d.probs.sum() == pytest.approx(1.0)


def test_truncated_distribution_monte_carlo(rng):
    z, x = sample_depolarizing(0.1, 10**6, rng)
    idx = operator_indices(z, x)
    idx = idx[idx >= 0]
    counts = operator_histogram(idx)
    d = truncated_error_distribution(0.1)
    assert chi_squared_test(counts, d.probs).p_value > 1e-3
    singles = np.array([op.weight == 1 for op in LOW_WEIGHT])
    per_single = counts[singles].sum() / (15 * idx.size)
    q = 0.32805 / (15 * 0.99144)
    assert abs(per_single - q) < 3 * np.sqrt(q * (1 - q) / (15 * idx.size))


def test_truncated_point_mass_at_zero():
    d = truncated_error_distribution(0.0)
    assert d.probs[0] == 1.0 and d.probs[1:].sum() == 0.0


def test_error_distribution_validation():
    with pytest.raises(ValueError):
        ErrorDistribution(np.ones(5) / 5)
    with pytest.raises(ValueError):
        ErrorDistribution(np.full(106, 0.5))


@pytest.mark.parametrize("p", [0.0, 0.001, 0.01, 0.05, 0.1, 0.2, 0.5])
def test_stego_distribution_equals_truncated(p, tables):
    np.testing.assert_allclose(
        stego_error_distribution(p, tables).probs, truncated_error_distribution(p).probs, atol=1e-15)


def test_operator_level_adds_nothing_beyond_syndrome(code, tables):
    # within every syndrome, the stego scheme spreads mass over operators exactly as the channel does
    stego = stego_error_distribution(0.07, tables)
    chan = truncated_error_distribution(0.07)
    synd = np.array([syndrome_of(code, op).value for op in LOW_WEIGHT])
    for s in range(16):
        sel = synd == s
        a = stego.probs[sel] / stego.probs[sel].sum()
        b = chan.probs[sel] / chan.probs[sel].sum()
        np.testing.assert_allclose(a, b, atol=1e-14)
        # the trivial syndrome holds only the identity; every other one a single error and six doubles
        assert sel.sum() == (1 if s == 0 else 7)


def test_syndrome_marginal(code):
    p0, p1, p2 = block_probs(0.1)
    z = p0 + p1 + p2
    m = truncated_error_distribution(0.1).syndrome_marginal(code)
    assert m[0] == pytest.approx(p0 / z)
    np.testing.assert_allclose(m[1:], (p1 + p2) / (15 * z))


def test_residual_mass():
    assert residual_mass(0.05) == pytest.approx(0.001158, abs=5e-7)
    assert residual_mass(0.0) == 0.0


# -- histograms and tests ---------------------------------------------------

def test_histogram_sources(code):
    ident = [PauliOperator.identity(5)] * 10
    h = syndrome_histogram(ident, code)
    assert h.counts[0] == 10 and h.total == 10
    assert syndrome_histogram([3, 3, 15]).counts[3] == 2
    assert (h + h).total == 20
    with pytest.raises(ValueError):
        SyndromeHistogram(np.zeros(4))
    with pytest.raises(ValueError):
        SyndromeHistogram().frequencies()


def test_stego_stream_syndromes_p01():
    tr = run_stream(10**6, ProtocolConfig(0.1), 5, decode=False)
    freq = syndrome_histogram(tr).frequencies()
    p0, p1, p2 = block_probs(0.1)
    z = p0 + p1 + p2
    q0, qs = p0 / z, (p1 + p2) / (15 * z)
    assert abs(freq[0] - q0) < 3 * np.sqrt(q0 * (1 - q0) / 1e6)
    assert (np.abs(freq[1:] - qs) < 3 * np.sqrt(qs * (1 - qs) / 1e6)).all()


def test_tv_distance():
    d = truncated_error_distribution(0.1)
    assert tv_distance(d, d) == 0.0
    a, b = np.eye(16)[0], np.eye(16)[5]
    assert tv_distance(a, b) == 1.0
    assert tv_distance([2, 2], [1, 3]) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        tv_distance([0, 0], [1, 1])
    with pytest.raises(ValueError):
        tv_distance([1, 1], [1, 1, 1])


def test_stego_stream_tv_at_operator_level():
    tr = run_stream(10**6, ProtocolConfig(0.05), 6, decode=False)
    counts = operator_histogram(tr.error_index)
    assert tv_distance(counts, truncated_error_distribution(0.05)) < 0.005


def test_chi_squared_exact_match():
    stat, pval = chi_squared_test([10, 20, 30, 40], [0.1, 0.2, 0.3, 0.4])
    assert stat == pytest.approx(0.0) and pval == pytest.approx(1.0)
    res = chi_squared_test([10, 20, 30, 40], [0.1, 0.2, 0.3, 0.4])
    assert isinstance(res, ChiSquaredResult) and res.dof == 3


def test_chi_squared_against_scipy():
    from scipy import stats
    obs = np.array([90, 110, 95, 105])
    res = chi_squared_test(obs, [0.25] * 4)
    ref = stats.chisquare(obs)
    assert res.statistic == pytest.approx(ref.statistic)
    assert res.p_value == pytest.approx(ref.pvalue)


def test_chi_squared_merges_sparse_cells():
    # three cells below five expected counts get pooled into one
    res = chi_squared_test([50, 45, 2, 1, 2], [0.5, 0.44, 0.02, 0.02, 0.02])
    assert res.dof == 2


def test_chi_squared_edge_cases():
    assert chi_squared_test([5, 5, 1], [0.5, 0.5, 0.0]).statistic == float("inf")
    assert chi_squared_test([5, 5, 0], [0.5, 0.5, 0.0]).dof == 1
    with pytest.raises(ValueError):
        chi_squared_test([10], [1.0])
    with pytest.raises(ValueError):
        chi_squared_test([1, 2], [0.0, 0.0])
    with pytest.raises(ValueError):
        chi_squared_test([0, 0], [0.5, 0.5])


# -- Eve --------------------------------------------------------------------

def test_eve_report_operator_csv():
    tr = run_stream(20000, ProtocolConfig(0.05), 1, decode=False)
    rep = eve_report(tr, 0.05, "operator", seed=1)
    assert len(rep.labels) == 106 and rep.n == 20000
    assert rep.residual_weight3_mass == pytest.approx(0.001158, abs=5e-7)
    lines = rep.to_csv().splitlines()
    assert lines[0].startswith("# p=0.05") and lines[1].startswith("# tv=")
    assert lines[2] == "operator,observed,expected,residual"
    assert len(lines) == 3 + 106
    assert int(sum(float(l.split(",")[1]) for l in lines[3:])) == 20000


def test_eve_report_syndrome():
    tr = run_stream(20000, ProtocolConfig(0.05), 1, decode=False)
    rep = eve_report(tr, 0.05, "syndrome")
    assert rep.labels[0] == "0000" and len(rep.labels) == 16
    assert rep.p_value > 1e-3
    assert rep.to_csv().splitlines()[2].startswith("syndrome,")
    with pytest.raises(ValueError):
        eve_report(tr, 0.05, "qubit")


def test_eve_p0_control():
    tr = run_stream(5000, ProtocolConfig(0.0), 1, decode=False)
    for g in ("syndrome", "operator"):
        rep = eve_report(tr, 0.0, g)
        assert rep.tv == 0.0 and rep.p_value == 1.0


def test_eve_detects_single_error_stream():
    tr = run_stream(10**5, ProtocolConfig(0.05), 0, decode=False, force_class=EncodingClass.SINGLE)
    assert eve_report(tr, 0.05, "syndrome").p_value < 1e-6
    assert eve_report(tr, 0.05, "operator").p_value < 1e-6
