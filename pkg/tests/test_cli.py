import csv
import io

import pytest

from perfectstego.cli import EXIT_DISTINGUISHABLE, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main
from perfectstego.protocol import ProtocolConfig, Transcript, tables_to_text


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_verify_passes(capsys):
    assert main(["verify"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Table II: 16/16" in out
    assert "6 x 16 rows" in out
    assert "all checks passed" in out


def test_verify_corrupted_generator(capsys):
    assert main(["verify", "--corrupt-generator"]) == EXIT_VERIFY
    assert "FAIL: Table I" in capsys.readouterr().err


def test_simulate_writes_transcript(tmp_path, capsys):
    out = tmp_path / "t.tsv"
    assert main(["simulate", "--p", "0.1", "--blocks", "2000", "--seed", "3", "--out", str(out)]) == EXIT_OK
    summary = capsys.readouterr().out
    assert "payload qubits per qubit" in summary and "syndromes: 0000:" in summary
    tr = Transcript.from_text(out.read_text(encoding="utf-8"))
    assert tr.blocks == 2000
    assert b"\r" not in out.read_bytes()


def test_simulate_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for path in (a, b):
        assert main(["simulate", "--p", "0.05", "--blocks", "3000", "--seed", "8",
                     "--key-mode", "stream", "--out", str(path)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    capsys.readouterr()


def test_simulate_p0(capsys):
    assert main(["simulate", "--p", "0", "--blocks", "500"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "nontrivial: 0" in out and "payload qubits per qubit: 0.000000" in out


def test_simulate_exact(capsys):
    assert main(["simulate", "--p", "0.1", "--blocks", "100", "--mode", "exact"]) == EXIT_OK
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if l.startswith("payload round trips"))
    done, total = line.split()[3].split("/")
    assert done == total


def test_simulate_paper_and_file_tables(tmp_path, capsys):
    assert main(["simulate", "--blocks", "500", "--tables", "reference"]) == EXIT_OK
    path = tmp_path / "tables.txt"
    path.write_text(tables_to_text(ProtocolConfig(0.05).tables), encoding="utf-8")
    assert main(["simulate", "--blocks", "500", "--tables", str(path)]) == EXIT_OK
    assert main(["simulate", "--blocks", "500", "--tables", str(tmp_path / "missing")]) == EXIT_USAGE
    capsys.readouterr()


def test_eve_passes_and_flags(tmp_path, capsys):
    report = tmp_path / "eve.csv"
    assert main(["eve", "--p", "0.05", "--blocks", "200000", "--out", str(report)]) == EXIT_OK
    lines = report.read_text(encoding="utf-8").splitlines()
    assert lines[2] == "operator,observed,expected,residual" and len(lines) == 3 + 106
    assert main(["eve", "--p", "0.05", "--blocks", "200000", "--force-class", "single"]) == EXIT_DISTINGUISHABLE
    assert "DISTINGUISHABLE" in capsys.readouterr().out


def test_eve_syndrome_granularity(capsys):
    assert main(["eve", "--blocks", "50000", "--granularity", "syndrome"]) == EXIT_OK
    assert "cells: 16" in capsys.readouterr().out


def test_rates_single_point(capsys):
    assert main(["rates", "--p", "0.01"]) == EXIT_OK
    (row,) = _rows(capsys.readouterr().out)
    want = {"n_avg": 0.209067, "r_typ": 0.096348, "r_enc": 0.057067, "K": 0.061195, "K_blockwise": 0.683627}
    for col, value in want.items():
        assert float(row[col]) == pytest.approx(value, abs=1e-5)


def test_rates_default_grid(tmp_path, capsys):
    path = tmp_path / "rates.csv"
    assert main(["rates", "--out", str(path)]) == EXIT_OK
    rows = _rows(path.read_text(encoding="utf-8"))
    assert len(rows) == 100
    assert all(float(r["r_typ"]) > float(r["r_enc"]) for r in rows)
    assert main(["rates", "--out", str(tmp_path / "again.csv")]) == EXIT_OK
    assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()
    capsys.readouterr()


def test_rates_delta_monotone(capsys):
    grid = "0.01,0.02,0.05,0.08"
    main(["rates", "--p", grid, "--delta", "0.005"])
    tight = _rows(capsys.readouterr().out)
    main(["rates", "--p", grid, "--delta", "0.5"])
    loose = _rows(capsys.readouterr().out)
    for a, b in zip(tight, loose):
        assert float(b["r_enc"]) < float(a["r_enc"])


@pytest.mark.parametrize("argv", [
    ["simulate", "--p", "0.7"],
    ["simulate", "--blocks", "0"],
    ["simulate", "--mode", "fast"],
    ["rates", "--p", "0.01,abc"],
    ["rates", "--p", "0.9"],
    ["teleport"],
    [],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == EXIT_USAGE
    capsys.readouterr()
