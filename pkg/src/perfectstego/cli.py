"""Command-line entry point: ``perfectstego {verify,simulate,eve,rates}``.

Exit codes: 0 pass, 1 verification failure, 2 stego traffic distinguishable,
64 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

import numpy as np

from .channel import eve_report
from .protocol import (
    EncodingClass,
    ProtocolConfig,
    ProtocolError,
    reference_tables,
    run_stream,
    tables_from_text,
)
from .rates import (
    DEFAULT_DELTA,
    DomainError,
    default_grid,
    emit_rate_csv,
    format_rate_csv,
    key_rate_asymptotic,
    key_rate_blockwise,
    n_avg,
    rate_table,
    write_atomic,
)
from .verification import verify_all

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_DISTINGUISHABLE = 2
EXIT_USAGE = 64

FIDELITY_FLOOR = 1 - 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_tables(source: str):
    if source == "derived":
        return None
    if source == "reference":
        return reference_tables()
    if not os.path.exists(source):
        raise UsageError(f"table file {source!r} not found")
    with open(source, encoding="utf-8") as fh:
        return tables_from_text(fh.read())


def _config(args, mode: str | None = None) -> ProtocolConfig:
    try:
        return ProtocolConfig(args.p, mode=mode or args.mode, tables=_load_tables(args.tables))
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(f"invalid configuration: {exc}") from None


def _forced(args):
    return EncodingClass.SINGLE if getattr(args, "force_class", None) == "single" else None


def _emit(text: str, path: str | None):
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    reports = verify_all(corrupt_generator=args.corrupt_generator)
    for r in reports:
        print(r.summary())
        for note in r.notes:
            print(f"  {note}")
    failed = [r for r in reports if not r.ok]
    if failed:
        print(f"FAIL: {failed[0].name}: {failed[0].failures[0]}", file=sys.stderr)
        return EXIT_VERIFY
    print("all checks passed")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _config(args)
    try:
        tr = run_stream(args.blocks, cfg, args.seed, key_mode=args.key_mode, force_class=_forced(args))
    except ProtocolError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    if args.out:
        write_atomic(args.out, tr.to_text())
    s = tr.summary()
    print(f"blocks: {tr.blocks}  nontrivial: {tr.nontrivial}")
    print(f"payload qubits per qubit: {tr.payload_per_qubit:.6f}  (N_avg/5 = {n_avg(args.p) / 5:.6f})")
    if args.key_mode == "blockwise":
        print(f"key bits per qubit: {tr.key_bits_per_qubit:.6f}  (closed form {key_rate_blockwise(args.p):.6f})")
    else:
        print(f"key bits per qubit: {tr.key_bits_per_qubit:.6f}")
        if args.p > 0:
            print(f"selection bits per qubit: {tr.selection_bits_per_qubit:.6f}  "
                  f"(entropy limit {key_rate_asymptotic(args.p).as_printed:.6f})")
    counts = np.bincount(tr.syndromes, minlength=16)
    print("syndromes: " + " ".join(f"{i:04b}:{c}" for i, c in enumerate(counts)))
    bad = 0
    if tr.payload_ok is not None:
        bad = s["payload_errors"]
        print(f"payload round trips: {tr.nontrivial - bad}/{tr.nontrivial}")
    if tr.fidelities is not None:
        bad = int(np.count_nonzero(tr.fidelities < FIDELITY_FLOOR))
        worst = tr.fidelities.min() if tr.fidelities.size else 1.0
        print(f"payload round trips: {tr.nontrivial - bad}/{tr.nontrivial}  (min fidelity {worst:.15f})")
    return EXIT_VERIFY if bad else EXIT_OK


def cmd_eve(args) -> int:
    cfg = _config(args, mode="frame")
    tr = run_stream(args.blocks, cfg, args.seed, decode=False, force_class=_forced(args))
    report = eve_report(tr, args.p, args.granularity, seed=args.seed)
    if args.out:
        write_atomic(args.out, report.to_csv())
    print(f"cells: {len(report.labels)}  N: {report.n}")
    print(f"TV distance: {report.tv:.6g}")
    print(f"chi-squared: {report.statistic:.6g}  dof: {report.dof}  p-value: {report.p_value:.6g}")
    print(f"weight >= 3 mass not emitted: {report.residual_weight3_mass:.6g}")
    if report.p_value < args.threshold:
        print(f"DISTINGUISHABLE at threshold {args.threshold}")
        return EXIT_DISTINGUISHABLE
    return EXIT_OK


def _grid(text: str | None) -> np.ndarray:
    if text is None:
        return default_grid()
    if text.strip() == "":
        return np.array([])
    try:
        return np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None


def cmd_rates(args) -> int:
    grid = _grid(args.p)
    try:
        if args.out:
            emit_rate_csv(grid, args.delta, args.out)
            print(f"wrote {len(grid)} rows to {args.out}")
        else:
            sys.stdout.write(format_rate_csv(rate_table(grid, args.delta)))
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="perfectstego", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="check the reference tables and the derived encoder")
    v.add_argument("--corrupt-generator", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    def common(sp, blocks):
        sp.add_argument("--p", type=float, default=0.05, help="depolarizing parameter (default 0.05)")
        sp.add_argument("--blocks", type=int, default=blocks, help=f"number of blocks M (default {blocks})")
        sp.add_argument("--seed", type=int, default=0, help="shared key seed (default 0)")
        sp.add_argument("--tables", default="derived", help="derived, reference, or a table file")
        sp.add_argument("--out", help="output file (written atomically)")
        sp.add_argument("--force-class", choices=["single"], help=argparse.SUPPRESS)

    s = sub.add_parser("simulate", help="run the protocol over M blocks and write a transcript")
    common(s, 10_000)
    s.add_argument("--mode", choices=["frame", "exact"], default="frame")
    s.add_argument("--key-mode", choices=["blockwise", "stream"], default="blockwise")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("eve", help="test stego traffic against the depolarizing channel")
    common(e, 1_000_000)
    e.add_argument("--granularity", choices=["syndrome", "operator"], default="operator")
    e.add_argument("--threshold", type=float, default=1e-3, help="p-value below which traffic is flagged")
    e.set_defaults(func=cmd_eve)

    r = sub.add_parser("rates", help="emit the rate curves as CSV")
    r.add_argument("--p", help="comma-separated p values (default 0.001..0.1 step 0.001)")
    r.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    r.add_argument("--out", help="CSV path (default stdout)")
    r.set_defaults(func=cmd_rates)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "blocks", 1) < 1:
        print("error: --blocks must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
