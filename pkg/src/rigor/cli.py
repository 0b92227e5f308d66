"""Operator entry points.

Subcommands: ``simulate`` (Monte Carlo benchmark), ``run-session`` (drive a
batch of ideas end to end under protocol accounting), ``gen-scaffold`` /
``audit-scaffold`` (harness generation and auditing), ``replay-trace``
(re-check recorded decisions).

Exit codes are a stable contract: 0 success, 1 check failed, 2 usage
error, 3 session halted on a protocol violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from rigor.executor import HarnessExecutor, execute_harness
from rigor.protocols import NaiveConfig, ProtocolError, default_lord_config
from rigor.scaffold import (
    DataContract,
    StatisticalTestSpec,
    audit_scaffold,
    generate_scaffold,
)
from rigor.session import (
    OutcomeStatus,
    ResearchError,
    ResearchErrorKind,
    decision_rows_from_jsonl,
    open_session,
    replay_trace,
    trace_to_jsonl,
)
from rigor.simulation import (
    DEFAULT_SEED,
    MixtureConfig,
    analytic_naive_expectations,
    default_protocols,
    format_report,
    report_to_csv,
    run_simulation,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_PROTOCOL_HALT = 3

# Reference values the default benchmark configuration reproduces, with the
# tolerances the checked run is held to.
NAIVE_FDR_REFERENCE = 0.4090
NAIVE_FDR_TOLERANCE = 0.03
NAIVE_POWER_REFERENCE = 0.6399
NAIVE_POWER_TOLERANCE = 0.01
LORD_FDR_REFERENCE = 0.0106
LORD_FDR_TOLERANCE = 0.02
LORD_POWER_RANGE = (0.15, 0.45)


@dataclass(frozen=True)
class IdeaSpec:
    """One entry of the ideas manifest: a label and an implementation source file."""

    label: str
    implementation_source_path: str


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rigor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the Monte Carlo FDR/power benchmark")
    sim.add_argument("--n", type=int, default=2000, help="hypotheses per run")
    sim.add_argument("--runs", type=int, default=100, help="number of runs to average")
    sim.add_argument("--pi1", type=float, default=0.1, help="true-effect fraction")
    sim.add_argument("--beta-a", type=float, default=0.15, help="Beta(a,1) shape of true-effect p-values")
    sim.add_argument("--alpha", type=float, default=0.05, help="target FDR")
    sim.add_argument("--w0", type=float, default=None, help="initial wealth (default alpha/2)")
    sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sim.add_argument("--csv", type=Path, default=None, help="also write aggregates as CSV")
    sim.add_argument(
        "--check",
        action="store_true",
        help="compare the default benchmark against its reference values; exit 1 on miss",
    )

    run = sub.add_parser("run-session", help="run a batch of ideas under protocol accounting")
    run.add_argument("--ideas", type=Path, required=True, help="JSONL manifest: {label, path} per line")
    run.add_argument("--exploration-data", required=True)
    run.add_argument("--validation-data", required=True)
    run.add_argument("--reps", type=int, default=3)
    run.add_argument("--folds", type=int, default=10)
    run.add_argument("--protocol", choices=("lord", "naive"), default="lord")
    run.add_argument("--alpha", type=float, default=0.05)
    run.add_argument("--w0", type=float, default=None)
    run.add_argument("--workdir", type=Path, default=None, help="executor workspace root (default: temp)")
    run.add_argument("--interpreter", default=None, help="interpreter command (default: this Python)")
    run.add_argument("--timeout", type=float, default=120.0, help="per-execution wall clock limit, seconds")
    run.add_argument(
        "--support-file",
        type=Path,
        action="append",
        default=[],
        help="file copied into every execution workspace (repeatable)",
    )
    run.add_argument("--trace-out", type=Path, default=None, help="write the session trace as JSONL")

    gen = sub.add_parser("gen-scaffold", help="render a harness for a contract and test spec")
    gen.add_argument("--exploration-data", required=True)
    gen.add_argument("--validation-data", required=True)
    gen.add_argument("--reps", type=int, default=3)
    gen.add_argument("--folds", type=int, default=10)
    gen.add_argument("--label", required=True)
    gen.add_argument("--dialect", default="python")
    gen.add_argument("--out", type=Path, default=None, help="write harness here (default: stdout)")

    aud = sub.add_parser("audit-scaffold", help="re-check an on-disk harness against its contract")
    aud.add_argument("--harness", type=Path, required=True)
    aud.add_argument("--exploration-data", required=True)
    aud.add_argument("--validation-data", required=True)
    aud.add_argument("--reps", type=int, default=3)
    aud.add_argument("--folds", type=int, default=10)
    aud.add_argument("--label", required=True)
    aud.add_argument("--dialect", default="python")

    rep = sub.add_parser("replay-trace", help="re-check recorded decisions in a trace file")
    rep.add_argument("--trace", type=Path, required=True)

    return parser


def cmd_simulate(args: argparse.Namespace) -> int:
    if not 0.0 < args.alpha < 1.0:
        return _usage_error(f"--alpha must lie in (0, 1), got {args.alpha}")
    if args.w0 is not None and not 0.0 < args.w0 <= args.alpha:
        return _usage_error(f"--w0 must satisfy 0 < w0 <= alpha, got {args.w0}")
    config = MixtureConfig(
        n_hypotheses=args.n, pi1=args.pi1, beta_a=args.beta_a, seed=args.seed, n_runs=args.runs
    )
    try:
        protocols = default_protocols(alpha=args.alpha, w0=args.w0)
        report = run_simulation(config, protocols)
    except (ValueError, ProtocolError) as err:
        return _usage_error(str(err))

    print(format_report(report))
    if args.csv is not None:
        args.csv.write_text(report_to_csv(report), encoding="utf-8")
        print(f"wrote {args.csv}")

    if not args.check:
        return EXIT_OK

    naive = report.per_protocol["naive"]
    lord = report.per_protocol["lord"]
    expected_fdr, _ = analytic_naive_expectations(config, args.alpha)
    checks = [
        (
            f"naive FDR {naive.empirical_fdr:.4f} within {NAIVE_FDR_TOLERANCE} of {NAIVE_FDR_REFERENCE}",
            abs(naive.empirical_fdr - NAIVE_FDR_REFERENCE) <= NAIVE_FDR_TOLERANCE,
        ),
        (
            f"naive FDR {naive.empirical_fdr:.4f} within 3 stderr of closed form {expected_fdr:.4f}",
            abs(naive.empirical_fdr - expected_fdr) <= 3.0 * naive.stderr_fdr,
        ),
        (
            f"naive power {naive.mean_power:.4f} within {NAIVE_POWER_TOLERANCE} of {NAIVE_POWER_REFERENCE}",
            abs(naive.mean_power - NAIVE_POWER_REFERENCE) <= NAIVE_POWER_TOLERANCE,
        ),
        (f"lord FDR {lord.empirical_fdr:.4f} <= target {args.alpha}", lord.empirical_fdr <= args.alpha),
        (
            f"lord FDR {lord.empirical_fdr:.4f} within {LORD_FDR_TOLERANCE} of {LORD_FDR_REFERENCE}",
            abs(lord.empirical_fdr - LORD_FDR_REFERENCE) <= LORD_FDR_TOLERANCE,
        ),
        (
            f"lord power {lord.mean_power:.4f} in [{LORD_POWER_RANGE[0]}, {LORD_POWER_RANGE[1]}]",
            LORD_POWER_RANGE[0] <= lord.mean_power <= LORD_POWER_RANGE[1],
        ),
    ]
    failed = False
    for description, ok in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {description}")
        failed = failed or not ok
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _load_manifest(path: Path) -> list[IdeaSpec]:
    ideas: list[IdeaSpec] = []
    seen: set[str] = set()
    for line_number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        record = json.loads(line)
        label = record.get("label", "")
        impl_path = record.get("path", "")
        if not label:
            raise ValueError(f"manifest line {line_number}: label must be non-empty")
        if label in seen:
            raise ValueError(f"manifest line {line_number}: duplicate label {label!r}")
        if not impl_path:
            raise ValueError(f"manifest line {line_number}: path must be non-empty")
        seen.add(label)
        ideas.append(IdeaSpec(label=label, implementation_source_path=impl_path))
    return ideas


def _print_trace_table(trace) -> None:
    print(f"{'t':>4}  {'idea':<40} {'p-value':>10} {'alpha_t':>10} {'discovery':>9}")
    for outcome in trace.outcomes:
        if outcome.status is OutcomeStatus.TESTED:
            print(
                f"{outcome.test_index:>4}  {outcome.idea_label:<40} "
                f"{outcome.p_value:>10.5f} {outcome.threshold:>10.5f} {str(outcome.is_discovery):>9}"
            )
        else:
            print(
                f"{'-':>4}  {outcome.idea_label:<40} {'-':>10} {'-':>10} "
                f"failed ({outcome.detail.split(':', 1)[0]})"
            )


def cmd_run_session(args: argparse.Namespace) -> int:
    try:
        ideas = _load_manifest(args.ideas)
    except (OSError, ValueError, json.JSONDecodeError) as err:
        return _usage_error(f"cannot load ideas manifest: {err}")

    sources: dict[str, str] = {}
    for idea in ideas:
        try:
            sources[idea.label] = Path(idea.implementation_source_path).read_text(encoding="utf-8")
        except OSError as err:
            return _usage_error(f"cannot read implementation for {idea.label!r}: {err}")

    support_files = []
    for support_path in args.support_file:
        try:
            support_files.append((support_path.name, support_path.read_text(encoding="utf-8")))
        except OSError as err:
            return _usage_error(f"cannot read support file: {err}")

    contract = DataContract(
        exploration_data_path=args.exploration_data, validation_data_path=args.validation_data
    )
    test_spec = StatisticalTestSpec(reps=args.reps, folds=args.folds)
    if args.protocol == "lord":
        protocol_config = default_lord_config(alpha=args.alpha, w0=args.w0)
    else:
        protocol_config = NaiveConfig(alpha=args.alpha)

    work_dir = args.workdir if args.workdir is not None else Path(tempfile.mkdtemp(prefix="rigor_"))
    executor = HarnessExecutor(
        work_dir=work_dir,
        timeout=args.timeout,
        support_files=tuple(support_files),
        **({"interpreter_command": args.interpreter} if args.interpreter else {}),
    )

    try:
        session = open_session(protocol_config)
    except ResearchError as err:
        return _usage_error(str(err))

    exit_code = EXIT_OK
    try:
        for idea in ideas:
            scaffold = generate_scaffold(contract, test_spec, idea.label)
            implementation_source = sources[idea.label]
            session.test_hypothesis(
                scaffold, lambda sc, src=implementation_source: execute_harness(executor, sc, src)
            )
    except ProtocolError as err:
        return _usage_error(str(err))
    except ResearchError as err:
        if err.kind is ResearchErrorKind.PROTOCOL_VIOLATION:
            print(f"session halted: {err}", file=sys.stderr)
            exit_code = EXIT_PROTOCOL_HALT
        else:
            return _usage_error(str(err))

    trace = session.trace
    _print_trace_table(trace)
    discoveries = sum(
        1 for o in trace.outcomes if o.status is OutcomeStatus.TESTED and o.is_discovery
    )
    print(f"{discoveries} discover{'y' if discoveries == 1 else 'ies'} in {len(trace.outcomes)} attempts")
    if args.trace_out is not None:
        args.trace_out.write_text(trace_to_jsonl(trace), encoding="utf-8")
        print(f"wrote {args.trace_out}")
    return exit_code


def cmd_gen_scaffold(args: argparse.Namespace) -> int:
    contract = DataContract(
        exploration_data_path=args.exploration_data, validation_data_path=args.validation_data
    )
    try:
        scaffold = generate_scaffold(
            contract, StatisticalTestSpec(reps=args.reps, folds=args.folds), args.label, args.dialect
        )
    except ProtocolError as err:
        return _usage_error(str(err))
    if args.out is not None:
        args.out.write_text(scaffold.harness_source, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(scaffold.harness_source, end="")
    return EXIT_OK


def cmd_audit_scaffold(args: argparse.Namespace) -> int:
    contract = DataContract(
        exploration_data_path=args.exploration_data, validation_data_path=args.validation_data
    )
    try:
        reference = generate_scaffold(
            contract, StatisticalTestSpec(reps=args.reps, folds=args.folds), args.label, args.dialect
        )
        harness_source = args.harness.read_text(encoding="utf-8")
    except (ProtocolError, OSError) as err:
        return _usage_error(str(err))
    from dataclasses import replace

    violations = audit_scaffold(replace(reference, harness_source=harness_source))
    if violations:
        for violation in violations:
            print(f"violation: {violation}")
        return EXIT_CHECK_FAILED
    print("audit clean")
    return EXIT_OK


def cmd_replay_trace(args: argparse.Namespace) -> int:
    try:
        rows = decision_rows_from_jsonl(args.trace.read_text(encoding="utf-8"))
    except (OSError, ValueError) as err:
        return _usage_error(f"cannot load trace: {err}")
    inconsistencies = replay_trace(rows)
    if inconsistencies:
        for item in inconsistencies:
            print(
                f"row {item.row_index}: claimed discovery={item.claimed_discovery} but "
                f"p={item.p_value} vs threshold={item.threshold} implies {item.expected_discovery}"
            )
        return EXIT_CHECK_FAILED
    print(f"{len(rows)} decision rows replay clean")
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "run-session": cmd_run_session,
    "gen-scaffold": cmd_gen_scaffold,
    "audit-scaffold": cmd_audit_scaffold,
    "replay-trace": cmd_replay_trace,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code) if err.code else EXIT_OK
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
