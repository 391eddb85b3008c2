"""Command-line entry point for the modular-network simulator."""
import argparse
import sys
from typing import List, Optional

import config
from cost import cost_profile, cost_threshold, monte_carlo_cost
from error_logger import ErrorCategory, ScenarioError, SimulationError, error_logger, log_critical, log_error
from logger import RunLogger
from scenario import GOLDEN_TRACES, Report, golden_scenario, load_scenario, run_scenario, write_report
from verification import run_checks

EXIT_OK = 0
EXIT_TASK_FAILED = 1
EXIT_USAGE = 2


def print_report_summary(report: Report):
    """Print the per-task table and totals of a finished run."""
    totals = report.totals()
    print("\n" + "=" * 60)
    print(f"📊 SCENARIO SUMMARY: {report.scenario} (seed {report.seed})")
    print("=" * 60)
    for task in report.tasks:
        icon = "✅" if task.passed else "❌"
        fidelity = "-" if task.fidelity is None else f"{task.fidelity:.12f}"
        rounds = "-" if task.rounds is None else f"{task.rounds:g}"
        ebits = "-" if task.ebits is None else f"{task.ebits:.4f}"
        print(f"{icon} {task.name:<20} {task.kind:<17} fidelity={fidelity} rounds={rounds} ebits={ebits}")
        if task.message:
            print(f"   ⚠️  {task.message}")
    print(f"Tasks passed: {totals['passed']}/{totals['tasks']}")
    print(f"Total ebits: {totals['ebits']:.4f}")


def run_and_report(scenario, out: Optional[str], quiet: bool, log_to_file: bool,
                   error_log: Optional[str] = None) -> int:
    if error_log:
        error_logger.clear_logs()
    logger = RunLogger(scenario.name, log_to_file=log_to_file, verbose=not quiet)
    report = run_scenario(scenario, logger)
    logger.finish()
    print_report_summary(report)
    if out:
        write_report(report, out)
        print(f"📝 Report written to: {out}")
    if error_log:
        error_logger.export_logs(error_log)
        print(f"🗂️  Error log written to: {error_log}")
    return report.exit_code


def cmd_run(args) -> int:
    scenario = load_scenario(args.file).with_overrides(seed=args.seed, trials=args.trials)
    return run_and_report(scenario, args.out, args.quiet, not args.no_log, args.error_log)


def cmd_analyze_cost(args) -> int:
    profile = cost_profile(args.theta)
    print(f"θ = {profile.theta:.6g} rad")
    print(f"Expected iterative cost: {profile.expected_cost:.6f} ebits")
    print(f"Deterministic (Bell) cost: {profile.deterministic_cost:.1f} ebit")
    print(f"Preferred: {profile.preferred}")
    for k, c in enumerate(profile.per_round_cost[:args.rounds], start=1):
        print(f"   round {k}: E = {c:.6f} ebits, reached with probability {0.5 ** (k - 1):.6g}")
    if args.trials:
        seed = config.VERIFY_SEED if args.seed is None else args.seed
        result = monte_carlo_cost(args.theta, args.trials, seed=seed, workers=args.workers)
        print(f"🎲 Monte Carlo ({result.trials} trials, seed {seed}): "
              f"{result.mean_rounds:.4f} ± {result.stderr_rounds:.4f} rounds, "
              f"{result.mean_ebits:.4f} ± {result.stderr_ebits:.4f} ebits")
    return EXIT_OK


def cmd_threshold(args) -> int:
    print(f"{cost_threshold():.6f}")
    return EXIT_OK


def cmd_golden(args) -> int:
    if args.trace in GOLDEN_TRACES:
        scenario = golden_scenario(args.trace, 0 if args.seed is None else args.seed)
    else:
        scenario = load_scenario(args.trace).with_overrides(seed=args.seed)
    return run_and_report(scenario, args.out, args.quiet, False, args.error_log)


def cmd_verify(args) -> int:
    results = run_checks(args.only, args.seed)
    for result in results:
        icon = "✅" if result.passed else "❌"
        print(f"{icon} [{result.number:2d}] {result.name}: {result.detail} ({result.wall_time:.2f}s)")
    failed = sum(1 for r in results if not r.passed)
    print(f"\n{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_TASK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modnet", description="Modular entanglement-network simulator")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    run = sub.add_parser("run", help="Run a scenario file")
    run.add_argument("file", help="Scenario JSON file")
    run.add_argument("--seed", type=int, help="Override the scenario seed")
    run.add_argument("--trials", type=int, help="Override the Monte Carlo trial count")
    run.add_argument("--out", help="Write the JSON report to this file")
    run.add_argument("--quiet", action="store_true", help="Only print the summary")
    run.add_argument("--no-log", action="store_true", help="Disable the JSON run log")
    run.add_argument("--error-log", help="Export this run's error log (JSON) to this file")
    run.set_defaults(func=cmd_run)

    cost = sub.add_parser("analyze-cost", help="Iterative versus Bell-pair cost of e^{i theta ZZ}")
    cost.add_argument("--theta", type=float, required=True, help="Rotation angle in radians")
    cost.add_argument("--rounds", type=int, default=5, help="Per-round costs to print")
    cost.add_argument("--trials", type=int, default=0, help="Monte Carlo trials (0 = analytic only)")
    cost.add_argument("--seed", type=int, help="Monte Carlo seed")
    cost.add_argument("--workers", type=int, default=1, help="Monte Carlo worker threads")
    cost.set_defaults(func=cmd_analyze_cost)

    threshold = sub.add_parser("threshold", help="Angle below which the iterative route is cheaper")
    threshold.set_defaults(func=cmd_threshold)

    golden = sub.add_parser("golden", help="Run a built-in golden trace or a scenario file")
    golden.add_argument("trace", help=f"One of {', '.join(GOLDEN_TRACES)} or a scenario path")
    golden.add_argument("--seed", type=int, help="Seed for the data state")
    golden.add_argument("--out", help="Write the JSON report to this file")
    golden.add_argument("--quiet", action="store_true", help="Only print the summary")
    golden.add_argument("--error-log", help="Export this run's error log (JSON) to this file")
    golden.set_defaults(func=cmd_golden)

    verify = sub.add_parser("verify", help="Run the property suite")
    verify.add_argument("--only", type=int, nargs="+", help="Check numbers to run")
    verify.add_argument("--seed", type=int, help="Base seed for the checks")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and dispatch to a subcommand.

    Returns:
        0 on success, 1 when a task or check fails, 2 on usage, parse or I/O errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        return args.func(args)
    except KeyboardInterrupt:
        print("\n\n⏹️  Run interrupted by user", file=sys.stderr)
        return EXIT_TASK_FAILED
    except ScenarioError as e:
        log_error(str(e), ErrorCategory.SCENARIO, {"command": args.command, "path": e.path, "line": e.line})
        print(f"❌ Scenario error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        log_error(f"cannot read input: {e}", ErrorCategory.IO, {"command": args.command})
        print(f"❌ {e.strerror or e}: {e.filename or ''}".rstrip(": "), file=sys.stderr)
        return EXIT_USAGE
    except SimulationError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_TASK_FAILED
    except Exception as e:
        log_critical(f"unexpected {type(e).__name__} in {args.command}: {e}", ErrorCategory.SYSTEM,
                     {"command": args.command}, e)
        print(f"❌ Internal error: {e}", file=sys.stderr)
        return EXIT_TASK_FAILED


if __name__ == "__main__":
    sys.exit(main())
