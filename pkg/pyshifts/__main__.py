"""Command-line entry point for chain recurrence verification.

Each subcommand loads one scenario (a TOML file or ``preset:<name>``), runs
it and writes a JSON report.  Exit status 0 means every check passed, 1 that a
mathematical check failed and 2 that the scenario could not be used.
"""

import logging
import sys
from argparse import ArgumentParser, Namespace
from pathlib import Path

from pyshifts.config import build_default_catalog, build_default_config
from pyshifts.domain import (
    ScalarMode,
    ScenarioError,
    VertexId,
    WeightConditionError,
    parse_vertex,
)
from pyshifts.logging_config import setup_logging
from pyshifts.repositories import JsonReportRepository, TomlScenarioRepository, dump_report
from pyshifts.verification_runner import VerificationRunner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def build_parser() -> ArgumentParser:
    """Argument parser with one subparser per command."""
    common = ArgumentParser(add_help=False)
    common.add_argument(
        "--scenario",
        required=True,
        help="Scenario TOML file, or preset:<name> (see the presets command)",
    )
    common.add_argument("--out", help="Write the JSON report to this path instead of stdout")
    common.add_argument("--csv", metavar="DIR", help="Also write plot-ready CSV files to DIR")
    common.add_argument("--seed", type=int, help="Override the scenario seed")
    common.add_argument(
        "--mode", choices=[m.value for m in ScalarMode], help="Override the scalar mode"
    )
    common.add_argument("--jobs", type=int, default=1, help="Worker threads (default: 1)")
    common.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Set logging level (default: INFO)",
    )

    parser = ArgumentParser(
        prog="pyshifts", description="Chain recurrence of weighted shifts on trees."
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser(
        "verify-constructions", parents=[common], help="Build and check membership chains"
    )
    commands.add_parser(
        "certify", parents=[common], help="Certify branch exclusions and line memberships"
    )
    commands.add_parser("classify", parents=[common], help="Classify a classical weighted shift")
    oracle = commands.add_parser(
        "oracle", parents=[common], help="Least tolerance for a chain to reach a value"
    )
    oracle.add_argument("--family", choices=["comb", "grid"], help="Override the operator")
    oracle.add_argument(
        "--source", default="zero", help="Start basis vertex such as 3 or (-2,1), or zero"
    )
    oracle.add_argument("--target", required=True, help="Target vertex such as 0 or (-2,1)")
    oracle.add_argument("--value", default="1", help="Required target value (default: 1)")
    oracle.add_argument("--length", type=int, required=True, help="Chain length")
    commands.add_parser("presets", help="List the built-in scenario presets")
    return parser


def _vertex(text: str, flag: str) -> VertexId:
    try:
        return parse_vertex(text)
    except ValueError as e:
        raise ScenarioError(str(e), field=flag) from e


def run_command(args: Namespace) -> int:
    """Run a parsed command and return its exit status."""
    catalog = build_default_catalog()
    if args.command == "presets":
        for name in catalog.names():
            print(f"preset:{name}")
        return EXIT_OK

    config = build_default_config(jobs=args.jobs)
    runner = VerificationRunner(
        config,
        scenario_repo=TomlScenarioRepository(Path.cwd(), catalog),
        report_repo=JsonReportRepository(Path.cwd()),
    )
    scenario = runner.scenario_repo.load(args.scenario)
    mode = ScalarMode(args.mode) if args.mode else None
    scenario = scenario.with_overrides(seed=args.seed, mode=mode)

    if args.command == "oracle":
        source = None if args.source == "zero" else _vertex(args.source, "source")
        target = _vertex(args.target, "target")
        report = runner.run_oracle(
            scenario, source, target, args.value, args.length, args.family
        )
    else:
        report = runner.run(args.command, scenario)

    if args.out:
        runner.report_repo.save(args.out, report)
    else:
        sys.stdout.write(dump_report(report))
    if args.csv:
        from pyshifts.output.csv_plot_generator import CsvPlotGenerator

        CsvPlotGenerator(report, Path(args.csv)).generate()
    return EXIT_OK if report.passed else EXIT_FAILED


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(level=getattr(args, "log_level", "INFO"))
    try:
        return run_command(args)
    except (ScenarioError, WeightConditionError) as e:
        logger.error(f"Invalid scenario: {e}")
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"Cannot read or write a file: {e}")
        return EXIT_CONFIG
    except Exception as e:
        logger.critical(f"Application failed with error: {e}", exc_info=True)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
