"""Command-line entrypoint: run scenarios and build calibration tables."""

import argparse
import logging
import sys
from pathlib import Path
from typing import NoReturn

from joblib import Parallel, delayed

sys.path.append(str(Path(__file__).resolve().parents[1]))

from simulation.adc0809 import AdcConfig  # noqa: E402
from simulation.config import load_run_config  # noqa: E402
from simulation.errors import ConfigurationError  # noqa: E402
from simulation.pipeline import SimulationPipeline  # noqa: E402
from simulation.sensor import SensorModel, build_table, save_table  # noqa: E402

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FAULT = 2

RunOutcome = tuple[str, int, str]


class _Parser(argparse.ArgumentParser):
    """Argument parser reporting usage errors as configuration errors."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def parse_window(text: str) -> tuple[int, int]:
    """
    Parse a ``START:END`` tick window.

    Raises:
        ConfigurationError: If the text is not two integers separated by ':'.
    """
    start, sep, end = text.partition(":")
    try:
        if not sep:
            raise ValueError(text)
        return int(start), int(end)
    except ValueError as e:
        raise ConfigurationError(
            f"vcd_window must be START:END in ticks, got '{text}'"
        ) from e


def parse_model(text: str) -> SensorModel:
    """
    Parse an ``alpha,beta`` sensor model.

    Raises:
        ConfigurationError: If the text is not two numbers separated by ','.
    """
    parts = text.split(",")
    try:
        if len(parts) != 2:
            raise ValueError(text)
        alpha, beta = (float(p) for p in parts)
    except ValueError as e:
        raise ConfigurationError(f"model must be alpha,beta, got '{text}'") from e
    return SensorModel(alpha=alpha, beta=beta)


def run_scenario(
    config_path: Path,
    out_dir: Path,
    vcd_window: tuple[int, int] | None,
    table: Path | None,
    verbose: bool,
) -> RunOutcome:
    """
    Run one scenario file, converting failures into an exit status.

    Returns:
        Tuple (scenario file, exit status, one-line message).
    """
    try:
        config = load_run_config(
            config_path,
            {"out_dir": out_dir, "vcd_window": vcd_window, "table_path": table},
        )
        result = SimulationPipeline(config, verbose=verbose).run()
    except (ValueError, FileNotFoundError) as e:
        return str(config_path), EXIT_CONFIG, f"error: {config_path}: {e}"
    message = (
        f"{result.name}: {result.samples} samples, final distance "
        f"{result.final_distance_cm:.2f} cm, min {result.min_distance_cm:.2f} cm"
    )
    if result.fault:
        message += " (ADC fault)"
    return str(config_path), result.exit_status, message


def overall_status(statuses: list[int]) -> int:
    """1 if any run had a configuration error, else 2 if any faulted, else 0."""
    if EXIT_CONFIG in statuses:
        return EXIT_CONFIG
    if EXIT_FAULT in statuses:
        return EXIT_FAULT
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    """Execute the ``run`` subcommand."""
    try:
        window = parse_window(args.vcd_window) if args.vcd_window else None
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    configs = [Path(c) for c in args.configs]
    stems = [c.stem for c in configs]
    if len(set(stems)) != len(stems):
        print("error: out_dir: scenario file names must be unique", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    single = len(configs) == 1
    outcomes: list[RunOutcome] = Parallel(n_jobs=args.jobs)(
        delayed(run_scenario)(
            config,
            out if single else out / config.stem,
            window,
            Path(args.table) if args.table else None,
            single,
        )
        for config in configs
    )

    for _, status, message in outcomes:
        if status == EXIT_CONFIG:
            print(message, file=sys.stderr)
        else:
            print(f"✓ {message}" if status == EXIT_OK else f"✗ {message}")
    return overall_status([status for _, status, _ in outcomes])


def cmd_calibrate(args: argparse.Namespace) -> int:
    """Execute the ``calibrate`` subcommand."""
    try:
        model = parse_model(args.model)
        table = build_table(model, AdcConfig(), args.points)
        path = save_table(table, args.out)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"✓ Tabela com {len(table.codes)} entradas salva em: {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of the command-line interface."""
    parser = _Parser(
        prog="fpga-robot-sim",
        description="Cycle-level co-simulation of an FPGA mobile-robot controller.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one or more scenario files")
    run.add_argument("configs", nargs="+", help="scenario TOML files")
    run.add_argument("--out", default="output", help="output directory")
    run.add_argument("--vcd-window", help="recorded tick window START:END")
    run.add_argument("--table", help="calibration table file (code,distance_cm)")
    run.add_argument("--jobs", type=int, default=1, help="parallel runs")
    run.add_argument("--verbose", action="store_true", help="enable debug logging")
    run.set_defaults(func=cmd_run)

    calibrate = sub.add_parser("calibrate", help="build a calibration table")
    calibrate.add_argument(
        "--model", default="27.0,0.42", help="sensor model alpha,beta"
    )
    calibrate.add_argument("--points", type=int, default=64, help="sampled distances")
    calibrate.add_argument("--out", required=True, help="destination file")
    calibrate.add_argument(
        "--verbose", action="store_true", help="enable debug logging"
    )
    calibrate.set_defaults(func=cmd_calibrate)
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Parse the command line and dispatch to the subcommand.

    Args:
        argv: Arguments without the program name; defaults to sys.argv.

    Returns:
        Exit status: 0 clean, 1 configuration or file error, 2 ADC fault.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
