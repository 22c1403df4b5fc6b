import argparse
import logging
import sys
from typing import Optional, Sequence

from kestrel.cli.commands import COMMANDS
from kestrel.core.errors import ConfigError, KestrelError
from kestrel.core.simulator import CORPUS_NAMES
from kestrel.core.simulator.types import SEED_MAX
from pydantic import ValidationError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _one_line(error: BaseException) -> str:
    return " ".join(str(error).split())


def _seed(value: str) -> int:
    try:
        seed = int(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"`{value}` is not an integer seed.") from e
    if not 0 <= seed <= SEED_MAX:
        raise argparse.ArgumentTypeError(f"seed must be in [0, {SEED_MAX}], got {seed}.")
    return seed


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"`{value}` is not an integer.") from e
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {number}.")
    return number


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", required=True, help="Output directory for artifacts.")
    common.add_argument("--seed", type=_seed, default=None, help="Seed override (unsigned 64-bit).")
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a scenario key, e.g. sensor.position_noise_std=0.05. Repeatable.",
    )
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: WARNING).",
    )

    parser = argparse.ArgumentParser(
        prog="kestrel",
        description="Simulate, detect and track maneuvering targets with Kalman and IMM filters.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  kestrel simulate --scenario moving-pillar --out out/
  kestrel detect --corpus low-light --out out/
  kestrel track --scenario moving-platform-turn --filters kf,imm --out out/
  kestrel bench --scenario moving-platform-turn --runs 100 --workers 4 --out out/
        """,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate = subparsers.add_parser("simulate", parents=[common], help="Write ground truth and measurements.")
    simulate.add_argument("--scenario", required=True, help="Scenario JSON file or preset name.")
    simulate.add_argument("--frames", action="store_true", help="Also render camera frames as PGM files.")

    detect = subparsers.add_parser("detect", parents=[common], help="Score the blob detector on a corpus.")
    detect.add_argument("--corpus", required=True, choices=list(CORPUS_NAMES))
    detect.add_argument("--scenario", default=None, help="Take detector settings from this scenario.")

    for name, help_text in (
        ("track", "Compare filters on one seeded run."),
        ("bench", "Compare filters over many seeded runs."),
    ):
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("--scenario", required=True, help="Scenario JSON file or preset name.")
        sub.add_argument("--filters", default="kf,imm", help="Comma separated filters (default: kf,imm).")
        sub.add_argument(
            "--source",
            default="measurements",
            choices=["measurements", "frames"],
            help="Track simulated measurements or detector output on rendered frames.",
        )
        if name == "bench":
            sub.add_argument("--runs", type=_positive_int, default=100, help="Seeded runs (default: 100).")
            sub.add_argument("--workers", type=_positive_int, default=1, help="Worker processes (default: 1).")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of the ``kestrel`` command.

    Returns 0 on success, 2 on a configuration error or an unreadable input or output
    path and 3 on any other runtime or numeric error, printing a single line to stderr.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=args.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValidationError) as e:
        print(f"kestrel: config error: {_one_line(e)}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"kestrel: I/O error: {_one_line(e)}", file=sys.stderr)
        return EXIT_CONFIG
    except KestrelError as e:
        print(f"kestrel: {type(e).__name__}: {_one_line(e)}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
