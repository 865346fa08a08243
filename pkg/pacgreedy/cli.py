import argparse
import sys
from typing import Any, Dict, List, Optional

from .__about__ import __version__
from .bench.config import load_config, apply_overrides
from .bench.runner import run_experiment, compare_rows, emit_csv
from .bench.verify import SUITES, run_suite
from .environment import BenchEnvironment
from .messages import PacGreedyError, ConfigError, Severity
from . import warnings

#: Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pacgreedy",
        description="PAC greedy submodular maximization benchmarks",
    )
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    parser.add_argument(
        "-v", "--verbose", action="count", default=0,
        help="Print progress (-v) or per-iteration maximizer details (-vv)",
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="Only print errors")
    parser.add_argument(
        "-W", dest="warn", action="store_true",
        help="Enable all optional warnings (unconverged pac-max, filter resets, bound repairs, short lazier samples)",
    )
    parser.add_argument("--Werror", action="store_true", help="Promote the optional warnings to errors")

    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    for name, text in (("run", "Run an experiment config and write its CSV"),
                       ("compare", "Run paired comparisons of the configured maximizers")):
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("config", help="Experiment config file (YAML)")
        p.add_argument("--seed", type=int, default=None, help="Override the base seed")
        p.add_argument("--out", default=None, help="Output CSV path (default stdout)")
        p.add_argument("--jobs", type=int, default=1, help="Worker processes (default 1)")

    p = sub.add_parser("verify", help="Run statistical validation suites",
                       description="Run statistical validation suites")
    p.add_argument("suite", nargs="+", choices=sorted(SUITES) + ["all"], help="Suites to run")
    p.add_argument("--scale", type=float, default=1.0,
                   help="Fraction of the full trial counts to run (default 1)")
    p.add_argument("--seed", type=int, default=0, help="Base seed (default 0)")

    return parser


def _env_kwargs(args: argparse.Namespace) -> Dict[str, Any]:
    if args.quiet:
        verbosity = Severity.ERROR
    elif args.verbose >= 2:
        verbosity = Severity.DEBUG
    elif args.verbose == 1:
        verbosity = Severity.INFO
    else:
        verbosity = Severity.WARNING
    return {
        'min_verbosity': verbosity,
        'warning_flags': warnings.ALL if args.warn else 0,
        'error_flags': warnings.ALL if args.Werror else 0,
    }


def cmd_run(args: argparse.Namespace, env: BenchEnvironment, env_kwargs: Dict[str, Any], compare: bool=False) -> int:
    if args.jobs < 1:
        env.msg.error("--jobs must be >= 1")
        return EXIT_USAGE
    try:
        config = load_config(args.config, env)
        apply_overrides(config, env, seed=args.seed, out=args.out)
        if compare and len(config.variants()) < 2:
            env.msg.error("compare needs at least two maximizers or swept variants")
            return EXIT_USAGE
        rows = run_experiment(config, env, args.jobs, env_kwargs)
        if compare:
            rows = rows + compare_rows(config, rows)
        emit_csv(rows, config.out)
    except ConfigError:
        # Already reported
        return EXIT_USAGE
    except (PacGreedyError, OSError) as e:
        env.msg.error(str(e))
        return EXIT_FAILURE

    env.msg.info(env.msg.summary())
    return EXIT_FAILURE if env.msg.had_error else EXIT_OK


def cmd_verify(args: argparse.Namespace, env: BenchEnvironment) -> int:
    if not args.scale > 0:
        env.msg.error("--scale must be > 0")
        return EXIT_USAGE
    names = sorted(SUITES) if "all" in args.suite else args.suite
    passed = True
    for name in names:
        try:
            result = run_suite(name, args.scale, args.seed, env)
        except PacGreedyError as e:
            env.msg.error("%s: %s" % (name, e))
            passed = False
            continue
        for line in result.report():
            print(line)
        passed = passed and result.passed
    return EXIT_OK if passed and not env.msg.had_error else EXIT_FAILURE


def main(argv: Optional[List[str]]=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    env_kwargs = _env_kwargs(args)
    env = BenchEnvironment(**env_kwargs)

    if args.command == "verify":
        return cmd_verify(args, env)
    return cmd_run(args, env, env_kwargs, compare=(args.command == "compare"))


if __name__ == "__main__":
    sys.exit(main())
