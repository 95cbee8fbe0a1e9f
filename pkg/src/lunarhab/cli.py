"""Command-line entry points: ``run``, ``batch``, ``report`` and ``dump-config``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import io
from .config import ScenarioConfig, ScenarioError, dump_scenario, parse_scenario
from .engine import EngineError
from .resilience import run_batch
from .scenario import run_scenario

SEED_ENV = "HABSIM_SEED"

log = logging.getLogger("lunarhab")


class CliError(Exception):
    pass


def _seed(arg: int | None) -> int | None:
    if arg is not None:
        return arg
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return None
    try:
        value = int(env)
    except ValueError:
        raise CliError(f"{SEED_ENV} must be a non-negative integer, got {env!r}") from None
    if value < 0:
        raise CliError(f"{SEED_ENV} must be a non-negative integer, got {env!r}")
    return value


def _load(path: str, seed: int | None) -> ScenarioConfig:
    if not Path(path).is_file():
        raise CliError(f"scenario file not found: {path}")
    config = parse_scenario(path)
    if seed is not None:
        config = config.updated({"seed": seed})
    return config


def _out_dir(arg: str | None, config: ScenarioConfig) -> Path:
    out = Path(arg if arg is not None else config.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args: argparse.Namespace) -> int:
    config = _load(args.scenario, _seed(args.seed))
    out = _out_dir(args.out, config)
    result = run_scenario(config, pace=args.pace)
    rows = io.write_timeseries(result.series, out / io.TIMESERIES_FILE)
    io.write_json(io.run_summary(result), out / io.SUMMARY_FILE)
    (out / io.CONFIG_FILE).write_text(dump_scenario(config))
    m = result.metrics
    print(f"wrote {rows} samples to {out / io.TIMESERIES_FILE}")
    print(f"recovery {m.time_to_recover:.1f} s, max T {m.max_temperature:.2f} K, margin {m.response_margin:.3f}")
    return 0


def cmd_batch(args: argparse.Namespace) -> int:
    config = _load(args.scenario, _seed(args.seed))
    if args.jobs < 1:
        raise CliError("--jobs must be >= 1")
    out = _out_dir(args.out, config)
    grid = run_batch(config, jobs=args.jobs)
    rows = io.write_grid(grid, out / io.GRID_FILE)
    summary = io.batch_summary(grid, config.seed)
    io.write_json(summary, out / io.SUMMARY_FILE)
    (out / io.CONFIG_FILE).write_text(dump_scenario(config))
    print(f"wrote {rows} cells to {out / io.GRID_FILE}")
    errors = summary["cell_errors"]
    if errors:
        print(f"{len(errors)} cells failed; see {out / io.SUMMARY_FILE}", file=sys.stderr)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    results = Path(args.results_dir)
    if not (results / io.GRID_FILE).is_file():
        raise CliError(f"no {io.GRID_FILE} in {results}; run `batch` first")
    for path in io.write_report(results, args.out):
        print(f"wrote {path}")
    return 0


def cmd_dump_config(args: argparse.Namespace) -> int:
    config = _load(args.scenario, _seed(args.seed)) if args.scenario else ScenarioConfig()
    sys.stdout.write(dump_scenario(config))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lunarhab", description="Two-zone habitat fire disruption simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one scenario")
    run.add_argument("scenario")
    run.add_argument("--seed", type=int, help=f"master seed (default: ${SEED_ENV}, then the file)")
    run.add_argument("--out", help="output directory (default: output.dir from the file)")
    run.add_argument("--pace", type=float, help="simulated seconds per wall-clock second")
    run.set_defaults(func=cmd_run)

    batch = sub.add_parser("batch", help="spread-rate x detection-delay grid")
    batch.add_argument("scenario")
    batch.add_argument("--seed", type=int)
    batch.add_argument("--out")
    batch.add_argument("--jobs", type=int, default=1, help="worker processes (results do not depend on it)")
    batch.set_defaults(func=cmd_batch)

    report = sub.add_parser("report", help="plot-ready CSVs from a batch output directory")
    report.add_argument("results_dir")
    report.add_argument("--out", help="where to write (default: results_dir)")
    report.set_defaults(func=cmd_report)

    dump = sub.add_parser("dump-config", help="print the effective scenario with all defaults")
    dump.add_argument("scenario", nargs="?")
    dump.add_argument("--seed", type=int)
    dump.set_defaults(func=cmd_dump_config)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the usage error
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"lunarhab: invalid scenario: {exc}", file=sys.stderr)
        return 2
    except (CliError, ValueError) as exc:
        print(f"lunarhab: {exc}", file=sys.stderr)
        return 2
    except (EngineError, OSError) as exc:
        print(f"lunarhab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
