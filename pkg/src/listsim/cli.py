"""Command-line harness: bounds, single runs, and grid sweeps.

Every subcommand also accepts ``--config FILE`` pointing at a JSON object
whose keys mirror the flag names (hyphens become underscores, e.g.
``eps_grid``); explicit flags override file values.  Exit codes: 0 on
success, 1 for an invalid configuration, 2 for runtime failure (I/O, or a
run in which every trial aborted).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional

from .counts import DEFAULT_CHUNK_SIZE
from .errors import InvalidParam, ListExploded, Overflow
from .sweep import (
    ENGINE_COUNTS,
    ENGINE_DECODE,
    SweepConfig,
    all_trials_aborted,
    flag_inconsistent_rows,
    format_point_report,
    parse_epsilon_grid,
    point_report,
    rows_to_csv,
    rows_to_json,
    run_sweep,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # Spec'd exit codes: argparse's default of 2 for bad usage would
    # collide with "runtime failure", so parse errors raise instead.
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _load_config_file(path: Optional[str]) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidParam(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParam(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidParam(f"config file {path} must contain a JSON object")
    return data


def _merged(args: argparse.Namespace, key: str, default: Any = None) -> Any:
    """Flag value if given, else config-file value, else default."""
    cli_value = getattr(args, key, None)
    if cli_value is not None:
        return cli_value
    file_config = getattr(args, "_file_config")
    if key in file_config:
        return file_config[key]
    return default


def _required(args: argparse.Namespace, key: str) -> Any:
    value = _merged(args, key)
    if value is None:
        raise InvalidParam(f"missing required option --{key.replace('_', '-')}")
    return value


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file with keys mirroring the flags")


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--M", type=int, help="token space size (>= 2)")
    parser.add_argument("--t", type=int, help="horizon / number of steps")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials")
    parser.add_argument("--seed", type=int, help="base random seed")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument(
        "--json",
        action="store_const",
        const=True,
        default=None,
        help="emit JSON instead of CSV",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="listsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="closed-form bounds and exact references")
    p_bounds.add_argument("--M", type=int)
    p_bounds.add_argument("--eps", type=float)
    p_bounds.add_argument("--t", type=int)
    p_bounds.add_argument(
        "--json", action="store_const", const=True, default=None
    )
    _add_common(p_bounds)
    p_bounds.set_defaults(func=cmd_bounds)

    p_sim = sub.add_parser("simulate", help="aggregate counts engine")
    _add_run_options(p_sim)
    p_sim.add_argument("--eps", type=float, help="false-alarm probability")
    p_sim.add_argument("--workers", type=int, help="worker threads (default 1)")
    p_sim.add_argument(
        "--chunk-size", type=int, dest="chunk_size", help="trials per stream chunk"
    )
    _add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_dec = sub.add_parser("decode", help="explicit candidate-list engine")
    _add_run_options(p_dec)
    p_dec.add_argument("--eps", type=float, help="false-alarm probability")
    p_dec.add_argument("--cap", type=int, help="max candidates kept per step")
    p_dec.add_argument("--scorer", choices=["uniform"], help="score policy")
    _add_common(p_dec)
    p_dec.set_defaults(func=cmd_decode)

    p_sweep = sub.add_parser("sweep", help="epsilon grid sweep")
    _add_run_options(p_sweep)
    p_sweep.add_argument(
        "--eps-grid",
        dest="eps_grid",
        help="start:stop:step (inclusive) or comma-separated values",
    )
    p_sweep.add_argument("--engine", choices=[ENGINE_COUNTS, ENGINE_DECODE])
    p_sweep.add_argument("--cap", type=int)
    p_sweep.add_argument("--scorer", choices=["uniform"])
    p_sweep.add_argument("--workers", type=int)
    p_sweep.add_argument("--chunk-size", type=int, dest="chunk_size")
    _add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def cmd_bounds(args: argparse.Namespace) -> int:
    report = point_report(
        M=int(_required(args, "M")),
        epsilon=float(_required(args, "eps")),
        t=int(_required(args, "t")),
    )
    if _merged(args, "json", False):
        print(json.dumps(report, indent=2))
    else:
        print(format_point_report(report))
    return 0


def _emit_rows(args: argparse.Namespace, config: SweepConfig, label: str) -> int:
    rows = run_sweep(config)
    flagged = flag_inconsistent_rows(rows)
    text = rows_to_json(rows) if _merged(args, "json", False) else rows_to_csv(rows)
    out = _merged(args, "out")
    if out is None:
        sys.stdout.write(text)
        target = "stdout"
    else:
        Path(out).write_text(text, encoding="utf-8")
        target = out
    aborted = max(row.aborted_trials for row in rows)
    print(
        f"{label}: {len(rows)} rows -> {target} "
        f"({len(flagged)} flagged, {aborted} aborted trials)",
        file=sys.stderr,
    )
    if all_trials_aborted(rows):
        print(f"{label}: every trial aborted", file=sys.stderr)
        return 2
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    config = SweepConfig(
        M=int(_required(args, "M")),
        epsilon_grid=(float(_required(args, "eps")),),
        horizon=int(_required(args, "t")),
        trials=int(_required(args, "trials")),
        seed=int(_required(args, "seed")),
        engine=ENGINE_COUNTS,
        workers=int(_merged(args, "workers", 1)),
        chunk_size=int(_merged(args, "chunk_size", DEFAULT_CHUNK_SIZE)),
    )
    return _emit_rows(args, config, "simulate")


def cmd_decode(args: argparse.Namespace) -> int:
    cap = _merged(args, "cap")
    config = SweepConfig(
        M=int(_required(args, "M")),
        epsilon_grid=(float(_required(args, "eps")),),
        horizon=int(_required(args, "t")),
        trials=int(_required(args, "trials")),
        seed=int(_required(args, "seed")),
        engine=ENGINE_DECODE,
        cap=int(cap) if cap is not None else None,
    )
    return _emit_rows(args, config, "decode")


def cmd_sweep(args: argparse.Namespace) -> int:
    grid_spec = _required(args, "eps_grid")
    if isinstance(grid_spec, str):
        grid = parse_epsilon_grid(grid_spec)
    else:
        grid = tuple(float(v) for v in grid_spec)
    cap = _merged(args, "cap")
    config = SweepConfig(
        M=int(_required(args, "M")),
        epsilon_grid=grid,
        horizon=int(_required(args, "t")),
        trials=int(_required(args, "trials")),
        seed=int(_required(args, "seed")),
        engine=str(_required(args, "engine")),
        cap=int(cap) if cap is not None else None,
        workers=int(_merged(args, "workers", 1)),
        chunk_size=int(_merged(args, "chunk_size", DEFAULT_CHUNK_SIZE)),
    )
    _required(args, "out")
    return _emit_rows(args, config, "sweep")


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args._file_config = _load_config_file(getattr(args, "config", None))
        return args.func(args)
    except _UsageError as exc:
        print(f"listsim: {exc}", file=sys.stderr)
        return 1
    except InvalidParam as exc:
        print(f"listsim: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except (Overflow, ListExploded) as exc:
        print(f"listsim: runtime failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"listsim: i/o failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
