"""CLI: ``plot trajectories`` and ``plot phase``.

Exit codes: 0 success, 1 bad usage or input schema, 2 output I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .figures import FigureSpec, plot_phase, plot_trajectories
from .reader import SchemaError


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="plot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", required=True, help="sweep CSV path")
        p.add_argument("--out", required=True, help="output image path")
        p.add_argument("--dpi", type=int, default=150)
        p.add_argument(
            "--format",
            dest="image_format",
            choices=["png", "svg", "pdf"],
            help="force image format (default: infer from --out suffix)",
        )

    p_traj = sub.add_parser("trajectories", help="mean error count vs step")
    add_common(p_traj)
    group = p_traj.add_mutually_exclusive_group()
    group.add_argument("--logy", dest="log_y", action="store_true", default=None)
    group.add_argument("--linear", dest="log_y", action="store_false")
    p_traj.set_defaults(kind="trajectories")

    p_phase = sub.add_parser("phase", help="phase diagram across the critical point")
    add_common(p_phase)
    p_phase.add_argument("--t", type=int, help="step to slice at (default: last)")
    p_phase.set_defaults(kind="phase")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        spec = FigureSpec(
            input=args.input,
            kind=args.kind,
            out=args.out,
            log_y=getattr(args, "log_y", None),
            dpi=args.dpi,
            t=getattr(args, "t", None),
            image_format=args.image_format,
        )
        if spec.kind == "phase":
            plot_phase(spec)
        else:
            plot_trajectories(spec)
        print(f"plot {spec.kind}: {spec.input} -> {spec.out}", file=sys.stderr)
        return 0
    except _UsageError as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 1
    except SchemaError as exc:
        print(f"plot: schema error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"plot: i/o failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
