"""Parameter sweeps across the critical point, with analytic references.

A sweep runs one engine over an increasing epsilon grid and emits one row
per (epsilon, step) pairing Monte Carlo estimates with the exact mean, the
exact zero probability, and whichever closed-form bounds the regime
admits.  Output is a fixed-schema CSV (UTF-8, '.' decimal, header row,
LF line endings) or a JSON array mirroring the same fields; for a fixed
config the bytes are identical across runs and worker counts.

Grid point i draws all of its randomness from the stream child i of the
configured seed, so points can run concurrently in any order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .analytic import (
    accuracy_lower_bound,
    exact_mean_trajectory,
    exact_zero_prob_trajectory,
    subcritical_mean_bound,
)
from .core import ScorerPolicy, UNIFORM_SCORER, make_params, regime
from .counts import DEFAULT_CHUNK_SIZE, run_batch
from .decoder import DecodeConfig, run_decode_batch
from .errors import InvalidParam
from .streams import RandomSource

SWEEP_COLUMNS = (
    "engine",
    "M",
    "epsilon",
    "m_eps",
    "t",
    "trials",
    "mean_R",
    "mean_ci95",
    "zero_frac",
    "zero_ci95",
    "exact_mean",
    "exact_zero_prob",
    "bound_mean",
    "bound_accuracy",
    "paper_floor",
    "aborted_trials",
)

ENGINE_COUNTS = "counts"
ENGINE_DECODE = "decode"


@dataclass(frozen=True)
class SweepRow:
    """One (epsilon, step) line of a sweep; see SWEEP_COLUMNS for order."""

    engine: str
    M: int
    epsilon: float
    m_eps: float
    t: int
    trials: int
    mean_R: float
    mean_ci95: float
    zero_frac: float
    zero_ci95: float
    exact_mean: float
    exact_zero_prob: float
    bound_mean: Optional[float]
    bound_accuracy: Optional[float]
    paper_floor: Optional[float]
    aborted_trials: int


@dataclass(frozen=True)
class SweepConfig:
    """Sweep definition; epsilon_grid must be strictly increasing in [0, 1]."""

    M: int
    epsilon_grid: tuple[float, ...]
    horizon: int
    trials: int
    seed: int
    engine: str = ENGINE_COUNTS
    cap: Optional[int] = None
    scorer: ScorerPolicy = UNIFORM_SCORER
    workers: int = 1
    chunk_size: int = DEFAULT_CHUNK_SIZE

    def __post_init__(self) -> None:
        if self.engine not in (ENGINE_COUNTS, ENGINE_DECODE):
            raise InvalidParam(f"unknown engine {self.engine!r}")
        if not self.epsilon_grid:
            raise InvalidParam("epsilon grid is empty")
        if any(not (0.0 <= e <= 1.0) for e in self.epsilon_grid):
            raise InvalidParam("epsilon grid values must lie in [0, 1]")
        if any(
            b <= a for a, b in zip(self.epsilon_grid, self.epsilon_grid[1:])
        ):
            raise InvalidParam("epsilon grid must be strictly increasing")
        if self.trials < 1:
            raise InvalidParam("trials must be >= 1")
        if self.workers < 1:
            raise InvalidParam("workers must be >= 1")
        # Fail fast on an invalid (M, horizon) combination.
        make_params(self.M, self.epsilon_grid[0], self.horizon)


def parse_epsilon_grid(text: str) -> tuple[float, ...]:
    """Parse 'start:stop:step' (inclusive, within float tolerance) or a
    comma-separated list of values."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidParam(f"grid triple must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise InvalidParam("grid step must be positive")
        values = []
        k = 0
        while True:
            v = start + k * step
            if v > stop + step * 1e-9:
                break
            values.append(v)
            k += 1
        if not values:
            raise InvalidParam(f"grid {text!r} contains no points")
        return tuple(values)
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise InvalidParam(f"bad epsilon grid {text!r}") from exc


def _sweep_point(config: SweepConfig, grid_index: int, eps: float) -> list[SweepRow]:
    params = make_params(config.M, eps, config.horizon)
    exact_means = exact_mean_trajectory(params, config.horizon)
    exact_zeros = exact_zero_prob_trajectory(params, config.horizon)
    bf = params.branching_factor
    bound_mean = subcritical_mean_bound(params) if bf < 1.0 else None
    bound_accuracy = accuracy_lower_bound(params) if bf < 1.0 else None

    rng = RandomSource(config.seed).child(grid_index)
    if config.engine == ENGINE_COUNTS:
        stats = run_batch(
            params, config.trials, rng, chunk_size=config.chunk_size
        )
        aborted_at = [config.trials - c for c in stats.completed]
    else:
        batch = run_decode_batch(
            params,
            DecodeConfig(cap=config.cap, scorer=config.scorer),
            config.trials,
            rng,
        )
        stats = batch.stats
        aborted_at = [batch.exploded_trials] * (config.horizon + 1)

    rows = []
    for t in range(config.horizon + 1):
        rows.append(
            SweepRow(
                engine=config.engine,
                M=config.M,
                epsilon=eps,
                m_eps=bf,
                t=t,
                trials=config.trials,
                mean_R=stats.mean_r[t],
                mean_ci95=stats.ci95_r[t],
                zero_frac=stats.zero_frac[t],
                zero_ci95=stats.zero_ci95[t],
                exact_mean=exact_means[t],
                exact_zero_prob=exact_zeros[t],
                bound_mean=bound_mean,
                bound_accuracy=bound_accuracy,
                paper_floor=bf**t if bf > 1.0 else None,
                aborted_trials=aborted_at[t],
            )
        )
    return rows


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """All rows of the sweep, ordered by (epsilon, t).

    Byte-determinism: each grid point is a pure function of (config, grid
    index), results are assembled in grid order, so worker count and
    scheduling cannot change the output.
    """
    indexed = list(enumerate(config.epsilon_grid))
    if config.workers > 1 and len(indexed) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            per_point = list(
                pool.map(lambda ie: _sweep_point(config, ie[0], ie[1]), indexed)
            )
    else:
        per_point = [_sweep_point(config, i, e) for i, e in indexed]
    return [row for rows in per_point for row in rows]


def flag_inconsistent_rows(rows: list[SweepRow]) -> list[int]:
    """Indices of rows whose Monte Carlo mean sits more than 4 standard
    errors from the exact mean (statistically expected to be ~none)."""
    flagged = []
    for i, row in enumerate(rows):
        if not (math.isfinite(row.mean_R) and math.isfinite(row.mean_ci95)):
            continue
        se = row.mean_ci95 / 1.959963984540054
        if abs(row.mean_R - row.exact_mean) > 4.0 * se:
            flagged.append(i)
    return flagged


def all_trials_aborted(rows: list[SweepRow]) -> bool:
    return any(row.aborted_trials >= row.trials for row in rows)


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[SweepRow]) -> str:
    """Fixed-schema CSV text; identical bytes for identical rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_cell(getattr(row, col)) for col in SWEEP_COLUMNS])
    return buf.getvalue()


def _jsonable(value: object) -> object:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def rows_to_json(rows: list[SweepRow]) -> str:
    """JSON array mirroring the CSV rows (non-finite values become null)."""
    payload = [
        {col: _jsonable(getattr(row, col)) for col in SWEEP_COLUMNS} for row in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def point_report(M: int, epsilon: float, t: int) -> dict:
    """Machine-readable regime/bound/exact summary for one parameter triple."""
    params = make_params(M, epsilon, t)
    bf = params.branching_factor
    reg = regime(params)
    exact_means = exact_mean_trajectory(params, t)
    exact_zeros = exact_zero_prob_trajectory(params, t)
    return {
        "M": M,
        "epsilon": epsilon,
        "m_eps": bf,
        "t": t,
        "regime": reg.value,
        "bound_mean": subcritical_mean_bound(params) if bf < 1.0 else None,
        "bound_accuracy": accuracy_lower_bound(params) if bf < 1.0 else None,
        "paper_floor": bf**t if bf > 1.0 else None,
        "exact_mean": exact_means[t],
        "exact_zero_prob": exact_zeros[t],
    }


def format_point_report(report: dict) -> str:
    """Human-readable rendering of ``point_report`` output."""
    lines = [
        f"M={report['M']} epsilon={report['epsilon']} t={report['t']} "
        f"(branching factor {report['m_eps']:.6g})",
        f"regime:            {report['regime']}",
    ]
    if report["bound_mean"] is not None:
        lines.append(f"mean bound:        {report['bound_mean']:.12g}")
        lines.append(f"accuracy bound:    {report['bound_accuracy']:.12g}")
    if report["paper_floor"] is not None:
        lines.append(f"exponential floor: {report['paper_floor']:.12g}")
    lines.append(f"exact mean:        {report['exact_mean']:.12g}")
    lines.append(f"exact zero prob:   {report['exact_zero_prob']:.12g}")
    return "\n".join(lines)
