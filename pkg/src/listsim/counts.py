"""Aggregate Monte Carlo over the erroneous-count process.

Because every eligibility coin has the same success probability, the next
erroneous count given R_t is a single exact draw:

    R_{t+1} ~ Binomial(M - 1 + M * R_t, eps)

(the correct prefix exposes M-1 coins, each erroneous candidate M), which
makes one step O(1) regardless of population size and lets supercritical
trajectories run to useful depth.  numpy's Generator.binomial realizes the
exact law (inversion for small n*p, BTPE accept-reject for large), so no
normal or Poisson approximation enters the default path.

Batches are simulated in fixed-size chunks of trial indices; chunk c draws
from the stream ``rng.child(c)`` and per-chunk partial sums are reduced in
chunk order, so results are bit-identical for any worker count and the
whole batch vectorizes across trials.  Trajectories whose aggregate coin
count would overflow the trial-count limit abort at the failing step and
drop out of later-step statistics, with the abort count surfaced.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import ModelParams
from .errors import Overflow
from .streams import RandomSource, as_random_source

# Largest aggregate coin count handed to the binomial sampler.
TRIAL_COUNT_LIMIT = 2**62

# Trials per stream chunk; part of the reproducibility contract (changing
# it changes which stream each trial draws from).
DEFAULT_CHUNK_SIZE = 4096

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class ErrorCountState:
    """Scalar state of the erroneous-count process at one step."""

    step: int
    count: int


def gw_step(
    state: ErrorCountState,
    params: ModelParams,
    rng: RandomSource,
    limit: int = TRIAL_COUNT_LIMIT,
) -> ErrorCountState:
    """Advance one step with a single exact binomial draw."""
    n_coins = params.M - 1 + params.M * state.count
    if n_coins > limit:
        raise Overflow(step=state.step + 1, count=state.count)
    nxt = int(rng.generator.binomial(n_coins, params.epsilon))
    return ErrorCountState(step=state.step + 1, count=nxt)


def run_count_trial(
    params: ModelParams,
    rng: RandomSource,
    limit: int = TRIAL_COUNT_LIMIT,
) -> list[int]:
    """One trajectory R_0..R_N; raises Overflow at the failing step."""
    state = ErrorCountState(step=0, count=0)
    trajectory = [0]
    for _ in range(params.horizon):
        state = gw_step(state, params, rng, limit=limit)
        trajectory.append(state.count)
    return trajectory


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; exact at n = 0."""
    if n == 0:
        return 0.0, 1.0
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * np.sqrt(phat * (1.0 - phat) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return lo, hi


@dataclass(frozen=True)
class SummaryStats:
    """Per-step Monte Carlo estimates for a batch of trajectories.

    Index t runs 0..horizon.  ``completed[t]`` counts trials that had not
    aborted by step t; all statistics at t are over those trials.
    """

    trials: int
    steps: tuple[int, ...]
    completed: tuple[int, ...]
    mean_r: tuple[float, ...]
    variance_r: tuple[float, ...]
    ci95_r: tuple[float, ...]
    zero_frac: tuple[float, ...]
    zero_ci95: tuple[float, ...]
    aborted_trials: int

    def aborted_by(self, t: int) -> int:
        return self.trials - self.completed[t]


@dataclass(frozen=True)
class _ChunkPartial:
    completed: np.ndarray  # int64, per step
    sum_r: np.ndarray  # float64
    sum_r2: np.ndarray  # float64
    zeros: np.ndarray  # int64


def _simulate_chunk(
    params: ModelParams,
    n_trials: int,
    stream: RandomSource,
    limit: int,
) -> _ChunkPartial:
    """Vectorized trajectories for one chunk of trials."""
    m, eps, horizon = params.M, params.epsilon, params.horizon
    gen = stream.generator
    counts = np.zeros(n_trials, dtype=np.int64)
    alive = np.ones(n_trials, dtype=bool)

    completed = np.empty(horizon + 1, dtype=np.int64)
    sum_r = np.zeros(horizon + 1, dtype=np.float64)
    sum_r2 = np.zeros(horizon + 1, dtype=np.float64)
    zeros = np.empty(horizon + 1, dtype=np.int64)

    completed[0] = n_trials
    zeros[0] = n_trials

    # Counts above this would push the aggregate coin count past `limit`
    # (checked before forming M-1+M*count so the int64 product cannot wrap).
    max_count = (limit - (m - 1)) // m

    for t in range(1, horizon + 1):
        overflowing = alive & (counts > max_count)
        if overflowing.any():
            alive &= ~overflowing
        idx = np.nonzero(alive)[0]
        if idx.size:
            n_coins = m - 1 + m * counts[idx]
            counts[idx] = gen.binomial(n_coins, eps)
        live = counts[idx]
        completed[t] = idx.size
        sum_r[t] = live.sum(dtype=np.float64)
        sum_r2[t] = np.square(live, dtype=np.float64).sum(dtype=np.float64)
        zeros[t] = int((live == 0).sum())

    return _ChunkPartial(completed=completed, sum_r=sum_r, sum_r2=sum_r2, zeros=zeros)


def _stats_from_partials(
    params: ModelParams, trials: int, partials: list[_ChunkPartial]
) -> SummaryStats:
    horizon = params.horizon
    completed = np.zeros(horizon + 1, dtype=np.int64)
    sum_r = np.zeros(horizon + 1, dtype=np.float64)
    sum_r2 = np.zeros(horizon + 1, dtype=np.float64)
    zeros = np.zeros(horizon + 1, dtype=np.int64)
    # Chunk order is fixed by index, so this float reduction is
    # deterministic regardless of how many workers produced the partials.
    for part in partials:
        completed += part.completed
        sum_r += part.sum_r
        sum_r2 += part.sum_r2
        zeros += part.zeros

    mean = np.full(horizon + 1, np.nan)
    var = np.full(horizon + 1, np.nan)
    ci = np.full(horizon + 1, np.nan)
    zfrac = np.full(horizon + 1, np.nan)
    zci = np.full(horizon + 1, np.nan)
    for t in range(horizon + 1):
        n = int(completed[t])
        if n == 0:
            continue
        mu = sum_r[t] / n
        mean[t] = mu
        zfrac[t] = zeros[t] / n
        lo, hi = wilson_interval(int(zeros[t]), n)
        zci[t] = (hi - lo) / 2.0
        if n >= 2:
            v = max(0.0, (sum_r2[t] - n * mu * mu) / (n - 1))
            var[t] = v
            ci[t] = _Z95 * float(np.sqrt(v / n))

    return SummaryStats(
        trials=trials,
        steps=tuple(range(horizon + 1)),
        completed=tuple(int(c) for c in completed),
        mean_r=tuple(float(x) for x in mean),
        variance_r=tuple(float(x) for x in var),
        ci95_r=tuple(float(x) for x in ci),
        zero_frac=tuple(float(x) for x in zfrac),
        zero_ci95=tuple(float(x) for x in zci),
        aborted_trials=int(trials - completed[horizon]),
    )


def run_batch(
    params: ModelParams,
    trials: int,
    seed: int | RandomSource,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
    limit: int = TRIAL_COUNT_LIMIT,
) -> SummaryStats:
    """Per-step statistics over ``trials`` independent trajectories.

    The chunk layout (trial index // chunk_size -> stream child) is fixed,
    so the output is bit-identical for any ``workers`` value.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    rng = as_random_source(seed)

    n_chunks = (trials + chunk_size - 1) // chunk_size
    sizes = [
        min(chunk_size, trials - c * chunk_size) for c in range(n_chunks)
    ]

    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(
                pool.map(
                    lambda c: _simulate_chunk(params, sizes[c], rng.child(c), limit),
                    range(n_chunks),
                )
            )
    else:
        partials = [
            _simulate_chunk(params, sizes[c], rng.child(c), limit)
            for c in range(n_chunks)
        ]

    return _stats_from_partials(params, trials, partials)
