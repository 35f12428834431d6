"""Explicit candidate-list simulation with scoring and final selection.

Where the counts engine tracks only the scalar R_t, this engine maintains
the actual candidate set: every live prefix is extended by every token the
classifier accepts, scores accumulate in log space, an optional cap prunes
the list like a beam width (tracked explicitly because it breaks the exact
model), and the final answer is the highest-scoring full-length sequence.
Accuracy is the fraction of trials whose selected sequence equals the
oracle sequence; ties and truncation losses both count as errors and are
reported separately.

Eligibility and score draws are the stateless hashed variates from
``core``, evaluated for all (candidate, token) pairs of a step in one
vectorized pass; the result is identical to querying
``core.synthetic_eligible`` pair by pair, in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    Candidate,
    CandidateList,
    ModelParams,
    OracleSequence,
    ScorerPolicy,
    UNIFORM_SCORER,
    candidate_hash,
    extension_grid,
    make_oracle,
    root_candidate,
)
from .counts import SummaryStats, wilson_interval, _Z95
from .errors import ListExploded
from .streams import RandomSource, as_random_source

# Hard memory guard on |L_t| when no cap is configured.
DEFAULT_MAX_LIST_SIZE = 2**20


@dataclass(frozen=True)
class DecodeConfig:
    """Knobs for the explicit engine.

    ``cap`` bounds |L_t| (None = unbounded up to ``max_list_size``);
    ``selection`` names the final rule (only score-argmax is implemented).
    """

    cap: Optional[int] = None
    scorer: ScorerPolicy = UNIFORM_SCORER
    selection: str = "argmax_score"
    max_list_size: int = DEFAULT_MAX_LIST_SIZE

    def __post_init__(self) -> None:
        if self.cap is not None and self.cap < 1:
            raise ValueError("cap must be >= 1 when present")
        if self.selection != "argmax_score":
            raise ValueError(f"unknown selection rule {self.selection!r}")


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of one decode trial."""

    selected: tuple[int, ...]
    matched_oracle: bool
    r_trajectory: tuple[int, ...]
    truncated: bool
    oracle_dropped: bool


def initial_list(rng: RandomSource) -> CandidateList:
    """L_0: the singleton empty candidate (so R_0 = 0)."""
    return CandidateList(step=0, candidates=(root_candidate(rng),))


def extend(
    lst: CandidateList,
    oracle: OracleSequence,
    params: ModelParams,
    rng: RandomSource,
    scorer: ScorerPolicy = UNIFORM_SCORER,
) -> CandidateList:
    """Grow every candidate by every eligible token.

    The oracle continuation of the oracle-aligned candidate is always kept
    (perfect recall); candidates with no eligible extension simply die.
    """
    t = lst.step
    if t >= params.horizon:
        raise ValueError("candidate list already at full horizon")
    m = params.M
    next_oracle_token = oracle.tokens[t]

    parents = lst.candidates
    parent_hashes = np.array(
        [
            c.node_hash
            if c.node_hash is not None
            else candidate_hash(rng.key, c.tokens)
            for c in parents
        ],
        dtype=np.uint64,
    )
    child_hashes, elig_units, score_units = extension_grid(parent_hashes, m)
    eligible = elig_units < params.epsilon

    err_span = scorer.error_high - scorer.error_low
    orc_span = scorer.oracle_high - scorer.oracle_low

    children: list[Candidate] = []
    for i, parent in enumerate(parents):
        row = eligible[i]
        if parent.diverged_at is None:
            row[next_oracle_token] = True
        for j in np.nonzero(row)[0]:
            j = int(j)
            on_oracle = parent.diverged_at is None and j == next_oracle_token
            u = float(score_units[i, j])
            if on_oracle:
                score = scorer.oracle_high - orc_span * u
                diverged = None
            else:
                score = scorer.error_high - err_span * u
                diverged = parent.diverged_at if parent.diverged_at is not None else t + 1
            children.append(
                Candidate(
                    tokens=parent.tokens + (j,),
                    log_score=parent.log_score + math.log(score),
                    diverged_at=diverged,
                    node_hash=int(child_hashes[i, j]),
                )
            )

    return CandidateList(
        step=t + 1,
        candidates=tuple(children),
        truncated=lst.truncated,
        oracle_dropped=lst.oracle_dropped,
    )


def _rank_key(candidate: Candidate) -> tuple[float, tuple[int, ...]]:
    # Highest score first; ties resolved toward the lexicographically
    # smallest token sequence.  Oracle-blind by construction.
    return (-candidate.log_score, candidate.tokens)


def truncate(lst: CandidateList, cap: int) -> CandidateList:
    """Keep the ``cap`` best-scoring candidates (deterministic tie-break)."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if len(lst.candidates) <= cap:
        return lst
    ranked = sorted(lst.candidates, key=_rank_key)
    kept = tuple(ranked[:cap])
    dropped_oracle = any(c.diverged_at is None for c in ranked[cap:])
    return CandidateList(
        step=lst.step,
        candidates=kept,
        truncated=True,
        oracle_dropped=lst.oracle_dropped or dropped_oracle,
    )


def final_select(lst: CandidateList) -> tuple[int, ...]:
    """Token sequence of the best-scoring candidate (oracle-blind)."""
    if not lst.candidates:
        raise ValueError("cannot select from an empty candidate list")
    return min(lst.candidates, key=_rank_key).tokens


def decode(
    params: ModelParams,
    oracle: OracleSequence,
    config: DecodeConfig,
    rng: RandomSource,
) -> DecodeResult:
    """Run the full list decode for one trial.

    Raises ListExploded when no cap is configured and the list could cross
    ``config.max_list_size`` on the next extension.
    """
    lst = initial_list(rng)
    r_trajectory = [0]
    for _ in range(params.horizon):
        if config.cap is None and len(lst.candidates) * params.M > config.max_list_size:
            raise ListExploded(
                f"candidate list of {len(lst.candidates)} could exceed "
                f"{config.max_list_size} at step {lst.step + 1}; set a cap "
                "or use the counts engine"
            )
        lst = extend(lst, oracle, params, rng, config.scorer)
        if config.cap is not None:
            lst = truncate(lst, config.cap)
        r_trajectory.append(lst.erroneous_count())

    selected = final_select(lst)
    return DecodeResult(
        selected=selected,
        matched_oracle=selected == oracle.tokens,
        r_trajectory=tuple(r_trajectory),
        truncated=lst.truncated,
        oracle_dropped=lst.oracle_dropped,
    )


@dataclass(frozen=True)
class DecodeBatchResult:
    """Batch accuracy plus the same per-step statistics the counts engine
    reports, so the two engines can be compared row for row."""

    stats: SummaryStats
    accuracy: float
    accuracy_ci95: float
    zero_frac_final: float
    trials: int
    exploded_trials: int
    truncated_trials: int
    oracle_dropped_trials: int


@dataclass
class _TrialBlockSums:
    sum_r: np.ndarray
    sum_r2: np.ndarray
    zeros: np.ndarray
    matches: int = 0
    exploded: int = 0
    truncated: int = 0
    oracle_dropped: int = 0


def _decode_trial_block(
    params: ModelParams,
    config: DecodeConfig,
    rng: RandomSource,
    start: int,
    stop: int,
) -> _TrialBlockSums:
    horizon = params.horizon
    acc = _TrialBlockSums(
        sum_r=np.zeros(horizon + 1, dtype=np.int64),
        sum_r2=np.zeros(horizon + 1, dtype=np.int64),
        zeros=np.zeros(horizon + 1, dtype=np.int64),
    )
    for i in range(start, stop):
        oracle = make_oracle(params, instance_seed=i)
        try:
            result = decode(params, oracle, config, rng.child(i))
        except ListExploded:
            acc.exploded += 1
            continue
        traj = np.asarray(result.r_trajectory, dtype=np.int64)
        acc.sum_r += traj
        acc.sum_r2 += traj * traj
        acc.zeros += traj == 0
        acc.matches += result.matched_oracle
        acc.truncated += result.truncated
        acc.oracle_dropped += result.oracle_dropped
    return acc


def run_decode_batch(
    params: ModelParams,
    config: DecodeConfig,
    trials: int,
    seed: int | RandomSource,
    workers: int = 1,
) -> DecodeBatchResult:
    """Decode ``trials`` independent instances and aggregate.

    Trial i draws a fresh oracle from instance seed i and classifier
    randomness from the stream child i, so trials are independent units;
    they may run on any worker in any order because the per-block partial
    sums are integers and are reduced in a fixed block order.  Exploded
    trials are excluded from all statistics and surfaced in
    ``exploded_trials``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = as_random_source(seed)
    horizon = params.horizon

    block = 2048
    ranges = [(s, min(s + block, trials)) for s in range(0, trials, block)]
    if workers > 1 and len(ranges) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda r: _decode_trial_block(params, config, rng, r[0], r[1]),
                    ranges,
                )
            )
    else:
        parts = [_decode_trial_block(params, config, rng, s, e) for s, e in ranges]

    sum_r = np.zeros(horizon + 1, dtype=np.int64)
    sum_r2 = np.zeros(horizon + 1, dtype=np.int64)
    zeros = np.zeros(horizon + 1, dtype=np.int64)
    matches = exploded = truncated_trials = oracle_dropped_trials = 0
    for part in parts:
        sum_r += part.sum_r
        sum_r2 += part.sum_r2
        zeros += part.zeros
        matches += part.matches
        exploded += part.exploded
        truncated_trials += part.truncated
        oracle_dropped_trials += part.oracle_dropped

    completed = trials - exploded
    mean = np.full(horizon + 1, np.nan)
    var = np.full(horizon + 1, np.nan)
    ci = np.full(horizon + 1, np.nan)
    zfrac = np.full(horizon + 1, np.nan)
    zci = np.full(horizon + 1, np.nan)
    if completed > 0:
        mean = sum_r / completed
        zfrac = zeros / completed
        zlohi = [wilson_interval(int(z), completed) for z in zeros]
        zci = np.array([(hi - lo) / 2.0 for lo, hi in zlohi])
        if completed >= 2:
            var = np.maximum(
                0.0, (sum_r2 - completed * mean * mean) / (completed - 1)
            )
            ci = _Z95 * np.sqrt(var / completed)

    stats = SummaryStats(
        trials=trials,
        steps=tuple(range(horizon + 1)),
        completed=tuple([completed] * (horizon + 1)),
        mean_r=tuple(float(x) for x in mean),
        variance_r=tuple(float(x) for x in var),
        ci95_r=tuple(float(x) for x in ci),
        zero_frac=tuple(float(x) for x in zfrac),
        zero_ci95=tuple(float(x) for x in zci),
        aborted_trials=exploded,
    )
    accuracy = matches / completed if completed else float("nan")
    acc_ci = (
        _Z95 * float(np.sqrt(accuracy * (1.0 - accuracy) / completed))
        if completed
        else float("nan")
    )
    return DecodeBatchResult(
        stats=stats,
        accuracy=accuracy,
        accuracy_ci95=acc_ci,
        zero_frac_final=float(zfrac[horizon]),
        trials=trials,
        exploded_trials=exploded,
        truncated_trials=truncated_trials,
        oracle_dropped_trials=oracle_dropped_trials,
    )


def accuracy_estimate(
    params: ModelParams,
    config: DecodeConfig,
    trials: int,
    seed: int | RandomSource,
) -> tuple[float, float, float]:
    """(accuracy, ci95 half-width, final-step zero fraction)."""
    batch = run_decode_batch(params, config, trials, seed)
    return batch.accuracy, batch.accuracy_ci95, batch.zero_frac_final
