"""Domain types and the synthetic eligibility classifier.

The model: a task instance is an oracle sequence of ``horizon`` tokens from
a space of size ``M``.  A per-step binary classifier decides which tokens
may extend which candidate prefixes.  The synthetic classifier here has
perfect recall of the oracle continuation and flags every other
(prefix, token) pair eligible with probability exactly ``epsilon``,
independently across queries.  ``M * epsilon`` therefore acts as the
reproduction number of the erroneous-candidate population: below 1 the
population stays bounded in expectation, above 1 it grows exponentially.

Model assumptions (deliberate, documented):

* False alarms are independent across (step, prefix, token) queries, and
  the marginal rate is instantiated at exactly ``epsilon`` -- the boundary
  of the classifier contract, which is the sharpest case for every bound
  the test suite checks.
* The prompt only selects the oracle sequence, so a task instance is
  represented by ``instance_seed`` alone.
* Input and output token spaces are identified with one space of size M.

Classifier randomness is stateless: each query consumes a word derived by
hashing (trial stream key, candidate identity, token), so results do not
depend on query order and every trial is reproducible bit for bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Protocol, runtime_checkable

import numpy as np

from .errors import InvalidParam
from .streams import (
    RandomSource,
    _COMBINE_MUL,
    _mix64_raw,
    combine64,
    mix64,
    mix64_array,
    unit_from_bits,
    unit_from_bits_array,
)

# Tolerance band around branching factor 1.0 inside which a model is
# classified Critical rather than Sub-/Supercritical.
REGIME_TOLERANCE = 1e-9

# Purpose tags xored into a child hash to derive independent words for the
# eligibility draw and the score draw; fixed forever (output contract).
_ELIGIBLE_TAG = 0x9A3F3F8711C56D01
_SCORE_TAG = 0x5C0ED51B82A94E17
_ROOT_TAG = 0x7D2BC1A95338F60D

# Namespace separating oracle-generation streams from engine streams that
# might share the same integer seed.
_ORACLE_NAMESPACE = 0x0D0A_C1E5


class Regime(enum.Enum):
    """Phase of the erroneous-candidate growth process."""

    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class ModelParams:
    """The model triple: token-space size M, false-alarm rate, horizon N.

    ``branching_factor`` is always recomputed as ``M * epsilon`` so it can
    never drift from the stored fields.
    """

    M: int
    epsilon: float
    horizon: int

    def __post_init__(self) -> None:
        if not isinstance(self.M, int) or isinstance(self.M, bool) or self.M < 2:
            raise InvalidParam(f"M must be an integer >= 2, got {self.M!r}")
        eps = float(self.epsilon)
        if not (0.0 <= eps <= 1.0):
            raise InvalidParam(f"epsilon must lie in [0, 1], got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", eps)
        if (
            not isinstance(self.horizon, int)
            or isinstance(self.horizon, bool)
            or self.horizon < 1
        ):
            raise InvalidParam(f"horizon must be an integer >= 1, got {self.horizon!r}")

    @property
    def branching_factor(self) -> float:
        return self.M * self.epsilon


def make_params(M: int, epsilon: float, horizon: int) -> ModelParams:
    """Validated constructor; raises InvalidParam on contract violations."""
    return ModelParams(M=M, epsilon=epsilon, horizon=horizon)


def regime(params: ModelParams, tolerance: float = REGIME_TOLERANCE) -> Regime:
    """Classify by branching factor with a tolerance band around 1."""
    bf = params.branching_factor
    if bf < 1.0 - tolerance:
        return Regime.SUBCRITICAL
    if bf > 1.0 + tolerance:
        return Regime.SUPERCRITICAL
    return Regime.CRITICAL


@dataclass(frozen=True)
class OracleSequence:
    """The unique correct output for one task instance."""

    tokens: tuple[int, ...]
    instance_seed: int


def make_oracle(params: ModelParams, instance_seed: int) -> OracleSequence:
    """Deterministic uniform oracle sequence for (params, instance_seed)."""
    rng = RandomSource(instance_seed, (_ORACLE_NAMESPACE,))
    draws = rng.generator.integers(0, params.M, size=params.horizon)
    return OracleSequence(tokens=tuple(int(t) for t in draws), instance_seed=instance_seed)


@dataclass(frozen=True)
class ScorerPolicy:
    """Per-step score distributions for the probability-tracking decoder.

    Oracle continuations draw Uniform(oracle_low, oracle_high]; erroneous
    eligible continuations draw Uniform(error_low, error_high].  Defaults
    keep the oracle favored while letting erroneous candidates win
    occasionally, which makes the final argmax selection nontrivial.
    """

    name: str = "uniform"
    oracle_low: float = 0.5
    oracle_high: float = 1.0
    error_low: float = 0.0
    error_high: float = 1.0

    def __post_init__(self) -> None:
        for lo, hi, label in (
            (self.oracle_low, self.oracle_high, "oracle"),
            (self.error_low, self.error_high, "error"),
        ):
            if not (0.0 <= lo < hi <= 1.0):
                raise InvalidParam(
                    f"{label} score range must satisfy 0 <= low < high <= 1"
                )


UNIFORM_SCORER = ScorerPolicy()


@dataclass(frozen=True)
class Candidate:
    """A partial output sequence with its cumulative log score.

    ``diverged_at`` is the 1-based step at which the sequence first departs
    from the oracle; ``None`` means the tokens are an oracle prefix.
    ``node_hash`` is the candidate's identity in the stateless randomness
    scheme; it is filled in by the decoder and derived from the trial key
    and the token path.
    """

    tokens: tuple[int, ...]
    log_score: float = 0.0
    diverged_at: Optional[int] = None
    node_hash: Optional[int] = field(default=None, compare=False)

    @property
    def erroneous(self) -> bool:
        return self.diverged_at is not None


@dataclass(frozen=True)
class CandidateList:
    """The set of live candidates after ``step`` tokens.

    ``truncated`` latches once any cap-induced drop has happened;
    ``oracle_dropped`` latches once the oracle-aligned candidate was lost
    to truncation (after which a correct final answer is impossible).
    """

    step: int
    candidates: tuple[Candidate, ...]
    truncated: bool = False
    oracle_dropped: bool = False

    def erroneous_count(self) -> int:
        return sum(1 for c in self.candidates if c.diverged_at is not None)


def root_hash(key: int) -> int:
    """Identity hash of the empty candidate under a trial stream key."""
    return mix64(key ^ _ROOT_TAG)


def candidate_hash(key: int, tokens: tuple[int, ...]) -> int:
    """Recompute a candidate's identity hash from its token path."""
    h = root_hash(key)
    for tok in tokens:
        h = combine64(h, tok)
    return h


def root_candidate(rng: RandomSource) -> Candidate:
    """The empty candidate that seeds every decode (log score 0)."""
    return Candidate(tokens=(), log_score=0.0, diverged_at=None, node_hash=root_hash(rng.key))


def _eligibility_unit(child_hash: int) -> float:
    return unit_from_bits(mix64(child_hash ^ _ELIGIBLE_TAG))


def _score_unit(child_hash: int) -> float:
    return unit_from_bits(mix64(child_hash ^ _SCORE_TAG))


def eligibility_units_array(child_hashes: np.ndarray) -> np.ndarray:
    """Vectorized uniform variates deciding eligibility, one per child."""
    return unit_from_bits_array(mix64_array(child_hashes ^ np.uint64(_ELIGIBLE_TAG)))


def score_units_array(child_hashes: np.ndarray) -> np.ndarray:
    """Vectorized uniform variates feeding the score policy."""
    return unit_from_bits_array(mix64_array(child_hashes ^ np.uint64(_SCORE_TAG)))


def extension_grid(
    parent_hashes: np.ndarray, m: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All per-(candidate, token) randomness for one step, in one pass.

    Returns (child hashes, eligibility units, score units), each of shape
    (len(parent_hashes), m).  Bit-identical to evaluating the scalar
    query path pair by pair; fused here because the decoder calls this
    once per step on small arrays.
    """
    u64 = np.uint64
    with np.errstate(over="ignore"):
        tokens = np.arange(m, dtype=np.uint64)
        z = parent_hashes[:, None] * u64(_COMBINE_MUL) + tokens[None, :] + u64(1)
        child = _mix64_raw(z)
        words = _mix64_raw(
            np.stack([child ^ u64(_ELIGIBLE_TAG), child ^ u64(_SCORE_TAG)])
        )
    units = unit_from_bits_array(words)
    return child, units[0], units[1]


def oracle_score(unit: float, scorer: ScorerPolicy = UNIFORM_SCORER) -> float:
    # high - span*u maps [0,1) onto (low, high], keeping scores positive.
    return scorer.oracle_high - (scorer.oracle_high - scorer.oracle_low) * unit


def error_score(unit: float, scorer: ScorerPolicy = UNIFORM_SCORER) -> float:
    return scorer.error_high - (scorer.error_high - scorer.error_low) * unit


@runtime_checkable
class EligibilityModel(Protocol):
    """Per-step binary classifier with a score.

    Any callable with this shape can stand in for the shipped synthetic
    model: it must always accept the oracle continuation of an
    oracle-aligned prefix, and its answers must be a pure function of its
    arguments so decode trials stay reproducible.
    """

    def __call__(
        self,
        oracle: OracleSequence,
        prefix: Candidate,
        token: int,
        params: ModelParams,
        rng: RandomSource,
    ) -> tuple[bool, float]: ...


def synthetic_eligible(
    oracle: OracleSequence,
    prefix: Candidate,
    token: int,
    params: ModelParams,
    rng: RandomSource,
    scorer: ScorerPolicy = UNIFORM_SCORER,
) -> tuple[bool, float]:
    """Classify one (prefix, token) extension and score it.

    The oracle continuation of an oracle-aligned prefix is always eligible
    (perfect recall).  Every other extension is eligible with probability
    exactly ``params.epsilon``, decided by a word hashed from
    (trial key, candidate identity, token) so that repeated or reordered
    queries reproduce the same answer.
    """
    step = len(prefix.tokens)
    if step >= params.horizon:
        raise InvalidParam("prefix already at full horizon")
    if not (0 <= token < params.M):
        raise InvalidParam(f"token {token} outside [0, {params.M})")

    prefix_hash = prefix.node_hash
    if prefix_hash is None:
        prefix_hash = candidate_hash(rng.key, prefix.tokens)
    child = combine64(prefix_hash, token)

    on_oracle_path = prefix.diverged_at is None and token == oracle.tokens[step]
    if on_oracle_path:
        return True, oracle_score(_score_unit(child), scorer)
    eligible = _eligibility_unit(child) < params.epsilon
    return eligible, error_score(_score_unit(child), scorer)
