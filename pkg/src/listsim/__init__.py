"""Branching-process simulator for list-decoding error growth.

Simulates an idealized sequence generator that keeps a list of candidate
outputs, extending them through a synthetic eligibility classifier with
perfect recall and false-alarm rate epsilon over a token space of size M.
The number of erroneous candidates evolves as a branching process with
immigration whose reproduction number is M*epsilon; the package provides
closed-form references, two Monte Carlo engines (aggregate counts and
explicit candidate lists), and a sweep harness that emits deterministic
CSV/JSON around the critical point M*epsilon = 1.
"""

from .analytic import (
    BoundReport,
    accuracy_lower_bound,
    bound_report,
    brute_force_distribution,
    exact_mean_closed_form,
    exact_mean_trajectory,
    exact_zero_prob_trajectory,
    subcritical_mean_bound,
    supercritical_floor,
)
from .core import (
    Candidate,
    CandidateList,
    EligibilityModel,
    ModelParams,
    OracleSequence,
    Regime,
    ScorerPolicy,
    UNIFORM_SCORER,
    make_oracle,
    make_params,
    regime,
    synthetic_eligible,
)
from .counts import (
    ErrorCountState,
    SummaryStats,
    gw_step,
    run_batch,
    run_count_trial,
    wilson_interval,
)
from .decoder import (
    DecodeConfig,
    DecodeResult,
    accuracy_estimate,
    decode,
    extend,
    final_select,
    run_decode_batch,
    truncate,
)
from .errors import (
    InvalidParam,
    ListExploded,
    NotSubcritical,
    NotSupercritical,
    Overflow,
    TooLarge,
)
from .streams import RandomSource, derive_stream
from .sweep import (
    SweepConfig,
    SweepRow,
    parse_epsilon_grid,
    point_report,
    rows_to_csv,
    rows_to_json,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "Candidate",
    "CandidateList",
    "DecodeConfig",
    "DecodeResult",
    "EligibilityModel",
    "ErrorCountState",
    "InvalidParam",
    "ListExploded",
    "ModelParams",
    "NotSubcritical",
    "NotSupercritical",
    "OracleSequence",
    "Overflow",
    "RandomSource",
    "Regime",
    "ScorerPolicy",
    "SummaryStats",
    "SweepConfig",
    "SweepRow",
    "TooLarge",
    "UNIFORM_SCORER",
    "accuracy_estimate",
    "accuracy_lower_bound",
    "bound_report",
    "brute_force_distribution",
    "decode",
    "derive_stream",
    "exact_mean_closed_form",
    "exact_mean_trajectory",
    "exact_zero_prob_trajectory",
    "extend",
    "final_select",
    "gw_step",
    "make_oracle",
    "make_params",
    "parse_epsilon_grid",
    "point_report",
    "regime",
    "rows_to_csv",
    "rows_to_json",
    "run_batch",
    "run_count_trial",
    "run_decode_batch",
    "run_sweep",
    "subcritical_mean_bound",
    "supercritical_floor",
    "synthetic_eligible",
    "truncate",
    "wilson_interval",
]
