"""Model parameters, regimes, oracles, and the synthetic classifier."""

import math

import pytest

from listsim import (
    InvalidParam,
    Regime,
    ScorerPolicy,
    make_oracle,
    make_params,
    regime,
    synthetic_eligible,
)
from listsim.core import Candidate, candidate_hash, root_candidate
from listsim.decoder import extend, initial_list
from listsim.streams import RandomSource


class TestMakeParams:
    def test_branching_factor_derived(self):
        assert make_params(20, 0.01, 50).branching_factor == pytest.approx(0.2)
        assert make_params(20, 0.1, 30).branching_factor == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "M,eps,horizon",
        [
            (1, 0.1, 30),
            (0, 0.1, 5),
            (2, -0.1, 5),
            (2, 1.5, 5),
            (2, 0.1, 0),
            (2, 0.1, -3),
        ],
    )
    def test_invalid_rejected(self, M, eps, horizon):
        with pytest.raises(InvalidParam):
            make_params(M, eps, horizon)

    def test_epsilon_bounds_are_inclusive(self):
        make_params(2, 0.0, 1)
        make_params(2, 1.0, 1)


class TestRegime:
    def test_examples(self):
        assert regime(make_params(20, 0.01, 10)) is Regime.SUBCRITICAL
        assert regime(make_params(20, 0.05, 10)) is Regime.CRITICAL
        assert regime(make_params(10, 0.2, 10)) is Regime.SUPERCRITICAL

    def test_tolerance_band(self):
        # Inside the 1e-9 band -> critical; outside -> sub/super.
        assert regime(make_params(2, (1 + 5e-10) / 2, 1)) is Regime.CRITICAL
        assert regime(make_params(2, (1 - 5e-10) / 2, 1)) is Regime.CRITICAL
        assert regime(make_params(2, (1 + 4e-9) / 2, 1)) is Regime.SUPERCRITICAL
        assert regime(make_params(2, (1 - 4e-9) / 2, 1)) is Regime.SUBCRITICAL

    def test_consistent_with_sign_outside_band(self):
        for m, eps in [(2, 0.499), (100, 0.0099), (3, 0.5), (17, 0.2)]:
            params = make_params(m, eps, 5)
            band = abs(params.branching_factor - 1.0)
            if band <= 1e-9:
                continue
            expected = (
                Regime.SUBCRITICAL
                if params.branching_factor < 1.0
                else Regime.SUPERCRITICAL
            )
            assert regime(params) is expected


class TestMakeOracle:
    def test_deterministic(self):
        p = make_params(6, 0.1, 12)
        assert make_oracle(p, 42) == make_oracle(p, 42)

    def test_token_range(self):
        p = make_params(2, 0.1, 3)
        oracle = make_oracle(p, 7)
        assert len(oracle.tokens) == 3
        assert all(t in (0, 1) for t in oracle.tokens)

    def test_distinct_seeds_differ_statistically(self):
        # Two independent uniform sequences collide with prob M^-N = 1/8
        # here; check the empirical differ-rate against 1 - 1/8.
        p = make_params(2, 0.1, 3)
        pairs = 4000
        differs = sum(
            make_oracle(p, 2 * i).tokens != make_oracle(p, 2 * i + 1).tokens
            for i in range(pairs)
        )
        rate = differs / pairs
        expected = 1 - 2 ** (-3)
        se = math.sqrt(expected * (1 - expected) / pairs)
        assert abs(rate - expected) <= 4 * se


class TestSyntheticEligible:
    @pytest.mark.parametrize("eps", [0.0, 0.3, 0.7, 1.0])
    def test_oracle_continuation_always_eligible(self, eps):
        p = make_params(3, eps, 5)
        rng = RandomSource(11, (0,))
        oracle = make_oracle(p, 5)
        prefix = root_candidate(rng)
        for t in range(p.horizon):
            ok, score = synthetic_eligible(oracle, prefix, oracle.tokens[t], p, rng)
            assert ok
            assert 0.5 < score <= 1.0
            prefix = Candidate(
                tokens=prefix.tokens + (oracle.tokens[t],),
                node_hash=candidate_hash(rng.key, prefix.tokens + (oracle.tokens[t],)),
            )

    def test_eps_zero_rejects_all_non_oracle(self):
        p = make_params(5, 0.0, 4)
        rng = RandomSource(3, (1,))
        oracle = make_oracle(p, 9)
        prefix = root_candidate(rng)
        for tok in range(p.M):
            if tok == oracle.tokens[0]:
                continue
            ok, score = synthetic_eligible(oracle, prefix, tok, p, rng)
            assert not ok
            assert 0.0 < score <= 1.0

    def test_eps_one_accepts_all(self):
        p = make_params(5, 1.0, 4)
        rng = RandomSource(3, (2,))
        oracle = make_oracle(p, 9)
        erroneous = Candidate(tokens=(0,), diverged_at=1)
        for tok in range(p.M):
            ok, _ = synthetic_eligible(oracle, erroneous, tok, p, rng)
            assert ok

    def test_false_alarm_rate_matches_epsilon(self):
        # One vectorized extension exposes >= 1e5 independent non-oracle
        # queries at once: all M-1 false-alarm slots of the root.
        m = 100_001
        eps = 0.0731
        p = make_params(m, eps, 2)
        rng = RandomSource(1301, (0,))
        oracle = make_oracle(p, 77)
        grown = extend(initial_list(rng), oracle, p, rng)
        false_alarms = grown.erroneous_count()
        n = m - 1
        se = math.sqrt(eps * (1 - eps) / n)
        assert abs(false_alarms / n - eps) <= 4 * se

    def test_repeat_queries_reproduce(self):
        p = make_params(4, 0.5, 3)
        rng = RandomSource(8, (3,))
        oracle = make_oracle(p, 1)
        prefix = Candidate(tokens=(1,), diverged_at=1)
        first = [synthetic_eligible(oracle, prefix, t, p, rng) for t in range(4)]
        second = [synthetic_eligible(oracle, prefix, t, p, rng) for t in range(4)]
        assert first == second

    def test_guards(self):
        p = make_params(3, 0.5, 2)
        rng = RandomSource(0)
        oracle = make_oracle(p, 0)
        full = Candidate(tokens=(0, 1), diverged_at=1)
        with pytest.raises(InvalidParam):
            synthetic_eligible(oracle, full, 0, p, rng)
        with pytest.raises(InvalidParam):
            synthetic_eligible(oracle, root_candidate(rng), 3, p, rng)


def test_synthetic_model_satisfies_classifier_interface():
    from listsim import EligibilityModel

    assert isinstance(synthetic_eligible, EligibilityModel)


class TestScorerPolicy:
    def test_defaults_valid(self):
        policy = ScorerPolicy()
        assert policy.oracle_low == 0.5
        assert policy.error_high == 1.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"oracle_low": 0.9, "oracle_high": 0.5},
            {"error_low": -0.1},
            {"oracle_high": 1.5},
            {"error_low": 0.5, "error_high": 0.5},
        ],
    )
    def test_invalid_ranges_rejected(self, kwargs):
        with pytest.raises(InvalidParam):
            ScorerPolicy(**kwargs)

    def test_error_scores_span_unit_interval(self):
        p = make_params(2, 1.0, 3)
        rng = RandomSource(21, (0,))
        oracle = make_oracle(p, 2)
        erroneous = Candidate(tokens=(0,), diverged_at=1)
        scores = [
            synthetic_eligible(oracle, erroneous, tok, p, rng)[1] for tok in range(2)
        ]
        assert all(0.0 < s <= 1.0 for s in scores)
