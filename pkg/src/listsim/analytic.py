"""Closed-form references for the erroneous-count process.

Under the equality-instantiated classifier the number of erroneous
candidates R_t is a branching process with immigration: each erroneous
candidate leaves Binomial(M, eps) erroneous children, and the always
surviving correct prefix immigrates Binomial(M-1, eps) new erroneous
candidates per step.  Writing a = M*eps and b = (M-1)*eps:

* exact mean:        e_0 = 0,  e_{t+1} = a*e_t + b
                     = b*(a^t - 1)/(a - 1)   (a != 1),  t*b at a = 1
* stationary bound:  e_t <= a/(1-a) for a < 1 (since b < a)
* accuracy bound:    P(R_t = 0) >= 1 - e_t >= (1-2a)/(1-a), clamped at 0
* growth floor:      a^t reference for a > 1; under the equality model the
                     provable floor is a^t - 1 (immigration is b, not a),
                     so report both rather than blur them together.
* exact zero prob:   probability generating functions.  With offspring pgf
                     g(s) = (1-eps+eps*s)^M and immigration pgf
                     h(s) = (1-eps+eps*s)^(M-1),
                     P(R_t = 0) = prod_{k=0}^{t-1} h(g^k(0)).

``brute_force_distribution`` recomputes the full law of R_t from nothing
but per-token Bernoulli(eps) outcomes (repeated two-point convolutions),
deliberately avoiding the binomial collapse, the pgf iteration and the
closed forms, so it can arbitrate between them and the Monte Carlo
engines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import ModelParams, Regime, regime
from .errors import NotSubcritical, NotSupercritical, TooLarge

# Enumeration guard for the brute-force oracle; the state space is exact
# but the intended use is arbitrating tiny configurations in tests.
BRUTE_FORCE_MAX_M = 3
BRUTE_FORCE_MAX_T = 3


def subcritical_mean_bound(params: ModelParams) -> float:
    """Uniform-in-t bound a/(1-a) on E[R_t], valid only for a < 1."""
    a = params.branching_factor
    if a >= 1.0:
        raise NotSubcritical(f"branching factor {a} >= 1: mean bound does not exist")
    return a / (1.0 - a)


def accuracy_lower_bound(params: ModelParams) -> float:
    """Markov-inequality floor max(0, (1-2a)/(1-a)) on P(R_t = 0)."""
    a = params.branching_factor
    if a >= 1.0:
        raise NotSubcritical(f"branching factor {a} >= 1: accuracy bound does not exist")
    return max(0.0, (1.0 - 2.0 * a) / (1.0 - a))


def supercritical_floor(params: ModelParams, t: int) -> float:
    """Reference exponential floor a^t for the supercritical regime.

    The equality-instantiated model provably satisfies e_t >= a^t - 1
    (its immigration term is (M-1)*eps, not M*eps); a^t is the reference
    growth rate and is reported side by side with the exact e_t.
    """
    a = params.branching_factor
    if a <= 1.0:
        raise NotSupercritical(f"branching factor {a} <= 1: no exponential floor")
    if t < 0:
        raise ValueError("t must be >= 0")
    return a**t


def exact_mean_trajectory(params: ModelParams, T: int) -> list[float]:
    """E[R_0..R_T] under the equality model, by the linear recursion."""
    if T < 0:
        raise ValueError("T must be >= 0")
    a = params.branching_factor
    b = (params.M - 1) * params.epsilon
    means = [0.0]
    e = 0.0
    for _ in range(T):
        e = a * e + b
        means.append(e)
    return means


def exact_mean_closed_form(params: ModelParams, t: int) -> float:
    """Closed form for E[R_t]; cross-checks the recursion in tests."""
    if t < 0:
        raise ValueError("t must be >= 0")
    a = params.branching_factor
    b = (params.M - 1) * params.epsilon
    if a == 1.0:
        return t * b
    return b * (a**t - 1.0) / (a - 1.0)


def exact_zero_prob_trajectory(params: ModelParams, T: int) -> list[float]:
    """P(R_0..R_T = 0) exactly, by iterating the generating functions.

    All iterates stay inside [0, 1], so the iteration is numerically
    stable in double precision without any special summation.
    """
    if T < 0:
        raise ValueError("T must be >= 0")
    eps = params.epsilon
    m = params.M

    def g(s: float) -> float:
        return (1.0 - eps + eps * s) ** m

    def h(s: float) -> float:
        return (1.0 - eps + eps * s) ** (m - 1)

    zero_probs = [1.0]
    s = 0.0
    z = 1.0
    for _ in range(T):
        z *= h(s)
        s = g(s)
        zero_probs.append(z)
    return zero_probs


def _bernoulli_sum_pmf(eps: float, m: int) -> np.ndarray:
    """Law of the number of successes among m independent Bernoulli(eps)
    coins, built by repeated two-point convolution (no binomial formula)."""
    pmf = np.array([1.0])
    coin = np.array([1.0 - eps, eps])
    for _ in range(m):
        pmf = np.convolve(pmf, coin)
    return pmf


def brute_force_distribution(params: ModelParams, T: int) -> list[np.ndarray]:
    """Exact pmf of R_t for t = 0..T by enumerating eligibility outcomes.

    Every (candidate, token) pair is an independent Bernoulli(eps) coin:
    the correct prefix exposes M-1 coins, each erroneous candidate exposes
    M.  The per-step transition convolves those per-candidate laws, so the
    result is exact and independent of the collapsed-binomial engine and
    of the pgf/closed-form paths it is used to check.
    """
    if params.M > BRUTE_FORCE_MAX_M or T > BRUTE_FORCE_MAX_T:
        raise TooLarge(
            f"brute force limited to M <= {BRUTE_FORCE_MAX_M}, T <= {BRUTE_FORCE_MAX_T}"
        )
    if T < 0:
        raise ValueError("T must be >= 0")

    immigration = _bernoulli_sum_pmf(params.epsilon, params.M - 1)
    offspring = _bernoulli_sum_pmf(params.epsilon, params.M)

    dists = [np.array([1.0])]
    for _ in range(T):
        current = dists[-1]
        # P(R_{t+1} = .) = sum_k P(R_t = k) * (immigration (*) offspring^(*k))
        per_k = immigration.copy()
        nxt = np.zeros(1)
        for k, pk in enumerate(current):
            if k > 0:
                per_k = np.convolve(per_k, offspring)
            if pk == 0.0:
                continue
            if len(per_k) > len(nxt):
                nxt = np.pad(nxt, (0, len(per_k) - len(nxt)))
            nxt[: len(per_k)] += pk * per_k
        dists.append(nxt)
    return dists


def pmf_mean(pmf: np.ndarray) -> float:
    return float(np.dot(np.arange(len(pmf)), pmf))


@dataclass(frozen=True)
class BoundReport:
    """All closed-form references for one parameter triple.

    ``mean_bound`` is finite exactly in the subcritical regime (+inf
    otherwise); ``accuracy_bound`` is clamped into [0, 1] and is vacuously
    0 outside the subcritical regime.  ``floor`` gives the reference a^t
    in the supercritical regime and None elsewhere.
    """

    regime: Regime
    mean_bound: float
    accuracy_bound: float
    floor: Optional[Callable[[int], float]]


def bound_report(params: ModelParams) -> BoundReport:
    reg = regime(params)
    if reg is Regime.SUBCRITICAL:
        return BoundReport(
            regime=reg,
            mean_bound=subcritical_mean_bound(params),
            accuracy_bound=accuracy_lower_bound(params),
            floor=None,
        )
    floor = None
    if reg is Regime.SUPERCRITICAL:
        floor = lambda t: supercritical_floor(params, t)  # noqa: E731
    return BoundReport(
        regime=reg, mean_bound=float("inf"), accuracy_bound=0.0, floor=floor
    )
