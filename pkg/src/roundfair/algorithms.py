"""Online allocation rules.

Two families are implemented.  The power-weighted family is non-adaptive: in
every round each agent receives a fraction of the item proportional to the
p-th power of her value for it, so p = 0 is equal split, p = 1 the classic
proportional rule, and p = GREEDY the winner-take-all rule.  The guarded
family (two agents, finite p) follows the same per-round rule but watches a
safety condition: the moment one agent's utility so far plus everything she
still has to come drops to exactly half her total value, the rest of that item
and all later items go to her in full.  That hand-over point is the critical
point; tracking it keeps both final utilities at or above one half.

Rounds are processed irrevocably in order and no rule ever looks ahead or
needs to know the number of rounds in advance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CriticalEvent,
    Instance,
    RunTrace,
    require_normalized,
    validate_allocation,
)
from .errors import InfiniteP, NotTwoAgents, OutOfRange, ValidationError

#: Distinguished exponent selecting the winner-take-all rule.
GREEDY = math.inf

#: Slack when deciding that a within-round trip fraction still lies in [0, 1].
#: Absorbs roundoff so a crossing that lands exactly on a round boundary is
#: never missed, which would otherwise forfeit the fair-share guarantee.
TRIP_SLACK = 1e-9


def _check_p(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 0:
        raise OutOfRange(f"exponent p must be nonnegative, got {p!r}")
    return p


def poly_round(round_values, p: float) -> np.ndarray:
    """Fractions of one item under the power-weighted rule.

    Agent i receives ``v_i**p / sum_j v_j**p`` with the convention 0**p = 0
    for p > 0.  For p = 0 the item is split equally among all agents, for
    p = GREEDY equally among the agents with the largest value, and an
    all-zero round is split equally.  Weights are computed on values scaled
    by the round maximum, so large exponents cannot overflow.  The returned
    fractions always sum to 1.
    """
    p = _check_p(p)
    values = np.asarray(round_values, dtype=float)
    n = values.shape[0]
    vmax = values.max() if n else 0.0
    if vmax <= 0.0 or p == 0.0:
        return np.full(n, 1.0 / n)
    if math.isinf(p):
        winners = values == vmax
        return winners / winners.sum()
    weights = (values / vmax) ** p
    return weights / weights.sum()


def _poly_fractions(values: np.ndarray, p: float) -> np.ndarray:
    """Vectorized :func:`poly_round` over all rounds of a T x n matrix."""
    T, n = values.shape
    if p == 0.0:
        return np.full((T, n), 1.0 / n)
    row_max = values.max(axis=1, keepdims=True)
    live = row_max > 0.0
    if math.isinf(p):
        winners = (values == row_max) & live
        counts = winners.sum(axis=1, keepdims=True)
        fractions = np.divide(
            winners, counts, out=np.zeros_like(values), where=counts > 0
        )
    else:
        scaled = np.divide(values, row_max, out=np.zeros_like(values), where=live)
        weights = scaled**p
        sums = weights.sum(axis=1, keepdims=True)
        fractions = np.divide(
            weights, sums, out=np.zeros_like(values), where=sums > 0
        )
    # Dead rounds (all zeros) are split equally; welfare-neutral, keeps rows full.
    return np.where(live, fractions, 1.0 / n)


def _trace_arrays(values: np.ndarray, fractions: np.ndarray):
    gains = values * fractions
    cumulative = np.cumsum(gains, axis=0)
    remaining = values.sum(axis=0)[None, :] - np.cumsum(values, axis=0)
    cumulative.setflags(write=False)
    remaining.setflags(write=False)
    return cumulative, remaining


def run_poly(instance: Instance, p: float) -> RunTrace:
    """Run the non-adaptive power-weighted rule over every round in order.

    Works for any number of agents.  Every round is fully distributed and no
    critical event can occur.
    """
    p = _check_p(p)
    fractions = _poly_fractions(instance.values, p)
    cumulative, remaining = _trace_arrays(instance.values, fractions)
    return RunTrace(
        allocation=validate_allocation(fractions),
        cumulative_utility=cumulative,
        remaining_value=remaining,
        critical_event=None,
    )


@dataclass(frozen=True)
class GuardedState:
    """Adaptive state carried between rounds of a guarded run.

    ``remaining_value`` counts each agent's value in the current round and
    everything after it.  Once ``tripped_agent`` is set it never changes.
    """

    round_index: int
    utility_so_far: tuple[float, float]
    remaining_value: tuple[float, float]
    tripped_agent: int | None = None


def _pair_fractions(a: float, b: float, p: float) -> tuple[float, float]:
    m = a if a >= b else b
    if m <= 0.0 or p == 0.0:
        return 0.5, 0.5
    wa = (a / m) ** p
    wb = (b / m) ** p
    s = wa + wb
    return wa / s, wb / s


def _trip_candidates(u, rem, a: float, b: float, p: float):
    """Smallest in-round fractions at which each agent's guard condition binds.

    For agent i, utility accrues at rate ``share_i`` while the item is split
    by the power rule, so after a fraction f of the round her utility plus all
    value still to come equals ``u_i + rem_i - f * (v_i - share_i)``.  Setting
    that to 1/2 is linear in f.  Only strictly decreasing surpluses can cross,
    and a computed crossing within TRIP_SLACK of [0, 1] is clamped inside.
    """
    x1, x2 = _pair_fractions(a, b, p)
    out = []
    for i, (v, x) in enumerate(((a, x1), (b, x2))):
        slope = v - v * x
        if slope > 0.0:
            f = (u[i] + rem[i] - 0.5) / slope
            if f <= 1.0 + TRIP_SLACK:
                out.append((min(max(f, 0.0), 1.0), i))
    return out


def critical_fraction(
    state: GuardedState, round_values, p: float
) -> tuple[int, float] | None:
    """Locate the first in-round critical point, if any, for the coming round.

    Returns ``(agent, f)`` where f in [0, 1] is the smallest fraction of the
    round at which that agent's utility so far plus her value still to come
    hits exactly one half; ties go to the smaller fraction, then the lower
    agent index.  Returns None when neither agent's condition can bind within
    this round.
    """
    p = _check_p(p)
    if math.isinf(p):
        raise InfiniteP("critical points are defined for finite exponents only")
    if len(state.utility_so_far) != 2 or len(round_values) != 2:
        raise NotTwoAgents("critical points are defined for two agents")
    if state.tripped_agent is not None:
        raise ValidationError("state has already tripped")
    a, b = float(round_values[0]), float(round_values[1])
    candidates = _trip_candidates(
        state.utility_so_far, state.remaining_value, a, b, p
    )
    if not candidates:
        return None
    f, agent = min(candidates)
    return agent, f


def run_guarded(instance: Instance, p: float) -> RunTrace:
    """Run the guarded rule for two agents: power-weighted until a trip.

    Before each round the guard solves for the earliest in-round critical
    point.  If one exists at fraction f, the first f of that item is split by
    the power rule, the remaining 1 - f and every later item go wholly to the
    tripped agent, and the event is recorded.  Requires a normalized two-agent
    instance and a finite exponent; both final utilities end at or above 1/2.
    """
    p = _check_p(p)
    if math.isinf(p):
        raise InfiniteP("the guarded family is defined for finite p")
    if instance.n != 2:
        raise NotTwoAgents(f"guarded runs need exactly 2 agents, got {instance.n}")
    require_normalized(instance)

    values = instance.values
    T = values.shape[0]
    fractions = np.zeros((T, 2))
    u = [0.0, 0.0]
    rem = [1.0, 1.0]
    event = None
    for t in range(T):
        a, b = float(values[t, 0]), float(values[t, 1])
        candidates = _trip_candidates(u, rem, a, b, p)
        if candidates:
            f, i = min(candidates)
            j = 1 - i
            x1, x2 = _pair_fractions(a, b, p)
            xi, xj = (x1, x2) if i == 0 else (x2, x1)
            vi, vj = (a, b) if i == 0 else (b, a)
            fractions[t, i] = f * xi + (1.0 - f)
            fractions[t, j] = f * xj
            u[i] += f * vi * xi + (1.0 - f) * vi
            u[j] += f * vj * xj
            fractions[t + 1 :, i] = 1.0
            u[i] += float(values[t + 1 :, i].sum())
            event = CriticalEvent(round_index=t, fraction=f, agent=i)
            break
        x1, x2 = _pair_fractions(a, b, p)
        fractions[t, 0] = x1
        fractions[t, 1] = x2
        u[0] += a * x1
        u[1] += b * x2
        rem[0] -= a
        rem[1] -= b

    cumulative, remaining = _trace_arrays(values, fractions)
    return RunTrace(
        allocation=validate_allocation(fractions),
        cumulative_utility=cumulative,
        remaining_value=remaining,
        critical_event=event,
    )


@dataclass(frozen=True)
class Algorithm:
    """A named online allocator: a power-weighted rule, optionally guarded."""

    name: str
    p: float
    guarded: bool = False

    def run(self, instance: Instance) -> RunTrace:
        if self.guarded:
            return run_guarded(instance, self.p)
        return run_poly(instance, self.p)


def builtin_algorithms() -> tuple[Algorithm, ...]:
    """The stock allocators exercised by the test and replay suites."""
    return (
        Algorithm("equal-split", 0.0),
        Algorithm("proportional", 1.0),
        Algorithm("quadratic", 2.0),
        Algorithm("greedy", GREEDY),
        Algorithm("guarded-2", 2.0, guarded=True),
        Algorithm("guarded-2.7", 2.7, guarded=True),
        Algorithm("guarded-3", 3.0, guarded=True),
    )


def algorithm_by_name(name: str, p: float | None = None) -> Algorithm:
    """Resolve a CLI-style algorithm name, with ``--p`` for the generic rules."""
    fixed = {
        "equal-split": Algorithm("equal-split", 0.0),
        "proportional": Algorithm("proportional", 1.0),
        "quadratic": Algorithm("quadratic", 2.0),
        "greedy": Algorithm("greedy", GREEDY),
    }
    if name in fixed:
        return fixed[name]
    if name == "poly":
        if p is None:
            raise ValidationError("algorithm 'poly' needs an exponent (--p)")
        return Algorithm(f"poly-{p:g}", _check_p(p))
    if name == "guarded":
        if p is None:
            raise ValidationError("algorithm 'guarded' needs an exponent (--p)")
        return Algorithm(f"guarded-{p:g}", _check_p(p), guarded=True)
    raise ValidationError(f"unknown algorithm {name!r}")
