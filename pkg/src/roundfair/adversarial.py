"""Worst-case analysis: closed-form welfare ratios, a numeric minimizer, and
the adversarial constructions that realize them.

Each ``alpha_*`` function is the welfare ratio of an allocation rule on a
small parametric family of two-agent instances, reduced to closed form; the
instance constructors below map parameter points back to explicit instances
so every closed form can be cross-checked by simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize as _nm_minimize

from .algorithms import Algorithm
from .core import Instance, validate_instance
from .errors import (
    DomainError,
    EmptyDomain,
    InfeasibleClosedForm,
    NotPerfectSquare,
    OutOfRange,
    PNotAboveTwo,
)
from .metrics import audit

#: Feasibility slack for the two-round critical-point closed forms.  Points
#: quoted to a few digits can land a hair outside the exact region; within
#: this slack the ratio is still evaluated (never clamped), beyond it the
#: point is rejected.
CLOSED_FORM_SLACK = 1e-3


# ---------------------------------------------------------------------------
# closed-form welfare ratios


def alpha_proportional(v1: float, v2: float) -> float:
    """Welfare ratio of the proportional rule on the crossed two-round family.

    Agent 1 values the rounds (v1, 1-v1) and agent 2 (1-v2, v2), with
    v1 + v2 >= 1 so the optimum takes the diagonal.
    """
    if not (0.0 < v1 <= 1.0 and 0.0 < v2 <= 1.0 and v1 + v2 >= 1.0):
        raise DomainError(f"need 0 < v1, v2 <= 1 with v1 + v2 >= 1, got ({v1!r}, {v2!r})")
    return 2.0 * (1.0 + 2.0 * v1 * v2 - v1 - v2) / (
        (1.0 - (v1 - v2) ** 2) * (v1 + v2)
    )


def alpha_poly_two_round(p: float, v1: float, v2: float) -> float:
    """Welfare ratio of the power-weighted rule (exponent p) on the same family."""
    if p <= 0:
        raise DomainError(f"need p > 0, got {p!r}")
    if not (0.0 < v1 <= 1.0 and 0.0 < v2 <= 1.0 and v1 + v2 > 1.0):
        raise DomainError(f"need 0 < v1, v2 <= 1 with v1 + v2 > 1, got ({v1!r}, {v2!r})")
    a = ((1.0 - v1) ** (p + 1) + v2 ** (p + 1)) / ((1.0 - v1) ** p + v2**p)
    b = ((1.0 - v2) ** (p + 1) + v1 ** (p + 1)) / ((1.0 - v2) ** p + v1**p)
    return (a + b) / (v1 + v2)


def alpha_guarded_cp1(p: float, lambda1: float) -> float:
    """Guarded-rule welfare ratio when the guard trips at the end of round 1.

    ``lambda1`` is the opponent-to-holder value ratio on the first item; the
    construction forces lambda1 >= 1.
    """
    if p <= 0:
        raise DomainError(f"need p > 0, got {p!r}")
    if lambda1 < 1.0:
        raise DomainError(f"need lambda1 >= 1, got {lambda1!r}")
    lp = lambda1**p
    return (lp + lp * lambda1) / (3.0 * lp - 1.0)


def _cp2_rounds(p: float, lambda1: float, lambda2: float):
    """Round values implied by a trip at the end of round 2, from the tight
    utility and exhaustion conditions.  Returns (v1, v2, v3, denominator)."""
    l1p = lambda1**p
    l2p = lambda2**p
    l2q = lambda2 ** (p - 1)
    den = l1p * (1.0 + l2p) - lambda1 * l2q * (1.0 + l1p)
    if den <= 0.0:
        raise DomainError(
            f"singular construction at ({lambda1!r}, {lambda2!r}): "
            "the tight conditions admit no solution here"
        )
    v1 = (1.0 + l2p - 2.0 * l2q) * (1.0 + l1p) / (2.0 * den)
    v2 = (1.0 - v1 * lambda1) / lambda2
    v3 = 1.0 - v1 - v2
    return v1, v2, v3, den


def alpha_guarded_cp2(
    p: float,
    lambda1: float,
    lambda2: float,
    subcase: str = "mixed",
    slack: float = CLOSED_FORM_SLACK,
) -> float:
    """Guarded-rule welfare ratio when the guard trips at the end of round 2.

    The first two items have opponent-to-holder ratios lambda1 and lambda2 and
    the third item is valued by agent 1 only.  ``subcase`` picks the region:
    "mixed" has lambda1 > 1 > lambda2 > 0 and "both_above" lambda1, lambda2 > 1;
    the optimum differs between them.  Derived round values more than ``slack``
    below zero mean no instance realizes the point (InfeasibleClosedForm).
    """
    if p <= 0:
        raise DomainError(f"need p > 0, got {p!r}")
    if subcase == "mixed":
        if not (lambda1 > 1.0 and 0.0 < lambda2 < 1.0):
            raise DomainError(
                f"mixed subcase needs lambda1 > 1 > lambda2 > 0, got ({lambda1!r}, {lambda2!r})"
            )
    elif subcase == "both_above":
        if not (lambda1 > 1.0 and lambda2 > 1.0):
            raise DomainError(
                f"both_above subcase needs lambda1, lambda2 > 1, got ({lambda1!r}, {lambda2!r})"
            )
    else:
        raise DomainError(f"unknown subcase {subcase!r}")

    v1, v2, v3, _ = _cp2_rounds(p, lambda1, lambda2)
    if v1 < -slack or v2 < -slack or v3 < -slack:
        raise InfeasibleClosedForm(
            f"derived rounds ({v1!r}, {v2!r}, {v3!r}) are negative at "
            f"({lambda1!r}, {lambda2!r})"
        )
    l1p = lambda1**p
    l2p = lambda2**p
    alg = 0.5 + v1 * lambda1 * l1p / (1.0 + l1p) + v2 * lambda2 * l2p / (1.0 + l2p)
    if subcase == "mixed":
        opt = 2.0 - v1 - v2 * lambda2
    else:
        opt = 2.0 - v1 - v2
    return alg / opt


# ---------------------------------------------------------------------------
# search over the closed forms


@dataclass(frozen=True)
class AlphaObjective:
    """A named ratio function over an open box, with optional grid evaluation.

    ``evaluate`` raises DomainError outside the feasible set;
    ``evaluate_grid`` takes meshgrid coordinate arrays and returns ratios with
    NaN at infeasible points.  ``margin`` keeps the search away from the open
    boundary and its singular denominators.
    """

    name: str
    bounds: tuple[tuple[float, float], ...]
    evaluate: Callable[[Sequence[float]], float]
    evaluate_grid: Callable[..., np.ndarray] | None = None
    p: float | None = None
    margin: float = 1e-6

    @property
    def dimension(self) -> int:
        return len(self.bounds)


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a grid-then-refine minimization."""

    argmin: tuple[float, ...]
    value: float
    evaluations: int
    refined: bool


def minimize_alpha(
    objective: AlphaObjective, grid_step: float = 1e-3, refine_tol: float = 1e-9
) -> SearchResult:
    """Minimize a ratio objective: coarse grid scan, then simplex refinement.

    The grid covers the domain shrunk by ``margin`` at step ``grid_step`` in
    row-major order (first minimum wins ties), and a Nelder-Mead descent from
    the best grid point runs until the point moves less than ``refine_tol``.
    Fully deterministic.
    """
    if grid_step <= 0 or refine_tol <= 0:
        raise OutOfRange("grid_step and refine_tol must be positive")
    axes = []
    for lo, hi in objective.bounds:
        start, stop = lo + objective.margin, hi - objective.margin
        if stop <= start:
            raise EmptyDomain(f"objective {objective.name!r} has an empty box")
        ax = np.arange(start, stop, grid_step)
        if ax.size == 0 or ax[-1] < stop - 1e-15:
            ax = np.append(ax, stop)
        axes.append(ax)

    mesh = np.meshgrid(*axes, indexing="ij")
    if objective.evaluate_grid is not None:
        with np.errstate(all="ignore"):
            grid_vals = np.asarray(objective.evaluate_grid(*mesh), dtype=float)
    else:
        grid_vals = np.empty(mesh[0].shape)
        flat = [m.reshape(-1) for m in mesh]
        out = grid_vals.reshape(-1)
        for k in range(out.size):
            point = tuple(f[k] for f in flat)
            try:
                out[k] = objective.evaluate(point)
            except DomainError:
                out[k] = math.nan
    evaluations = grid_vals.size
    if np.all(np.isnan(grid_vals)):
        raise EmptyDomain(f"objective {objective.name!r} has no feasible grid point")

    best_flat = int(np.nanargmin(grid_vals))
    x0 = np.array(
        [m.reshape(-1)[best_flat] for m in mesh], dtype=float
    )
    best_val = float(grid_vals.reshape(-1)[best_flat])

    lows = np.array([lo + objective.margin for lo, _ in objective.bounds])
    highs = np.array([hi - objective.margin for _, hi in objective.bounds])

    def penalized(x: np.ndarray) -> float:
        if np.any(x < lows) or np.any(x > highs):
            return 1e9
        try:
            val = objective.evaluate(tuple(x))
        except DomainError:
            return 1e9
        return val if math.isfinite(val) else 1e9

    res = _nm_minimize(
        penalized,
        x0,
        method="Nelder-Mead",
        options={
            "xatol": refine_tol,
            "fatol": 1e-15,
            "maxiter": 600 * objective.dimension,
            "maxfev": 600 * objective.dimension,
        },
    )
    evaluations += int(res.nfev)
    refined = False
    argmin = x0
    if res.x is not None and penalized(np.asarray(res.x)) <= best_val:
        argmin = np.asarray(res.x, dtype=float)
        refined = True
    value = objective.evaluate(tuple(argmin))
    return SearchResult(
        argmin=tuple(float(v) for v in argmin),
        value=float(value),
        evaluations=evaluations,
        refined=refined,
    )


def proportional_objective() -> AlphaObjective:
    """Ratio of the proportional rule over the crossed two-round family."""

    def grid(v1, v2):
        num = 2.0 * (1.0 + 2.0 * v1 * v2 - v1 - v2)
        den = (1.0 - (v1 - v2) ** 2) * (v1 + v2)
        out = num / den
        out[v1 + v2 < 1.0] = np.nan
        return out

    return AlphaObjective(
        name="proportional",
        bounds=((0.0, 1.0), (0.0, 1.0)),
        evaluate=lambda x: alpha_proportional(x[0], x[1]),
        evaluate_grid=grid,
        p=1.0,
    )


def poly_two_round_objective(p: float) -> AlphaObjective:
    """Ratio of the power-weighted rule over the crossed two-round family."""
    if p <= 0:
        raise DomainError(f"need p > 0, got {p!r}")

    def grid(v1, v2):
        a = ((1.0 - v1) ** (p + 1) + v2 ** (p + 1)) / ((1.0 - v1) ** p + v2**p)
        b = ((1.0 - v2) ** (p + 1) + v1 ** (p + 1)) / ((1.0 - v2) ** p + v1**p)
        out = (a + b) / (v1 + v2)
        out[v1 + v2 <= 1.0] = np.nan
        return out

    return AlphaObjective(
        name="poly-two-round",
        bounds=((0.0, 1.0), (0.0, 1.0)),
        evaluate=lambda x: alpha_poly_two_round(p, x[0], x[1]),
        evaluate_grid=grid,
        p=p,
    )


def poly_two_round_diagonal_objective(p: float) -> AlphaObjective:
    """The same ratio restricted to the symmetric diagonal v1 = v2."""
    if p <= 0:
        raise DomainError(f"need p > 0, got {p!r}")

    def grid(v):
        a = ((1.0 - v) ** (p + 1) + v ** (p + 1)) / ((1.0 - v) ** p + v**p)
        return 2.0 * a / (2.0 * v)

    return AlphaObjective(
        name="poly-two-round-diagonal",
        bounds=((0.5, 1.0),),
        evaluate=lambda x: alpha_poly_two_round(p, x[0], x[0]),
        evaluate_grid=grid,
        p=p,
    )


def guard_ratio_ceiling(p: float) -> float:
    """Largest first-round ratio lambda1 the trip-at-round-1 family can realize.

    The second agent's implied first-round value grows with lambda1 and hits
    her whole unit budget where ``2 x**(p-1) - x**p - 1`` crosses zero; beyond
    that no instance exists.  Only exponents above 2 admit any such instance.
    """
    if p <= 2.0:
        raise DomainError(f"the guard cannot bind at the end of round 1 for p <= 2, got {p!r}")

    def h(x: float) -> float:
        return 2.0 * x ** (p - 1.0) - x**p - 1.0

    hi = 1.5
    while h(hi) > 0.0:
        hi *= 1.5
        if hi > 1e6:
            raise DomainError(f"no feasibility ceiling found for p = {p!r}")
    return float(brentq(h, 1.0 + 1e-12, hi, xtol=1e-13))


def guarded_cp1_objective(p: float) -> AlphaObjective:
    """Trip-at-round-1 ratio over its constructible lambda1 range."""
    ceiling = guard_ratio_ceiling(p)

    def grid(lam):
        lp = lam**p
        return (lp + lp * lam) / (3.0 * lp - 1.0)

    return AlphaObjective(
        name="guarded-cp1",
        bounds=((1.0, ceiling),),
        evaluate=lambda x: alpha_guarded_cp1(p, x[0]),
        evaluate_grid=grid,
        p=p,
    )


def guarded_cp2_objective(p: float, subcase: str = "mixed") -> AlphaObjective:
    """Trip-at-round-2 ratio over one subcase region."""
    ceiling = guard_ratio_ceiling(p)
    if subcase == "mixed":
        bounds = ((1.0, ceiling), (0.0, 1.0))
    elif subcase == "both_above":
        bounds = ((1.0, ceiling), (1.0, 16.0))
    else:
        raise DomainError(f"unknown subcase {subcase!r}")

    def grid(l1, l2):
        l1p = l1**p
        l2p = l2**p
        l2q = l2 ** (p - 1.0)
        den = l1p * (1.0 + l2p) - l1 * l2q * (1.0 + l1p)
        v1 = (1.0 + l2p - 2.0 * l2q) * (1.0 + l1p) / (2.0 * den)
        v2 = (1.0 - v1 * l1) / l2
        v3 = 1.0 - v1 - v2
        alg = 0.5 + v1 * l1 * l1p / (1.0 + l1p) + v2 * l2 * l2p / (1.0 + l2p)
        opt = 2.0 - v1 - v2 * l2 if subcase == "mixed" else 2.0 - v1 - v2
        out = alg / opt
        bad = (den <= 0.0) | (v1 < 0.0) | (v2 < 0.0) | (v3 < 0.0)
        out[bad] = np.nan
        return out

    return AlphaObjective(
        name=f"guarded-cp2-{subcase.replace('_', '-')}",
        bounds=bounds,
        evaluate=lambda x: alpha_guarded_cp2(p, x[0], x[1], subcase, slack=0.0),
        evaluate_grid=grid,
        p=p,
    )


def objective_by_name(name: str, p: float | None = None) -> AlphaObjective:
    """Resolve a CLI-style objective name."""
    if name == "proportional":
        return proportional_objective()
    needs_p = {
        "poly-two-round": poly_two_round_objective,
        "poly-two-round-diagonal": poly_two_round_diagonal_objective,
        "guarded-cp1": guarded_cp1_objective,
        "guarded-cp2-mixed": lambda q: guarded_cp2_objective(q, "mixed"),
        "guarded-cp2-both-above": lambda q: guarded_cp2_objective(q, "both_above"),
    }
    if name in needs_p:
        if p is None:
            raise DomainError(f"objective {name!r} needs an exponent (--p)")
        return needs_p[name](p)
    raise DomainError(f"unknown objective {name!r}")


# ---------------------------------------------------------------------------
# instance realizations of the closed forms


def two_round_instance(v1: float, v2: float) -> Instance:
    """The crossed two-round instance behind the two-round ratio families."""
    if not (0.0 <= v1 <= 1.0 and 0.0 <= v2 <= 1.0):
        raise OutOfRange(f"need v1, v2 in [0, 1], got ({v1!r}, {v2!r})")
    return validate_instance(
        [[v1, 1.0 - v2], [1.0 - v1, v2]], require_normalized=True
    )


def guarded_cp1_instance(p: float, lambda1: float) -> Instance:
    """Three-round instance on which the guard trips exactly at the end of round 1.

    Round 1 is (v1, lambda1 * v1) with v1 chosen so the trip condition binds
    there; the leftovers arrive as one round per agent.
    """
    if p <= 0:
        raise DomainError(f"need p > 0, got {p!r}")
    if lambda1 < 1.0:
        raise DomainError(f"need lambda1 >= 1, got {lambda1!r}")
    lp = lambda1**p
    v1 = (1.0 + lp) / (2.0 * lp)
    if lambda1 * v1 > 1.0 + 1e-12:
        raise InfeasibleClosedForm(
            f"lambda1 = {lambda1!r} exceeds the feasibility ceiling for p = {p!r}"
        )
    rows = [
        [v1, min(lambda1 * v1, 1.0)],
        [1.0 - v1, 0.0],
        [0.0, max(1.0 - lambda1 * v1, 0.0)],
    ]
    return validate_instance(rows, require_normalized=True)


def guarded_cp2_instance(p: float, lambda1: float, lambda2: float) -> Instance:
    """Three-round instance on which the guard trips exactly at the end of round 2."""
    v1, v2, v3, _ = _cp2_rounds(p, lambda1, lambda2)
    if v1 < -1e-12 or v2 < -1e-12 or v3 < -1e-12:
        raise InfeasibleClosedForm(
            f"derived rounds ({v1!r}, {v2!r}, {v3!r}) are negative at "
            f"({lambda1!r}, {lambda2!r})"
        )
    rows = [
        [max(v1, 0.0), lambda1 * v1],
        [max(v2, 0.0), lambda2 * v2],
        [max(v3, 0.0), 0.0],
    ]
    return validate_instance(rows, require_normalized=True)


# ---------------------------------------------------------------------------
# adversarial constructions


def fair_share_violation_instance(p: float) -> Instance:
    """Two-round instance on which the unguarded rule with this p starves agent 1.

    Agent 1 values the rounds (x, 1-x) with x = (1/(p-1))**(1/p) while agent 2
    wants only round 1; the power rule then leaves agent 1 strictly below 1/2.
    Only exponents above 2 admit such an instance.
    """
    if p <= 2.0:
        raise PNotAboveTwo(f"the construction needs p > 2, got {p!r}")
    x = (1.0 / (p - 1.0)) ** (1.0 / p)
    return validate_instance([[x, 1.0], [1.0 - x, 0.0]], require_normalized=True)


def lower_bound_instances() -> tuple[Instance, Instance]:
    """The two-branch pair showing no fair-share rule can beat a 0.933 ratio.

    Both branches share round 1, so an online rule cannot tell them apart
    before committing; branch 2 defers part of agent 2's value to a third
    round.
    """
    first = validate_instance(
        [[0.568, 0.427], [0.432, 0.573]], require_normalized=True
    )
    second = validate_instance(
        [[0.568, 0.427], [0.432, 0.306], [0.0, 0.267]], require_normalized=True
    )
    return first, second


@dataclass(frozen=True)
class ReplayVerdict:
    """Result of replaying an allocator against the two-branch lower bound."""

    ratio1: float
    ratio2: float
    fair_share_violated: bool
    explanation: str


def replay_lower_bound(algorithm, tol: float = 1e-9) -> ReplayVerdict:
    """Run an online allocator on both lower-bound branches and judge it.

    The branches share their first round, so any online allocator makes the
    same round-1 decision on both.  For every allocator, either the smaller
    of the two welfare ratios is at most 0.933 (within rounding of the
    construction's constants) or fair-share fails on some branch.
    """
    runner = algorithm.run if isinstance(algorithm, Algorithm) else algorithm
    first, second = lower_bound_instances()
    trace1 = runner(first)
    trace2 = runner(second)
    verdict1 = audit(first, trace1.allocation, tol)
    verdict2 = audit(second, trace2.allocation, tol)
    violated = not (verdict1.fair_share_ok and verdict2.fair_share_ok)

    x11 = float(trace1.allocation.fractions[0, 0])
    x11_second = float(trace2.allocation.fractions[0, 0])
    if abs(x11 - x11_second) > 1e-9:
        prefix = (
            f"warning: round-1 decisions differ across branches "
            f"({x11:.6f} vs {x11_second:.6f}); allocator is not online. "
        )
    else:
        prefix = ""
    if x11 < 0.6977:
        region = f"x11 = {x11:.4f} < 0.6977, so branch 1 caps the welfare ratio"
    else:
        threshold = (0.427 * x11 - 0.194) / 0.306
        x22 = float(trace2.allocation.fractions[1, 1])
        if x22 < threshold:
            region = (
                f"x11 = {x11:.4f} >= 0.6977 and x22 = {x22:.4f} < "
                f"{threshold:.4f}, so branch 2 starves agent 2"
            )
        else:
            region = (
                f"x11 = {x11:.4f} >= 0.6977 and x22 = {x22:.4f} >= "
                f"{threshold:.4f}, so branch 2 caps the welfare ratio"
            )
    return ReplayVerdict(
        ratio1=verdict1.ratio,
        ratio2=verdict2.ratio,
        fair_share_violated=violated,
        explanation=prefix + region,
    )


def multi_agent_instance(n: int) -> Instance:
    """The n-agent construction separating online from offline fair-share welfare.

    Needs a perfect square n >= 4 and uses sqrt(n) + n rounds: first sqrt(n)
    rounds carry (n-1)/n spikes for the first sqrt(n) agents while every later
    agent values each of them at (n-1)/(n*sqrt(n)); the last n rounds carry a
    1/n diagonal so everyone can still reach fair-share at the end.
    """
    if n < 4:
        raise OutOfRange(f"need n >= 4, got {n!r}")
    m = math.isqrt(n)
    if m * m != n:
        raise NotPerfectSquare(f"need a perfect-square agent count, got {n!r}")
    values = np.zeros((m + n, n))
    for t in range(m):
        values[t, t] = (n - 1) / n
        values[t, m:] = (n - 1) / (n * m)
    for i in range(n):
        values[m + i, i] = 1 / n
    return validate_instance(values, require_normalized=True)


def multi_agent_offline_fair_share_opt(n: int) -> float:
    """Closed-form offline fair-share optimum of :func:`multi_agent_instance`."""
    m = math.isqrt(n)
    if m * m != n:
        raise NotPerfectSquare(f"need a perfect-square agent count, got {n!r}")
    return (n - 1) / math.sqrt(n) + 1.0


def multi_agent_welfare_caps(n: int) -> tuple[float, float]:
    """Welfare ceilings for any online fair-share rule on the construction.

    Returns the cap after the first sqrt(n) rounds and the final cap; both are
    ``(2, 3) - (2*sqrt(n) + n + 1) / (n*sqrt(n))`` respectively, strictly below
    what offline fair-share achieves.
    """
    m = math.isqrt(n)
    if m * m != n:
        raise NotPerfectSquare(f"need a perfect-square agent count, got {n!r}")
    gap = (2.0 * math.sqrt(n) + n + 1.0) / (n * math.sqrt(n))
    return 2.0 - gap, 3.0 - gap


def truncation_adversary(algorithm, prefix, tol: float = 1e-12):
    """Hunt for a fair-share failure of an allocator on unnormalized values.

    Runs the allocator over the prefix rounds; if after some round an agent's
    utility falls below a 1/n share of the value she has seen so far, returns
    the prefix truncated there plus one all-zero round, an instance on which
    the allocator under-serves that agent no matter what.  Returns None when
    the allocator tracked an equal split of everyone's seen value throughout.
    """
    instance = validate_instance(prefix)
    runner = algorithm.run if isinstance(algorithm, Algorithm) else algorithm
    trace = runner(instance)
    n = instance.n
    seen = np.cumsum(instance.values, axis=0)
    shortfall = trace.cumulative_utility < seen / n - tol
    bad_rounds = np.nonzero(shortfall.any(axis=1))[0]
    if bad_rounds.size == 0:
        return None
    r = int(bad_rounds[0])
    rows = np.vstack([instance.values[: r + 1], np.zeros(n)])
    return validate_instance(rows)


# ---------------------------------------------------------------------------
# trade-off sweep


@dataclass(frozen=True)
class SweepRow:
    """Worst-case ratio bounds at one exponent, split by guard behavior.

    ``no_cp_alpha`` is the worst ratio over symmetric two-round instances,
    where the guard never trips; ``with_cp_alpha`` the worst over the
    trip-at-round-1 family, NaN when no such instance exists (p <= 2).
    """

    p: float
    no_cp_alpha: float
    with_cp_alpha: float


def sweep_tradeoff_curves(
    p_values: Sequence[float],
    grid_step: float = 1e-3,
    refine_tol: float = 1e-9,
) -> list[SweepRow]:
    """Trace both worst-case curves across exponents in [2, 3].

    The two curves cross near p = 2.7, the sweet spot of the guarded family:
    below it instances without a trip are the bottleneck, above it the
    trip-at-round-1 instances are.
    """
    rows = []
    for p in p_values:
        if not 2.0 <= p <= 3.0:
            raise DomainError(f"sweep exponents must lie in [2, 3], got {p!r}")
        no_cp = minimize_alpha(
            poly_two_round_diagonal_objective(p), grid_step, refine_tol
        ).value
        try:
            with_cp = minimize_alpha(
                guarded_cp1_objective(p), grid_step, refine_tol
            ).value
        except (DomainError, EmptyDomain):
            with_cp = math.nan
        rows.append(SweepRow(p=float(p), no_cp_alpha=no_cp, with_cp_alpha=with_cp))
    return rows
