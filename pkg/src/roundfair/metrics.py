"""Fairness and efficiency audits for (instance, allocation) pairs.

Includes the doomsday feasibility test: a mid-run state passes when a single
allocation of each agent's entire remaining value could still lift everyone to
a 1/n utility share.  An online rule preserves fair-share exactly when every
round of every run passes this test.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .core import Allocation, Instance, RunTrace, Verdict
from .errors import DimensionMismatch, ShapeMismatch

DEFAULT_TOL = 1e-9


def utilities(instance: Instance, allocation: Allocation) -> np.ndarray:
    """Each agent's realized utility: the inner product of her values and shares."""
    if instance.values.shape != allocation.fractions.shape:
        raise ShapeMismatch(
            f"instance is {instance.values.shape}, allocation is "
            f"{allocation.fractions.shape}"
        )
    return (instance.values * allocation.fractions).sum(axis=0)


def optimal_welfare(instance: Instance) -> float:
    """Unconstrained welfare optimum: each round goes to whoever values it most."""
    return float(instance.values.max(axis=1).sum())


def audit(instance: Instance, allocation: Allocation, tol: float = DEFAULT_TOL) -> Verdict:
    """Judge an allocation for welfare ratio, fair-share, and envy.

    Fair-share asks every utility to reach 1/n (values are treated as
    normalized).  Envy-freeness compares each agent's own bundle against every
    other bundle under her own values, and is only reported when all rounds
    were fully allocated; otherwise it is None.
    """
    u = utilities(instance, allocation)
    n = instance.n
    sw = float(u.sum())
    opt = optimal_welfare(instance)
    ratio = sw / opt if opt > 0 else 1.0
    fair_share_margin = float(u.min() - 1.0 / n)

    fully_allocated = bool(
        np.all(np.abs(allocation.fractions.sum(axis=1) - 1.0) <= tol)
    )
    envy_free_ok = None
    envy_margin = None
    if fully_allocated:
        # bundle_value[i][j] = agent i's value for agent j's bundle
        bundle_value = instance.values.T @ allocation.fractions
        own = np.diag(bundle_value)
        envy_margin = float((own[:, None] - bundle_value).min())
        envy_free_ok = bool(envy_margin >= -tol)

    return Verdict(
        utilities=u,
        social_welfare=sw,
        optimal_welfare=opt,
        ratio=ratio,
        fair_share_ok=bool(fair_share_margin >= -tol),
        envy_free_ok=envy_free_ok,
        tolerance=tol,
        fair_share_margin=fair_share_margin,
        envy_margin=envy_margin,
    )


def doomsday_compatible(
    utilities_so_far, remaining_values, n: int, tol: float = DEFAULT_TOL
) -> bool:
    """Can one last round carrying all remaining value still rescue fair-share?

    Feasibility asks for nonnegative shares x with sum at most 1 such that
    ``u_i + remaining_i * x_i >= 1/n`` for all i.  The minimal share for a
    deficit agent is her deficit over her remaining value, so the test is the
    closed form: impossible when an agent has a real deficit but nothing left
    to come, else feasible exactly when those minimal shares sum to at most 1.
    Deficits within ``tol`` count as already met whatever remains; otherwise a
    roundoff-sized deficit against a roundoff-sized remainder would blow up
    the share sum even though fair-share holds within the same tolerance.
    """
    u = np.asarray(utilities_so_far, dtype=float)
    rem = np.asarray(remaining_values, dtype=float)
    if u.shape != (n,) or rem.shape != (n,):
        raise DimensionMismatch(
            f"expected {n} utilities and remaining values, got {u.shape} and {rem.shape}"
        )
    deficits = 1.0 / n - u
    total = 0.0
    for d, r in zip(deficits, rem):
        if d <= tol:
            continue
        if r <= 0.0:
            return False
        total += float(d) / float(r)
    return total <= 1.0 + tol


def doomsday_witness(utilities_so_far, remaining_values, n: int) -> np.ndarray:
    """Minimal single-round shares that restore fair-share from a compatible state.

    Deficit agents get exactly deficit / remaining; everyone else gets 0 and
    any slack stays unallocated.  Only meaningful when the state is
    doomsday-compatible, in which case the shares sum to at most 1.
    """
    u = np.asarray(utilities_so_far, dtype=float)
    rem = np.asarray(remaining_values, dtype=float)
    witness = np.zeros(n)
    for i in range(n):
        d = 1.0 / n - u[i]
        if d > 0.0 and rem[i] > 0.0:
            witness[i] = d / rem[i]
    return witness


def doomsday_maintained(
    utilities_so_far, remaining_values, next_round_values, n: int,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Re-check compatibility after advancing one round with the minimal witness.

    From a compatible state, applying the witness shares to the next round's
    values and re-testing must succeed again; a compatible state can always be
    carried forward.
    """
    witness = doomsday_witness(utilities_so_far, remaining_values, n)
    v = np.asarray(next_round_values, dtype=float)
    u_next = np.asarray(utilities_so_far, dtype=float) + v * witness
    rem_next = np.asarray(remaining_values, dtype=float) - v
    return doomsday_compatible(u_next, rem_next, n, tol)


def doomsday_trace(
    instance: Instance, trace: RunTrace, tol: float = DEFAULT_TOL
) -> list[bool]:
    """Apply the doomsday test to the state after every round of a run."""
    if trace.cumulative_utility.shape != instance.values.shape:
        raise ShapeMismatch("trace does not match this instance")
    n = instance.n
    return [
        doomsday_compatible(
            trace.cumulative_utility[t], trace.remaining_value[t], n, tol
        )
        for t in range(instance.num_rounds)
    ]


def offline_fair_share_welfare(instance: Instance) -> float:
    """Best social welfare any offline allocation can reach subject to fair-share.

    Solved as a linear program over all fractional allocations: maximize total
    utility with per-round sums at most 1 and every agent held at or above a
    1/n share of her own total value.
    """
    V = instance.values
    T, n = V.shape
    c = -V.reshape(-1)  # variables x[t, i], row-major

    rows = np.zeros((T, T * n))
    for t in range(T):
        rows[t, t * n : (t + 1) * n] = 1.0
    fair = np.zeros((n, T * n))
    for i in range(n):
        fair[i, i::n] = -V[:, i]
    A_ub = np.vstack([rows, fair])
    b_ub = np.concatenate([np.ones(T), -instance.column_totals() / n])

    result = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(0.0, 1.0), method="highs")
    if not result.success:
        raise RuntimeError(f"fair-share welfare LP failed: {result.message}")
    return float(-result.fun)
