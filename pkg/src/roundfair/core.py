"""Core domain types: valuation instances, allocations, run traces, and audit verdicts.

An instance is a T x n matrix of nonnegative values, one row per round and one
column per agent.  Agents have additive utilities, and an instance is called
normalized when every agent's column sums to 1.  All types are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyInstance,
    NegativeValue,
    NotNormalized,
    OutOfRange,
    ValidationError,
)

#: Absolute tolerance on each agent's unit column sum.
NORMALIZATION_TOL = 1e-9

#: Tolerance on allocation entries lying in [0, 1].
ENTRY_TOL = 1e-12

#: Tolerance on per-round allocation sums not exceeding 1.
ROW_SUM_TOL = 1e-9


def _readonly(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Instance:
    """A T x n matrix of round valuations; ``values[t][i]`` is agent i's value in round t."""

    values: np.ndarray
    normalized: bool

    @property
    def n(self) -> int:
        """Number of agents."""
        return self.values.shape[1]

    @property
    def num_rounds(self) -> int:
        """Number of rounds T."""
        return self.values.shape[0]

    def column_totals(self) -> np.ndarray:
        """Each agent's total value over all rounds."""
        return self.values.sum(axis=0)


@dataclass(frozen=True, eq=False)
class Allocation:
    """Per-round fractions; ``fractions[t][i]`` is the share of round t given to agent i."""

    fractions: np.ndarray

    @property
    def n(self) -> int:
        return self.fractions.shape[1]

    @property
    def num_rounds(self) -> int:
        return self.fractions.shape[0]


@dataclass(frozen=True)
class CriticalEvent:
    """The moment a guard trips: within ``round_index``, after a ``fraction`` of the item."""

    round_index: int
    fraction: float
    agent: int


@dataclass(frozen=True, eq=False)
class RunTrace:
    """Full record of one online run.

    ``cumulative_utility[t][i]`` is agent i's utility through round t, and
    ``remaining_value[t][i]`` the value still to arrive strictly after round t.
    At most one critical event can occur per run.
    """

    allocation: Allocation
    cumulative_utility: np.ndarray
    remaining_value: np.ndarray
    critical_event: CriticalEvent | None = None


@dataclass(frozen=True, eq=False)
class Verdict:
    """Audit outcome for one (instance, allocation) pair.

    ``ratio`` is realized social welfare over the unconstrained optimum.
    ``envy_free_ok`` is None when some round was left partially unallocated,
    since the envy comparison is only meaningful for full allocations.  The
    raw margins are included so callers can re-judge with a tighter tolerance.
    """

    utilities: np.ndarray
    social_welfare: float
    optimal_welfare: float
    ratio: float
    fair_share_ok: bool
    envy_free_ok: bool | None
    tolerance: float
    fair_share_margin: float
    envy_margin: float | None


def validate_instance(values, require_normalized: bool = False) -> Instance:
    """Check a raw valuation matrix and wrap it as an immutable :class:`Instance`.

    The matrix must be non-empty and rectangular with nonnegative finite
    entries.  When ``require_normalized`` is set, every agent's column must
    sum to 1 within ``NORMALIZATION_TOL``; otherwise the instance is accepted
    as-is and its ``normalized`` flag records whether the sums happen to hold.
    """
    try:
        matrix = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"values are not a rectangular numeric matrix: {exc}") from None
    if matrix.ndim != 2:
        raise ValidationError(f"expected a 2-d matrix, got {matrix.ndim}-d data")
    if matrix.size == 0:
        raise EmptyInstance("instance has no rounds or no agents")
    if matrix.shape[1] < 2:
        raise ValidationError("an instance needs at least two agents")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError("all values must be finite")
    if np.any(matrix < 0):
        t, i = np.argwhere(matrix < 0)[0]
        raise NegativeValue(int(t), int(i), float(matrix[t, i]))

    totals = matrix.sum(axis=0)
    off = np.abs(totals - 1.0) > NORMALIZATION_TOL
    normalized = not bool(off.any())
    if require_normalized and not normalized:
        agent = int(np.argmax(off))
        raise NotNormalized(agent, float(totals[agent]))
    return Instance(values=_readonly(matrix), normalized=normalized)


def validate_allocation(fractions) -> Allocation:
    """Check fraction bounds and per-round sums, and wrap as an :class:`Allocation`."""
    matrix = np.array(fractions, dtype=float)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ValidationError("allocation must be a non-empty 2-d matrix")
    if np.any(matrix < -ENTRY_TOL) or np.any(matrix > 1.0 + ENTRY_TOL):
        raise ValidationError("allocation entries must lie in [0, 1]")
    row_sums = matrix.sum(axis=1)
    if np.any(row_sums > 1.0 + ROW_SUM_TOL):
        t = int(np.argmax(row_sums))
        raise ValidationError(f"round {t} allocates {row_sums[t]!r} > 1")
    return Allocation(fractions=_readonly(matrix))


def two_round_symmetric(v11: float) -> Instance:
    """Two-agent, two-round normalized instance with mirrored values.

    Agent 1 values the rounds (v11, 1 - v11) and agent 2 the reverse.
    """
    if not 0.0 < v11 < 1.0:
        raise OutOfRange(f"v11 must lie in (0, 1), got {v11!r}")
    return validate_instance(
        [[v11, 1.0 - v11], [1.0 - v11, v11]], require_normalized=True
    )


def three_round_cp(v11: float, v21: float, eps: float = 1e-6) -> Instance:
    """Two-agent, three-round instance that can drive a guard to trip.

    Agent 1's column is (v11, 1 - v11 - eps, eps) and agent 2's is
    (v21, eps, 1 - v21 - eps), so both sum to 1 for any admissible eps.
    """
    if not 0.0 < v11 < 1.0:
        raise OutOfRange(f"v11 must lie in (0, 1), got {v11!r}")
    if not 0.0 < v21 < 1.0:
        raise OutOfRange(f"v21 must lie in (0, 1), got {v21!r}")
    if not 0.0 < eps < min(1.0 - v11, 1.0 - v21):
        raise OutOfRange(
            f"eps must lie in (0, {min(1.0 - v11, 1.0 - v21)!r}), got {eps!r}"
        )
    rows = [
        [v11, v21],
        [1.0 - v11 - eps, eps],
        [eps, 1.0 - v21 - eps],
    ]
    return validate_instance(rows, require_normalized=True)


def require_normalized(instance: Instance) -> None:
    """Raise :class:`NotNormalized` unless every column sums to 1."""
    if instance.normalized:
        return
    totals = instance.column_totals()
    agent = int(np.argmax(np.abs(totals - 1.0)))
    raise NotNormalized(agent, float(totals[agent]))
