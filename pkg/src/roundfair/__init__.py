"""Online fair division of divisible items arriving over rounds.

Simulators for the power-weighted and guarded allocation families, fairness
and efficiency audits, and a worst-case analysis toolkit that re-derives
every approximation constant numerically.
"""

from .adversarial import (
    AlphaObjective,
    ReplayVerdict,
    SearchResult,
    SweepRow,
    alpha_guarded_cp1,
    alpha_guarded_cp2,
    alpha_poly_two_round,
    alpha_proportional,
    fair_share_violation_instance,
    guard_ratio_ceiling,
    guarded_cp1_instance,
    guarded_cp1_objective,
    guarded_cp2_instance,
    guarded_cp2_objective,
    lower_bound_instances,
    minimize_alpha,
    multi_agent_instance,
    multi_agent_offline_fair_share_opt,
    multi_agent_welfare_caps,
    objective_by_name,
    poly_two_round_diagonal_objective,
    poly_two_round_objective,
    proportional_objective,
    replay_lower_bound,
    sweep_tradeoff_curves,
    truncation_adversary,
    two_round_instance,
)
from .algorithms import (
    GREEDY,
    Algorithm,
    GuardedState,
    algorithm_by_name,
    builtin_algorithms,
    critical_fraction,
    poly_round,
    run_guarded,
    run_poly,
)
from .core import (
    Allocation,
    CriticalEvent,
    Instance,
    RunTrace,
    Verdict,
    three_round_cp,
    two_round_symmetric,
    validate_allocation,
    validate_instance,
)
from .metrics import (
    audit,
    doomsday_compatible,
    doomsday_maintained,
    doomsday_trace,
    doomsday_witness,
    offline_fair_share_welfare,
    optimal_welfare,
    utilities,
)
from .reporting import (
    RunRecord,
    emit_report,
    emit_table,
    parse_allocation,
    parse_instance,
    parse_instance_document,
    serialize_allocation,
    serialize_instance,
)

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "Allocation",
    "AlphaObjective",
    "CriticalEvent",
    "GREEDY",
    "GuardedState",
    "Instance",
    "ReplayVerdict",
    "RunRecord",
    "RunTrace",
    "SearchResult",
    "SweepRow",
    "Verdict",
    "algorithm_by_name",
    "alpha_guarded_cp1",
    "alpha_guarded_cp2",
    "alpha_poly_two_round",
    "alpha_proportional",
    "audit",
    "builtin_algorithms",
    "critical_fraction",
    "doomsday_compatible",
    "doomsday_maintained",
    "doomsday_trace",
    "doomsday_witness",
    "emit_report",
    "emit_table",
    "fair_share_violation_instance",
    "guard_ratio_ceiling",
    "guarded_cp1_instance",
    "guarded_cp1_objective",
    "guarded_cp2_instance",
    "guarded_cp2_objective",
    "lower_bound_instances",
    "minimize_alpha",
    "multi_agent_instance",
    "multi_agent_offline_fair_share_opt",
    "multi_agent_welfare_caps",
    "objective_by_name",
    "offline_fair_share_welfare",
    "optimal_welfare",
    "parse_allocation",
    "parse_instance",
    "parse_instance_document",
    "poly_round",
    "poly_two_round_diagonal_objective",
    "poly_two_round_objective",
    "proportional_objective",
    "replay_lower_bound",
    "run_guarded",
    "run_poly",
    "serialize_allocation",
    "serialize_instance",
    "sweep_tradeoff_curves",
    "three_round_cp",
    "truncation_adversary",
    "two_round_instance",
    "two_round_symmetric",
    "utilities",
    "validate_allocation",
    "validate_instance",
]
