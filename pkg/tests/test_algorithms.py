import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roundfair import (
    GREEDY,
    GuardedState,
    algorithm_by_name,
    builtin_algorithms,
    critical_fraction,
    fair_share_violation_instance,
    poly_round,
    run_guarded,
    run_poly,
    two_round_symmetric,
    utilities,
    validate_instance,
)
from roundfair.errors import (
    InfiniteP,
    NotNormalized,
    NotTwoAgents,
    OutOfRange,
    ValidationError,
)
from conftest import random_instance, random_instances

SQ2 = 1.0 / math.sqrt(2.0)


class TestPolyRound:
    def test_proportional(self):
        assert poly_round([0.3, 0.6], 1) == pytest.approx([1 / 3, 2 / 3])

    def test_quadratic(self):
        assert poly_round([0.3, 0.6], 2) == pytest.approx([0.2, 0.8])

    def test_greedy_tie(self):
        assert poly_round([0.5, 0.5, 0.0], GREEDY).tolist() == [0.5, 0.5, 0.0]

    def test_equal_split(self):
        assert poly_round([0.4, 0.6], 0).tolist() == [0.5, 0.5]

    def test_equal_split_ignores_zeros(self):
        assert poly_round([0.0, 0.6, 0.4], 0).tolist() == pytest.approx([1 / 3] * 3)

    def test_all_zero_round(self):
        for p in (0, 1, 2, GREEDY):
            assert poly_round([0.0, 0.0], p).tolist() == [0.5, 0.5]

    def test_zero_value_gets_nothing_for_positive_p(self):
        assert poly_round([0.0, 0.6], 3).tolist() == [0.0, 1.0]

    def test_huge_exponent_does_not_overflow(self):
        fractions = poly_round([0.3, 0.7], 5000)
        assert fractions == pytest.approx([0.0, 1.0])

    def test_negative_p_rejected(self):
        with pytest.raises(OutOfRange):
            poly_round([0.3, 0.7], -1)


@given(
    st.lists(st.floats(min_value=0, max_value=10), min_size=2, max_size=6),
    st.sampled_from([0.0, 0.5, 1.0, 2.0, 2.7, 10.0, GREEDY]),
)
def test_poly_round_fully_allocates(values, p):
    fractions = poly_round(values, p)
    assert abs(fractions.sum() - 1.0) <= 1e-12
    assert np.all(fractions >= 0)


@given(
    st.lists(st.floats(min_value=1e-6, max_value=10), min_size=2, max_size=5),
    st.sampled_from([0.5, 1.0, 2.0, 2.7, GREEDY]),
    st.floats(min_value=1e-3, max_value=1e3),
)
def test_poly_round_scale_free(values, p, scale):
    base = poly_round(values, p)
    scaled = poly_round([scale * v for v in values], p)
    assert scaled == pytest.approx(base, abs=1e-12)


class TestRunPoly:
    def test_proportional_worst_case_utilities(self):
        inst = two_round_symmetric(SQ2)
        trace = run_poly(inst, 1)
        u = utilities(inst, trace.allocation)
        assert u == pytest.approx([0.5857864376269051] * 2)
        opt = inst.values.max(axis=1).sum()
        assert u.sum() / opt == pytest.approx(2 * (math.sqrt(2) - 1), abs=1e-12)

    def test_quadratic_ratio_at_symmetric_worst_case(self):
        inst = two_round_symmetric(0.6265)
        trace = run_poly(inst, 2)
        ratio = utilities(inst, trace.allocation).sum() / (2 * 0.6265)
        assert ratio == pytest.approx(0.8941, abs=1e-4)

    def test_equal_split_gives_everyone_a_half(self, rng):
        for _ in range(20):
            inst = random_instance(rng)
            u = utilities(inst, run_poly(inst, 0).allocation)
            assert u == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_full_allocation_every_round(self, rng):
        for p in (0, 1, 2.7, GREEDY):
            inst = random_instance(rng, n=4)
            sums = run_poly(inst, p).allocation.fractions.sum(axis=1)
            assert np.all(np.abs(sums - 1.0) <= 1e-12)

    def test_memoryless_under_round_permutation(self, rng):
        inst = random_instance(rng, n=3, min_rounds=4)
        perm = rng.permutation(inst.num_rounds)
        shuffled = validate_instance(inst.values[perm], require_normalized=True)
        base = run_poly(inst, 2.0).allocation.fractions
        assert run_poly(shuffled, 2.0).allocation.fractions == pytest.approx(
            base[perm], abs=0
        )

    def test_trace_bookkeeping(self, rng):
        inst = random_instance(rng, min_rounds=3)
        trace = run_poly(inst, 1.5)
        gains = inst.values * trace.allocation.fractions
        assert trace.cumulative_utility == pytest.approx(
            np.cumsum(gains, axis=0), abs=1e-15
        )
        assert trace.remaining_value[-1] == pytest.approx([0.0, 0.0], abs=1e-12)
        recon = trace.remaining_value + np.cumsum(inst.values, axis=0)
        assert recon == pytest.approx(np.ones_like(recon), abs=1e-9)

    def test_proportional_alg_matches_ratio_formula(self, rng):
        # independent welfare expression: sum of v_t * (1 + lam_t^2) / (1 + lam_t)
        for _ in range(50):
            inst = random_instance(rng)
            u = utilities(inst, run_poly(inst, 1).allocation)
            v = inst.values[:, 0]
            w = inst.values[:, 1]
            with np.errstate(invalid="ignore", divide="ignore"):
                lam = np.where(v > 0, w / np.where(v > 0, v, 1.0), np.inf)
                per_round = np.where(
                    v > 0,
                    v * (1 + lam**2) / (1 + lam),
                    w,
                )
            assert u.sum() == pytest.approx(per_round.sum(), abs=1e-9)

    def test_milne_envy_bound_for_proportional(self, rng):
        for _ in range(200):
            inst = random_instance(rng)
            X = run_poly(inst, 1).allocation.fractions
            cross = inst.values.T @ X  # cross[i][j] = i's value for j's bundle
            assert cross[0, 1] <= 0.5 + 1e-9
            assert cross[1, 0] <= 0.5 + 1e-9

    def test_quadratic_fair_share_on_randoms(self, rng):
        for _ in range(300):
            inst = random_instance(rng)
            u = utilities(inst, run_poly(inst, 2).allocation)
            assert u.min() >= 0.5 - 1e-9


def _split_items(values):
    """Split every round with v1 > v2 > 0 into (v2, v2) and (v1 - v2, 0)."""
    rows = []
    for a, b in values:
        if b > 0 and a > b:
            rows.append([b, b])
            rows.append([a - b, 0.0])
        else:
            rows.append([a, b])
    return np.array(rows)


def _merge_two_items(values, i, j):
    """Merge rounds i and j (both with v1 <= v2) into one."""
    merged = values[i] + values[j]
    rows = [values[t] for t in range(len(values)) if t not in (i, j)]
    rows.append(merged)
    return np.array(rows)


class TestQuadraticRestructuringMonotonicity:
    def test_split_weakly_hurts_agent_one(self, rng):
        for _ in range(100):
            inst = random_instance(rng, min_rounds=2)
            split = validate_instance(
                _split_items(inst.values), require_normalized=True
            )
            u = utilities(inst, run_poly(inst, 2).allocation)[0]
            u_split = utilities(split, run_poly(split, 2).allocation)[0]
            assert u_split <= u + 1e-12

    def test_merge_weakly_hurts_agent_one(self, rng):
        merged_checked = 0
        while merged_checked < 100:
            inst = random_instance(rng, min_rounds=3)
            low = [
                t
                for t in range(inst.num_rounds)
                if inst.values[t, 0] <= inst.values[t, 1]
            ]
            if len(low) < 2:
                continue
            merged = validate_instance(
                _merge_two_items(inst.values, low[0], low[1]),
                require_normalized=True,
            )
            u = utilities(inst, run_poly(inst, 2).allocation)[0]
            u_merged = utilities(merged, run_poly(merged, 2).allocation)[0]
            assert u_merged <= u + 1e-12
            merged_checked += 1


@settings(max_examples=60)
@given(
    st.floats(min_value=0.01, max_value=0.99),
    st.floats(min_value=0.01, max_value=0.99),
    st.floats(min_value=0.01, max_value=0.99),
)
def test_split_monotonicity_three_rounds(a, b, c):
    cols = np.array([[a, b, c], [c, a, b]], dtype=float)
    cols /= cols.sum(axis=1, keepdims=True)
    inst = validate_instance(cols.T, require_normalized=True)
    split = validate_instance(_split_items(inst.values), require_normalized=True)
    u = utilities(inst, run_poly(inst, 2).allocation)[0]
    u_split = utilities(split, run_poly(split, 2).allocation)[0]
    assert u_split <= u + 1e-12


class TestCriticalFraction:
    def test_matches_bisection_oracle(self):
        p = 2.7
        x = (1.0 / (p - 1.0)) ** (1.0 / p)
        state = GuardedState(0, (0.0, 0.0), (1.0, 1.0))
        hit = critical_fraction(state, (x, 1.0), p)
        assert hit is not None
        agent, f = hit
        assert agent == 0
        share = x ** (p + 1) / (x**p + 1.0)
        after = 1.0 - x

        def surplus(fr):
            return fr * share + (1 - fr) * x + after - 0.5

        lo, hi = 0.0, 1.0
        assert surplus(lo) > 0 > surplus(hi)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if surplus(mid) > 0:
                lo = mid
            else:
                hi = mid
        assert f == pytest.approx(0.5 * (lo + hi), abs=1e-9)

    def test_satisfied_agent_never_trips(self):
        state = GuardedState(3, (0.5, 0.1), (0.3, 0.9))
        hit = critical_fraction(state, (0.2, 0.3), 2.7)
        assert hit is None or hit[0] != 0

    def test_comfortable_round_has_no_trip(self):
        state = GuardedState(0, (0.0, 0.0), (1.0, 1.0))
        assert critical_fraction(state, (0.2, 0.2), 2.7) is None

    def test_requires_two_agents(self):
        state = GuardedState(0, (0.0, 0.0), (1.0, 1.0))
        with pytest.raises(NotTwoAgents):
            critical_fraction(state, (0.2, 0.2, 0.2), 2.7)

    def test_rejects_infinite_p(self):
        state = GuardedState(0, (0.0, 0.0), (1.0, 1.0))
        with pytest.raises(InfiniteP):
            critical_fraction(state, (0.2, 0.3), GREEDY)

    def test_rejects_tripped_state(self):
        state = GuardedState(1, (0.5, 0.4), (0.2, 0.2), tripped_agent=0)
        with pytest.raises(ValidationError):
            critical_fraction(state, (0.2, 0.2), 2.7)


class TestRunGuarded:
    def test_no_trip_on_symmetric_sweet_spot(self):
        inst = two_round_symmetric(0.599)
        trace = run_guarded(inst, 2.7)
        assert trace.critical_event is None
        u = utilities(inst, trace.allocation)
        opt = inst.values.max(axis=1).sum()
        assert u.sum() / opt == pytest.approx(0.9164227556574872, abs=1e-12)

    def test_trip_on_three_round_construction(self):
        from roundfair import three_round_cp

        inst = three_round_cp(0.76, 0.97, 1e-6)
        trace = run_guarded(inst, 2.7)
        assert trace.critical_event is not None
        assert trace.critical_event.agent == 0
        assert trace.critical_event.round_index == 0
        u = utilities(inst, trace.allocation)
        assert u[0] == pytest.approx(0.5, abs=1e-12)
        opt = inst.values.max(axis=1).sum()
        assert u.sum() / opt == pytest.approx(0.9178707503857602, abs=1e-9)

    def test_guard_rescues_where_plain_rule_fails(self):
        p = 3
        inst = fair_share_violation_instance(p)
        u_plain = utilities(inst, run_poly(inst, p).allocation)
        closed = 1 - (p - 1) / p * (1 / (p - 1)) ** (1 / p)
        assert u_plain[0] == pytest.approx(closed, abs=1e-12)
        assert u_plain[0] < 0.5
        u_guarded = utilities(inst, run_guarded(inst, 3).allocation)
        assert u_guarded.min() >= 0.5 - 1e-9

    def test_matches_plain_rule_when_guard_never_fires(self, rng):
        agree = 0
        while agree < 50:
            inst = random_instance(rng)
            trace = run_guarded(inst, 2.5)
            if trace.critical_event is not None:
                continue
            plain = run_poly(inst, 2.5)
            assert trace.allocation.fractions == pytest.approx(
                plain.allocation.fractions, abs=1e-12
            )
            agree += 1

    def test_fair_share_on_randoms(self, rng):
        for p in (0.0, 1.0, 2.7, 6.0):
            for _ in range(100):
                inst = random_instance(rng)
                u = utilities(inst, run_guarded(inst, p).allocation)
                assert u.min() >= 0.5 - 1e-9

    def test_full_allocation(self, rng):
        for _ in range(50):
            inst = random_instance(rng)
            sums = run_guarded(inst, 4.0).allocation.fractions.sum(axis=1)
            assert np.all(np.abs(sums - 1.0) <= 1e-12)

    def test_at_most_one_event_and_tail_goes_to_tripped_agent(self, rng):
        seen_trip = 0
        while seen_trip < 20:
            inst = random_instance(rng, min_rounds=4)
            trace = run_guarded(inst, 8.0)
            if trace.critical_event is None:
                continue
            seen_trip += 1
            t0 = trace.critical_event.round_index
            i = trace.critical_event.agent
            tail = trace.allocation.fractions[t0 + 1 :]
            assert np.all(tail[:, i] == 1.0)
            assert np.all(tail[:, 1 - i] == 0.0)

    def test_rejects_three_agents(self, rng):
        with pytest.raises(NotTwoAgents):
            run_guarded(random_instance(rng, n=3), 2.0)

    def test_rejects_infinite_p(self, rng):
        with pytest.raises(InfiniteP):
            run_guarded(random_instance(rng), GREEDY)

    def test_rejects_unnormalized(self):
        inst = validate_instance([[0.5, 0.6], [0.5, 0.5]])
        with pytest.raises(NotNormalized):
            run_guarded(inst, 2.7)

    def test_single_contested_round(self):
        # both agents' guards bind exactly at the end of the only round;
        # the tie resolves without costing either agent her half
        inst = validate_instance([[1.0, 1.0]], require_normalized=True)
        for p in (0.0, 1.0, 2.7):
            trace = run_guarded(inst, p)
            assert trace.allocation.fractions.tolist() == [[0.5, 0.5]]
            assert utilities(inst, trace.allocation).min() >= 0.5 - 1e-12

    def test_identical_agents_tie_at_final_round(self):
        # the guard binds exactly at the end of round 2 for both agents;
        # the allocation is still the plain power-weighted one
        inst = two_round_symmetric(0.5)
        trace = run_guarded(inst, 2.7)
        assert np.all(trace.allocation.fractions == 0.5)
        assert utilities(inst, trace.allocation) == pytest.approx([0.5, 0.5])

    def test_dead_rounds_inside_guarded_run(self):
        inst = validate_instance(
            [[0.6, 0.4], [0.0, 0.0], [0.4, 0.6]], require_normalized=True
        )
        trace = run_guarded(inst, 2.0)
        assert trace.allocation.fractions[1].tolist() == [0.5, 0.5]
        assert utilities(inst, trace.allocation).min() >= 0.5 - 1e-9

    def test_equal_split_guard_ends_at_exactly_half(self, rng):
        # under p = 0 the surplus reaches one half only as the run ends
        for _ in range(20):
            inst = random_instance(rng)
            trace = run_guarded(inst, 0.0)
            u = utilities(inst, trace.allocation)
            assert u == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_trace_arrays_are_immutable(self, rng):
        inst = random_instance(rng)
        trace = run_guarded(inst, 2.7)
        with pytest.raises(ValueError):
            trace.cumulative_utility[0, 0] = 9.9
        with pytest.raises(ValueError):
            trace.allocation.fractions[0, 0] = 9.9


class TestAlgorithmRegistry:
    def test_builtin_names(self):
        names = [a.name for a in builtin_algorithms()]
        assert names == [
            "equal-split",
            "proportional",
            "quadratic",
            "greedy",
            "guarded-2",
            "guarded-2.7",
            "guarded-3",
        ]

    def test_lookup(self):
        assert algorithm_by_name("greedy").p == GREEDY
        guarded = algorithm_by_name("guarded", 2.7)
        assert guarded.guarded and guarded.p == 2.7

    def test_lookup_requires_p_for_generic_rules(self):
        with pytest.raises(ValidationError):
            algorithm_by_name("poly")
        with pytest.raises(ValidationError):
            algorithm_by_name("nope")


class TestDeskScale:
    def test_long_two_agent_run(self, rng):
        T = 20_000
        cols = rng.dirichlet(np.ones(T), size=2)
        inst = validate_instance(cols.T, require_normalized=True)
        u = utilities(inst, run_guarded(inst, 2.7).allocation)
        assert u.min() >= 0.5 - 1e-9

    def test_wide_many_agent_run(self, rng):
        T, n = 2_000, 100
        cols = rng.dirichlet(np.ones(T), size=n)
        inst = validate_instance(cols.T, require_normalized=True)
        trace = run_poly(inst, 1.0)
        sums = trace.allocation.fractions.sum(axis=1)
        assert np.all(np.abs(sums - 1.0) <= 1e-9)
        assert utilities(inst, trace.allocation).sum() <= inst.values.max(axis=1).sum() + 1e-9
