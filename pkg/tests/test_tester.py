"""Tester: schedule arithmetic, round execution, verdicts, analysis."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from unate import (
    HypercubeFunction,
    build_schedule,
    check_witness,
    dimension_hit_probability,
    from_callable,
    from_table,
    gen_constant,
    gen_dictator,
    gen_parity,
    gen_weighted_threshold,
    levin_buckets,
    rejection_probability_exact,
    run_round,
    schedule_query_bound,
    unate_test,
    violation_profile,
)
from unate.tester import as_fraction, num_rounds

PARITY2 = HypercubeFunction(2, [0, 1, 1, 0])


def lopsided_function(n=10):
    """Dictator on dimension 0 with one value rewritten.

    Dimension 0 keeps a huge up-mass and picks up a 2-point down-mass; every
    other dimension sees only one derivative sign, so rejection hinges on the
    rare down-edge of dimension 0 and the analytic probability sits strictly
    between 0 and 1 for eps = 1.
    """
    values = [(x >> 0) & 1 for x in range(1 << n)]
    values[3] = -1
    return HypercubeFunction(n, values)


class TestSchedule:
    def test_reference_schedule(self):
        s = build_schedule(2, Fraction(1, 4))
        assert s.num_rounds == 6
        assert [r.reps for r in s.rounds] == [80, 40, 20, 10, 5, 3]
        assert [r.sample_size for r in s.rounds] == [6, 12, 24, 48, 96, 192]
        assert s.total_queries == 5952

    def test_smallest_schedule(self):
        s = build_schedule(1, 1)
        assert s.num_rounds == 3
        assert [r.reps for r in s.rounds] == [10, 5, 3]

    def test_eps_validation(self):
        with pytest.raises(ValueError):
            build_schedule(2, Fraction(3, 2))
        with pytest.raises(ValueError):
            build_schedule(2, 0)
        with pytest.raises(ValueError):
            build_schedule(0, 1)

    def test_floats_are_rejected(self):
        with pytest.raises(TypeError):
            build_schedule(2, 0.25)

    def test_eps_accepts_strings(self):
        assert build_schedule(2, "0.25") == build_schedule(2, "1/4")

    @pytest.mark.parametrize("n", [1, 2, 7, 33, 64])
    @pytest.mark.parametrize("eps", ["1", "1/2", "1/7", "3/10"])
    def test_matches_fraction_ceilings(self, n, eps):
        eps = Fraction(eps)
        s = build_schedule(n, eps)
        level = s.num_rounds
        assert (1 << level) * eps >= 8 * n
        assert (1 << (level - 1)) * eps < 8 * n
        for spec in s.rounds:
            assert spec.reps == math.ceil(Fraction(20 * n) / (eps * (1 << spec.r)))
            assert spec.reps >= 1
            assert spec.sample_size == 3 * (1 << spec.r)
        assert s.total_queries == 2 * sum(
            spec.reps * spec.sample_size for spec in s.rounds
        )

    @pytest.mark.parametrize("n", [1, 5, 24, 64])
    @pytest.mark.parametrize("eps", ["1", "1/4", "1/10"])
    def test_total_below_term_bound(self, n, eps):
        s = build_schedule(n, Fraction(eps))
        assert s.total_queries <= schedule_query_bound(n, Fraction(eps))


class TestRunRound:
    def test_monotone_never_witnesses(self):
        oracle = gen_dictator(4, 2, 1)
        rng = np.random.default_rng(0)
        for _ in range(200):
            assert run_round(oracle, 12, rng) is None

    def test_witness_revalidates(self):
        rng = np.random.default_rng(1)
        found = 0
        for _ in range(50):
            oracle = from_table(PARITY2)
            witness = run_round(oracle, 6, rng)
            assert oracle.query_count == 12
            if witness is not None:
                found += 1
                assert check_witness(PARITY2, witness)
        assert found > 0

    def test_hit_rate_matches_inclusion_exclusion(self):
        # Per-repetition witness probability for parity at m=6 is
        # 1 - 2*(1/2)^6 = 31/32 in both dimensions.
        p = 31 / 32
        trials = 2000
        rng = np.random.default_rng(7)
        oracle = from_table(PARITY2)
        hits = sum(run_round(oracle, 6, rng) is not None for _ in range(trials))
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(hits / trials - p) <= 4 * sigma


class TestUnateTest:
    def test_unate_always_accepts(self):
        for seed in range(5):
            for oracle in (
                gen_constant(4, 3),
                gen_dictator(6, 5, -1),
                gen_weighted_threshold(8, seed),
            ):
                report = unate_test(oracle, Fraction(1, 4), seed)
                assert report.verdict == "accept"
                assert report.witness is None

    def test_accept_path_queries_are_schedule_exact(self):
        schedule = build_schedule(7, Fraction(1, 8))
        counts = set()
        for seed in (0, 1, 2):
            for make in (lambda: gen_constant(7, 0), lambda: gen_weighted_threshold(7, 99)):
                oracle = make()
                report = unate_test(oracle, Fraction(1, 8), seed)
                assert report.verdict == "accept"
                counts.add(report.total_queries)
                assert oracle.query_count == report.total_queries
        assert counts == {schedule.total_queries}

    def test_reject_truncates_and_revalidates(self):
        for seed in range(5):
            oracle = from_table(PARITY2)
            report = unate_test(oracle, Fraction(1, 4), seed)
            assert report.verdict == "reject"
            assert report.total_queries < report.schedule.total_queries
            assert report.total_queries == oracle.query_count
            assert check_witness(PARITY2, report.witness)
            # Executed repetitions account exactly for the issued queries.
            assert report.total_queries == sum(
                2 * s.sample_size * s.reps_executed for s in report.rounds
            )

    def test_kernel_and_callable_paths_agree(self):
        table = lopsided_function(5)
        for seed in range(6):
            fast = unate_test(from_table(table), 1, seed)
            slow = unate_test(
                from_callable(5, lambda x: int(table.values[x])), 1, seed
            )
            assert fast.verdict == slow.verdict
            assert fast.witness == slow.witness
            assert fast.total_queries == slow.total_queries
            assert fast.rounds == slow.rounds

    def test_same_seed_same_report(self):
        a = unate_test(from_table(PARITY2), Fraction(1, 4), 42)
        b = unate_test(from_table(PARITY2), Fraction(1, 4), 42)
        assert a == b

    def test_generator_rng_also_accepted(self):
        report = unate_test(from_table(PARITY2), Fraction(1, 4), np.random.default_rng(3))
        assert report.seed is None
        assert report.verdict == "reject"


class TestLevinBuckets:
    def test_all_zero_masses(self):
        decomposition = levin_buckets([Fraction(0)] * 4, Fraction(1, 2))
        assert all(not b for b in decomposition.buckets)
        assert decomposition.lhs == 0
        assert not decomposition.premise_holds
        assert decomposition.implication_holds

    def test_parity_buckets(self):
        decomposition = levin_buckets([Fraction(1, 2), Fraction(1, 2)], Fraction(1, 4))
        assert decomposition.num_rounds == 6
        assert decomposition.buckets[1] == (0, 1)  # S_2: 1/2 in (1/4, 1/2]
        assert sum(len(b) for b in decomposition.buckets) == 2
        assert decomposition.lhs == Fraction(1, 2)
        assert decomposition.lhs >= decomposition.eps / 16

    def test_uniform_small_masses(self):
        decomposition = levin_buckets([Fraction(1, 16)] * 4, 1)
        assert decomposition.num_rounds == 5
        assert decomposition.buckets[4] == (0, 1, 2, 3)  # S_5: 1/16 in (1/32, 1/16]
        assert decomposition.lhs == Fraction(1, 8)
        assert decomposition.lhs >= Fraction(1, 16)

    def test_mass_one_lands_in_first_bucket(self):
        decomposition = levin_buckets([Fraction(1)], 1)
        assert decomposition.buckets[0] == (0,)

    def test_eps_above_one_allowed(self):
        decomposition = levin_buckets([Fraction(1, 2)] * 4, Fraction(8))
        assert decomposition.premise_holds
        assert decomposition.implication_holds

    @given(
        st.lists(
            st.fractions(min_value=0, max_value=1, max_denominator=64),
            min_size=1,
            max_size=8,
        )
    )
    @settings(max_examples=300)
    def test_implication_never_fails(self, masses):
        """Whenever sum(mu) >= eps/4, the bucket sum is >= eps/16."""
        total = sum(masses, Fraction(0))
        candidates = [Fraction(1, 3), Fraction(1)]
        if total > 0:
            candidates.append(4 * total)  # tight premise
            candidates.append(2 * total)
        for eps in candidates:
            decomposition = levin_buckets(masses, eps)
            assert decomposition.implication_holds

    def test_input_validation(self):
        with pytest.raises(ValueError):
            levin_buckets([], 1)
        with pytest.raises(ValueError):
            levin_buckets([Fraction(3, 2)], 1)
        with pytest.raises(ValueError):
            levin_buckets([Fraction(1, 2)], 0)


class TestRejectionProbability:
    def test_monotone_probability_zero(self):
        profile = violation_profile(HypercubeFunction(2, [0, 1, 1, 1]))
        analysis = rejection_probability_exact(profile, Fraction(1, 4))
        assert analysis.probability == 0.0
        assert all(p == 0.0 for p in analysis.round_probs)

    def test_parity_first_round(self):
        profile = violation_profile(PARITY2)
        analysis = rejection_probability_exact(profile, Fraction(1, 4))
        assert analysis.round_probs[0] == pytest.approx(31 / 32, abs=1e-15)
        assert analysis.probability == pytest.approx(1.0, abs=1e-12)

    def test_round_probs_nondecreasing_for_single_dimension(self):
        profile = violation_profile(lopsided_function(10))
        analysis = rejection_probability_exact(profile, 1)
        probs = analysis.round_probs
        assert all(0.0 <= p <= 1.0 for p in probs)
        assert all(a <= b + 1e-15 for a, b in zip(probs, probs[1:]))
        assert 0.05 < analysis.probability < 0.95

    def test_floors_below_exact(self):
        for table in (PARITY2, lopsided_function(6)):
            profile = violation_profile(table)
            analysis = rejection_probability_exact(profile, Fraction(1, 2))
            for p, floor in zip(analysis.round_probs, analysis.round_floors):
                assert p >= floor

    def test_hit_probability_parity(self):
        profile = violation_profile(PARITY2)
        assert dimension_hit_probability(profile, 0, 6) == pytest.approx(31 / 32)


class TestAnalyticVsEmpirical:
    @pytest.mark.parametrize("table_maker,eps", [
        (lambda: lopsided_function(10), 1),
        (lambda: PARITY2, Fraction(1, 4)),
    ])
    def test_monte_carlo_within_four_sigma(self, table_maker, eps):
        table = table_maker()
        profile = violation_profile(table)
        analytic = rejection_probability_exact(profile, eps).probability
        trials = 1500
        rejections = 0
        for t in range(trials):
            if unate_test(from_table(table), eps, t).rejected:
                rejections += 1
        freq = rejections / trials
        sigma = math.sqrt(analytic * (1 - analytic) / trials)
        assert abs(freq - analytic) <= 4 * sigma if sigma > 0 else freq == analytic


def test_num_rounds_is_minimal():
    for n in (1, 3, 17):
        for eps in (Fraction(1), Fraction(1, 3), Fraction(7, 8)):
            level = num_rounds(n, eps)
            assert (1 << level) * eps >= 8 * n
            assert level == 1 or (1 << (level - 1)) * eps < 8 * n


def test_as_fraction_rejects_float():
    with pytest.raises(TypeError):
        as_fraction(0.1)
    assert as_fraction("0.1") == Fraction(1, 10)
