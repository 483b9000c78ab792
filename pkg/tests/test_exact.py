"""Exact oracles: violation graphs, vertex cover, distances, repair."""

from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from unate import (
    CapExceededError,
    HypercubeFunction,
    ViolationGraph,
    apply_repair,
    distance_to_b_monotone,
    distance_to_unate,
    is_b_monotone,
    is_unate,
    min_vertex_cover,
    verify_dimension_reduction,
    violation_graph,
    violation_profile,
)

from reference import (
    boolean_unate_tables,
    ref_distance_to_unate_boolean,
    ref_min_vertex_cover_size,
    ref_violated_pairs,
)

PARITY2 = HypercubeFunction(2, [0, 1, 1, 0])


def random_tables(count, n, lo, hi, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield HypercubeFunction(n, rng.integers(lo, hi + 1, size=1 << n))


class TestViolationGraph:
    def test_monotone_empty(self):
        assert violation_graph(HypercubeFunction(2, [0, 1, 1, 1]), 0).pairs == ()

    def test_parity_pairs(self):
        graph = violation_graph(PARITY2, 0)
        assert graph.pairs == ((1, 3), (2, 3))

    def test_single_violated_edge(self):
        graph = violation_graph(HypercubeFunction(1, [1, 0]), 0)
        assert graph.pairs == ((0, 1),)

    def test_matches_double_loop(self):
        for fn in random_tables(20, 4, -2, 2, seed=0):
            for b in (0, 3, 9, 15):
                graph = violation_graph(fn, b)
                assert list(graph.pairs) == ref_violated_pairs(fn.values, fn.n, b)

    def test_edge_subset_reproduces_one_sided_counts(self):
        """Hypercube-edge violations must agree with the sign profile."""
        for fn in random_tables(15, 4, 0, 2, seed=1):
            profile = violation_profile(fn)
            for b in range(16):
                graph = violation_graph(fn, b)
                edges = graph.edge_pairs()
                per_dim = [0] * fn.n
                for u, v in edges:
                    per_dim[(u ^ v).bit_length() - 1] += 1
                # Each violated edge has two endpoints in the point count.
                assert [2 * c for c in per_dim] == list(profile.one_sided_counts(b))

    def test_cap_guard(self):
        with pytest.raises(CapExceededError):
            violation_graph(HypercubeFunction(6, [0] * 64), 0)
        # An explicit cap raise is allowed.
        assert violation_graph(HypercubeFunction(6, [0] * 64), 0, cap=6).pairs == ()


class TestMinVertexCover:
    def test_empty_graph(self):
        result = min_vertex_cover(ViolationGraph(2, 0, ()))
        assert result.size == 0 and result.cover == ()

    def test_parity_star(self):
        result = min_vertex_cover(violation_graph(PARITY2, 0))
        assert result.size == 1
        assert result.cover == (3,)

    def test_three_leaf_star(self):
        graph = ViolationGraph(3, 0, ((0, 1), (0, 2), (0, 4)))
        result = min_vertex_cover(graph)
        assert result.size == 1
        assert result.cover == (0,)

    def test_matches_enumeration_on_random_graphs(self):
        rng = np.random.default_rng(2)
        for _ in range(40):
            num_edges = int(rng.integers(1, 12))
            pairs = set()
            while len(pairs) < num_edges:
                u, v = rng.integers(0, 9, size=2)
                if u != v:
                    pairs.add((min(u, v), max(u, v)))
            graph = ViolationGraph(4, 0, tuple(sorted((int(u), int(v)) for u, v in pairs)))
            result = min_vertex_cover(graph)
            assert result.size == ref_min_vertex_cover_size(graph.pairs)
            # Returned set must actually cover.
            chosen = set(result.cover)
            assert all(u in chosen or v in chosen for u, v in graph.pairs)
            # Sandwich around the greedy matching.
            assert result.matching_lower <= result.size <= 2 * result.matching_lower


class TestDistance:
    def test_monotone_distance_zero(self):
        report = distance_to_b_monotone(HypercubeFunction(2, [0, 1, 1, 1]), 0)
        assert report.distance == 0 and report.cover == ()

    def test_single_edge_half(self):
        report = distance_to_b_monotone(HypercubeFunction(1, [1, 0]), 0)
        assert report.distance == Fraction(1, 2)

    def test_parity_quarter_with_repair(self):
        report = distance_to_b_monotone(PARITY2, 0)
        assert report.distance == Fraction(1, 4)
        assert report.cover == (3,)
        repaired = apply_repair(PARITY2, 0, report.cover)
        assert repaired == HypercubeFunction(2, [0, 1, 1, 1])

    def test_unate_distance_zero_iff_unate_small(self):
        for fn in random_tables(25, 3, 0, 1, seed=3):
            report = distance_to_unate(fn)
            assert (report.distance == 0) == (is_unate(fn) is not None)

    @pytest.mark.parametrize("n", [4, 5])
    def test_unate_distance_zero_iff_unate_wider_range(self, n):
        for fn in random_tables(15, n, -3, 3, seed=7 + n):
            report = distance_to_unate(fn)
            assert (report.distance == 0) == (is_unate(fn) is not None)
        # Random tables are overwhelmingly non-unate; include real unate ones.
        from unate import gen_weighted_threshold

        for seed in range(5):
            fn = gen_weighted_threshold(n, seed).truth_table()
            assert distance_to_unate(fn).distance == 0

    def test_distance_to_unate_parity(self):
        report = distance_to_unate(PARITY2)
        assert report.distance == Fraction(1, 4)
        assert report.orientation == 0  # every orientation ties; lexicographic
        for b in range(4):
            assert distance_to_b_monotone(PARITY2, b).distance == Fraction(1, 4)

    def test_flipped_and(self):
        # AND with f(00) raised to 1: reverting one point restores unateness.
        fn = HypercubeFunction(2, [1, 0, 0, 1])
        assert is_unate(fn) is None
        assert distance_to_unate(fn).distance == Fraction(1, 4)

    def test_min_over_orientations(self):
        for fn in random_tables(10, 3, -1, 1, seed=4):
            best = distance_to_unate(fn)
            for b in range(8):
                assert best.distance <= distance_to_b_monotone(fn, b).distance

    def test_boolean_brute_force_agreement_n2(self):
        unate_tables = boolean_unate_tables(2)
        for values in product((0, 1), repeat=4):
            fn = HypercubeFunction(2, values)
            expected = ref_distance_to_unate_boolean(values, 2, unate_tables)
            assert distance_to_unate(fn).distance == expected

    def test_cap_guard(self):
        with pytest.raises(CapExceededError):
            distance_to_unate(HypercubeFunction(6, [0] * 64))


class TestRepair:
    def test_repair_validity_random(self):
        """Rewriting f on the returned cover always yields a conforming table."""
        rng = np.random.default_rng(5)
        for _ in range(30):
            n = int(rng.integers(1, 5))
            fn = HypercubeFunction(n, rng.integers(-3, 4, size=1 << n))
            b = int(rng.integers(0, 1 << n))
            report = distance_to_b_monotone(fn, b)
            repaired = apply_repair(fn, b, report.cover)
            assert is_b_monotone(repaired, b)
            changed = int(np.count_nonzero(repaired.values != fn.values))
            assert changed <= report.cover_size

    def test_repair_only_touches_cover(self):
        report = distance_to_b_monotone(PARITY2, 0)
        repaired = apply_repair(PARITY2, 0, report.cover)
        for x in range(4):
            if x not in report.cover:
                assert repaired(x) == PARITY2(x)


class TestDimensionReduction:
    def test_conforming_function_vacuous(self):
        report = verify_dimension_reduction(HypercubeFunction(2, [0, 1, 1, 1]), 0)
        assert report.eps_exact == 0
        assert report.holds

    def test_parity_example(self):
        report = verify_dimension_reduction(PARITY2, 0)
        assert report.eps_exact == Fraction(1, 4)
        assert report.mu == (Fraction(1, 2), Fraction(1, 2))
        assert report.sum_mu == 1
        assert report.holds          # 1 >= 1/16
        assert report.holds_half     # 1 >= 1/8

    def test_random_instances_hold(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            fn = HypercubeFunction(n, rng.integers(0, 3, size=1 << n))
            b = int(rng.integers(0, 1 << n))
            report = verify_dimension_reduction(fn, b)
            assert report.holds
