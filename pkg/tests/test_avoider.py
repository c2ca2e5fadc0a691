"""Tests for forbidden difference sets, avoidance checks, exact
branch-and-bound search, and greedy heuristics."""

import numpy as np
import pytest

from primediff.avoider import (
    ForbiddenSet,
    find_forbidden_pair,
    greedy_avoiding,
    growth_table,
    is_avoiding,
    max_avoiding_exact,
)
from primediff.errors import DomainError, ResourceError

from oracles import avoiding_prefix_optima, forbidden_diffs_naive, is_prime_naive


class TestForbiddenSet:
    def test_matches_naive_primality(self, tables_small):
        for d in (1, 2, 3):
            fs = ForbiddenSet.build(300, d, tables_small)
            want = forbidden_diffs_naive(300, d)
            for s in range(1, 300):
                assert fs.forbidden(s) == (s in want)
            assert fs.count() == len(want)

    def test_table_and_direct_paths_agree(self, tables_small):
        # a too-small table forces the per-value primality fallback
        tiny = ForbiddenSet.build(300, 7, None)
        fast = ForbiddenSet.build(300, 7, tables_small)
        assert tiny.mask == fast.mask

    def test_small_universe(self):
        fs = ForbiddenSet.build(1, 1, None)
        assert fs.count() == 0


class TestAvoidanceChecks:
    def test_pair_is_genuine(self, tables_small):
        rng = np.random.default_rng(83)
        for _ in range(100):
            n = int(rng.integers(5, 200))
            d = int(rng.integers(1, 4))
            fs = ForbiddenSet.build(n, d, tables_small)
            k = int(rng.integers(2, n + 1))
            elements = sorted(rng.choice(np.arange(1, n + 1), size=k, replace=False).tolist())
            pair = find_forbidden_pair(elements, fs)
            if pair is None:
                assert is_avoiding(elements, fs)
            else:
                s, lower, upper = pair
                assert upper - lower == s
                assert lower in elements and upper in elements
                assert is_prime_naive(d * s + 1)
                assert not is_avoiding(elements, fs)

    def test_smallest_difference_reported(self, tables_small):
        fs = ForbiddenSet.build(30, 1, tables_small)
        # differences 1 (-> 2 prime) and 4 (-> 5 prime) both present
        s, lower, upper = find_forbidden_pair([3, 4, 8], fs)
        assert s == 1

    def test_empty_and_singleton(self, tables_small):
        fs = ForbiddenSet.build(50, 1, tables_small)
        assert is_avoiding([], fs)
        assert is_avoiding([17], fs)


class TestExactSearch:
    def test_matches_enumeration_oracle(self, tables_small):
        for d in (1, 2, 3):
            optima = avoiding_prefix_optima(16, d)
            for n in range(1, 17):
                fs = ForbiddenSet.build(n, d, tables_small)
                res = max_avoiding_exact(fs)
                assert res.optimal
                assert res.size == optima[n]
                assert is_avoiding(res.elements, fs)
                assert len(res.elements) == res.size

    def test_node_budget_truncates(self, tables_small):
        fs = ForbiddenSet.build(60, 1, tables_small)
        full = max_avoiding_exact(fs)
        cut = max_avoiding_exact(fs, node_budget=3)
        assert full.optimal and not cut.optimal
        assert cut.size <= full.size
        assert is_avoiding(cut.elements, fs)

    def test_requires_budget_past_cap(self, tables_small):
        fs = ForbiddenSet.build(65, 1, tables_small)
        with pytest.raises(ResourceError):
            max_avoiding_exact(fs)
        res = max_avoiding_exact(fs, node_budget=100_000)
        assert is_avoiding(res.elements, fs)


class TestGreedy:
    def test_first_fit_small_case(self, tables_small):
        # forbidden diffs for d=1 start 1, 2, 4, 6, 10, 12; the ascending
        # scan keeps 1, then the next allowed gaps
        fs = ForbiddenSet.build(12, 1, tables_small)
        res = greedy_avoiding(fs, strategy="first_fit")
        assert res.elements[0] == 1
        assert is_avoiding(res.elements, fs)
        assert not res.optimal

    def test_first_fit_deterministic(self, tables_small):
        fs = ForbiddenSet.build(500, 2, tables_small)
        a = greedy_avoiding(fs, strategy="first_fit")
        b = greedy_avoiding(fs, strategy="first_fit")
        assert a.elements == b.elements

    def test_random_local_improves_or_matches(self, tables_small):
        fs = ForbiddenSet.build(400, 1, tables_small)
        base = greedy_avoiding(fs, strategy="first_fit")
        better = greedy_avoiding(fs, strategy="random_local", seed=5)
        assert is_avoiding(better.elements, fs)
        assert better.size >= base.size

    def test_random_local_seed_determinism(self, tables_small):
        fs = ForbiddenSet.build(300, 1, tables_small)
        a = greedy_avoiding(fs, strategy="random_local", seed=11)
        b = greedy_avoiding(fs, strategy="random_local", seed=11)
        assert a.elements == b.elements

    def test_unknown_strategy(self, tables_small):
        fs = ForbiddenSet.build(30, 1, tables_small)
        with pytest.raises(DomainError):
            greedy_avoiding(fs, strategy="simulated_annealing")


class TestGrowthTable:
    def test_rows(self, tables_small):
        rows = growth_table([10, 20, 64], 1, exact_cap=24, tables=tables_small)
        assert [r["n"] for r in rows] == [10, 20, 64]
        assert rows[0]["optimal"] and rows[1]["optimal"]
        assert not rows[2]["optimal"]
        assert rows[2]["strategy"] == "first_fit"
        for r in rows:
            assert r["shape"] > 0
            assert r["size"] >= 1

    def test_sizes_match_exact_solver(self, tables_small):
        rows = growth_table([12, 18], 2, exact_cap=24, tables=tables_small)
        for row in rows:
            fs = ForbiddenSet.build(row["n"], 2, tables_small)
            assert row["size"] == max_avoiding_exact(fs).size
