"""Tests for staircases, canonical forms, grid enumeration and ranking."""

import pytest

from sumdiff import constructions
from sumdiff.core import Configuration, Point, check_difference_injective
from sumdiff.errors import BudgetExceeded, ValidationError
from sumdiff.optimizer import OptimizerOptions
from sumdiff.search import (
    SearchSpec,
    canonical_form,
    canonical_key,
    enumerate_and_rank,
    fiber_fingerprint,
    fiber_isomorphic,
    remark_check,
    staircase,
)

SMALL_OPTIONS = OptimizerOptions(starts=4, max_evals=3000)


class TestStaircase:
    def test_first_points(self):
        assert staircase(3).points == (Point(0, 1), Point(1, 1), Point(1, 0))

    def test_nine_points(self):
        assert staircase(9).points[-2:] == (Point(4, -2), Point(4, -3))

    @pytest.mark.parametrize("n", [1, 2, 5, 7, 9, 12])
    def test_differences_are_consecutive(self, n):
        assert sorted(p.a - p.b for p in staircase(n).points) == list(range(-1, n - 1))

    def test_staircase7_points(self, staircase7):
        expected = [(0, 1), (1, 1), (1, 0), (2, 0), (2, -1), (3, -1), (3, -2)]
        assert [(p.a, p.b) for p in staircase7.points] == expected

    def test_three_points_are_ruzsa(self, ruzsa):
        assert canonical_key(staircase(3)) == canonical_key(ruzsa)

    def test_needs_a_point(self):
        with pytest.raises(ValidationError):
            staircase(0)


class TestCanonicalForm:
    def test_translates_to_origin(self):
        c = Configuration.from_pairs([(2, 1), (1, 2)], ["0"])
        assert canonical_form(c).points == (Point(0, 0), Point(1, -1))

    def test_idempotent(self, five_point):
        once = canonical_form(five_point)
        assert canonical_form(once) == once

    def test_translation_invariant(self, ruzsa):
        assert canonical_key(ruzsa.translate(5, -3)) == canonical_key(ruzsa)


class TestFiberIsomorphism:
    def test_relabeling(self, ruzsa):
        assert fiber_isomorphic(ruzsa, staircase(3))

    def test_different_fingerprints(self, ruzsa, four_point):
        assert fiber_fingerprint(ruzsa) != fiber_fingerprint(four_point)
        assert not fiber_isomorphic(ruzsa, four_point)


class TestEnumerate:
    def test_single_points_are_degenerate(self):
        ranking = enumerate_and_rank(SearchSpec(width=1, height=0, size=1, optimizer=SMALL_OPTIONS))
        assert len(ranking) == 0
        assert ranking.stats["unique"] == 1
        assert ranking.stats["degenerate"] == 1

    def test_collinear_pair(self):
        ranking = enumerate_and_rank(SearchSpec(width=1, height=0, size=2, optimizer=SMALL_OPTIONS))
        assert len(ranking) == 1
        assert ranking.entries[0].result.best_alpha == pytest.approx(1.0, abs=1e-12)

    def test_four_point_grid(self, four_point):
        spec = SearchSpec(width=2, height=1, size=4, optimizer=OptimizerOptions(starts=8, max_evals=4000))
        ranking = enumerate_and_rank(spec)
        alphas = [entry.result.best_alpha for entry in ranking.entries]
        assert alphas == sorted(alphas, reverse=True)
        for entry in ranking.entries:
            assert check_difference_injective(entry.configuration.points)
            assert canonical_form(entry.configuration) == entry.configuration
        by_key = {canonical_key(entry.configuration): entry for entry in ranking.entries}
        found = by_key[canonical_key(four_point)]
        assert found.result.best_alpha == pytest.approx(1.7726, abs=1e-3)
        assert alphas[0] >= found.result.best_alpha

    def test_reproducible(self):
        spec = SearchSpec(width=1, height=1, size=3, optimizer=SMALL_OPTIONS)
        first = enumerate_and_rank(spec).to_documents()
        second = enumerate_and_rank(spec).to_documents()
        assert first == second

    def test_workers_do_not_change_ranking(self):
        serial = SearchSpec(width=1, height=1, size=3, optimizer=SMALL_OPTIONS)
        threaded = SearchSpec(width=1, height=1, size=3, optimizer=SMALL_OPTIONS, workers=4)
        assert enumerate_and_rank(serial).to_documents() == enumerate_and_rank(threaded).to_documents()

    def test_budget(self):
        with pytest.raises(BudgetExceeded) as info:
            enumerate_and_rank(SearchSpec(width=2, height=1, size=4, budget=10))
        assert info.value.count == 126
        assert info.value.budget == 10

    def test_fingerprint_dedup_keeps_fewer(self):
        plain = SearchSpec(width=1, height=1, size=3, optimizer=SMALL_OPTIONS)
        deduped = SearchSpec(width=1, height=1, size=3, optimizer=SMALL_OPTIONS, fingerprint_dedup=True)
        assert len(enumerate_and_rank(deduped)) <= len(enumerate_and_rank(plain))

    def test_spec_document(self):
        spec = SearchSpec.from_document({
            "grid": {"width": 3, "height": 2}, "size": 5, "optimizer": {"starts": 2},
        })
        assert spec.subset_count() == 15504
        assert spec.optimizer.starts == 2
        assert [str(r) for r in spec.slopes] == ["0", "1", "inf"]

    def test_spec_document_missing_size(self):
        with pytest.raises(ValidationError):
            SearchSpec.from_document({"grid": {"width": 3, "height": 2}})


class TestRemark:
    def test_nine_points_do_not_improve(self):
        report = remark_check()
        assert not report.improved
        assert report.alpha7 > constructions.THRESHOLDS["staircase-7"]
        assert report.alpha9 <= report.alpha7 + 1e-4
