"""Tests for root finding, equalization, ansatz reduction and the multi-start optimizer."""

import math
from fractions import Fraction

import numpy as np
import pytest

from sumdiff import constructions
from sumdiff.config.manager import reset_config_manager
from sumdiff.core import Configuration
from sumdiff.entropy import Measure, ProjectionStack, entropy_ratio
from sumdiff.errors import (
    DegenerateDenominator,
    NoBracket,
    NonFinite,
    NotOneDimensional,
    ValidationError,
)
from sumdiff.optimizer import (
    AffineRelation,
    OptimizerOptions,
    SymmetryAnsatz,
    equalize_profile,
    maximize_alpha,
    solve_equalization_root,
)


class TestRootFinding:
    def test_linear(self):
        assert solve_equalization_root(lambda x: x - 0.5, 0.0, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_four_point_equation(self):
        root = solve_equalization_root(constructions.four_point_equation, 0.0, 0.25)
        assert root == pytest.approx(0.1135, abs=5e-5)

    def test_five_point_equation(self):
        root = solve_equalization_root(constructions.five_point_equation, 0.01, 0.249)
        assert root == pytest.approx(0.21798, abs=5e-6)

    def test_no_bracket(self):
        with pytest.raises(NoBracket):
            solve_equalization_root(lambda x: x + 1.0, 0.0, 1.0)

    def test_non_finite(self):
        def f(x):
            if x == 0.0:
                return -1.0
            if x == 1.0:
                return 1.0
            return math.nan

        with pytest.raises(NonFinite):
            solve_equalization_root(f, 0.0, 1.0)


class TestSymmetryAnsatz:
    def test_palindromic_ties(self):
        assert SymmetryAnsatz.palindromic(7).ties == ((7, 1), (6, 2), (5, 3))
        assert SymmetryAnsatz.palindromic(9).ties == ((9, 1), (8, 2), (7, 3), (6, 4))

    def test_reduce_dimension(self):
        assert SymmetryAnsatz.palindromic(7).reduce(7).dimension == 3
        assert constructions.four_point_ansatz().reduce(4).dimension == 1
        assert SymmetryAnsatz().reduce(5).dimension == 4

    def test_reduced_points_satisfy_constraints(self, rng):
        reduced = SymmetryAnsatz.palindromic(7).reduce(7)
        for _ in range(20):
            weights = reduced.measure_at(reduced.coordinates_of(rng.dirichlet(np.ones(7))))
            if weights is None:
                continue
            assert weights.sum() == pytest.approx(1.0, abs=1e-12)
            assert weights[0] == pytest.approx(weights[6], abs=1e-15)
            assert weights[1] == pytest.approx(weights[5], abs=1e-15)

    def test_inconsistent(self):
        ansatz = SymmetryAnsatz(
            ties=((1, 2),),
            affine_relations=(AffineRelation(((1, Fraction(1)),), Fraction(7, 10)),),
        )
        with pytest.raises(ValidationError):
            ansatz.reduce(2)

    def test_misses_simplex(self):
        ansatz = SymmetryAnsatz(
            affine_relations=(AffineRelation(((1, Fraction(1)), (2, Fraction(-1))), Fraction(2)),),
        )
        with pytest.raises(ValidationError):
            ansatz.reduce(3)

    def test_no_free_parameter(self):
        with pytest.raises(ValidationError):
            SymmetryAnsatz(ties=((1, 2),)).reduce(2)

    def test_tie_out_of_range(self):
        with pytest.raises(ValidationError):
            SymmetryAnsatz(ties=((8, 1),)).reduce(7)

    def test_document_round_trip(self):
        ansatz = constructions.four_point_ansatz()
        assert SymmetryAnsatz.from_document(ansatz.to_document()) == ansatz

    def test_symmetric_measures_equalize_outer_slopes(self, staircase7, rng):
        stack = ProjectionStack(staircase7)
        for _ in range(100):
            p1, p2, p3 = rng.dirichlet(np.ones(4))[:3] / 2
            weights = np.array([p1, p2, p3, 1 - 2 * (p1 + p2 + p3), p3, p2, p1])
            h0, _, hinf = stack.projected_entropies(weights)
            assert abs(h0 - hinf) < 1e-14


class TestEqualization:
    def test_four_point(self, four_point):
        m = equalize_profile(four_point, constructions.four_point_ansatz())
        assert m.weights == pytest.approx((0.1135, 0.3865, 0.3865, 0.1135), abs=5e-5)
        profile = entropy_ratio(four_point, m)
        spread = [h for _, h in profile.h_projected]
        assert max(spread) - min(spread) < 1e-11
        assert profile.alpha == pytest.approx(1.7726, abs=5e-4)

    def test_five_point(self, five_point):
        m = equalize_profile(five_point, constructions.five_point_ansatz())
        assert m.weights[0] == pytest.approx(0.21798, abs=5e-6)
        assert m.weights[4] == pytest.approx(0.12808, abs=2e-5)

    def test_requires_one_parameter(self, four_point):
        with pytest.raises(NotOneDimensional):
            equalize_profile(four_point, SymmetryAnsatz())

    def test_flat_equation(self):
        c = Configuration.from_pairs([(0, 0), (1, 0)], ["0", "1"])
        with pytest.raises(NotOneDimensional):
            equalize_profile(c, SymmetryAnsatz())


class TestOptions:
    def test_unknown_key(self):
        with pytest.raises(ValidationError):
            OptimizerOptions.from_document({"stars": 3})

    def test_overlay(self):
        options = OptimizerOptions.from_document({"starts": 5}, base=OptimizerOptions(seed=9))
        assert (options.starts, options.seed) == (5, 9)

    def test_invalid_values(self):
        with pytest.raises(ValidationError):
            OptimizerOptions(starts=0)
        with pytest.raises(ValidationError):
            OptimizerOptions(softmin_temperature=-1.0)

    def test_reads_config_file(self, tmp_path):
        path = tmp_path / "custom.json"
        path.write_text('{"optimizer": {"starts": 3}}')
        reset_config_manager(path)
        options = OptimizerOptions.from_config()
        assert options.starts == 3
        assert options.max_evals == 20000


class TestMaximizeAlpha:
    def test_staircase7_beats_threshold(self, staircase7):
        result = maximize_alpha(staircase7, constructions.staircase7_ansatz())
        assert result.best_alpha > 1.77898
        printed = entropy_ratio(staircase7, constructions.staircase7_printed_measure()).alpha
        assert result.best_alpha >= printed
        p1, p2, p3 = result.best_measure.weights[:3]
        assert p1 == pytest.approx(2.5e-4, abs=1e-4)
        assert p2 == pytest.approx(0.028156, abs=5e-3)
        assert p3 == pytest.approx(0.22425, abs=1e-2)

    def test_four_point_without_ansatz(self, four_point):
        result = maximize_alpha(four_point, None, OptimizerOptions(starts=16))
        assert result.best_alpha == pytest.approx(1.7726, abs=5e-4)

    def test_single_injective_slope(self):
        c = Configuration.from_pairs([(0, 0), (1, 0), (2, 0)], ["0"])
        result = maximize_alpha(c, None, OptimizerOptions(starts=4, max_evals=2000))
        assert result.best_alpha == pytest.approx(1.0, abs=1e-12)

    def test_one_point_is_degenerate(self):
        c = Configuration.from_pairs([(0, 0)], ["0", "inf"])
        with pytest.raises(DegenerateDenominator):
            maximize_alpha(c)

    def test_reported_alpha_matches_measure(self, ruzsa, fast_options):
        result = maximize_alpha(ruzsa, None, fast_options)
        assert result.best_alpha == pytest.approx(entropy_ratio(ruzsa, result.best_measure).alpha, abs=1e-10)
        assert result.best_alpha >= entropy_ratio(ruzsa, Measure.uniform(3)).alpha - 1e-10
        assert result.starts_used == fast_options.starts

    def test_deterministic(self, four_point, fast_options):
        first = maximize_alpha(four_point, None, fast_options)
        second = maximize_alpha(four_point, None, fast_options)
        assert first.to_document() == second.to_document()

    def test_workers_do_not_change_result(self, four_point):
        serial = maximize_alpha(four_point, None, OptimizerOptions(starts=6, max_evals=3000))
        threaded = maximize_alpha(four_point, None, OptimizerOptions(starts=6, max_evals=3000, workers=3))
        assert serial.best_measure == threaded.best_measure
        assert serial.best_alpha == threaded.best_alpha

    def test_more_starts_never_worse(self, five_point):
        few = maximize_alpha(five_point, None, OptimizerOptions(starts=3, max_evals=3000))
        more = maximize_alpha(five_point, None, OptimizerOptions(starts=6, max_evals=3000))
        assert more.best_alpha >= few.best_alpha

    def test_ansatz_respected(self, five_point):
        result = maximize_alpha(five_point, constructions.five_point_ansatz(), OptimizerOptions(starts=8))
        w = result.best_measure.weights
        assert w[0] == pytest.approx(w[1], abs=1e-12)
        assert w[0] == pytest.approx(w[3], abs=1e-12)
        assert result.best_alpha >= 1.61226 - 1e-4

    def test_softmin_objective(self, four_point):
        result = maximize_alpha(
            four_point, None, OptimizerOptions(starts=4, max_evals=3000, softmin_temperature=0.01)
        )
        assert math.isfinite(result.best_alpha)
        assert result.best_alpha >= 1.0
