"""Tests for exact configurations, projections and fibers."""

import math
from fractions import Fraction

import pytest

from sumdiff.core import (
    INFINITY,
    Configuration,
    Point,
    Slope,
    cardinality_alpha,
    check_difference_injective,
    fibers,
    parse_rational,
    project,
)
from sumdiff.errors import DegenerateProjection, ValidationError

from conftest import random_configuration


def members(partition):
    return [(f.value, f.members) for f in partition.classes]


class TestParsing:
    def test_rational_forms(self):
        assert parse_rational("1/2") == Fraction(1, 2)
        assert parse_rational("-6/4") == Fraction(-3, 2)
        assert parse_rational("0.5") == Fraction(1, 2)
        assert parse_rational(3) == 3

    def test_rejects_zero_denominator(self):
        with pytest.raises(ValidationError):
            parse_rational("1/0")

    def test_rejects_floats(self):
        with pytest.raises(ValidationError):
            parse_rational(0.5)

    def test_slope_minus_one_is_reserved(self):
        with pytest.raises(ValidationError) as info:
            Slope.parse("-1")
        assert "π_{-1}" in str(info.value)

    def test_infinity_tokens(self):
        assert Slope.parse("inf") == INFINITY
        assert Slope.parse("∞").is_infinite
        assert str(Slope.parse("2/4")) == "1/2"

    @pytest.mark.parametrize("points", [[1, 2], ["12", "34"], [[0, 1, 2]]])
    def test_rejects_points_that_are_not_pairs(self, points):
        with pytest.raises(ValidationError):
            Configuration.from_document({"points": points, "slopes": ["0"]})

    def test_document_round_trip(self, five_point):
        assert Configuration.from_document(five_point.to_document()) == five_point
        assert five_point.to_document()["points"][4] == ["1", "1/2"]


class TestProject:
    def test_rational_slope(self):
        assert project(Point(1, Fraction(1, 2)), Slope(Fraction(2))) == 2

    def test_zero_slope_is_first_coordinate(self):
        for a, b in [(0, 1), (5, -3), (Fraction(7, 3), 2)]:
            assert project(Point(a, b), Slope(Fraction(0))) == a

    def test_infinite_slope_is_second_coordinate(self):
        assert project(Point(3, -2), INFINITY) == -2

    def test_matches_affine_formula(self):
        p = Point(Fraction(2, 3), Fraction(-5, 7))
        r = Fraction(11, 13)
        assert project(p, Slope(r)) == Fraction(2, 3) + r * Fraction(-5, 7)


class TestFibers:
    def test_ruzsa_zero_slope(self, ruzsa):
        assert members(fibers(ruzsa, Slope(Fraction(0)))) == [(0, (0,)), (1, (1, 2))]

    def test_five_point_slope_two(self, five_point):
        assert members(fibers(five_point, Slope(Fraction(2)))) == [(1, (1,)), (2, (0, 3, 4)), (3, (2,))]

    def test_injective_projection_gives_singletons(self):
        c = Configuration.from_pairs([(0, 0), (1, 0), (2, 0)], ["0"])
        assert len(fibers(c, c.slopes[0])) == len(c)

    def test_document_is_one_based(self, ruzsa):
        document = fibers(ruzsa, Slope(Fraction(0))).to_document()
        assert document["classes"][1] == {"value": "1", "members": [2, 3]}

    def test_classes_partition_the_points(self, rng):
        for _ in range(100):
            c = random_configuration(rng)
            for r in c.slopes:
                partition = fibers(c, r)
                indices = sorted(i for f in partition.classes for i in f.members)
                assert indices == list(range(len(c)))
                values = [f.value for f in partition.classes]
                assert values == sorted(set(values))
                for f in partition.classes:
                    assert all(project(c.points[i], r) == f.value for i in f.members)


class TestDifferenceInjective:
    def test_ruzsa(self, ruzsa):
        assert check_difference_injective(ruzsa.points)

    def test_repeated_difference(self):
        assert not check_difference_injective([Point(0, 0), Point(1, 1)])

    def test_staircase7(self, staircase7):
        assert check_difference_injective(staircase7.points)
        assert {p.a - p.b for p in staircase7.points} == set(range(-1, 6))

    def test_matches_independent_grouping(self, rng):
        for _ in range(200):
            cells = rng.choice(25, size=int(rng.integers(1, 7)), replace=False)
            points = [Point(int(cell) // 5, int(cell) % 5) for cell in cells]
            groups = {}
            for p in points:
                groups.setdefault(p.a - p.b, []).append(p)
            assert check_difference_injective(points) == all(len(g) == 1 for g in groups.values())

    def test_configuration_rejects_repeated_difference(self):
        with pytest.raises(ValidationError) as info:
            Configuration.from_pairs([(0, 0), (1, 1)], ["0"])
        assert info.value.invariant == "π_{-1} injective on G"

    def test_configuration_rejects_duplicate_points_and_slopes(self):
        with pytest.raises(ValidationError):
            Configuration.from_pairs([(0, 1), (0, 1)], ["0"])
        with pytest.raises(ValidationError):
            Configuration.from_pairs([(0, 1)], ["0", "0/3"])
        with pytest.raises(ValidationError):
            Configuration.from_pairs([(0, 1)], [])


class TestCardinalityAlpha:
    def test_ruzsa(self, ruzsa):
        assert cardinality_alpha(ruzsa) == pytest.approx(math.log(3) / math.log(2), abs=1e-12)

    def test_five_point(self, five_point):
        assert cardinality_alpha(five_point) == pytest.approx(math.log(5) / math.log(3), abs=1e-12)

    def test_injective_slope_gives_one(self):
        c = Configuration.from_pairs([(0, 0), (1, 0), (2, 0)], ["0"])
        assert cardinality_alpha(c) == pytest.approx(1.0)

    def test_degenerate(self):
        c = Configuration.from_pairs([(0, 0), (0, 1)], ["0"])
        with pytest.raises(DegenerateProjection):
            cardinality_alpha(c)

    def test_bounded_by_log_two(self, rng):
        for _ in range(100):
            c = random_configuration(rng)
            try:
                alpha = cardinality_alpha(c)
            except DegenerateProjection:
                continue
            assert alpha <= math.log(len(c)) / math.log(2) + 1e-12
