"""Exact point configurations, projections and fiber structure."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sumdiff.errors import DegenerateProjection, ValidationError

RationalLike = Union[Fraction, int, str]

INFINITY_TOKENS = ("inf", "infinity", "∞")


def parse_rational(value: RationalLike) -> Fraction:
    """
    Parse an exact rational from an integer, a Fraction or a string.

    Strings may be integers ("3"), ratios ("-1/2") or finite decimals ("0.5").
    Floats are rejected because they are not exact.

    Args:
        value: Value to parse

    Returns:
        The rational in lowest terms with positive denominator
    """
    if isinstance(value, bool):
        raise ValidationError(f"Not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ZeroDivisionError:
            raise ValidationError(f"Denominator 0 in rational '{value}'", "nonzero denominator")
        except ValueError:
            raise ValidationError(f"Not a rational: '{value}'")
    raise ValidationError(f"Not a rational: {value!r} (use a string such as \"1/2\")")


def format_rational(value: Fraction) -> str:
    """Serialize a rational as "p/q" or an integer string."""
    return str(value)


@dataclass(frozen=True)
class Slope:
    """A projection direction; ``value`` None stands for the slope at infinity."""

    value: Optional[Fraction]

    def __post_init__(self):
        if self.value is None:
            return
        object.__setattr__(self, 'value', parse_rational(self.value))
        if self.value == -1:
            raise ValidationError(
                "Slope -1 is reserved for the difference map π_{-1}",
                "slope ≠ -1",
            )

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @classmethod
    def parse(cls, value: Union[RationalLike, "Slope"]) -> "Slope":
        """Parse a slope from a rational or one of the tokens "inf"/"infinity"/"∞"."""
        if isinstance(value, Slope):
            return value
        if isinstance(value, str) and value.strip().lower() in INFINITY_TOKENS:
            return cls(None)
        return cls(parse_rational(value))

    def sort_key(self) -> Tuple[int, Fraction]:
        if self.value is None:
            return (1, Fraction(0))
        return (0, self.value)

    def __str__(self) -> str:
        if self.value is None:
            return "inf"
        return format_rational(self.value)


INFINITY = Slope(None)


@dataclass(frozen=True, order=True)
class Point:
    """A point (a, b) with exact rational coordinates."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'a', parse_rational(self.a))
        object.__setattr__(self, 'b', parse_rational(self.b))

    @classmethod
    def parse(cls, pair: Sequence[RationalLike]) -> "Point":
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValidationError(f"A point must be a pair of rationals, got {pair!r}")
        return cls(parse_rational(pair[0]), parse_rational(pair[1]))

    def translate(self, da: Fraction, db: Fraction) -> "Point":
        return Point(self.a + da, self.b + db)

    def to_document(self) -> List[str]:
        return [format_rational(self.a), format_rational(self.b)]

    def __str__(self) -> str:
        return f"({self.a}, {self.b})"


def project(p: Point, r: Slope) -> Fraction:
    """
    Project a point along a slope: π_r(a, b) = a + r·b, and π_∞(a, b) = b.

    Args:
        p: Point to project
        r: Projection slope

    Returns:
        The exact projected value
    """
    if r.value is None:
        return p.b
    return p.a + r.value * p.b


def check_difference_injective(points: Sequence[Point]) -> bool:
    """Return True iff the differences a - b are pairwise distinct."""
    differences = {p.a - p.b for p in points}
    return len(differences) == len(points)


@dataclass(frozen=True)
class Configuration:
    """A finite planar set G together with the slopes r_1, ..., r_n it is tested against."""

    points: Tuple[Point, ...]
    slopes: Tuple[Slope, ...]

    def __post_init__(self):
        object.__setattr__(self, 'points', tuple(self.points))
        object.__setattr__(self, 'slopes', tuple(Slope.parse(r) for r in self.slopes))

        if not self.points:
            raise ValidationError("A configuration needs at least one point", "non-empty G")
        if len(set(self.points)) != len(self.points):
            raise ValidationError("Configuration points must be pairwise distinct", "distinct points")
        if not check_difference_injective(self.points):
            raise ValidationError(
                "π_{-1} is not injective: two points share the same difference a - b",
                "π_{-1} injective on G",
            )
        if not self.slopes:
            raise ValidationError("A configuration needs at least one slope", "at least one slope")
        if len(set(self.slopes)) != len(self.slopes):
            raise ValidationError("Slopes must be pairwise distinct", "distinct slopes")

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[RationalLike]],
                   slopes: Iterable[Union[RationalLike, Slope]]) -> "Configuration":
        """Build a configuration from coordinate pairs and slope tokens."""
        return cls(
            tuple(Point.parse(pair) for pair in pairs),
            tuple(Slope.parse(r) for r in slopes),
        )

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "Configuration":
        """Parse {"points": [["0","1"], ...], "slopes": ["0","1","inf"]}."""
        if not isinstance(document, dict):
            raise ValidationError("Configuration document must be a JSON object")
        points = document.get("points")
        slopes = document.get("slopes")
        if not isinstance(points, list) or not isinstance(slopes, list):
            raise ValidationError('Configuration document needs "points" and "slopes" lists')
        return cls.from_pairs(points, slopes)

    def to_document(self) -> Dict[str, Any]:
        return {
            "points": [p.to_document() for p in self.points],
            "slopes": [str(r) for r in self.slopes],
        }

    def translate(self, da: RationalLike, db: RationalLike) -> "Configuration":
        da, db = parse_rational(da), parse_rational(db)
        return Configuration(tuple(p.translate(da, db) for p in self.points), self.slopes)

    def with_points(self, points: Sequence[Point]) -> "Configuration":
        return Configuration(tuple(points), self.slopes)


@dataclass(frozen=True)
class FiberClass:
    """One fiber π_r^{-1}(value); ``members`` are 0-based point indices."""

    value: Fraction
    members: Tuple[int, ...]


@dataclass(frozen=True)
class FiberPartition:
    """The fibers of one slope, ascending by projected value."""

    slope: Slope
    classes: Tuple[FiberClass, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.classes)

    def labels(self, size: int) -> List[int]:
        """Class index of every point."""
        labels = [0] * size
        for position, fiber in enumerate(self.classes):
            for index in fiber.members:
                labels[index] = position
        return labels

    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(fiber.members) for fiber in self.classes)

    def to_document(self) -> Dict[str, Any]:
        return {
            "slope": str(self.slope),
            "classes": [
                {"value": format_rational(f.value), "members": [i + 1 for i in f.members]}
                for f in self.classes
            ],
        }


def fibers(c: Configuration, r: Slope) -> FiberPartition:
    """
    Group the point indices of a configuration by projected value.

    Args:
        c: Configuration
        r: Projection slope

    Returns:
        FiberPartition with classes ascending by value, indices ascending within a class
    """
    groups: Dict[Fraction, List[int]] = {}
    for index, point in enumerate(c.points):
        groups.setdefault(project(point, r), []).append(index)
    return FiberPartition(
        slope=r,
        classes=tuple(FiberClass(value, tuple(groups[value])) for value in sorted(groups)),
    )


def cardinality_alpha(c: Configuration) -> float:
    """
    Set-level ratio log|G| / max_j log|π_{r_j}(G)|.

    Raises:
        DegenerateProjection: if every slope maps G to a single value
    """
    largest = max(len(fibers(c, r)) for r in c.slopes)
    if largest < 2:
        raise DegenerateProjection(
            "Every slope maps the configuration to a single value; log-cardinality ratio is undefined"
        )
    return math.log(len(c)) / math.log(largest)
