"""Candidate configurations: staircases, grid enumeration and ranking."""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from sumdiff.config.manager import get_config_manager
from sumdiff.core import (
    Configuration,
    INFINITY,
    Point,
    Slope,
    check_difference_injective,
    fibers,
)
from sumdiff.errors import BudgetExceeded, DegenerateDenominator, ValidationError
from sumdiff.metrics import RunMetrics
from sumdiff.optimizer import OptimizationResult, OptimizerOptions, SymmetryAnsatz, maximize_alpha

logger = logging.getLogger(__name__)

DEFAULT_SLOPES = (Slope(Fraction(0)), Slope(Fraction(1)), INFINITY)
CHUNK_SIZE = 4096
MAX_ISOMORPHISM_POINTS = 8
IMPROVEMENT_MARGIN = 1e-6


def staircase_point(index: int) -> Point:
    """The index-th (0-based) point of (0,1),(1,1),(1,0),(2,0),(2,-1),(3,-1),..."""
    return Point((index + 1) // 2, 1 - index // 2)


def staircase(n: int, slopes: Sequence[Slope] = DEFAULT_SLOPES) -> Configuration:
    """
    First n points of the staircase; its differences are -1, 0, ..., n-2.

    Args:
        n: Number of points (≥ 1)
        slopes: Slope set (default 0, 1, ∞)
    """
    if n < 1:
        raise ValidationError("A staircase needs at least one point")
    return Configuration(tuple(staircase_point(i) for i in range(n)), tuple(slopes))


def canonical_form(c: Configuration) -> Configuration:
    """Translate the lexicographically smallest point to the origin and sort the points."""
    origin = min(c.points)
    return c.with_points(sorted(p.translate(-origin.a, -origin.b) for p in c.points))


def canonical_key(c: Configuration) -> Tuple[Tuple[Fraction, Fraction], ...]:
    return tuple((p.a, p.b) for p in canonical_form(c).points)


def fiber_fingerprint(c: Configuration) -> Tuple[Tuple[int, ...], ...]:
    """Sorted fiber sizes for every slope, in slope order."""
    return tuple(tuple(sorted(fibers(c, r).sizes())) for r in c.slopes)


def _partitions(c: Configuration) -> List[FrozenSet[FrozenSet[int]]]:
    return [frozenset(frozenset(f.members) for f in fibers(c, r).classes) for r in c.slopes]


def fiber_isomorphic(first: Configuration, second: Configuration) -> bool:
    """
    True if some relabeling of the points of ``second`` reproduces every fiber partition of ``first``.

    Isomorphic configurations define the same optimization problem. Sets
    larger than MAX_ISOMORPHISM_POINTS are never declared isomorphic.
    """
    if len(first) != len(second) or fiber_fingerprint(first) != fiber_fingerprint(second):
        return False
    if len(first) > MAX_ISOMORPHISM_POINTS:
        return False
    target = _partitions(first)
    source = _partitions(second)
    for permutation in itertools.permutations(range(len(first))):
        relabeled = [
            frozenset(frozenset(permutation[i] for i in block) for block in partition)
            for partition in source
        ]
        if relabeled == target:
            return True
    return False


@dataclass
class SearchSpec:
    """Grid x ∈ {0..width}, y ∈ {-height..height}, subsets of ``size`` points."""

    width: int
    height: int
    size: int
    slopes: Tuple[Slope, ...] = DEFAULT_SLOPES
    budget: int = 2000000
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    fingerprint_dedup: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.width < 0 or self.height < 0:
            raise ValidationError("Grid width and height must be non-negative")
        if self.size < 1:
            raise ValidationError("Configuration size must be at least 1")
        if self.budget < 0:
            raise ValidationError("Budget must be non-negative")
        self.slopes = tuple(Slope.parse(r) for r in self.slopes)
        if not self.slopes or len(set(self.slopes)) != len(self.slopes):
            raise ValidationError("Slopes must be non-empty and pairwise distinct")

    def grid(self) -> List[Point]:
        return [Point(a, b) for a in range(self.width + 1)
                for b in range(-self.height, self.height + 1)]

    def subset_count(self) -> int:
        return math.comb((self.width + 1) * (2 * self.height + 1), self.size)

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "SearchSpec":
        """Parse {"grid": {"width": 3, "height": 2}, "size": 5, "slopes": [...], "budget": ..., "optimizer": {...}}."""
        if not isinstance(document, dict):
            raise ValidationError("Search spec must be a JSON object")
        config = get_config_manager()
        try:
            grid = document["grid"]
            return cls(
                width=int(grid["width"]),
                height=int(grid["height"]),
                size=int(document["size"]),
                slopes=tuple(Slope.parse(r) for r in document.get("slopes", ["0", "1", "inf"])),
                budget=int(document.get("budget", config.get_option("search", "budget"))),
                optimizer=OptimizerOptions.from_document(document.get("optimizer", {})),
                fingerprint_dedup=bool(document.get(
                    "fingerprint_dedup", config.get_option("search", "fingerprint_dedup"))),
                workers=int(document.get("workers", config.get_option("search", "workers"))),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"Invalid search spec: {e}")


@dataclass
class RankedEntry:
    configuration: Configuration
    result: OptimizationResult

    def to_document(self, rank: int) -> Dict[str, Any]:
        return {
            "rank": rank,
            "configuration": self.configuration.to_document(),
            "result": self.result.to_document(),
        }


@dataclass
class RankedResult:
    """Configurations in descending best_alpha, ties by canonical form."""

    entries: List[RankedEntry] = field(default_factory=list)
    stats: Dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def to_documents(self) -> List[Dict[str, Any]]:
        return [entry.to_document(rank) for rank, entry in enumerate(self.entries, start=1)]


def _filter_chunk(chunk: Sequence[Tuple[Point, ...]],
                  slopes: Tuple[Slope, ...]) -> List[Configuration]:
    kept = []
    for subset in chunk:
        if check_difference_injective(subset):
            kept.append(canonical_form(Configuration(subset, slopes)))
    return kept


def _chunks(items: Iterable, size: int) -> Iterable[List]:
    iterator = iter(items)
    while True:
        chunk = list(itertools.islice(iterator, size))
        if not chunk:
            return
        yield chunk


def enumerate_and_rank(spec: SearchSpec) -> RankedResult:
    """
    Enumerate difference-injective subsets of the grid, deduplicate and rank them.

    Chunks are filtered (optionally concurrently) and merged in chunk order, so
    the ranking does not depend on scheduling.

    Raises:
        BudgetExceeded: if the number of subsets exceeds spec.budget
    """
    total = spec.subset_count()
    if total > spec.budget:
        raise BudgetExceeded(total, spec.budget)

    metrics = RunMetrics()
    metrics.start()
    chunks = _chunks(itertools.combinations(spec.grid(), spec.size), CHUNK_SIZE)

    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            filtered = list(pool.map(lambda chunk: _filter_chunk(chunk, spec.slopes), chunks))
    else:
        filtered = [_filter_chunk(chunk, spec.slopes) for chunk in chunks]

    metrics.count("enumerated", total)
    unique: Dict[Tuple, Configuration] = {}
    for chunk in filtered:
        for configuration in chunk:
            metrics.count("injective")
            unique.setdefault(canonical_key(configuration), configuration)
    candidates = list(unique.values())

    if spec.fingerprint_dedup:
        representatives: List[Configuration] = []
        for configuration in candidates:
            if not any(fiber_isomorphic(kept, configuration) for kept in representatives):
                representatives.append(configuration)
        candidates = representatives
    metrics.count("unique", len(candidates))

    entries = []
    for configuration in candidates:
        try:
            result = maximize_alpha(configuration, None, spec.optimizer)
        except DegenerateDenominator:
            metrics.count("degenerate")
            continue
        entries.append(RankedEntry(configuration, result))

    entries.sort(key=lambda e: (-e.result.best_alpha, canonical_key(e.configuration)))
    metrics.stop()
    logger.info("Search finished: %s", metrics.summary())
    stats = {name: metrics.get(name) for name in ("enumerated", "injective", "unique", "degenerate")}
    return RankedResult(entries=entries, stats=stats)


@dataclass(frozen=True)
class RemarkReport:
    alpha7: float
    alpha9: float
    improved: bool

    def to_document(self) -> Dict[str, Any]:
        return {"alpha7": self.alpha7, "alpha9": self.alpha9, "improved": self.improved}


def remark_check(options: Optional[OptimizerOptions] = None) -> RemarkReport:
    """
    Compare the 7-point staircase with ties p7=p1, p6=p2, p5=p3 against the
    9-point staircase with palindromic ties p_i = p_{10-i}.
    """
    options = options or OptimizerOptions.from_config()
    seven = maximize_alpha(staircase(7), SymmetryAnsatz.palindromic(7), options)
    nine = maximize_alpha(staircase(9), SymmetryAnsatz.palindromic(9), options)
    improved = nine.best_alpha > seven.best_alpha + IMPROVEMENT_MARGIN
    logger.info("7-point alpha=%r, 9-point alpha=%r", seven.best_alpha, nine.best_alpha)
    return RemarkReport(seven.best_alpha, nine.best_alpha, improved)
