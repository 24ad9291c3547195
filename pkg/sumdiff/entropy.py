"""Entropy functional, push-forward measures and the measure-level ratio."""

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import entr, logsumexp

from sumdiff.core import Configuration, Slope, fibers
from sumdiff.errors import DegenerateDenominator, DomainError, ValidationError

SIMPLEX_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Measure:
    """A probability vector; one weight per point (or per fiber class)."""

    weights: Tuple[float, ...]

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        if not weights:
            raise ValidationError("A measure needs at least one weight")
        for w in weights:
            if not math.isfinite(w):
                raise ValidationError(f"Measure weight {w} is not finite", "finite weights")
            if w < 0:
                raise ValidationError(f"Measure weight {w} is negative", "weights ≥ 0")
        total = math.fsum(weights)
        if abs(total - 1.0) > SIMPLEX_TOLERANCE:
            raise ValidationError(
                f"Measure weights sum to {total!r}, not 1 (tolerance {SIMPLEX_TOLERANCE})",
                "weights sum to 1",
            )
        if total != 1.0:
            weights = tuple(w / total for w in weights)
        object.__setattr__(self, 'weights', weights)

    def __len__(self) -> int:
        return len(self.weights)

    @classmethod
    def uniform(cls, n: int) -> "Measure":
        return cls((1.0 / n,) * n)

    @classmethod
    def point_mass(cls, n: int, index: int) -> "Measure":
        weights = [0.0] * n
        weights[index] = 1.0
        return cls(tuple(weights))

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "Measure":
        """Parse {"weights": [0.1135, 0.3865, ...]}."""
        if not isinstance(document, dict) or not isinstance(document.get("weights"), list):
            raise ValidationError('Measure document needs a "weights" list')
        try:
            return cls(tuple(float(w) for w in document["weights"]))
        except (TypeError, ValueError):
            raise ValidationError("Measure weights must be numbers")

    def to_document(self) -> Dict[str, Any]:
        return {"weights": list(self.weights)}

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.weights) if w > 0)


@dataclass(frozen=True)
class EntropyProfile:
    """H(P), every H(π_{r_j}P) and their ratio α."""

    h_total: float
    h_projected: Tuple[Tuple[Slope, float], ...]
    alpha: float

    def to_document(self) -> Dict[str, Any]:
        return {
            "h_total": self.h_total,
            "h_projected": {str(slope): h for slope, h in self.h_projected},
            "alpha": self.alpha,
        }


def _check_unit_interval(x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"Argument {x!r} lies outside [0, 1]")
    return x


def psi(x: float) -> float:
    """ψ(x) = -x log x, with ψ(0) = 0."""
    return float(entr(_check_unit_interval(x)))


def phi(x: float) -> float:
    """φ(x) = ψ(x) + ψ(1 - x), the binary entropy."""
    x = _check_unit_interval(x)
    return float(entr(x) + entr(1.0 - x))


def ascending_sum(terms: np.ndarray) -> float:
    """Sum in index order, one term at a time."""
    if len(terms) == 0:
        return 0.0
    return float(np.cumsum(terms)[-1])


def entropy(m: Measure) -> float:
    """Shannon entropy with natural logarithm; zero weights contribute 0."""
    return ascending_sum(entr(m.as_array()))


def pushforward(c: Configuration, r: Slope, m: Measure) -> Measure:
    """
    Push a measure on G forward along π_r.

    Args:
        c: Configuration
        r: Slope
        m: Measure with one weight per point of c

    Returns:
        Measure with one weight per fiber class of fibers(c, r), ascending by value
    """
    if len(m) != len(c):
        raise ValidationError(
            f"Measure has {len(m)} weights but the configuration has {len(c)} points",
            "one weight per point",
        )
    partition = fibers(c, r)
    masses = np.bincount(partition.labels(len(c)), weights=m.as_array(), minlength=len(partition))
    return Measure(tuple(masses.tolist()))


def entropy_ratio(c: Configuration, m: Measure) -> EntropyProfile:
    """
    Compute H(P), every H(π_{r_j}P) and α = H(P) / max_j H(π_{r_j}P).

    Raises:
        DegenerateDenominator: if every projection is deterministic under m
    """
    h_total = entropy(m)
    h_projected = tuple((r, entropy(pushforward(c, r, m))) for r in c.slopes)
    largest = max(h for _, h in h_projected)
    if largest <= 0.0:
        raise DegenerateDenominator(
            "Every projected entropy vanishes under this measure; α is undefined"
        )
    return EntropyProfile(h_total=h_total, h_projected=h_projected, alpha=h_total / largest)


class ProjectionStack:
    """
    Stacked fiber incidence of every slope of a configuration.

    Evaluates projected entropies of many weight vectors against one
    configuration without rebuilding fibers; this is the optimizer's objective.
    """

    def __init__(self, configuration: Configuration):
        self.configuration = configuration
        self.size = len(configuration)
        self.partitions = [fibers(configuration, r) for r in configuration.slopes]
        rows = []
        offsets = []
        for partition in self.partitions:
            offsets.append(len(rows))
            for fiber in partition.classes:
                row = np.zeros(self.size)
                row[list(fiber.members)] = 1.0
                rows.append(row)
        self.incidence = np.vstack(rows)
        self.offsets = np.asarray(offsets, dtype=np.intp)

    def projected_entropies(self, weights: np.ndarray) -> np.ndarray:
        terms = entr(self.incidence @ weights)
        return np.array([ascending_sum(part) for part in np.split(terms, self.offsets[1:])])

    def alpha(self, weights: np.ndarray) -> float:
        """Ratio H(P)/max_j H(π_{r_j}P); NaN when every projection is deterministic."""
        largest = float(np.max(self.projected_entropies(weights)))
        if largest <= 0.0:
            return math.nan
        return ascending_sum(entr(weights)) / largest

    def softmin_alpha(self, weights: np.ndarray, temperature: float) -> float:
        """Smooth lower bound -T log Σ_j exp(-(H/H_j)/T) of the min-over-ratios objective."""
        projected = self.projected_entropies(weights)
        live = projected > 0.0
        if not np.any(live):
            return math.nan
        ratios = ascending_sum(entr(weights)) / projected[live]
        return float(-temperature * logsumexp(-ratios / temperature))


def alpha_of(c: Configuration, weights: Sequence[float],
             stack: Optional[ProjectionStack] = None) -> float:
    """Fast α evaluation for a raw weight vector (no Measure validation)."""
    stack = stack or ProjectionStack(c)
    return stack.alpha(np.asarray(weights, dtype=float))
