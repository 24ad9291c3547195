"""
Multinomial blow-up of a measure into a set.

A measure P on G is approximated by counts k_g with common denominator M; the
set G' of M-tuples over G with k_g copies of each g has |G'| = M!/∏ k_g!, and
each projection π_r(G') is the multinomial over the fiber sums of the counts.
G' itself is never materialized. As M grows, the set-level ratio α' of G'
approaches the entropy ratio of P (Stirling).
"""

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from sumdiff.config.manager import get_config_manager
from sumdiff.core import Configuration, Slope, fibers
from sumdiff.entropy import Measure
from sumdiff.errors import TooSmallM, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RationalApprox:
    """Counts k_g summing to the common denominator M; q_g = k_g / M."""

    denominator: int
    counts: Tuple[int, ...]

    def __post_init__(self):
        if self.denominator < 1:
            raise ValidationError("The common denominator M must be positive")
        if any(k < 0 for k in self.counts):
            raise ValidationError("Counts must be non-negative")
        if sum(self.counts) != self.denominator:
            raise ValidationError(
                f"Counts sum to {sum(self.counts)}, not M = {self.denominator}", "Σ k_g = M"
            )

    @property
    def M(self) -> int:
        return self.denominator

    def rationals(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(k, self.denominator) for k in self.counts)

    def max_error(self, m: Measure) -> float:
        """max_g |k_g/M - P(g)|."""
        return max(abs(k / self.denominator - p) for k, p in zip(self.counts, m.weights))


@dataclass(frozen=True)
class ExactCounts:
    """Big-integer cardinalities of G' and of each projection."""

    g_prime: int
    projected: Tuple[Tuple[Slope, int], ...]

    def to_document(self) -> Dict[str, Any]:
        return {
            "G_prime": str(self.g_prime),
            "projected": {str(slope): str(count) for slope, count in self.projected},
        }


@dataclass(frozen=True)
class BlowupReport:
    """log-cardinalities of G' and its projections, and α'."""

    M: int
    log_G_prime: float
    log_projected: Tuple[Tuple[Slope, float], ...]
    log_difference: float
    alpha_prime: Optional[float]
    exact_counts: Optional[ExactCounts] = None

    @property
    def degenerate(self) -> bool:
        """True when every projection of G' is a single tuple, so α' is undefined."""
        return self.alpha_prime is None

    def to_document(self) -> Dict[str, Any]:
        document = {
            "M": self.M,
            "log_G_prime": self.log_G_prime,
            "log_projected": {str(slope): value for slope, value in self.log_projected},
            "alpha_prime": self.alpha_prime,
            "degenerate": self.degenerate,
        }
        if self.exact_counts is not None:
            document["exact_counts"] = self.exact_counts.to_document()
        return document


def approximate_measure(m: Measure, M: int) -> RationalApprox:
    """
    Apportion M units among the weights by largest remainder.

    Each point gets floor(M·p_g); the leftover units go to the largest
    fractional remainders, ties to the lower index. Zero-weight points get 0.
    Arithmetic is exact on the binary values of the weights.

    Args:
        m: Measure to approximate
        M: Common denominator

    Returns:
        RationalApprox with max_g |k_g/M - p_g| < 1/M

    Raises:
        TooSmallM: if M is below the support size or a supported point gets no unit
    """
    support = m.support()
    if M < max(1, len(support)):
        raise TooSmallM(f"M = {M} is smaller than the support size {len(support)}", M)

    weights = [Fraction(w) for w in m.weights]
    total = sum(weights)
    quotas = [M * w / total for w in weights]
    counts = [math.floor(q) for q in quotas]
    leftover = M - sum(counts)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1

    starved = [i + 1 for i in support if counts[i] == 0]
    if starved:
        raise TooSmallM(
            f"M = {M} leaves point(s) {starved} with count 0; increase M beyond 1/min weight", M
        )
    return RationalApprox(M, tuple(counts))


def approximate_measure_delta(m: Measure, delta: float) -> RationalApprox:
    """Approximate with accuracy δ, i.e. M = ceil(1/δ)."""
    if not delta > 0:
        raise ValidationError("δ must be positive")
    return approximate_measure(m, math.ceil(1.0 / delta))


def log_factorial(k) -> Any:
    """Natural log of k! (vectorized over arrays)."""
    return gammaln(np.asarray(k, dtype=float) + 1.0)


def log_multinomial(counts: Sequence[int]) -> float:
    """log(M! / ∏ k!) with M = Σ k."""
    counts = np.asarray(counts, dtype=float)
    return float(log_factorial(counts.sum()) - np.sum(log_factorial(counts)))


def multinomial(counts: Sequence[int]) -> int:
    """Exact M! / ∏ k! as a product of binomials."""
    result = 1
    running = 0
    for k in counts:
        running += k
        result *= math.comb(running, k)
    return result


def _fiber_sums(c: Configuration, slope: Slope, counts: Sequence[int]) -> List[int]:
    return [sum(counts[i] for i in fiber.members) for fiber in fibers(c, slope).classes]


def _difference_sums(c: Configuration, counts: Sequence[int]) -> List[int]:
    groups: Dict[Fraction, int] = {}
    for point, k in zip(c.points, counts):
        groups[point.a - point.b] = groups.get(point.a - point.b, 0) + k
    return [groups[value] for value in sorted(groups)]


def blowup_counts(c: Configuration, approx: RationalApprox,
                  exact_threshold: Optional[int] = None) -> BlowupReport:
    """
    Cardinalities of the blow-up G' and of each projection π_{r_j}(G').

    Log-cardinalities are always computed from log-factorials; exact big
    integers are added when M does not exceed ``exact_threshold``.

    Args:
        c: Configuration
        approx: Counts aligned with the points of c
        exact_threshold: Largest M for exact counts (default from config, 5000)

    Returns:
        BlowupReport; alpha_prime is None when every projection is a single tuple
    """
    if len(approx.counts) != len(c):
        raise ValidationError(
            f"{len(approx.counts)} counts for a configuration of {len(c)} points",
            "one count per point",
        )
    if exact_threshold is None:
        exact_threshold = get_config_manager().get_option("blowup", "exact_threshold")

    projected_sums = [(slope, _fiber_sums(c, slope, approx.counts)) for slope in c.slopes]
    log_G_prime = log_multinomial(approx.counts)
    log_projected = tuple((slope, log_multinomial(sums)) for slope, sums in projected_sums)
    log_difference = log_multinomial(_difference_sums(c, approx.counts))

    largest = max(value for _, value in log_projected)
    alpha_prime = log_G_prime / largest if largest > 0.0 else None

    exact_counts = None
    if approx.M <= exact_threshold:
        exact_counts = ExactCounts(
            g_prime=multinomial(approx.counts),
            projected=tuple((slope, multinomial(sums)) for slope, sums in projected_sums),
        )

    return BlowupReport(
        M=approx.M,
        log_G_prime=log_G_prime,
        log_projected=log_projected,
        log_difference=log_difference,
        alpha_prime=alpha_prime,
        exact_counts=exact_counts,
    )


def convergence_sweep(c: Configuration, m: Measure, M_list: Sequence[int],
                      exact_threshold: Optional[int] = None,
                      workers: int = 1) -> List[BlowupReport]:
    """
    One blow-up report per M, in the order given.

    Raises:
        TooSmallM: for the first M that admits no valid approximation
    """
    if len(m) != len(c):
        raise ValidationError(
            f"Measure has {len(m)} weights but the configuration has {len(c)} points",
            "one weight per point",
        )
    approximations = [approximate_measure(m, M) for M in M_list]

    def report(approx: RationalApprox) -> BlowupReport:
        result = blowup_counts(c, approx, exact_threshold)
        logger.debug("M=%d alpha'=%r", approx.M, result.alpha_prime)
        return result

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(report, approximations))
    return [report(a) for a in approximations]


def stirling_check(N: int) -> Tuple[float, float]:
    """
    Compare log(N!) with the leading Stirling term N·log(N/e).

    Returns:
        (exact log N!, N log N - N)
    """
    if N < 1:
        raise ValidationError("N must be at least 1")
    exact = math.fsum(math.log(k) for k in range(2, N + 1))
    return exact, N * (math.log(N) - 1.0)


def sweep_to_csv(reports: Sequence[BlowupReport], slopes: Sequence[Slope],
                 digits: int = 12) -> str:
    """Render a sweep as CSV: M, log_G_prime, one log|π_r(G')| column per slope, alpha_prime."""
    def number(value: Optional[float]) -> str:
        return "" if value is None else f"{value:.{digits}g}"

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["M", "log_G_prime"] + [f"log_pi_{slope}" for slope in slopes] + ["alpha_prime"])
    for report in reports:
        writer.writerow(
            [report.M, number(report.log_G_prime)]
            + [number(value) for _, value in report.log_projected]
            + [number(report.alpha_prime)]
        )
    return buffer.getvalue()
