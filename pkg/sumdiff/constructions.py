"""Published constructions and the thresholds they beat."""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from sumdiff.core import Configuration
from sumdiff.entropy import Measure, entropy_ratio, psi
from sumdiff.optimizer import (
    AffineRelation,
    OptimizerOptions,
    SymmetryAnsatz,
    equalize_profile,
    maximize_alpha,
    solve_equalization_root,
)
from sumdiff.search import staircase

logger = logging.getLogger(__name__)

SLOPES_0_1_INF = ("0", "1", "inf")
SLOPES_0_1_2_INF = ("0", "1", "2", "inf")

STAIRCASE7_PRINTED = (0.00024983, 0.028156, 0.22425)
FIVE_POINT_PRINTED = 0.21798
FOUR_POINT_PRINTED = 0.1135


def ruzsa_configuration() -> Configuration:
    return Configuration.from_pairs([(0, 1), (1, 0), (1, 1)], SLOPES_0_1_INF)


def four_point_configuration() -> Configuration:
    return Configuration.from_pairs([(0, 1), (1, 0), (1, 1), (2, 0)], SLOPES_0_1_INF)


def staircase7_configuration() -> Configuration:
    return staircase(7)


def five_point_configuration() -> Configuration:
    return Configuration.from_pairs(
        [(0, 1), (1, 0), (1, 1), (2, 0), ("1", "1/2")], SLOPES_0_1_2_INF
    )


def four_point_ansatz() -> SymmetryAnsatz:
    """p3 = p2 and p2 = 1/2 - p1."""
    return SymmetryAnsatz(
        ties=((3, 2),),
        affine_relations=(AffineRelation(((1, Fraction(1)), (2, Fraction(1))), Fraction(1, 2)),),
    )


def staircase7_ansatz() -> SymmetryAnsatz:
    """p7 = p1, p6 = p2, p5 = p3, which makes H(π_0 P) = H(π_∞ P)."""
    return SymmetryAnsatz.palindromic(7)


def five_point_ansatz() -> SymmetryAnsatz:
    """p1 = p2 = p3 = p4."""
    return SymmetryAnsatz(ties=((2, 1), (3, 1), (4, 1)))


def four_point_equation(p: float) -> float:
    """ψ(1-2p) + 2ψ(p) - log 2; its root in (0, 1/4) is p1."""
    return psi(1 - 2 * p) + 2 * psi(p) - math.log(2)


def five_point_equation(p: float) -> float:
    """2ψ(2p) + ψ(1-4p) - ψ(1-2p) - 2ψ(p); its non-zero root is p."""
    return 2 * psi(2 * p) + psi(1 - 4 * p) - psi(1 - 2 * p) - 2 * psi(p)


def four_point_printed_measure() -> Measure:
    p1 = FOUR_POINT_PRINTED
    return Measure((p1, 0.5 - p1, 0.5 - p1, p1))


def staircase7_printed_measure() -> Measure:
    p1, p2, p3 = STAIRCASE7_PRINTED
    return Measure((p1, p2, p3, 1 - 2 * (p1 + p2 + p3), p3, p2, p1))


def five_point_measure(p: float) -> Measure:
    return Measure((p, p, p, p, 1 - 4 * p))


@dataclass(frozen=True)
class ConstructionRow:
    """One reproduced construction."""

    name: str
    method: str
    alpha: float
    threshold: float
    measure: Measure
    passed: bool

    def to_document(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "method": self.method,
            "alpha": self.alpha,
            "threshold": self.threshold,
            "measure": list(self.measure.weights),
            "passed": self.passed,
        }


THRESHOLDS = {
    "ruzsa": 1.7259,
    "four-point": 1.772,
    "staircase-7": 1.77898,
    "five-point": 1.61226,
}


def construction_measures(use_optimizer: bool = True,
                         options: Optional[OptimizerOptions] = None) -> List[Tuple[str, str, Configuration, Measure]]:
    """
    Solve each construction the way it was found.

    Ruzsa: uniform. 4-point: equalization. 7-point staircase: ansatz optimization.
    5-point: root of the equalization equation. Without the optimizer every
    row uses the printed measure instead.
    """
    ruzsa = ruzsa_configuration()
    four_point = four_point_configuration()
    staircase7 = staircase7_configuration()
    five_point = five_point_configuration()

    rows = [("ruzsa", "uniform", ruzsa, Measure.uniform(3))]
    if not use_optimizer:
        return rows + [
            ("four-point", "printed", four_point, four_point_printed_measure()),
            ("staircase-7", "printed", staircase7, staircase7_printed_measure()),
            ("five-point", "printed", five_point, five_point_measure(FIVE_POINT_PRINTED)),
        ]

    equalized = equalize_profile(four_point, four_point_ansatz())
    optimized = maximize_alpha(staircase7, staircase7_ansatz(), options)
    p = solve_equalization_root(five_point_equation, 0.01, 0.249)
    return rows + [
        ("four-point", "equalization", four_point, equalized),
        ("staircase-7", "ansatz optimization", staircase7, optimized.best_measure),
        ("five-point", "root solve", five_point, five_point_measure(p)),
    ]


def reproduce(use_optimizer: bool = True, tol: float = 5e-5,
              options: Optional[OptimizerOptions] = None) -> List[ConstructionRow]:
    """
    Evaluate every construction against its published threshold.

    A row passes iff α > threshold - tol.
    """
    rows = []
    for name, method, configuration, measure in construction_measures(use_optimizer, options):
        alpha = entropy_ratio(configuration, measure).alpha
        threshold = THRESHOLDS[name]
        passed = alpha > threshold - tol
        logger.info("%s: alpha=%r threshold=%r passed=%s", name, alpha, threshold, passed)
        rows.append(ConstructionRow(name, method, alpha, threshold, measure, passed))
    return rows
