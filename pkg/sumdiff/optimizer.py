"""Maximin entropy-ratio optimization over the probability simplex."""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect, linprog, minimize
from scipy.special import entr
from sympy import Matrix, Rational

from sumdiff.config.manager import get_config_manager
from sumdiff.core import Configuration, parse_rational
from sumdiff.entropy import EntropyProfile, Measure, ProjectionStack, ascending_sum, entropy_ratio
from sumdiff.errors import (
    DegenerateDenominator,
    NoBracket,
    NonFinite,
    NotOneDimensional,
    SumDiffError,
    ValidationError,
)
from sumdiff.metrics import RunMetrics

logger = logging.getLogger(__name__)

CONSTRAINT_TOLERANCE = 1e-12
EQUALIZATION_TOLERANCE = 1e-11
FLAT_TOLERANCE = 1e-13
EQUALIZATION_GRID = 512
INITIAL_STEP = 0.1
MIN_STEP = 1e-9
POLISH_ITERATIONS = 500
ROOT_XTOL = 1e-300
ROOT_RTOL = 4 * np.finfo(float).eps
ROOT_MAXITER = 2000


@dataclass
class OptimizerOptions:
    """Multi-start local search settings."""

    starts: int = 64
    seed: int = 0
    max_evals: int = 20000
    tol: float = 1e-12
    softmin_temperature: Optional[float] = None
    workers: int = 1

    def __post_init__(self):
        if self.starts < 1:
            raise ValidationError("starts must be at least 1")
        if self.max_evals < 1:
            raise ValidationError("max_evals must be at least 1")
        if self.tol < 0:
            raise ValidationError("tol must be non-negative")
        if self.softmin_temperature is not None and self.softmin_temperature <= 0:
            raise ValidationError("softmin_temperature must be positive or null")
        if self.workers < 1:
            raise ValidationError("workers must be at least 1")

    @classmethod
    def from_config(cls) -> "OptimizerOptions":
        """Defaults merged with the user's config file."""
        return cls.from_document(get_config_manager().get("optimizer", {}), base=cls())

    @classmethod
    def from_document(cls, document: Dict[str, Any],
                      base: Optional["OptimizerOptions"] = None) -> "OptimizerOptions":
        """Overlay a JSON options document on ``base`` (or the config defaults)."""
        if not isinstance(document, dict):
            raise ValidationError("Optimizer options must be a JSON object")
        known = set(asdict(cls()))
        unknown = set(document) - known
        if unknown:
            raise ValidationError(f"Unknown optimizer option(s): {', '.join(sorted(unknown))}")
        values = asdict(base if base is not None else cls.from_config())
        values.update(document)
        try:
            return cls(
                starts=int(values["starts"]),
                seed=int(values["seed"]),
                max_evals=int(values["max_evals"]),
                tol=float(values["tol"]),
                softmin_temperature=(
                    None if values["softmin_temperature"] is None
                    else float(values["softmin_temperature"])
                ),
                workers=int(values["workers"]),
            )
        except (TypeError, ValueError) as e:
            raise ValidationError(f"Invalid optimizer option: {e}")

    def to_document(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class AffineRelation:
    """Σ c_k p_k = rhs with rational coefficients; indices are 1-based."""

    coefficients: Tuple[Tuple[int, Fraction], ...]
    rhs: Fraction

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "AffineRelation":
        try:
            coefficients = tuple(
                (int(index), parse_rational(coef)) for index, coef in document["coefficients"]
            )
            return cls(coefficients, parse_rational(document.get("rhs", "0")))
        except (KeyError, TypeError, ValueError):
            raise ValidationError(
                'A relation looks like {"coefficients": [[1, "1"], [2, "1"]], "rhs": "1/2"}'
            )

    def to_document(self) -> Dict[str, Any]:
        return {
            "coefficients": [[i, str(c)] for i, c in self.coefficients],
            "rhs": str(self.rhs),
        }


@dataclass(frozen=True)
class ReducedSimplex:
    """
    Affine parametrization p = base + basis·θ of the ansatz subspace of the simplex.

    The free coordinates θ are the weights at ``free_indices``, so a measure on
    the subspace maps back to θ by plain indexing.
    """

    base: np.ndarray
    basis: np.ndarray
    free_indices: Tuple[int, ...]
    constraints: np.ndarray
    targets: np.ndarray
    center: np.ndarray
    scale_invariant: bool

    @property
    def dimension(self) -> int:
        return len(self.free_indices)

    def coordinates_of(self, weights: np.ndarray) -> np.ndarray:
        return np.asarray(weights, dtype=float)[list(self.free_indices)]

    def residual(self, weights: np.ndarray) -> float:
        return float(np.max(np.abs(self.constraints @ weights - self.targets)))

    def measure_at(self, theta: np.ndarray) -> Optional[np.ndarray]:
        """Weights at θ; negatives are clipped and the rest renormalized. None if infeasible."""
        weights = self.base + self.basis @ theta
        if np.any(weights < 0.0):
            weights = np.clip(weights, 0.0, None)
            total = weights.sum()
            if total <= 0.0:
                return None
            weights = weights / total
            if not self.scale_invariant and self.residual(weights) > CONSTRAINT_TOLERANCE:
                return None
        return weights


@dataclass(frozen=True)
class SymmetryAnsatz:
    """Ties p_i = p_j and affine relations restricting the measure (1-based indices)."""

    ties: Tuple[Tuple[int, int], ...] = ()
    affine_relations: Tuple[AffineRelation, ...] = ()

    @classmethod
    def palindromic(cls, n: int) -> "SymmetryAnsatz":
        """Tie p_i = p_{n+1-i} for every i."""
        return cls(ties=tuple((n + 1 - i, i) for i in range(1, n // 2 + 1)))

    @classmethod
    def from_document(cls, document: Dict[str, Any]) -> "SymmetryAnsatz":
        """Parse {"ties": [[7,1],[6,2]], "relations": [...]}."""
        if not isinstance(document, dict):
            raise ValidationError("Ansatz document must be a JSON object")
        try:
            ties = tuple((int(i), int(j)) for i, j in document.get("ties", []))
        except (TypeError, ValueError):
            raise ValidationError('"ties" must be a list of index pairs')
        relations = tuple(AffineRelation.from_document(r) for r in document.get("relations", []))
        return cls(ties=ties, affine_relations=relations)

    def to_document(self) -> Dict[str, Any]:
        return {
            "ties": [list(t) for t in self.ties],
            "relations": [r.to_document() for r in self.affine_relations],
        }

    def _rows(self, n: int) -> List[List[Fraction]]:
        rows = []
        for i, j in self.ties:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValidationError(f"Tie ({i}, {j}) refers to a point outside 1..{n}")
            row = [Fraction(0)] * (n + 1)
            row[i - 1] += 1
            row[j - 1] -= 1
            rows.append(row)
        for relation in self.affine_relations:
            row = [Fraction(0)] * (n + 1)
            for index, coef in relation.coefficients:
                if not 1 <= index <= n:
                    raise ValidationError(f"Relation refers to point {index} outside 1..{n}")
                row[index - 1] += coef
            row[n] = relation.rhs
            rows.append(row)
        rows.append([Fraction(1)] * (n + 1))
        return rows

    def reduce(self, n: int) -> ReducedSimplex:
        """
        Solve the constraint system exactly and parametrize its solutions.

        Args:
            n: Number of configuration points

        Returns:
            ReducedSimplex over the free coordinates

        Raises:
            ValidationError: if the system is inconsistent, leaves no free
                parameter, or misses the simplex
        """
        rows = self._rows(n)
        augmented = Matrix([[Rational(q.numerator, q.denominator) for q in row] for row in rows])
        rref, pivots = augmented.rref()
        if n in pivots:
            raise ValidationError("Ansatz constraints are inconsistent", "consistent ansatz")
        free = tuple(j for j in range(n) if j not in pivots)
        if not free:
            raise ValidationError(
                "Ansatz leaves no free parameter on the simplex", "≥ 1 free parameter"
            )

        base = np.zeros(n)
        basis = np.zeros((n, len(free)))
        for row_index, pivot in enumerate(pivots):
            base[pivot] = float(rref[row_index, n])
            for k, column in enumerate(free):
                basis[pivot, k] = -float(rref[row_index, column])
        for k, column in enumerate(free):
            basis[column, k] = 1.0

        constraints = np.array([[float(q) for q in row[:n]] for row in rows])
        targets = np.array([float(row[n]) for row in rows])

        # Maximize the smallest weight to get a feasible interior-most point.
        objective = np.zeros(n + 1)
        objective[n] = -1.0
        floor_rows = np.hstack([-np.eye(n), np.ones((n, 1))])
        result = linprog(
            objective,
            A_ub=floor_rows, b_ub=np.zeros(n),
            A_eq=np.hstack([constraints, np.zeros((len(rows), 1))]), b_eq=targets,
            bounds=[(0.0, None)] * n + [(0.0, 1.0)],
            method="highs",
        )
        if result.status != 0:
            raise ValidationError("Ansatz subspace does not meet the simplex", "non-empty feasible set")

        return ReducedSimplex(
            base=base,
            basis=basis,
            free_indices=free,
            constraints=constraints,
            targets=targets,
            center=np.clip(result.x[:n], 0.0, None),
            scale_invariant=all(r.rhs == 0 for r in self.affine_relations),
        )


@dataclass
class OptimizationResult:
    """Best measure found and its entropy profile."""

    best_measure: Measure
    best_alpha: float
    profile: EntropyProfile
    starts_used: int
    converged: bool
    seed: int
    evaluations: int = 0

    def to_document(self) -> Dict[str, Any]:
        return {
            "best_alpha": self.best_alpha,
            "best_measure": list(self.best_measure.weights),
            "profile": self.profile.to_document(),
            "starts_used": self.starts_used,
            "converged": self.converged,
            "seed": self.seed,
            "evaluations": self.evaluations,
        }


@dataclass
class _StartOutcome:
    index: int
    weights: Optional[np.ndarray]
    alpha: float
    converged: bool
    evaluations: int


def solve_equalization_root(f: Callable[[float], float], lo: float, hi: float) -> float:
    """
    Locate a sign change of ``f`` in [lo, hi] by bisection down to machine precision.

    Raises:
        NoBracket: if f(lo)·f(hi) ≥ 0
        NonFinite: if f is not finite somewhere in the bracket
    """
    def checked(x: float) -> float:
        value = float(f(x))
        if not math.isfinite(value):
            raise NonFinite(f"f({x!r}) = {value!r} inside the bracket")
        return value

    f_lo, f_hi = checked(lo), checked(hi)
    if f_lo * f_hi >= 0.0:
        raise NoBracket(f"f({lo!r}) = {f_lo!r} and f({hi!r}) = {f_hi!r} do not bracket a root")
    return float(bisect(checked, lo, hi, xtol=ROOT_XTOL, rtol=ROOT_RTOL,
                        maxiter=ROOT_MAXITER, disp=False))


def _parameter_interval(reduced: ReducedSimplex) -> Tuple[float, float]:
    direction = reduced.basis[:, 0]
    lo, hi = -math.inf, math.inf
    for offset, step in zip(reduced.base, direction):
        if step > 0:
            lo = max(lo, -offset / step)
        elif step < 0:
            hi = min(hi, -offset / step)
    return lo, hi


def equalize_profile(c: Configuration, ansatz: SymmetryAnsatz) -> Measure:
    """
    Find the measure on a one-parameter ansatz where all projected entropies agree.

    The first pair of slopes whose entropy difference is not identically zero is
    scanned for sign changes along the parameter; each bracket is refined with
    solve_equalization_root until one equalizes every slope.

    Raises:
        NotOneDimensional: if the ansatz does not leave exactly one parameter,
            or every pair of projected entropies coincides identically
        NoBracket: if no parameter value equalizes the profile
    """
    reduced = ansatz.reduce(len(c))
    if reduced.dimension != 1:
        raise NotOneDimensional(
            f"Equalization needs exactly one free parameter, the ansatz leaves {reduced.dimension}"
        )
    lo, hi = _parameter_interval(reduced)
    if not lo < hi:
        raise NotOneDimensional("The ansatz fixes the measure; nothing to equalize")

    stack = ProjectionStack(c)
    direction = reduced.basis[:, 0]

    def weights_at(t: float) -> np.ndarray:
        return np.clip(reduced.base + direction * t, 0.0, None)

    grid = lo + (hi - lo) * np.arange(1, EQUALIZATION_GRID + 1) / (EQUALIZATION_GRID + 1)
    table = np.array([stack.projected_entropies(weights_at(t)) for t in grid])

    varying = False
    for j, k in itertools.combinations(range(len(c.slopes)), 2):
        differences = table[:, j] - table[:, k]
        if np.max(np.abs(differences)) < FLAT_TOLERANCE:
            continue
        varying = True

        def gap(t: float, j: int = j, k: int = k) -> float:
            projected = stack.projected_entropies(weights_at(t))
            return float(projected[j] - projected[k])

        for i in range(len(grid) - 1):
            if differences[i] == 0.0:
                root = float(grid[i])
            elif differences[i] * differences[i + 1] < 0.0:
                root = solve_equalization_root(gap, float(grid[i]), float(grid[i + 1]))
            else:
                continue
            weights = weights_at(root)
            projected = stack.projected_entropies(weights)
            spread = float(np.max(projected) - np.min(projected))
            logger.debug("Equalization candidate t=%r spread=%r (slopes %s, %s)",
                         root, spread, c.slopes[j], c.slopes[k])
            if spread < EQUALIZATION_TOLERANCE:
                return Measure(tuple(weights.tolist()))

    if not varying:
        raise NotOneDimensional(
            "Every pair of projected entropies coincides along the ansatz; the equalization equation is flat"
        )
    raise NoBracket("No parameter value equalizes all projected entropies")


def _start_points(c: Configuration, ansatz: Optional[SymmetryAnsatz],
                  reduced: ReducedSimplex, options: OptimizerOptions) -> List[np.ndarray]:
    n = len(c)
    starts = [np.full(n, 1.0 / n)]
    if ansatz is not None and reduced.dimension == 1 and options.starts > 1:
        try:
            starts.append(equalize_profile(c, ansatz).as_array())
        except SumDiffError as e:
            logger.debug("No equalization start: %s", e)
    rng = np.random.default_rng(options.seed)
    while len(starts) < options.starts:
        draws = rng.exponential(size=n)
        starts.append(draws / draws.sum())
    return starts[:options.starts]


def _polish(weights: np.ndarray, stack: ProjectionStack,
            reduced: ReducedSimplex) -> Tuple[Optional[np.ndarray], int]:
    """
    Refine a simplex-search result with SLSQP on the epigraph form.

    Maximizes s subject to H(P) - s·H(π_{r_j}P) >= 0 for every slope and
    p = base + basis·θ >= 0.

    Returns:
        Tuple of (weights or None, evaluations used)
    """
    alpha = stack.alpha(weights)
    if math.isnan(alpha):
        return None, 0

    def weights_of(x: np.ndarray) -> np.ndarray:
        return np.clip(reduced.base + reduced.basis @ x[:-1], 0.0, None)

    def ratio_gaps(x: np.ndarray) -> np.ndarray:
        p = weights_of(x)
        return ascending_sum(entr(p)) - x[-1] * stack.projected_entropies(p)

    def feasibility(x: np.ndarray) -> np.ndarray:
        return reduced.base + reduced.basis @ x[:-1]

    unit = np.zeros(reduced.dimension + 1)
    unit[-1] = 1.0
    result = minimize(
        lambda x: -x[-1], np.append(reduced.coordinates_of(weights), alpha),
        jac=lambda x: -unit, method="SLSQP",
        constraints=[{"type": "ineq", "fun": ratio_gaps}, {"type": "ineq", "fun": feasibility}],
        options={"maxiter": POLISH_ITERATIONS, "ftol": 1e-15},
    )
    if not np.all(np.isfinite(result.x)):
        return None, int(result.nfev)
    return reduced.measure_at(np.asarray(result.x[:-1], dtype=float)), int(result.nfev)


def _run_start(index: int, start: np.ndarray, stack: ProjectionStack,
               reduced: ReducedSimplex, options: OptimizerOptions) -> _StartOutcome:
    temperature = options.softmin_temperature

    def objective(theta: np.ndarray) -> float:
        weights = reduced.measure_at(theta)
        if weights is None:
            return 0.0
        if temperature is None:
            value = stack.alpha(weights)
        else:
            value = stack.softmin_alpha(weights, temperature)
        return 0.0 if math.isnan(value) else -value

    theta = reduced.coordinates_of(start)
    if reduced.measure_at(theta) is None:
        theta = reduced.coordinates_of(reduced.center)
    value = objective(theta)
    evaluations = 1
    converged = False
    step = INITIAL_STEP
    dimension = reduced.dimension

    # Each cycle re-seeds the polytope at the incumbent.
    while evaluations < options.max_evals:
        simplex = theta + step * np.vstack([np.zeros(dimension), np.eye(dimension)])
        result = minimize(
            objective, theta, method="Nelder-Mead",
            options={
                "maxfev": options.max_evals - evaluations,
                "xatol": options.tol,
                "fatol": options.tol,
                "initial_simplex": simplex,
            },
        )
        evaluations += int(result.nfev)
        improvement = value - float(result.fun)
        if result.fun < value:
            theta, value = np.asarray(result.x, dtype=float), float(result.fun)
        # Converged only once a cycle at the smallest step finds nothing.
        if improvement < options.tol and step <= MIN_STEP:
            converged = bool(result.success)
            break
        step = max(step * 0.5, MIN_STEP)

    weights = reduced.measure_at(theta)
    if weights is not None and temperature is None:
        polished, used = _polish(weights, stack, reduced)
        evaluations += used
        if polished is not None and stack.alpha(polished) > stack.alpha(weights):
            weights = polished
    alpha = math.nan if weights is None else stack.alpha(weights)
    logger.debug("start %d: alpha=%r evaluations=%d converged=%s", index, alpha, evaluations, converged)
    return _StartOutcome(index, weights, alpha, converged, evaluations)


def _better(candidate: _StartOutcome, incumbent: Optional[_StartOutcome]) -> bool:
    if math.isnan(candidate.alpha):
        return False
    if incumbent is None:
        return True
    if candidate.alpha != incumbent.alpha:
        return candidate.alpha > incumbent.alpha
    return tuple(candidate.weights) < tuple(incumbent.weights)


def maximize_alpha(c: Configuration, ansatz: Optional[SymmetryAnsatz] = None,
                   options: Optional[OptimizerOptions] = None) -> OptimizationResult:
    """
    Maximize α(P) = H(P) / max_j H(π_{r_j}P) by multi-start Nelder–Mead.

    Starts are the uniform measure, the equalization point of a one-parameter
    ansatz, then seeded random interior points. Results are reduced in start
    order, so worker count does not change the outcome.

    Args:
        c: Configuration
        ansatz: Optional symmetry ansatz restricting the measure
        options: Search settings (defaults from the user config)

    Returns:
        OptimizationResult for the best start

    Raises:
        DegenerateDenominator: if no feasible measure gives a positive projected entropy
    """
    options = options or OptimizerOptions.from_config()
    if len(c) == 1:
        raise DegenerateDenominator("A one-point configuration has zero entropy under every projection")

    reduced = (ansatz or SymmetryAnsatz()).reduce(len(c))
    stack = ProjectionStack(c)
    starts = _start_points(c, ansatz, reduced, options)
    metrics = RunMetrics()
    metrics.start()

    def run(index: int) -> _StartOutcome:
        return _run_start(index, starts[index], stack, reduced, options)

    if options.workers > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as pool:
            outcomes = list(pool.map(run, range(len(starts))))
    else:
        outcomes = [run(i) for i in range(len(starts))]

    best: Optional[_StartOutcome] = None
    for outcome in outcomes:
        metrics.count("evaluations", outcome.evaluations)
        if _better(outcome, best):
            best = outcome
    metrics.stop()
    logger.info("Optimized %d starts in %s", len(starts), metrics.summary())

    if best is None:
        raise DegenerateDenominator("Every feasible measure makes all projections deterministic")

    measure = Measure(tuple(best.weights.tolist()))
    profile = entropy_ratio(c, measure)
    return OptimizationResult(
        best_measure=measure,
        best_alpha=profile.alpha,
        profile=profile,
        starts_used=len(starts),
        converged=best.converged,
        seed=options.seed,
        evaluations=metrics.get("evaluations"),
    )
