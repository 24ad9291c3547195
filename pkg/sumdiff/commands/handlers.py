"""Command handlers for the sumdiff subcommands."""

import dataclasses
import logging
from typing import List, Optional, Tuple

from sumdiff.blowup import convergence_sweep, sweep_to_csv
from sumdiff.config.manager import get_config_manager
from sumdiff.entropy import Measure, entropy_ratio
from sumdiff.errors import BudgetExceeded, SumDiffError, TooSmallM
from sumdiff.file_handler import get_file_handler
from sumdiff.formatter import dumps, get_formatter
from sumdiff.optimizer import OptimizerOptions, maximize_alpha
from sumdiff.constructions import reproduce
from sumdiff.search import enumerate_and_rank, remark_check

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_VALIDATION = 2
EXIT_BUDGET = 3


def parse_M_list(text: str) -> Tuple[Optional[List[int]], Optional[str]]:
    """
    Parse a comma-separated list of positive integers.

    Returns:
        Tuple of (values, error_message)
    """
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        return None, f"--M expects comma-separated integers, got '{text}'"
    if not values:
        return None, "--M needs at least one value"
    if any(v < 1 for v in values):
        return None, "Every M must be a positive integer"
    return values, None


class CommandHandler:
    """Runs one subcommand and maps outcomes to exit codes."""

    def __init__(self):
        """Initialize command handler."""
        self.file_handler = get_file_handler()
        self.formatter = get_formatter()

    def _fail(self, message: str, code: int = EXIT_VALIDATION) -> int:
        self.formatter.print_error(message)
        return code

    def _options(self, options_path: Optional[str] = None, seed: Optional[int] = None,
                 starts: Optional[int] = None, workers: Optional[int] = None
                 ) -> Tuple[Optional[OptimizerOptions], Optional[str]]:
        if options_path:
            options, error = self.file_handler.load_options(options_path)
            if error:
                return None, error
        else:
            options = OptimizerOptions.from_config()
        overrides = {k: v for k, v in (("seed", seed), ("starts", starts), ("workers", workers))
                     if v is not None}
        try:
            return dataclasses.replace(options, **overrides), None
        except SumDiffError as e:
            return None, str(e)

    def cmd_verify(self, config_path: str, measure_path: Optional[str] = None,
                   out_path: Optional[str] = None) -> int:
        """Print the entropy profile of a measure (uniform when no measure is given)."""
        configuration, error = self.file_handler.load_configuration(config_path)
        if error:
            return self._fail(error)
        if measure_path:
            measure, error = self.file_handler.load_measure(measure_path, len(configuration))
            if error:
                return self._fail(error)
        else:
            measure = Measure.uniform(len(configuration))

        try:
            profile = entropy_ratio(configuration, measure)
        except SumDiffError as e:
            return self._fail(str(e))
        self.formatter.emit(dumps(profile.to_document()) + "\n", out_path)
        return EXIT_OK

    def cmd_paper(self, use_optimizer: bool = True, tol: Optional[float] = None,
                  seed: Optional[int] = None, starts: Optional[int] = None) -> int:
        """Reproduce the published constructions; exit 1 if a threshold is missed."""
        options, error = self._options(seed=seed, starts=starts)
        if error:
            return self._fail(error)
        if tol is None:
            tol = get_config_manager().get_option("paper", "tol")

        try:
            rows = reproduce(use_optimizer=use_optimizer, tol=tol, options=options)
        except SumDiffError as e:
            return self._fail(str(e))
        self.formatter.print_construction_table(rows)

        failed = [row for row in rows if not row.passed]
        if failed:
            names = ", ".join(f"{row.name} (alpha {row.alpha:.12g} vs {row.threshold:g})" for row in failed)
            return self._fail(f"Threshold not met: {names}", EXIT_THRESHOLD)
        self.formatter.print_success(f"All {len(rows)} thresholds met")
        return EXIT_OK

    def cmd_optimize(self, config_path: str, ansatz_path: Optional[str] = None,
                     options_path: Optional[str] = None, seed: Optional[int] = None,
                     starts: Optional[int] = None, workers: Optional[int] = None,
                     out_path: Optional[str] = None) -> int:
        """Maximize α over the (ansatz-restricted) simplex and print the result as JSON."""
        configuration, error = self.file_handler.load_configuration(config_path)
        if error:
            return self._fail(error)
        ansatz = None
        if ansatz_path:
            ansatz, error = self.file_handler.load_ansatz(ansatz_path)
            if error:
                return self._fail(error)
        options, error = self._options(options_path, seed, starts, workers)
        if error:
            return self._fail(error)

        try:
            result = maximize_alpha(configuration, ansatz, options)
        except SumDiffError as e:
            return self._fail(str(e))
        self.formatter.emit(dumps(result.to_document()) + "\n", out_path)
        return EXIT_OK

    def cmd_blowup(self, config_path: str, measure_path: Optional[str], M_text: str,
                   out_path: Optional[str] = None) -> int:
        """Print the blow-up convergence sweep as CSV."""
        M_list, error = parse_M_list(M_text)
        if error:
            return self._fail(error)
        configuration, error = self.file_handler.load_configuration(config_path)
        if error:
            return self._fail(error)
        if measure_path:
            measure, error = self.file_handler.load_measure(measure_path, len(configuration))
            if error:
                return self._fail(error)
        else:
            measure = Measure.uniform(len(configuration))

        try:
            reports = convergence_sweep(configuration, measure, M_list)
        except TooSmallM as e:
            return self._fail(f"M = {e.M} is too small: {e}")
        except SumDiffError as e:
            return self._fail(str(e))
        self.formatter.emit(sweep_to_csv(reports, configuration.slopes), out_path)
        return EXIT_OK

    def cmd_search(self, spec_path: str, budget: Optional[int] = None,
                   seed: Optional[int] = None, starts: Optional[int] = None,
                   workers: Optional[int] = None, out_path: Optional[str] = None) -> int:
        """Enumerate, optimize and rank grid configurations as JSON lines."""
        spec, error = self.file_handler.load_search_spec(spec_path)
        if error:
            return self._fail(error)
        overrides = {k: v for k, v in (("seed", seed), ("starts", starts)) if v is not None}
        try:
            spec.optimizer = dataclasses.replace(spec.optimizer, **overrides)
            if budget is not None:
                spec = dataclasses.replace(spec, budget=budget)
            if workers is not None:
                spec = dataclasses.replace(spec, workers=workers)
            ranking = enumerate_and_rank(spec)
        except BudgetExceeded as e:
            return self._fail(str(e), EXIT_BUDGET)
        except SumDiffError as e:
            return self._fail(str(e))

        stats = ", ".join(f"{name} {value}" for name, value in ranking.stats.items())
        self.formatter.print_info(f"Ranked {len(ranking)} configurations ({stats})")
        lines = "".join(dumps(document, indent=None) + "\n" for document in ranking.to_documents())
        self.formatter.emit(lines, out_path)
        return EXIT_OK

    def cmd_remark(self, seed: Optional[int] = None, starts: Optional[int] = None) -> int:
        """Check that the 9-point staircase does not beat the 7-point one."""
        options, error = self._options(seed=seed, starts=starts)
        if error:
            return self._fail(error)
        report = remark_check(options)
        self.formatter.emit(dumps(report.to_document()) + "\n")
        if report.improved:
            return self._fail("The 9-point staircase improves on the 7-point one", EXIT_THRESHOLD)
        return EXIT_OK


# Global command handler instance
_command_handler: Optional[CommandHandler] = None


def get_command_handler() -> CommandHandler:
    """Get the global command handler instance."""
    global _command_handler
    if _command_handler is None:
        _command_handler = CommandHandler()
    return _command_handler
