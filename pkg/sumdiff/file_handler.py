"""Safe reading and parsing of the JSON input documents."""

import json
from pathlib import Path
from typing import Any, Callable, Optional, Tuple, TypeVar

from sumdiff.core import Configuration
from sumdiff.entropy import Measure
from sumdiff.errors import ValidationError
from sumdiff.optimizer import OptimizerOptions, SymmetryAnsatz
from sumdiff.search import SearchSpec

T = TypeVar("T")


class FileHandler:
    """Reads input documents with size and format checks."""

    MAX_FILE_SIZE_MB = 10
    MAX_FILE_SIZE_BYTES = MAX_FILE_SIZE_MB * 1024 * 1024

    def read_json(self, file_path: str) -> Tuple[Optional[Any], Optional[str]]:
        """
        Read and decode a JSON file.

        Args:
            file_path: Path to the file

        Returns:
            Tuple of (document, error_message). document is None if an error occurred.
        """
        path = Path(file_path)
        if not path.exists():
            return None, f"File does not exist: {file_path}"
        if not path.is_file():
            return None, f"Path is not a file: {file_path}"
        try:
            if path.stat().st_size > self.MAX_FILE_SIZE_BYTES:
                return None, f"File is too large (>{self.MAX_FILE_SIZE_MB}MB): {file_path}"
            with open(path, 'r', encoding='utf-8') as f:
                return json.load(f), None
        except json.JSONDecodeError as e:
            return None, f"{file_path} is not valid JSON: {e}"
        except (IOError, OSError, UnicodeDecodeError) as e:
            return None, f"Error reading {file_path}: {e}"

    def _load(self, file_path: str, parse: Callable[[Any], T]) -> Tuple[Optional[T], Optional[str]]:
        document, error = self.read_json(file_path)
        if error:
            return None, error
        try:
            return parse(document), None
        except ValidationError as e:
            detail = f" (invariant: {e.invariant})" if e.invariant else ""
            return None, f"{file_path}: {e}{detail}"

    def load_configuration(self, file_path: str) -> Tuple[Optional[Configuration], Optional[str]]:
        """Load a configuration document."""
        return self._load(file_path, Configuration.from_document)

    def load_measure(self, file_path: str,
                     expected_size: Optional[int] = None) -> Tuple[Optional[Measure], Optional[str]]:
        """
        Load a measure document, optionally checking it has one weight per point.

        Args:
            file_path: Path to the measure document
            expected_size: Number of configuration points, if known
        """
        measure, error = self._load(file_path, Measure.from_document)
        if error:
            return None, error
        if expected_size is not None and len(measure) != expected_size:
            return None, (
                f"{file_path}: measure has {len(measure)} weights but the configuration has "
                f"{expected_size} points (invariant: one weight per point)"
            )
        return measure, None

    def load_ansatz(self, file_path: str) -> Tuple[Optional[SymmetryAnsatz], Optional[str]]:
        """Load a symmetry ansatz document."""
        return self._load(file_path, SymmetryAnsatz.from_document)

    def load_options(self, file_path: str) -> Tuple[Optional[OptimizerOptions], Optional[str]]:
        """Load optimizer options, overlaying the config defaults."""
        return self._load(file_path, OptimizerOptions.from_document)

    def load_search_spec(self, file_path: str) -> Tuple[Optional[SearchSpec], Optional[str]]:
        """Load a search spec document."""
        return self._load(file_path, SearchSpec.from_document)


# Global file handler instance
_file_handler: Optional[FileHandler] = None


def get_file_handler() -> FileHandler:
    """Get the global file handler instance."""
    global _file_handler
    if _file_handler is None:
        _file_handler = FileHandler()
    return _file_handler
