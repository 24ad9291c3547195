"""Rich output formatting and machine-readable serialization for sumdiff."""

import json
import logging
from pathlib import Path
from typing import Any, Optional, Sequence

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

SIGNIFICANT_DIGITS = 12


def round_sig(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """Round a float to ``digits`` significant digits."""
    return float(f"{value:.{digits}g}")


def rounded(document: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Recursively round every float in a JSON-like document."""
    if isinstance(document, bool) or document is None:
        return document
    if isinstance(document, float):
        return round_sig(document, digits)
    if isinstance(document, dict):
        return {key: rounded(value, digits) for key, value in document.items()}
    if isinstance(document, (list, tuple)):
        return [rounded(value, digits) for value in document]
    return document


def dumps(document: Any, indent: Optional[int] = 2) -> str:
    """Serialize with 12 significant digits; key order is preserved."""
    return json.dumps(rounded(document), indent=indent, ensure_ascii=False)


def setup_logging(verbose: bool = False) -> None:
    """Route log records through rich on stderr; stdout stays machine-readable."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


class Formatter:
    """Handles formatting and display of results and diagnostics."""

    def __init__(self):
        """Initialize formatter."""
        self.console = Console()
        self.error_console = Console(stderr=True)

    def emit(self, text: str, out_path: Optional[str] = None) -> None:
        """
        Write machine-readable output to a declared path or to stdout.

        Args:
            text: Output text (JSON, JSON lines or CSV)
            out_path: Optional file path; stdout when None
        """
        if out_path:
            Path(out_path).write_text(text, encoding="utf-8")
        else:
            click.echo(text, nl=not text.endswith("\n"))

    def print_construction_table(self, rows: Sequence[Any]) -> None:
        """Print the reproduced constructions as a table."""
        table = Table(title="Published constructions")
        table.add_column("construction", style="bold")
        table.add_column("method")
        table.add_column("alpha", justify="right")
        table.add_column("threshold", justify="right")
        table.add_column("measure")
        table.add_column("status")
        for row in rows:
            weights = ", ".join(f"{w:.6g}" for w in row.measure.weights)
            status = "[bold green]pass[/bold green]" if row.passed else "[bold red]FAIL[/bold red]"
            table.add_row(
                row.name, row.method, f"{row.alpha:.{SIGNIFICANT_DIGITS}g}",
                f"{row.threshold:g}", f"({weights})", status,
            )
        self.console.print(table)

    def print_error(self, message: str) -> None:
        """Print an error message."""
        self.error_console.print(f"[bold red]Error:[/bold red] {escape(message)}")

    def print_success(self, message: str) -> None:
        """Print a success message."""
        self.error_console.print(f"[bold green]✓[/bold green] {escape(message)}")

    def print_info(self, message: str) -> None:
        """Print an info message."""
        self.error_console.print(f"[bold blue]Info:[/bold blue] {escape(message)}")


# Global formatter instance
_formatter: Optional[Formatter] = None


def get_formatter() -> Formatter:
    """Get the global formatter instance."""
    global _formatter
    if _formatter is None:
        _formatter = Formatter()
    return _formatter
