"""Counters and timers for optimization and search runs."""

import time
from typing import Dict, Optional


class RunMetrics:
    """Tracks named counters and wall time for a single run."""

    def __init__(self):
        """Initialize metrics tracker."""
        self.counters: Dict[str, int] = {}
        self.start_time: Optional[float] = None
        self.end_time: Optional[float] = None

    def start(self) -> None:
        """Call this right before the run begins."""
        self.start_time = time.monotonic()

    def stop(self) -> None:
        """Call this after the run finishes."""
        self.end_time = time.monotonic()

    def count(self, name: str, amount: int = 1) -> None:
        """
        Increase a named counter.

        Args:
            name: Counter name (e.g. "enumerated", "evaluations")
            amount: Increment
        """
        self.counters[name] = self.counters.get(name, 0) + amount

    def get(self, name: str) -> int:
        return self.counters.get(name, 0)

    def elapsed(self) -> float:
        """Seconds between start() and stop() (or now, if still running)."""
        if self.start_time is None:
            return 0.0
        end = self.end_time if self.end_time is not None else time.monotonic()
        return end - self.start_time

    def summary(self) -> str:
        """One-line rendering for log messages."""
        parts = [f"{name}={value}" for name, value in sorted(self.counters.items())]
        parts.append(f"elapsed={self.elapsed():.3f}s")
        return " ".join(parts)
