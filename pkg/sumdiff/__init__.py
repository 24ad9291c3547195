"""sumdiff - entropy counterexamples to sums-differences statements."""

__version__ = "0.1.0"
