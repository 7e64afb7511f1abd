"""folbench: a benchmark toolkit for NL-to-FOL translation evaluation."""

__version__ = "0.1.0"
