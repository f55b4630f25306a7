"""Hand-drawn closed target paths (square, trapezoid, bat) for the error table."""

from pathlib import Path


def fixture_dir() -> Path:
    return Path(__file__).parent
