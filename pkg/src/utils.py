"""
Utility functions for the UC-CET solver
"""

import logging
import re
import time
from typing import Optional

from .config import Config


def setup_logging(level: Optional[str] = None, log_to_file: bool = True):
    """Setup logging configuration."""

    handlers = [logging.StreamHandler()]
    if log_to_file:
        Config.LOG_DIR.mkdir(exist_ok=True)
        handlers.insert(0, logging.FileHandler(Config.LOG_DIR / Config.LOG_FILE, encoding='utf-8'))

    logging.basicConfig(
        level=getattr(logging, (level or Config.LOG_LEVEL).upper()),
        format=Config.LOG_FORMAT,
        handlers=handlers,
    )

    # Set specific loggers to reduce noise
    logging.getLogger('cvxpy').setLevel(logging.WARNING)
    logging.getLogger('matplotlib').setLevel(logging.WARNING)
    logging.getLogger('asyncio').setLevel(logging.WARNING)


def sanitize_name(text: str, max_length: int = 64) -> str:
    """Turn a provenance tag into an MPS-safe row or column name."""
    if not text:
        return "row"

    name = re.sub(r'\s+', '_', text.strip())
    name = re.sub(r'[^A-Za-z0-9_.\-]', '', name.replace('=', ''))
    return name[:max_length] or "row"


def format_money(value: float) -> str:
    """Format a dollar amount for console summaries."""
    if value is None or value != value:
        return "-"
    return f"${value:,.0f}"


def relative_gap(value: float, reference: float) -> float:
    """Relative distance of value from reference, safe for small references."""
    return abs(value - reference) / max(1.0, abs(reference))


class Stopwatch:
    """Wall-clock timer measured from construction."""

    def __init__(self):
        self.start = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self.start
