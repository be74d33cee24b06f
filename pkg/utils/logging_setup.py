import logging

from rich.console import Console
from rich.logging import RichHandler

LEVELS_BY_VERBOSITY = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}


def level_for(verbosity: int, default: str = "WARNING") -> int:
    """Map the count of -v flags onto a level; no flag keeps the configured default."""
    if verbosity <= 0:
        level = logging.getLevelName(default.upper())
        return level if isinstance(level, int) else logging.WARNING
    return LEVELS_BY_VERBOSITY.get(verbosity, logging.DEBUG)


def configure_logging(level=logging.WARNING) -> None:
    """
    Route every logger to a Rich handler on stderr.

    Stdout is left for machine output only.
    """
    handler = RichHandler(console=Console(stderr=True), show_time=False, show_path=False, markup=False)
    logging.basicConfig(level=level, format="%(message)s", handlers=[handler], force=True)
