"""Simple logging setup for the roommates solvers."""

import logging
import sys


def get_logger(name: str) -> logging.Logger:
    """Get a configured logger writing to stderr."""
    logger = logging.getLogger(name)

    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        formatter = logging.Formatter(
            "%(asctime)s - %(levelname)s - %(message)s",
            datefmt="%H:%M:%S",
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        # stdout is reserved for the JSON report
        logger.propagate = False

    return logger


def set_verbose(verbose: bool) -> None:
    """Switch every roommates logger to DEBUG (or back to INFO)."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.getLogger().setLevel(level)
    for name, logger in logging.Logger.manager.loggerDict.items():
        if name.startswith("roommates") and isinstance(logger, logging.Logger):
            logger.setLevel(level)
