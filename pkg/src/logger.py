"""
Logging setup shared by the CLI, the HTTP middleware and the services.

Loggers live under the `qtradeoff` namespace. Results go to stdout, so log
records are rendered by rich on stderr.
"""

import logging

from rich.console import Console
from rich.logging import RichHandler

from src.config import Config

ROOT_LOGGER_NAME = "qtradeoff"


def get_logger(name: str) -> logging.Logger:
    """Return the `qtradeoff.<name>` logger."""

    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


def configure_logging(level: str | int | None = None) -> logging.Logger:
    """
    Install a single rich handler on the `qtradeoff` logger.

    Args:
        level (str | int | None): Log level; defaults to `Config.LOG_LEVEL`.

    Returns:
        logging.Logger: The configured root toolkit logger.
    """

    logger = logging.getLogger(ROOT_LOGGER_NAME)
    logger.setLevel(level if level is not None else Config.LOG_LEVEL.upper())

    if not any(isinstance(handler, RichHandler) for handler in logger.handlers):
        handler = RichHandler(
            console=Console(stderr=True), show_path=False, rich_tracebacks=True
        )
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(handler)
        logger.propagate = False

    return logger
