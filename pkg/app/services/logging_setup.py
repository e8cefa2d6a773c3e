"""Root logger setup for one CLI invocation.

Everything goes to ``logs/<label>_<timestamp>.log`` at DEBUG; the console
shows INFO (DEBUG with ``--debug``). numpy/torch RuntimeWarnings raised while
a run diverges are routed through ``py.warnings`` into the same file.
"""

import logging
import os
import sys
from datetime import datetime
from logging.handlers import RotatingFileHandler
from typing import Optional

from app.paths import logs_dir as install_logs_dir

LOG_FORMAT = "[%(asctime)s] [%(name)s] %(message)s"
LOG_DATEFMT = "%H:%M:%S"
MAX_LOG_BYTES = 5_000_000
LOG_BACKUPS = 3


def _attach(handler: logging.Handler, name: str, level: int, formatter: logging.Formatter) -> logging.Handler:
    handler.setFormatter(formatter)
    handler.setLevel(level)
    handler.name = name
    return handler


def configure_logging(debug: bool = False, log_dir: Optional[str] = None, label: str = "rang") -> str:
    """Replace the root handlers; returns the log file path."""
    directory = log_dir or install_logs_dir()
    os.makedirs(directory, exist_ok=True)
    log_path = os.path.join(directory, f"{label}_{datetime.now():%Y-%m-%d_%H-%M-%S}.log")

    formatter = logging.Formatter(LOG_FORMAT, LOG_DATEFMT)
    handlers = [
        _attach(
            RotatingFileHandler(log_path, maxBytes=MAX_LOG_BYTES, backupCount=LOG_BACKUPS, encoding="utf-8"),
            f"{label}_file",
            logging.DEBUG,
            formatter,
        ),
        _attach(logging.StreamHandler(sys.stderr), f"{label}_stream", logging.DEBUG if debug else logging.INFO, formatter),
    ]

    root = logging.getLogger()
    root.setLevel(logging.DEBUG)
    for old in list(root.handlers):
        root.removeHandler(old)
    for handler in handlers:
        root.addHandler(handler)

    logging.captureWarnings(True)

    root.info("Logging initialized: %s (console level %s)", log_path, "DEBUG" if debug else "INFO")
    return log_path
