# logsetup.py
"""Console logging with the ``[TAG] message`` layout used across the toolkit."""

import logging
import sys

_FORMAT = "[%(name)s] %(message)s"


def configure_logging(level: str = "INFO", stream=None) -> None:
    """Install a single stderr handler on the root logger."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter(_FORMAT))
    root.addHandler(handler)
    root.setLevel(getattr(logging, str(level).upper(), logging.INFO))
