#!/usr/bin/env python3
"""
Logging - Tagged Console Output
===============================
Console logging in the `[TAG] message` style used across the toolkit.
The tag is the module's short name, e.g. `[PROJECTION]`, with the level
appended from WARNING up (`[PROJECTION WARNING]`).

Output goes to stderr so that stdout stays machine-readable.
"""

import logging
import sys

from config import config

_ROOT = 'krige'


class _TagFormatter(logging.Formatter):
    """Renders `[TAG] message`, the tag taken from the logger name."""

    def format(self, record: logging.LogRecord) -> str:
        tag = record.name.rsplit('.', 1)[-1].upper()
        if record.levelno >= logging.WARNING:
            tag = f"{tag} {record.levelname}"
        return f"[{tag}] {record.getMessage()}"


def get_logger(name: str) -> logging.Logger:
    """Logger under the `krige` namespace, e.g. get_logger('projection')."""
    short = name.rsplit('.', 1)[-1]
    return logging.getLogger(f"{_ROOT}.{short}")


def configure(level: str = None) -> None:
    """Attach the stderr handler once; later calls only rebind the stream and level."""
    root = logging.getLogger(_ROOT)
    root.setLevel(level or config.LOG_LEVEL)
    for handler in root.handlers:
        if getattr(handler, '_krige', False):
            handler.stream = sys.stderr
            break
    else:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(_TagFormatter())
        handler._krige = True
        root.addHandler(handler)
    root.propagate = False
