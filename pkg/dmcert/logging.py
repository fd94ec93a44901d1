from __future__ import annotations

import json
import logging
import sys
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any, Dict, Iterator

# Run context, printed right after the logger name when present.
CONTEXT_FIELDS = ("subcommand", "p", "stage")

_RESERVED = {
    "name",
    "msg",
    "args",
    "levelname",
    "levelno",
    "pathname",
    "filename",
    "module",
    "exc_info",
    "exc_text",
    "stack_info",
    "lineno",
    "funcName",
    "created",
    "msecs",
    "relativeCreated",
    "thread",
    "threadName",
    "processName",
    "process",
    "taskName",
}

_context: ContextVar[Dict[str, Any]] = ContextVar("dmcert_log_context", default={})


@contextmanager
def log_context(**fields: Any) -> Iterator[None]:
    """Stamp ``fields`` on every record logged inside the block."""
    token = _context.set({**_context.get(), **fields})
    try:
        yield
    finally:
        _context.reset(token)


class ContextFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        for k, v in _context.get().items():
            if not hasattr(record, k):
                setattr(record, k, v)
        return True


class JsonFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "level": record.levelname,
            "logger": record.name,
        }
        for k in CONTEXT_FIELDS:
            if k in record.__dict__:
                payload[k] = record.__dict__[k]
        payload["message"] = record.getMessage()
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        for k, v in record.__dict__.items():
            if k in _RESERVED or k.startswith("_"):
                continue
            if k not in payload:
                payload[k] = v
        # numpy scalars and Fractions show up in extras
        return json.dumps(payload, ensure_ascii=False, default=str)


def setup_logging(level: str = "WARNING") -> None:
    root = logging.getLogger()
    root.setLevel(level.upper())

    # stdout is reserved for serialized command output
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonFormatter())
    handler.addFilter(ContextFilter())

    # Replace existing handlers
    root.handlers = [handler]

    logging.getLogger("dmcert").setLevel(level.upper())
