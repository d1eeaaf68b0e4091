import logging
import os

LOG_FORMAT = "[MALEA] %(levelname)s %(name)s: %(message)s"


def configure_logging(level=None):
    """Configure the root logger once for CLI and API entry points."""
    level = level or os.environ.get("MALEA_LOG_LEVEL", "INFO")
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
    root = logging.getLogger()
    if not any(getattr(h, "_malea", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._malea = True
        root.addHandler(handler)
    root.setLevel(level)
