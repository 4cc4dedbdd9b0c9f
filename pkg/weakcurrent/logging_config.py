# weakcurrent/logging_config.py

import logging
import sys

from weakcurrent.config import LOG_FILE, LOG_LEVEL


def setup_logging(level=None):
    """
    Set up logging configuration for the application.

    Records go to stderr (and LOG_FILE when set) so stdout stays free for
    emitted artifacts.
    """
    handlers = [logging.StreamHandler(sys.stderr)]
    if LOG_FILE:
        handlers.append(logging.FileHandler(LOG_FILE))
    logging.basicConfig(
        level=level or LOG_LEVEL,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        handlers=handlers,
        force=True,
    )
