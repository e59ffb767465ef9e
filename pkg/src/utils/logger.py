import logging
import sys
from typing import Optional, Union

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
ROOT_LOGGER = "workbench"


def setup_logger(name: str, log_file: Optional[str] = None, level: Union[int, str] = logging.INFO):
    """Set up a logger writing to stderr and, when given, to a log file."""
    formatter = logging.Formatter(LOG_FORMAT)

    logger = logging.getLogger(name)
    logger.setLevel(level)

    if not logger.handlers:
        # stdout carries the JSON output of the CLI
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(formatter)
        logger.addHandler(handler)

        if log_file:
            file_handler = logging.FileHandler(log_file)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """Child of the workbench root logger, configured once from settings."""
    from src.config.settings import get_settings

    root = logging.getLogger(ROOT_LOGGER)
    if not root.handlers:
        settings = get_settings()
        setup_logger(ROOT_LOGGER, settings.log_file, settings.log_level.upper())
    return root.getChild(name.replace("src.", "", 1))


def set_level(level: Union[int, str]) -> None:
    logging.getLogger(ROOT_LOGGER).setLevel(level.upper() if isinstance(level, str) else level)
