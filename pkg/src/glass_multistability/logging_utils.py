"""
Provides centralized logging functionality for the Glass network toolkit.
Logs events, warnings about near-degenerate numerics, errors and oracle
mismatches so that every analysis run leaves an audit trail.

Log files are stored in the directory named by GLASSNET_LOG_DIR ("logs" by default).
"""

import json
import logging
import os
import traceback
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

# Setup logs directory
LOGS_DIR = Path(os.getenv("GLASSNET_LOG_DIR", "logs"))
LOGS_DIR.mkdir(parents=True, exist_ok=True)

# Configure the main application logger
logger = logging.getLogger("glass_multistability")
logger.setLevel(logging.INFO)

log_date = datetime.now().strftime("%Y%m%d")
LOG_FILENAME = f"glassnet_{log_date}.log"
LOG_PATH = LOGS_DIR / LOG_FILENAME

if not logger.handlers:
    file_handler = logging.FileHandler(LOG_PATH)
    file_handler.setLevel(logging.INFO)
    file_format = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    file_handler.setFormatter(file_format)
    logger.addHandler(file_handler)

    # Console only gets warnings and errors; results go to stdout untouched
    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.WARNING)
    console_format = logging.Formatter('%(levelname)s: %(message)s')
    console_handler.setFormatter(console_format)
    logger.addHandler(console_handler)


def set_console_level(level: int) -> None:
    """Adjust the console handler threshold (the CLI's --verbose flag)."""
    for handler in logger.handlers:
        if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
            handler.setLevel(level)


def format_details(details: Optional[Dict[str, Any]] = None) -> str:
    """Details as a JSON suffix; numpy scalars and sets fall back to str()."""
    if not details:
        return ""
    try:
        return " " + json.dumps(details, default=str)
    except (TypeError, ValueError):
        return f" {details}"


def log_event(component: str, message: str, details: Optional[Dict[str, Any]] = None) -> None:
    logger.info(f"[{component}] {message}{format_details(details)}")


def log_warning(component: str, warning_type: str, message: str,
                details: Optional[Dict[str, Any]] = None) -> None:
    """Warnings carry a type tag (NearDegenerate, BoundaryFixedPoint, Chatter, ...) for grepping."""
    logger.warning(f"[{component}] WARNING - {warning_type}: {message}{format_details(details)}")


def log_error(component: str, error_type: str, message: str,
              details: Optional[Dict[str, Any]] = None, exception: Optional[BaseException] = None) -> None:
    """Errors go to the file with the traceback of `exception` when one is given."""
    suffix = format_details(details)
    if exception is None:
        logger.error(f"[{component}] ERROR - {error_type}: {message}{suffix}")
        return
    logger.error(f"[{component}] ERROR - {error_type}: {message} | "
                 f"{type(exception).__name__}: {exception}{suffix}")
    trace = "".join(traceback.format_exception(type(exception), exception, exception.__traceback__))
    logger.error(f"[{component}] Traceback: {trace}")


def log_oracle_mismatch(module: str, inputs: Dict[str, Any], expected: Any, got: Any) -> None:
    """A closed-form result disagreed with its brute-force reference; `inputs` reproduce it."""
    log_error("Oracle", f"{module}Mismatch", f"Oracle comparison failed for {module}",
              {"inputs": inputs, "expected": expected, "got": got})
