"""
Logging for samplers, the fit orchestrator and the CLI.

Console output goes through rich; a fit can also mirror its orchestrator
messages to ``fit.log`` in the run directory.
"""

import logging
import time
from pathlib import Path
from typing import Any, MutableMapping, Optional, Tuple

from rich.logging import RichHandler

RUN_LOG_FILE = "fit.log"

_DEFAULT_LEVEL = "INFO"


def set_default_level(level: str):
    """Level for loggers created from now on; the CLI sets it once from -v/-q."""
    global _DEFAULT_LEVEL
    _DEFAULT_LEVEL = level.upper()


def setup_logger(
    name: str,
    level: Optional[str] = None,
    log_file: Optional[Path] = None
) -> logging.Logger:
    """
    Setup logger with rich formatting.

    Args:
        name: Logger name
        level: Log level (DEBUG, INFO, WARNING, ERROR); defaults to the CLI-wide level
        log_file: Optional file that receives every record at DEBUG and above

    Returns:
        Configured logger instance
    """
    level = (level or _DEFAULT_LEVEL).upper()
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG if log_file else getattr(logging, level))
    logger.propagate = False

    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)

    console = RichHandler(rich_tracebacks=True, markup=False, show_time=True, show_path=False)
    console.setLevel(getattr(logging, level))
    console.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    logger.addHandler(console)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        run_log = logging.FileHandler(log_file, mode="w")
        run_log.setLevel(logging.DEBUG)
        run_log.setFormatter(logging.Formatter(
            "%(asctime)s %(levelname)-7s %(name)s: %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S"
        ))
        logger.addHandler(run_log)

    return logger


class ChainLogger(logging.LoggerAdapter):
    """Prefixes every message with the chain number."""

    def __init__(self, logger: logging.Logger, chain: int):
        super().__init__(logger, {"chain": chain})

    def process(self, msg: Any, kwargs: MutableMapping[str, Any]) -> Tuple[Any, MutableMapping[str, Any]]:
        return f"[chain {self.extra['chain']}] {msg}", kwargs


class ProgressLogger:
    """Numbered steps of a multi-step command, each with its elapsed time."""

    def __init__(self, logger: logging.Logger, total_steps: int):
        self.logger = logger
        self.total_steps = total_steps
        self.current_step = 0
        self._started = time.perf_counter()
        self._step_started = self._started

    def _close_step(self):
        if self.current_step:
            elapsed = time.perf_counter() - self._step_started
            self.logger.debug(f"step {self.current_step} took {elapsed:.2f}s")

    def step(self, message: str):
        self._close_step()
        self.current_step += 1
        self._step_started = time.perf_counter()
        self.logger.info(f"[{self.current_step}/{self.total_steps}] {message}")

    def complete(self, message: str = "All steps completed") -> float:
        """Log completion and return the total wall time in seconds."""
        self._close_step()
        total = time.perf_counter() - self._started
        self.logger.info(f"{message} ({total:.1f}s)")
        return total
