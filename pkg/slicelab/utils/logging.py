"""
Logging utilities for slicelab
Structured search, suite and falsification logging
"""

import json
import logging
import traceback
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from slicelab.utils.config import settings


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class SliceLabLogger:
    """Custom logger for slicelab with structured logging."""

    def __init__(self, name: str = "slicelab"):
        self.logger = logging.getLogger(name)
        if not self.logger.handlers:
            self._setup_logger()

    def _setup_logger(self):
        """Setup logger with appropriate handlers and formatters."""
        level = logging.getLevelName(settings.log_level)
        self.logger.setLevel(level)
        self.logger.propagate = False

        # Console handler
        console_handler = logging.StreamHandler()
        console_handler.setLevel(level)

        # File handler outside debug mode
        if not settings.debug:
            file_handler = logging.FileHandler("slicelab.log", delay=True)
            file_handler.setLevel(level)
            file_handler.setFormatter(
                logging.Formatter(
                    "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                    datefmt="%Y-%m-%d %H:%M:%S",
                )
            )
            self.logger.addHandler(file_handler)

        console_handler.setFormatter(
            logging.Formatter("%(asctime)s - %(levelname)s - %(message)s", datefmt="%H:%M:%S")
        )
        self.logger.addHandler(console_handler)

    def log_search_event(self, event: str, n: int, k: int, field: str, **details: Any):
        """Log a Grassmannian search event (shard finished, rank excluded, witness found)."""
        search_data = {
            "timestamp": _now(),
            "event": event,
            "ambient_dim": n,
            "subspace_dim": k,
            "field": field,
            **details,
        }
        self.logger.info(f"Search: {json.dumps(search_data, default=str)}")

    def log_suite_verdict(self, verdict: Any):
        """Log a suite verdict; anything short of all-pass is a warning."""
        verdict_data = {
            "timestamp": _now(),
            "suite": verdict.suite_id,
            "run": verdict.cases_run,
            "passed": verdict.cases_passed,
            "skipped": len(verdict.skipped),
            "falsifications": len(verdict.falsifications),
            "seed": verdict.seed,
            "wall_time_ms": round(verdict.wall_time * 1000, 2),
        }
        level = logging.INFO if verdict.cases_passed == verdict.cases_run else logging.WARNING
        self.logger.log(level, f"Suite: {json.dumps(verdict_data)}")

    def log_falsification(self, suite: str, fixture_id: str, expected: Any, observed: Any):
        """Log a falsification event. These are results, so WARNING rather than ERROR."""
        data = {
            "timestamp": _now(),
            "suite": suite,
            "fixture": fixture_id,
            "expected": expected,
            "observed": observed,
        }
        self.logger.warning(f"Falsification: {json.dumps(data, default=str)}")

    def log_error(self, error: Exception, context: Optional[Dict[str, Any]] = None):
        """Log error with full context and traceback."""
        error_data = {
            "timestamp": _now(),
            "error_type": type(error).__name__,
            "error_message": str(error),
            "traceback": traceback.format_exc(),
            "context": context or {},
        }
        self.logger.error(f"Application Error: {json.dumps(error_data, indent=2, default=str)}")


class FalsificationTracker:
    """Count falsification events per suite."""

    def __init__(self):
        self.counts: Dict[str, int] = {}
        self.logger = SliceLabLogger("slicelab.falsifications")

    def track(self, suite: str, fixture_id: str, expected: Any, observed: Any):
        self.counts[suite] = self.counts.get(suite, 0) + 1
        self.logger.log_falsification(suite, fixture_id, expected, observed)

    def get_summary(self) -> Dict[str, int]:
        return self.counts.copy()


# Global instances
logger = SliceLabLogger()
falsification_tracker = FalsificationTracker()


def log_run_event(message: str):
    """Log cli run events."""
    logger.logger.info(f"RUN: {message}")


def log_checkpoint_event(event: str, success: bool, details: Optional[str] = None):
    """Log checkpoint store events."""
    level = logging.INFO if success else logging.ERROR
    status = "ok" if success else "failed"
    message = f"CHECKPOINT [{status}]: {event}"
    if details:
        message += f" - {details}"
    logger.logger.log(level, message)
