"""Error hierarchy and error/event logging for the simulator."""
import os
import sys
import json
import functools
import traceback
import threading
from datetime import datetime
from typing import Dict, List, Any, Optional
from collections import deque
from enum import Enum

import config


class ErrorLevel(Enum):
    """Error severity levels."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


_SEVERITY = list(ErrorLevel)


class ErrorCategory(Enum):
    """Error categories for better organization."""
    VALIDATION = "VALIDATION"
    NUMERICS = "NUMERICS"
    PROTOCOL = "PROTOCOL"
    COUPLING = "COUPLING"
    ENCODING = "ENCODING"
    SCENARIO = "SCENARIO"
    IO = "IO"
    SYSTEM = "SYSTEM"


class SimulationError(ValueError):
    """Base class for every error raised by the simulator."""

    category = ErrorCategory.SYSTEM


class QubitLimitError(SimulationError):
    """Register larger than the configured qubit cap."""
    category = ErrorCategory.VALIDATION


class RegisterError(SimulationError):
    """Bad qubit indices, arities or register layouts."""
    category = ErrorCategory.VALIDATION


class NonUnitaryError(SimulationError):
    category = ErrorCategory.NUMERICS


class ZeroProbabilityError(SimulationError):
    """A forced measurement outcome has (numerically) zero probability."""
    category = ErrorCategory.PROTOCOL


class NotCliffordError(SimulationError):
    """A correction was requested for a gate that is not Clifford."""
    category = ErrorCategory.PROTOCOL


class CodeSpaceError(SimulationError):
    """State support outside the expected code space or register form."""
    category = ErrorCategory.ENCODING


class CouplingError(SimulationError):
    category = ErrorCategory.COUPLING


class StrategyError(SimulationError):
    """No induction strategy exists for an intermodular gate."""
    category = ErrorCategory.PROTOCOL


class ScenarioError(SimulationError):
    """Scenario parse or schema error, located by a field path."""

    category = ErrorCategory.SCENARIO

    def __init__(self, message: str, path: str = "", line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if line is not None:
            location = f"line {line}: "
        if path:
            location += f"{path}: "
        super().__init__(f"{location}{message}")


class ErrorLogger:
    """Error logging system with optional file output and memory storage."""

    def __init__(self, log_dir: str = "", max_memory_logs: int = 1000, echo: bool = True,
                 echo_level: str = "DEBUG"):
        """
        Initialize the error logger.

        Args:
            log_dir: Directory to store JSON-lines log files; empty keeps logs in memory only
            max_memory_logs: Maximum number of logs to keep in memory
            echo: Whether to print each entry to standard error
            echo_level: Lowest level printed when echoing (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        """
        self.log_dir = log_dir
        self.max_memory_logs = max_memory_logs
        self.memory_logs = deque(maxlen=max_memory_logs)
        self.error_counts: Dict[str, int] = {}
        self.session_start = datetime.now()
        self.session_id = self.session_start.strftime("%Y%m%d_%H%M%S")
        self.echo = echo
        self.echo_level = ErrorLevel(echo_level.upper())
        self.lock = threading.Lock()

        self.session_log_file = None
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
            self.session_log_file = os.path.join(log_dir, f"session_{self.session_id}.jsonl")

    def log(self, level: ErrorLevel, category: ErrorCategory, message: str,
            context: Optional[Dict[str, Any]] = None, exception: Optional[BaseException] = None):
        """
        Log an error or event.

        Args:
            level: Error severity level
            category: Error category
            message: Error message
            context: Additional context information
            exception: Exception object if available
        """
        with self.lock:
            log_entry = {
                "timestamp": datetime.now().isoformat(),
                "session_id": self.session_id,
                "level": level.value,
                "category": category.value,
                "message": message,
                "context": context or {},
                "exception_info": None
            }

            if exception is not None:
                log_entry["exception_info"] = {
                    "type": type(exception).__name__,
                    "message": str(exception),
                    "traceback": "".join(traceback.format_exception(
                        type(exception), exception, exception.__traceback__))
                }

            self.memory_logs.append(log_entry)

            count_key = f"{level.value}_{category.value}"
            self.error_counts[count_key] = self.error_counts.get(count_key, 0) + 1

            if self.session_log_file:
                self._write_to_file(log_entry)
            if self.echo and _SEVERITY.index(level) >= _SEVERITY.index(self.echo_level):
                self._print_log(log_entry)

    def _write_to_file(self, log_entry: Dict[str, Any]):
        """Append a log entry to the session file."""
        try:
            with open(self.session_log_file, 'a', encoding='utf-8') as f:
                f.write(json.dumps(log_entry, default=str) + '\n')
        except OSError as e:
            print(f"ERROR: Failed to write log to file: {e}", file=sys.stderr)

    def _print_log(self, log_entry: Dict[str, Any]):
        """Print log entry to stderr with color coding."""
        timestamp = log_entry["timestamp"][:19]
        level = log_entry["level"]
        colors = {
            "DEBUG": "\033[36m",
            "INFO": "\033[32m",
            "WARNING": "\033[33m",
            "ERROR": "\033[31m",
            "CRITICAL": "\033[35m"
        }
        color = colors.get(level, "")
        print(f"{color}[{timestamp}] {level} | {log_entry['category']} | {log_entry['message']}\033[0m",
              file=sys.stderr)
        if log_entry.get("exception_info"):
            info = log_entry["exception_info"]
            print(f"  Exception: {info['type']}: {info['message']}", file=sys.stderr)
        if log_entry.get("context"):
            print(f"  Context: {log_entry['context']}", file=sys.stderr)

    def get_logs(self, level_filter: Optional[ErrorLevel] = None,
                 category_filter: Optional[ErrorCategory] = None,
                 last_n: Optional[int] = None) -> List[Dict[str, Any]]:
        """
        Get logs with optional filtering.

        Args:
            level_filter: Filter by error level
            category_filter: Filter by error category
            last_n: Return only last N logs

        Returns:
            List of log entries
        """
        with self.lock:
            logs = list(self.memory_logs)
        if level_filter:
            logs = [entry for entry in logs if entry["level"] == level_filter.value]
        if category_filter:
            logs = [entry for entry in logs if entry["category"] == category_filter.value]
        if last_n:
            logs = logs[-last_n:]
        return logs

    def get_error_summary(self) -> Dict[str, Any]:
        """Get summary of errors and statistics."""
        with self.lock:
            level_counts: Dict[str, int] = {}
            category_counts: Dict[str, int] = {}
            for entry in self.memory_logs:
                level_counts[entry["level"]] = level_counts.get(entry["level"], 0) + 1
                category_counts[entry["category"]] = category_counts.get(entry["category"], 0) + 1
            return {
                "session_id": self.session_id,
                "total_logs": len(self.memory_logs),
                "level_counts": level_counts,
                "category_counts": category_counts,
                "error_counts": self.error_counts.copy(),
                "session_duration": (datetime.now() - self.session_start).total_seconds()
            }

    def export_logs(self, filename: str) -> str:
        """
        Export logs and their summary to a JSON file.

        Args:
            filename: Output path

        Returns:
            Path to the exported file
        """
        export_data = {
            "export_timestamp": datetime.now().isoformat(),
            "session_id": self.session_id,
            "summary": self.get_error_summary(),
            "logs": self.get_logs()
        }
        with open(filename, 'w', encoding='utf-8') as f:
            json.dump(export_data, f, indent=2, ensure_ascii=False, default=str)
        return filename

    def clear_logs(self):
        """Clear all logs from memory."""
        with self.lock:
            self.memory_logs.clear()
            self.error_counts.clear()


# Global error logger instance
error_logger = ErrorLogger(config.ERROR_LOG_DIR, echo_level=config.LOG_LEVEL)


def log_error(message: str, category: ErrorCategory = ErrorCategory.SYSTEM,
              context: Optional[Dict[str, Any]] = None, exception: Optional[BaseException] = None):
    """Log an error."""
    error_logger.log(ErrorLevel.ERROR, category, message, context, exception)


def log_warning(message: str, category: ErrorCategory = ErrorCategory.SYSTEM,
                context: Optional[Dict[str, Any]] = None):
    """Log a warning."""
    error_logger.log(ErrorLevel.WARNING, category, message, context)


def log_info(message: str, category: ErrorCategory = ErrorCategory.SYSTEM,
             context: Optional[Dict[str, Any]] = None):
    error_logger.log(ErrorLevel.INFO, category, message, context)


def log_debug(message: str, category: ErrorCategory = ErrorCategory.SYSTEM,
              context: Optional[Dict[str, Any]] = None):
    error_logger.log(ErrorLevel.DEBUG, category, message, context)


def log_critical(message: str, category: ErrorCategory = ErrorCategory.SYSTEM,
                 context: Optional[Dict[str, Any]] = None, exception: Optional[BaseException] = None):
    error_logger.log(ErrorLevel.CRITICAL, category, message, context, exception)


def log_exceptions(category: ErrorCategory = ErrorCategory.SYSTEM):
    """Decorator to log exceptions (with their own category when known) and re-raise."""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except Exception as e:
                log_error(
                    f"Exception in {func.__name__}: {e}",
                    getattr(e, "category", category),
                    {"function": func.__name__, "args": str(args)[:200], "kwargs": str(kwargs)[:200]},
                    e
                )
                raise
        return wrapper
    return decorator
