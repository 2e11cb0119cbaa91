import sys
import tempfile
import threading
from pathlib import Path
from typing import Optional, Union

import loguru
import loguru._logger

from ..schemas.logging import LogLevel
from .env import get_env

LOG_ENV_VAR = "NVMO_LOG"

DEFAULT_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
    "<level>{message}</level>"
)


class LogRotationConfig:
    """Configuration class for log rotation settings."""

    def __init__(
        self,
        max_file_size: str = "10 MB",
        backup_count: int = 5,
        compression: Optional[str] = "gz",
    ):
        """
        Initialize log rotation configuration.

        Args:
            max_file_size: Maximum size before rotation (e.g., "10 MB", "50 KB")
            backup_count: Number of rotated files to keep
            compression: Compression format for old logs ("gz", "zip", or None)

        """
        self.max_file_size = max_file_size
        self.backup_count = backup_count
        self.compression = compression if compression in ("gz", "zip") else None


class LogManager:
    """
    Thread-safe singleton holding the active level and the log directory policy.

    All sinks share one filter, so changing the level through ``build_logger``
    takes effect for every module-level logger reference at once. ``sinks`` is the
    (file path, format) pair currently installed, ``None`` before the first call.
    """

    _instance = None
    _lock = threading.Lock()

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance.level = LogLevel.INFO
                    cls._instance.sinks = None
        return cls._instance

    def setup_log_directory(self, log_path: Path) -> Path:
        """
        Ensure log directory exists and is writable, falling back to the temp dir.

        Returns:
            Path: Validated log directory path (or fallback)

        """
        try:
            log_path.mkdir(parents=True, exist_ok=True)
            test_file = log_path / ".write_test"
            test_file.touch()
            test_file.unlink()
            return log_path
        except OSError:
            fallback_path = Path(tempfile.gettempdir()) / "nvmo_logs"
            fallback_path.mkdir(parents=True, exist_ok=True)
            print(
                f"Warning: Cannot write to {log_path}, using fallback: {fallback_path}",
                file=sys.stderr,
            )
            return fallback_path

    def log_filter(self, record: dict) -> bool:
        """Drop records below the active level."""
        try:
            return record["level"].no >= self.level.value
        except (KeyError, AttributeError):
            return True


def resolve_log_level(level: Optional[Union[str, int, LogLevel]] = None) -> LogLevel:
    """
    Determine the effective log level.

    Priority order:
    1. An explicit ``level`` argument
    2. The ``NVMO_LOG`` environment variable
    3. ``LogLevel.INFO``
    """
    if level is not None:
        return LogLevel.from_string(level)

    try:
        env_level = get_env(LOG_ENV_VAR, default="")
    except ValueError:
        env_level = ""
    if env_level:
        try:
            return LogLevel.from_string(env_level)
        except ValueError:
            print(
                f"Warning: Invalid log level '{env_level}' in {LOG_ENV_VAR}, using INFO",
                file=sys.stderr,
            )
    return LogLevel.INFO


def build_logger(
    log_file: Optional[str] = None,
    level: Optional[Union[str, int, LogLevel]] = None,
    log_path: Optional[Union[str, Path]] = None,
    rotation_config: Optional[LogRotationConfig] = None,
    format_string: Optional[str] = None,
) -> loguru._logger.Logger:
    """
    Configure the shared loguru logger and return it.

    A stderr sink is always installed. When ``log_file`` is given a rotating file
    sink is added under ``log_path`` (default ``./logs``), replacing any earlier
    file sink. The installed sink set is recorded on :class:`LogManager`: calls
    that ask for the sinks already in place only update the level, and a bare
    ``build_logger()`` after the first configuration changes nothing, so modules
    can call it at import time without stacking sinks.

    Args:
        log_file: Name of the log file (``.log`` appended when missing) or absolute path
        level: Minimum level; overrides ``NVMO_LOG`` when given
        log_path: Base directory for relative log files
        rotation_config: Rotation and compression settings for the file sink
        format_string: Custom loguru format string

    Example:
        ```python
        from nvmo.utils.log_common import build_logger

        logger = build_logger()
        logger.info("scenario loaded")

        logger = build_logger("nvmo", log_path="runs/static", level="DEBUG")
        ```

    """
    manager = LogManager()
    logger = loguru.logger
    format_string = format_string or DEFAULT_FORMAT

    with LogManager._lock:
        if log_file is None and level is None and manager.sinks is not None:
            return logger
        manager.level = resolve_log_level(level)

        if log_file:
            base = Path(log_path) if log_path is not None else Path.cwd() / "logs"
            file_path = _prepare_log_file_path(log_file, manager.setup_log_directory(base))
            sinks = (str(file_path.resolve()), format_string)
        elif manager.sinks is not None and manager.sinks[1] == format_string:
            return logger
        else:
            sinks = (None, format_string)

        if sinks == manager.sinks:
            return logger

        logger.remove()
        logger.add(
            sys.stderr,
            format=format_string,
            level=0,
            filter=manager.log_filter,
            colorize=True,
        )
        if log_file:
            rotation_config = rotation_config or LogRotationConfig()
            logger.add(
                file_path,
                format=format_string,
                level=0,
                rotation=rotation_config.max_file_size,
                retention=rotation_config.backup_count,
                compression=rotation_config.compression,
                colorize=False,
                filter=manager.log_filter,
                backtrace=True,
                diagnose=False,
                enqueue=True,
            )
        manager.sinks = sinks

    return logger


def _prepare_log_file_path(log_file: str, base_log_path: Path) -> Path:
    if not log_file.endswith(".log"):
        log_file = f"{log_file}.log"

    path = Path(log_file)
    if not path.is_absolute():
        path = base_log_path / log_file

    path.parent.mkdir(parents=True, exist_ok=True)
    return path
