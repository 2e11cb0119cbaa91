import inspect
import os
import time
from functools import wraps
from typing import Callable, Optional

from .log_common import build_logger


def _find_call_site(depth: int = 2):
    """Find the first frame outside this module, site-packages and the interpreter internals."""
    frame = inspect.currentframe()
    for _ in range(depth):
        if frame is not None:
            frame = frame.f_back
    while frame:
        fname = frame.f_code.co_filename
        if (
            fname != __file__
            and "site-packages" not in fname
            and not fname.startswith("<")
        ):
            try:
                rel_path = os.path.relpath(fname, start=os.getcwd())
            except ValueError:
                rel_path = fname
            return rel_path, frame.f_lineno
        frame = frame.f_back
    return "unknown", -1


def measure_time(
    func=None,
    *,
    logger=None,
    level: str = "debug",
    tag: Optional[str] = None,
    threshold_warning: Optional[float] = None,
    metric_collector: Optional[Callable[[str, float], None]] = None,
    is_return_measured_time: bool = False,
):
    """
    Timing decorator that logs elapsed wall-clock time with the call site.

    Args:
        logger: Optional custom logger. Default = the shared nvmo logger.
        level: Log level for normal timing logs.
        tag: Optional label for grouping logs (e.g., "sim", "graph").
        threshold_warning: Log a warning if elapsed time exceeds this many seconds.
        metric_collector: Function receiving ``(qualified_name, elapsed)``.
        is_return_measured_time: If True, returns ``(result, elapsed)``.

    """

    def decorator(f):
        qualname = getattr(f, "__qualname__", f.__name__)
        module = inspect.getmodule(f)
        modname = module.__name__ if module else "unknown"
        tag_text = f"[{tag}] " if tag else ""

        @wraps(f)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            result = f(*args, **kwargs)
            elapsed = time.perf_counter() - start

            log = logger or build_logger()
            path, lineno = _find_call_site()
            msg = f"[{elapsed:8.3f}s] {tag_text}{modname}.{qualname} ({path}:{lineno})"
            if threshold_warning is not None and elapsed > threshold_warning:
                log.warning(f"{msg} exceeded {threshold_warning:.1f}s")
            else:
                getattr(log, level, log.info)(msg)

            if metric_collector is not None:
                try:
                    metric_collector(qualname, elapsed)
                except Exception as e:
                    log.warning(f"[timing] Metric collector failed: {e}")

            return (result, elapsed) if is_return_measured_time else result

        return wrapper

    return decorator if func is None else decorator(func)
