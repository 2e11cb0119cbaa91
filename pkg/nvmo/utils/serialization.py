import json
import math
from typing import Any

import numpy as np
from pydantic import BaseModel


def _default_serializer(obj: Any) -> Any:
    """
    Handle objects that aren't directly JSON serializable.

    NOTE: returns a *Python* object that json.dumps can then serialize, not a
    JSON string, to avoid double-encoding.
    """
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")

    if isinstance(obj, np.ndarray):
        return obj.tolist()

    if isinstance(obj, np.bool_):
        return bool(obj)

    if isinstance(obj, np.integer):
        return int(obj)

    if isinstance(obj, np.floating):
        return _finite_or_none(float(obj))

    if isinstance(obj, set | frozenset):
        return sorted(obj, key=repr)

    if isinstance(obj, Exception):
        return {"error": str(obj), "error_type": type(obj).__name__}

    return repr(obj)


def _finite_or_none(value: float):
    return value if math.isfinite(value) else None


def _sanitize(data: Any) -> Any:
    """Replace non-finite floats by ``None`` so the output stays strict JSON."""
    if isinstance(data, float):
        return _finite_or_none(data)
    if isinstance(data, np.ndarray):
        return _sanitize(data.tolist())
    if isinstance(data, dict):
        return {k: _sanitize(v) for k, v in data.items()}
    if isinstance(data, list | tuple):
        return [_sanitize(v) for v in data]
    return data


def to_json(data: Any, indent: int | None = 2) -> str:
    """
    Serialize reports and plain data to a JSON string with sorted keys.

    Pydantic models, numpy arrays and scalars, sets and exceptions are converted;
    NaN and infinities become ``null``.
    """
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="python")
    return json.dumps(
        _sanitize(data),
        sort_keys=True,
        ensure_ascii=False,
        indent=indent,
        default=_default_serializer,
        allow_nan=False,
    )
