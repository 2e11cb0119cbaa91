import os
from typing import Optional


def get_env(name: str, default: Optional[str] = None) -> Optional[str]:
    """
    Get the value of an environment variable.

    :param name: The name of the environment variable.
    :param default: Value returned when the variable is not set. ``None`` means the
        variable is required.
    :return: The value of the environment variable, or ``default``.
    :raises KeyError: If the variable is required and not set.
    :raises ValueError: If the variable is set to an empty string.
    :raises TypeError: If the name is not a string.
    """
    if not isinstance(name, str):
        raise TypeError(f"Expected a string for name, got {type(name).__name__}")

    value = os.environ.get(name)
    if value is None:
        if default is not None:
            return default
        raise KeyError(f"Environment variable '{name}' is not set.")
    if value.strip() == "":
        raise ValueError(f"Environment variable '{name}' is set to an empty string.")

    return value
