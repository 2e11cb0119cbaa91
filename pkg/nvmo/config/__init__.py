from .settings import NvmoSettings, get_settings

__all__ = ["NvmoSettings", "get_settings"]
