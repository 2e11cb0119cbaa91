from __future__ import annotations

import os
import typing as t
from functools import cached_property
from io import StringIO
from pathlib import Path

import ruamel.yaml
from memoization import CachingAlgorithmFlag, cached
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    YamlConfigSettingsSource,
)
from ruamel.yaml.comments import CommentedBase

from ..schemas.logging import LogLevel

__all__ = [
    "YamlTemplate",
    "BaseFileSettings",
    "NvmoSettings",
    "get_settings",
    "SETTINGS_FILE",
]

SETTINGS_FILE = "nvmo.yaml"


def import_yaml() -> ruamel.yaml.YAML:
    yaml = ruamel.yaml.YAML()
    yaml.block_seq_indent = 2
    yaml.map_indent = 2
    yaml.sequence_dash_offset = 2
    yaml.sequence_indent = 4
    yaml.default_flow_style = None
    return yaml


class YamlTemplate:
    """Create a commented yaml configuration template for a pydantic model object."""

    def __init__(self, model_obj: BaseModel, dump_kwds: t.Optional[t.Dict] = None):
        """
        Constructor for YamlTemplate.

        Args:
            model_obj (BaseModel): The pydantic model object to create a template for.
            dump_kwds (dict, optional): Additional keyword arguments for model_dump.

        """
        self.model_obj = model_obj
        self.dump_kwds = dump_kwds or {}

    @cached_property
    def model_cls(self) -> t.Type[BaseModel]:
        return self.model_obj.__class__

    @cached_property
    def _properties(self) -> t.Dict[str, t.Dict]:
        return self.model_cls.model_json_schema().get("properties", {})

    def _create_yaml_object(self) -> CommentedBase:
        """Round-trip the dumped model through ruamel so comments can be attached."""
        data = self.model_obj.model_dump(mode="json", **self.dump_kwds)
        yaml = import_yaml()
        buffer = StringIO()
        yaml.dump(data, buffer)
        buffer.seek(0)
        return yaml.load(buffer)

    def get_class_comment(self) -> str | None:
        return self.model_cls.model_json_schema().get("description")

    def get_field_comment(self, field_name: str) -> str | None:
        if field := self._properties.get(field_name):
            lines = [field.get("description", "")]
            if enum := field.get("enum"):
                lines.append(f"choices: {enum}")
            return "\n".join(line for line in lines if line) or None
        return None

    def create_yaml_template(self, write_to: str | Path | None = None) -> str:
        obj = self._create_yaml_object()

        if cls_comment := self.get_class_comment():
            obj.yaml_set_start_comment(cls_comment + "\n\n")

        for name in self.model_cls.model_fields:
            if name in obj and (comment := self.get_field_comment(name)):
                obj.yaml_set_comment_before_after_key(name, "\n" + comment)

        buffer = StringIO()
        import_yaml().dump(obj, buffer)
        template = buffer.getvalue()

        if write_to:
            Path(write_to).write_text(template, encoding="utf-8")
        return template


class BaseFileSettings(BaseSettings):
    """Settings layered as init args > environment > dotenv > yaml file."""

    model_config = SettingsConfigDict(
        use_attribute_docstrings=True,
        extra="ignore",
        yaml_file_encoding="utf-8",
        env_file_encoding="utf-8",
    )

    def model_post_init(self, __context: t.Any) -> None:
        self._auto_reload = True
        return super().model_post_init(__context)

    @property
    def auto_reload(self) -> bool:
        return self._auto_reload

    @auto_reload.setter
    def auto_reload(self, val: bool):
        self._auto_reload = val

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            YamlConfigSettingsSource(settings_cls),
        )

    def create_template_file(self, write_file: str | Path | None = None) -> str:
        return YamlTemplate(model_obj=self).create_yaml_template(write_to=write_file)


class NvmoSettings(BaseFileSettings):
    """nvmo numerical defaults. Values absent from a scenario file fall back to these."""

    model_config = SettingsConfigDict(
        env_prefix="NVMO_",
        yaml_file=SETTINGS_FILE,
        env_file=".env",
    )

    dt: float = Field(1e-3, gt=0.0)
    """Integration step (s)."""
    horizon_static: float = Field(50.0, gt=0.0)
    """Default horizon for static targets (s)."""
    horizon_moving: float = Field(30.0, gt=0.0)
    """Default horizon for moving targets (s)."""
    z_min: float = Field(1e-6, gt=0.0)
    """Smallest admissible feature depth (m)."""
    jacobian_step: float = Field(1e-6, gt=0.0)
    """Central-difference step of the image Jacobian."""
    condition_limit: float = Field(1e8, gt=1.0)
    """Largest accepted condition number of the image Jacobian."""
    reorthonormalize_tol: float = Field(1e-9, gt=0.0)
    """Rotation drift that triggers projection back onto SO(3)."""
    lemma_slack_c: float = Field(0.01, ge=0.0)
    """Slack c in the orientation-spread parameter beta."""
    theorem_slack_epsilon: float = Field(1e-3, gt=0.0, lt=1.0)
    """Slack epsilon in the averaging bounds."""
    feature_side: float = Field(0.25, gt=0.0)
    """Side of the default square feature model (m)."""
    initial_position: list[float] = Field(default_factory=lambda: [0.0, 0.0, -2.5])
    """Default initial position estimate in every camera frame (m)."""
    enumeration_limit: int = Field(10, ge=1)
    """Largest node count for spanning-tree enumeration."""
    progress_every: int = Field(5000, ge=1)
    """Steps between progress log lines."""
    slow_run_warning: float = Field(60.0, gt=0.0)
    """Runs longer than this (s) are logged as warnings."""
    log_level: t.Optional[LogLevel] = None
    """Log level used by the command line when NVMO_LOG is not set."""

    @field_validator("initial_position")
    @classmethod
    def _three_vector(cls, v: list[float]) -> list[float]:
        if len(v) != 3:
            raise ValueError(f"initial_position needs 3 entries, got {len(v)}")
        return v


def _lazy_load_key(settings: BaseSettings):
    keys = [settings.__class__]
    for n in ["env_file", "json_file", "yaml_file", "toml_file"]:
        key = None
        if file := settings.model_config.get(n):
            if os.path.isfile(file) and os.path.getsize(file) > 0:
                key = os.path.getmtime(file)
        keys.append(key)
    return tuple(keys)


@cached(
    max_size=1,
    algorithm=CachingAlgorithmFlag.LRU,
    thread_safe=True,
    custom_key_maker=_lazy_load_key,
)
def _cached_settings[T: BaseFileSettings](settings: T) -> T:
    """The settings object is re-read whenever one of its files changes."""
    if settings.auto_reload:
        settings.__init__()
    return settings


_SETTINGS: NvmoSettings | None = None


def get_settings() -> NvmoSettings:
    global _SETTINGS
    if _SETTINGS is None:
        _SETTINGS = NvmoSettings()
    return _cached_settings(_SETTINGS)
