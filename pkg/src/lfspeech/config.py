"""Pipeline configuration stored in YAML.

Precedence is command-line flags over the config file over built-in
defaults. Environment variables are never read.

Example::

    max_chunk_duration: 29.5
    chunk_policy: gap_biased
    token_table_path: tokens.tsv
    vad:
      threshold_db: -45
    gain:
      probability: 0.4
      seed: 7
"""

from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Annotated, Any, Literal, Mapping, Optional

import yaml
from pydantic import ConfigDict, Field
from pydantic.dataclasses import dataclass as pyd_dataclass
from returns.io import IOResult, IOSuccess, IOFailure

from .audio_io import TARGET_RATE, GainAugmentConfig
from .chunker import DEFAULT_LOOKBACK, DEFAULT_MAX_DURATION, ChunkPolicy, VadConfig
from .emissions import DEFAULT_FRAME_DURATION
from .errors import ConfigError, describe
from .text_norm import UnknownPolicy

NESTED = ("vad", "gain")


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class PipelineConfig:
    max_chunk_duration: Annotated[float, Field(gt=0)] = DEFAULT_MAX_DURATION
    chunk_policy: ChunkPolicy = "greedy"
    lookback: Annotated[int, Field(ge=1)] = DEFAULT_LOOKBACK
    pad: Annotated[float, Field(ge=0)] = 0.0
    frame_duration: Annotated[float, Field(gt=0)] = DEFAULT_FRAME_DURATION
    band_width: Optional[Annotated[int, Field(ge=1)]] = None
    target_rate: Annotated[int, Field(gt=0)] = TARGET_RATE
    vad: VadConfig = Field(default_factory=VadConfig)
    gain: GainAugmentConfig = Field(default_factory=GainAugmentConfig)
    collar: Annotated[float, Field(ge=0)] = 0.0
    workers: Annotated[int, Field(ge=1)] = 1
    token_table_path: Optional[Path] = None
    unknown_policy: UnknownPolicy = "skip"
    window_duration: Annotated[float, Field(gt=0)] = 5.0
    window_step: Annotated[float, Field(gt=0)] = 5.0

    def merged(self, overrides: Mapping[str, Any]) -> "PipelineConfig":
        """Apply non-None overrides; ``"gain.seed"`` style keys reach nested sections.

        Raises ``pydantic.ValidationError`` when the result is invalid.
        """
        top: dict = {}
        nested: dict = {name: {} for name in NESTED}
        for key, value in overrides.items():
            if value is None:
                continue
            section, dot, field = key.partition(".")
            if dot and section in nested:
                nested[section][field] = value
            else:
                top[key] = value
        for section, fields in nested.items():
            if fields:
                top[section] = dataclasses.replace(getattr(self, section), **fields)
        if not top:
            return self
        return PipelineConfig(**{**_as_kwargs(self), **top})


def _as_kwargs(config: PipelineConfig) -> dict:
    return {f.name: getattr(config, f.name) for f in dataclasses.fields(config)}


def parse_config(text: str, base_dir: Optional[Path] = None) -> IOResult[PipelineConfig, ConfigError]:
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        return IOFailure(ConfigError(reason=f"yaml: {exc}"))
    if not isinstance(data, dict):
        return IOFailure(ConfigError(reason="top level must be a mapping"))
    table = data.get("token_table_path")
    # relative table paths resolve against the config file's directory
    if table and base_dir is not None and not Path(table).is_absolute():
        data["token_table_path"] = base_dir / table
    try:
        return IOSuccess(PipelineConfig(**data))
    except (TypeError, ValueError) as exc:
        return IOFailure(ConfigError(reason=describe(exc)))


def load_config(path: Path) -> IOResult[PipelineConfig, ConfigError]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        return IOFailure(ConfigError(reason=f"{path}: {exc.strerror or exc}"))
    return parse_config(text, base_dir=path.parent)


__all__ = ["PipelineConfig", "parse_config", "load_config"]
