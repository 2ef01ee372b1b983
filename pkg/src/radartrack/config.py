"""Pipeline configuration: one document covering every tunable parameter.

Configs are plain JSON objects with one section per stage. Every key has a
default, partial documents are fine, and unknown keys are rejected by name
so typos never silently fall back to defaults. The fully resolved config is
echoed into evaluation reports for provenance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .association import SimilarityThresholds, SimilarityWeights
from .clustering import ClusteringParams
from .simulate import NoiseSpec, ScenarioConfig, TargetSpec
from .tracking import KFConfig, LifecycleParams


class ConfigError(ValueError):
    """Invalid or unknown configuration content."""


@dataclass(frozen=True)
class EgoParams:
    delta_v: float = 0.5
    compensate_before_association: bool = False

    def __post_init__(self):
        if self.delta_v <= 0:
            raise ValueError("delta_v must be > 0")


@dataclass(frozen=True)
class EvalParams:
    match_dist: float = 1.0

    def __post_init__(self):
        if self.match_dist <= 0:
            raise ValueError("match_dist must be > 0")


@dataclass(frozen=True)
class AssociationParams:
    method: str = "greedy"

    def __post_init__(self):
        if self.method not in ("greedy", "optimal"):
            raise ValueError("association method must be 'greedy' or 'optimal'")


@dataclass(frozen=True)
class PipelineConfig:
    clustering: ClusteringParams = ClusteringParams()
    weights: SimilarityWeights = SimilarityWeights()
    thresholds: SimilarityThresholds = SimilarityThresholds()
    kf: KFConfig = KFConfig()
    lifecycle: LifecycleParams = LifecycleParams()
    ego: EgoParams = EgoParams()
    eval: EvalParams = EvalParams()
    association: AssociationParams = AssociationParams()


_SECTIONS = {
    "clustering": ClusteringParams,
    "weights": SimilarityWeights,
    "thresholds": SimilarityThresholds,
    "kf": KFConfig,
    "lifecycle": LifecycleParams,
    "ego": EgoParams,
    "eval": EvalParams,
    "association": AssociationParams,
}


def _build_section(name: str, cls, data: dict):
    if not isinstance(data, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    fields = cls.__dataclass_fields__
    for key in data:
        if key not in fields:
            raise ConfigError(f"unknown config key {name}.{key}")
    try:
        return cls(**data)
    except ValueError as err:
        raise ConfigError(f"config section {name!r}: {err}") from err


def pipeline_config_from_dict(doc: dict) -> PipelineConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    for key in doc:
        if key not in _SECTIONS:
            raise ConfigError(f"unknown config key {key}")
    kwargs = {name: _build_section(name, cls, doc.get(name, {}))
              for name, cls in _SECTIONS.items()}
    return PipelineConfig(**kwargs)


def load_pipeline_config(path: str | Path) -> PipelineConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ConfigError(f"config file {path} is not valid JSON: {err}") from err
    return pipeline_config_from_dict(doc)


def pipeline_config_to_dict(cfg: PipelineConfig) -> dict:
    out: dict = {}
    for name, cls in _SECTIONS.items():
        section = getattr(cfg, name)
        out[name] = {f: getattr(section, f) for f in cls.__dataclass_fields__}
    return out


_SCENARIO_KEYS = {"duration", "frame_rate", "targets", "ego", "noise",
                  "false_alarm_rate", "fov", "seed"}
_TARGET_KEYS = {"class", "start", "velocity", "extent", "reflectivity", "plot_count"}
_NOISE_KEYS = {"position", "velocity", "amplitude"}


def scenario_config_from_dict(doc: dict) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("scenario config must be a JSON object")
    for key in doc:
        if key not in _SCENARIO_KEYS:
            raise ConfigError(f"unknown scenario key {key}")
    targets = []
    for i, tdoc in enumerate(doc.get("targets", [])):
        if not isinstance(tdoc, dict):
            raise ConfigError(f"targets[{i}] must be an object")
        for key in tdoc:
            if key not in _TARGET_KEYS:
                raise ConfigError(f"unknown scenario key targets[{i}].{key}")
        if "class" not in tdoc or "start" not in tdoc:
            raise ConfigError(f"targets[{i}] needs 'class' and 'start'")
        try:
            targets.append(TargetSpec(
                label=tdoc["class"],
                start=tuple(tdoc["start"]),
                velocity=tuple(tdoc.get("velocity", (0.0, 0.0))),
                extent=tuple(tdoc["extent"]) if "extent" in tdoc else None,
                reflectivity=tdoc.get("reflectivity"),
                plot_count=tdoc.get("plot_count"),
            ))
        except ValueError as err:
            raise ConfigError(f"targets[{i}]: {err}") from err
    ndoc = doc.get("noise", {})
    if not isinstance(ndoc, dict):
        raise ConfigError("scenario key 'noise' must be an object")
    for key in ndoc:
        if key not in _NOISE_KEYS:
            raise ConfigError(f"unknown scenario key noise.{key}")
    kwargs = {}
    for key in ("duration", "frame_rate", "ego", "false_alarm_rate", "fov", "seed"):
        if key in doc:
            kwargs[key] = tuple(doc[key]) if key in ("ego", "fov") else doc[key]
    try:
        return ScenarioConfig(targets=tuple(targets), noise=NoiseSpec(**ndoc), **kwargs)
    except ValueError as err:
        raise ConfigError(str(err)) from err


def load_scenario_config(path: str | Path) -> ScenarioConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ConfigError(f"scenario file {path} is not valid JSON: {err}") from err
    return scenario_config_from_dict(doc)
