"""config.json loading and section parsing.

Each section parses into a frozen dataclass; a missing section or key falls
back to the dataclass default, so an empty config file is valid.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Optional

_logger = logging.getLogger("rang.config")


@dataclass(frozen=True)
class SamplingConfig:
    arc_points: int = 5
    perturbation: float = 0.01


@dataclass(frozen=True)
class ErrorMapConfig:
    grid_nx: int = 128
    grid_ny: int = 128
    eps: float = 1e-12


@dataclass(frozen=True)
class BisectionConfig:
    count_tol: float = 0.05
    width_tol: float = 0.003
    low_factor: float = 0.2
    up_factor: float = 20.0


@dataclass(frozen=True)
class NetworkConfig:
    hidden: tuple[int, ...] = (64, 64, 64, 64)
    normalize_inputs: bool = True


@dataclass(frozen=True)
class TrainingConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    log_every: int = 100
    ratio: float = 100.0
    condition_nodes: int = 200
    torch_threads: int = 1
    printed_ic_slope: bool = False
    printed_ic_velocity: bool = False


@dataclass(frozen=True)
class SuiteConfig:
    workers: int = 1
    base_seed: int = 0
    preset: str = "desk"


@dataclass(frozen=True)
class ReferenceConfig:
    directory: str = ""


@dataclass(frozen=True)
class AppConfig:
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    errormap: ErrorMapConfig = field(default_factory=ErrorMapConfig)
    bisection: BisectionConfig = field(default_factory=BisectionConfig)
    network: NetworkConfig = field(default_factory=NetworkConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    suite: SuiteConfig = field(default_factory=SuiteConfig)
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)
    raw: dict = field(default_factory=dict, compare=False, repr=False)


def load_config(path: str) -> dict:
    """Read config.json; a missing file is an empty config."""
    if not os.path.exists(path):
        _logger.info("Config: path missing=%s (defaults)", path)
        return {}
    with open(path, "r", encoding="utf-8") as config_file:
        config = json.load(config_file)
    if not isinstance(config, dict):
        raise ValueError(f"config root must be an object: {path}")
    _logger.info("Config: loaded path=%s keys=%s", path, sorted(config.keys()))
    return config


def _section(config: Optional[dict], name: str) -> dict[str, Any]:
    section = (config or {}).get(name, {}) or {}
    if not isinstance(section, dict):
        raise ValueError(f"config section '{name}' must be an object")
    return section


def parse_sampling_config(config: Optional[dict]) -> SamplingConfig:
    section = _section(config, "sampling")
    parsed = SamplingConfig(
        arc_points=int(section.get("arc_points", 5)),
        perturbation=float(section.get("perturbation", 0.01)),
    )
    if parsed.arc_points < 1:
        raise ValueError("sampling.arc_points must be >= 1")
    if not 0.0 < parsed.perturbation < 1.0:
        raise ValueError("sampling.perturbation must lie in (0, 1)")
    return parsed


def parse_errormap_config(config: Optional[dict]) -> ErrorMapConfig:
    section = _section(config, "errormap")
    parsed = ErrorMapConfig(
        grid_nx=int(section.get("grid_nx", 128)),
        grid_ny=int(section.get("grid_ny", 128)),
        eps=float(section.get("eps", 1e-12)),
    )
    if parsed.grid_nx < 1 or parsed.grid_ny < 1:
        raise ValueError("errormap grid must be at least 1x1")
    if parsed.eps <= 0:
        raise ValueError("errormap.eps must be > 0")
    return parsed


def parse_bisection_config(config: Optional[dict]) -> BisectionConfig:
    section = _section(config, "bisection")
    parsed = BisectionConfig(
        count_tol=float(section.get("count_tol", 0.05)),
        width_tol=float(section.get("width_tol", 0.003)),
        low_factor=float(section.get("low_factor", 0.2)),
        up_factor=float(section.get("up_factor", 20.0)),
    )
    if not 0 < parsed.low_factor < parsed.up_factor:
        raise ValueError("bisection factors must satisfy 0 < low_factor < up_factor")
    return parsed


def parse_network_config(config: Optional[dict]) -> NetworkConfig:
    section = _section(config, "network")
    hidden = tuple(int(width) for width in section.get("hidden", (64, 64, 64, 64)))
    if not hidden or any(width < 1 for width in hidden):
        raise ValueError("network.hidden must list positive layer widths")
    return NetworkConfig(
        hidden=hidden,
        normalize_inputs=bool(section.get("normalize_inputs", True)),
    )


def parse_training_config(config: Optional[dict]) -> TrainingConfig:
    section = _section(config, "training")
    parsed = TrainingConfig(
        lr=float(section.get("lr", 1e-3)),
        beta1=float(section.get("beta1", 0.9)),
        beta2=float(section.get("beta2", 0.999)),
        adam_eps=float(section.get("adam_eps", 1e-8)),
        log_every=int(section.get("log_every", 100)),
        ratio=float(section.get("ratio", 100.0)),
        condition_nodes=int(section.get("condition_nodes", 200)),
        torch_threads=int(section.get("torch_threads", 1)),
        printed_ic_slope=bool(section.get("printed_ic_slope", False)),
        printed_ic_velocity=bool(section.get("printed_ic_velocity", False)),
    )
    if parsed.log_every < 1:
        raise ValueError("training.log_every must be >= 1")
    if parsed.ratio < 1:
        raise ValueError("training.ratio must be >= 1")
    if parsed.condition_nodes < 2:
        raise ValueError("training.condition_nodes must be >= 2")
    return parsed


def parse_suite_config(config: Optional[dict]) -> SuiteConfig:
    section = _section(config, "suite")
    parsed = SuiteConfig(
        workers=max(1, int(section.get("workers", 1))),
        base_seed=int(section.get("base_seed", 0)),
        preset=str(section.get("preset", "desk")).lower().strip(),
    )
    if parsed.preset not in ("desk", "paper"):
        raise ValueError(f"suite.preset must be 'desk' or 'paper', got {parsed.preset!r}")
    return parsed


def parse_reference_config(config: Optional[dict]) -> ReferenceConfig:
    section = _section(config, "reference")
    return ReferenceConfig(directory=str(section.get("directory", "") or ""))


def parse_app_config(config: Optional[dict]) -> AppConfig:
    return AppConfig(
        sampling=parse_sampling_config(config),
        errormap=parse_errormap_config(config),
        bisection=parse_bisection_config(config),
        network=parse_network_config(config),
        training=parse_training_config(config),
        suite=parse_suite_config(config),
        reference=parse_reference_config(config),
        raw=dict(config or {}),
    )
