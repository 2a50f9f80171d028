"""Pipeline configuration, read from YAML (or JSON, which YAML accepts)."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import yaml

from eranet.chronology import DEFAULT_ACTIVITY_OFFSET, MINIMAL
from eranet.community.tracking import theta_range
from eranet.errors import ConfigError, SchemeError
from eranet.ingest import DEFAULT_IMPUTATION_SPAN
from eranet.model import DEFAULT_HORIZON, EraScheme, default_scheme

DEFAULT_SWEEP = "0:0.95:0.05"


def parse_thetas(spec: str | list | None) -> list[float]:
    """``"start:stop:step"`` (inclusive), a comma list, or a list of numbers."""
    if spec is None:
        return []
    if isinstance(spec, (list, tuple)):
        return [float(x) for x in spec]
    text = str(spec).strip()
    if not text:
        return []
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"theta range must be start:stop:step, got {text!r}")
        return theta_range(*(float(p) for p in parts))
    return [float(x) for x in text.split(",")]


@dataclass
class PipelineConfig:
    eras: list[dict[str, Any]] = field(default_factory=lambda: default_scheme().to_records())
    imputation_span: int = DEFAULT_IMPUTATION_SPAN
    horizon: int = DEFAULT_HORIZON
    activity_offset: int = DEFAULT_ACTIVITY_OFFSET
    repair_policy: str = MINIMAL
    theta: float = 0.3
    death_window: int = 1
    seed: int = 0
    sweep_thetas: list[float] | None = field(default_factory=lambda: parse_thetas(DEFAULT_SWEEP))
    alive_years: list[int] | None = None
    top_k: int = 5
    filters: str | None = None
    corrections: str | None = None
    write_dot: bool = True

    @property
    def scheme(self) -> EraScheme:
        return EraScheme.from_records(self.eras)

    def validate(self) -> None:
        try:
            scheme = self.scheme
        except SchemeError as exc:
            raise ConfigError(str(exc)) from exc
        if self.repair_policy not in ("minimal", "backward", "forward"):
            raise ConfigError(f"unknown repair_policy {self.repair_policy!r}")
        if not 0 <= self.theta <= 1:
            raise ConfigError("theta must lie in [0, 1]")
        if self.death_window < 1:
            raise ConfigError("death_window must be >= 1")
        if self.imputation_span < 1 or self.activity_offset < 0 or self.top_k < 1:
            raise ConfigError("imputation_span and top_k must be positive, activity_offset non-negative")
        if any(not 0 <= t <= 1 for t in self.sweep_thetas or ()):
            raise ConfigError("sweep thetas must lie in [0, 1]")
        if self.alive_years is not None and (len(self.alive_years) != 2 or self.alive_years[0] > self.alive_years[1]):
            raise ConfigError("alive_years must be [start, end] with start <= end")
        if self.horizon > scheme.upper_bounds[-1]:
            raise ConfigError(f"horizon {self.horizon} lies beyond the last era ({scheme.upper_bounds[-1]})")

    def snapshot(self) -> dict[str, Any]:
        return asdict(self)


def load_config(path: str | Path | None) -> PipelineConfig:
    """Read a config file; unknown keys are an error. Relative file paths resolve against the file."""
    if path is None:
        cfg = PipelineConfig()
        cfg.validate()
        return cfg
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    known = set(PipelineConfig.__dataclass_fields__)
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {', '.join(unknown)}")
    if "sweep_thetas" in data:
        data["sweep_thetas"] = parse_thetas(data["sweep_thetas"])
    for key in ("filters", "corrections"):
        if data.get(key):
            p = Path(data[key])
            data[key] = str(p if p.is_absolute() else (path.parent / p))
    try:
        cfg = PipelineConfig(**data)
        cfg.validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return cfg
