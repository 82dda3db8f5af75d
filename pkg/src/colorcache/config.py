"""TOML run configuration.

Sections map one-to-one onto the parameter dataclasses: [geometry],
[timing], [energy], [controller], [decay], and [workload] with its
[[workload.tasks]] array.  Every key is validated; unknown keys and
out-of-range values raise ConfigError with the offending path.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, get_args, get_type_hints

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .cache import CacheGeometry
from .controller import ControllerConfig
from .energy import EnergyParams
from .timing import TimingParams
from .workload import SYNTHETIC_KINDS

POLICIES = ("baseline", "dct", "ours")


class ConfigError(ValueError):
    pass


@dataclass
class DecayConfig:
    decay_interval: float = 6.4e6  # cycles; inf disables decay
    sweep_divisor: float = 4.0
    sweep_period: float | None = None  # overrides decay_interval / sweep_divisor

    def __post_init__(self) -> None:
        if not self.decay_interval > 0:
            raise ValueError("decay_interval must be positive")
        if not self.sweep_divisor > 0:
            raise ValueError("sweep_divisor must be positive")
        if self.sweep_period is not None and not self.sweep_period > 0:
            raise ValueError("sweep_period must be positive")

    def period(self) -> float:
        if self.sweep_period is not None:
            return self.sweep_period
        if math.isfinite(self.decay_interval):
            return self.decay_interval / self.sweep_divisor
        return math.inf


@dataclass
class TaskSpec:
    id: str
    budget: int  # instructions
    trace: str | None = None
    format: str = "auto"
    kind: str | None = None
    length: int | None = None
    working_set: int = 1 << 20
    stride: int = 64
    instr_per_access: int = 10
    store_fraction: float = 0.0
    phase_length: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("id must be non-empty")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if (self.trace is None) == (self.kind is None):
            raise ValueError("give exactly one of 'trace' (a file) or 'kind' (synthetic)")
        if self.kind is not None:
            if self.kind not in SYNTHETIC_KINDS:
                raise ValueError(f"kind must be one of {SYNTHETIC_KINDS}")
            if self.length is None or self.length <= 0:
                raise ValueError("synthetic tasks need a positive length")
        if self.format not in ("auto", "text", "binary"):
            raise ValueError("format must be auto, text, or binary")


@dataclass
class WorkloadConfig:
    tasks: list[TaskSpec] = field(default_factory=list)
    preempt_points: list[int] = field(default_factory=list)
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if any(p <= 0 for p in self.preempt_points):
            raise ValueError("preempt_points must be positive")


@dataclass
class RunConfig:
    geometry: CacheGeometry = field(default_factory=CacheGeometry)
    timing: TimingParams = field(default_factory=TimingParams)
    energy: EnergyParams = field(default_factory=EnergyParams)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    decay: DecayConfig = field(default_factory=DecayConfig)
    workload: WorkloadConfig = field(default_factory=WorkloadConfig)
    charge_flush_writebacks: bool = True


def _coerce(hint: Any, value: Any) -> Any:
    targets = get_args(hint) or (hint,)
    if float in targets and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    return value


def _make(cls: type, data: Any, path: str) -> Any:
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a table")
    hints = get_type_hints(cls)
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {', '.join(unknown)}")
    kwargs = {k: _coerce(hints[k], v) for k, v in data.items()}
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


_SECTIONS = {
    "geometry": CacheGeometry,
    "timing": TimingParams,
    "energy": EnergyParams,
    "controller": ControllerConfig,
    "decay": DecayConfig,
}


def build_config(data: dict, source: str = "<config>") -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: expected a table at the top level")
    known = set(_SECTIONS) | {"workload", "charge_flush_writebacks"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{source}: unknown section(s)/key(s) {', '.join(unknown)}")
    parts: dict[str, Any] = {}
    for name, cls in _SECTIONS.items():
        parts[name] = _make(cls, data.get(name, {}), name)
    wdata = dict(data.get("workload", {}))
    if not isinstance(wdata, dict):
        raise ConfigError("workload: expected a table")
    tasks_data = wdata.pop("tasks", [])
    if not isinstance(tasks_data, list):
        raise ConfigError("workload.tasks: expected an array of tables")
    tasks = [_make(TaskSpec, t, f"workload.tasks[{i}]") for i, t in enumerate(tasks_data)]
    workload = _make(WorkloadConfig, wdata, "workload")
    workload.tasks = tasks
    charge = data.get("charge_flush_writebacks", True)
    if not isinstance(charge, bool):
        raise ConfigError("charge_flush_writebacks: expected a boolean")
    cfg = RunConfig(
        geometry=parts["geometry"],
        timing=parts["timing"],
        energy=parts["energy"],
        controller=parts["controller"],
        decay=parts["decay"],
        workload=workload,
        charge_flush_writebacks=charge,
    )
    _cross_validate(cfg)
    return cfg


def _cross_validate(cfg: RunConfig) -> None:
    geom = cfg.geometry
    ctl = cfg.controller
    if geom.colors % 16:
        raise ConfigError("geometry: color count must be divisible by 16 for profiling")
    if geom.sets_per_color % ctl.sampling_ratio:
        raise ConfigError(
            f"controller.sampling_ratio: must divide the {geom.sets_per_color} sets of one color"
        )
    floor = geom.colors // 16
    min_colors = ctl.min_colors if ctl.min_colors is not None else floor
    if not floor <= min_colors <= geom.colors:
        raise ConfigError(
            f"controller.min_colors: must lie in [{floor}, {geom.colors}], the profiled range"
        )
    if ctl.initial_colors is not None and not min_colors <= ctl.initial_colors <= geom.colors:
        raise ConfigError(
            f"controller.initial_colors: must lie in [{min_colors}, {geom.colors}]"
        )
    tasks = cfg.workload.tasks
    if len(tasks) not in (1, 3):
        raise ConfigError("workload.tasks: the schedule model supports exactly 1 or 3 tasks")
    ids = [t.id for t in tasks]
    if len(set(ids)) != len(ids):
        raise ConfigError("workload.tasks: task ids must be unique")
    if len(tasks) == 3 and len(cfg.workload.preempt_points) != 2:
        raise ConfigError("workload.preempt_points: three tasks need exactly two points")
    if len(tasks) == 1 and cfg.workload.preempt_points:
        raise ConfigError("workload.preempt_points: a single task takes no preemption points")


def load_config(path: str | Path) -> RunConfig:
    with open(path, "rb") as f:
        try:
            data = tomllib.load(f)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return build_config(data, str(path))
