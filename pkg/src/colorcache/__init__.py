"""Trace-driven energy simulator for a resizable, color-partitioned cache."""

__version__ = "0.1.0"

from .cache import CacheGeometry, ColoredCache, region_of
from .config import ConfigError, RunConfig, build_config, load_config
from .controller import Controller, ControllerConfig, build_config_space
from .decay import DecayCache
from .energy import EnergyBreakdown, EnergyParams
from .profiler import ProfilingCache, storage_overhead
from .report import RunReport, compare_reports, validate_report
from .runner import Simulation, run_config
from .timing import IntervalStats, TimingParams
from .workload import LOAD, STORE, SyntheticParams, TraceRecord, gen_synthetic, parse_trace, write_trace

__all__ = [
    "CacheGeometry",
    "ColoredCache",
    "ConfigError",
    "Controller",
    "ControllerConfig",
    "DecayCache",
    "EnergyBreakdown",
    "EnergyParams",
    "IntervalStats",
    "LOAD",
    "ProfilingCache",
    "RunConfig",
    "RunReport",
    "STORE",
    "Simulation",
    "SyntheticParams",
    "TimingParams",
    "TraceRecord",
    "build_config",
    "build_config_space",
    "compare_reports",
    "gen_synthetic",
    "load_config",
    "parse_trace",
    "region_of",
    "run_config",
    "storage_overhead",
    "validate_report",
    "write_trace",
]
