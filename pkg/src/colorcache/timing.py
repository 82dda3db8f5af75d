"""Interval timing for a simple in-order core.

Cycles split into a base component (committed instructions plus cache
lookup latency) and a stall component charged per load miss.  The ratio
of stall cycles to load misses — the penalty per miss — is what lets the
controller project the runtime of a differently sized cache from the
miss counts the profiler estimates for it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .workload import LOAD


@dataclass
class TimingParams:
    base_cpi: float = 1.0
    l2_hit_latency: float = 18.0
    mem_penalty: float = 90.0
    overlap: float = 1.0  # fraction of the miss penalty that actually stalls the core

    def __post_init__(self) -> None:
        if self.base_cpi <= 0:
            raise ValueError("base_cpi must be positive")
        if self.l2_hit_latency < 0:
            raise ValueError("l2_hit_latency must be non-negative")
        if self.mem_penalty < 0:
            raise ValueError("mem_penalty must be non-negative")
        if not 0.0 < self.overlap <= 1.0:
            raise ValueError("overlap must lie in (0, 1]")

    @property
    def default_ppm(self) -> float:
        """Penalty per miss assumed before any interval has been measured."""
        return self.overlap * self.mem_penalty


@dataclass
class IntervalStats:
    """Counters accumulated over one measurement interval."""

    instructions: int = 0
    base_cycles: float = 0.0
    stall_cycles: float = 0.0
    l2_hits: int = 0
    l2_misses: int = 0
    load_misses: int = 0
    writebacks: int = 0
    mem_accesses: int = 0
    prof_accesses: int = 0
    transitions: int = 0
    flushed_lines: int = 0

    @property
    def total_cycles(self) -> float:
        return self.base_cycles + self.stall_cycles

    @property
    def accesses(self) -> int:
        return self.l2_hits + self.l2_misses

    def snapshot(self) -> "IntervalStats":
        return replace(self)

    def reset(self) -> None:
        self.__init__()


def advance(stats: IntervalStats, record, outcome, params: TimingParams) -> None:
    """Charge one trace record to the interval.

    ``outcome`` is the cache access result, or None for records that did
    not reach the cache.  Every lookup pays the hit latency; only load
    misses stall the core, scaled by the overlap factor.
    """
    stats.instructions += record.instr_delta
    cycles = record.instr_delta * params.base_cpi
    if outcome is not None:
        cycles += params.l2_hit_latency
        if not outcome.hit and record.kind == LOAD:
            stats.stall_cycles += params.overlap * params.mem_penalty
    stats.base_cycles += cycles


def ppm(stats: IntervalStats, fallback: float) -> float:
    """Measured penalty per load miss, or ``fallback`` when none occurred."""
    if stats.load_misses > 0:
        return stats.stall_cycles / stats.load_misses
    return fallback


def estimate_cycles(stats: IntervalStats, est_load_misses: float, fallback_ppm: float) -> float:
    """Project the interval's cycle count under a different miss count.

    At the measured miss count this returns the measured cycles exactly;
    elsewhere it rescales the stall component by penalty-per-miss.
    """
    if est_load_misses == stats.load_misses:
        return stats.base_cycles + stats.stall_cycles
    return stats.base_cycles + ppm(stats, fallback_ppm) * est_load_misses
