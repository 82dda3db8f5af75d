"""Interval controller: picks the next active color count.

At each interval boundary the controller reads the profiler's miss-count
estimates, builds a small window of candidate color counts around the
current one (skewed toward shrinking when the marginal gain of extra
colors is low, toward growing when it is high), projects each candidate's
runtime and energy from the interval's measured behavior, and switches
the cache to the cheapest candidate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cache import CacheGeometry, ColoredCache, ReconfigReport
from .energy import EnergyBreakdown, EnergyParams, l2_energy, memory_energy, overhead_energy
from .profiler import ProfilingCache
from .timing import IntervalStats, TimingParams, estimate_cycles


@dataclass
class ControllerConfig:
    interval_length: int = 10_000_000  # instructions per measurement interval
    granularity: int = 2  # colors between adjacent candidates
    gain_threshold: float = 200.0  # marginal gain separating shrink-leaning from grow-leaning
    max_candidates: int = 11
    min_colors: int | None = None  # default: colors/16, the lowest profiled level
    sampling_ratio: int = 64
    initial_colors: int | None = None

    def __post_init__(self) -> None:
        if self.interval_length <= 0:
            raise ValueError("interval_length must be positive")
        if self.granularity < 1:
            raise ValueError("granularity must be at least 1")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be at least 1")
        if self.sampling_ratio < 1:
            raise ValueError("sampling_ratio must be at least 1")
        if self.min_colors is not None and self.min_colors < 1:
            raise ValueError("min_colors must be at least 1")
        if self.initial_colors is not None and self.initial_colors < 1:
            raise ValueError("initial_colors must be at least 1")


def _window(cfg: ControllerConfig) -> tuple[int, int]:
    """(wide, narrow) candidate counts on either side of the current size."""
    slots = cfg.max_candidates - 1
    wide = round(slots * 0.6)
    return wide, slots - wide


def build_config_space(
    current: int,
    gain: float,
    total_colors: int,
    min_colors: int,
    cfg: ControllerConfig,
) -> list[int]:
    """Candidate color counts around ``current``, ascending.

    Low marginal gain puts the wide side of the window below the current
    count, high gain above it.  Candidates falling outside
    [min_colors, total_colors] are dropped without compensation, so the
    window shrinks at the edges of the range.
    """
    wide, narrow = _window(cfg)
    below, above = (wide, narrow) if gain <= cfg.gain_threshold else (narrow, wide)
    step = cfg.granularity
    out = []
    for k in range(-below, above + 1):
        c = current + k * step
        if min_colors <= c <= total_colors:
            out.append(c)
    return out


@dataclass(frozen=True)
class CandidateEstimate:
    colors: int
    est_load_misses: float
    est_total_misses: float
    est_cycles: float
    est_time_s: float
    energy: EnergyBreakdown


def evaluate_candidates(
    space: Sequence[int],
    stats: IntervalStats,
    prof: ProfilingCache,
    total_colors: int,
    eparams: EnergyParams,
    fallback_ppm: float,
) -> list[CandidateEstimate]:
    """Project the finished interval onto each candidate color count.

    Miss counts come from the profiler, cycles from the penalty-per-miss
    model, hit counts from holding the access count fixed, and writeback
    traffic from the interval's writeback-per-miss ratio.  Transition
    costs are left out: they depend on the jump taken, not on how the
    interval would have run.
    """
    wb_ratio = stats.writebacks / stats.l2_misses if stats.l2_misses else 0.0
    accesses = stats.accesses
    out = []
    for c in space:
        est_load = prof.estimated_load_misses(c)
        est_total = prof.estimated_total_misses(c)
        cycles = estimate_cycles(stats, est_load, fallback_ppm)
        time_s = cycles / eparams.clock_hz
        est_hits = accesses - est_total
        if est_hits < 0:
            est_hits = 0.0
        mem_accesses = est_total * (1.0 + wb_ratio)
        l2 = l2_energy(eparams, est_hits, est_total, time_s, c, total_colors, True)
        mem = memory_energy(eparams, mem_accesses, time_s)
        overhead = overhead_energy(eparams, stats.prof_accesses, time_s, 0)
        out.append(
            CandidateEstimate(c, est_load, est_total, cycles, time_s,
                              EnergyBreakdown.build(l2, mem, overhead, time_s))
        )
    return out


def select_candidate(candidates: Sequence[CandidateEstimate]) -> CandidateEstimate:
    """Cheapest candidate by projected energy; ties go to fewer colors."""
    best = candidates[0]
    for cand in candidates[1:]:
        if cand.energy.total < best.energy.total:
            best = cand
    return best


@dataclass(frozen=True)
class IntervalDecision:
    gain: float
    space: list[int]
    candidates: list[CandidateEstimate]
    chosen: CandidateEstimate
    reconfig: ReconfigReport


class Controller:
    def __init__(
        self,
        geom: CacheGeometry,
        cfg: ControllerConfig,
        tparams: TimingParams,
        eparams: EnergyParams,
    ) -> None:
        n = geom.colors
        floor = n // 16  # estimates below the lowest profiled level are undefined
        min_colors = cfg.min_colors if cfg.min_colors is not None else floor
        if not floor <= min_colors <= n:
            raise ValueError(f"min_colors must lie in [{floor}, {n}], the profiled range")
        if cfg.initial_colors is not None and not min_colors <= cfg.initial_colors <= n:
            raise ValueError(f"initial_colors must lie in [{min_colors}, {n}]")
        self.geom = geom
        self.cfg = cfg
        self.tparams = tparams
        self.eparams = eparams
        self.min_colors = min_colors
        self.last_ppm: float | None = None  # carried across intervals with no load misses

    def end_interval(self, cache: ColoredCache, prof: ProfilingCache) -> IntervalDecision:
        """Decide and apply the next color count at an interval boundary.

        Mutates the interval stats: flush writebacks and power transitions
        from the reconfiguration are charged to the interval being closed.
        The profiler is reset for the next interval.
        """
        stats = cache.stats
        gain = prof.marginal_gain(cache.active_colors)
        space = build_config_space(cache.active_colors, gain, self.geom.colors, self.min_colors, self.cfg)
        fallback = self.last_ppm if self.last_ppm is not None else self.tparams.default_ppm
        candidates = evaluate_candidates(space, stats, prof, self.geom.colors, self.eparams, fallback)
        chosen = select_candidate(candidates)
        if stats.load_misses > 0:
            self.last_ppm = stats.stall_cycles / stats.load_misses
        reconfig = cache.reconfigure(chosen.colors)
        prof.reset()
        return IntervalDecision(gain, list(space), candidates, chosen, reconfig)
