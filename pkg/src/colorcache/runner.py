"""Drives a workload through one power policy and emits a run report.

Three policies share the same cache, timing, and energy machinery:

* ``baseline`` — fixed full-size cache, no gating hardware, no surcharge.
* ``dct``      — full-size cache with per-line idle decay.
* ``ours``     — the resizable cache with profiler-guided interval control.

Intervals close when the instruction quota fills, at every task switch,
and at the end of the run.  A task switch also restarts the profiler or
the decay idle clocks; the active cache size is deliberately carried
across switches.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterator

from .cache import ColoredCache
from .config import POLICIES, RunConfig, TaskSpec
from .controller import Controller
from .decay import DecayCache
from .energy import EnergyBreakdown, l2_energy, memory_energy, overhead_energy
from .profiler import ProfilingCache
from .report import IntervalRecord, RunReport
from .timing import IntervalStats, advance
from .workload import (
    ADDRESS_BITS,
    SyntheticParams,
    TraceRecord,
    build_schedule,
    gen_synthetic,
    parse_trace,
)


@dataclass
class _TaskState:
    task_id: str
    tag_base: int
    it: Iterator[TraceRecord]
    consumed: int = 0  # instructions executed so far
    done: bool = False


def _task_source(spec: TaskSpec) -> tuple[Iterator[TraceRecord], dict]:
    if spec.trace is not None:
        return parse_trace(spec.trace, spec.format), {"trace": spec.trace, "format": spec.format}
    params = SyntheticParams(
        length=spec.length,
        working_set=spec.working_set,
        stride=spec.stride,
        instr_per_access=spec.instr_per_access,
        store_fraction=spec.store_fraction,
        phase_length=spec.phase_length,
    )
    source = {
        "kind": spec.kind,
        "length": spec.length,
        "working_set": spec.working_set,
        "stride": spec.stride,
        "instr_per_access": spec.instr_per_access,
        "store_fraction": spec.store_fraction,
        "phase_length": spec.phase_length,
        "seed": spec.seed,
    }
    return iter(gen_synthetic(spec.kind, params, spec.seed)), source


def _json_safe(value: float) -> float | str:
    return value if math.isfinite(value) else "inf"


class Simulation:
    def __init__(self, cfg: RunConfig, policy: str) -> None:
        if policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}, got {policy!r}")
        self.cfg = cfg
        self.policy = policy
        self.geom = cfg.geometry
        self.stats = IntervalStats()
        self.area_penalty = policy != "baseline"
        self.prof: ProfilingCache | None = None
        self.controller: Controller | None = None
        self.decay: DecayCache | None = None
        initial = self.geom.colors
        min_active = 1
        if policy == "ours":
            self.controller = Controller(self.geom, cfg.controller, cfg.timing, cfg.energy)
            self.prof = ProfilingCache(self.geom, cfg.controller.sampling_ratio)
            min_active = self.controller.min_colors
            if cfg.controller.initial_colors is not None:
                initial = cfg.controller.initial_colors
        self.cache = ColoredCache(
            self.geom,
            self.stats,
            active_colors=initial,
            min_active=min_active,
            charge_flush_writebacks=cfg.charge_flush_writebacks,
        )
        if policy == "dct":
            self.decay = DecayCache(self.cache, cfg.decay.decay_interval, cfg.decay.period())
        self._closed_cycles = 0.0
        self._records: list[IntervalRecord] = []

    def _now(self) -> float:
        return self._closed_cycles + self.stats.base_cycles + self.stats.stall_cycles

    def _close_interval(self, task_id: str, decide: bool) -> None:
        stats = self.stats
        if stats.instructions == 0 and stats.accesses == 0:
            return
        colors_during = self.cache.active_colors
        decision = None
        if decide and self.controller is not None:
            # reconfiguration costs (flush writebacks, transitions) are
            # charged to the interval being closed
            decision = self.controller.end_interval(self.cache, self.prof)
        snap = stats.snapshot()
        cycles = snap.base_cycles + snap.stall_cycles
        eparams = self.cfg.energy
        time_s = cycles / eparams.clock_hz
        now = self._closed_cycles + cycles
        if self.decay is not None:
            ratio = self.decay.interval_active_ratio(now, cycles)
        else:
            ratio = colors_during / self.geom.colors
        prof_time = time_s if self.prof is not None else 0.0
        l2 = l2_energy(eparams, snap.l2_hits, snap.l2_misses, time_s, ratio, 1.0, self.area_penalty)
        mem = memory_energy(eparams, snap.mem_accesses, time_s)
        overhead = overhead_energy(eparams, snap.prof_accesses, prof_time, snap.transitions)
        breakdown = EnergyBreakdown.build(l2, mem, overhead, time_s)
        self._records.append(
            IntervalRecord(
                index=len(self._records),
                task_id=task_id,
                active_colors=colors_during,
                active_ratio=ratio,
                instructions=snap.instructions,
                base_cycles=snap.base_cycles,
                stall_cycles=snap.stall_cycles,
                cycles=cycles,
                time_s=time_s,
                prof_time_s=prof_time,
                l2_hits=snap.l2_hits,
                l2_misses=snap.l2_misses,
                load_misses=snap.load_misses,
                writebacks=snap.writebacks,
                mem_accesses=snap.mem_accesses,
                prof_accesses=snap.prof_accesses,
                transitions=snap.transitions,
                flushed_lines=snap.flushed_lines,
                ppm=snap.stall_cycles / snap.load_misses if snap.load_misses else None,
                energy_l2=breakdown.l2,
                energy_mem=breakdown.memory,
                energy_overhead=breakdown.overhead,
                energy_total=breakdown.total,
                edp=breakdown.edp,
                gain=decision.gain if decision else None,
                config_space=decision.space if decision else None,
                chosen_colors=decision.chosen.colors if decision else None,
            )
        )
        self._closed_cycles += cycles
        stats.reset()

    def _run_segment(self, state: _TaskState, end: int) -> None:
        stats = self.stats
        cache = self.cache
        prof = self.prof
        decay = self.decay
        tparams = self.cfg.timing
        interval_len = self.cfg.controller.interval_length
        it = state.it
        bound = 1 << ADDRESS_BITS
        while state.consumed < end:
            rec = next(it, None)
            if rec is None:
                state.done = True
                return
            if rec.addr >= bound:
                raise ValueError(
                    f"task {state.task_id!r}: address {rec.addr:#x} does not fit below bit {ADDRESS_BITS}"
                )
            addr = state.tag_base | rec.addr
            if decay is not None:
                out = decay.access(addr, rec.kind, self._now())
            else:
                out = cache.access(addr, rec.kind)
            if prof is not None:
                stats.prof_accesses += prof.profile_access(addr, rec.kind)
            advance(stats, rec, out, tparams)
            state.consumed += rec.instr_delta
            if stats.instructions >= interval_len:
                self._close_interval(state.task_id, decide=True)
            if decay is not None and decay.due(self._now()):
                decay.sweep(self._now())

    def run(self) -> RunReport:
        cfg = self.cfg
        scale = cfg.workload.scale
        states: list[_TaskState] = []
        task_echo = []
        budgets = []
        for idx, spec in enumerate(cfg.workload.tasks):
            source_it, source = _task_source(spec)
            budget = max(1, round(spec.budget * scale))
            budgets.append(budget)
            states.append(_TaskState(spec.id, idx << ADDRESS_BITS, source_it))
            task_echo.append({"id": spec.id, "budget": budget, "source": source})
        points = [max(1, round(p * scale)) for p in cfg.workload.preempt_points]
        segments = build_schedule(budgets, points)
        switches = 0
        last_task = states[segments[0].task_index].task_id
        for seg_no, seg in enumerate(segments):
            state = states[seg.task_index]
            last_task = state.task_id
            if not state.done:
                self._run_segment(state, seg.end)
            if seg_no < len(segments) - 1:
                switches += 1
                self._close_interval(state.task_id, decide=False)
                if self.prof is not None:
                    self.prof.reset()
                if self.decay is not None:
                    self.decay.reset(self._now())
        self._close_interval(last_task, decide=False)
        return self._build_report(task_echo, points, scale, switches)

    def _build_report(self, task_echo: list, points: list[int], scale: float, switches: int) -> RunReport:
        records = self._records
        totals = {
            "instructions": sum(r.instructions for r in records),
            "cycles": 0.0,
            "time_s": 0.0,
            "l2_hits": sum(r.l2_hits for r in records),
            "l2_misses": sum(r.l2_misses for r in records),
            "load_misses": sum(r.load_misses for r in records),
            "writebacks": sum(r.writebacks for r in records),
            "mem_accesses": sum(r.mem_accesses for r in records),
            "prof_accesses": sum(r.prof_accesses for r in records),
            "transitions": sum(r.transitions for r in records),
            "flushed_lines": sum(r.flushed_lines for r in records),
        }
        sum_l2 = sum_mem = sum_overhead = 0.0
        sum_cycles = sum_time = 0.0
        for r in records:
            sum_l2 += r.energy_l2
            sum_mem += r.energy_mem
            sum_overhead += r.energy_overhead
            sum_cycles += r.cycles
            sum_time += r.time_s
        totals["cycles"] = sum_cycles
        totals["time_s"] = sum_time
        grand = sum_l2 + sum_mem + sum_overhead
        energy = {
            "l2": sum_l2,
            "memory": sum_mem,
            "overhead": sum_overhead,
            "total": grand,
            "edp": grand * sum_time,
        }
        geom = self.geom
        geometry = {
            "sets": geom.sets,
            "ways": geom.ways,
            "block_size": geom.block_size,
            "page_size": geom.page_size,
            "tag_bits": geom.tag_bits,
            "colors": geom.colors,
            "sets_per_color": geom.sets_per_color,
        }
        controller_echo = None
        if self.controller is not None:
            c = self.cfg.controller
            controller_echo = {
                "interval_length": c.interval_length,
                "granularity": c.granularity,
                "gain_threshold": c.gain_threshold,
                "max_candidates": c.max_candidates,
                "min_colors": self.controller.min_colors,
                "sampling_ratio": c.sampling_ratio,
                "initial_colors": c.initial_colors if c.initial_colors is not None else geom.colors,
            }
        decay_echo = None
        if self.decay is not None:
            decay_echo = {
                "decay_interval": _json_safe(self.decay.decay_interval),
                "sweep_period": _json_safe(self.decay.sweep_period),
            }
        return RunReport(
            policy=self.policy,
            geometry=geometry,
            timing=asdict(self.cfg.timing),
            energy_params=asdict(self.cfg.energy),
            controller=controller_echo,
            decay=decay_echo,
            workload={"tasks": task_echo, "preempt_points": points, "scale": scale},
            area_penalty_applied=self.area_penalty,
            intervals=records,
            totals=totals,
            energy=energy,
            final_colors=self.cache.active_colors,
            task_switches=switches,
        )


def run_config(cfg: RunConfig, policy: str) -> RunReport:
    return Simulation(cfg, policy).run()
