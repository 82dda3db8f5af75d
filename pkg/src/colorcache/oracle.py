"""Independent reference results used to cross-check the simulator.

Everything here is written from scratch against the plain definitions —
a textbook set-associative LRU simulator and a literal transcription of
the energy formulas — without calling into the simulator modules, so
tests can hold the two sides against each other.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .cache import CacheGeometry
from .workload import LOAD, TraceRecord


def exact_misses_many(
    records: Sequence[TraceRecord],
    geom: CacheGeometry,
    colors_list: Iterable[int],
) -> dict[int, tuple[int, int]]:
    """Exact (load_misses, total_misses) at each active color count.

    Simulates a plain LRU cache of ``c`` colors for every requested ``c``,
    with the canonical region→color reduction (region mod c).  No
    sampling, no power state — just membership and eviction.
    """
    bshift = geom.block_shift
    pshift = geom.page_shift
    rmask = geom.colors - 1
    wmask = geom.sets_per_color - 1
    spc = geom.sets_per_color
    ways = geom.ways
    results: dict[int, tuple[int, int]] = {}
    for c in colors_list:
        if not 1 <= c <= geom.colors:
            raise ValueError(f"color count {c} outside [1, {geom.colors}]")
        sets: list[list[int]] = [[] for _ in range(c * spc)]
        load_misses = 0
        total_misses = 0
        for kind, addr, _delta in records:
            block = addr >> bshift
            idx = (((addr >> pshift) & rmask) % c) * spc + (block & wmask)
            lru = sets[idx]
            if block in lru:
                if lru[-1] != block:
                    lru.remove(block)
                    lru.append(block)
            else:
                total_misses += 1
                if kind == LOAD:
                    load_misses += 1
                if len(lru) >= ways:
                    del lru[0]
                lru.append(block)
        results[c] = (load_misses, total_misses)
    return results


def exact_misses(records: Sequence[TraceRecord], geom: CacheGeometry, colors: int) -> tuple[int, int]:
    return exact_misses_many(records, geom, [colors])[colors]


def exact_energy(report: dict) -> dict:
    """Recompute every energy figure in a run report from its raw counters.

    Reads only plain data out of the report dict (counters, times, the
    echoed parameters) and applies the energy formulas directly, keeping
    the same accumulation order the simulator uses, so an exact float
    comparison is meaningful.
    """
    p = report["energy_params"]
    penalized = report["area_penalty_applied"]
    leak_l2 = p["p_leak_l2"] * (1.0 + p["area_leak_penalty"]) if penalized else p["p_leak_l2"]
    intervals = []
    sum_l2 = 0.0
    sum_mem = 0.0
    sum_overhead = 0.0
    sum_time = 0.0
    for iv in report["intervals"]:
        t = iv["time_s"]
        l2 = p["e_dyn_l2"] * (iv["l2_hits"] + 2.0 * iv["l2_misses"]) + leak_l2 * t * iv["active_ratio"]
        mem = p["e_dyn_mem"] * iv["mem_accesses"] + p["p_leak_mem"] * t
        overhead = (
            p["e_dyn_prof"] * iv["prof_accesses"]
            + p["p_leak_prof"] * iv["prof_time_s"]
            + p["e_transition"] * iv["transitions"]
        )
        total = l2 + mem + overhead
        intervals.append(
            {
                "energy_l2": l2,
                "energy_mem": mem,
                "energy_overhead": overhead,
                "energy_total": total,
                "edp": total * t,
            }
        )
        sum_l2 += l2
        sum_mem += mem
        sum_overhead += overhead
        sum_time += t
    grand = sum_l2 + sum_mem + sum_overhead
    return {
        "intervals": intervals,
        "energy": {
            "l2": sum_l2,
            "memory": sum_mem,
            "overhead": sum_overhead,
            "total": grand,
            "edp": grand * sum_time,
        },
    }
