"""Energy accounting: cache, memory, and management-overhead components.

Each component is dynamic energy per event plus leakage power over time.
Cache leakage scales with the powered fraction of the array; resizable
policies carry a fixed leakage surcharge for the extra control area.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EnergyParams:
    e_dyn_l2: float = 1.086e-9  # J per cache access (a miss costs two)
    p_leak_l2: float = 2.016  # W, fully powered array
    e_dyn_mem: float = 70e-9  # J per memory access
    p_leak_mem: float = 0.18  # W
    e_dyn_prof: float = 0.005e-9  # J per profiling-tag lookup
    p_leak_prof: float = 0.007  # W
    e_transition: float = 0.002e-9  # J per line power transition
    area_leak_penalty: float = 0.05  # leakage surcharge for gating support
    clock_hz: float = 1.5e9

    def __post_init__(self) -> None:
        for name in (
            "e_dyn_l2",
            "p_leak_l2",
            "e_dyn_mem",
            "p_leak_mem",
            "e_dyn_prof",
            "p_leak_prof",
            "e_transition",
            "area_leak_penalty",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.clock_hz <= 0:
            raise ValueError("clock_hz must be positive")


def l2_energy(
    params: EnergyParams,
    hits: float,
    misses: float,
    time_s: float,
    active_colors: float,
    total_colors: float,
    area_penalty: bool,
) -> float:
    """Cache energy: per-access dynamic cost plus leakage on the powered part.

    A hit reads the array once, a miss pays twice (lookup plus fill).
    ``active_colors / total_colors`` is the powered fraction; callers with
    a fractional powered area can pass it directly as ``(fraction, 1)``.
    """
    leak = params.p_leak_l2
    if area_penalty:
        leak = leak * (1.0 + params.area_leak_penalty)
    ratio = active_colors / total_colors
    return params.e_dyn_l2 * (hits + 2.0 * misses) + leak * time_s * ratio


def memory_energy(params: EnergyParams, accesses: float, time_s: float) -> float:
    return params.e_dyn_mem * accesses + params.p_leak_mem * time_s


def overhead_energy(params: EnergyParams, prof_accesses: float, prof_time_s: float, transitions: float) -> float:
    """Cost of running the resizing machinery itself.

    Profiling-tag lookups and profiler leakage apply only to the adaptive
    policy (pass zeros otherwise); line power transitions apply to any
    policy that gates lines.
    """
    return (
        params.e_dyn_prof * prof_accesses
        + params.p_leak_prof * prof_time_s
        + params.e_transition * transitions
    )


def edp(total_energy: float, time_s: float) -> float:
    return total_energy * time_s


@dataclass(frozen=True)
class EnergyBreakdown:
    l2: float
    memory: float
    overhead: float
    total: float
    edp: float

    @classmethod
    def build(cls, l2: float, memory: float, overhead: float, time_s: float) -> "EnergyBreakdown":
        total = l2 + memory + overhead
        return cls(l2, memory, overhead, total, total * time_s)
