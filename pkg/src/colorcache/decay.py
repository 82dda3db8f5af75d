"""Idle-decay power gating: the per-line baseline the resizer is compared to.

Every line remembers when it was last touched.  A periodic sweep powers
off (and flushes) any line that has sat idle for the decay interval —
data and tag both, so a decayed line is simply gone.  A later fill to
that frame powers it back on.  Leakage follows the time-weighted powered
fraction of the array, which this wrapper tracks exactly between interval
boundaries.
"""

from __future__ import annotations

import math

from .cache import AccessOutcome, ColoredCache


class DecayCache:
    def __init__(
        self,
        cache: ColoredCache,
        decay_interval: float = 6.4e6,
        sweep_period: float | None = None,
        record_events: bool = False,
    ) -> None:
        if not decay_interval > 0:
            raise ValueError("decay_interval must be positive (math.inf disables decay)")
        if sweep_period is not None and not sweep_period > 0:
            raise ValueError("sweep_period must be positive")
        self.cache = cache
        self.decay_interval = float(decay_interval)
        if sweep_period is not None:
            self.sweep_period = float(sweep_period)
        elif math.isfinite(self.decay_interval):
            self.sweep_period = self.decay_interval / 4.0
        else:
            self.sweep_period = math.inf
        self._ways = cache.geom.ways
        total = cache.geom.total_lines
        self.last_access = [0.0] * total
        self.powered_count = sum(
            1 for lines in cache.lines for line in lines if line.powered
        )
        self.last_sweep = 0.0
        # time-weighted powered-line area since the last interval boundary
        self._area = 0.0
        self._last_event = 0.0
        self._varied = False  # any power transition since the last boundary
        self.events: list[tuple[str, int, int, float]] | None = [] if record_events else None

    def _accumulate(self, now: float) -> None:
        if now > self._last_event:
            self._area += (now - self._last_event) * self.powered_count
            self._last_event = now

    def access(self, addr: int, kind: int, now: float) -> AccessOutcome:
        out = self.cache.access(addr, kind)
        self.last_access[out.set_index * self._ways + out.way] = now
        if out.powered_on:
            self._accumulate(now)
            self.powered_count += 1
            self._varied = True
            if self.events is not None:
                self.events.append(("on", out.set_index, out.way, now))
        return out

    def due(self, now: float) -> bool:
        return now - self.last_sweep >= self.sweep_period

    def sweep(self, now: float) -> int:
        """Power off every line idle for at least the decay interval.

        Valid victims are flushed (dirty ones write back); invalid but
        powered frames decay too — idle tags leak just the same.
        """
        stats = self.cache.stats
        interval = self.decay_interval
        ways = self._ways
        last = self.last_access
        charge = self.cache.charge_flush_writebacks
        decayed = 0
        for sidx, lines in enumerate(self.cache.lines):
            base = sidx * ways
            for w in range(ways):
                line = lines[w]
                if line.powered and now - last[base + w] >= interval:
                    if line.valid:
                        if line.dirty:
                            stats.writebacks += 1
                            if charge:
                                stats.mem_accesses += 1
                        line.valid = False
                        line.dirty = False
                        line.tag = -1
                        stats.flushed_lines += 1
                    line.powered = False
                    decayed += 1
                    stats.transitions += 1
                    self.cache.transition_count += 1
                    if self.events is not None:
                        self.events.append(("off", sidx, w, now))
        if decayed:
            self._accumulate(now)
            self.powered_count -= decayed
            self._varied = True
        self.last_sweep = now
        return decayed

    def reset(self, now: float) -> None:
        """Restart every idle clock (task switch); power state is untouched."""
        self.last_access = [now] * len(self.last_access)

    def interval_active_ratio(self, now: float, interval_cycles: float) -> float:
        """Time-weighted powered fraction since the last boundary; resets it.

        An interval with no power transitions reports the constant fraction
        exactly, so a never-decaying run compares bit-for-bit against a
        fixed-size one.
        """
        total = len(self.last_access)
        if not self._varied or interval_cycles <= 0:
            ratio = self.powered_count / total
            self._last_event = now
        else:
            self._accumulate(now)
            ratio = self._area / (total * interval_cycles)
        self._area = 0.0
        self._varied = False
        return ratio
