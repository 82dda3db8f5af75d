"""Color-partitioned set-associative cache with power-gated resizing.

The sets are grouped into colors, one page worth of sets per color, and a
physical address picks its color through a region→color mapping table.
Shrinking the active color count powers whole colors down (flushing their
contents); growing powers them back up.  Because the mapping table changes
with the active count, any surviving line whose home set moved is flushed
as well — a line's tag stores its full block address, so its home set can
always be recomputed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .timing import IntervalStats
from .workload import LOAD, STORE


def _is_pow2(value: int) -> bool:
    return value > 0 and (value & (value - 1)) == 0


@dataclass(frozen=True)
class CacheGeometry:
    sets: int = 4096
    ways: int = 8
    block_size: int = 64
    page_size: int = 4096
    tag_bits: int = 40

    def __post_init__(self) -> None:
        for name in ("sets", "ways", "block_size", "page_size"):
            if not _is_pow2(getattr(self, name)):
                raise ValueError(f"{name} must be a power of two, got {getattr(self, name)}")
        if self.page_size < self.block_size:
            raise ValueError("page_size must be at least block_size")
        if self.sets * self.block_size < self.page_size:
            raise ValueError("one way must span at least one page")
        if self.tag_bits <= 0:
            raise ValueError("tag_bits must be positive")

    @property
    def colors(self) -> int:
        return (self.sets * self.block_size) // self.page_size

    @property
    def sets_per_color(self) -> int:
        return self.page_size // self.block_size

    @property
    def block_shift(self) -> int:
        return self.block_size.bit_length() - 1

    @property
    def page_shift(self) -> int:
        return self.page_size.bit_length() - 1

    @property
    def size_bytes(self) -> int:
        return self.sets * self.ways * self.block_size

    @property
    def total_lines(self) -> int:
        return self.sets * self.ways


def region_of(addr: int, geom: CacheGeometry) -> int:
    """Page-granular region of an address; regions cycle through the colors."""
    return (addr >> geom.page_shift) & (geom.colors - 1)


class CacheLine:
    __slots__ = ("valid", "tag", "dirty", "powered")

    def __init__(self) -> None:
        self.valid = False
        self.tag = -1  # full block address when valid
        self.dirty = False
        self.powered = True


class AccessOutcome(NamedTuple):
    hit: bool
    writeback: bool
    powered_on: bool
    set_index: int
    way: int


@dataclass(frozen=True)
class ReconfigReport:
    old_colors: int
    new_colors: int
    flushed: int
    writebacks: int
    transitions: int


class ColoredCache:
    """LRU cache whose active color count can change between intervals.

    All counter updates (hits, misses, writebacks, memory traffic, power
    transitions, flushed lines) land in the ``IntervalStats`` passed in,
    so the caller owns interval boundaries.
    """

    def __init__(
        self,
        geom: CacheGeometry,
        stats: IntervalStats,
        active_colors: int | None = None,
        min_active: int = 1,
        charge_flush_writebacks: bool = True,
    ) -> None:
        n = geom.colors
        if active_colors is None:
            active_colors = n
        if not 1 <= min_active <= n:
            raise ValueError(f"min_active must lie in [1, {n}]")
        if not min_active <= active_colors <= n:
            raise ValueError(f"active_colors must lie in [{min_active}, {n}]")
        self.geom = geom
        self.stats = stats
        self.active_colors = active_colors
        self.min_active = min_active
        self.charge_flush_writebacks = charge_flush_writebacks
        self.transition_count = 0  # cumulative power transitions across the run
        self._block_shift = geom.block_shift
        self._page_shift = geom.page_shift
        self._region_mask = n - 1
        self._spc = geom.sets_per_color
        self._within_mask = self._spc - 1
        self._ways = geom.ways
        self.mapping = [r % active_colors for r in range(n)]
        self.lines = [[CacheLine() for _ in range(geom.ways)] for _ in range(geom.sets)]
        self._order = [list(range(geom.ways)) for _ in range(geom.sets)]  # LRU first
        # colors beyond the initial active count start gated, at no
        # transition cost: the run begins in that state
        for s in range(active_colors * self._spc, geom.sets):
            for line in self.lines[s]:
                line.powered = False

    def set_index(self, addr: int) -> int:
        color = self.mapping[(addr >> self._page_shift) & self._region_mask]
        return color * self._spc + ((addr >> self._block_shift) & self._within_mask)

    def contains(self, addr: int) -> bool:
        """Presence probe that does not touch LRU or counters."""
        block = addr >> self._block_shift
        return any(ln.valid and ln.tag == block for ln in self.lines[self.set_index(addr)])

    def active_ratio(self) -> float:
        """Powered fraction of the array under whole-color gating."""
        return self.active_colors / self.geom.colors

    def _home_set(self, block: int) -> int:
        region = (block >> (self._page_shift - self._block_shift)) & self._region_mask
        return self.mapping[region] * self._spc + (block & self._within_mask)

    def access(self, addr: int, kind: int) -> AccessOutcome:
        color = self.mapping[(addr >> self._page_shift) & self._region_mask]
        sidx = color * self._spc + ((addr >> self._block_shift) & self._within_mask)
        block = addr >> self._block_shift
        lines = self.lines[sidx]
        order = self._order[sidx]
        stats = self.stats
        for w in reversed(order):
            line = lines[w]
            if line.valid and line.tag == block:
                if order[-1] != w:
                    order.remove(w)
                    order.append(w)
                if kind == STORE:
                    line.dirty = True
                stats.l2_hits += 1
                return AccessOutcome(True, False, False, sidx, w)
        # miss: fill an invalid way if one exists, else evict the LRU way
        victim = -1
        for w in order:
            if not lines[w].valid:
                victim = w
                break
        if victim < 0:
            victim = order[0]
        line = lines[victim]
        writeback = line.valid and line.dirty
        powered_on = not line.powered
        stats.l2_misses += 1
        if kind == LOAD:
            stats.load_misses += 1
        stats.mem_accesses += 1
        if writeback:
            stats.writebacks += 1
            stats.mem_accesses += 1
        if powered_on:
            line.powered = True
            self.transition_count += 1
            stats.transitions += 1
        line.valid = True
        line.tag = block
        line.dirty = kind == STORE
        if order[-1] != victim:
            order.remove(victim)
            order.append(victim)
        return AccessOutcome(False, writeback, powered_on, sidx, victim)

    def _flush_line(self, line: CacheLine) -> bool:
        """Invalidate one valid line; returns True when it was dirty."""
        dirty = line.dirty
        line.valid = False
        line.dirty = False
        line.tag = -1
        return dirty

    def reconfigure(self, new_colors: int) -> ReconfigReport:
        """Change the active color count, gating or waking whole colors.

        Shrinking flushes everything in the colors being gated (dirty
        lines write back).  Afterwards the mapping table is rebuilt and
        any line whose region now maps elsewhere is flushed too — it
        would be unreachable, and a later re-fetch to the new home set
        must not find a stale twin.
        """
        if not self.min_active <= new_colors <= self.geom.colors:
            raise ValueError(
                f"new_colors must lie in [{self.min_active}, {self.geom.colors}], got {new_colors}"
            )
        old = self.active_colors
        if new_colors == old:
            return ReconfigReport(old, old, 0, 0, 0)
        stats = self.stats
        spc = self._spc
        flushed = writebacks = transitions = 0
        if new_colors < old:
            for s in range(new_colors * spc, old * spc):
                for line in self.lines[s]:
                    if line.valid:
                        flushed += 1
                        if self._flush_line(line):
                            writebacks += 1
                    if line.powered:
                        line.powered = False
                        transitions += 1
        else:
            for s in range(old * spc, new_colors * spc):
                for line in self.lines[s]:
                    if not line.powered:
                        line.powered = True
                        transitions += 1
        self.active_colors = new_colors
        mapping = self.mapping
        for r in range(len(mapping)):
            mapping[r] = r % new_colors
        for s in range(min(old, new_colors) * spc):
            for line in self.lines[s]:
                if line.valid and self._home_set(line.tag) != s:
                    flushed += 1
                    if self._flush_line(line):
                        writebacks += 1
        self.transition_count += transitions
        stats.transitions += transitions
        stats.flushed_lines += flushed
        stats.writebacks += writebacks
        if self.charge_flush_writebacks:
            stats.mem_accesses += writebacks
        return ReconfigReport(old, new_colors, flushed, writebacks, transitions)
