"""Set-sampled profiling cache: miss counts the cache would see at other sizes.

Six tag-only shadow caches profile the color counts {1,2,4,8,12,16}/16 of
the full count in parallel.  Each shadow level keeps only every R-th set
frame of a color (the within-color set index must be divisible by the
sampling ratio R), so its counters undercount by roughly R and estimates
scale them back up.  Between profiled levels, miss counts are interpolated
linearly.
"""

from __future__ import annotations

from .cache import CacheGeometry
from .workload import LOAD

# Profiled color counts as sixteenths of the full color count.
PROFILE_FRACTIONS = (1, 2, 4, 8, 12, 16)


class ProfilingPoint:
    """Tag-only LRU shadow cache for one profiled color count."""

    __slots__ = ("colors", "load_misses", "total_misses", "accesses", "sets")

    def __init__(self, colors: int, n_sets: int) -> None:
        self.colors = colors
        self.load_misses = 0
        self.total_misses = 0
        self.accesses = 0
        self.sets: list[list[int]] = [[] for _ in range(n_sets)]


class ProfilingCache:
    def __init__(self, geom: CacheGeometry, sampling_ratio: int = 64) -> None:
        if geom.colors % 16:
            raise ValueError("profiling needs a color count divisible by 16")
        if sampling_ratio < 1 or geom.sets_per_color % sampling_ratio:
            raise ValueError(
                f"sampling ratio must divide the {geom.sets_per_color} sets of one color"
            )
        self.geom = geom
        self.ratio = sampling_ratio
        self._block_shift = geom.block_shift
        self._page_shift = geom.page_shift
        self._region_mask = geom.colors - 1
        self._within_mask = geom.sets_per_color - 1
        self._ways = geom.ways
        self._frames = geom.sets_per_color // sampling_ratio  # sampled frames per color
        self.points = tuple(
            ProfilingPoint(geom.colors * f // 16, (geom.colors * f // 16) * self._frames)
            for f in PROFILE_FRACTIONS
        )

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(pt.colors for pt in self.points)

    @property
    def total_sets(self) -> int:
        """Sampled set frames across all levels."""
        return sum(pt.colors * self._frames for pt in self.points)

    def profile_access(self, addr: int, kind: int) -> int:
        """Feed one access; returns the number of shadow lookups performed.

        Addresses whose within-color set index is not a multiple of the
        sampling ratio are skipped entirely (return 0); sampled ones hit
        every level (return 6).
        """
        within = (addr >> self._block_shift) & self._within_mask
        if within % self.ratio:
            return 0
        region = (addr >> self._page_shift) & self._region_mask
        slot = within // self.ratio
        block = addr >> self._block_shift
        frames = self._frames
        ways = self._ways
        is_load = kind == LOAD
        looked = 0
        for pt in self.points:
            lru = pt.sets[(region % pt.colors) * frames + slot]
            if block in lru:
                if lru[-1] != block:
                    lru.remove(block)
                    lru.append(block)
            else:
                pt.total_misses += 1
                if is_load:
                    pt.load_misses += 1
                if len(lru) >= ways:
                    del lru[0]
                lru.append(block)
            pt.accesses += 1
            looked += 1
        return looked

    def _estimate(self, colors: int, attr: str) -> float:
        pts = self.points
        if not pts[0].colors <= colors <= pts[-1].colors:
            raise ValueError(
                f"color count {colors} outside the profiled range [{pts[0].colors}, {pts[-1].colors}]"
            )
        prev = pts[0]
        for pt in pts:
            if colors == pt.colors:
                return getattr(pt, attr) * self.ratio
            if colors < pt.colors:
                lo_v = getattr(prev, attr) * self.ratio
                hi_v = getattr(pt, attr) * self.ratio
                frac = (colors - prev.colors) / (pt.colors - prev.colors)
                return lo_v + frac * (hi_v - lo_v)
            prev = pt
        raise AssertionError("unreachable")

    def estimated_load_misses(self, colors: int) -> float:
        """Scaled load-miss estimate at ``colors``, exact at profiled levels."""
        return self._estimate(colors, "load_misses")

    def estimated_total_misses(self, colors: int) -> float:
        return self._estimate(colors, "total_misses")

    def marginal_gain(self, colors: int) -> float:
        """Load misses avoided per color added, on the enclosing segment.

        Interior color counts use the segment to their right; the full
        count (top of the range) uses the segment to its left.
        """
        pts = self.points
        if not pts[0].colors <= colors <= pts[-1].colors:
            raise ValueError(
                f"color count {colors} outside the profiled range [{pts[0].colors}, {pts[-1].colors}]"
            )
        if colors == pts[-1].colors:
            lo, hi = pts[-2], pts[-1]
        else:
            lo, hi = pts[0], pts[1]
            for i in range(len(pts) - 1):
                if pts[i].colors <= colors < pts[i + 1].colors:
                    lo, hi = pts[i], pts[i + 1]
                    break
        return (lo.load_misses - hi.load_misses) * self.ratio / (hi.colors - lo.colors)

    def reset(self) -> None:
        """Zero all counters and empty every shadow set."""
        for pt in self.points:
            pt.load_misses = 0
            pt.total_misses = 0
            pt.accesses = 0
            for lru in pt.sets:
                lru.clear()


def storage_overhead(sampling_ratio: int, tag_bits: int, block_size: int) -> float:
    """Fraction of main-cache storage the shadow tag arrays add.

    The six levels together hold 43/16 of one way's worth of sampled tag
    frames, compared against data plus tag bits per main-cache line.
    """
    return 43.0 * tag_bits / (16.0 * sampling_ratio * (8.0 * block_size + tag_bits))
