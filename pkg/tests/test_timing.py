import pytest
from hypothesis import given, strategies as st

from colorcache.cache import AccessOutcome
from colorcache.timing import IntervalStats, TimingParams, advance, estimate_cycles, ppm
from colorcache.workload import LOAD, STORE, TraceRecord

HIT = AccessOutcome(True, False, False, 0, 0)
MISS = AccessOutcome(False, False, False, 0, 0)


def test_instructions_only():
    stats = IntervalStats()
    advance(stats, TraceRecord(LOAD, 0, 100), None, TimingParams())
    assert stats.base_cycles == 100.0
    assert stats.stall_cycles == 0.0
    assert stats.instructions == 100


def test_load_miss_stalls_by_penalty():
    stats = IntervalStats()
    advance(stats, TraceRecord(LOAD, 0, 0), MISS, TimingParams())
    assert stats.stall_cycles == 90.0
    assert stats.base_cycles == 18.0  # the lookup itself still takes the hit latency


def test_store_miss_does_not_stall():
    stats = IntervalStats()
    advance(stats, TraceRecord(STORE, 0, 10), MISS, TimingParams())
    assert stats.stall_cycles == 0.0
    assert stats.base_cycles == 10.0 + 18.0


def test_hit_pays_latency_only():
    stats = IntervalStats()
    advance(stats, TraceRecord(LOAD, 0, 10), HIT, TimingParams())
    assert stats.base_cycles == 28.0
    assert stats.stall_cycles == 0.0


def test_overlap_scales_the_stall():
    stats = IntervalStats()
    advance(stats, TraceRecord(LOAD, 0, 0), MISS, TimingParams(overlap=0.5))
    assert stats.stall_cycles == 45.0


def test_ppm_values():
    assert ppm(IntervalStats(stall_cycles=5000.0, load_misses=50), 90.0) == 100.0
    assert ppm(IntervalStats(stall_cycles=0.0, load_misses=10), 90.0) == 0.0
    # no load misses -> the caller-supplied fallback
    assert ppm(IntervalStats(), 77.0) == 77.0


def test_ppm_scale_invariance():
    a = IntervalStats(stall_cycles=1234.0, load_misses=7)
    b = IntervalStats(stall_cycles=2468.0, load_misses=14)
    assert ppm(a, 0.0) == ppm(b, 0.0)


def test_estimate_cycles_hand_values():
    stats = IntervalStats(base_cycles=1e6, stall_cycles=123456.0, load_misses=1000)
    assert estimate_cycles(stats, 0, 90.0) == 1e6
    stats2 = IntervalStats(base_cycles=1e6, stall_cycles=100.0 * 500, load_misses=500)
    assert estimate_cycles(stats2, 2000, 90.0) == 1.2e6


@given(
    base=st.floats(min_value=0, max_value=1e12),
    stall=st.floats(min_value=0, max_value=1e12),
    misses=st.integers(min_value=0, max_value=10**9),
)
def test_estimate_cycles_self_consistency(base, stall, misses):
    # at the measured miss count the projection is the measurement, exactly
    stats = IntervalStats(base_cycles=base, stall_cycles=stall if misses else 0.0, load_misses=misses)
    assert estimate_cycles(stats, stats.load_misses, 90.0) == stats.base_cycles + stats.stall_cycles


def test_snapshot_is_independent_and_reset_clears():
    stats = IntervalStats()
    advance(stats, TraceRecord(LOAD, 0, 5), MISS, TimingParams())
    snap = stats.snapshot()
    stats.reset()
    assert snap.instructions == 5 and snap.stall_cycles == 90.0
    assert stats == IntervalStats()
    assert stats.total_cycles == 0.0


def test_params_validation():
    with pytest.raises(ValueError):
        TimingParams(base_cpi=0)
    with pytest.raises(ValueError):
        TimingParams(overlap=0.0)
    with pytest.raises(ValueError):
        TimingParams(overlap=1.5)
    with pytest.raises(ValueError):
        TimingParams(mem_penalty=-1)
    assert TimingParams(overlap=0.8).default_ppm == pytest.approx(72.0)
