"""Memory access traces and the multitask schedule that replays them.

A trace is a flat sequence of (kind, address, instruction-delta) records,
stored either as whitespace-separated text or as packed little-endian
binary.  Synthetic generators cover the usual microbenchmark shapes.  A
task wraps a trace with an instruction budget and a private address-space
tag so several tasks can share one cache without aliasing each other.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, NamedTuple, Sequence

LOAD = 0
STORE = 1

# Task tags are placed above bit 44, so raw trace addresses must fit below.
ADDRESS_BITS = 44

_KIND_CHARS = {LOAD: "L", STORE: "S"}
_CHAR_KINDS = {"L": LOAD, "S": STORE}

# One record: kind byte, 64-bit address, 32-bit instruction delta.
_RECORD = struct.Struct("<BQI")

SYNTHETIC_KINDS = ("sequential", "loop", "uniform", "mixed")


class TraceRecord(NamedTuple):
    kind: int
    addr: int
    instr_delta: int


class TraceFormatError(ValueError):
    """A trace file does not match the expected layout."""


def parse_text_trace(lines: Iterable[str], name: str = "<trace>") -> Iterator[TraceRecord]:
    """Parse lines of the form ``L|S <hex addr> <decimal delta>``.

    Blank lines and ``#`` comments are skipped.  Errors carry the line number.
    """
    for lineno, raw in enumerate(lines, start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 3:
            raise TraceFormatError(
                f"{name}:{lineno}: expected 'L|S <hex addr> <delta>', got {raw.strip()!r}"
            )
        kind = _CHAR_KINDS.get(parts[0].upper())
        if kind is None:
            raise TraceFormatError(f"{name}:{lineno}: unknown access kind {parts[0]!r}")
        try:
            addr = int(parts[1], 16)
            delta = int(parts[2], 10)
        except ValueError:
            raise TraceFormatError(f"{name}:{lineno}: bad address or delta in {raw.strip()!r}") from None
        if addr < 0 or delta < 0:
            raise TraceFormatError(f"{name}:{lineno}: address and delta must be non-negative")
        yield TraceRecord(kind, addr, delta)


def parse_binary_trace(stream: BinaryIO, name: str = "<trace>") -> Iterator[TraceRecord]:
    """Parse packed records (kind u8, address u64, delta u32, little-endian)."""
    size = _RECORD.size
    offset = 0
    buf = b""
    while True:
        chunk = stream.read(1 << 16)
        if not chunk:
            break
        buf += chunk
        whole = (len(buf) // size) * size
        for kind, addr, delta in _RECORD.iter_unpack(buf[:whole]):
            if kind > 1:
                raise TraceFormatError(f"{name}: offset {offset}: bad kind byte {kind}")
            yield TraceRecord(kind, addr, delta)
            offset += size
        buf = buf[whole:]
    if buf:
        raise TraceFormatError(
            f"{name}: offset {offset}: truncated record ({len(buf)} trailing bytes)"
        )


def trace_format_for(path: str | Path) -> str:
    return "binary" if Path(path).suffix == ".bin" else "text"


def parse_trace(path: str | Path, fmt: str = "auto") -> Iterator[TraceRecord]:
    if fmt == "auto":
        fmt = trace_format_for(path)
    if fmt == "binary":
        with open(path, "rb") as f:
            yield from parse_binary_trace(f, str(path))
    elif fmt == "text":
        with open(path, "r") as f:
            yield from parse_text_trace(f, str(path))
    else:
        raise ValueError(f"unknown trace format {fmt!r}")


def write_trace(records: Iterable[TraceRecord], path: str | Path, fmt: str = "auto") -> int:
    """Write records to ``path``; returns the record count."""
    if fmt == "auto":
        fmt = trace_format_for(path)
    count = 0
    if fmt == "binary":
        with open(path, "wb") as f:
            for kind, addr, delta in records:
                f.write(_RECORD.pack(kind, addr, delta))
                count += 1
    elif fmt == "text":
        with open(path, "w") as f:
            for kind, addr, delta in records:
                f.write(f"{_KIND_CHARS[kind]} {addr:x} {delta}\n")
                count += 1
    else:
        raise ValueError(f"unknown trace format {fmt!r}")
    return count


@dataclass
class SyntheticParams:
    length: int
    working_set: int = 1 << 20
    stride: int = 64
    instr_per_access: int = 10
    store_fraction: float = 0.0
    phase_length: int | None = None

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ValueError("length must be positive")
        if self.working_set <= 0 or self.stride <= 0:
            raise ValueError("working_set and stride must be positive")
        if self.instr_per_access < 0:
            raise ValueError("instr_per_access must be non-negative")
        if not 0.0 <= self.store_fraction <= 1.0:
            raise ValueError("store_fraction must lie in [0, 1]")
        if self.phase_length is not None and self.phase_length <= 0:
            raise ValueError("phase_length must be positive")


def gen_synthetic(kind: str, params: SyntheticParams, seed: int) -> list[TraceRecord]:
    """Generate a deterministic synthetic trace.

    ``sequential`` streams with no reuse, ``loop`` cycles over the working
    set, ``uniform`` samples blocks at random from it, and ``mixed``
    interleaves phases of the other three to create intra-task variation.
    """
    rng = random.Random(seed)
    sf = params.store_fraction
    stride = params.stride
    delta = params.instr_per_access
    n_blocks = max(1, params.working_set // stride)
    out: list[TraceRecord] = []
    append = out.append

    def pick_kind() -> int:
        return STORE if sf and rng.random() < sf else LOAD

    if kind == "sequential":
        for i in range(params.length):
            append(TraceRecord(pick_kind(), i * stride, delta))
    elif kind == "loop":
        for i in range(params.length):
            append(TraceRecord(pick_kind(), (i % n_blocks) * stride, delta))
    elif kind == "uniform":
        for _ in range(params.length):
            append(TraceRecord(pick_kind(), rng.randrange(n_blocks) * stride, delta))
    elif kind == "mixed":
        plen = params.phase_length or max(1, params.length // 8)
        seq_cursor = 16 * params.working_set
        emitted = 0
        while emitted < params.length:
            span = min(plen, params.length - emitted)
            mode = rng.choice(("loop", "uniform", "sequential"))
            if mode == "sequential":
                for _ in range(span):
                    append(TraceRecord(pick_kind(), seq_cursor, delta))
                    seq_cursor += stride
            else:
                base = rng.randrange(8) * params.working_set
                if mode == "loop":
                    blocks = max(1, n_blocks >> rng.randrange(3))
                    for j in range(span):
                        append(TraceRecord(pick_kind(), base + (j % blocks) * stride, delta))
                else:
                    for _ in range(span):
                        append(TraceRecord(pick_kind(), base + rng.randrange(n_blocks) * stride, delta))
            emitted += span
    else:
        raise ValueError(f"unknown synthetic kind {kind!r}; expected one of {SYNTHETIC_KINDS}")
    return out


def tag_address(addr: int, tag: int) -> int:
    """Move ``addr`` into the private address space selected by ``tag``."""
    if not 0 <= addr < (1 << ADDRESS_BITS):
        raise ValueError(f"address {addr:#x} does not fit below bit {ADDRESS_BITS}")
    if tag < 0:
        raise ValueError("tag must be non-negative")
    return (tag << ADDRESS_BITS) | addr


@dataclass
class Task:
    """A trace plus the instruction budget it is allowed to consume."""

    task_id: str
    records: Iterable[TraceRecord]
    budget: int
    tag: int = 0

    def __post_init__(self) -> None:
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.tag < 0:
            raise ValueError("tag must be non-negative")

    def tagged_records(self) -> Iterator[TraceRecord]:
        base = self.tag << ADDRESS_BITS
        bound = 1 << ADDRESS_BITS
        for rec in self.records:
            if rec.addr >= bound:
                raise ValueError(f"address {rec.addr:#x} does not fit below bit {ADDRESS_BITS}")
            yield TraceRecord(rec.kind, base | rec.addr, rec.instr_delta)


@dataclass(frozen=True)
class Segment:
    """A scheduled slice of one task, bounded by instruction offsets.

    The slice runs from the task's cumulative instruction count ``start``
    until that count first reaches ``end`` (or the trace runs out).
    """

    task_index: int
    start: int
    end: int


def build_schedule(budgets: Sequence[int], preempt_points: Sequence[int] = ()) -> list[Segment]:
    """Lay out the round of task slices.

    One task runs to its budget.  Three tasks follow the preemptive
    pattern: task 0 runs to its first preemption point, task 1 to its
    point, task 2 to completion, then tasks 0 and 1 finish their budgets
    — four task switches in total.
    """
    if any(b <= 0 for b in budgets):
        raise ValueError("budgets must be positive")
    if len(budgets) == 1:
        return [Segment(0, 0, budgets[0])]
    if len(budgets) == 3:
        if len(preempt_points) != 2:
            raise ValueError("a three-task schedule needs exactly two preemption points")
        p1, p2 = preempt_points
        b1, b2, b3 = budgets
        if not 0 < p1 < b1:
            raise ValueError(f"first preemption point must lie inside task 0's budget (0, {b1})")
        if not 0 < p2 < b2:
            raise ValueError(f"second preemption point must lie inside task 1's budget (0, {b2})")
        return [
            Segment(0, 0, p1),
            Segment(1, 0, p2),
            Segment(2, 0, b3),
            Segment(0, p1, b1),
            Segment(1, p2, b2),
        ]
    raise ValueError("the schedule model supports exactly one or three tasks")
