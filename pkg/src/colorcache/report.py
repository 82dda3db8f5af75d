"""Run reports: the JSON document a simulation emits, and comparison math.

A report carries the full parameter echo, one record per measurement
interval, counter totals, and the energy rollup, so any figure in it can
be recomputed from the document alone.  Reports validate against the
schema shipped in ``colorcache/schemas/run_report.schema.json``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

REPORT_SCHEMA_ID = "colorcache.run_report/1"
COMPARISON_SCHEMA_ID = "colorcache.comparison/1"


@dataclass
class IntervalRecord:
    index: int
    task_id: str
    active_colors: int
    active_ratio: float
    instructions: int
    base_cycles: float
    stall_cycles: float
    cycles: float
    time_s: float
    prof_time_s: float
    l2_hits: int
    l2_misses: int
    load_misses: int
    writebacks: int
    mem_accesses: int
    prof_accesses: int
    transitions: int
    flushed_lines: int
    ppm: float | None
    energy_l2: float
    energy_mem: float
    energy_overhead: float
    energy_total: float
    edp: float
    gain: float | None = None
    config_space: list[int] | None = None
    chosen_colors: int | None = None


@dataclass
class RunReport:
    policy: str
    geometry: dict
    timing: dict
    energy_params: dict
    controller: dict | None
    decay: dict | None
    workload: dict
    area_penalty_applied: bool
    intervals: list[IntervalRecord]
    totals: dict
    energy: dict
    final_colors: int
    task_switches: int
    schema: str = REPORT_SCHEMA_ID

    def to_dict(self) -> dict:
        doc = asdict(self)
        # keep the schema tag first for readers skimming the file
        return {"schema": doc.pop("schema"), **doc}

    @classmethod
    def from_dict(cls, doc: dict) -> "RunReport":
        data = dict(doc)
        intervals = [IntervalRecord(**iv) for iv in data.pop("intervals")]
        return cls(intervals=intervals, **data)

    def save(self, path: str | Path) -> None:
        with open(path, "w") as f:
            # non-finite values must be mapped to strings before they get here
            json.dump(self.to_dict(), f, indent=1, allow_nan=False)
            f.write("\n")

    @classmethod
    def load(cls, path: str | Path, validate: bool = True) -> "RunReport":
        with open(path) as f:
            doc = json.load(f)
        if validate:
            validate_report(doc)
        return cls.from_dict(doc)


def load_schema() -> dict:
    text = resources.files("colorcache").joinpath("schemas/run_report.schema.json").read_text()
    return json.loads(text)


def validate_report(doc: dict) -> None:
    """Raise jsonschema.ValidationError if ``doc`` is not a run report."""
    jsonschema.validate(doc, load_schema())


def _fingerprints_match(a: dict, b: dict) -> bool:
    return a["geometry"] == b["geometry"] and a["workload"] == b["workload"]


def compare_reports(baseline: dict, runs: list[dict]) -> dict:
    """Savings of each run relative to ``baseline``.

    All reports must describe the same geometry and workload; comparing
    across different experiments is a mistake this refuses to make.
    """

    def summary(doc: dict) -> dict:
        return {
            "policy": doc["policy"],
            "energy_total": doc["energy"]["total"],
            "energy_l2": doc["energy"]["l2"],
            "energy_memory": doc["energy"]["memory"],
            "energy_overhead": doc["energy"]["overhead"],
            "edp": doc["energy"]["edp"],
            "time_s": doc["totals"]["time_s"],
            "l2_misses": doc["totals"]["l2_misses"],
            "final_colors": doc["final_colors"],
        }

    base_energy = baseline["energy"]["total"]
    base_edp = baseline["energy"]["edp"]
    base_time = baseline["totals"]["time_s"]
    entries = []
    for doc in runs:
        if not _fingerprints_match(baseline, doc):
            raise ValueError(
                f"run {doc['policy']!r} has a different geometry or workload than the baseline"
            )
        s = summary(doc)
        s["energy_saving_pct"] = 100.0 * (base_energy - s["energy_total"]) / base_energy
        s["edp_saving_pct"] = 100.0 * (base_edp - s["edp"]) / base_edp
        s["time_overhead_pct"] = 100.0 * (s["time_s"] - base_time) / base_time
        entries.append(s)
    return {
        "schema": COMPARISON_SCHEMA_ID,
        "baseline": summary(baseline),
        "runs": entries,
    }


def render_comparison_table(cmp: dict) -> str:
    cols = ["policy", "energy [J]", "saving [%]", "EDP saving [%]", "time +[%]", "L2 misses", "colors"]
    rows = [
        [
            cmp["baseline"]["policy"],
            f"{cmp['baseline']['energy_total']:.6g}",
            "-",
            "-",
            "-",
            str(cmp["baseline"]["l2_misses"]),
            str(cmp["baseline"]["final_colors"]),
        ]
    ]
    for run in cmp["runs"]:
        rows.append(
            [
                run["policy"],
                f"{run['energy_total']:.6g}",
                f"{run['energy_saving_pct']:+.2f}",
                f"{run['edp_saving_pct']:+.2f}",
                f"{run['time_overhead_pct']:+.2f}",
                str(run["l2_misses"]),
                str(run["final_colors"]),
            ]
        )
    widths = [max(len(r[i]) for r in [cols] + rows) for i in range(len(cols))]
    lines = [
        "  ".join(c.ljust(w) for c, w in zip(cols, widths)),
        "  ".join("-" * w for w in widths),
    ]
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows)
    return "\n".join(lines)


def summarize_report(doc: dict) -> str:
    t = doc["totals"]
    e = doc["energy"]
    lines = [
        f"policy          {doc['policy']}",
        f"intervals       {len(doc['intervals'])}",
        f"task switches   {doc['task_switches']}",
        f"instructions    {t['instructions']}",
        f"cycles          {t['cycles']:.6g}",
        f"time [s]        {t['time_s']:.6g}",
        f"L2 hits/misses  {t['l2_hits']} / {t['l2_misses']}",
        f"memory accesses {t['mem_accesses']}",
        f"transitions     {t['transitions']}",
        f"energy [J]      {e['total']:.6g} (L2 {e['l2']:.6g}, mem {e['memory']:.6g}, overhead {e['overhead']:.6g})",
        f"EDP [Js]        {e['edp']:.6g}",
        f"final colors    {doc['final_colors']}",
    ]
    return "\n".join(lines)


# enumerated explicitly so the CSV layout stays stable even if the dataclass grows
CSV_COLUMNS = [
    "index", "task_id", "active_colors", "active_ratio", "instructions",
    "base_cycles", "stall_cycles", "cycles", "time_s", "prof_time_s",
    "l2_hits", "l2_misses", "load_misses", "writebacks", "mem_accesses",
    "prof_accesses", "transitions", "flushed_lines", "ppm",
    "energy_l2", "energy_mem", "energy_overhead", "energy_total", "edp",
    "gain", "config_space", "chosen_colors",
]


def write_intervals_csv(doc: dict, path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for iv in doc["intervals"]:
            row = []
            for col in CSV_COLUMNS:
                value = iv[col]
                if col == "config_space" and value is not None:
                    value = " ".join(str(c) for c in value)
                row.append("" if value is None else value)
            writer.writerow(row)
