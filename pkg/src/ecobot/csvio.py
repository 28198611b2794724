"""CSV and text-report formats for the command-line tools.

Every file starts with a versioned comment header. Numbers are written
with ``repr`` so values round-trip exactly; no timestamps or locale
formatting anywhere, which keeps repeated runs byte-identical.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .controller import DecisionEvent
from .energy import EnergyReport, TraceSample
from .plant import PlantModels
from .sim import FrontierPoint, ModeSummary, SweepGrid

SWEEP_TAG = "# ecobot-sweep-v1"
TRACE_TAG = "# ecobot-trace-v1"
DECISIONS_TAG = "# ecobot-decisions-v1"
COMPARE_TAG = "# ecobot-compare-v1"
FRONTIER_TAG = "# ecobot-frontier-v1"
REPORT_TAG = "# ecobot-report-v1"


def _fmt(value: float) -> str:
    return repr(float(value))


def _csv_text(comment: str, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(comment + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def sweep_csv(grid: SweepGrid, models: PlantModels) -> str:
    rows = []
    for cell in grid.cells:
        rows.append(
            (
                cell.dvfs_index,
                _fmt(models.dvfs[cell.dvfs_index].frequency_hz),
                cell.speed_index,
                _fmt(models.speeds[cell.speed_index]),
                _fmt(cell.throughput),
                _fmt(cell.energy_j) if cell.energy_j is not None else "",
            )
        )
    comment = f"{SWEEP_TAG} entropy={_fmt(grid.entropy)} distance_m={_fmt(grid.distance_m)}"
    return _csv_text(
        comment,
        ("dvfs_index", "frequency_hz", "speed_index", "speed_mps", "throughput", "energy_j"),
        rows,
    )


@dataclass(frozen=True)
class SweepRow:
    dvfs_index: int
    frequency_hz: float
    speed_index: int
    speed_mps: float
    throughput: float
    energy_j: float | None


def read_sweep_csv(text: str) -> tuple[float, float, list[SweepRow]]:
    """Parse a sweep CSV; returns (entropy, distance_m, rows)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith(SWEEP_TAG):
        raise ValueError(f"not a sweep CSV (expected leading {SWEEP_TAG!r})")
    meta = dict(
        item.split("=", 1) for item in lines[0][len(SWEEP_TAG) :].split() if "=" in item
    )
    entropy = float(meta["entropy"])
    distance = float(meta["distance_m"])
    reader = csv.DictReader(lines[1:])
    rows = []
    for rec in reader:
        energy = rec["energy_j"]
        rows.append(
            SweepRow(
                dvfs_index=int(rec["dvfs_index"]),
                frequency_hz=float(rec["frequency_hz"]),
                speed_index=int(rec["speed_index"]),
                speed_mps=float(rec["speed_mps"]),
                throughput=float(rec["throughput"]),
                energy_j=float(energy) if energy != "" else None,
            )
        )
    return entropy, distance, rows


def trace_csv(trace: Sequence[TraceSample]) -> str:
    rows = [
        (
            _fmt(s.time_s),
            _fmt(s.position_m),
            _fmt(s.speed_mps),
            s.dvfs_index,
            _fmt(s.p_motor_w),
            _fmt(s.p_cpu_w),
            _fmt(s.throughput),
            _fmt(s.entropy),
            _fmt(s.event_rate_ev_per_s),
        )
        for s in trace
    ]
    return _csv_text(
        TRACE_TAG,
        (
            "time_s",
            "position_m",
            "speed_mps",
            "dvfs_index",
            "p_motor_w",
            "p_cpu_w",
            "throughput",
            "entropy",
            "event_rate_ev_per_s",
        ),
        rows,
    )


def decisions_csv(decisions: Sequence[DecisionEvent]) -> str:
    rows = [
        (
            _fmt(d.time_s),
            d.event,
            d.from_point.dvfs_index,
            d.from_point.speed_index,
            d.to_point.dvfs_index,
            d.to_point.speed_index,
            _fmt(d.cost_jpm),
            int(d.feasible),
        )
        for d in decisions
    ]
    return _csv_text(
        DECISIONS_TAG,
        (
            "time_s",
            "event",
            "from_dvfs",
            "from_speed",
            "to_dvfs",
            "to_speed",
            "cost_j_per_m",
            "feasible",
        ),
        rows,
    )


def report_text(report: EnergyReport, degraded: bool) -> str:
    lines = [
        REPORT_TAG,
        f"e_total_j = {_fmt(report.e_total_j)}",
        f"e_motor_j = {_fmt(report.e_motor_j)}",
        f"e_cpu_j = {_fmt(report.e_cpu_j)}",
        f"j_per_m = {_fmt(report.j_per_m)}",
        f"duration_s = {_fmt(report.duration_s)}",
        f"distance_m = {_fmt(report.distance_m)}",
        f"min_throughput = {_fmt(report.min_throughput)}",
        f"degraded = {str(degraded).lower()}",
    ]
    return "\n".join(lines) + "\n"


def read_report_text(text: str) -> dict[str, float | bool]:
    out: dict[str, float | bool] = {}
    for line in text.splitlines():
        if line.startswith("#") or not line.strip():
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value == "true" if key == "degraded" else float(value)
    return out


def compare_csv(rows: Sequence[tuple[str, str, ModeSummary]]) -> str:
    """Rows of (app, environment, summary), sorted lexicographically."""
    table = []
    for app, env, s in sorted(rows, key=lambda r: (r[0], r[1], r[2].mode)):
        point = s.operating_point
        table.append(
            (
                app,
                env,
                s.mode,
                point.dvfs_index if point else "",
                point.speed_index if point else "",
                _fmt(s.j_per_m),
                _fmt(s.e_total_j),
                _fmt(s.e_motor_j),
                _fmt(s.e_cpu_j),
                _fmt(s.duration_s),
                _fmt(s.mean_throughput),
                _fmt(s.min_throughput),
                int(s.feasible),
                _fmt(s.controlled_savings),
            )
        )
    return _csv_text(
        COMPARE_TAG,
        (
            "app",
            "environment",
            "mode",
            "dvfs_index",
            "speed_index",
            "j_per_m",
            "e_total_j",
            "e_motor_j",
            "e_cpu_j",
            "duration_s",
            "mean_throughput",
            "min_throughput",
            "feasible",
            "controlled_savings",
        ),
        table,
    )


def frontier_csv(points: Sequence[FrontierPoint], entropy: float, distance_m: float) -> str:
    argmin_index = None
    if points:
        best = min(p.j_per_m for p in points)
        argmin_index = next(i for i, p in enumerate(points) if p.j_per_m == best)
    rows = [
        (
            _fmt(p.speed_mps),
            _fmt(p.frequency_hz),
            _fmt(p.j_per_m),
            int(i == argmin_index),
        )
        for i, p in enumerate(points)
    ]
    comment = f"{FRONTIER_TAG} entropy={_fmt(entropy)} distance_m={_fmt(distance_m)}"
    return _csv_text(
        comment, ("speed_mps", "min_frequency_hz", "j_per_m", "is_argmin"), rows
    )


def read_frontier_csv(text: str) -> list[tuple[float, float, float, bool]]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(FRONTIER_TAG):
        raise ValueError(f"not a frontier CSV (expected leading {FRONTIER_TAG!r})")
    reader = csv.DictReader(lines[1:])
    return [
        (
            float(rec["speed_mps"]),
            float(rec["min_frequency_hz"]),
            float(rec["j_per_m"]),
            rec["is_argmin"] == "1",
        )
        for rec in reader
    ]


def write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")
