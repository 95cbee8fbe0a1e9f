"""CSV and JSON writers for run and batch results.

Numbers are written with a fixed format so that equal runs give
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .resilience import GRID_HEADER, MarginGrid, grid_rows
from .scenario import RunResult, TimeSeries

DECIMALS = 6

TIMESERIES_FILE = "timeseries.csv"
SUMMARY_FILE = "summary.json"
GRID_FILE = "grid.csv"
CONFIG_FILE = "scenario.yaml"
RECOVERY_VS_TEMPERATURE_FILE = "recovery_vs_max_temperature.csv"
RECOVERY_VS_POWER_FILE = "recovery_vs_max_power.csv"
MARGIN_GRID_FILE = "margin_grid.csv"


def fmt(value: object) -> str:
    """Fixed-precision text for one cell; blank for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return ""
        text = f"{x:.{DECIMALS}f}"
        return "0." + "0" * DECIMALS if text == "-0." + "0" * DECIMALS else text
    return str(value)


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
            n += 1
    return n


def write_timeseries(series: TimeSeries, path: str | Path) -> int:
    """Write one row per recorded sample; returns the data row count."""
    return _write_rows(Path(path), series.header, (tuple(float(v) for v in row) for row in series.data))


def read_timeseries(path: str | Path) -> TimeSeries:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        data = np.array([[float(v) for v in row] for row in reader], dtype=float)
    return TimeSeries(header, data.reshape(-1, len(header)))


def _clean(obj: object) -> object:
    """JSON-safe copy: NaN becomes null, numpy scalars become Python ones."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return None if math.isnan(x) else x
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def run_summary(result: RunResult) -> dict[str, object]:
    return _clean(
        {
            "kind": "run",
            "seed": result.config.seed,
            "end_time_s": result.config.clock.end_time,
            "samples": len(result.series),
            "metrics": asdict(result.metrics),
            "step_counts": result.step_counts,
            "health_transitions": [{"time_s": t, "health": h} for t, h in result.health_transitions],
            "repair_commands": [
                {
                    "target": c.target,
                    "type": c.repair_type.value,
                    "issued_at_s": c.issued_at,
                    "start_time_s": c.start_time,
                    "repair_rate": c.repair_rate,
                }
                for c in result.repair_commands
            ],
        }
    )  # type: ignore[return-value]


def batch_summary(grid: MarginGrid, seed: int) -> dict[str, object]:
    margins = grid.margins
    failed = [c for c in grid.flat() if c.error is not None]
    unrecovered = [c for c in grid.flat() if c.metrics is not None and not c.metrics.recovered]
    return _clean(
        {
            "kind": "batch",
            "seed": seed,
            "shape": list(grid.shape),
            "spread_rates_mm_s": list(grid.spread_rates * 1e3),
            "detection_delays_s": list(grid.detection_delays),
            "cells_margin_one": int(np.sum(margins >= 1.0)),
            "min_margin": float(np.nanmin(margins)) if np.isfinite(margins).any() else None,
            "unrecovered_cells": len(unrecovered),
            "cell_errors": [{"i": c.cell.i, "j": c.cell.j, "error": c.error} for c in failed],
        }
    )  # type: ignore[return-value]


def write_json(data: dict[str, object], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def write_grid(grid: MarginGrid, path: str | Path) -> int:
    rows = grid_rows(grid)
    return _write_rows(Path(path), GRID_HEADER, ([r[k] for k in GRID_HEADER] for r in rows))


def read_grid(path: str | Path) -> list[dict[str, str]]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or set(GRID_HEADER) - set(rows[0]):
        raise ValueError(f"{path}: not a batch grid file")
    return rows


def _num(text: str) -> float:
    return float(text) if text != "" else float("nan")


def write_report(results_dir: str | Path, out_dir: str | Path | None = None) -> list[Path]:
    """Plot-ready tables from a batch grid: recovery time against peak
    temperature and peak power, and the margin matrix (rows = spread rate,
    columns = detection delay)."""
    results_dir = Path(results_dir)
    out = Path(out_dir) if out_dir is not None else results_dir
    rows = read_grid(results_dir / GRID_FILE)
    points = sorted(rows, key=lambda r: (int(r["i"]), int(r["j"])))

    def scatter(name: str, column: str) -> Path:
        path = out / name
        _write_rows(
            path,
            ("spread_rate_mm_s", "detection_delay_s", column, "time_to_recover_s", "recovered"),
            (
                (_num(r["spread_rate_mm_s"]), _num(r["detection_delay_s"]), _num(r[column]),
                 _num(r["time_to_recover_s"]), r["recovered"])
                for r in points
            ),
        )
        return path

    written = [
        scatter(RECOVERY_VS_TEMPERATURE_FILE, "max_temperature_k"),
        scatter(RECOVERY_VS_POWER_FILE, "max_power_w"),
    ]

    spreads = sorted({(int(r["i"]), _num(r["spread_rate_mm_s"])) for r in points})
    delays = sorted({(int(r["j"]), _num(r["detection_delay_s"])) for r in points})
    margin = {(int(r["i"]), int(r["j"])): _num(r["response_margin"]) for r in points}
    path = out / MARGIN_GRID_FILE
    _write_rows(
        path,
        ("spread_rate_mm_s",) + tuple(f"delay_{fmt(d)}_s" for _, d in delays),
        ((s,) + tuple(margin.get((i, j), float("nan")) for j, _ in delays) for i, s in spreads),
    )
    written.append(path)
    return written
