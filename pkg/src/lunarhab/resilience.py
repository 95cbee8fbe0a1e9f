"""Monte Carlo harness over fire spread rate and detection delay."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from .config import BatchConfig, ScenarioConfig
from .metrics import RunMetrics
from .rng import derive_seed, stream
from .scenario import run_scenario

logger = logging.getLogger(__name__)

# Stream path words under the master seed.
_SPREAD_STREAM = 1
_DETECTION_STREAM = 2
_CELL_STREAM = 3


def scale_unit(u: np.ndarray | float, interval: tuple[float, float]) -> np.ndarray:
    lo, hi = interval
    return lo + (hi - lo) * np.asarray(u, dtype=float)


def beta_inverse_cdf(u: np.ndarray | float, alpha: float, beta: float) -> np.ndarray:
    return stats.beta.ppf(np.asarray(u, dtype=float), alpha, beta)


def spread_from_uniform(u: np.ndarray | float, config: BatchConfig) -> np.ndarray:
    return scale_unit(beta_inverse_cdf(u, config.alpha, config.beta), config.spread_interval)


def delay_from_uniform(u: np.ndarray | float, config: BatchConfig) -> np.ndarray:
    return scale_unit(u, config.detection_interval)


def sample_spread_rates(config: BatchConfig, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    """Beta(alpha, beta) draws mapped onto the spread interval, m/s."""
    n = config.n_spread_samples if n is None else n
    return spread_from_uniform(rng.random(n), config)


def sample_detection_delays(config: BatchConfig, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    """Uniform draws on the detection interval, s."""
    n = config.n_detection_samples if n is None else n
    return delay_from_uniform(rng.random(n), config)


@dataclass(frozen=True)
class Cell:
    i: int
    j: int
    spread_rate: float
    detection_delay: float
    seed: int


@dataclass(frozen=True)
class CellResult:
    cell: Cell
    metrics: RunMetrics | None
    error: str | None = None


@dataclass
class MarginGrid:
    spread_rates: np.ndarray  # ascending, m/s
    detection_delays: np.ndarray  # ascending, s
    cells: list[list[CellResult]]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.spread_rates), len(self.detection_delays)

    def field(self, name: str) -> np.ndarray:
        out = np.full(self.shape, np.nan)
        for row in self.cells:
            for c in row:
                if c.metrics is not None:
                    value = getattr(c.metrics, name)
                    out[c.cell.i, c.cell.j] = np.nan if value is None else float(value)
        return out

    @property
    def margins(self) -> np.ndarray:
        return self.field("response_margin")

    def flat(self) -> list[CellResult]:
        return [c for row in self.cells for c in row]


def cell_scenario(base: ScenarioConfig, spread_rate: float, detection_delay: float, seed: int) -> ScenarioConfig:
    """Base scenario with one realization's values and the batch overrides."""
    b = base.batch
    return base.updated(
        {
            "seed": seed,
            "clock.end_time": b.end_time,
            "disturbance.fire.enabled": True,
            "disturbance.fire.spread_rate": float(spread_rate),
            "disturbance.fire.intensity": b.intensity,
            "fdd.mode": "sampled_latency",
            "fdd.latency": float(detection_delay),
            "repair.suppression_rate": b.suppression_rate,
        }
    )


def draw_samples(base: ScenarioConfig) -> tuple[np.ndarray, np.ndarray]:
    b = base.batch
    spreads = np.sort(sample_spread_rates(b, stream(base.seed, _SPREAD_STREAM)))
    delays = np.sort(sample_detection_delays(b, stream(base.seed, _DETECTION_STREAM)))
    return spreads, delays


def plan_cells(base: ScenarioConfig) -> tuple[np.ndarray, np.ndarray, list[Cell]]:
    spreads, delays = draw_samples(base)
    cells = []
    for i, s in enumerate(spreads):
        for j, d in enumerate(delays):
            index = i * len(delays) + j
            cells.append(Cell(i, j, float(s), float(d), derive_seed(base.seed, _CELL_STREAM, index)))
    return spreads, delays, cells


def run_cell(args: tuple[ScenarioConfig, Cell]) -> CellResult:
    base, cell = args
    try:
        result = run_scenario(cell_scenario(base, cell.spread_rate, cell.detection_delay, cell.seed))
    except Exception as exc:  # recorded per cell, the batch carries on
        logger.warning("cell (%d, %d) failed: %s", cell.i, cell.j, exc)
        return CellResult(cell, None, f"{type(exc).__name__}: {exc}")
    return CellResult(cell, result.metrics)


def run_batch(base: ScenarioConfig, jobs: int = 1, order: list[int] | None = None) -> MarginGrid:
    """Run every (spread, delay) combination.

    ``order`` permutes execution order (testing hook); results are placed
    by cell index regardless.
    """
    spreads, delays, cells = plan_cells(base)
    idx = list(range(len(cells))) if order is None else list(order)
    work = [(base, cells[k]) for k in idx]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(run_cell, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        done = [run_cell(w) for w in work]
    grid: list[list[CellResult | None]] = [[None] * len(delays) for _ in spreads]
    for res in done:
        grid[res.cell.i][res.cell.j] = res
    return MarginGrid(spreads, delays, grid)  # type: ignore[arg-type]


GRID_HEADER = (
    "i", "j", "spread_rate_mm_s", "detection_delay_s", "seed",
    "time_to_recover_s", "max_temperature_k", "max_power_w", "t_h_effect_s",
    "response_margin", "failed", "recovered", "error",
)


def grid_rows(grid: MarginGrid) -> list[dict[str, object]]:
    rows = []
    for res in grid.flat():
        c = res.cell
        row: dict[str, object] = {
            "i": c.i, "j": c.j,
            "spread_rate_mm_s": c.spread_rate * 1e3, "detection_delay_s": c.detection_delay, "seed": c.seed,
        }
        m = asdict(res.metrics) if res.metrics is not None else {}
        row.update(
            time_to_recover_s=m.get("time_to_recover"),
            max_temperature_k=m.get("max_temperature"),
            max_power_w=m.get("max_power"),
            t_h_effect_s=m.get("t_h_effect"),
            response_margin=m.get("response_margin"),
            failed=m.get("failed"),
            recovered=m.get("recovered"),
            error=res.error or "",
        )
        rows.append(row)
    return rows


def margin_one_boundary(margins: np.ndarray) -> np.ndarray:
    """Cells whose margin-1 status differs from a 4-neighbour."""
    ok = margins >= 1.0
    edge = np.zeros_like(ok)
    n, m = ok.shape
    for i in range(n):
        for j in range(m):
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                a, b = i + di, j + dj
                if 0 <= a < n and 0 <= b < m and ok[a, b] != ok[i, j]:
                    edge[i, j] = True
    return edge


def nearest_cell(grid: MarginGrid, spread_rate: float, detection_delay: float) -> tuple[int, int]:
    """Grid cell closest to a point, distances scaled by the sample spans."""
    s, d = grid.spread_rates, grid.detection_delays
    s_span = (s.max() - s.min()) or 1.0
    d_span = (d.max() - d.min()) or 1.0
    i = int(np.argmin(np.abs(s - spread_rate) / s_span))
    j = int(np.argmin(np.abs(d - detection_delay) / d_span))
    return i, j
