"""Per-run resilience metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disturbance import Phase


@dataclass(frozen=True)
class RunMetrics:
    time_to_recover: float  # s, ignition to extinguishment
    max_temperature: float  # K
    max_power: float  # W
    t_h_effect: float | None  # s after ignition of the first T >= T_crit
    response_margin: float
    failed: bool
    recovered: bool = True
    ignition_time: float | None = None
    extinguish_time: float | None = None


def response_margin(t_sc: float, t_h: float | None) -> float:
    """1 - t_sc / t_h; 1 when the hazard never reaches the critical state."""
    if t_sc < 0:
        raise ValueError("t_sc must be >= 0")
    if t_h is None:
        return 1.0
    if not t_h > 0:
        raise ValueError("t_h must be > 0")
    return 1.0 - t_sc / t_h


def _first(mask: np.ndarray) -> int | None:
    idx = np.flatnonzero(mask)
    return int(idx[0]) if idx.size else None


def extract_metrics(series, t_crit: float, horizon: float | None = None) -> RunMetrics:
    """Summarise a recorded run.

    ``series`` needs the columns time_s, fire_phase, t_zone1_k, t_zone2_k
    and total_demand_w. A fire still burning at the end of the record is
    reported unrecovered with the remaining horizon as a lower bound on
    the recovery time.
    """
    time = np.asarray(series["time_s"], dtype=float)
    phase = np.asarray(series["fire_phase"], dtype=float)
    temps = np.maximum(np.asarray(series["t_zone1_k"], dtype=float), np.asarray(series["t_zone2_k"], dtype=float))
    power = np.asarray(series["total_demand_w"], dtype=float)
    max_t = float(temps.max()) if temps.size else float("nan")
    max_p = float(power.max()) if power.size else float("nan")

    i_ign = _first((phase == Phase.BURNING) | (phase == Phase.SUPPRESSING))
    if i_ign is None:
        return RunMetrics(0.0, max_t, max_p, None, 1.0, False)
    t_ign = float(time[i_ign])
    end = float(time[-1]) if horizon is None else float(horizon)

    i_ext = _first((phase == Phase.EXTINGUISHED) & (np.arange(len(phase)) > i_ign))
    recovered = i_ext is not None
    t_ext = float(time[i_ext]) if recovered else None
    t_sc = (t_ext if recovered else end) - t_ign

    after = np.arange(len(time)) >= i_ign
    i_crit = _first((temps >= t_crit) & after)
    t_h = None
    if i_crit is not None:
        # A crossing on the ignition sample itself would give t_h = 0.
        t_h = max(float(time[i_crit]) - t_ign, float(np.finfo(float).eps))
    margin = response_margin(t_sc, t_h)
    return RunMetrics(t_sc, max_t, max_p, t_h, margin, margin < 1.0, recovered, t_ign, t_ext)
