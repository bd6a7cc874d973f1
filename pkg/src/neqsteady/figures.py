"""Effective-temperature sweeps of the L - bus - R chain against detuning.

``delta = omega_L - omega_R`` at fixed mean frequency 1, so
``omega_L = 1 + delta/2`` and ``omega_R = 1 - delta/2``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .errors import ConfigError
from .model import SystemSpec, chain
from .phasespace import SteadyReport, steady_state

T = TypeVar("T")
R = TypeVar("R")

PANELS = ("a", "b", "c")
COLUMNS = ("delta", "g", "Teff_L", "Teff_R", "N_L", "N_R")


@dataclass(frozen=True)
class Fig2Parameters:
    mean_frequency: float = 1.0
    bus_frequency: float = 2.0
    t_left: float = 1.0
    t_right: float = 3.0
    gamma_left: float = 0.002
    gamma_right: float = 0.003
    couplings: tuple[float, ...] = (0.02, 0.04, 0.06, 0.08)
    delta_from: float = -0.5
    delta_to: float = 0.5
    points: int = 201
    right_ratio_b: float = 0.8

    def deltas(self) -> np.ndarray:
        return np.linspace(self.delta_from, self.delta_to, self.points)


FIG2 = Fig2Parameters()


def fig2_spec(panel: str, delta: float, g: float, params: Fig2Parameters = FIG2) -> SystemSpec:
    """The chain for one grid point; panel ``b`` uses ``g_R = 0.8 g``."""
    if panel not in PANELS:
        raise ConfigError(f"panel must be one of a, b, c; got {panel!r}")
    g_right = params.right_ratio_b * g if panel == "b" else g
    w = params.mean_frequency
    return chain(
        w + 0.5 * delta,
        params.bus_frequency,
        w - 0.5 * delta,
        g,
        g_right,
        (params.t_left, params.gamma_left),
        (params.t_right, params.gamma_right),
    )


def default_jobs() -> int:
    env = os.environ.get("NEQSTEADY_JOBS")
    if env:
        try:
            jobs = int(env)
        except ValueError:
            raise ConfigError(f"NEQSTEADY_JOBS must be an integer, got {env!r}") from None
        if jobs < 1:
            raise ConfigError("NEQSTEADY_JOBS must be at least 1")
        return jobs
    return 1


def ordered_map(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> list[R]:
    """Map over ``items`` with a bounded pool; results keep input order."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _row(panel: str, delta: float, g: float, params: Fig2Parameters) -> tuple[float, ...]:
    spec = fig2_spec(panel, delta, g, params)
    report: SteadyReport = steady_state(spec, rwa=(panel == "c"))
    left, right = spec.index("L"), spec.index("R")
    return (
        float(delta),
        float(g),
        report.effective_temperatures[left],
        report.effective_temperatures[right],
        report.local_occupations[left],
        report.local_occupations[right],
    )


def fig2_table(
    panel: str,
    params: Fig2Parameters = FIG2,
    jobs: int = 1,
    deltas: Sequence[float] | None = None,
) -> list[tuple[float, ...]]:
    """Rows ``(delta, g, Teff_L, Teff_R, N_L, N_R)``, grouped by ``g`` then ``delta``."""
    if panel not in PANELS:
        raise ConfigError(f"panel must be one of a, b, c; got {panel!r}")
    grid = params.deltas() if deltas is None else np.asarray(deltas, dtype=float)
    tasks = [(float(d), g) for g in params.couplings for d in grid]
    return ordered_map(lambda t: _row(panel, t[0], t[1], params), tasks, jobs)


def vertex_offset(x: np.ndarray, y: np.ndarray, k: int) -> float:
    """Abscissa of the parabola through ``(x, y)[k-1:k+2]`` on a uniform grid."""
    if not 0 < k < len(x) - 1:
        raise ValueError("vertex needs an interior grid point")
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    curvature = y0 - 2.0 * y1 + y2
    if curvature == 0:
        return float(x[k])
    return float(x[k] + 0.5 * (x[1] - x[0]) * (y0 - y2) / curvature)
