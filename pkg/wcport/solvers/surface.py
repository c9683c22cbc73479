"""Space grids, exposure/policy surfaces and their evaluation."""

import threading
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from wcport.errors import ValidationError
from wcport.market import exposure_to_strategy


@dataclass(frozen=True)
class SpaceGrid:
    x_min: float
    x_max: float
    n_x: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValidationError("x_min must be < x_max")
        if self.n_x < 2:
            raise ValidationError("n_x must be >= 2")

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x + 1)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_x


def default_space_grid(model, n_x: int, x_max=None) -> SpaceGrid:
    x_min, x_hi = model.factor.domain()
    return SpaceGrid(x_min, x_hi if x_max is None else x_max, n_x)


@dataclass
class ValueSurface:
    """Exposure v(t_i, x_j); rows are time levels 0..n_t, columns space nodes."""

    times: np.ndarray
    grid: SpaceGrid
    v: np.ndarray
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def at(self, t, x):
        values, _ = bilinear(self.times, self.grid, self.v, t, x)
        return values


@dataclass
class PolicySurface:
    times: np.ndarray
    grid: SpaceGrid
    pi: np.ndarray
    l_woc: float
    queries: int = 0
    clamped: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False, compare=False)

    @property
    def clamp_flag(self) -> bool:
        return self.clamped > 0

    @property
    def clamp_rate(self) -> float:
        return self.clamped / self.queries if self.queries else 0.0

    def reset_diagnostics(self):
        with self._lock:
            self.queries = 0
            self.clamped = 0

    def record(self, n_queries: int, n_clamped: int):
        # eval_policy is called from simulation worker threads
        with self._lock:
            self.queries += n_queries
            self.clamped += n_clamped


def bilinear(times: np.ndarray, grid: SpaceGrid, data: np.ndarray, t, x) -> Tuple[np.ndarray, int]:
    """Bilinear interpolation with t and x clamped; returns (values, #x clamped)."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    t, x = np.broadcast_arrays(t, x)
    xc = np.clip(x, grid.x_min, grid.x_max)
    n_clamped = int(np.count_nonzero(xc != x))
    tc = np.clip(t, times[0], times[-1])

    i = np.clip(np.searchsorted(times, tc, side="right") - 1, 0, times.size - 2)
    wt = (tc - times[i]) / (times[i + 1] - times[i])
    jf = (xc - grid.x_min) / grid.dx
    j = np.clip(np.floor(jf).astype(int), 0, grid.n_x - 1)
    wx = jf - j

    values = (
        (1 - wt) * (1 - wx) * data[i, j]
        + (1 - wt) * wx * data[i, j + 1]
        + wt * (1 - wx) * data[i + 1, j]
        + wt * wx * data[i + 1, j + 1]
    )
    return (float(values) if values.ndim == 0 else values), n_clamped


def policy_surface(vs: ValueSurface, l_woc: float) -> PolicySurface:
    """Elementwise π̂ = (1 - e^{-(v ∨ 0)}) / l_woc."""
    return PolicySurface(vs.times, vs.grid, np.asarray(exposure_to_strategy(vs.v, l_woc)), l_woc)


def eval_policy(ps: PolicySurface, t, x):
    values, n_clamped = bilinear(ps.times, ps.grid, ps.pi, t, x)
    ps.record(int(np.size(values)), n_clamped)
    return values


def dx_surface(vs: ValueSurface) -> np.ndarray:
    """∂_x v: central differences inside, one-sided at both edges."""
    return np.gradient(vs.v, vs.grid.dx, axis=1, edge_order=1)


def surface_from_curve(times: np.ndarray, v: np.ndarray, grid: SpaceGrid) -> ValueSurface:
    """Broadcast an x-independent exposure curve over `grid`."""
    return ValueSurface(np.asarray(times), grid, np.repeat(np.asarray(v)[:, None], grid.n_x + 1, axis=1))


def zero_policy(times: np.ndarray, grid: SpaceGrid, l_woc: float) -> PolicySurface:
    return PolicySurface(np.asarray(times), grid, np.zeros((len(times), grid.n_x + 1)), l_woc)
