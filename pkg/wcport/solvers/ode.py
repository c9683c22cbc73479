"""Constant-coefficient indifference ODE v' = -f(v), v(T) = 0 (classic RK4)."""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from wcport.errors import SolverError
from wcport.market import ModelSpec, generator, merton_policy

MAX_GENERATOR = 1e6


@dataclass(frozen=True)
class FrozenGenerator:
    """y ↦ f(x0, y) + shift for a model with coefficients frozen at x0."""

    model: ModelSpec
    x0: float
    shift: float = 0.0
    x_floor: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "_pi_m", float(merton_policy(self.model, self.x0, self.x_floor)))

    @classmethod
    def at_start(cls, model: ModelSpec, shift: float = 0.0) -> "FrozenGenerator":
        return cls(model, model.factor.z0, shift)

    @property
    def merton(self) -> float:
        return self._pi_m

    def __call__(self, y):
        return generator(self.model, self.x0, y, pi_m=self._pi_m) + self.shift


def integrate_backward(fn: Callable[[float], float], T: float, n_t: int) -> Tuple[np.ndarray, np.ndarray]:
    """RK4 for v' = -fn(v) from v(T) = 0 down to t = 0."""
    if n_t < 1:
        raise SolverError("n_t must be >= 1")
    times = np.linspace(0.0, T, n_t + 1)
    h = T / n_t
    v = np.zeros(n_t + 1)

    def g(y):
        value = float(fn(y))
        if not abs(value) <= MAX_GENERATOR:
            raise SolverError(f"generator value {value:g} exceeds {MAX_GENERATOR:g}; step rejected")
        return value

    # s = T - t runs forward: dv/ds = f(v)
    for i in range(n_t - 1, -1, -1):
        y = v[i + 1]
        k1 = g(y)
        k2 = g(y + 0.5 * h * k1)
        k3 = g(y + 0.5 * h * k2)
        k4 = g(y + h * k3)
        v[i] = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return times, v


def solve_ode_constant(model: ModelSpec, n_t: int = 1000, x0: Optional[float] = None):
    """Reference solution with the coefficient maps frozen at x0 (default z0)."""
    fn = FrozenGenerator(model, model.factor.z0 if x0 is None else x0)
    return integrate_backward(fn, model.T, n_t)
