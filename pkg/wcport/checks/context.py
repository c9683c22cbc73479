"""Lazily built inputs shared by the checks of one `verify` run."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional

import numpy as np

from wcport.config import SolverConfig
from wcport.factors.paths import PathBundle, RngSpec, simulate_paths
from wcport.market import ModelSpec
from wcport.solvers.pde import solve_pde
from wcport.solvers.surface import PolicySurface, ValueSurface, policy_surface


@dataclass
class CheckContext:
    model: ModelSpec
    solver: SolverConfig = field(default_factory=SolverConfig)
    n_paths: int = 10_000
    rng: RngSpec = field(default_factory=RngSpec)
    k: float = 4.0
    n_checkpoints: int = 11
    show_progress: bool = False

    @cached_property
    def surface(self) -> ValueSurface:
        return solve_pde(self.model, self.solver, show_progress=self.show_progress)

    @cached_property
    def policy(self) -> PolicySurface:
        return policy_surface(self.surface, self.model.crash.l_woc)

    @cached_property
    def paths(self) -> PathBundle:
        return simulate_paths(
            self.model.factor,
            self.n_paths,
            self.solver.n_t,
            self.model.T,
            self.rng,
            show_progress=self.show_progress,
        )

    @property
    def checkpoints(self) -> List[float]:
        return list(np.linspace(0.0, self.model.T, self.n_checkpoints))

    def x_floor(self) -> Optional[float]:
        return self.surface.diagnostics.get("x_floor", 0.0)
