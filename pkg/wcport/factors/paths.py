"""Seeded path simulation on a uniform grid with per-path substreams."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from wcport.console import progress_bar
from wcport.errors import DomainError
from wcport.factors.factory import get_process

CHUNK = 512


@dataclass(frozen=True)
class RngSpec:
    """Master seed; path `i` draws from SeedSequence(master_seed, spawn_key=(i, stream))."""

    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")

    def generator(self, path_id: int, stream: int = 0) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(path_id, stream))
        return np.random.Generator(np.random.PCG64(seq))

    def chunks(self, n_paths: int) -> List[range]:
        return [range(s, min(s + CHUNK, n_paths)) for s in range(0, n_paths, CHUNK)]


@dataclass
class PathBundle:
    times: np.ndarray
    values: np.ndarray  # (n_paths, n_steps + 1)
    seed: int
    kind: str = ""

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    @property
    def n_steps(self) -> int:
        return self.times.size - 1

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def thin(self, every: int) -> "PathBundle":
        """Every `every`-th time node; the last node must survive."""
        if self.n_steps % every:
            raise DomainError(f"{self.n_steps} steps are not divisible by {every}")
        return PathBundle(self.times[::every], self.values[:, ::every], self.seed, self.kind)


def uniform_grid(T: float, n_steps: int) -> np.ndarray:
    if n_steps < 1:
        raise DomainError("n_steps must be >= 1")
    if not T > 0.0:
        raise DomainError("T must be > 0")
    return np.linspace(0.0, T, n_steps + 1)


def _process_options(dyn, sampler: Optional[str]):
    return {"chi2_sampler": sampler} if (dyn.kind == "cir" and sampler) else {}


def simulate_paths(
    dyn,
    n_paths: int,
    n_steps: int,
    T: float,
    rng: RngSpec,
    sampler: Optional[str] = None,
    z0: Optional[float] = None,
    show_progress: bool = False,
) -> PathBundle:
    """Iterate the exact transition on a uniform grid.

    Paths are simulated in chunks, each chunk vectorized across its paths;
    chunks may run on `rng.workers` threads without changing any value.
    """
    if n_paths < 1:
        raise DomainError("n_paths must be >= 1")
    times = uniform_grid(T, n_steps)
    dt = T / n_steps
    process = get_process(dyn, **_process_options(dyn, sampler))
    start = dyn.z0 if z0 is None else z0
    values = np.empty((n_paths, n_steps + 1))

    def run_chunk(ids: range):
        innov = np.stack([process.innovations(rng.generator(i), (n_steps,)) for i in ids])
        z = np.full(len(ids), float(start))
        out = values[ids.start:ids.stop]
        out[:, 0] = z
        for step in range(n_steps):
            z = process.advance(z, dt, innov[:, step])
            out[:, step + 1] = z
        return len(ids)

    chunks = rng.chunks(n_paths)
    with progress_bar(f"Simulating {n_paths} {dyn.kind} paths", n_paths, enabled=show_progress) as advance:
        if rng.workers == 1:
            for ids in chunks:
                advance(run_chunk(ids))
        else:
            with ThreadPoolExecutor(max_workers=rng.workers) as pool:
                for done in pool.map(run_chunk, chunks):
                    advance(done)

    return PathBundle(times, values, rng.master_seed, dyn.kind)


def transition_moments(dyn, z, dt: float):
    """Analytic one-step (mean, variance) from state z."""
    if not dt > 0.0:
        raise DomainError("dt must be > 0")
    return get_process(dyn).transition_moments(z, dt)
