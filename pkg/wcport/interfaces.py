import abc
from typing import Tuple

import numpy as np


class FactorProcess(abc.ABC):
    """Exact one-step transition law of a factor process.

    Randomness is split in two: `innovations` draws everything that does not
    depend on the state from one path's generator, `advance` maps states and
    innovations to next states, vectorized across paths.
    """

    KIND: str = ""

    @abc.abstractmethod
    def innovations(self, rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
        """Array of shape (*shape, k) for k draws per step."""

    @abc.abstractmethod
    def advance(self, z: np.ndarray, dt: float, innov: np.ndarray) -> np.ndarray: pass

    @abc.abstractmethod
    def transition_moments(self, z, dt: float) -> Tuple[np.ndarray, np.ndarray]: pass

    def sample_step(self, z, dt: float, rng: np.random.Generator):
        z = np.asarray(z, dtype=float)
        return self.advance(z, dt, self.innovations(rng, z.shape))


class Check(abc.ABC):
    """A verification check producing a VerificationReport."""

    CHECK_KEY: str = ""

    @abc.abstractmethod
    def run(self, context) -> "VerificationReport":  # noqa: F821
        """Run against a prepared `CheckContext` (model, surfaces, paths)."""


class OutputFormatter(abc.ABC):
    @abc.abstractmethod
    def save(self, data, filename: str): pass
