import numpy as np

from wcport.interfaces import FactorProcess


class StaticProcess(FactorProcess):
    """Frozen factor used by constant-coefficient models."""

    KIND = "static"

    def __init__(self, dyn):
        self.dyn = dyn

    def innovations(self, rng, shape):
        return np.zeros(tuple(shape) + (0,))

    def advance(self, z, dt, innov):
        return np.array(z, dtype=float, copy=True)

    def transition_moments(self, z, dt):
        z = np.asarray(z, dtype=float)
        return z.copy(), np.zeros_like(z)
