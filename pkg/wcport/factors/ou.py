import math

import numpy as np

from wcport.errors import DomainError
from wcport.interfaces import FactorProcess


class OUProcess(FactorProcess):
    """dz = κ(θ - z)dt + ς̃ dŴ with its Gaussian transition."""

    KIND = "ou"

    def __init__(self, dyn):
        self.dyn = dyn

    def innovations(self, rng, shape):
        return rng.standard_normal(tuple(shape))[..., None]

    def advance(self, z, dt, innov):
        mean, var = self.transition_moments(z, dt)
        return mean + np.sqrt(var) * innov[..., 0]

    def transition_moments(self, z, dt):
        if not dt > 0.0:
            raise DomainError("dt must be > 0")
        k, th, s = self.dyn.kappa, self.dyn.theta, self.dyn.varsigma
        z = np.asarray(z, dtype=float)
        mean = th + (z - th) * math.exp(-k * dt)
        var = s**2 * -math.expm1(-2.0 * k * dt) / (2.0 * k)
        return mean, np.full_like(z, var)


def ou_sample_step(z, dt: float, dyn, rng: np.random.Generator):
    return OUProcess(dyn).sample_step(z, dt, rng)
