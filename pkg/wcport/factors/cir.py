"""Exact CIR transitions: z' = c·X with X noncentral chi-square(d, nc(z))."""

import math
from typing import Callable, Literal, Tuple

import numpy as np
from scipy import stats

from wcport.errors import DomainError
from wcport.interfaces import FactorProcess

Chi2Sampler = Literal["gamma", "inverse"]


def cir_transition_params(
    kappa: float, theta: float, varsigma: float, dt: float
) -> Tuple[float, float, Callable[[np.ndarray], np.ndarray]]:
    """Scale c, degrees of freedom d and the noncentrality map z ↦ nc(z)."""
    if not (kappa > 0.0 and theta > 0.0 and varsigma > 0.0):
        raise DomainError("CIR parameters kappa, theta, varsigma must be > 0")
    if not dt > 0.0:
        raise DomainError("dt must be > 0")
    decay = math.exp(-kappa * dt)
    c = varsigma**2 * -math.expm1(-kappa * dt) / (4.0 * kappa)
    d = 4.0 * kappa * theta / varsigma**2

    def nc_of_z(z):
        return np.asarray(z, dtype=float) * decay / c

    return c, d, nc_of_z


class CIRProcess(FactorProcess):
    """dz = κ(θ - z)dt + ς̃√z dŴ.

    d > 1: X = (G + √nc)² + χ²_{d-1}; the χ² part is a gamma draw
    (rejection) or, with `chi2_sampler="inverse"`, the gamma inverse CDF of
    a uniform so that common uniforms couple paths monotonically.
    d ≤ 1: Poisson mixture X = χ²_{d+2P}, P ~ Poisson(nc/2), by inverse CDFs.
    """

    KIND = "cir"

    def __init__(self, dyn, chi2_sampler: Chi2Sampler = "gamma"):
        self.dyn = dyn
        self.chi2_sampler = chi2_sampler
        self.d = 4.0 * dyn.kappa * dyn.theta / dyn.varsigma**2

    def innovations(self, rng: np.random.Generator, shape):
        shape = tuple(shape)
        if self.d > 1.0:
            g = rng.standard_normal(shape)
            if self.chi2_sampler == "inverse":
                second = rng.random(shape)
            else:
                second = rng.gamma(0.5 * (self.d - 1.0), 2.0, shape)
            return np.stack([g, second], axis=-1)
        return np.stack([rng.random(shape), rng.random(shape)], axis=-1)

    def advance(self, z, dt, innov):
        c, d, nc_of_z = cir_transition_params(self.dyn.kappa, self.dyn.theta, self.dyn.varsigma, dt)
        nc = nc_of_z(np.maximum(z, 0.0))
        if d > 1.0:
            chi2 = innov[..., 1]
            if self.chi2_sampler == "inverse":
                chi2 = stats.gamma.ppf(chi2, 0.5 * (d - 1.0), scale=2.0)
            x = (innov[..., 0] + np.sqrt(nc)) ** 2 + chi2
        else:
            p = stats.poisson.ppf(innov[..., 0], 0.5 * nc)
            x = stats.chi2.ppf(innov[..., 1], d + 2.0 * p)
        return np.maximum(c * x, 0.0)

    def transition_moments(self, z, dt):
        k, th, s = self.dyn.kappa, self.dyn.theta, self.dyn.varsigma
        z = np.asarray(z, dtype=float)
        e1 = math.exp(-k * dt)
        mean = th + (z - th) * e1
        var = z * (s**2 / k) * (e1 - e1**2) + th * (s**2 / (2.0 * k)) * (1.0 - e1) ** 2
        return mean, var


def cir_sample_step(z, dt: float, dyn, rng: np.random.Generator, chi2_sampler: Chi2Sampler = "gamma"):
    z = np.asarray(z, dtype=float)
    if np.any(z < 0.0):
        raise DomainError("CIR state must be >= 0")
    return CIRProcess(dyn, chi2_sampler).sample_step(z, dt, rng)
