"""Lévy measures for the ordinary (non-crash) jumps and their integrals.

Three families are supported: no jumps, a single atom δ_q, and the
infinite-activity density dl/l on [0, l_max]. Every integral has a closed
form, so all functions accept scalars or numpy arrays and stay vectorized.
"""

import math
from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

from wcport.errors import DomainError, ValidationError

ArrayLike = Union[float, np.ndarray]

MeasureKind = Literal["none", "atom", "reciprocal"]

PI2_6 = math.pi**2 / 6.0

# x <= 1/2 needs 0.5**k / k**2 < 1e-17, i.e. k ~ 50
_SERIES_K = np.arange(1, 64, dtype=float)


def as_output(arr: np.ndarray) -> ArrayLike:
    return float(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True)
class JumpMeasure:
    kind: MeasureKind
    l_max: float
    q: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("none", "atom", "reciprocal"):
            raise ValidationError(f"unknown jump measure kind '{self.kind}'")
        if not 0.0 < self.l_max < 1.0:
            raise ValidationError("l_max must be in (0, 1)")
        if self.kind == "atom":
            if self.q is None or not 0.0 < self.q <= self.l_max:
                raise ValidationError("atom size q must be in (0, l_max]")
        elif self.q is not None:
            raise ValidationError(f"q is only meaningful for atom measures, not '{self.kind}'")

    @classmethod
    def none(cls, l_max: float = 0.2) -> "JumpMeasure":
        return cls("none", l_max)

    @classmethod
    def atom(cls, q: float, l_max: Optional[float] = None) -> "JumpMeasure":
        return cls("atom", q if l_max is None else l_max, q)

    @classmethod
    def reciprocal(cls, l_max: float) -> "JumpMeasure":
        return cls("reciprocal", l_max)

    @property
    def infinite_activity(self) -> bool:
        return self.kind == "reciprocal"

    @property
    def total_mass(self) -> float:
        return {"none": 0.0, "atom": 1.0, "reciprocal": math.inf}[self.kind]

    @property
    def pole(self) -> float:
        """Smallest allocation y at which 1 - y*l vanishes on the support."""
        if self.kind == "none":
            return math.inf
        if self.kind == "atom":
            return 1.0 / self.q
        return 1.0 / self.l_max

    @property
    def cap(self) -> float:
        """Largest post-crash-admissible allocation, 1/l_max (inf without jumps)."""
        return math.inf if self.kind == "none" else 1.0 / self.l_max

    def describe(self) -> str:
        if self.kind == "none":
            return "none"
        if self.kind == "atom":
            return f"atom(q={self.q:g})"
        return f"reciprocal(l_max={self.l_max:g})"


def _check_y(m: JumpMeasure, y: np.ndarray):
    if np.any(np.isnan(y)) or np.any(y < 0.0):
        raise DomainError("allocation y must be >= 0")
    if m.kind == "none":
        return
    if np.any(y > m.cap):
        raise DomainError(f"allocation y must be <= 1/l_max = {m.cap:g} for {m.describe()}")
    if np.any(y >= m.pole):
        raise DomainError(f"jump integral diverges at y = {m.pole:g} for {m.describe()}")


def dilog(x: ArrayLike) -> ArrayLike:
    """Li₂(x) on [0, 1]: power series up to 1/2, Euler reflection above."""
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError("dilog is defined here on [0, 1] only")

    def series(u):
        # Horner form of sum u^k / k^2
        acc = np.zeros_like(u)
        for k in _SERIES_K[::-1]:
            acc = (acc + 1.0 / k**2) * u
        return acc

    low = x <= 0.5
    u = np.where(low, x, 1.0 - x)
    s = series(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        cross = np.log(x) * np.log1p(-x)
    cross = np.where(low | (x >= 1.0), 0.0, cross)
    return as_output(np.where(low, s, PI2_6 - cross - s))


def log_moment(m: JumpMeasure, y: ArrayLike) -> ArrayLike:
    """∫ log(1 - y l) ϑ(dl)."""
    y = np.asarray(y, dtype=float)
    _check_y(m, y)
    if m.kind == "none":
        return as_output(np.zeros_like(y))
    if m.kind == "atom":
        return as_output(np.log1p(-y * m.q))
    return as_output(-np.asarray(dilog(y * m.l_max)))


def hazard_moment(m: JumpMeasure, y: ArrayLike) -> ArrayLike:
    """∫ l / (1 - y l) ϑ(dl), the jump part of -∂_yΦ."""
    y = np.asarray(y, dtype=float)
    _check_y(m, y)
    if m.kind == "none":
        return as_output(np.zeros_like(y))
    if m.kind == "atom":
        return as_output(m.q / (1.0 - y * m.q))
    # y -> 0 limit is l_max
    safe = np.where(y > 0.0, y, 1.0)
    value = np.where(y > 0.0, -np.log1p(-safe * m.l_max) / safe, m.l_max)
    return as_output(value)


def curvature_moment(m: JumpMeasure, y: ArrayLike) -> ArrayLike:
    """∫ l² / (1 - y l)² ϑ(dl); enters -∂_y²Φ and the ψ Lipschitz bound."""
    y = np.asarray(y, dtype=float)
    _check_y(m, y)
    if m.kind == "none":
        return as_output(np.zeros_like(y))
    if m.kind == "atom":
        return as_output(m.q**2 / (1.0 - y * m.q) ** 2)
    a = y * m.l_max
    safe = np.where(y > 0.0, y, 1.0)
    # ∫₀^L l/(1-yl)² dl = [a/(1-a) + log(1-a)] / y², limit L²/2 at y = 0
    value = np.where(
        y > 1e-4,
        (a / (1.0 - a) + np.log1p(-a)) / safe**2,
        m.l_max**2 * (0.5 + (2.0 / 3.0) * a + 0.75 * a**2),
    )
    return as_output(value)


def mean_jump(m: JumpMeasure) -> float:
    """∫ l ϑ(dl)."""
    if m.kind == "none":
        return 0.0
    if m.kind == "atom":
        return float(m.q)
    return float(m.l_max)
