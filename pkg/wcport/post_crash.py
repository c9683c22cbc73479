"""Post-crash (Merton-type) optimal allocation ψ(λ, σ²) = argmax Φ.

∂_yΦ(y) = λ - σ² y - hazard_moment(ϑ, y) is strictly decreasing, so the
maximizer is 0, the cap 1/l_max, or the unique root in between.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from wcport.errors import DomainError, SolverError
from wcport.jumps import ArrayLike, JumpMeasure, hazard_moment, as_output

BoundaryCase = Literal["interior", "at_zero", "at_cap"]

MAX_BISECTIONS = 200
ROOT_TOL = 1e-12


@dataclass(frozen=True)
class PsiResult:
    value: float
    boundary_case: BoundaryCase


def _check_sigma(sigma_sq):
    if np.any(np.asarray(sigma_sq) <= 0.0):
        raise DomainError("sigma_sq must be > 0")


def merton_no_jump(lam: ArrayLike, sigma_sq: ArrayLike) -> ArrayLike:
    """Classical Merton ratio (λ/σ²) ∨ 0."""
    _check_sigma(sigma_sq)
    return as_output(np.maximum(np.asarray(lam, dtype=float) / np.asarray(sigma_sq, dtype=float), 0.0))


def psi_closed_atom(lam: ArrayLike, sigma_sq: ArrayLike, L: float) -> ArrayLike:
    """Maximizer of Φ for ϑ = δ_L, clamped to [0, 1/L].

    Smaller root of Lσ²y² - (λL + σ²)y + (λ - L) = 0, written as
    2(λ - L) / (λL + σ² + √disc) to avoid cancellation.
    """
    _check_sigma(sigma_sq)
    if not 0.0 < L < 1.0:
        raise DomainError("atom size L must be in (0, 1)")
    lam = np.asarray(lam, dtype=float)
    s2 = np.asarray(sigma_sq, dtype=float)
    disc = L**2 * (lam**2 + 4.0 * s2) - 2.0 * L * lam * s2 + s2**2
    root = 2.0 * (lam - L) / (lam * L + s2 + np.sqrt(disc))
    return as_output(np.clip(root, 0.0, 1.0 / L))


def _slope(lam, s2, m: JumpMeasure, y):
    return lam - s2 * y - np.asarray(hazard_moment(m, y))


def _bisect(lam: np.ndarray, s2: np.ndarray, m: JumpMeasure, hi: float) -> np.ndarray:
    lo_b = np.zeros_like(lam)
    hi_b = np.full_like(lam, hi)
    mid = 0.5 * (lo_b + hi_b)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo_b + hi_b)
        d = _slope(lam, s2, m, mid)
        if np.all(np.abs(d) <= ROOT_TOL) or np.all(hi_b - lo_b <= 4.0 * np.finfo(float).eps * np.maximum(hi_b, 1.0)):
            return mid
        positive = d > 0.0
        lo_b = np.where(positive, mid, lo_b)
        hi_b = np.where(positive, hi_b, mid)
    if np.any(np.abs(_slope(lam, s2, m, mid)) > 1e-6):
        raise SolverError("bisection for the post-crash strategy did not converge")
    return mid


def merton_strategy(lam: ArrayLike, sigma_sq: ArrayLike, m: JumpMeasure) -> ArrayLike:
    """Vectorized ψ(λ, σ²) for any of the three measure families."""
    _check_sigma(sigma_sq)
    lam, s2 = np.broadcast_arrays(np.asarray(lam, dtype=float), np.asarray(sigma_sq, dtype=float))
    if m.kind == "none":
        return merton_no_jump(lam, s2)
    if m.kind == "atom" and m.q == m.l_max:
        return psi_closed_atom(lam, s2, m.q)

    shape = lam.shape
    lam = np.atleast_1d(lam).ravel()
    s2 = np.atleast_1d(s2).ravel()
    out = np.zeros(lam.shape)
    slope0 = lam - hazard_moment(m, 0.0)
    cap = m.cap
    inner = slope0 > 0.0
    if m.kind == "atom":
        # q < l_max: the jump integral stays finite at the cap
        at_cap = inner & (_slope(lam, s2, m, cap) >= 0.0)
        out = np.where(at_cap, cap, out)
        inner = inner & ~at_cap
    if np.any(inner):
        roots = _bisect(lam[inner], s2[inner], m, min(cap, m.pole))
        out[inner] = roots
    return as_output(out.reshape(shape))


def psi_numeric(lam: float, sigma_sq: float, m: JumpMeasure) -> PsiResult:
    """Scalar maximizer with the boundary case made explicit."""
    _check_sigma(sigma_sq)
    if m.kind == "none":
        value = float(merton_no_jump(lam, sigma_sq))
        return PsiResult(value, "interior" if value > 0.0 else "at_zero")

    if lam - hazard_moment(m, 0.0) <= 0.0:
        return PsiResult(0.0, "at_zero")
    if m.kind == "atom" and m.q < m.l_max and _slope(lam, sigma_sq, m, m.cap) >= 0.0:
        return PsiResult(m.cap, "at_cap")

    lam_a = np.array([lam], dtype=float)
    s2_a = np.array([sigma_sq], dtype=float)
    value = float(_bisect(lam_a, s2_a, m, min(m.cap, m.pole))[0])
    return PsiResult(value, "interior")


def appropriate_lambda(alpha: ArrayLike, sigma_sq: ArrayLike, m: JumpMeasure) -> ArrayLike:
    """Excess return making ψ(λ, σ²) = α: σ²α plus the jump safety loading."""
    a = np.asarray(alpha, dtype=float)
    if np.any(a <= 0.0) or np.any(a >= m.pole) or (m.kind != "none" and np.any(a >= m.cap)):
        raise DomainError(f"alpha must be in (0, {m.cap:g})")
    return as_output(np.asarray(sigma_sq, dtype=float) * a + np.asarray(hazard_moment(m, a)))

