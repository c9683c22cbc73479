"""Direct log-wealth simulation against the explicit objective representation.

log X_T = log x + ∫ (r + πλ - ½π²σ²) dt + ∫ πσ dW + Σ log(1 - π ΔL) + log(1 - π_τ l_woc)

is simulated on the factor path grid and compared, path by path, with
log x + ∫ Φ(z_t, π_t) dt + log(1 - π_τ l_woc). Both have the same mean.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from wcport.checks.report import VerificationReport, mean_se
from wcport.console import progress_bar, warn
from wcport.factors.paths import PathBundle, RngSpec, simulate_paths
from wcport.interfaces import Check
from wcport.jumps import JumpMeasure, dilog
from wcport.market import ModelSpec, merton_policy, phi
from wcport.solvers.surface import PolicySurface, eval_policy

SMALL_JUMP_EPS = 1e-4
BROWNIAN_STREAM = 1
JUMP_STREAM = 2


def jump_log_sums(m: JumpMeasure, pi: np.ndarray, dt: float, rng: np.random.Generator, eps: float = SMALL_JUMP_EPS):
    """Per-step Σ log(1 - π_k l) over the jumps of one path, and the jump count.

    Reciprocal jumps below `eps` are not drawn; see `small_jump_correction`.
    """
    n = pi.size
    if m.kind == "none":
        return np.zeros(n), 0
    if m.kind == "atom":
        counts = rng.poisson(dt, size=n)
        return counts * np.log1p(-pi * m.q), int(counts.sum())
    rate = math.log(m.l_max / eps)
    counts = rng.poisson(rate * dt, size=n)
    total = int(counts.sum())
    # density ∝ 1/l on [eps, l_max)
    sizes = eps * (m.l_max / eps) ** rng.random(total)
    step = np.repeat(np.arange(n), counts)
    sums = np.bincount(step, weights=np.log1p(-pi[step] * sizes), minlength=n)
    return sums, total


def small_jump_correction(m: JumpMeasure, pi: np.ndarray, dt: float, eps: float = SMALL_JUMP_EPS) -> np.ndarray:
    """dt·∫₀^ε log(1 - πl) dl/l = -dt·Li₂(πε) for the reciprocal measure, else 0."""
    if m.kind != "reciprocal":
        return np.zeros_like(pi)
    return -dt * np.asarray(dilog(np.clip(pi * eps, 0.0, 1.0)))


def _factor_increments(model: ModelSpec, paths: np.ndarray, dt: float) -> np.ndarray:
    """Ŵ increments implied by the factor path: (Δz - μ dt) / ς, zero where ς = 0."""
    z = paths[:, :-1]
    dz = np.diff(paths, axis=1)
    vol = np.asarray(model.factor.diffusion(z))
    drift = np.asarray(model.factor.drift(z)) * dt
    with np.errstate(divide="ignore", invalid="ignore"):
        dw = np.where(vol > 0.0, (dz - drift) / vol, 0.0)
    return dw


def _strategy(model, pre_policy, post_policy, times, z, k_tau, x_floor):
    """Allocation at the left node of every step: π̂ before step k_tau, post-crash after."""
    n_steps = times.size - 1
    tl = np.broadcast_to(times[:-1], z[:, :-1].shape)
    pi = np.asarray(eval_policy(pre_policy, tl, z[:, :-1]), dtype=float)
    if k_tau < n_steps:
        zl = z[:, k_tau:-1]
        if post_policy is None:
            post = np.asarray(merton_policy(model, zl, x_floor), dtype=float)
        else:
            post = np.asarray(eval_policy(post_policy, tl[:, k_tau:], zl), dtype=float)
        pi[:, k_tau:] = post
    return pi


def wealth_representation_check(
    model: ModelSpec,
    pre_policy: PolicySurface,
    post_policy: Optional[PolicySurface] = None,
    tau: Optional[float] = None,
    n_paths: int = 10_000,
    rng: Optional[RngSpec] = None,
    paths: Optional[PathBundle] = None,
    n_steps: Optional[int] = None,
    k: float = 4.0,
    x_floor: float = 0.0,
    log_x: float = 0.0,
    eps: float = SMALL_JUMP_EPS,
    show_progress: bool = False,
) -> VerificationReport:
    """Direct log X_T against the representation, deterministic crash time τ.

    `tau` defaults to T/2; `math.inf` means no crash. `post_policy=None`
    switches to the Merton policy π^M(z_t) after the crash.
    """
    rng = rng or RngSpec()
    if paths is None:
        n_steps = n_steps or (pre_policy.times.size - 1)
        paths = simulate_paths(model.factor, n_paths, n_steps, model.T, rng, show_progress=show_progress)
    times, z, dt = paths.times, paths.values, paths.dt
    n_steps = paths.n_steps
    tau = 0.5 * model.T if tau is None else tau
    crash = math.isfinite(tau)
    k_tau = min(int(round(tau / dt)), n_steps) if crash else n_steps

    rho = model.rho
    m = model.measure
    direct = np.empty(paths.n_paths)
    represented = np.empty(paths.n_paths)
    counts = np.empty(paths.n_paths)
    shifts = np.zeros(paths.n_paths)

    def run_chunk(ids: range):
        rows = slice(ids.start, ids.stop)
        zc = z[rows]
        pi = _strategy(model, pre_policy, post_policy, times, zc, k_tau, x_floor)
        zl = zc[:, :-1]
        lam = np.asarray(model.coeffs.lam(zl))
        s2 = np.asarray(model.coeffs.sigma_sq(zl))
        drift = (model.r + pi * lam - 0.5 * pi**2 * s2) * dt
        correction = small_jump_correction(m, pi, dt, eps)
        if crash:
            pi_tau = np.asarray(eval_policy(pre_policy, times[k_tau], zc[:, k_tau]), dtype=float)
            crash_term = np.log1p(-pi_tau * model.crash.l_woc)
        else:
            crash_term = np.zeros(len(ids))
        dw_factor = _factor_increments(model, zc, dt) if rho != 0.0 else None

        noise = np.empty(len(ids))
        for row, p in enumerate(ids):
            dw = rng.generator(p, BROWNIAN_STREAM).standard_normal(n_steps) * math.sqrt(dt)
            if dw_factor is not None:
                dw = rho * dw_factor[row] + math.sqrt(1.0 - rho**2) * dw
            jumps, n_jumps = jump_log_sums(m, pi[row], dt, rng.generator(p, JUMP_STREAM), eps)
            noise[row] = np.sum(pi[row] * np.sqrt(s2[row]) * dw + jumps)
            counts[p] = n_jumps

        direct[rows] = log_x + np.sum(drift + correction, axis=1) + noise + crash_term
        represented[rows] = log_x + np.sum(np.asarray(phi(model, zl, pi)) * dt, axis=1) + crash_term
        shifts[rows] = np.abs(np.sum(correction, axis=1))
        return len(ids)

    chunks = rng.chunks(paths.n_paths)
    with progress_bar("Simulating log-wealth", paths.n_paths, enabled=show_progress) as advance:
        if rng.workers == 1:
            for ids in chunks:
                advance(run_chunk(ids))
        else:
            with ThreadPoolExecutor(max_workers=rng.workers) as pool:
                for done in pool.map(run_chunk, chunks):
                    advance(done)

    report = VerificationReport("wealth", k=k, seed=paths.seed)
    est, se = mean_se(direct - represented)
    report.add(model.T, est, se, allowance=1e-12, label="difference")
    d_mean, d_se = mean_se(direct)
    l_mean, l_se = mean_se(represented)
    c_mean, c_se = mean_se(counts)
    report.notes.update(
        direct_mean=d_mean,
        direct_se=d_se,
        represented_mean=l_mean,
        represented_se=l_se,
        jump_count_mean=c_mean,
        jump_count_se=c_se,
        tau=tau,
    )

    if m.kind == "reciprocal":
        shift = float(np.mean(shifts))
        report.notes["truncation_shift"] = shift
        if shift > 0.1 * d_se:
            warn(f"[wealth] small-jump truncation at eps={eps:g} shifts the compensator by {shift:.3e} (> 0.1 SE = {0.1 * d_se:.3e})")
    return report


class WealthCheck(Check):
    CHECK_KEY = "wealth"

    def run(self, context) -> VerificationReport:
        return wealth_representation_check(
            context.model,
            context.policy,
            paths=context.paths,
            rng=context.rng,
            k=context.k,
            x_floor=context.x_floor(),
            show_progress=context.show_progress,
        )
