"""Martingale check of Z_t = -Υ_t + ∫₀ᵗ (Φ(π_s) - Φ(π^M_s)) ds along factor paths."""

from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from wcport.checks.report import VerificationReport, mean_se
from wcport.console import warn
from wcport.errors import VerificationError
from wcport.factors.paths import CHUNK, PathBundle
from wcport.interfaces import Check
from wcport.market import ModelSpec, merton_policy, phi, strategy_to_exposure
from wcport.solvers.surface import PolicySurface, eval_policy

MAX_CLAMP_RATE = 0.01
ALLOWANCE_ATOL = 1e-8


def _policy_on_paths(model: ModelSpec, policy: PolicySurface, times, z, x_floor: float):
    pi_hat = np.asarray(eval_policy(policy, np.broadcast_to(times, z.shape), z))
    pi_m = np.asarray(merton_policy(model, z, x_floor))
    return pi_hat, pi_m


def z_process(model: ModelSpec, policy: PolicySurface, times: np.ndarray, z: np.ndarray, x_floor: float = 0.0) -> np.ndarray:
    """Z on every node of `times` for paths `z` (rows); trapezoid rule in time."""
    pi_hat, pi_m = _policy_on_paths(model, policy, times, z, x_floor)
    gap = np.asarray(phi(model, z, pi_hat)) - np.asarray(phi(model, z, pi_m))
    dt = float(times[1] - times[0])
    integral = cumulative_trapezoid(gap, dx=dt, axis=1, initial=0.0)
    return integral - np.asarray(strategy_to_exposure(pi_hat, model.crash.l_woc))


def _checkpoint_index(times: np.ndarray, t: float) -> int:
    return int(np.argmin(np.abs(times - t)))


def martingale_check(
    model: ModelSpec,
    policy: PolicySurface,
    paths: PathBundle,
    checkpoints: Sequence[float],
    k: float = 4.0,
    x_floor: float = 0.0,
) -> VerificationReport:
    """E[Z_t] - Z_0 with SE at each checkpoint.

    The discretization allowance is |dev(2Δt) - dev(Δt)|, taken from the same
    paths thinned to every other node, plus ALLOWANCE_ATOL.
    """
    times = paths.times
    idx = [_checkpoint_index(times, t) for t in checkpoints]
    halvable = paths.n_steps % 2 == 0
    idx_half = [i // 2 for i in idx]

    policy.reset_diagnostics()
    dev_full = np.empty((paths.n_paths, len(idx)))
    dev_half = np.empty_like(dev_full)
    for start in range(0, paths.n_paths, CHUNK):
        z = paths.values[start:start + CHUNK]
        zp = z_process(model, policy, times, z, x_floor)
        dev_full[start:start + CHUNK] = zp[:, idx] - zp[:, :1]
        if start == 0:
            z0 = float(zp[0, 0])
        if halvable:
            zh = z_process(model, policy, times[::2], z[:, ::2], x_floor)
            dev_half[start:start + CHUNK] = zh[:, idx_half] - zh[:, :1]

    rate = policy.clamp_rate
    if rate > MAX_CLAMP_RATE:
        raise VerificationError(f"grid clamp rate {rate:.2%} exceeds {MAX_CLAMP_RATE:.0%}; widen the space domain")
    if policy.clamp_flag:
        warn(f"[martingale] {policy.clamped} of {policy.queries} policy queries clamped to the grid")

    report = VerificationReport("martingale", k=k, seed=paths.seed)
    for col, t in enumerate(checkpoints):
        est, se = mean_se(dev_full[:, col])
        allowance = ALLOWANCE_ATOL
        if halvable:
            allowance += abs(float(np.mean(dev_half[:, col])) - est)
        report.add(t, est, se, allowance)
    report.notes["clamp_rate"] = rate
    report.notes["z0"] = z0
    return report


def merton_bound_report(model: ModelSpec, policy: PolicySurface, paths: PathBundle, x_floor: float = 0.0) -> VerificationReport:
    """Fraction of path nodes where π̂ exceeds π^M, per checkpoint column."""
    pi_hat, pi_m = _policy_on_paths(model, policy, paths.times, paths.values, x_floor)
    above = pi_hat > pi_m + 1e-12
    report = VerificationReport("merton-bound", k=0.0, seed=paths.seed)
    frac = float(np.mean(above))
    excess = float(np.max(pi_hat - pi_m)) if above.any() else 0.0
    report.notes["fraction_above_merton"] = frac
    report.notes["max_excess"] = excess
    report.add(paths.times[-1], frac, 0.0, allowance=1.0, label="fraction")
    return report


class MartingaleCheck(Check):
    CHECK_KEY = "martingale"

    def run(self, context) -> VerificationReport:
        return martingale_check(
            context.model,
            context.policy,
            context.paths,
            context.checkpoints,
            k=context.k,
            x_floor=context.x_floor(),
        )
