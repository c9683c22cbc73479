import numpy as np
from scipy.integrate import trapezoid

from wcport.checks.report import ReportRow, VerificationReport, mean_se
from wcport.factors.paths import CHUNK, PathBundle
from wcport.interfaces import Check
from wcport.market import ModelSpec, generator
from wcport.solvers.surface import ValueSurface


def all_cash_cost(model: ModelSpec, paths: PathBundle, x_floor: float = 0.0) -> np.ndarray:
    """Per path ∫₀^T f(z_s, 0) ds, trapezoid rule on the path grid."""
    out = np.empty(paths.n_paths)
    for start in range(0, paths.n_paths, CHUNK):
        z = paths.values[start:start + CHUNK]
        f0 = np.asarray(generator(model, z, np.zeros_like(z), x_floor))
        out[start:start + CHUNK] = trapezoid(f0, dx=paths.dt, axis=1)
    return out


def cash_lower_bound_check(
    model: ModelSpec,
    surface: ValueSurface,
    paths: PathBundle,
    k: float = 4.0,
    x_floor: float = 0.0,
) -> VerificationReport:
    """v(0, z0) ≤ E[∫₀^T f(z_s, 0) ds] + k·SE: π̂ does at least as well as holding cash."""
    v0 = float(surface.at(0.0, model.factor.z0))
    mean, se = mean_se(all_cash_cost(model, paths, x_floor))
    slack = mean - v0
    threshold = -k * se - 1e-12
    report = VerificationReport("cash-bound", k=k, seed=paths.seed)
    report.add_row(ReportRow(0.0, slack, se, threshold, slack >= threshold, label="slack"))
    report.notes.update(v0=v0, all_cash_mean=mean, all_cash_se=se)
    return report


class CashBoundCheck(Check):
    CHECK_KEY = "cash-bound"

    def run(self, context) -> VerificationReport:
        return cash_lower_bound_check(context.model, context.surface, context.paths, k=context.k, x_floor=context.x_floor())
