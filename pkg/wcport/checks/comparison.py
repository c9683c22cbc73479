"""Ordering of indifference exposures for ordered constant-coefficient generators."""

from typing import Union

import numpy as np

from wcport.checks.report import ReportRow, VerificationReport
from wcport.errors import VerificationError
from wcport.interfaces import Check
from wcport.market import ModelSpec, strategy_to_exposure
from wcport.solvers.ode import FrozenGenerator, integrate_backward

ORDER_TOL = 1e-10
PRECHECK_TOL = 1e-12

GeneratorLike = Union[FrozenGenerator, ModelSpec]


def _as_generator(g: GeneratorLike) -> FrozenGenerator:
    return g if isinstance(g, FrozenGenerator) else FrozenGenerator.at_start(g)


def default_y_max(l_woc: float) -> float:
    """Exposure of 99.9% of the admissible cap."""
    return float(strategy_to_exposure(0.999 / l_woc, l_woc))


def comparison_check(
    lo: GeneratorLike,
    hi: GeneratorLike,
    n_t: int = 1000,
    y_max: float = None,
    n_y: int = 201,
    n_checkpoints: int = 11,
) -> VerificationReport:
    """Solve both reference ODEs and require v_lo ≤ v_hi + 1e-10 on every node.

    Raises VerificationError unless f_lo ≤ f_hi on a y-grid over [0, y_max].
    """
    lo, hi = _as_generator(lo), _as_generator(hi)
    T = lo.model.T
    if not np.isclose(T, hi.model.T):
        raise VerificationError("models must share the horizon T")
    if y_max is None:
        y_max = default_y_max(lo.model.crash.l_woc)

    ys = np.linspace(0.0, y_max, n_y)
    gap = np.asarray(hi(ys)) - np.asarray(lo(ys))
    if np.any(gap < -PRECHECK_TOL):
        worst = int(np.argmin(gap))
        raise VerificationError(f"generators are not ordered: f_hi - f_lo = {gap[worst]:.3e} at y = {ys[worst]:.4g}")

    times, v_lo = integrate_backward(lo, T, n_t)
    _, v_hi = integrate_backward(hi, T, n_t)
    diff = v_hi - v_lo

    report = VerificationReport("comparison", k=0.0)
    for t in np.linspace(0.0, T, n_checkpoints):
        i = int(np.argmin(np.abs(times - t)))
        d = float(diff[i])
        report.add_row(ReportRow(float(times[i]), d, 0.0, -ORDER_TOL, d >= -ORDER_TOL))
    lowest = float(diff.min())
    report.add_row(ReportRow(T, lowest, 0.0, -ORDER_TOL, lowest >= -ORDER_TOL, label="all-nodes"))
    report.notes.update(min_difference=lowest, max_difference=float(diff.max()), min_generator_gap=float(gap.min()))
    return report


class ComparisonCheck(Check):
    """Frozen model against itself shifted by 0.01."""

    CHECK_KEY = "comparison"
    SHIFT = 0.01

    def run(self, context) -> VerificationReport:
        frozen = context.model.frozen()
        return comparison_check(
            FrozenGenerator.at_start(frozen),
            FrozenGenerator.at_start(frozen, shift=self.SHIFT),
            n_t=context.solver.n_t,
        )
