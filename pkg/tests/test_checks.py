import math

import numpy as np
import pytest

from wcport.checks.cash_bound import CashBoundCheck, all_cash_cost, cash_lower_bound_check
from wcport.checks.comparison import comparison_check, default_y_max
from wcport.checks.context import CheckContext
from wcport.checks.factory import get_check, list_checks
from wcport.checks.martingale import martingale_check, merton_bound_report, z_process
from wcport.checks.report import ReportRow, VerificationReport, mean_se
from wcport.checks.wealth import WealthCheck, small_jump_correction, wealth_representation_check
from wcport.config import SolverConfig
from wcport.errors import VerificationError
from wcport.factors.paths import RngSpec, simulate_paths
from wcport.jumps import JumpMeasure
from wcport.market import CoefficientMap, phi
from wcport.presets import model_a, model_b, model_c
from wcport.solvers.ode import FrozenGenerator, solve_ode_constant
from wcport.solvers.surface import (
    PolicySurface,
    SpaceGrid,
    default_space_grid,
    policy_surface,
    surface_from_curve,
    zero_policy,
)

N_T = 1000


def _ode_surface(model, n_t=N_T):
    times, v = solve_ode_constant(model, n_t=n_t)
    return surface_from_curve(times, v, default_space_grid(model, 10))


def _static_paths(model, n_paths, n_t=N_T):
    return simulate_paths(model.factor, n_paths, n_t, model.T, RngSpec(7))


def _constant_policy(model, value, n_t):
    times = np.linspace(0.0, model.T, n_t + 1)
    grid = default_space_grid(model, 10)
    return PolicySurface(times, grid, np.full((n_t + 1, grid.n_x + 1), value), model.crash.l_woc)


# --- martingale ---


def test_martingale_holds_for_the_indifference_policy(frozen_c):
    surface = _ode_surface(frozen_c)
    policy = policy_surface(surface, frozen_c.crash.l_woc)
    paths = _static_paths(frozen_c, 10_000)
    checkpoints = np.linspace(0.0, frozen_c.T, 11)

    report = martingale_check(frozen_c, policy, paths, checkpoints)
    assert report.passed
    assert len(report.rows) == 11
    assert report.rows[0].estimate == 0.0
    assert report.notes["z0"] == pytest.approx(-surface.v[0, 0], rel=1e-9)
    assert report.notes["clamp_rate"] == 0.0


def test_martingale_drifts_down_for_cash(frozen_c):
    times = np.linspace(0.0, frozen_c.T, N_T + 1)
    policy = zero_policy(times, default_space_grid(frozen_c, 10), frozen_c.crash.l_woc)
    paths = _static_paths(frozen_c, 50)
    report = martingale_check(frozen_c, policy, paths, np.linspace(0.0, frozen_c.T, 11))
    assert np.all(np.diff(report.estimates) < 0.0)
    # Z_T = -T·f(θ, 0) when π̂ ≡ 0
    assert report.estimates[-1] == pytest.approx(-0.21875, rel=1e-9)
    assert not report.passed


def test_z_process_starts_at_minus_exposure(frozen_c):
    surface = _ode_surface(frozen_c)
    policy = policy_surface(surface, frozen_c.crash.l_woc)
    paths = _static_paths(frozen_c, 3)
    zp = z_process(frozen_c, policy, paths.times, paths.values)
    np.testing.assert_allclose(zp[:, 0], -surface.v[0, 0], rtol=1e-12)
    np.testing.assert_allclose(zp[:, -1], zp[:, 0], atol=1e-8)


def test_martingale_rejects_a_grid_that_misses_the_paths(frozen_c):
    times = np.linspace(0.0, frozen_c.T, 101)
    policy = zero_policy(times, SpaceGrid(0.5, 0.6, 10), frozen_c.crash.l_woc)
    paths = _static_paths(frozen_c, 20, n_t=100)
    with pytest.raises(VerificationError, match="clamp rate"):
        martingale_check(frozen_c, policy, paths, [0.0, frozen_c.T])


def test_policy_stays_below_merton_for_frozen_model(frozen_c):
    policy = policy_surface(_ode_surface(frozen_c), frozen_c.crash.l_woc)
    report = merton_bound_report(frozen_c, policy, _static_paths(frozen_c, 10))
    assert report.notes["fraction_above_merton"] == 0.0
    assert report.notes["max_excess"] == 0.0
    assert report.passed


# --- wealth ---


def test_wealth_without_risk_is_deterministic(frozen_c):
    model = frozen_c.with_(r=0.03)
    times = np.linspace(0.0, model.T, N_T + 1)
    cash = zero_policy(times, default_space_grid(model, 10), model.crash.l_woc)
    report = wealth_representation_check(model, cash, cash, tau=math.inf, n_paths=100)
    assert report.passed
    assert report.rows[0].estimate == 0.0
    assert report.notes["direct_mean"] == pytest.approx(0.15, abs=1e-12)
    assert report.notes["jump_count_mean"] == 0.0


def test_wealth_atom_jumps_arrive_at_unit_rate():
    model = model_b().frozen()
    policy = _constant_policy(model, 1.0, 200)
    report = wealth_representation_check(model, policy, tau=math.inf, n_paths=4000, rng=RngSpec(3))
    assert report.passed
    mean, se = report.notes["jump_count_mean"], report.notes["jump_count_se"]
    assert abs(mean - model.T) <= 4.0 * se


def test_wealth_reciprocal_jumps_report_truncation():
    model = model_a().frozen()
    policy = _constant_policy(model, 1.0, 100)
    report = wealth_representation_check(model, policy, tau=math.inf, n_paths=2000, rng=RngSpec(4))
    rate = math.log(0.2 / 1e-4)
    mean, se = report.notes["jump_count_mean"], report.notes["jump_count_se"]
    assert abs(mean - rate * model.T) <= 4.0 * se
    assert report.notes["truncation_shift"] > 0.0
    assert report.passed


def test_wealth_crash_term_is_deterministic_for_frozen_model(frozen_c):
    surface = _ode_surface(frozen_c, n_t=200)
    policy = policy_surface(surface, frozen_c.crash.l_woc)
    report = wealth_representation_check(frozen_c, policy, tau=2.5, n_paths=500, rng=RngSpec(5))
    pi = policy.pi[:-1, 0].copy()
    pi[100:] = 2.5
    expected = float(np.sum(phi(frozen_c, frozen_c.factor.z0, pi))) * 0.025 + math.log1p(-policy.pi[100, 0] * 0.5)
    assert report.notes["tau"] == 2.5
    assert report.notes["represented_se"] == pytest.approx(0.0, abs=1e-15)
    assert report.notes["represented_mean"] == pytest.approx(expected, rel=1e-10)
    assert report.passed


def test_small_jump_correction():
    pi = np.array([0.0, 1.0, 2.0])
    np.testing.assert_allclose(small_jump_correction(JumpMeasure.none(), pi, 0.1), 0.0)
    corr = small_jump_correction(JumpMeasure.reciprocal(0.2), pi, 0.1)
    assert corr[0] == 0.0
    # Li2(u) ≈ u for small u
    np.testing.assert_allclose(corr[1:], -0.1 * pi[1:] * 1e-4, rtol=1e-3)


@pytest.mark.slow
def test_wealth_representation_for_solved_policy():
    context = CheckContext(model_b(), solver=SolverConfig(n_t=200, n_x=60), n_paths=10_000, rng=RngSpec(0))
    report = WealthCheck().run(context)
    assert report.passed
    assert report.notes["tau"] == pytest.approx(2.5)


# --- comparison ---


def test_comparison_of_identical_generators(frozen_c):
    report = comparison_check(frozen_c, frozen_c, n_t=200)
    assert report.passed
    assert report.notes["min_difference"] == 0.0
    assert report.rows[-1].label == "all-nodes"
    assert len(report.rows) == 12


def test_comparison_with_shifted_generator(frozen_c):
    lo = FrozenGenerator.at_start(frozen_c)
    hi = FrozenGenerator.at_start(frozen_c, shift=0.01)
    report = comparison_check(lo, hi, n_t=500)
    assert report.passed
    assert report.notes["min_difference"] >= 0.0
    assert report.notes["max_difference"] <= 0.01 * frozen_c.T + 1e-8
    assert report.notes["min_generator_gap"] == pytest.approx(0.01)


def test_comparison_with_larger_risk_premium(frozen_c):
    sigma = {"sigma_kind": "constant", "sigma_value": frozen_c.coeffs.sigma_value}
    hi = frozen_c.with_(coeffs=CoefficientMap.constant(frozen_c.coeffs.lambda_value * 1.1, **sigma))
    report = comparison_check(frozen_c, hi, n_t=500)
    assert report.passed
    assert report.notes["max_difference"] > 0.0


def test_comparison_rejects_unordered_generators(frozen_c):
    lo = FrozenGenerator.at_start(frozen_c)
    hi = FrozenGenerator.at_start(frozen_c, shift=0.01)
    with pytest.raises(VerificationError, match="not ordered"):
        comparison_check(hi, lo)
    with pytest.raises(VerificationError, match="horizon"):
        comparison_check(frozen_c, frozen_c.with_(T=1.0))


def test_default_y_max():
    assert default_y_max(0.5) == pytest.approx(-math.log(0.001))


# --- cash bound ---


def test_cash_bound_for_frozen_model(frozen_c):
    surface = _ode_surface(frozen_c)
    paths = _static_paths(frozen_c, 100)
    np.testing.assert_allclose(all_cash_cost(frozen_c, paths), 0.21875, rtol=1e-12)
    report = cash_lower_bound_check(frozen_c, surface, paths)
    assert report.passed
    assert report.rows[0].estimate > 0.0
    assert report.notes["v0"] == pytest.approx(surface.v[0, 0])


def test_cash_bound_is_tight_without_risk_premium(frozen_c):
    sigma = {"sigma_kind": "constant", "sigma_value": frozen_c.coeffs.sigma_value}
    model = frozen_c.with_(coeffs=CoefficientMap.constant(0.0, **sigma))
    report = cash_lower_bound_check(model, _ode_surface(model, n_t=100), _static_paths(model, 10, n_t=100))
    assert report.rows[0].estimate == 0.0
    assert report.passed


@pytest.mark.slow
def test_cash_bound_for_bates_model():
    context = CheckContext(model_a(), solver=SolverConfig(n_t=200, n_x=60), n_paths=2000, rng=RngSpec(1))
    assert CashBoundCheck().run(context).passed


# --- registry and reports ---


def test_check_registry():
    assert list_checks() == ["cash-bound", "comparison", "martingale", "wealth"]
    assert get_check("comparison").CHECK_KEY == "comparison"
    with pytest.raises(KeyError, match="Unknown check"):
        get_check("nope")


def test_comparison_check_through_context():
    context = CheckContext(model_c(), solver=SolverConfig(n_t=200, n_x=20))
    report = get_check("comparison").run(context)
    assert report.passed


def test_report_semantics():
    report = VerificationReport("demo", k=2.0, seed=5)
    assert report.add(0.0, 0.1, 0.1).passed
    assert not report.add(1.0, -0.3, 0.1).passed
    assert report.add(2.0, 0.3, 0.1, allowance=0.1, label="extra").passed
    report.add_row(ReportRow(3.0, 1.0, 0.0, 0.0, True))

    assert not report.passed
    np.testing.assert_allclose(report.estimates, [0.1, -0.3, 0.3, 1.0])
    assert report.csv_rows()[0] == ("demo", "0.0", "0.1", "0.1", "true")
    assert report.csv_rows()[2][1] == "extra"
    assert "FAIL" in report.summary()
    assert VerificationReport("empty").passed


def test_mean_se():
    mean, se = mean_se([1.0, 2.0, 3.0])
    assert mean == 2.0
    assert se == pytest.approx(1.0 / math.sqrt(3.0))
    assert mean_se([4.0]) == (4.0, 0.0)
