import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import spence

from wcport.errors import DomainError, ValidationError
from wcport.jumps import (
    JumpMeasure,
    curvature_moment,
    dilog,
    hazard_moment,
    log_moment,
    mean_jump,
)

NONE = JumpMeasure.none(0.2)
ATOM = JumpMeasure.atom(0.2)
RECIP = JumpMeasure.reciprocal(0.2)


def test_log_moment_examples():
    assert log_moment(NONE, 2.5) == 0.0
    assert log_moment(ATOM, 2.5) == pytest.approx(math.log(0.5), abs=1e-12)
    assert log_moment(RECIP, 2.5) == pytest.approx(-0.5822405, abs=1e-7)


def test_hazard_moment_examples():
    assert hazard_moment(NONE, 1.0) == 0.0
    assert hazard_moment(ATOM, 2.5) == pytest.approx(0.4, abs=1e-12)
    assert hazard_moment(RECIP, 2.5) == pytest.approx(0.2772589, abs=1e-7)
    assert hazard_moment(RECIP, 0.0) == pytest.approx(0.2)


def test_mean_jump():
    assert mean_jump(NONE) == 0.0
    assert mean_jump(ATOM) == 0.2
    assert mean_jump(RECIP) == 0.2


def test_dilog_examples():
    assert dilog(0.0) == 0.0
    assert dilog(1.0) == pytest.approx(math.pi**2 / 6.0, abs=1e-10)
    assert dilog(0.5) == pytest.approx(0.5822405265, abs=1e-10)


@given(st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=200, deadline=None)
def test_dilog_matches_scipy_spence(x):
    assert dilog(x) == pytest.approx(float(spence(1.0 - x)), abs=1e-11)


def test_dilog_is_vectorized():
    xs = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(dilog(xs), spence(1.0 - xs), atol=1e-11)


def test_reciprocal_log_moment_matches_quadrature():
    for y in np.linspace(0.0, 4.9, 100):
        ref, _ = quad(lambda l: math.log1p(-y * l) / l, 0.0, 0.2, epsabs=1e-13, epsrel=1e-12, limit=200)
        assert log_moment(RECIP, y) == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("y", [0.0, 1e-6, 5e-5, 1e-3, 1.0, 4.0])
def test_reciprocal_curvature_matches_quadrature(y):
    ref, _ = quad(lambda l: l / (1.0 - y * l) ** 2, 0.0, 0.2, epsabs=1e-14)
    assert curvature_moment(RECIP, y) == pytest.approx(ref, rel=1e-8)


def test_moments_vectorize_over_arrays():
    ys = np.array([0.0, 1.0, 2.5])
    assert log_moment(ATOM, ys).shape == (3,)
    assert hazard_moment(RECIP, ys).shape == (3,)


def test_domain_errors():
    with pytest.raises(DomainError):
        log_moment(RECIP, -0.1)
    with pytest.raises(DomainError):
        log_moment(RECIP, 5.0)
    with pytest.raises(DomainError):
        hazard_moment(ATOM, 5.5)
    with pytest.raises(DomainError):
        dilog(1.5)


def test_measure_validation():
    with pytest.raises(ValidationError):
        JumpMeasure.atom(0.3, l_max=0.2)
    with pytest.raises(ValidationError):
        JumpMeasure.reciprocal(1.0)
    with pytest.raises(ValidationError):
        JumpMeasure("gauss", 0.2)


def test_measure_properties():
    assert RECIP.infinite_activity and not ATOM.infinite_activity
    assert ATOM.total_mass == 1.0
    assert NONE.cap == math.inf
    assert RECIP.cap == pytest.approx(5.0)
    q_small = JumpMeasure.atom(0.1, l_max=0.2)
    assert q_small.pole == pytest.approx(10.0)
    assert q_small.cap == pytest.approx(5.0)


MEASURES = [NONE, ATOM, RECIP]
MEASURE_IDS = ["none", "atom", "reciprocal"]


def _y_grid(m, n=200):
    top = 10.0 if m.kind == "none" else m.cap - 1e-3
    return np.linspace(0.0, top, n)


def _quad_log_moment(m, y):
    if m.kind == "none":
        return 0.0
    if m.kind == "atom":
        return math.log1p(-y * m.q)
    value, _ = quad(lambda l: math.log1p(-y * l) / l, 0.0, m.l_max, epsabs=1e-13, epsrel=1e-12, limit=200)
    return value


def _quad_hazard_moment(m, y):
    if m.kind == "none":
        return 0.0
    if m.kind == "atom":
        return m.q / (1.0 - y * m.q)
    value, _ = quad(lambda l: 1.0 / (1.0 - y * l), 0.0, m.l_max, epsabs=1e-13, epsrel=1e-12, limit=200)
    return value


@pytest.mark.parametrize("m", MEASURES, ids=MEASURE_IDS)
def test_moments_are_monotone(m):
    ys = _y_grid(m)
    logs = np.asarray(log_moment(m, ys))
    hazards = np.asarray(hazard_moment(m, ys))
    assert np.all(logs <= 0.0)
    assert np.all(np.diff(logs) <= 0.0)
    assert np.all(hazards >= 0.0)
    assert np.all(np.diff(hazards) >= 0.0)


@pytest.mark.parametrize("m", MEASURES, ids=MEASURE_IDS)
def test_hazard_moment_is_the_slope_of_log_moment(m):
    h = 1e-5
    for y in np.linspace(h, 0.9 * min(m.cap, 10.0), 25):
        slope = (log_moment(m, y + h) - log_moment(m, y - h)) / (2.0 * h)
        assert slope == pytest.approx(-hazard_moment(m, y), rel=1e-6, abs=1e-12)


def test_closed_forms_match_quadrature_on_random_pairs():
    rng = np.random.default_rng(11)
    picks = rng.integers(0, len(MEASURES), 100)
    fractions = rng.uniform(0.0, 0.98, 100)
    for k, u in zip(picks, fractions):
        m = MEASURES[k]
        y = u * min(m.cap, 10.0)
        assert log_moment(m, y) == pytest.approx(_quad_log_moment(m, y), abs=1e-8)
        assert hazard_moment(m, y) == pytest.approx(_quad_hazard_moment(m, y), abs=1e-8)
