import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wcport.errors import DomainError
from wcport.jumps import JumpMeasure, hazard_moment
from wcport.post_crash import (
    appropriate_lambda,
    merton_no_jump,
    merton_strategy,
    psi_closed_atom,
    psi_numeric,
)

NONE = JumpMeasure.none(0.2)
ATOM = JumpMeasure.atom(0.2)
RECIP = JumpMeasure.reciprocal(0.2)


def test_merton_no_jump_examples():
    assert merton_no_jump(0.035, 0.014) == pytest.approx(2.5)
    assert merton_no_jump(-0.01, 0.014) == 0.0
    assert merton_no_jump(0.0, 0.3) == 0.0


def test_merton_no_jump_rejects_degenerate_variance():
    with pytest.raises(DomainError):
        merton_no_jump(0.035, 0.0)


def test_closed_atom_examples():
    assert psi_closed_atom(0.435, 0.014, 0.2) == pytest.approx(2.5, abs=1e-12)
    assert psi_closed_atom(0.0, 0.014, 0.2) == 0.0
    assert 0.0 < psi_closed_atom(0.21, 0.014, 0.2) < 5.0


def test_appropriate_lambda_examples():
    assert appropriate_lambda(2.5, 0.014, RECIP) == pytest.approx(0.3122589, abs=1e-7)
    assert appropriate_lambda(2.5, 0.014, ATOM) == pytest.approx(0.435, abs=1e-12)
    assert appropriate_lambda(2.5, 0.014, NONE) == pytest.approx(0.035, abs=1e-15)


def test_appropriate_lambda_rejects_alpha_beyond_cap():
    with pytest.raises(DomainError):
        appropriate_lambda(5.0, 0.014, RECIP)
    with pytest.raises(DomainError):
        appropriate_lambda(0.0, 0.014, NONE)


@pytest.mark.parametrize("measure", [NONE, ATOM, RECIP], ids=["none", "atom", "reciprocal"])
def test_appropriate_lambda_round_trip(measure):
    lam = appropriate_lambda(2.5, 0.014, measure)
    result = psi_numeric(lam, 0.014, measure)
    assert result.value == pytest.approx(2.5, abs=1e-8)
    assert result.boundary_case == "interior"


def test_psi_numeric_delegates_without_jumps():
    assert psi_numeric(0.035, 0.014, NONE).value == pytest.approx(2.5)


def test_psi_numeric_boundary_cases():
    assert psi_numeric(0.1, 0.014, ATOM).boundary_case == "at_zero"
    small_atom = JumpMeasure.atom(0.1, l_max=0.2)
    capped = psi_numeric(10.0, 0.014, small_atom)
    assert capped.boundary_case == "at_cap"
    assert capped.value == pytest.approx(5.0)


def test_closed_atom_agrees_with_bisection_on_random_draws():
    rng = np.random.default_rng(2024)
    lam = rng.uniform(0.21, 2.0, 100)
    s2 = rng.uniform(0.005, 0.5, 100)
    closed = psi_closed_atom(lam, s2, 0.2)
    bisected = np.array([psi_numeric(l, s, ATOM).value for l, s in zip(lam, s2)])
    np.testing.assert_allclose(closed, bisected, atol=1e-10)


@given(
    lam=st.floats(min_value=-0.5, max_value=3.0),
    s2=st.floats(min_value=1e-3, max_value=1.0),
)
@settings(max_examples=100, deadline=None)
def test_reciprocal_strategy_is_the_maximizer(lam, s2):
    y = float(merton_strategy(lam, s2, RECIP))
    assert 0.0 <= y < RECIP.cap
    slope = lam - s2 * y - hazard_moment(RECIP, y)
    if y > 0.0:
        assert abs(slope) < 1e-9
    else:
        assert slope <= 1e-12


def test_merton_strategy_keeps_shape():
    lam = np.full((3, 4), 0.3122589)
    out = merton_strategy(lam, 0.014, RECIP)
    assert out.shape == (3, 4)
    assert isinstance(merton_strategy(0.035, 0.014, NONE), float)


MEASURES = [NONE, ATOM, RECIP]


def test_appropriate_lambda_round_trip_on_random_draws():
    rng = np.random.default_rng(99)
    for k, u, s2 in zip(rng.integers(0, 3, 100), rng.uniform(0.01, 0.9, 100), rng.uniform(0.005, 0.5, 100)):
        m = MEASURES[k]
        alpha = u * (5.0 if m.kind == "none" else m.cap)
        result = psi_numeric(appropriate_lambda(alpha, s2, m), s2, m)
        assert result.value == pytest.approx(alpha, abs=1e-8)


@pytest.mark.parametrize("measure", MEASURES, ids=["none", "atom", "reciprocal"])
def test_strategy_is_monotone_and_lipschitz_in_lambda(measure):
    rng = np.random.default_rng(5)
    s2 = rng.uniform(0.005, 0.5, 200)
    lam = rng.uniform(-0.5, 3.0, 200)
    lam_other = rng.uniform(-0.5, 3.0, 200)
    psi = np.asarray(merton_strategy(lam, s2, measure))
    psi_other = np.asarray(merton_strategy(lam_other, s2, measure))
    assert np.all(np.abs(psi - psi_other) <= np.abs(lam - lam_other) / s2 + 1e-9)

    lams = np.linspace(-0.5, 3.0, 200)
    assert np.all(np.diff(np.asarray(merton_strategy(lams, 0.014, measure))) >= 0.0)
