"""Named models in one registry.

(a) Bates, infinite-activity jumps dl/l; (b) Bates, single atom q = l_max;
(c) Heston with λ = αz; (d) Heston with constant λ = αθ; (ko) Kim-Omberg.
All CIR models share κ=3.99, θ=0.014, ς̃=0.27, z0=θ, T=5.
"""

from typing import Callable, Dict, List

from wcport.jumps import JumpMeasure
from wcport.market import CoefficientMap, CrashSpec, FactorDynamics, ModelSpec

KAPPA = 3.99
THETA = 0.014
VARSIGMA = 0.27
HORIZON = 5.0
ALPHA = 2.5
L_WOC = 0.5
L_LEVY_MAX = 0.2

KO_KAPPA = 3.5
KO_THETA = THETA
KO_VARSIGMA = 0.3


def _crash() -> CrashSpec:
    return CrashSpec(l_woc=L_WOC, l_levy_max=L_LEVY_MAX)


def _cir() -> FactorDynamics:
    return FactorDynamics("cir", kappa=KAPPA, theta=THETA, varsigma=VARSIGMA, z0=THETA)


def model_a() -> ModelSpec:
    measure = JumpMeasure.reciprocal(L_LEVY_MAX)
    return ModelSpec(_cir(), CoefficientMap.appropriate(ALPHA, measure), _crash(), measure, T=HORIZON, name="a")


def model_b() -> ModelSpec:
    # λ²(z) = zα + q/(1 - αq): the sign follows from ∂_yΦ(α) = 0
    measure = JumpMeasure.atom(L_LEVY_MAX)
    return ModelSpec(_cir(), CoefficientMap.appropriate(ALPHA, measure), _crash(), measure, T=HORIZON, name="b")


def model_c() -> ModelSpec:
    return ModelSpec(
        _cir(), CoefficientMap.linear(ALPHA), _crash(), JumpMeasure.none(L_LEVY_MAX), T=HORIZON, name="c"
    )


def model_d() -> ModelSpec:
    return ModelSpec(
        _cir(), CoefficientMap.constant(ALPHA * THETA), _crash(), JumpMeasure.none(L_LEVY_MAX), T=HORIZON, name="d"
    )


def model_ko() -> ModelSpec:
    factor = FactorDynamics("ou", kappa=KO_KAPPA, theta=KO_THETA, varsigma=KO_VARSIGMA, z0=KO_THETA)
    coeffs = CoefficientMap.identity(sigma_kind="constant", sigma_value=KO_THETA)
    return ModelSpec(factor, coeffs, _crash(), JumpMeasure.none(L_LEVY_MAX), T=HORIZON, name="ko")


_PRESETS: Dict[str, Callable[[], ModelSpec]] = {
    "a": model_a,
    "b": model_b,
    "c": model_c,
    "d": model_d,
    "ko": model_ko,
}


def list_presets() -> List[str]:
    return list(_PRESETS.keys())


def get_preset(key: str) -> ModelSpec:
    factory = _PRESETS.get(key)
    if not factory:
        raise KeyError(f"Unknown model '{key}'. Available: {', '.join(list_presets())}")
    return factory()
