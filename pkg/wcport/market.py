"""Market model: factor dynamics, coefficient maps, Φ and the indifference generator."""

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Optional, Tuple

import numpy as np

from wcport.errors import DomainError, ValidationError
from wcport.jumps import ArrayLike, JumpMeasure, as_output, hazard_moment, log_moment
from wcport.post_crash import merton_strategy

FactorKind = Literal["cir", "ou", "static"]
SigmaKind = Literal["sqrt", "constant"]
LambdaKind = Literal["appropriate", "linear", "constant", "identity"]


@dataclass(frozen=True)
class CrashSpec:
    l_woc: float
    l_levy_max: float

    def __post_init__(self):
        if not 0.0 < self.l_woc < 1.0:
            raise ValidationError("l_woc must be in (0, 1)")
        if not 0.0 < self.l_levy_max < 1.0:
            raise ValidationError("l_levy_max must be in (0, 1)")
        if not self.l_levy_max < self.l_woc:
            raise ValidationError("l_levy_max must be < l_woc")

    @property
    def cap(self) -> float:
        """Pre-crash admissibility bound 1/l_woc."""
        return 1.0 / self.l_woc


@dataclass(frozen=True)
class FactorDynamics:
    kind: FactorKind
    kappa: float = 0.0
    theta: float = 0.0
    varsigma: float = 0.0
    z0: float = 0.0

    def __post_init__(self):
        if self.kind not in ("cir", "ou", "static"):
            raise ValidationError(f"unknown factor kind '{self.kind}'")
        if self.kind == "static":
            return
        if not self.kappa > 0.0:
            raise ValidationError("kappa must be > 0")
        if not self.varsigma > 0.0:
            raise ValidationError("varsigma must be > 0")
        if self.kind == "cir":
            if not self.theta > 0.0:
                raise ValidationError("theta must be > 0")
            if not self.z0 >= 0.0:
                raise ValidationError("z0 must be >= 0")

    @classmethod
    def static(cls, z0: float) -> "FactorDynamics":
        """Frozen factor: μ ≡ 0, ς ≡ 0."""
        return cls("static", z0=z0, theta=z0)

    @property
    def feller_index(self) -> Optional[float]:
        if self.kind != "cir":
            return None
        return 2.0 * self.kappa * self.theta / self.varsigma**2

    @property
    def stationary_sd(self) -> float:
        if self.kind == "cir":
            return math.sqrt(self.theta * self.varsigma**2 / (2.0 * self.kappa))
        if self.kind == "ou":
            return self.varsigma / math.sqrt(2.0 * self.kappa)
        return 0.0

    def drift(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        if self.kind == "static":
            return as_output(np.zeros_like(x))
        return as_output(self.kappa * (self.theta - x))

    def diffusion(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        if self.kind == "static":
            return as_output(np.zeros_like(x))
        if self.kind == "cir":
            return as_output(self.varsigma * np.sqrt(np.maximum(x, 0.0)))
        return as_output(np.full_like(x, self.varsigma))

    def domain(self) -> Tuple[float, float]:
        """Truncated solver domain [x_min, x_max].

        CIR: [0, θ + 8 sd] rounded up on a 2·10^k grid; OU: θ ± 6 sd.
        """
        if self.kind == "cir":
            raw = self.theta + 8.0 * self.stationary_sd
            step = 10.0 ** math.floor(math.log10(raw)) / 5.0
            return 0.0, math.ceil(raw / step - 1e-9) * step
        if self.kind == "ou":
            half = 6.0 * self.stationary_sd
            return self.theta - half, self.theta + half
        width = max(abs(self.z0), 1.0)
        return self.z0 - width, self.z0 + width


@dataclass(frozen=True)
class CoefficientMap:
    """σ²(x) and λ(x) given by named presets.

    `lambda_value` is λ₀ for `constant` and the jump safety loading
    hazard_moment(ϑ, α) for `appropriate`.
    """

    sigma_kind: SigmaKind = "sqrt"
    sigma_value: float = 0.0
    lambda_kind: LambdaKind = "linear"
    alpha: Optional[float] = None
    lambda_value: float = 0.0

    def __post_init__(self):
        if self.sigma_kind not in ("sqrt", "constant"):
            raise ValidationError(f"unknown sigma_sq preset '{self.sigma_kind}'")
        if self.sigma_kind == "constant" and not self.sigma_value > 0.0:
            raise ValidationError("sigma_sq_value must be > 0")
        if self.lambda_kind not in ("appropriate", "linear", "constant", "identity"):
            raise ValidationError(f"unknown lambda preset '{self.lambda_kind}'")
        if self.lambda_kind in ("appropriate", "linear") and not (self.alpha or 0.0) > 0.0:
            raise ValidationError("alpha must be > 0")

    @classmethod
    def appropriate(cls, alpha: float, measure: JumpMeasure, **sigma) -> "CoefficientMap":
        return cls(lambda_kind="appropriate", alpha=alpha, lambda_value=float(hazard_moment(measure, alpha)), **sigma)

    @classmethod
    def linear(cls, alpha: float, **sigma) -> "CoefficientMap":
        return cls(lambda_kind="linear", alpha=alpha, **sigma)

    @classmethod
    def constant(cls, lam0: float, **sigma) -> "CoefficientMap":
        return cls(lambda_kind="constant", lambda_value=lam0, **sigma)

    @classmethod
    def identity(cls, **sigma) -> "CoefficientMap":
        return cls(lambda_kind="identity", **sigma)

    def sigma_sq(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        if self.sigma_kind == "constant":
            return as_output(np.full_like(x, self.sigma_value))
        return as_output(np.maximum(x, 0.0))

    def lam(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        if self.lambda_kind == "identity":
            return as_output(x.copy())
        if self.lambda_kind == "constant":
            return as_output(np.full_like(x, self.lambda_value))
        s2 = np.asarray(self.sigma_sq(x))
        return as_output(self.alpha * s2 + self.lambda_value)


@dataclass(frozen=True)
class ModelSpec:
    factor: FactorDynamics
    coeffs: CoefficientMap
    crash: CrashSpec
    measure: JumpMeasure
    r: float = 0.0
    rho: float = 0.0
    T: float = 5.0
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ValidationError("rho must be in [-1, 1]")
        if not self.T > 0.0:
            raise ValidationError("T must be > 0")
        if not math.isclose(self.measure.l_max, self.crash.l_levy_max, rel_tol=1e-12):
            raise ValidationError("measure l_max must equal l_levy_max")

    def frozen(self, x0: Optional[float] = None) -> "ModelSpec":
        """Constant-coefficient copy with σ², λ evaluated at x0 and a static factor."""
        x0 = self.factor.z0 if x0 is None else x0
        s2 = float(self.coeffs.sigma_sq(x0))
        lam0 = float(self.coeffs.lam(x0))
        coeffs = CoefficientMap(sigma_kind="constant", sigma_value=s2, lambda_kind="constant", lambda_value=lam0)
        return replace(self, factor=FactorDynamics.static(x0), coeffs=coeffs, name=f"{self.name}-frozen")

    def with_(self, **changes) -> "ModelSpec":
        return replace(self, **changes)


def _floor(x: np.ndarray, x_floor: float) -> np.ndarray:
    return np.maximum(x, x_floor) if x_floor > 0.0 else x


def merton_policy(model: ModelSpec, x: ArrayLike, x_floor: float = 0.0) -> ArrayLike:
    """π^M(x) = ψ(λ(x), σ²(x)); x is floored at `x_floor` first."""
    xf = _floor(np.asarray(x, dtype=float), x_floor)
    if model.coeffs.lambda_kind == "appropriate" and model.coeffs.alpha < model.measure.cap:
        # ∂_yΦ(α) = 0 identically under the appropriate λ
        return as_output(np.full_like(xf, model.coeffs.alpha))
    return merton_strategy(model.coeffs.lam(xf), model.coeffs.sigma_sq(xf), model.measure)


def phi(model: ModelSpec, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """Φ(x, y) = r + λ(x)y - ½σ²(x)y² + ∫ log(1 - yl) ϑ(dl)."""
    y = np.asarray(y, dtype=float)
    if model.measure.kind != "none" and np.any(y > model.measure.cap):
        raise DomainError(f"allocation must be <= 1/l_levy_max = {model.measure.cap:g}")
    lam = np.asarray(model.coeffs.lam(x))
    s2 = np.asarray(model.coeffs.sigma_sq(x))
    return as_output(model.r + lam * y - 0.5 * s2 * y**2 + np.asarray(log_moment(model.measure, y)))


def exposure_to_strategy(y: ArrayLike, l_woc: float) -> ArrayLike:
    """π̂ = (1 - e^{-(y ∨ 0)}) / l_woc, in [0, 1/l_woc)."""
    y = np.asarray(y, dtype=float)
    pi = -np.expm1(-np.maximum(y, 0.0)) / l_woc
    # for y past ~37 the quotient rounds onto 1/l_woc itself
    top = np.nextafter(1.0 / l_woc, 0.0)
    if top * l_woc >= 1.0:
        top = np.nextafter(top, 0.0)
    return as_output(np.minimum(pi, top))


def strategy_to_exposure(pi: ArrayLike, l_woc: float) -> ArrayLike:
    """Utility crash exposure Υ = -log(1 - π l_woc)."""
    pi = np.asarray(pi, dtype=float)
    if np.any(np.isnan(pi)) or np.any(pi < 0.0) or np.any(pi * l_woc >= 1.0):
        raise DomainError(f"allocation must be in [0, 1/l_woc = {1.0 / l_woc:g})")
    return as_output(-np.log1p(-pi * l_woc))


def generator(
    model: ModelSpec,
    x: ArrayLike,
    y: ArrayLike,
    x_floor: float = 0.0,
    pi_m: Optional[ArrayLike] = None,
) -> ArrayLike:
    """Indifference generator f(x, y) = Φ(x, π^M(x)) - Φ(x, p(y)).

    r cancels. `pi_m` may carry a precomputed π^M(x) for the same x.
    """
    x = np.asarray(x, dtype=float)
    if pi_m is None:
        pi_m = merton_policy(model, x, x_floor)
    pi_m = np.asarray(pi_m, dtype=float)
    p = np.asarray(exposure_to_strategy(y, model.crash.l_woc))
    lam = np.asarray(model.coeffs.lam(x))
    s2 = np.asarray(model.coeffs.sigma_sq(x))
    m = model.measure
    best = lam * pi_m - 0.5 * s2 * pi_m**2 + np.asarray(log_moment(m, pi_m))
    held = lam * p - 0.5 * s2 * p**2 + np.asarray(log_moment(m, p))
    return as_output(best - held)


@dataclass(frozen=True)
class ConditionsReport:
    model: str
    feller_index: Optional[float]
    feller_ok: Optional[bool]
    exp_moment_threshold: float
    exp_moment_threshold_horizon: float
    admissible_cap: float
    alpha: Optional[float]
    alpha_exceeds_cap: Optional[bool]
    crash_ordering_ok: bool
    generator_lipschitz: float

    def rows(self):
        fmt = lambda v: "n/a" if v is None else (f"{v:.6g}" if isinstance(v, float) else str(v))
        return [
            ("Feller index 2κθ/ς̃²", fmt(self.feller_index)),
            ("Feller condition (> 1)", fmt(self.feller_ok)),
            ("exp-moment threshold 2κ/ς̃²", fmt(self.exp_moment_threshold)),
            ("exp-moment threshold at T", fmt(self.exp_moment_threshold_horizon)),
            ("admissible cap 1/l_woc", fmt(self.admissible_cap)),
            ("preset alpha", fmt(self.alpha)),
            ("alpha exceeds cap", fmt(self.alpha_exceeds_cap)),
            ("l_levy_max < l_woc", fmt(self.crash_ordering_ok)),
            ("generator Lipschitz K", fmt(self.generator_lipschitz)),
        ]


def check_conditions(model: ModelSpec) -> ConditionsReport:
    f = model.factor
    if f.kind == "cir":
        threshold = 2.0 * f.kappa / f.varsigma**2
        threshold_T = threshold / -math.expm1(-f.kappa * model.T)
    else:
        threshold = threshold_T = math.inf

    alpha = model.coeffs.alpha
    cap = model.crash.cap

    x_min, x_max = f.domain()
    xs = np.linspace(x_min, x_max, 401)
    lam_neg = float(np.max(np.maximum(-np.asarray(model.coeffs.lam(xs)), 0.0)))
    s2_max = float(np.max(model.coeffs.sigma_sq(xs)))
    l = model.crash.l_woc
    lipschitz = max(1.0 / l, 1.0 / (2.0 * l**2)) * max(lam_neg, s2_max)

    feller = f.feller_index
    return ConditionsReport(
        model=model.name,
        feller_index=feller,
        feller_ok=None if feller is None else feller > 1.0,
        exp_moment_threshold=threshold,
        exp_moment_threshold_horizon=threshold_T,
        admissible_cap=cap,
        alpha=alpha,
        alpha_exceeds_cap=None if alpha is None else alpha > cap,
        crash_ordering_ok=model.crash.l_levy_max < model.crash.l_woc,
        generator_lipschitz=lipschitz,
    )
