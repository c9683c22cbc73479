"""Run configuration: flat `key = value` files merged over a model preset.

Structural problems (missing '=', unknown keys, unparsable values) raise
`ConfigError` with line and column; semantic ones raise `ValidationError`
naming the failing invariant.
"""

import os
import re
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator
from pydantic import ValidationError as PydanticValidationError

from wcport.errors import ConfigError, ValidationError
from wcport.jumps import JumpMeasure
from wcport.market import CoefficientMap, CrashSpec, FactorDynamics, ModelSpec
from wcport.presets import get_preset, list_presets

_KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _choice(*options):
    def convert(raw: str) -> str:
        if raw not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return raw

    return convert


MODEL_KEYS = {
    "factor": _choice("cir", "ou", "static"),
    "kappa": float,
    "theta": float,
    "varsigma": float,
    "z0": float,
    "sigma_sq": _choice("sqrt", "constant"),
    "sigma_sq_value": float,
    "lambda": _choice("appropriate", "linear", "constant", "identity"),
    "lambda_value": float,
    "alpha": float,
    "measure": _choice("none", "atom", "reciprocal"),
    "q": float,
    "l_woc": float,
    "l_levy_max": float,
    "r": float,
    "rho": float,
    "T": float,
}
SOLVER_KEYS = {"n_t": int, "n_x": int, "theta_w": float, "picard_iters": int, "tol": float, "x_max": float}
SIMULATION_KEYS = {"n_paths": int, "seed": int, "workers": int}
KEYS = {"model": str, **MODEL_KEYS, **SOLVER_KEYS, **SIMULATION_KEYS, "output_dir": str}


class SolverConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n_t: int = 1000
    n_x: int = 200
    theta_w: float = 0.5
    picard_iters: int = 3
    tol: float = 1e-5
    x_max: Optional[float] = None

    @field_validator("n_t", "n_x")
    @classmethod
    def _grid_size(cls, v, info):
        if v < 2:
            raise ValueError(f"{info.field_name} must be >= 2")
        return v

    @field_validator("theta_w")
    @classmethod
    def _weight(cls, v):
        if not 0.0 <= v <= 1.0:
            raise ValueError("theta_w must be in [0, 1]")
        return v

    @field_validator("picard_iters")
    @classmethod
    def _passes(cls, v):
        if v < 1:
            raise ValueError("picard_iters must be >= 1")
        return v

    @field_validator("tol")
    @classmethod
    def _tol(cls, v):
        if not v > 0.0:
            raise ValueError("tol must be > 0")
        return v


class SimulationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n_paths: int = 1000
    seed: int = 0
    workers: int = 1

    @field_validator("n_paths", "workers")
    @classmethod
    def _positive(cls, v, info):
        if v < 1:
            raise ValueError(f"{info.field_name} must be >= 1")
        return v

    @field_validator("seed")
    @classmethod
    def _seed(cls, v):
        if not 0 <= v < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return v


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

    model_name: str
    model: ModelSpec
    solver: SolverConfig = SolverConfig()
    simulation: SimulationConfig = SimulationConfig()
    output_dir: Path = Path("out")

    def ensure_output_dir(self) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        if not os.access(self.output_dir, os.W_OK):
            raise ValidationError(f"output directory {self.output_dir} is not writable")
        return self.output_dir


def _pydantic_message(e: PydanticValidationError) -> str:
    msg = e.errors()[0]["msg"]
    return msg[len("Value error, "):] if msg.startswith("Value error, ") else msg


def tokenize(text: str) -> Dict[str, Tuple[Any, int]]:
    """Map key -> (typed value, line number)."""
    values: Dict[str, Tuple[Any, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno, len(line) - len(line.lstrip()) + 1)
        left, right = line.split("=", 1)
        key = left.strip()
        key_col = len(left) - len(left.lstrip()) + 1
        value_col = len(left) + 2 + (len(right) - len(right.lstrip()))
        if not _KEY_RE.match(key):
            raise ConfigError(f"invalid key '{key}'", lineno, key_col)
        if key not in KEYS:
            raise ConfigError(f"unknown key '{key}'", lineno, key_col)
        if key in values:
            raise ConfigError(f"duplicate key '{key}' (first set on line {values[key][1]})", lineno, key_col)
        value = right.strip()
        if not value:
            raise ConfigError(f"missing value for '{key}'", lineno, value_col)
        try:
            values[key] = (KEYS[key](value), lineno)
        except ValueError as e:
            raise ConfigError(f"bad value '{value}' for '{key}': {e}", lineno, value_col) from None
    return values


def _coefficients(base: CoefficientMap, kv: Dict[str, Any], measure: JumpMeasure) -> CoefficientMap:
    sigma_kind = kv.get("sigma_sq", base.sigma_kind)
    sigma_value = kv.get("sigma_sq_value", base.sigma_value)
    sigma = {"sigma_kind": sigma_kind, "sigma_value": sigma_value}
    lambda_kind = kv.get("lambda", base.lambda_kind)
    alpha = kv.get("alpha", base.alpha)
    if lambda_kind == "appropriate":
        if not (alpha or 0.0) > 0.0:
            raise ValidationError("alpha must be > 0")
        return CoefficientMap.appropriate(alpha, measure, **sigma)
    if lambda_kind == "linear":
        return CoefficientMap.linear(alpha, **sigma)
    if lambda_kind == "constant":
        return CoefficientMap.constant(kv.get("lambda_value", base.lambda_value), **sigma)
    return CoefficientMap.identity(**sigma)


def build_model(name: str, kv: Dict[str, Any]) -> ModelSpec:
    """Preset `name` (or `custom`, based on preset c) with `kv` overrides."""
    if name != "custom" and name not in list_presets():
        raise ValidationError(f"unknown model '{name}' (available: {', '.join(list_presets())}, custom)")
    base = get_preset("c" if name == "custom" else name)

    f = base.factor
    factor = FactorDynamics(
        kv.get("factor", f.kind),
        kappa=kv.get("kappa", f.kappa),
        theta=kv.get("theta", f.theta),
        varsigma=kv.get("varsigma", f.varsigma),
        z0=kv.get("z0", f.z0),
    )
    crash = CrashSpec(kv.get("l_woc", base.crash.l_woc), kv.get("l_levy_max", base.crash.l_levy_max))
    kind = kv.get("measure", base.measure.kind)
    if kind == "atom":
        q = kv.get("q", base.measure.q if base.measure.kind == "atom" else crash.l_levy_max)
        measure = JumpMeasure.atom(q, crash.l_levy_max)
    else:
        measure = JumpMeasure(kind, crash.l_levy_max)
    coeffs = _coefficients(base.coeffs, kv, measure)
    return ModelSpec(
        factor,
        coeffs,
        crash,
        measure,
        r=kv.get("r", base.r),
        rho=kv.get("rho", base.rho),
        T=kv.get("T", base.T),
        name=name,
    )


def parse_override(assignment: str) -> Tuple[str, Any]:
    """`key=value` from the command line, typed like a config line."""
    tokens = tokenize(assignment.replace("=", " = ", 1))
    if len(tokens) != 1:
        raise ConfigError("expected key=value", 1, 1)
    key, (value, _line) = tokens.popitem()
    return key, value


def parse_config(text: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Typed RunConfig from config text; `overrides` (already typed) win over file keys."""
    tokens = tokenize(text)
    kv = {k: v for k, (v, _line) in tokens.items()}
    kv.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if "model" not in kv:
        raise ValidationError("model required")
    name = kv.pop("model")
    try:
        model = build_model(name, {k: kv[k] for k in MODEL_KEYS if k in kv})
        solver = SolverConfig(**{k: kv[k] for k in SOLVER_KEYS if k in kv})
        simulation = SimulationConfig(**{k: kv[k] for k in SIMULATION_KEYS if k in kv})
        return RunConfig(
            model_name=name,
            model=model,
            solver=solver,
            simulation=simulation,
            output_dir=Path(kv.get("output_dir", "out")),
        )
    except PydanticValidationError as e:
        raise ValidationError(_pydantic_message(e)) from None


def model_to_config(model: ModelSpec) -> str:
    """Flat text that `parse_config` turns back into an equal ModelSpec."""
    f, c, m = model.factor, model.coeffs, model.measure
    name = model.name if model.name in list_presets() else "custom"
    lines = [
        f"model = {name}",
        f"factor = {f.kind}",
        f"kappa = {f.kappa!r}",
        f"theta = {f.theta!r}",
        f"varsigma = {f.varsigma!r}",
        f"z0 = {f.z0!r}",
        f"sigma_sq = {c.sigma_kind}",
        f"sigma_sq_value = {c.sigma_value!r}",
        f"lambda = {c.lambda_kind}",
    ]
    if c.alpha is not None:
        lines.append(f"alpha = {c.alpha!r}")
    if c.lambda_kind == "constant":
        lines.append(f"lambda_value = {c.lambda_value!r}")
    lines += [f"measure = {m.kind}", f"l_woc = {model.crash.l_woc!r}", f"l_levy_max = {model.crash.l_levy_max!r}"]
    if m.kind == "atom":
        lines.append(f"q = {m.q!r}")
    lines += [f"r = {model.r!r}", f"rho = {model.rho!r}", f"T = {model.T!r}"]
    return "\n".join(lines) + "\n"
