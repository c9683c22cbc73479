"""Solve/simulate pipelines behind the CLI and the figure registry."""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np

from wcport.checks.martingale import merton_bound_report
from wcport.config import SimulationConfig, SolverConfig
from wcport.console import info, warn
from wcport.factors.paths import PathBundle, RngSpec, simulate_paths
from wcport.formatters.csv_output import PolicyPathsCsv
from wcport.formatters.svg import Series, SvgOutput, SvgStyle
from wcport.market import ModelSpec, exposure_to_strategy, merton_policy
from wcport.presets import get_preset
from wcport.solvers.ode import solve_ode_constant
from wcport.solvers.pde import solve_pde
from wcport.solvers.surface import PolicySurface, ValueSurface, eval_policy, policy_surface

FigureKind = Literal["policy", "merton", "merton+policy"]


@dataclass(frozen=True)
class FigureSpec:
    number: int
    preset: str
    kind: FigureKind
    title: str


FIGURES: Dict[int, FigureSpec] = {
    1: FigureSpec(1, "a", "policy", "pre-crash strategy, reciprocal jumps"),
    2: FigureSpec(2, "b", "policy", "pre-crash strategy, constant jump size"),
    3: FigureSpec(3, "c", "policy", "pre-crash strategy, no jumps"),
    4: FigureSpec(4, "d", "merton+policy", "post-crash Merton strategy with pre-crash strategy (dashed)"),
    5: FigureSpec(5, "d", "policy", "pre-crash strategy, constant excess return"),
    6: FigureSpec(6, "ko", "merton", "post-crash Merton strategy, OU factor"),
    7: FigureSpec(7, "ko", "policy", "pre-crash strategy, OU factor"),
}

FIGURE_PATHS = 2
# π^M on paths is floored only to stay finite at an exact zero
PATH_X_FLOOR = 1e-300


@dataclass
class PolicyPaths:
    times: np.ndarray
    pi: np.ndarray  # π̂(t, z_t), (n_paths, n_steps + 1)
    pi_m: np.ndarray  # π^M(z_t)
    reference: np.ndarray  # ODE policy with z ≡ θ
    paths: PathBundle


def solve_model(model: ModelSpec, solver: SolverConfig, show_progress: bool = False) -> Tuple[ValueSurface, PolicySurface]:
    surface = solve_pde(model, solver, show_progress=show_progress)
    return surface, policy_surface(surface, model.crash.l_woc)


def reference_policy(model: ModelSpec, n_t: int) -> Tuple[np.ndarray, np.ndarray]:
    """Constant-coefficient policy with the factor frozen at its long-run level θ."""
    times, v = solve_ode_constant(model, n_t, x0=model.factor.theta)
    return times, np.asarray(exposure_to_strategy(v, model.crash.l_woc))


def policy_paths(
    model: ModelSpec,
    solver: SolverConfig,
    sim: SimulationConfig,
    policy: Optional[PolicySurface] = None,
    show_progress: bool = False,
) -> PolicyPaths:
    if policy is None:
        _, policy = solve_model(model, solver, show_progress)
    rng = RngSpec(sim.seed, sim.workers)
    paths = simulate_paths(model.factor, sim.n_paths, solver.n_t, model.T, rng, show_progress=show_progress)
    t = np.broadcast_to(paths.times, paths.values.shape)
    pi = np.asarray(eval_policy(policy, t, paths.values))
    pi_m = np.asarray(merton_policy(model, paths.values, PATH_X_FLOOR))
    _, reference = reference_policy(model, paths.n_steps)
    if policy.clamp_flag:
        warn(f"[policy-paths] {policy.clamped} of {policy.queries} queries clamped to the space grid")
    return PolicyPaths(paths.times, pi, pi_m, reference, paths)


def figure_series(fig: FigureSpec, pp: PolicyPaths) -> List[Series]:
    series: List[Series] = []
    if fig.kind in ("merton", "merton+policy"):
        series += [Series(f"pi_M path {i}", pp.times, pp.pi_m[i]) for i in range(pp.pi_m.shape[0])]
    if fig.kind == "merton+policy":
        series += [Series(f"pi path {i}", pp.times, pp.pi[i], dashed=True) for i in range(pp.pi.shape[0])]
    if fig.kind == "policy":
        series += [Series(f"pi path {i}", pp.times, pp.pi[i]) for i in range(pp.pi.shape[0])]
        series.append(Series("reference z = theta", pp.times, pp.reference, dashed=True))
    return series


def reproduce(
    number: int,
    seed: int = 0,
    out_dir: Path = Path("out"),
    solver: Optional[SolverConfig] = None,
    n_paths: int = FIGURE_PATHS,
    workers: int = 1,
    show_progress: bool = False,
) -> Dict[str, Path]:
    """Full pipeline for one figure: solve, simulate, write fig<k>.csv and fig<k>.svg."""
    if number not in FIGURES:
        raise KeyError(f"Unknown figure {number}. Available: {', '.join(map(str, sorted(FIGURES)))}")
    fig = FIGURES[number]
    model = get_preset(fig.preset)
    solver = solver or SolverConfig()
    info(f"[Figure {number}] model {model.name}: {fig.title}")

    _, policy = solve_model(model, solver, show_progress)
    pp = policy_paths(model, solver, SimulationConfig(n_paths=n_paths, seed=seed, workers=workers), policy, show_progress)

    bound = merton_bound_report(model, policy, pp.paths, PATH_X_FLOOR)
    frac = bound.notes["fraction_above_merton"]
    if frac > 0.0:
        info(f"[Figure {number}] pi exceeds pi_M on {frac:.1%} of path nodes")

    out_dir = Path(out_dir)
    written = {"csv": out_dir / f"fig{number}.csv", "svg": out_dir / f"fig{number}.svg"}
    PolicyPathsCsv().save(pp, written["csv"])
    y_label = "pi_M" if fig.kind == "merton" else "allocation"
    SvgOutput(SvgStyle(title=f"Figure {number}: {fig.title}", y_label=y_label)).save(figure_series(fig, pp), written["svg"])
    return written
