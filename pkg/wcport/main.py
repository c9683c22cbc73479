import argparse
import sys
from pathlib import Path
from typing import List, Optional

from rich.table import Table

from wcport.checks.context import CheckContext
from wcport.checks.factory import get_check, list_checks
from wcport.checks.report import report_table
from wcport.config import RunConfig, parse_config, parse_override
from wcport.console import console, error, info, set_quiet, success
from wcport.errors import WcportError
from wcport.experiments import FIGURE_PATHS, FIGURES, policy_paths, reproduce, solve_model
from wcport.factors.paths import RngSpec, simulate_paths
from wcport.formatters.csv_output import PathBundleCsv, PolicyPathsCsv, ReportCsv, SurfaceCsv
from wcport.market import check_conditions
from wcport.presets import list_presets
from wcport.solvers.surface import eval_policy


def _common(p: argparse.ArgumentParser):
    p.add_argument("--model", default=None, help=f"Model preset ({', '.join(list_presets())}) or 'custom'")
    p.add_argument("--config", default=None, help="Flat 'key = value' config file")
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one config key (repeatable)",
    )
    p.add_argument("--seed", type=int, default=None, help="Master seed for path substreams")
    p.add_argument("--n-paths", dest="n_paths", type=int, default=None, help="Number of simulated paths")
    p.add_argument("--workers", type=int, default=None, help="Threads for path simulation")
    p.add_argument("--out", default=None, help="Output directory")
    p.add_argument("-q", "--quiet", action="store_true", help="Only warnings and errors")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcport",
        description="Worst-case crash portfolio strategies under stochastic factor models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="Print the parameter conditions report")
    _common(p)

    p = sub.add_parser("solve", help="Solve the indifference PDE; write exposure and policy surfaces")
    _common(p)

    p = sub.add_parser("simulate", help="Simulate factor paths")
    _common(p)
    p.add_argument("--n-steps", dest="n_steps", type=int, default=None, help="Time steps (default: solver n_t)")
    p.add_argument(
        "--sampler",
        choices=("gamma", "inverse"),
        default=None,
        help="(CIR) chi-square sampler; 'inverse' couples paths across starting points",
    )

    p = sub.add_parser("policy-paths", help="Policy along simulated paths with the z = theta reference")
    _common(p)

    p = sub.add_parser("verify", help="Run verification checks")
    _common(p)
    p.add_argument("--check", dest="checks", action="append", choices=list_checks(), help="Check to run (repeatable; default all)")
    p.add_argument("-k", dest="k", type=float, default=4.0, help="Pass threshold in standard errors")

    p = sub.add_parser("reproduce", help="Reproduce one figure (CSV + SVG)")
    _common(p)
    p.add_argument("--figure", type=int, required=True, choices=sorted(FIGURES))
    return parser


def resolve_config(args) -> RunConfig:
    """Config file, then --set, then the dedicated flags."""
    text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    overrides = dict(parse_override(a) for a in args.overrides)
    overrides.update(
        model=args.model,
        seed=args.seed,
        n_paths=args.n_paths,
        workers=args.workers,
        output_dir=args.out,
    )
    return parse_config(text, overrides)


def cmd_check(cfg: RunConfig, args) -> int:
    report = check_conditions(cfg.model)
    table = Table(title=f"Conditions for model {cfg.model_name}")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for name, value in report.rows():
        table.add_row(name, value)
    console.print(table)
    return 0


def cmd_solve(cfg: RunConfig, args) -> int:
    surface, policy = solve_model(cfg.model, cfg.solver, show_progress=not args.quiet)
    out = cfg.ensure_output_dir()
    SurfaceCsv("v").save(surface, out / f"{cfg.model_name}_value.csv")
    SurfaceCsv("pi").save(policy, out / f"{cfg.model_name}_policy.csv")
    z0 = cfg.model.factor.z0
    success(f"v(0, z0) = {surface.at(0.0, z0):.6g}, pi(0, z0) = {eval_policy(policy, 0.0, z0):.6g}")
    return 0


def cmd_simulate(cfg: RunConfig, args) -> int:
    n_steps = args.n_steps or cfg.solver.n_t
    rng = RngSpec(cfg.simulation.seed, cfg.simulation.workers)
    paths = simulate_paths(
        cfg.model.factor,
        cfg.simulation.n_paths,
        n_steps,
        cfg.model.T,
        rng,
        sampler=args.sampler,
        show_progress=not args.quiet,
    )
    out = cfg.ensure_output_dir()
    PathBundleCsv().save(paths, out / f"{cfg.model_name}_paths.csv")
    return 0


def cmd_policy_paths(cfg: RunConfig, args) -> int:
    pp = policy_paths(cfg.model, cfg.solver, cfg.simulation, show_progress=not args.quiet)
    out = cfg.ensure_output_dir()
    PolicyPathsCsv().save(pp, out / f"{cfg.model_name}_policy_paths.csv")
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    keys = args.checks or list_checks()
    checks = [get_check(key) for key in keys]
    out = cfg.ensure_output_dir()
    context = CheckContext(
        cfg.model,
        solver=cfg.solver,
        n_paths=cfg.simulation.n_paths,
        rng=RngSpec(cfg.simulation.seed, cfg.simulation.workers),
        k=args.k,
        show_progress=not args.quiet,
    )
    reports = []
    for key, check in zip(keys, checks):
        info(f"--- {key} ---")
        report = check.run(context)
        console.print(report_table(report))
        reports.append(report)
    ReportCsv().save(reports, out / f"{cfg.model_name}_verify.csv")

    failed = [r.check for r in reports if not r.passed]
    if failed:
        error(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return 1
    success(f"All {len(reports)} check(s) passed")
    return 0


def cmd_reproduce(cfg: RunConfig, args) -> int:
    sim = cfg.simulation
    written = reproduce(
        args.figure,
        seed=sim.seed,
        out_dir=cfg.ensure_output_dir(),
        solver=cfg.solver,
        n_paths=sim.n_paths if "n_paths" in sim.model_fields_set else FIGURE_PATHS,
        workers=sim.workers,
        show_progress=not args.quiet,
    )
    success(f"Wrote {written['csv']} and {written['svg']}")
    return 0


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "simulate": cmd_simulate,
    "policy-paths": cmd_policy_paths,
    "verify": cmd_verify,
    "reproduce": cmd_reproduce,
}


def run_command(argv: Optional[List[str]] = None) -> int:
    """Exit status: 0 success, 1 model/config/check failure, 2 usage or unexpected error."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    set_quiet(args.quiet)
    if args.command == "reproduce":
        preset = FIGURES[args.figure].preset
        if args.model not in (None, preset):
            error(f"Figure {args.figure} is drawn for model '{preset}', not '{args.model}'")
            return 2
        args.model = preset
    try:
        cfg = resolve_config(args)
        info(f"=== wcport {args.command} (model={cfg.model_name}) ===")
        return COMMANDS[args.command](cfg, args)
    except KeyError as e:
        error(e.args[0] if e.args else str(e))
        return 1
    except (WcportError, OSError) as e:
        error(str(e))
        return 1
    except Exception as e:
        error(f"\nFATAL ERROR: {e}")
        console.print_exception()
        return 2


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
