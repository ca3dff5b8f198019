"""Command-line entry point: ``hedger <command> --config <path> [...]``.

Commands
--------
validate   print the parameter validation report
greeks     frozen Vegas, bucket targets and market view -> greeks.json
plan       optimal schedule (closed form or BVP per cost family) -> plan.csv
oracle     direct-transcription schedule + gap report vs plan
simulate   Monte-Carlo PnL estimate of the planned schedule
compare    paired Monte-Carlo comparison of the plan vs a baseline

Exit codes: 0 success, 1 unknown command, 2 configuration error,
3 numeric failure.  Report/data paths go to stdout; diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import reports
from .book import target_ratios
from .bvp import BvpProblem, FREE_TERMINAL, PINNED_TERMINAL, transcription_oracle, solve_hamiltonian_bvp
from .closed_form import (
    HedgeInputs,
    Trajectory,
    lambda_of,
    objective,
    plan_bucket_cancellation,
    plan_vega_hedge,
)
from .config import BUCKET_CANCELLATION, RunConfig, load_config
from .errors import ConfigError, DomainError, NumericsError
from .market import frozen_view, validate_params
from .pnl import OPTIMAL_U, compare_strategies, estimate_objective, simulate_pnl
from .pricing import vega_profile

COMMANDS = ("validate", "greeks", "plan", "oracle", "simulate", "compare")

_USAGE = (
    "usage: hedger {validate|greeks|plan|oracle|simulate|compare} "
    "--config PATH [--out DIR] [--baseline linear|immediate|FILE] "
    "[--seed INT] [--no-plot]"
)


def _build_problem(config: RunConfig):
    """Price the vanillas, freeze the constants, assemble the hedge inputs."""
    profile = vega_profile(config.params, config.state, config.options, config.run.bump)
    targets = target_ratios(config.book, profile)
    view = config.view_override or frozen_view(config.params, config.state)
    inputs = HedgeInputs(
        gamma=config.gamma,
        rho=config.params.rho,
        xi=config.params.xi,
        view=view,
        vega_sv=profile.vega_sv,
        target=targets,
        q0=config.q0,
        costs=config.costs,
        horizon=config.horizon,
    )
    return inputs, profile, targets, view


def _bvp_kind(config: RunConfig) -> str:
    return PINNED_TERMINAL if config.problem == BUCKET_CANCELLATION else FREE_TERMINAL


def _plan_trajectory(config: RunConfig, inputs: HedgeInputs, m: int | None = None) -> Trajectory:
    m = m or config.run.grid
    if all(c.is_quadratic for c in inputs.costs):
        if config.problem == BUCKET_CANCELLATION:
            return plan_bucket_cancellation(inputs, m)
        return plan_vega_hedge(inputs, m)
    return solve_hamiltonian_bvp(BvpProblem(inputs, _bvp_kind(config)), m)


def _baseline_trajectory(name: str, config: RunConfig, inputs: HedgeInputs) -> Trajectory:
    times = np.linspace(0.0, inputs.horizon, config.run.grid + 1)
    q0, target = inputs.q0, inputs.target.v
    if name == "linear":
        frac = times / inputs.horizon
        q = np.outer(1.0 - frac, q0) - np.outer(frac, target)
        v = np.tile((-target - q0) / inputs.horizon, (len(times), 1))
        return Trajectory(times, q, v)
    if name == "immediate":
        # unwind over the first tenth of the horizon, then hold
        ramp = 0.1 * inputs.horizon
        frac = np.clip(times / ramp, 0.0, 1.0)
        q = q0 + np.outer(frac, -target - q0)
        v = np.where(times[:, None] < ramp, (-target - q0) / ramp, 0.0)
        return Trajectory(times, q, v)
    path = Path(name)
    if not path.is_file():
        raise ConfigError(f"baseline must be 'linear', 'immediate' or a CSV file; {name!r} not found")
    return reports.read_trajectory_csv(path)


def _cmd_validate(config: RunConfig, out: Path, plot: bool) -> None:
    report = validate_params(config.params)
    for line in report.lines():
        print(line)


def _cmd_greeks(config: RunConfig, out: Path, plot: bool) -> None:
    _, profile, targets, view = _build_problem(config)
    payload = {
        "vega_sv": profile.vega_sv.tolist(),
        "vega_bs": profile.vega_bs.tolist(),
        "target_ratios": targets.v.tolist(),
        "view": {"sharpe": view.sharpe, "zeta": view.zeta},
    }
    print(reports.write_json_report(payload, out / "greeks.json"))


def _cmd_plan(config: RunConfig, out: Path, plot: bool) -> None:
    inputs, _, _, _ = _build_problem(config)
    tr = _plan_trajectory(config, inputs)
    print(reports.write_trajectory_csv(tr, inputs, out / "plan.csv"))
    if plot:
        print(reports.plot_schedule(tr, inputs, out / "plan.png"))


def _cmd_oracle(config: RunConfig, out: Path, plot: bool) -> None:
    inputs, _, _, _ = _build_problem(config)
    m = config.run.oracle_grid
    oracle = transcription_oracle(BvpProblem(inputs, _bvp_kind(config)), m)
    if all(c.is_quadratic for c in inputs.costs):
        plan = _plan_trajectory(config, inputs, m=m)
    else:
        plan = _plan_trajectory(config, inputs)
        plan = Trajectory(oracle.times, *plan.sample(oracle.times))
    gap = float(np.max(np.abs(plan.positions - oracle.positions)))
    print(reports.write_trajectory_csv(oracle, inputs, out / "oracle.csv"))
    print(
        reports.write_json_report(
            {
                "sup_norm_gap": gap,
                "oracle_grid": m,
                "objective_plan": objective(plan, inputs),
                "objective_oracle": objective(oracle, inputs),
            },
            out / "oracle_report.json",
        )
    )
    if plot:
        print(reports.plot_oracle_overlay(plan, oracle, out / "oracle.png"))


def _cmd_simulate(config: RunConfig, out: Path, plot: bool) -> None:
    inputs, _, _, _ = _build_problem(config)
    tr = _plan_trajectory(config, inputs)
    samples = simulate_pnl(
        tr, inputs, OPTIMAL_U, config.run.n_paths, config.run.n_steps,
        config.run.seed, strategy_id="plan",
    )
    est = estimate_objective(samples, inputs.gamma)
    payload = {
        "strategy": samples.strategy_id,
        "n_paths": config.run.n_paths,
        "n_steps": config.run.n_steps,
        "seed": config.run.seed,
        "mean": est.mean,
        "variance": est.variance,
        "mv": est.mv,
        "mv_stderr": est.stderr,
        "analytic_objective": objective(tr, inputs),
    }
    print(reports.write_json_report(payload, out / "simulate_report.json"))
    if plot:
        print(reports.plot_pnl_hist(samples, out / "pnl_hist.png"))


def _cmd_compare(config: RunConfig, out: Path, plot: bool, baseline: str) -> None:
    inputs, _, _, _ = _build_problem(config)
    plan = _plan_trajectory(config, inputs)
    base = _baseline_trajectory(baseline, config, inputs)
    report = compare_strategies(
        plan, base, inputs, config.run.n_paths, config.run.seed,
        n_steps=config.run.n_steps,
    )
    payload = {
        "baseline": baseline,
        "n_paths": report.n_paths,
        "seed": report.seed,
        "mv_gap": report.mv_gap,
        "mv_gap_stderr": report.stderr,
        "ci95": [report.ci_low, report.ci_high],
        "mean_diff": report.mean_diff,
        "analytic_gap": report.analytic_gap,
        "mv_plan": report.estimate_a.mv,
        "mv_baseline": report.estimate_b.mv,
    }
    print(reports.write_json_report(payload, out / "compare_report.json"))
    if plot:
        print(reports.plot_comparison(report, plan, base, out / "compare.png"))


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(_USAGE)
        return 0 if argv else 1
    command, rest = argv[0], argv[1:]
    if command not in COMMANDS:
        print(_USAGE, file=sys.stderr)
        print(f"unknown command: {command!r}", file=sys.stderr)
        return 1

    parser = argparse.ArgumentParser(prog=f"hedger {command}", add_help=True)
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", default=".", help="output directory (created if missing)")
    parser.add_argument("--baseline", default="linear", help="linear | immediate | trajectory CSV")
    parser.add_argument("--seed", type=int, default=None, help="override run.seed")
    parser.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    try:
        args = parser.parse_args(rest)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    started = time.perf_counter()
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = _with_seed(config, args.seed)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        plot = not args.no_plot
        if command == "validate":
            _cmd_validate(config, out, plot)
        elif command == "greeks":
            _cmd_greeks(config, out, plot)
        elif command == "plan":
            _cmd_plan(config, out, plot)
        elif command == "oracle":
            _cmd_oracle(config, out, plot)
        elif command == "simulate":
            _cmd_simulate(config, out, plot)
        else:
            _cmd_compare(config, out, plot, args.baseline)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        if exc.diagnostics:
            print(f"diagnostics: {exc.diagnostics}", file=sys.stderr)
        return 3
    print(f"{command} finished in {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return 0


def _with_seed(config: RunConfig, seed: int) -> RunConfig:
    from dataclasses import replace

    return replace(config, run=replace(config.run, seed=seed))


if __name__ == "__main__":
    sys.exit(main())
