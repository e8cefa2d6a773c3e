"""rang command line: single runs, replicate suites, node demos and plot scripts."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Optional

from app.config import AppConfig
from app.context import RunContext

EXIT_OK = 0
EXIT_ERROR = 2

HELP_EPILOG = """examples:
  python run.py run --problem poisson --sampler rang-m --seed 0
  python run.py run --problem wave --sampler ff-r --iters 2000 --save-maps
  python run.py suite --problem poisson --samplers all --preset desk --workers 4
  python run.py nodes --demo lshape --r 1 10 100 --s 0.08 0.04 0.02
  python run.py plots --out results
"""

_logger = logging.getLogger("rang.cli")


@dataclass(frozen=True)
class LaunchOptions:
    command: str
    debug: bool
    config_path: Optional[str]
    output_dir: Optional[str]
    args: argparse.Namespace


def build_parser() -> argparse.ArgumentParser:
    from app.services.problems.registry import PROBLEM_NAMES
    from app.services.sampling.base import SamplerKind
    from app.services.suite.presets import PRESETS

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-debug", "--debug", action="store_true", help="Verbose logging, all debug flags on.")
    common.add_argument("--config", dest="config_path", default=None, help="Path to config.json.")
    common.add_argument("--out", dest="output_dir", default=None, help="Output directory (default: results/).")

    parser = argparse.ArgumentParser(
        prog="rang",
        description="Adaptive collocation node generation for physics-informed networks.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=HELP_EPILOG,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    samplers = [kind.value for kind in SamplerKind]

    run = sub.add_parser("run", parents=[common], help="Train one network with one sampler.")
    run.add_argument("--problem", required=True, choices=PROBLEM_NAMES)
    run.add_argument("--sampler", default="rang-m", choices=samplers)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--iters", type=int, default=None, help="Iterations (default: problem setting).")
    run.add_argument("--interval", type=int, default=None, help="Resampling interval; 0 never resamples.")
    run.add_argument("--n-pde", dest="n_pde", type=int, default=None)
    run.add_argument("--beta", type=float, default=None, help="Override the error-memory decay.")
    run.add_argument("--ratio", type=float, default=None, help="Spacing ratio between calmest and busiest regions.")
    run.add_argument("--save-maps", action="store_true", help="Also write residual and prior maps per resample.")

    suite = sub.add_parser("suite", parents=[common], help="Replicate runs over samplers and summarize.")
    suite.add_argument("--problem", required=True, choices=PROBLEM_NAMES)
    suite.add_argument("--samplers", nargs="+", default=["all"], help=f"'all' or any of: {', '.join(samplers)}")
    suite.add_argument("--preset", choices=PRESETS, default=None)
    suite.add_argument("--replicates", type=int, default=None)
    suite.add_argument("--seed", type=int, default=None, help="Seed of the first replicate.")
    suite.add_argument("--workers", type=int, default=None)
    suite.add_argument("--iters", type=int, default=None)
    suite.add_argument("--interval", type=int, default=None)
    suite.add_argument("--n-pde", dest="n_pde", type=int, default=None)

    nodes = sub.add_parser("nodes", parents=[common], help="Node-generation demos.")
    nodes.add_argument("--demo", required=True, choices=["lshape"])
    nodes.add_argument("--r", dest="ratios", type=float, nargs="+", default=[1.0, 10.0, 100.0])
    nodes.add_argument("--s", dest="scales", type=float, nargs="+", default=[0.08, 0.04, 0.02])
    nodes.add_argument("--seed", type=int, default=0)

    sub.add_parser("plots", parents=[common], help="Write matplotlib scripts for stored results.")
    return parser


def parse_launch_argv(argv: list[str] | None = None) -> LaunchOptions:
    args = build_parser().parse_args(argv)
    return LaunchOptions(
        command=args.command,
        debug=args.debug,
        config_path=args.config_path,
        output_dir=args.output_dir,
        args=args,
    )


def problem_options(config: AppConfig, reference_dir: str) -> dict:
    return {
        "condition_nodes": config.training.condition_nodes,
        "printed_ic_slope": config.training.printed_ic_slope,
        "printed_ic_velocity": config.training.printed_ic_velocity,
        "reference_dir": reference_dir,
    }


def train_options(config: AppConfig) -> dict:
    t, b = config.training, config.bisection
    return {
        "hidden": config.network.hidden,
        "normalize_inputs": config.network.normalize_inputs,
        "lr": t.lr,
        "beta1": t.beta1,
        "beta2": t.beta2,
        "adam_eps": t.adam_eps,
        "log_every": t.log_every,
        "ratio": t.ratio,
        "grid_nx": config.errormap.grid_nx,
        "grid_ny": config.errormap.grid_ny,
        "eps": config.errormap.eps,
        "count_tol": b.count_tol,
        "width_tol": b.width_tol,
        "low_factor": b.low_factor,
        "up_factor": b.up_factor,
        "arc_points": config.sampling.arc_points,
        "perturbation": config.sampling.perturbation,
    }


def _cmd_run(args: argparse.Namespace, ctx: RunContext, config: AppConfig) -> int:
    from app.main import resolve_reference_dir
    from app.services.pinn.results_store import RunStore
    from app.services.pinn.trainer import TrainConfig, train
    from app.services.problems.registry import make_problem
    from app.services.sampling.base import SamplerKind

    problem = make_problem(args.problem, **problem_options(config, resolve_reference_dir(config)))
    options = train_options(config)
    if args.ratio is not None:
        options["ratio"] = args.ratio
    train_config = TrainConfig.for_problem(
        problem,
        seed=args.seed,
        max_iter=args.iters,
        n_pde=args.n_pde,
        interval=args.interval,
        beta=args.beta,
        keep_maps=args.save_maps,
        **options,
    )
    result = train(problem, train_config, SamplerKind.parse(args.sampler))
    stem = RunStore(ctx).write_run(result, problem)
    _logger.info(
        "Run %s finished: final mse=%.4e diverged=%s output=%s",
        stem, result.final_mse, result.diverged, ctx.output_dir,
    )
    return EXIT_OK


def _cmd_suite(args: argparse.Namespace, ctx: RunContext, config: AppConfig) -> int:
    from app.main import resolve_reference_dir
    from app.services.suite.presets import preset_for
    from app.services.suite.runner import SuiteSpec, parse_samplers, run_suite

    preset = preset_for(args.problem, args.preset or config.suite.preset)
    options = train_options(config)
    options.update(
        max_iter=args.iters or preset.max_iter,
        n_pde=args.n_pde or preset.n_pde,
        interval=preset.interval if args.interval is None else args.interval,
    )
    spec = SuiteSpec(
        problem=args.problem,
        samplers=parse_samplers(args.samplers),
        replicates=args.replicates or preset.replicates,
        base_seed=config.suite.base_seed if args.seed is None else args.seed,
        workers=args.workers or config.suite.workers,
        torch_threads=config.training.torch_threads,
        problem_options=problem_options(config, resolve_reference_dir(config)),
        train_options=options,
    )
    run_suite(spec, ctx)
    return EXIT_OK


def _cmd_nodes(args: argparse.Namespace, ctx: RunContext, config: AppConfig) -> int:
    from app.services.errormap.lshape import lshape_demo, write_lshape_demo

    cases = lshape_demo(
        args.ratios,
        args.scales,
        seed=args.seed,
        grid=config.errormap.grid_nx,
        arc_points=config.sampling.arc_points,
        perturbation=config.sampling.perturbation,
    )
    paths = write_lshape_demo(cases, ctx.nodes_dir)
    _logger.info("Wrote %d L-shape node sets to %s", len(paths), ctx.nodes_dir)
    return EXIT_OK


def _cmd_plots(args: argparse.Namespace, ctx: RunContext, config: AppConfig) -> int:
    from app.services.suite.plot_scripts import emit_plot_scripts

    for path in emit_plot_scripts(ctx):
        print(path)
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "suite": _cmd_suite,
    "nodes": _cmd_nodes,
    "plots": _cmd_plots,
}


def main(argv: list[str] | None = None) -> int:
    from app.main import bootstrap
    from app.services.autodiff.tape import TapeError
    from app.services.errormap.grid import ErrorMapError
    from app.services.network.adam import DivergenceError
    from app.services.problems.base import ReferenceDataError
    from app.services.sampling.base import SamplingError
    from app.services.suite.runner import SuiteError

    opts = parse_launch_argv(argv)
    try:
        ctx, config = bootstrap(debug=opts.debug, config_path=opts.config_path, output_dir=opts.output_dir)
        return _COMMANDS[opts.command](opts.args, ctx, config)
    except (
        SamplingError,
        ErrorMapError,
        TapeError,
        DivergenceError,
        ReferenceDataError,
        SuiteError,
        ValueError,
        OSError,
    ) as exc:
        _logger.error("%s failed: %s", opts.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
