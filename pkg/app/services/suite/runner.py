"""Replicate scheduling and aggregation for one benchmark problem.

Replicates run in worker processes; results come back in job order and a
single writer stores them, so output files do not depend on scheduling.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import pandas as pd
import torch

from app.context import RunContext
from app.services.debug import debug_log
from app.services.pinn.results_store import FLOAT_FORMAT, RunStore, read_history, run_stem
from app.services.pinn.trainer import TrainConfig, TrainResult, train
from app.services.problems.registry import make_problem, normalize_problem_name
from app.services.sampling.base import SamplerKind

_logger = logging.getLogger("rang.suite")

STAT_COLUMNS = ["sampler", "n", "diverged", "mean", "min", "p25", "p50", "p75", "max"]
ALL_SAMPLERS = tuple(SamplerKind)


class SuiteError(RuntimeError):
    pass


def parse_samplers(names: Iterable[str] | str) -> tuple[SamplerKind, ...]:
    if isinstance(names, str):
        names = [names]
    names = [n for raw in names for n in str(raw).split(",") if n.strip()]
    if not names or [n.strip().lower() for n in names] == ["all"]:
        return ALL_SAMPLERS
    try:
        kinds = tuple(SamplerKind.parse(n) for n in names)
    except ValueError as exc:
        raise SuiteError(str(exc)) from exc
    if len(set(kinds)) != len(kinds):
        raise SuiteError(f"duplicate sampler in {names}")
    return kinds


@dataclass(frozen=True)
class SuiteSpec:
    problem: str
    samplers: tuple[SamplerKind, ...]
    replicates: int
    base_seed: int = 0
    workers: int = 1
    torch_threads: int = 1
    problem_options: dict = field(default_factory=dict)
    train_options: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "problem", normalize_problem_name(self.problem))
        except ValueError as exc:
            raise SuiteError(str(exc)) from exc
        if not self.samplers:
            raise SuiteError("suite needs at least one sampler")
        if self.replicates < 1:
            raise SuiteError(f"replicates must be >= 1, got {self.replicates}")

    def seeds(self) -> list[int]:
        return [self.base_seed + r for r in range(self.replicates)]


@dataclass(frozen=True)
class ReplicateJob:
    index: int
    problem: str
    sampler: SamplerKind
    replicate: int
    seed: int
    torch_threads: int
    problem_options: dict
    train_options: dict


@dataclass(frozen=True)
class SamplerStats:
    sampler: str
    n: int
    diverged: int
    mean: float
    min: float
    p25: float
    p50: float
    p75: float
    max: float


@dataclass
class SuiteStats:
    problem: str
    rows: list[SamplerStats]
    finals: pd.DataFrame
    curves: pd.DataFrame

    def get(self, sampler: SamplerKind | str) -> SamplerStats:
        key = sampler.value if isinstance(sampler, SamplerKind) else sampler
        for row in self.rows:
            if row.sampler == key:
                return row
        raise KeyError(key)

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.__dict__ for row in self.rows], columns=STAT_COLUMNS)


def run_replicate(job: ReplicateJob) -> TrainResult:
    torch.set_num_threads(max(1, job.torch_threads))
    problem = make_problem(job.problem, **job.problem_options)
    config = TrainConfig.for_problem(problem, seed=job.seed, **job.train_options)
    debug_log("SUITE", "replicate start index=%d sampler=%s seed=%d", job.index, job.sampler.value, job.seed)
    return train(problem, config, job.sampler)


def compute_stats(finals: pd.DataFrame, order: Sequence[str]) -> list[SamplerStats]:
    """Per-sampler summary of final MSE; quantiles interpolate linearly between order statistics."""
    rows = []
    for sampler in order:
        group = finals[finals["sampler"] == sampler]
        mse = group["final_mse"].dropna()
        if mse.empty:
            values = [math.nan] * 6
        else:
            q = mse.quantile([0.25, 0.5, 0.75], interpolation="linear")
            values = [mse.mean(), mse.min(), q.loc[0.25], q.loc[0.5], q.loc[0.75], mse.max()]
        rows.append(
            SamplerStats(
                sampler,
                int(mse.size),
                int(group["diverged"].astype(bool).sum()),
                *(float(v) for v in values),
            )
        )
    return rows


def median_curves(histories: dict[str, list[pd.DataFrame]], order: Sequence[str]) -> pd.DataFrame:
    columns = {}
    for sampler in order:
        frames = histories.get(sampler) or []
        if not frames:
            continue
        stacked = pd.concat([f[["iter", "mse"]] for f in frames], ignore_index=True)
        columns[sampler] = stacked.groupby("iter")["mse"].median()
    curves = pd.DataFrame(columns)
    curves.index.name = "iter"
    return curves.reset_index()


def _write_csv(frame: pd.DataFrame, path: str) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    temp_path = f"{path}.tmp"
    frame.to_csv(temp_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    os.replace(temp_path, path)


def run_suite(spec: SuiteSpec, ctx: RunContext) -> SuiteStats:
    problem = make_problem(spec.problem, **spec.problem_options)
    jobs: list[ReplicateJob] = []
    for sampler in spec.samplers:
        for replicate, seed in enumerate(spec.seeds()):
            jobs.append(
                ReplicateJob(
                    index=len(jobs),
                    problem=spec.problem,
                    sampler=sampler,
                    replicate=replicate,
                    seed=seed,
                    torch_threads=spec.torch_threads,
                    problem_options=dict(spec.problem_options),
                    train_options=dict(spec.train_options),
                )
            )
    _logger.info(
        "Suite start problem=%s samplers=%s replicates=%d jobs=%d workers=%d",
        spec.problem, ",".join(s.value for s in spec.samplers), spec.replicates, len(jobs), spec.workers,
    )

    store = RunStore(ctx)
    finals_rows = []
    histories: dict[str, list[pd.DataFrame]] = {}

    def collect(job: ReplicateJob, result: TrainResult) -> None:
        store.write_run(result, problem)
        finals_rows.append(
            {
                "sampler": job.sampler.value,
                "replicate": job.replicate,
                "seed": job.seed,
                "final_mse": result.final_mse,
                "diverged": result.diverged,
            }
        )
        histories.setdefault(job.sampler.value, []).append(
            read_history(store.history_path(run_stem(spec.problem, job.sampler.value, job.seed)))
        )
        _logger.info(
            "Replicate %d/%d done sampler=%s seed=%d mse=%.4e",
            job.index + 1, len(jobs), job.sampler.value, job.seed, result.final_mse,
        )

    try:
        if spec.workers <= 1:
            for job in jobs:
                collect(job, run_replicate(job))
        else:
            with ProcessPoolExecutor(max_workers=spec.workers) as pool:
                for job, result in zip(jobs, pool.map(run_replicate, jobs)):
                    collect(job, result)
    except SuiteError:
        raise
    except Exception as exc:
        raise SuiteError(f"suite {spec.problem} failed: {exc}") from exc

    order = [s.value for s in spec.samplers]
    finals = pd.DataFrame(finals_rows, columns=["sampler", "replicate", "seed", "final_mse", "diverged"])
    stats = SuiteStats(spec.problem, compute_stats(finals, order), finals, median_curves(histories, order))

    _write_csv(stats.frame(), os.path.join(ctx.stats_dir, f"{spec.problem}_stats.csv"))
    _write_csv(finals, os.path.join(ctx.stats_dir, f"{spec.problem}_final_mse.csv"))
    _write_csv(stats.curves, os.path.join(ctx.stats_dir, f"{spec.problem}_curves.csv"))
    for row in stats.rows:
        _logger.info(
            "Stats %s %s n=%d diverged=%d mean=%.3e min=%.3e p25=%.3e p50=%.3e p75=%.3e max=%.3e",
            spec.problem, row.sampler, row.n, row.diverged, row.mean, row.min, row.p25, row.p50, row.p75, row.max,
        )
    return stats


def recompute_stats_from_runs(
    ctx: RunContext,
    problem: str,
    samplers: Sequence[SamplerKind],
    seeds: Sequence[int],
) -> list[SamplerStats]:
    """Rebuild the summary from stored per-run history files."""
    store = RunStore(ctx)
    manifest = store.list_runs()
    rows = []
    for sampler in samplers:
        for seed in seeds:
            stem = run_stem(problem, sampler.value, seed)
            path = store.history_path(stem)
            if not os.path.exists(path):
                raise SuiteError(f"missing run history {path}")
            mse = read_history(path)["mse"].dropna()
            mse = mse[mse.map(math.isfinite)]
            rows.append(
                {
                    "sampler": sampler.value,
                    "final_mse": float(mse.iloc[-1]) if not mse.empty else math.nan,
                    "diverged": bool(manifest.get(stem, {}).get("diverged", False)),
                }
            )
    return compute_stats(pd.DataFrame(rows), [s.value for s in samplers])
