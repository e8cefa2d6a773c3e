"""PINN training loop with periodic collocation resampling.

Every ``interval`` iterations a resampling strategy replaces the PDE node
set; the error-driven strategies build their spacing field from the current
residual map, optionally remembering the previous map with decay ``beta``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import torch

from app.services.autodiff.tape import Tape, backward
from app.services.debug import debug_log
from app.services.debug_logging import log_event
from app.services.errormap.arff import BisectionBounds, calibrated_arff
from app.services.errormap.grid import GridErrorMap, NormalizedErrorMap
from app.services.network.adam import AdamState, DivergenceError, adam_step
from app.services.network.mlp import MlpParams, init_params
from app.services.pinn.losses import ic_bc_losses, mse_on_grid, pde_loss, residual_grid, total_loss
from app.services.problems.base import LossWeights, PdeProblem
from app.services.sampling.base import (
    PURPOSE_FRONT,
    PURPOSE_INIT,
    PURPOSE_SAMPLE,
    NodeSet,
    RngStream,
    SamplerKind,
)
from app.services.sampling.samplers import sample_hammersley, sample_lhs, sample_random

_logger = logging.getLogger("rang.train")


@dataclass(frozen=True)
class TrainConfig:
    max_iter: int
    n_pde: int
    interval: Optional[int]
    seed: int = 0
    weights: LossWeights = LossWeights()
    hidden: tuple[int, ...] = (64, 64, 64, 64)
    normalize_inputs: bool = True
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    log_every: int = 100
    beta: Optional[float] = None
    ratio: float = 100.0
    grid_nx: int = 128
    grid_ny: int = 128
    eps: float = 1e-12
    count_tol: float = 0.05
    width_tol: float = 0.003
    low_factor: float = 0.2
    up_factor: float = 20.0
    arc_points: int = 5
    perturbation: float = 0.01
    keep_maps: bool = False

    def __post_init__(self) -> None:
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.n_pde < 1:
            raise ValueError(f"n_pde must be >= 1, got {self.n_pde}")
        if self.log_every < 1:
            raise ValueError(f"log_every must be >= 1, got {self.log_every}")
        if self.interval is not None:
            if self.interval < 1:
                raise ValueError(f"interval must be >= 1, got {self.interval}")
            if self.interval % self.log_every != 0:
                raise ValueError(
                    f"interval {self.interval} must be a multiple of the logging cadence {self.log_every}"
                )
        if self.beta is not None and not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")

    @classmethod
    def for_problem(cls, problem: PdeProblem, **overrides) -> "TrainConfig":
        d = problem.defaults
        values = {
            "max_iter": d.max_iter,
            "n_pde": d.n_pde,
            "interval": d.interval,
            "weights": d.weights,
        }
        values.update({k: v for k, v in overrides.items() if v is not None or k == "beta"})
        if values.get("interval") == 0:
            values["interval"] = None
        return cls(**values)

    def bisection_bounds(self) -> BisectionBounds:
        return BisectionBounds.default_for(
            self.n_pde,
            low_factor=self.low_factor,
            up_factor=self.up_factor,
            count_tol=self.count_tol,
            width_tol=self.width_tol,
        )


@dataclass(frozen=True)
class HistoryRow:
    iter: int
    loss: float
    l0: float
    lb: float
    lpde: float
    mse: float
    s: float


@dataclass(frozen=True)
class NodeSnapshot:
    iter: int
    nodes: NodeSet
    scale: float
    generations: int
    within_tolerance: bool
    prior: Optional[NormalizedErrorMap] = None
    residual: Optional[GridErrorMap] = None


@dataclass
class TrainResult:
    problem: str
    sampler: SamplerKind
    seed: int
    params: MlpParams
    history: list[HistoryRow] = field(default_factory=list)
    snapshots: list[NodeSnapshot] = field(default_factory=list)
    diverged: bool = False
    divergence_iter: Optional[int] = None
    divergence_message: str = ""

    @property
    def final_mse(self) -> float:
        finite = [row.mse for row in self.history if math.isfinite(row.mse)]
        return finite[-1] if finite else math.nan


class _Resampler:
    def __init__(self, problem: PdeProblem, config: TrainConfig, sampler: SamplerKind, root: RngStream) -> None:
        self.problem = problem
        self.config = config
        self.sampler = sampler
        self.root = root
        self.beta = sampler.default_beta if config.beta is None else config.beta
        self.prior = NormalizedErrorMap.zeros(config.grid_nx, config.grid_ny)
        self.round = 0

    def due(self, iteration: int) -> bool:
        if iteration == 0:
            return True
        if not self.sampler.resamples or self.config.interval is None:
            return False
        return iteration % self.config.interval == 0

    def generate(self, iteration: int, params: MlpParams) -> NodeSnapshot:
        cfg, rect, kind = self.config, self.problem.rect, self.sampler
        index = self.round
        self.round += 1
        if kind in (SamplerKind.RANDOM, SamplerKind.RANDOM_R):
            nodes = sample_random(rect, cfg.n_pde, self.root.derive(PURPOSE_SAMPLE, index))
            return NodeSnapshot(iteration, nodes.with_tag(kind), math.nan, 1, True)
        if kind is SamplerKind.HAMMERSLEY:
            return NodeSnapshot(iteration, sample_hammersley(rect, cfg.n_pde, 2), math.nan, 1, True)
        if kind in (SamplerKind.LHS, SamplerKind.LHS_R):
            nodes = sample_lhs(rect, cfg.n_pde, self.root.derive(PURPOSE_SAMPLE, index))
            return NodeSnapshot(iteration, nodes.with_tag(kind), math.nan, 1, True)

        residual: Optional[GridErrorMap] = None
        if kind.adaptive and iteration > 0:
            residual = residual_grid(self.problem, params, cfg.grid_nx, cfg.grid_ny)
            error = residual
        else:
            error = GridErrorMap.zeros(cfg.grid_nx, cfg.grid_ny)
        beta = self.beta if kind.adaptive else 0.0
        calibrated = calibrated_arff(
            rect,
            error,
            self.prior,
            beta,
            cfg.ratio,
            cfg.n_pde,
            cfg.bisection_bounds(),
            self.root.derive(PURPOSE_FRONT, index),
            eps=cfg.eps,
            arc_points=cfg.arc_points,
            perturbation=cfg.perturbation,
            tag=kind,
        )
        if kind.adaptive:
            self.prior = calibrated.ebar
        return NodeSnapshot(
            iteration,
            calibrated.nodes,
            calibrated.scale,
            calibrated.generations,
            calibrated.within_tolerance,
            prior=calibrated.ebar if (cfg.keep_maps and kind.adaptive) else None,
            residual=residual if cfg.keep_maps else None,
        )


def train(problem: PdeProblem, config: TrainConfig, sampler: SamplerKind) -> TrainResult:
    root = RngStream(config.seed)
    arch = (2, *config.hidden, problem.output_dim)
    params = init_params(
        arch,
        root.derive(PURPOSE_INIT),
        input_rect=problem.rect if config.normalize_inputs else None,
    )
    state = AdamState.zeros(
        params.parameter_count(), lr=config.lr, beta1=config.beta1, beta2=config.beta2, eps=config.adam_eps
    )
    resampler = _Resampler(problem, config, sampler, root)
    result = TrainResult(problem=problem.name, sampler=sampler, seed=config.seed, params=params)
    _logger.info(
        "Train start problem=%s sampler=%s seed=%d max_iter=%d n_pde=%d interval=%s params=%d",
        problem.name, sampler.value, config.seed, config.max_iter, config.n_pde,
        config.interval, params.parameter_count(),
    )

    nodes: Optional[NodeSet] = None
    scale = math.nan
    for iteration in range(config.max_iter + 1):
        final = iteration == config.max_iter
        if not final and resampler.due(iteration):
            snapshot = resampler.generate(iteration, params)
            result.snapshots.append(snapshot)
            nodes, scale = snapshot.nodes, snapshot.scale
            debug_log("TRAIN", "resample iter=%d nodes=%d s=%.6f", iteration, len(nodes), scale)

        tape = Tape()
        taped = params.on_tape(tape)
        l_0, l_b = ic_bc_losses(problem, taped, tape)
        l_pde, _ = pde_loss(problem, taped, tape, nodes)
        loss = total_loss(config.weights, l_pde, l_0, l_b)
        loss_value = float(loss.detach())

        if not math.isfinite(loss_value):
            _mark_divergence(result, iteration, f"non-finite loss {loss_value}")
            break

        if final or iteration % config.log_every == 0:
            row = HistoryRow(
                iter=iteration,
                loss=loss_value,
                l0=float(l_0.detach()) if l_0 is not None else math.nan,
                lb=float(l_b.detach()),
                lpde=float(l_pde.detach()),
                mse=mse_on_grid(params, problem),
                s=scale,
            )
            result.history.append(row)
            _logger.info(
                "iter=%d loss=%.4e L0=%.3e Lb=%.3e Lpde=%.3e mse=%.4e",
                row.iter, row.loss, row.l0, row.lb, row.lpde, row.mse,
            )
        if final:
            break

        try:
            params, state = adam_step(params, backward(tape, loss), state)
        except DivergenceError as exc:
            _mark_divergence(result, iteration, str(exc))
            break

    result.params = params
    log_event(
        _logger,
        "run_finished",
        problem=problem.name,
        sampler=sampler,
        seed=config.seed,
        final_mse=result.final_mse,
        diverged=result.diverged,
        divergence_iter=result.divergence_iter,
        resamples=len(result.snapshots),
    )
    return result


def _mark_divergence(result: TrainResult, iteration: int, message: str) -> None:
    result.diverged = True
    result.divergence_iter = iteration
    result.divergence_message = message
    _logger.warning(
        "Run diverged problem=%s sampler=%s seed=%d iter=%d: %s (keeping last finite mse=%.4e)",
        result.problem, result.sampler.value, result.seed, iteration, message, result.final_mse,
    )
