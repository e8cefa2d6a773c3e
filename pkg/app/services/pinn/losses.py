from __future__ import annotations

from typing import Optional

import numpy as np
import torch

from app.services.autodiff.jet import Jet
from app.services.autodiff.tape import DTYPE, Tape
from app.services.errormap.grid import GridErrorMap, cell_centers
from app.services.network.mlp import MlpParams, forward, forward_jet
from app.services.problems.base import LossWeights, PdeProblem
from app.services.sampling.base import NodeSet


class NetworkEvaluator:
    """Evaluates one parameter set on one tape, for residuals and condition terms."""

    def __init__(self, params: MlpParams, tape: Tape) -> None:
        self.params = params
        self.tape = tape

    def values(self, x: np.ndarray, t: np.ndarray) -> torch.Tensor:
        inputs = torch.as_tensor(np.column_stack((np.asarray(x), np.asarray(t))), dtype=DTYPE)
        return forward(self.params, inputs)

    def jets(self, x, t, direction: str, degree: int) -> list[Jet]:
        x = torch.as_tensor(np.asarray(x), dtype=DTYPE)
        t = torch.as_tensor(np.asarray(t), dtype=DTYPE)
        if direction == "x":
            in_x, in_t = Jet.variable(self.tape, x, degree), Jet.constant(self.tape, t, degree)
        elif direction == "t":
            in_x, in_t = Jet.constant(self.tape, x, degree), Jet.variable(self.tape, t, degree)
        else:
            raise ValueError(f"direction must be 'x' or 't', got {direction!r}")
        return forward_jet(self.params, self.tape, in_x, in_t)


def squared_residuals(problem: PdeProblem, params: MlpParams, tape: Tape, points: np.ndarray) -> torch.Tensor:
    ev = NetworkEvaluator(params, tape)
    x, t = points[:, 0], points[:, 1]
    ux = ev.jets(x, t, "x", problem.x_degree)
    ut = ev.jets(x, t, "t", problem.t_degree)
    return problem.squared_residual(
        ux, ut, torch.as_tensor(x, dtype=DTYPE), torch.as_tensor(t, dtype=DTYPE)
    )


def pde_loss(
    problem: PdeProblem,
    params: MlpParams,
    tape: Tape,
    nodes: NodeSet,
) -> tuple[torch.Tensor, np.ndarray]:
    """Mean squared residual over ``nodes`` plus the per-node residual magnitudes."""
    if len(nodes) == 0:
        raise ValueError("PDE loss over an empty node set")
    r2 = squared_residuals(problem, params, tape, nodes.points)
    return r2.mean(), torch.sqrt(r2.detach()).numpy()


def ic_bc_losses(
    problem: PdeProblem,
    params: MlpParams,
    tape: Tape,
) -> tuple[Optional[torch.Tensor], torch.Tensor]:
    ev = NetworkEvaluator(params, tape)
    initial = problem.initial_loss(ev) if problem.has_initial else None
    return initial, problem.boundary_loss(ev)


def total_loss(
    weights: LossWeights,
    l_pde: torch.Tensor,
    l_0: Optional[torch.Tensor],
    l_b: torch.Tensor,
) -> torch.Tensor:
    loss = weights.w_pde * l_pde + weights.w_b * l_b
    if l_0 is not None:
        loss = loss + weights.w_0 * l_0
    return loss


def residual_grid(problem: PdeProblem, params: MlpParams, nx: int = 128, ny: int = 128) -> GridErrorMap:
    """|residual| at cell centers over the problem rect."""
    xs, ys = cell_centers(problem.rect, nx, ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    points = np.column_stack((gx.reshape(-1), gy.reshape(-1)))
    with torch.no_grad():
        r2 = squared_residuals(problem, params.detached(), Tape(), points)
    return GridErrorMap(problem.rect, torch.sqrt(r2).numpy().reshape(nx, ny))


def predict_on_grid(problem: PdeProblem, params: MlpParams) -> np.ndarray:
    grid = problem.test_grid()
    with torch.no_grad():
        return forward(params.detached(), torch.as_tensor(grid.inputs, dtype=DTYPE)).numpy()


def mse_on_grid(params: MlpParams, problem: PdeProblem) -> float:
    """Mean over test-grid points of the squared Euclidean error across output components."""
    grid = problem.test_grid()
    predicted = predict_on_grid(problem, params)
    return float(np.mean(np.sum((predicted - grid.values) ** 2, axis=1)))


def time_histogram(nodes: NodeSet, n_bins: int) -> np.ndarray:
    """Node counts per bin along the second (time) axis of the node set's rect."""
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    counts, _ = np.histogram(nodes.y, bins=n_bins, range=(nodes.rect.ymin, nodes.rect.ymax))
    return counts
