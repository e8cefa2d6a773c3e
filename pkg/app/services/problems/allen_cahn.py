"""Allen–Cahn: u_t - 1e-4 u_xx + 5u^3 - 5u = 0 on x in [-1, 1], t in [0, 1].

u(0, x) = x^2 cos(pi x), u(t, -1) = u(t, 1) = -1. No closed form, so the
error is measured against a gridded reference solution.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np
import torch

from app.paths import reference_dir
from app.services.problems.base import ConditionEvaluator, PdeProblem, ProblemDefaults, TestGrid
from app.services.problems.reference import GridReference, load_grid_reference
from app.services.sampling.base import Rect

DIFFUSION = 1e-4
REACTION = 5.0
RECT = Rect(-1.0, 1.0, 0.0, 1.0)


def initial_profile(x: np.ndarray) -> np.ndarray:
    return x * x * np.cos(np.pi * x)


class AllenCahn(PdeProblem):
    name = "allen-cahn"
    rect = RECT
    x_degree = 2
    t_degree = 1
    defaults = ProblemDefaults(n_pde=1000, max_iter=50000, interval=1000, replicates=30)

    def __init__(
        self,
        reference: GridReference,
        *,
        condition_nodes: int = 200,
        printed_ic_slope: bool = False,
    ) -> None:
        super().__init__(condition_nodes=condition_nodes)
        self.reference = reference
        # adds |u_x(0, x)|^2 to the initial term
        self.printed_ic_slope = printed_ic_slope

    def squared_residual(self, ux, ut, x, t) -> torch.Tensor:
        u = ux[0]
        r = ut[0].derivative(1) - DIFFUSION * u.derivative(2) + REACTION * u.value**3 - REACTION * u.value
        return r * r

    def initial_loss(self, ev: ConditionEvaluator) -> torch.Tensor:
        x = self.initial_nodes()
        t = np.zeros_like(x)
        target = torch.as_tensor(initial_profile(x))
        if self.printed_ic_slope:
            jet = ev.jets(x, t, "x", 1)[0]
            return torch.mean((jet.value - target) ** 2 + jet.derivative(1) ** 2)
        u = ev.values(x, t)[:, 0]
        return torch.mean((u - target) ** 2)

    def boundary_loss(self, ev: ConditionEvaluator) -> torch.Tensor:
        t = self.boundary_times()
        left = ev.values(np.full_like(t, RECT.xmin), t)[:, 0]
        right = ev.values(np.full_like(t, RECT.xmax), t)[:, 0]
        return torch.mean((left + 1.0) ** 2 + (right + 1.0) ** 2)

    def build_test_grid(self) -> TestGrid:
        return self.reference.test_grid()


def allen_cahn(
    reference_path: Optional[str] = None,
    *,
    condition_nodes: int = 200,
    printed_ic_slope: bool = False,
) -> AllenCahn:
    path = reference_path or os.path.join(reference_dir(), "allen_cahn.csv")
    return AllenCahn(
        load_grid_reference(path, RECT, 1),
        condition_nodes=condition_nodes,
        printed_ic_slope=printed_ic_slope,
    )
