"""Nonlinear Schrödinger: i u_t + 0.5 u_xx + |u|^2 u = 0, u = v + i w.

x in [-5, 5], t in [0, pi/2], u(0, x) = 2 sech(x), periodic in value and
in u_x. The reference is a gridded split-step solution.
"""

from __future__ import annotations

import math
import os
from typing import Optional

import numpy as np
import torch

from app.paths import reference_dir
from app.services.problems.base import ConditionEvaluator, PdeProblem, ProblemDefaults, TestGrid
from app.services.problems.reference import GridReference, load_grid_reference
from app.services.sampling.base import Rect

RECT = Rect(-5.0, 5.0, 0.0, math.pi / 2.0)


def initial_profile(x: np.ndarray) -> np.ndarray:
    return 2.0 / np.cosh(x)


class Schrodinger(PdeProblem):
    name = "schrodinger"
    rect = RECT
    output_dim = 2
    x_degree = 2
    t_degree = 1
    defaults = ProblemDefaults(n_pde=1000, max_iter=50000, interval=1000, replicates=30)

    def __init__(self, reference: GridReference, *, condition_nodes: int = 200) -> None:
        super().__init__(condition_nodes=condition_nodes)
        self.reference = reference

    def squared_residual(self, ux, ut, x, t) -> torch.Tensor:
        v, w = ux[0], ux[1]
        modulus2 = v.value**2 + w.value**2
        real = -ut[1].derivative(1) + 0.5 * v.derivative(2) + modulus2 * v.value
        imag = ut[0].derivative(1) + 0.5 * w.derivative(2) + modulus2 * w.value
        return real * real + imag * imag

    def initial_loss(self, ev: ConditionEvaluator) -> torch.Tensor:
        x = self.initial_nodes()
        u = ev.values(x, np.zeros_like(x))
        target = torch.as_tensor(initial_profile(x))
        return torch.mean((u[:, 0] - target) ** 2 + u[:, 1] ** 2)

    def boundary_loss(self, ev: ConditionEvaluator) -> torch.Tensor:
        t = self.boundary_times()
        left = ev.jets(np.full_like(t, RECT.xmin), t, "x", 1)
        right = ev.jets(np.full_like(t, RECT.xmax), t, "x", 1)
        total = torch.zeros_like(left[0].value)
        for lj, rj in zip(left, right):
            total = total + (lj.value - rj.value) ** 2 + (lj.derivative(1) - rj.derivative(1)) ** 2
        return torch.mean(total)

    def build_test_grid(self) -> TestGrid:
        return self.reference.test_grid()


def schrodinger(reference_path: Optional[str] = None, *, condition_nodes: int = 200) -> Schrodinger:
    path = reference_path or os.path.join(reference_dir(), "schrodinger.csv")
    return Schrodinger(load_grid_reference(path, RECT, 2), condition_nodes=condition_nodes)
