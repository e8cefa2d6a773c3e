from __future__ import annotations

import numpy as np
import torch

from app.services.problems.base import AnalyticProblem, ConditionEvaluator, ProblemDefaults
from app.services.sampling.base import Rect

VELOCITY = 4.0
DIFFUSIVITY = 0.05
T0 = 0.1


class ConvectionDiffusion(AnalyticProblem):
    """u_t + c u_x - mu u_xx = 0, a spreading Gaussian advected at speed c = 4.

    u = 0.1 / sqrt(mu (t + 0.1)) exp(-(x + 2 - c t)^2 / (4 mu (t + 0.1)))
    on x in [-4, 4], t in [0, 1]; the walls see values below 1e-8.
    """

    name = "conv-diff"
    rect = Rect(-4.0, 4.0, 0.0, 1.0)
    x_degree = 2
    t_degree = 1
    defaults = ProblemDefaults(n_pde=1000, max_iter=10000, interval=1000, replicates=60)

    def __init__(self, *, condition_nodes: int = 200, velocity: float = VELOCITY, diffusivity: float = DIFFUSIVITY) -> None:
        super().__init__(condition_nodes=condition_nodes)
        self.velocity = velocity
        self.diffusivity = diffusivity

    def exact_derivatives(self, x, t) -> dict[str, np.ndarray]:
        c, mu = self.velocity, self.diffusivity
        x = np.asarray(x, dtype=np.float64)
        tau = np.asarray(t, dtype=np.float64) + T0
        d = 4.0 * mu * tau
        z = x + 2.0 - c * (tau - T0)
        u = 0.1 / np.sqrt(mu * tau) * np.exp(-z * z / d)
        return {
            "u": u,
            "u_x": u * (-2.0 * z / d),
            "u_xx": u * (4.0 * z * z / (d * d) - 2.0 / d),
            "u_t": u * (-0.5 / tau + 2.0 * z * c / d + 4.0 * mu * z * z / (d * d)),
        }

    def exact(self, x, t) -> np.ndarray:
        return self.exact_derivatives(x, t)["u"]

    def squared_residual(self, ux, ut, x, t) -> torch.Tensor:
        u = ux[0]
        r = ut[0].derivative(1) + self.velocity * u.derivative(1) - self.diffusivity * u.derivative(2)
        return r * r

    def initial_loss(self, ev: ConditionEvaluator) -> torch.Tensor:
        x = self.initial_nodes()
        t = np.zeros_like(x)
        u = ev.values(x, t)[:, 0]
        return torch.mean((u - torch.as_tensor(self.exact(x, t))) ** 2)

    def boundary_loss(self, ev: ConditionEvaluator) -> torch.Tensor:
        t = self.boundary_times()
        left = ev.values(np.full_like(t, self.rect.xmin), t)[:, 0]
        right = ev.values(np.full_like(t, self.rect.xmax), t)[:, 0]
        return torch.mean(left**2 + right**2)
