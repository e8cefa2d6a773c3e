from __future__ import annotations

import math

import numpy as np
import torch

from app.services.problems.base import AnalyticProblem, ConditionEvaluator, ProblemDefaults
from app.services.sampling.base import Rect

CELERITY = 7.0
SHIFT = 7.0


class KdV(AnalyticProblem):
    """u_t + 6 u u_x + u_xxx = 0 with a single soliton of speed 7.

    u = (c/2) sech^2(sqrt(c)/2 (x - c t + 7)) on x in [-4pi, 4pi], t in [0, 2];
    the peak (height 3.5) sits at x = c t - 7.
    """

    name = "kdv"
    rect = Rect(-4.0 * math.pi, 4.0 * math.pi, 0.0, 2.0)
    x_degree = 3
    t_degree = 1
    defaults = ProblemDefaults(n_pde=1000, max_iter=50000, interval=1000, replicates=50)

    def exact_derivatives(self, x, t) -> dict[str, np.ndarray]:
        c = CELERITY
        amp = c / 2.0
        k = math.sqrt(c) / 2.0
        xi = k * (np.asarray(x, dtype=np.float64) - c * np.asarray(t, dtype=np.float64) + SHIFT)
        s = 1.0 / np.cosh(xi)
        th = np.tanh(xi)
        g = s * s
        g1 = -2.0 * g * th
        g2 = 4.0 * g * th * th - 2.0 * g * g
        g3 = -8.0 * g * th**3 + 16.0 * g * g * th
        return {
            "u": amp * g,
            "u_x": amp * k * g1,
            "u_xx": amp * k * k * g2,
            "u_xxx": amp * k**3 * g3,
            "u_t": -c * amp * k * g1,
        }

    def exact(self, x, t) -> np.ndarray:
        return self.exact_derivatives(x, t)["u"]

    def squared_residual(self, ux, ut, x, t) -> torch.Tensor:
        u = ux[0]
        r = ut[0].derivative(1) + 6.0 * u.value * u.derivative(1) + u.derivative(3)
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
