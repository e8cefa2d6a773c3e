from __future__ import annotations

import math

import numpy as np
import torch

from app.services.problems.base import AnalyticProblem, ConditionEvaluator, ProblemDefaults
from app.services.sampling.base import Rect

HALF_WIDTH = 4.0
SPEED = math.sqrt(3.0)

# (amplitude, velocity sign, shift in units of the half width)
_PULSES = ((0.5, 1.0, 0.0), (-0.5, 1.0, -2.0), (0.5, -1.0, 0.0), (-0.5, -1.0, 2.0))


def _sech_derivatives(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = 1.0 / np.cosh(z)
    th = np.tanh(z)
    return s, -s * th, s * th * th - s**3


class Wave(AnalyticProblem):
    """u_tt = 3 u_xx with reflecting sech pulses, x in [-4, 4], t in [0, 6].

    The reference is a superposition of four travelling pulses at
    speed sqrt(3). The image pulses cancel the walls up to sech tails (below
    4e-4 for t <= 4); the next reflection is not represented, so the wall
    value grows to about 4e-2 as t approaches 6.
    """

    name = "wave"
    rect = Rect(-HALF_WIDTH, HALF_WIDTH, 0.0, 6.0)
    x_degree = 2
    t_degree = 2
    defaults = ProblemDefaults(n_pde=1000, max_iter=15000, interval=1000, replicates=50)

    def __init__(self, *, condition_nodes: int = 200, printed_ic_velocity: bool = False) -> None:
        super().__init__(condition_nodes=condition_nodes)
        # penalize u_x(0, x) instead of u_t(0, x)
        self.printed_ic_velocity = printed_ic_velocity

    def exact_derivatives(self, x, t) -> dict[str, np.ndarray]:
        x = np.asarray(x, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
        out = {key: np.zeros(np.broadcast(x, t).shape) for key in ("u", "u_x", "u_xx", "u_t", "u_tt")}
        for amp, sign, shift in _PULSES:
            v = sign * SPEED
            s, s1, s2 = _sech_derivatives(2.0 * (x + v * t + shift * HALF_WIDTH))
            out["u"] += amp * s
            out["u_x"] += amp * 2.0 * s1
            out["u_xx"] += amp * 4.0 * s2
            out["u_t"] += amp * 2.0 * v * s1
            out["u_tt"] += amp * 4.0 * v * v * s2
        return out

    def exact(self, x, t) -> np.ndarray:
        return self.exact_derivatives(x, t)["u"]

    def squared_residual(self, ux, ut, x, t) -> torch.Tensor:
        r = ut[0].derivative(2) - 3.0 * ux[0].derivative(2)
        return r * r

    def initial_loss(self, ev: ConditionEvaluator) -> torch.Tensor:
        x = self.initial_nodes()
        t = np.zeros_like(x)
        target = torch.as_tensor(self.exact(x, t))
        direction = "x" if self.printed_ic_velocity else "t"
        jet = ev.jets(x, t, direction, 1)[0]
        return torch.mean((jet.value - target) ** 2 + jet.derivative(1) ** 2)

    def boundary_loss(self, ev: ConditionEvaluator) -> torch.Tensor:
        t = self.boundary_times()
        left = ev.values(np.full_like(t, -HALF_WIDTH), t)[:, 0]
        right = ev.values(np.full_like(t, HALF_WIDTH), t)[:, 0]
        return torch.mean(left**2 + right**2)
