from __future__ import annotations

import numpy as np
import torch

from app.services.problems.base import AnalyticProblem, ConditionEvaluator, ProblemDefaults, segment
from app.services.sampling.base import Rect

SIGMA = 0.1
CENTER = 0.3


def _bump(dx, dy, sigma: float):
    return np.exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma))


def forcing(x, y, sigma: float = SIGMA):
    """Laplacian of the two-bump solution; works on numpy arrays and torch tensors."""
    lib = torch if isinstance(x, torch.Tensor) else np
    total = 0
    for sign, c in ((1.0, CENTER), (-1.0, -CENTER)):
        dx, dy = x - c, y - c
        r2 = dx * dx + dy * dy
        total = total + sign * lib.exp(-r2 / (2.0 * sigma * sigma)) * (r2 - 2.0 * sigma * sigma) / sigma**4
    return total


class Poisson(AnalyticProblem):
    """u_xx + u_yy = w on [-1, 1]^2, u = 0 on the boundary.

    Solution: a positive Gaussian bump at (0.3, 0.3) minus one at (-0.3, -0.3).
    The second coordinate is y, so the "t" jet is the y-direction jet.
    """

    name = "poisson"
    rect = Rect(-1.0, 1.0, -1.0, 1.0)
    x_degree = 2
    t_degree = 2
    has_initial = False
    defaults = ProblemDefaults(n_pde=400, max_iter=3000, interval=100, replicates=100)

    def __init__(self, *, condition_nodes: int = 200, sigma: float = SIGMA) -> None:
        super().__init__(condition_nodes=condition_nodes)
        self.sigma = sigma

    def exact_derivatives(self, x, y) -> dict[str, np.ndarray]:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        s2 = self.sigma**2
        out = {key: np.zeros(np.broadcast(x, y).shape) for key in ("u", "u_x", "u_xx", "u_t", "u_tt")}
        for sign, c in ((1.0, CENTER), (-1.0, -CENTER)):
            dx, dy = x - c, y - c
            g = sign * _bump(dx, dy, self.sigma)
            out["u"] += g
            out["u_x"] += -dx / s2 * g
            out["u_xx"] += (dx * dx / s2**2 - 1.0 / s2) * g
            out["u_t"] += -dy / s2 * g
            out["u_tt"] += (dy * dy / s2**2 - 1.0 / s2) * g
        return out

    def exact(self, x, y) -> np.ndarray:
        return self.exact_derivatives(x, y)["u"]

    def squared_residual(self, ux, ut, x, t) -> torch.Tensor:
        r = ux[0].derivative(2) + ut[0].derivative(2) - forcing(x, t, self.sigma)
        return r * r

    def boundary_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        r = self.rect
        n = self.condition_nodes
        along_x = segment(r.xmin, r.xmax, n)
        along_y = segment(r.ymin, r.ymax, n)
        xs = np.concatenate((along_x, along_x, np.full(n, r.xmin), np.full(n, r.xmax)))
        ys = np.concatenate((np.full(n, r.ymin), np.full(n, r.ymax), along_y, along_y))
        return xs, ys

    def boundary_loss(self, ev: ConditionEvaluator) -> torch.Tensor:
        xs, ys = self.boundary_nodes()
        u = ev.values(xs, ys)[:, 0]
        return torch.mean(u**2)
