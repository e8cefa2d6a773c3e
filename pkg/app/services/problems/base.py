from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np
import torch

from app.services.autodiff.jet import Jet
from app.services.sampling.base import Rect


class ReferenceDataError(RuntimeError):
    pass


@dataclass(frozen=True)
class LossWeights:
    w_pde: float = 0.2
    w_0: float = 2.0
    w_b: float = 2.0

    def __post_init__(self) -> None:
        if min(self.w_pde, self.w_0, self.w_b) < 0:
            raise ValueError(f"loss weights must be non-negative: {self}")


@dataclass(frozen=True)
class ProblemDefaults:
    n_pde: int
    max_iter: int
    interval: int
    replicates: int
    weights: LossWeights = LossWeights()


@dataclass(frozen=True, eq=False)
class TestGrid:
    """Evaluation grid: ``inputs`` is (m, 2) in (x, t) order, ``values`` is (m, components)."""

    inputs: np.ndarray
    values: np.ndarray
    nx: int
    nt: int


class ConditionEvaluator(Protocol):
    """Network access for initial and boundary terms."""

    def values(self, x: np.ndarray, t: np.ndarray) -> torch.Tensor:
        """Network output, shape (n, components)."""

    def jets(self, x: np.ndarray, t: np.ndarray, direction: str, degree: int) -> list[Jet]:
        """Per-component jets seeded along ``direction`` ("x" or "t")."""


def segment(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, n)


def uniform_test_grid(rect: Rect, exact, nx: int = 256, nt: int = 256) -> TestGrid:
    """Node grid including the rect edges, t outer and x inner."""
    xs = np.linspace(rect.xmin, rect.xmax, nx)
    ts = np.linspace(rect.ymin, rect.ymax, nt)
    tt, xx = np.meshgrid(ts, xs, indexing="ij")
    x, t = xx.reshape(-1), tt.reshape(-1)
    return TestGrid(np.column_stack((x, t)), np.asarray(exact(x, t)).reshape(x.size, -1), nx, nt)


class PdeProblem(ABC):
    """One benchmark PDE on a rectangle; column 0 is x, column 1 is t (y for Poisson)."""

    name: str
    rect: Rect
    output_dim: int = 1
    x_degree: int = 2
    t_degree: int = 1
    has_initial: bool = True
    defaults: ProblemDefaults

    def __init__(self, *, condition_nodes: int = 200) -> None:
        if condition_nodes < 2:
            raise ValueError(f"condition_nodes must be >= 2, got {condition_nodes}")
        self.condition_nodes = condition_nodes
        self._test_grid: Optional[TestGrid] = None

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, rect={self.rect})"

    @abstractmethod
    def squared_residual(
        self,
        ux: list[Jet],
        ut: list[Jet],
        x: torch.Tensor,
        t: torch.Tensor,
    ) -> torch.Tensor:
        """Per-node squared PDE residual from x-direction and t-direction jets."""
        raise NotImplementedError

    def initial_loss(self, ev: ConditionEvaluator) -> Optional[torch.Tensor]:
        return None

    @abstractmethod
    def boundary_loss(self, ev: ConditionEvaluator) -> torch.Tensor:
        raise NotImplementedError

    @abstractmethod
    def build_test_grid(self) -> TestGrid:
        raise NotImplementedError

    def test_grid(self) -> TestGrid:
        if self._test_grid is None:
            self._test_grid = self.build_test_grid()
        return self._test_grid

    def initial_nodes(self) -> np.ndarray:
        return segment(self.rect.xmin, self.rect.xmax, self.condition_nodes)

    def boundary_times(self) -> np.ndarray:
        return segment(self.rect.ymin, self.rect.ymax, self.condition_nodes)


class AnalyticProblem(PdeProblem):
    """Problem with a closed-form solution and closed-form derivatives."""

    @abstractmethod
    def exact(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Solution values, shape (n,) or (n, components)."""
        raise NotImplementedError

    @abstractmethod
    def exact_derivatives(self, x: np.ndarray, t: np.ndarray) -> dict[str, np.ndarray]:
        """Closed-form partials keyed ``u``, ``u_x``, ``u_xx``, ... ``u_t``, ``u_tt``."""
        raise NotImplementedError

    def build_test_grid(self) -> TestGrid:
        return uniform_test_grid(self.rect, self.exact)
