"""L-shaped test domain: the unit square minus its upper-right quarter.

The demo drives the error-driven generator with ``e = 1 - sdf`` so nodes
crowd toward the boundary, then keeps only the nodes inside the L.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from app.services.errormap.arff import ArffParams, arff
from app.services.errormap.grid import GridErrorMap, NormalizedErrorMap, cell_centers
from app.services.sampling.base import NodeSet, Point2, RngStream, UNIT_SQUARE, PURPOSE_FRONT
from app.services.sampling.quality import filter_inside

_logger = logging.getLogger("rang.lshape")

_VERTICES = np.array(
    [(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.5, 0.5), (0.5, 1.0), (0.0, 1.0)],
    dtype=np.float64,
)

DEMO_RATIOS = (1.0, 10.0, 100.0)
DEMO_SCALES = (0.08, 0.04, 0.02)


def inside_lshape(p: Point2) -> bool:
    x, y = p
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        return False
    return not (x > 0.5 and y > 0.5)


def sdf_lshape_many(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Signed distance to the L boundary, positive inside."""
    px = np.asarray(xs, dtype=np.float64)[..., None]
    py = np.asarray(ys, dtype=np.float64)[..., None]
    a = _VERTICES
    b = np.roll(_VERTICES, -1, axis=0)
    dx, dy = b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]
    t = ((px - a[:, 0]) * dx + (py - a[:, 1]) * dy) / (dx * dx + dy * dy)
    t = np.clip(t, 0.0, 1.0)
    dist = np.sqrt((px - a[:, 0] - t * dx) ** 2 + (py - a[:, 1] - t * dy) ** 2).min(axis=-1)
    x, y = px[..., 0], py[..., 0]
    inside = (x >= 0.0) & (x <= 1.0) & (y >= 0.0) & (y <= 1.0) & ~((x > 0.5) & (y > 0.5))
    return np.where(inside, dist, -dist)


def sdf_lshape(p: Point2) -> float:
    return float(sdf_lshape_many(np.array([p[0]]), np.array([p[1]]))[0])


def lshape_error_map(nx: int = 128, ny: int = 128) -> GridErrorMap:
    xs, ys = cell_centers(UNIT_SQUARE, nx, ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return GridErrorMap(UNIT_SQUARE, 1.0 - sdf_lshape_many(gx, gy))


@dataclass(frozen=True)
class LShapeCase:
    ratio: float
    scale: float
    nodes: NodeSet

    @property
    def label(self) -> str:
        return f"r{self.ratio:g}_s{self.scale:g}"


def lshape_demo(
    ratios: Sequence[float] = DEMO_RATIOS,
    scales: Sequence[float] = DEMO_SCALES,
    *,
    seed: int = 0,
    grid: int = 128,
    arc_points: int = 5,
    perturbation: float = 0.01,
) -> list[LShapeCase]:
    e = lshape_error_map(grid, grid)
    prior = NormalizedErrorMap.zeros(grid, grid)
    root = RngStream(seed)
    cases: list[LShapeCase] = []
    for ratio in ratios:
        for scale in scales:
            nodes, _ = arff(
                UNIT_SQUARE,
                e,
                prior,
                ArffParams(beta=0.0, ratio=float(ratio), scale=float(scale)),
                root.derive(PURPOSE_FRONT),
                arc_points=arc_points,
                perturbation=perturbation,
                tag=None,
            )
            kept = filter_inside(nodes, inside_lshape)
            _logger.info("L-shape r=%g s=%g nodes=%d (inside=%d)", ratio, scale, len(nodes), len(kept))
            cases.append(LShapeCase(float(ratio), float(scale), kept))
    return cases


def write_lshape_demo(cases: Iterable[LShapeCase], nodes_dir: str) -> list[str]:
    paths = []
    for case in cases:
        path = os.path.join(nodes_dir, f"lshape_{case.label}.csv")
        case.nodes.to_csv(path)
        paths.append(path)
    return paths
