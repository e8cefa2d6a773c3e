from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from app.services.sampling.base import NodeSet, Point2, SamplingError


@dataclass(frozen=True)
class SpacingStats:
    min: float
    mean: float
    max: float


def nearest_neighbor_distances(ns: NodeSet) -> np.ndarray:
    if len(ns) < 2:
        raise SamplingError(f"need at least 2 nodes for spacing statistics, got {len(ns)}")
    tree = cKDTree(ns.points)
    distances, _ = tree.query(ns.points, k=2)
    return distances[:, 1]


def nn_spacing_stats(ns: NodeSet) -> SpacingStats:
    d = nearest_neighbor_distances(ns)
    return SpacingStats(min=float(d.min()), mean=float(d.mean()), max=float(d.max()))


def star_discrepancy_bruteforce(ns: NodeSet) -> float:
    """Star discrepancy in unit-square coordinates over anchored boxes.

    Box corners range over the node coordinates plus 1; both the half-open and
    the closed box are counted at every corner.
    """
    n = len(ns)
    if n < 1:
        raise SamplingError("star discrepancy of an empty node set")
    unit = ns.unit_points()
    xs, ys = unit[:, 0], unit[:, 1]
    corners_x = np.unique(np.append(xs, 1.0))
    corners_y = np.unique(np.append(ys, 1.0))
    worst = 0.0
    for a in corners_x:
        open_x = xs < a
        closed_x = xs <= a
        area = a * corners_y
        open_counts = (open_x[None, :] & (ys[None, :] < corners_y[:, None])).sum(axis=1) / n
        closed_counts = (closed_x[None, :] & (ys[None, :] <= corners_y[:, None])).sum(axis=1) / n
        worst = max(
            worst,
            float(np.max(np.abs(open_counts - area))),
            float(np.max(np.abs(closed_counts - area))),
        )
    return worst


def filter_inside(ns: NodeSet, inside: Callable[[Point2], bool]) -> NodeSet:
    mask = np.fromiter(
        (bool(inside((float(x), float(y)))) for x, y in ns.points), dtype=bool, count=len(ns)
    )
    return NodeSet(ns.points[mask], ns.rect, ns.generation_seed, ns.sampler_tag)
