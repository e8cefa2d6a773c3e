"""Error-driven spacing fields and the node-count calibration around them.

``standardize_combine`` min-max scales an absolute error map and folds in
the decayed memory of the previous map. ``radius_field_from`` turns the
result into a spacing field whose extreme values differ by ``sqrt(ratio)``,
and ``calibrated_arff`` bisects the spacing scale until the advancing front
yields close to the requested number of nodes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from app.services.debug import debug_log
from app.services.debug_logging import log_event
from app.services.errormap.grid import ErrorMapError, GridErrorMap, NormalizedErrorMap
from app.services.sampling.advancing_front import ff_generate
from app.services.sampling.base import NodeSet, RadiusField, Rect, RngStream, SamplerKind, UNIT_SQUARE

_logger = logging.getLogger("rang.arff")


@dataclass(frozen=True)
class ArffParams:
    beta: float
    ratio: float
    scale: float
    eps: float = 1e-12

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta <= 1.0:
            raise ErrorMapError(f"beta must lie in [0, 1], got {self.beta}")
        if not self.ratio >= 1.0:
            raise ErrorMapError(f"ratio must be >= 1, got {self.ratio}")
        if not self.scale > 0.0:
            raise ErrorMapError(f"scale must be > 0, got {self.scale}")
        if not self.eps > 0.0:
            raise ErrorMapError(f"eps must be > 0, got {self.eps}")


@dataclass(frozen=True)
class BisectionBounds:
    s_low: float
    s_up: float
    count_tol: float = 0.05
    width_tol: float = 0.003

    def __post_init__(self) -> None:
        if not 0.0 < self.s_low < self.s_up:
            raise ErrorMapError(f"bisection bounds need 0 < s_low < s_up, got ({self.s_low}, {self.s_up})")

    @classmethod
    def default_for(cls, n_target: int, *, low_factor: float = 0.2, up_factor: float = 20.0, **tolerances) -> "BisectionBounds":
        base = math.sqrt(1.0 / n_target)
        return cls(low_factor * base, up_factor * base, **tolerances)


@dataclass(frozen=True)
class CalibratedNodes:
    nodes: NodeSet
    ebar: NormalizedErrorMap
    scale: float
    generations: int
    within_tolerance: bool


def standardize_combine(
    e: GridErrorMap,
    prior: NormalizedErrorMap,
    beta: float,
    eps: float = 1e-12,
) -> NormalizedErrorMap:
    if e.shape != prior.shape:
        raise ErrorMapError(f"error map shape {e.shape} does not match prior shape {prior.shape}")
    if not 0.0 <= beta <= 1.0:
        raise ErrorMapError(f"beta must lie in [0, 1], got {beta}")
    magnitude = np.abs(e.values)
    if not np.all(np.isfinite(magnitude)):
        raise ErrorMapError("error map holds non-finite values")
    lo, hi = float(magnitude.min()), float(magnitude.max())
    scaled = (magnitude - lo) / (hi - lo + eps)
    combined = np.clip(np.maximum(scaled, beta * prior.values), 0.0, 1.0)
    return NormalizedErrorMap(UNIT_SQUARE, combined)


def radius_field_from(ebar: NormalizedErrorMap, ratio: float, scale: float) -> RadiusField:
    """Spacing ``scale`` where the error is lowest, ``scale / sqrt(ratio)`` where it peaks."""
    if not ratio >= 1.0:
        raise ErrorMapError(f"ratio must be >= 1, got {ratio}")
    if not scale > 0.0:
        raise ErrorMapError(f"scale must be > 0, got {scale}")
    shrink = 1.0 - 1.0 / math.sqrt(ratio)
    # s * (1 - e * shrink) keeps e == 0 bitwise equal to the constant spacing s
    return RadiusField.from_grid(scale * (1.0 - ebar.values * shrink))


def arff(
    rect: Rect,
    e: GridErrorMap,
    prior: NormalizedErrorMap,
    params: ArffParams,
    rng: RngStream,
    *,
    arc_points: int = 5,
    perturbation: float = 0.01,
    tag: SamplerKind | None = SamplerKind.RANG,
) -> tuple[NodeSet, NormalizedErrorMap]:
    ebar = standardize_combine(e.pullback(), prior, params.beta, params.eps)
    field = radius_field_from(ebar, params.ratio, params.scale)
    nodes = ff_generate(rect, field, rng, arc_points=arc_points, perturbation=perturbation, tag=tag)
    return nodes, ebar


def calibrated_arff(
    rect: Rect,
    e: GridErrorMap,
    prior: NormalizedErrorMap,
    beta: float,
    ratio: float,
    n_target: int,
    bounds: BisectionBounds,
    rng: RngStream,
    *,
    eps: float = 1e-12,
    arc_points: int = 5,
    perturbation: float = 0.01,
    tag: SamplerKind | None = SamplerKind.RANG,
) -> CalibratedNodes:
    """Bisect the spacing scale until the node count is within tolerance of ``n_target``.

    Every generation restarts the same random stream, so the count changes
    only through the scale. Stops early on tolerance, otherwise once the
    bracket is narrower than ``bounds.width_tol``.
    """
    if n_target < 1:
        raise ErrorMapError(f"n_target must be >= 1, got {n_target}")
    s_low, s_up = bounds.s_low, bounds.s_up
    generations = 0
    while True:
        s = 0.5 * (s_low + s_up)
        nodes, ebar = arff(
            rect,
            e,
            prior,
            ArffParams(beta=beta, ratio=ratio, scale=s, eps=eps),
            rng.fresh(),
            arc_points=arc_points,
            perturbation=perturbation,
            tag=tag,
        )
        generations += 1
        count = len(nodes)
        within = abs(count - n_target) <= bounds.count_tol * n_target
        debug_log("ARFF", "bisection gen=%d s=%.6f count=%d target=%d", generations, s, count, n_target)
        if within or (s_up - s_low) < bounds.width_tol:
            break
        if count < n_target:
            s_up = s
        else:
            s_low = s

    if not within:
        _logger.warning(
            "Calibration stopped outside tolerance: count=%d target=%d s=%.6f", count, n_target, s
        )
    log_event(
        _logger,
        "calibrated",
        count=count,
        target=n_target,
        scale=s,
        generations=generations,
        beta=beta,
        within_tolerance=within,
    )
    return CalibratedNodes(nodes=nodes, ebar=ebar, scale=s, generations=generations, within_tolerance=within)
