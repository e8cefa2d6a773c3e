from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from app.services.sampling.base import Point2, Rect, UNIT_SQUARE, nearest_index


class ErrorMapError(ValueError):
    pass


def cell_centers(rect: Rect, nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
    """Cell-centered coordinates of an nx-by-ny grid over ``rect``."""
    xs = rect.xmin + (np.arange(nx) + 0.5) * (rect.width / nx)
    ys = rect.ymin + (np.arange(ny) + 0.5) * (rect.height / ny)
    return xs, ys


@dataclass(frozen=True, eq=False)
class GridErrorMap:
    """Error values at the cell centers of a uniform grid; ``values[i, j]`` is x-cell i, y-cell j."""

    rect: Rect
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2 or values.size == 0:
            raise ErrorMapError(f"error map must be a non-empty 2-D grid, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def ny(self) -> int:
        return self.values.shape[1]

    @classmethod
    def zeros(cls, nx: int, ny: int, rect: Rect = UNIT_SQUARE) -> "GridErrorMap":
        return cls(rect, np.zeros((nx, ny)))

    def pullback(self) -> "GridErrorMap":
        """Same values relabelled onto the unit square (the grid is affine-invariant)."""
        return type(self)(UNIT_SQUARE, self.values)

    def nearest_index(self, p: Point2) -> tuple[int, int]:
        x = min(max(p[0], self.rect.xmin), self.rect.xmax)
        y = min(max(p[1], self.rect.ymin), self.rect.ymax)
        return (
            nearest_index(x, self.rect.xmin, self.rect.xmax, self.nx),
            nearest_index(y, self.rect.ymin, self.rect.ymax, self.ny),
        )

    def to_csv(self, path: str) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        r = self.rect
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("nx,ny,xmin,xmax,ymin,ymax\n")
            handle.write(f"{self.nx},{self.ny},{r.xmin:.17g},{r.xmax:.17g},{r.ymin:.17g},{r.ymax:.17g}\n")
            np.savetxt(handle, self.values, fmt="%.17g", delimiter=",")

    @classmethod
    def from_csv(cls, path: str) -> "GridErrorMap":
        with open(path, "r", encoding="utf-8") as handle:
            handle.readline()
            header = handle.readline().strip().split(",")
            values = np.loadtxt(handle, delimiter=",", ndmin=2)
        nx, ny = int(header[0]), int(header[1])
        rect = Rect(*(float(v) for v in header[2:6]))
        if values.shape != (nx, ny):
            raise ErrorMapError(f"{path}: header says {nx}x{ny}, body is {values.shape[0]}x{values.shape[1]}")
        return cls(rect, values)


class NormalizedErrorMap(GridErrorMap):
    """Error map with every value in [0, 1]."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if not np.all(np.isfinite(self.values)):
            raise ErrorMapError("normalized error map holds non-finite values")
        if self.values.min() < 0.0 or self.values.max() > 1.0:
            raise ErrorMapError(
                f"normalized error map out of [0, 1]: [{self.values.min():.6g}, {self.values.max():.6g}]"
            )


def nearest_value(error_map: GridErrorMap, p: Point2) -> float:
    """Value of the nearest cell center, ties to the lower index; ``p`` is clamped into the rect."""
    i, j = error_map.nearest_index(p)
    return float(error_map.values[i, j])
