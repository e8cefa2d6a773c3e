from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np

Point2 = tuple[float, float]


class SamplingError(RuntimeError):
    pass


# Purpose codes for derived streams. A stream is a pure function of
# (seed, purpose, index), never of the sampler kind.
PURPOSE_INIT = 1
PURPOSE_SAMPLE = 2
PURPOSE_FRONT = 3


class SamplerKind(str, Enum):
    RANDOM = "random"
    RANDOM_R = "random-r"
    HAMMERSLEY = "hammersley"
    LHS = "lhs"
    LHS_R = "lhs-r"
    FF = "ff"
    FF_R = "ff-r"
    RANG = "rang"
    RANG_M = "rang-m"

    @classmethod
    def parse(cls, name: str) -> "SamplerKind":
        key = (name or "").strip().lower().replace("_", "-")
        aliases = {"rangm": "rang-m", "random_r": "random-r", "lhsr": "lhs-r", "ffr": "ff-r"}
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        valid = ", ".join(kind.value for kind in cls)
        raise ValueError(f"unknown sampler '{name}' (expected one of: {valid})")

    @property
    def resamples(self) -> bool:
        return self in (
            SamplerKind.RANDOM_R,
            SamplerKind.LHS_R,
            SamplerKind.FF_R,
            SamplerKind.RANG,
            SamplerKind.RANG_M,
        )

    @property
    def adaptive(self) -> bool:
        return self in (SamplerKind.RANG, SamplerKind.RANG_M)

    @property
    def default_beta(self) -> float:
        return 0.9 if self is SamplerKind.RANG_M else 0.0


@dataclass(frozen=True)
class Rect:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self) -> None:
        values = (self.xmin, self.xmax, self.ymin, self.ymax)
        if not all(math.isfinite(v) for v in values):
            raise SamplingError(f"rect bounds must be finite: {values}")
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise SamplingError(f"degenerate rect: {values}")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def from_unit(self, unit: np.ndarray) -> np.ndarray:
        unit = np.asarray(unit, dtype=np.float64)
        out = np.empty_like(unit)
        out[:, 0] = self.xmin + unit[:, 0] * self.width
        out[:, 1] = self.ymin + unit[:, 1] * self.height
        return out

    def to_unit(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        out = np.empty_like(points)
        out[:, 0] = (points[:, 0] - self.xmin) / self.width
        out[:, 1] = (points[:, 1] - self.ymin) / self.height
        return out

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return (
            (points[:, 0] >= self.xmin - tol)
            & (points[:, 0] <= self.xmax + tol)
            & (points[:, 1] >= self.ymin - tol)
            & (points[:, 1] <= self.ymax + tol)
        )

    def is_close(self, other: "Rect", tol: float = 1e-9) -> bool:
        return all(
            abs(a - b) <= tol
            for a, b in zip(
                (self.xmin, self.xmax, self.ymin, self.ymax),
                (other.xmin, other.xmax, other.ymin, other.ymax),
            )
        )


UNIT_SQUARE = Rect(0.0, 1.0, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Immutable node set in problem coordinates (column 0 = x, column 1 = y or t)."""

    points: np.ndarray
    rect: Rect
    generation_seed: int = 0
    sampler_tag: Optional[SamplerKind] = None

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=np.float64, copy=True).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def unit_points(self) -> np.ndarray:
        return self.rect.to_unit(self.points)

    def with_tag(self, tag: Optional[SamplerKind]) -> "NodeSet":
        return NodeSet(self.points, self.rect, self.generation_seed, tag)

    def to_csv(self, path: str) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        np.savetxt(path, self.points, fmt="%.17g", delimiter=",", header="x,y", comments="")

    @classmethod
    def from_csv(cls, path: str, rect: Rect, *, sampler_tag: Optional[SamplerKind] = None) -> "NodeSet":
        points = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(points.reshape(-1, 2), rect, 0, sampler_tag)


class RngStream:
    """Seeded PCG64 stream. ``derive`` gives independent child streams."""

    def __init__(self, seed: int) -> None:
        if seed < 0:
            raise SamplingError(f"seed must be non-negative, got {seed}")
        self._seed = int(seed)
        self._generator = np.random.Generator(np.random.PCG64(self._seed))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def derive(self, purpose: int, index: int = 0) -> "RngStream":
        seq = np.random.SeedSequence([self._seed, int(purpose), int(index)])
        child = RngStream.__new__(RngStream)
        child._seed = int(seq.generate_state(1, dtype=np.uint64)[0])
        child._generator = np.random.Generator(np.random.PCG64(child._seed))
        return child

    def fresh(self) -> "RngStream":
        """Same seed, restarted from the beginning of the sequence."""
        return RngStream(self._seed)

    def random(self, size=None):
        return self._generator.random(size)

    def open_closed(self, upper: float) -> float:
        """Uniform draw in (0, upper]."""
        return (1.0 - float(self._generator.random())) * upper


class RadiusField:
    """Positive local spacing h(x, y) in unit-square coordinates."""

    def __init__(
        self,
        fn: Callable[[float, float], float],
        *,
        description: str = "custom",
        grid: Optional[np.ndarray] = None,
    ) -> None:
        self._fn = fn
        self.description = description
        self._grid = grid

    @classmethod
    def constant(cls, h: float) -> "RadiusField":
        if not (math.isfinite(h) and h > 0):
            raise SamplingError(f"radius must be positive and finite, got {h}")
        value = float(h)
        return cls(lambda _x, _y: value, description=f"constant({value:.6g})")

    @classmethod
    def from_grid(cls, values: np.ndarray) -> "RadiusField":
        """Nearest-cell lookup on a cell-centered grid covering the unit square."""
        grid = np.asarray(values, dtype=np.float64)
        if grid.ndim != 2 or grid.size == 0:
            raise SamplingError(f"radius grid must be a non-empty 2-D array, got shape {grid.shape}")
        if not np.all(np.isfinite(grid)) or np.any(grid <= 0):
            raise SamplingError("radius grid must be positive and finite")
        nx, ny = grid.shape
        table = grid.tolist()

        def lookup(x: float, y: float) -> float:
            return table[nearest_index(x, 0.0, 1.0, nx)][nearest_index(y, 0.0, 1.0, ny)]

        return cls(lookup, description=f"grid({nx}x{ny})", grid=grid)

    @property
    def grid(self) -> Optional[np.ndarray]:
        return self._grid

    def at(self, x: float, y: float) -> float:
        return float(self._fn(x, y))

    def __call__(self, x: float, y: float) -> float:
        return self.at(x, y)


def nearest_index(value: float, lo: float, hi: float, n: int) -> int:
    """Index of the nearest cell center; exact midpoints go to the lower index."""
    t = (value - lo) / (hi - lo) * n
    idx = math.ceil(t) - 1
    if idx < 0:
        return 0
    if idx > n - 1:
        return n - 1
    return idx


RadiusLike = Union[RadiusField, float]


def as_radius_field(h: RadiusLike) -> RadiusField:
    if isinstance(h, RadiusField):
        return h
    return RadiusField.constant(float(h))
