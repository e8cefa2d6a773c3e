"""Advancing-front node placement with a variable spacing field.

A front of candidate points starts as a slightly perturbed row along the
bottom edge. The lowest candidate is repeatedly committed as a node; every
candidate closer than the local spacing is dropped and a short arc of new
candidates is placed above the committed node, between the directions of its
left and right neighbors on the front. Generation runs in the unit square and
the result is mapped onto the target rectangle.
"""

from __future__ import annotations

import heapq
import math
from bisect import bisect_left, bisect_right, insort

import numpy as np

from app.services.debug import debug_log
from app.services.sampling.base import (
    NodeSet,
    RadiusLike,
    Rect,
    RngStream,
    SamplerKind,
    SamplingError,
    as_radius_field,
)

_INF = float("inf")
# arc points this close outside a wall, relative to r, are pulled onto it
_WALL_SNAP = 0.05


class _Front:
    """Candidate set ordered by x (neighbor queries) and by y (commit order)."""

    def __init__(self) -> None:
        self._points: dict[int, tuple[float, float]] = {}
        self._by_x: list[tuple[float, int]] = []
        self._by_y: list[tuple[float, float, int]] = []
        self._next_id = 0

    def __len__(self) -> int:
        return len(self._points)

    def add(self, x: float, y: float) -> None:
        cid = self._next_id
        self._next_id += 1
        self._points[cid] = (x, y)
        insort(self._by_x, (x, cid))
        heapq.heappush(self._by_y, (y, x, cid))

    def lowest(self) -> tuple[float, float] | None:
        while self._by_y:
            y, x, cid = self._by_y[0]
            if cid in self._points:
                return x, y
            heapq.heappop(self._by_y)
        return None

    def remove_within(self, x: float, y: float, r: float) -> None:
        lo = bisect_left(self._by_x, (x - r, -1))
        hi = bisect_right(self._by_x, (x + r, _INF))
        kept = []
        r2 = r * r
        for entry in self._by_x[lo:hi]:
            ex, cid = entry
            ey = self._points[cid][1]
            if (ex - x) ** 2 + (ey - y) ** 2 < r2:
                del self._points[cid]
            else:
                kept.append(entry)
        self._by_x[lo:hi] = kept

    def neighbors(self, x: float) -> tuple[tuple[float, float] | None, tuple[float, float] | None]:
        left_pos = bisect_left(self._by_x, (x, -1)) - 1
        right_pos = bisect_right(self._by_x, (x, _INF))
        left = self._points[self._by_x[left_pos][1]] if left_pos >= 0 else None
        right = self._points[self._by_x[right_pos][1]] if right_pos < len(self._by_x) else None
        return left, right


def _arc_span(front: _Front, px: float, py: float, r: float) -> tuple[float, float]:
    """Directions bounding the new arc, from the left neighbor to the right one.

    A node within ``r`` of a wall with no neighbor on that side uses the wall
    direction (straight up) in place of the missing neighbor.
    """
    left, right = front.neighbors(px)
    if left is None and right is None:
        return math.pi, 0.0
    if left is not None:
        ang_left = math.atan2(left[1] - py, left[0] - px)
    else:
        ang_left = math.pi / 2 if px <= r else math.pi
    if right is not None:
        ang_right = math.atan2(right[1] - py, right[0] - px)
    else:
        ang_right = math.pi / 2 if 1.0 - px <= r else 0.0
    return ang_left, ang_right


def _snap_to_walls(x: float, r: float) -> float:
    if -_WALL_SNAP * r <= x < 0.0:
        return 0.0
    if 1.0 < x <= 1.0 + _WALL_SNAP * r:
        return 1.0
    return x


def ff_generate(
    rect: Rect,
    h: RadiusLike,
    rng: RngStream,
    *,
    arc_points: int = 5,
    perturbation: float = 0.01,
    tag: SamplerKind | None = SamplerKind.FF,
) -> NodeSet:
    """Place nodes over ``rect`` with local spacing ``h`` (unit-square units)."""
    if arc_points < 1:
        raise SamplingError(f"arc_points must be >= 1, got {arc_points}")
    field = as_radius_field(h)

    def radius(x: float, y: float) -> float:
        value = field.at(x, y)
        if not (math.isfinite(value) and value > 0):
            raise SamplingError(f"radius field returned {value!r} at ({x:.6g}, {y:.6g})")
        # the unit square's side bounds any useful spacing
        return min(value, 1.0)

    front = _Front()
    x = 0.0
    while x <= 1.0:
        r0 = radius(x, 0.0)
        front.add(x, rng.open_closed(perturbation * r0))
        x += r0

    fractions = [(2 * i + 1) / (2 * arc_points) for i in range(arc_points)]
    committed: list[tuple[float, float]] = []
    while True:
        lowest = front.lowest()
        if lowest is None or lowest[1] > 1.0:
            break
        px, py = lowest
        r = radius(px, py)
        committed.append((px, py))
        front.remove_within(px, py, r)

        ang_left, ang_right = _arc_span(front, px, py, r)
        for f in fractions:
            ang = ang_left - f * (ang_left - ang_right)
            nx = _snap_to_walls(px + r * math.cos(ang), r)
            if 0.0 <= nx <= 1.0:
                front.add(nx, py + r * math.sin(ang))

    debug_log("SAMPLING", "front generate nodes=%d field=%s seed=%d", len(committed), field.description, rng.seed)
    unit = np.asarray(committed, dtype=np.float64).reshape(-1, 2)
    return NodeSet(rect.from_unit(unit), rect, rng.seed, tag)
