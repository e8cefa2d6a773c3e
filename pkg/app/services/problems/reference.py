"""Gridded reference solutions (Allen–Cahn, Schrödinger).

File layout: a header line ``nt,nx,tmin,tmax,xmin,xmax,components``, one
line with those values, then one line per grid node in row-major order
(t outer, x inner) holding ``components`` comma-separated values. Grid
nodes include both edges of each axis.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from app.services.problems.base import ReferenceDataError, TestGrid
from app.services.sampling.base import Rect, SamplingError

_logger = logging.getLogger("rang.reference")

HEADER = "nt,nx,tmin,tmax,xmin,xmax,components"


@dataclass(frozen=True, eq=False)
class GridReference:
    rect: Rect
    nt: int
    nx: int
    components: int
    values: np.ndarray  # (nt, nx, components)

    @property
    def ts(self) -> np.ndarray:
        return np.linspace(self.rect.ymin, self.rect.ymax, self.nt)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.rect.xmin, self.rect.xmax, self.nx)

    def test_grid(self) -> TestGrid:
        tt, xx = np.meshgrid(self.ts, self.xs, indexing="ij")
        inputs = np.column_stack((xx.reshape(-1), tt.reshape(-1)))
        return TestGrid(inputs, self.values.reshape(-1, self.components), self.nx, self.nt)


def write_grid_reference(path: str, ref: GridReference) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    r = ref.rect
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(HEADER + "\n")
        handle.write(
            f"{ref.nt},{ref.nx},{r.ymin:.17g},{r.ymax:.17g},{r.xmin:.17g},{r.xmax:.17g},{ref.components}\n"
        )
        np.savetxt(handle, ref.values.reshape(-1, ref.components), fmt="%.17g", delimiter=",")


def load_grid_reference(path: str, expected_rect: Rect, components: int) -> GridReference:
    if not os.path.isfile(path):
        raise ReferenceDataError(
            f"reference grid not found: {path} (generate it with scripts/make_reference.py)"
        )
    with open(path, "r", encoding="utf-8") as handle:
        names = handle.readline().strip()
        header = handle.readline().strip().split(",")
    if names != HEADER or len(header) != 7:
        raise ReferenceDataError(f"{path}: expected header '{HEADER}', got '{names}'")
    try:
        nt, nx = int(header[0]), int(header[1])
        tmin, tmax, xmin, xmax = (float(v) for v in header[2:6])
        file_components = int(header[6])
    except ValueError as exc:
        raise ReferenceDataError(f"{path}: malformed header values {header}") from exc

    try:
        rect = Rect(xmin, xmax, tmin, tmax)
    except SamplingError as exc:
        raise ReferenceDataError(f"{path}: degenerate grid extent in header ({exc})") from exc
    if not rect.is_close(expected_rect):
        raise ReferenceDataError(f"{path}: grid covers {rect}, problem domain is {expected_rect}")
    if file_components != components:
        raise ReferenceDataError(f"{path}: {file_components} components, problem needs {components}")

    body = pd.read_csv(path, skiprows=2, header=None, float_precision="round_trip").to_numpy(dtype=np.float64)
    if body.shape != (nt * nx, components):
        raise ReferenceDataError(
            f"{path}: expected {nt * nx} rows of {components} values, got {body.shape[0]}x{body.shape[1]}"
        )
    bad = np.flatnonzero(~np.isfinite(body).all(axis=1))
    if bad.size:
        raise ReferenceDataError(f"{path}: non-finite value in data row {int(bad[0])}")
    _logger.info("Loaded reference %s (%dx%d, %d components)", path, nt, nx, components)
    return GridReference(rect, nt, nx, components, body.reshape(nt, nx, components))
