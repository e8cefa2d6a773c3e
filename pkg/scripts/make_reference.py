"""Generate the gridded reference solutions for Allen–Cahn and Schrödinger.

Schrödinger: Strang split-step Fourier on the periodic interval [-5, 5).
Allen–Cahn: second-order finite differences in x with semi-implicit Euler
in time (diffusion implicit, reaction explicit), u = -1 held at both walls.

Usage:
    python scripts/make_reference.py                 # both, into data/reference/
    python scripts/make_reference.py --only schrodinger --out /tmp/ref
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

import numpy as np
import scipy.fft
import scipy.sparse as sp
from scipy.sparse.linalg import factorized

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.paths import reference_dir  # noqa: E402
from app.services.logging_setup import configure_logging  # noqa: E402
from app.services.problems.allen_cahn import RECT as AC_RECT, initial_profile as ac_initial  # noqa: E402
from app.services.problems.reference import GridReference, write_grid_reference  # noqa: E402
from app.services.problems.schrodinger import RECT as NLS_RECT, initial_profile as nls_initial  # noqa: E402

logger = logging.getLogger("rang.reference")


def schrodinger_reference(nx: int = 256, nt: int = 201, steps_per_frame: int = 100) -> GridReference:
    length = NLS_RECT.width
    x = NLS_RECT.xmin + length * np.arange(nx) / nx
    k = 2.0 * math.pi * scipy.fft.fftfreq(nx, d=length / nx)
    dt = NLS_RECT.height / ((nt - 1) * steps_per_frame)
    half_linear = np.exp(-0.5j * k * k * (dt / 2.0))

    u = nls_initial(x).astype(np.complex128)
    frames = [u.copy()]
    for _ in range(nt - 1):
        for _ in range(steps_per_frame):
            u = scipy.fft.ifft(half_linear * scipy.fft.fft(u))
            u = u * np.exp(1j * np.abs(u) ** 2 * dt)
            u = scipy.fft.ifft(half_linear * scipy.fft.fft(u))
        frames.append(u.copy())

    field = np.array(frames)
    # periodic: the right edge repeats the left edge
    field = np.concatenate((field, field[:, :1]), axis=1)
    values = np.stack((field.real, field.imag), axis=-1)
    return GridReference(NLS_RECT, nt, nx + 1, 2, values)


def allen_cahn_reference(nx: int = 513, nt: int = 201, steps_per_frame: int = 50) -> GridReference:
    x = np.linspace(AC_RECT.xmin, AC_RECT.xmax, nx)
    dx = x[1] - x[0]
    dt = AC_RECT.height / ((nt - 1) * steps_per_frame)
    interior = nx - 2
    lap = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(interior, interior)) / dx**2
    solve = factorized((sp.identity(interior) - dt * 1e-4 * lap).tocsc())
    wall = np.zeros(interior)
    wall[0] = wall[-1] = -1.0 * dt * 1e-4 / dx**2

    u = ac_initial(x)
    u[0] = u[-1] = -1.0
    frames = [u.copy()]
    for _ in range(nt - 1):
        for _ in range(steps_per_frame):
            inner = u[1:-1]
            rhs = inner + dt * (5.0 * inner - 5.0 * inner**3) + wall
            u[1:-1] = solve(rhs)
        frames.append(u.copy())
    return GridReference(AC_RECT, nt, nx, 1, np.array(frames)[..., None])


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", default=None, help="Output directory (default: data/reference).")
    parser.add_argument("--only", choices=["allen-cahn", "schrodinger"], default=None)
    args = parser.parse_args(argv)

    configure_logging(label="make_reference")
    out = args.out or reference_dir()
    os.makedirs(out, exist_ok=True)
    if args.only in (None, "schrodinger"):
        path = os.path.join(out, "schrodinger.csv")
        write_grid_reference(path, schrodinger_reference())
        logger.info("Wrote %s", path)
    if args.only in (None, "allen-cahn"):
        path = os.path.join(out, "allen_cahn.csv")
        write_grid_reference(path, allen_cahn_reference())
        logger.info("Wrote %s", path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
