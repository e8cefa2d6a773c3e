from __future__ import annotations

import os
from typing import Optional

from app.services.problems.allen_cahn import allen_cahn
from app.services.problems.base import PdeProblem
from app.services.problems.conv_diff import ConvectionDiffusion
from app.services.problems.kdv import KdV
from app.services.problems.poisson import Poisson
from app.services.problems.schrodinger import schrodinger
from app.services.problems.wave import Wave

PROBLEM_NAMES = ("allen-cahn", "wave", "schrodinger", "kdv", "poisson", "conv-diff")

_ALIASES = {
    "allen_cahn": "allen-cahn",
    "allencahn": "allen-cahn",
    "conv_diff": "conv-diff",
    "convection-diffusion": "conv-diff",
    "schroedinger": "schrodinger",
    "schrödinger": "schrodinger",
}


def normalize_problem_name(name: str) -> str:
    key = (name or "").strip().lower()
    key = _ALIASES.get(key, key)
    if key not in PROBLEM_NAMES:
        raise ValueError(f"unknown problem '{name}' (expected one of: {', '.join(PROBLEM_NAMES)})")
    return key


def make_problem(
    name: str,
    *,
    condition_nodes: int = 200,
    printed_ic_slope: bool = False,
    printed_ic_velocity: bool = False,
    reference_dir: Optional[str] = None,
) -> PdeProblem:
    """Construct a benchmark problem by name.

    Raises ``ReferenceDataError`` for gridded problems whose reference file is missing.
    """
    key = normalize_problem_name(name)
    if key == "allen-cahn":
        path = os.path.join(reference_dir, "allen_cahn.csv") if reference_dir else None
        return allen_cahn(path, condition_nodes=condition_nodes, printed_ic_slope=printed_ic_slope)
    if key == "schrodinger":
        path = os.path.join(reference_dir, "schrodinger.csv") if reference_dir else None
        return schrodinger(path, condition_nodes=condition_nodes)
    if key == "wave":
        return Wave(condition_nodes=condition_nodes, printed_ic_velocity=printed_ic_velocity)
    if key == "kdv":
        return KdV(condition_nodes=condition_nodes)
    if key == "poisson":
        return Poisson(condition_nodes=condition_nodes)
    return ConvectionDiffusion(condition_nodes=condition_nodes)
