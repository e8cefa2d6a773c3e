"""Suite presets.

``paper`` uses each problem's published settings. ``desk`` keeps the node count
and resampling interval but trims iterations and replicates so a suite
finishes on a workstation.
"""

from __future__ import annotations

from dataclasses import dataclass

from app.services.problems.registry import normalize_problem_name

PRESETS = ("desk", "paper")


@dataclass(frozen=True)
class SuitePreset:
    n_pde: int
    max_iter: int
    interval: int
    replicates: int


_PAPER = {
    "allen-cahn": SuitePreset(1000, 50000, 1000, 30),
    "wave": SuitePreset(1000, 15000, 1000, 50),
    "schrodinger": SuitePreset(1000, 50000, 1000, 30),
    "kdv": SuitePreset(1000, 50000, 1000, 50),
    "poisson": SuitePreset(400, 3000, 100, 100),
    "conv-diff": SuitePreset(1000, 10000, 1000, 60),
}

_DESK = {
    "allen-cahn": SuitePreset(1000, 10000, 1000, 3),
    "wave": SuitePreset(1000, 15000, 1000, 3),
    "schrodinger": SuitePreset(1000, 10000, 1000, 3),
    "kdv": SuitePreset(1000, 10000, 1000, 3),
    "poisson": SuitePreset(400, 3000, 100, 5),
    "conv-diff": SuitePreset(1000, 10000, 1000, 3),
}


def preset_for(problem: str, preset: str = "desk") -> SuitePreset:
    key = normalize_problem_name(problem)
    name = (preset or "desk").strip().lower()
    if name == "paper":
        return _PAPER[key]
    if name == "desk":
        return _DESK[key]
    raise ValueError(f"unknown preset '{preset}' (expected one of: {', '.join(PRESETS)})")
