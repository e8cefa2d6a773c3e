"""Run context: single source of truth for output paths.

Every writer (run store, suite aggregation, plot-script emitter, L-shape demo)
receives this object instead of individual path strings.
"""

from __future__ import annotations

import os


class RunContext:
    """Holds the output directory layout of one CLI invocation."""

    def __init__(self, *, output_dir: str, install_dir: str, config_path: str) -> None:
        self._output_dir = os.path.abspath(output_dir)
        self._install_dir = install_dir
        self._config_path = config_path

    @property
    def install_dir(self) -> str:
        return self._install_dir

    @property
    def config_path(self) -> str:
        return self._config_path

    @property
    def output_dir(self) -> str:
        return self._output_dir

    # ── derived paths ──────────────────────────────────────────────────

    @property
    def runs_dir(self) -> str:
        """Per-run history, prediction grid and time-histogram CSVs."""
        return os.path.join(self._output_dir, "runs")

    @property
    def nodes_dir(self) -> str:
        return os.path.join(self._output_dir, "nodes")

    @property
    def maps_dir(self) -> str:
        return os.path.join(self._output_dir, "maps")

    @property
    def stats_dir(self) -> str:
        """Suite statistics, per-replicate final MSE and median curves."""
        return os.path.join(self._output_dir, "stats")

    @property
    def scripts_dir(self) -> str:
        return os.path.join(self._output_dir, "scripts")

    @property
    def checkpoints_dir(self) -> str:
        return os.path.join(self._output_dir, "checkpoints")

    def ensure_dirs(self) -> None:
        for path in (
            self.runs_dir,
            self.nodes_dir,
            self.maps_dir,
            self.stats_dir,
            self.scripts_dir,
            self.checkpoints_dir,
        ):
            os.makedirs(path, exist_ok=True)
