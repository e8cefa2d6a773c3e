"""Per-run output files under a RunContext.

For a run stem ``{problem}_{sampler}_{seed}``:

- ``runs/{stem}.csv``: logged history ``iter,loss,L0,Lb,Lpde,mse,s``
- ``runs/{stem}_pred.csv``: final prediction on the test grid
- ``runs/{stem}_thist.csv``: time histogram of every node snapshot
- ``nodes/{stem}_nodes_{iter:06d}.csv``: node set after each resample
- ``maps/{stem}_prior_{iter:06d}.csv`` and ``_residual_``: error maps (when kept)
- ``checkpoints/{stem}.csv``: flat final parameters

``runs/manifest.json`` indexes every stored run.
"""

from __future__ import annotations

import json
import logging
import math
import os
import threading

import numpy as np
import pandas as pd

from app.context import RunContext
from app.services.network.mlp import save_checkpoint
from app.services.pinn.losses import predict_on_grid, time_histogram
from app.services.pinn.trainer import TrainResult
from app.services.problems.base import PdeProblem

HISTORY_COLUMNS = ["iter", "loss", "L0", "Lb", "Lpde", "mse", "s"]
FLOAT_FORMAT = "%.17g"
TIME_BINS = 20


def run_stem(problem: str, sampler: str, seed: int) -> str:
    return f"{problem}_{sampler}_{seed}"


def history_frame(result: TrainResult) -> pd.DataFrame:
    rows = [(r.iter, r.loss, r.l0, r.lb, r.lpde, r.mse, r.s) for r in result.history]
    frame = pd.DataFrame(rows, columns=HISTORY_COLUMNS)
    frame["iter"] = frame["iter"].astype(int)
    return frame


def read_history(path: str) -> pd.DataFrame:
    # round_trip parses "%.17g" back to the exact doubles that were written
    return pd.read_csv(path, float_precision="round_trip")


class RunStore:
    def __init__(self, ctx: RunContext) -> None:
        self._ctx = ctx
        self._lock = threading.RLock()
        self._logger = logging.getLogger("rang.store")
        ctx.ensure_dirs()

    @property
    def manifest_path(self) -> str:
        return os.path.join(self._ctx.runs_dir, "manifest.json")

    def history_path(self, stem: str) -> str:
        return os.path.join(self._ctx.runs_dir, f"{stem}.csv")

    def _write_frame(self, frame: pd.DataFrame, path: str) -> None:
        temp_path = f"{path}.tmp"
        frame.to_csv(temp_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        os.replace(temp_path, path)

    def write_run(self, result: TrainResult, problem: PdeProblem) -> str:
        stem = run_stem(result.problem, result.sampler.value, result.seed)
        ctx = self._ctx
        with self._lock:
            self._write_frame(history_frame(result), self.history_path(stem))

            grid = problem.test_grid()
            predicted = predict_on_grid(problem, result.params)
            pred = pd.DataFrame(
                np.column_stack((grid.inputs, predicted)),
                columns=["x", "t"] + [f"u{k}" for k in range(predicted.shape[1])],
            )
            self._write_frame(pred, os.path.join(ctx.runs_dir, f"{stem}_pred.csv"))

            hist_rows = []
            for snap in result.snapshots:
                counts = time_histogram(snap.nodes, TIME_BINS)
                hist_rows.append([snap.iter, *counts.tolist()])
                snap.nodes.to_csv(os.path.join(ctx.nodes_dir, f"{stem}_nodes_{snap.iter:06d}.csv"))
                if snap.prior is not None:
                    snap.prior.to_csv(os.path.join(ctx.maps_dir, f"{stem}_prior_{snap.iter:06d}.csv"))
                if snap.residual is not None:
                    snap.residual.to_csv(os.path.join(ctx.maps_dir, f"{stem}_residual_{snap.iter:06d}.csv"))
            thist = pd.DataFrame(hist_rows, columns=["iter"] + [f"bin{b}" for b in range(TIME_BINS)])
            self._write_frame(thist, os.path.join(ctx.runs_dir, f"{stem}_thist.csv"))

            save_checkpoint(result.params, os.path.join(ctx.checkpoints_dir, f"{stem}.csv"))
            self._update_manifest(stem, result)
        self._logger.info("Stored run %s (final mse=%.4e diverged=%s)", stem, result.final_mse, result.diverged)
        return stem

    def _read_manifest(self) -> dict:
        try:
            with open(self.manifest_path, "r", encoding="utf-8") as f:
                data = json.load(f)
            if isinstance(data, dict):
                return data
        except FileNotFoundError:
            pass
        except (OSError, json.JSONDecodeError) as exc:
            self._logger.warning("Failed to read run manifest: %s error=%s", self.manifest_path, exc)
        return {"version": 1, "runs": {}}

    def _update_manifest(self, stem: str, result: TrainResult) -> None:
        manifest = self._read_manifest()
        final = result.final_mse
        manifest.setdefault("runs", {})[stem] = {
            "problem": result.problem,
            "sampler": result.sampler.value,
            "seed": result.seed,
            "final_mse": final if math.isfinite(final) else None,
            "diverged": result.diverged,
            "divergence_iter": result.divergence_iter,
            "resamples": len(result.snapshots),
        }
        manifest["run_count"] = len(manifest["runs"])
        temp_path = f"{self.manifest_path}.tmp"
        with open(temp_path, "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
        os.replace(temp_path, self.manifest_path)

    def list_runs(self) -> dict:
        return dict(self._read_manifest().get("runs", {}))
