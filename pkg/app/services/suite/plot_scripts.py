"""Standalone matplotlib scripts for stored results.

The engine never imports matplotlib; it only writes scripts that read the
CSV files in place and render figures when run by hand.
"""

from __future__ import annotations

import logging
import os
import re
from collections import defaultdict

import pandas as pd

from app.context import RunContext
from app.services.suite.runner import SuiteError

_logger = logging.getLogger("rang.plots")

_NODES_RE = re.compile(r"^(?P<stem>.+)_nodes_(?P<iter>\d+)\.csv$")

_CURVES_TEMPLATE = '''"""Median test MSE per logged iteration, one line per sampler."""
import matplotlib.pyplot as plt
import pandas as pd

CSV = {csv!r}
SERIES = {series!r}

curves = pd.read_csv(CSV)
fig, ax = plt.subplots(figsize=(7, 4.5))
for name in SERIES:
    ax.semilogy(curves["iter"], curves[name], label=name)
ax.set_xlabel("iteration")
ax.set_ylabel("median MSE")
ax.set_title({title!r})
ax.legend()
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
'''

_BOXES_TEMPLATE = '''"""Final MSE distribution per sampler."""
import matplotlib.pyplot as plt
import pandas as pd

CSV = {csv!r}
SERIES = {series!r}

finals = pd.read_csv(CSV)
data = [finals.loc[finals["sampler"] == name, "final_mse"].dropna() for name in SERIES]
fig, ax = plt.subplots(figsize=(8, 4.5))
ax.boxplot(data, labels=SERIES)
ax.set_yscale("log")
ax.set_ylabel("final MSE")
ax.set_title({title!r})
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
'''

_NODES_TEMPLATE = '''"""Node snapshots of one run, in iteration order."""
import matplotlib.pyplot as plt
import pandas as pd

FILES = {files!r}
ITERATIONS = {iterations!r}

fig, axes = plt.subplots(1, len(FILES), figsize=(3.2 * len(FILES), 3.2), squeeze=False)
for ax, path, it in zip(axes[0], FILES, ITERATIONS):
    nodes = pd.read_csv(path)
    ax.scatter(nodes["x"], nodes["y"], s=2)
    ax.set_title(f"iter {{it}} (n={{len(nodes)}})")
    ax.set_aspect("auto")
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
'''

_THIST_TEMPLATE = '''"""Node counts along the time axis for each snapshot of one run."""
import matplotlib.pyplot as plt
import pandas as pd

CSV = {csv!r}

hist = pd.read_csv(CSV)
bins = [c for c in hist.columns if c.startswith("bin")]
fig, ax = plt.subplots(figsize=(7, 4))
for _, row in hist.iterrows():
    ax.plot(range(len(bins)), row[bins].to_numpy(), label=f"iter {{int(row['iter'])}}")
ax.set_xlabel("time bin")
ax.set_ylabel("nodes")
ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
'''

_LSHAPE_TEMPLATE = '''"""L-shape demo: one panel per (ratio, scale) case."""
import matplotlib.pyplot as plt
import pandas as pd

FILES = {files!r}
LABELS = {labels!r}

cols = 3
rows = (len(FILES) + cols - 1) // cols
fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 3.2 * rows), squeeze=False)
for ax in axes.flat:
    ax.set_visible(False)
for ax, path, label in zip(axes.flat, FILES, LABELS):
    nodes = pd.read_csv(path)
    ax.set_visible(True)
    ax.scatter(nodes["x"], nodes["y"], s=1)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_aspect("equal")
    ax.set_title(f"{{label}} (n={{len(nodes)}})")
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
'''


def _write_script(path: str, text: str) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    return path


def _listing(directory: str) -> list[str]:
    return sorted(os.listdir(directory)) if os.path.isdir(directory) else []


def emit_plot_scripts(ctx: RunContext) -> list[str]:
    """Write one script per figure; returns the script paths."""
    os.makedirs(ctx.scripts_dir, exist_ok=True)
    written: list[str] = []

    stats_files = _listing(ctx.stats_dir)
    problems = sorted(
        {name.rsplit("_", 1)[0] for name in stats_files if name.endswith(("_curves.csv", "_stats.csv"))}
        | {name[: -len("_final_mse.csv")] for name in stats_files if name.endswith("_final_mse.csv")}
    )
    missing = []
    for problem in problems:
        for suffix in ("_curves.csv", "_final_mse.csv", "_stats.csv"):
            if f"{problem}{suffix}" not in stats_files:
                missing.append(os.path.join(ctx.stats_dir, f"{problem}{suffix}"))
    if missing:
        raise SuiteError("incomplete suite output, missing: " + ", ".join(missing))

    for problem in problems:
        curves_csv = os.path.join(ctx.stats_dir, f"{problem}_curves.csv")
        series = [c for c in pd.read_csv(curves_csv, nrows=0).columns if c != "iter"]
        written.append(
            _write_script(
                os.path.join(ctx.scripts_dir, f"plot_curves_{problem}.py"),
                _CURVES_TEMPLATE.format(
                    csv=curves_csv,
                    series=series,
                    title=problem,
                    png=os.path.join(ctx.scripts_dir, f"curves_{problem}.png"),
                ),
            )
        )
        written.append(
            _write_script(
                os.path.join(ctx.scripts_dir, f"plot_boxes_{problem}.py"),
                _BOXES_TEMPLATE.format(
                    csv=os.path.join(ctx.stats_dir, f"{problem}_final_mse.csv"),
                    series=series,
                    title=problem,
                    png=os.path.join(ctx.scripts_dir, f"boxes_{problem}.png"),
                ),
            )
        )

    snapshots: dict[str, list[tuple[int, str]]] = defaultdict(list)
    lshape: list[str] = []
    for name in _listing(ctx.nodes_dir):
        if name.startswith("lshape_") and name.endswith(".csv"):
            lshape.append(name)
            continue
        match = _NODES_RE.match(name)
        if match:
            snapshots[match.group("stem")].append((int(match.group("iter")), os.path.join(ctx.nodes_dir, name)))
    for stem, entries in sorted(snapshots.items()):
        entries.sort()
        written.append(
            _write_script(
                os.path.join(ctx.scripts_dir, f"plot_nodes_{stem}.py"),
                _NODES_TEMPLATE.format(
                    files=[path for _, path in entries],
                    iterations=[it for it, _ in entries],
                    png=os.path.join(ctx.scripts_dir, f"nodes_{stem}.png"),
                ),
            )
        )
    if lshape:
        written.append(
            _write_script(
                os.path.join(ctx.scripts_dir, "plot_lshape.py"),
                _LSHAPE_TEMPLATE.format(
                    files=[os.path.join(ctx.nodes_dir, name) for name in lshape],
                    labels=[name[len("lshape_") : -len(".csv")] for name in lshape],
                    png=os.path.join(ctx.scripts_dir, "lshape.png"),
                ),
            )
        )

    for name in _listing(ctx.runs_dir):
        if name.endswith("_thist.csv"):
            stem = name[: -len("_thist.csv")]
            written.append(
                _write_script(
                    os.path.join(ctx.scripts_dir, f"plot_time_hist_{stem}.py"),
                    _THIST_TEMPLATE.format(
                        csv=os.path.join(ctx.runs_dir, name),
                        png=os.path.join(ctx.scripts_dir, f"time_hist_{stem}.png"),
                    ),
                )
            )

    if not written:
        raise SuiteError(
            f"no result files under {ctx.output_dir} "
            "(expected stats/*_curves.csv, nodes/*_nodes_*.csv or runs/*_thist.csv)"
        )
    _logger.info("Wrote %d plot scripts to %s", len(written), ctx.scripts_dir)
    return written
