from app.services.suite.runner import (
    SamplerStats,
    SuiteError,
    SuiteSpec,
    SuiteStats,
    compute_stats,
    parse_samplers,
    recompute_stats_from_runs,
    run_suite,
)
from app.services.suite.plot_scripts import emit_plot_scripts
from app.services.suite.presets import PRESETS, preset_for
