"""Desk-scale benchmark reproductions.

These train full-size networks for minutes (Poisson) to hours (wave), so they
only run with ``RANG_SLOW_TESTS=1``.
"""

from __future__ import annotations

import os
import tempfile
import unittest

from app.cli import train_options
from app.config import AppConfig
from app.context import RunContext
from app.services.sampling.base import SamplerKind
from app.services.suite.presets import preset_for
from app.services.suite.runner import SuiteSpec, run_suite

SLOW = os.environ.get("RANG_SLOW_TESTS", "").strip() == "1"


def _spec(problem: str, samplers: tuple[SamplerKind, ...], replicates: int) -> SuiteSpec:
    preset = preset_for(problem, "desk")
    options = train_options(AppConfig())
    options.update(max_iter=preset.max_iter, n_pde=preset.n_pde, interval=preset.interval)
    return SuiteSpec(
        problem=problem,
        samplers=samplers,
        replicates=replicates,
        base_seed=0,
        workers=max(1, min(4, os.cpu_count() or 1)),
        train_options=options,
    )


@unittest.skipUnless(SLOW, "set RANG_SLOW_TESTS=1 to run desk-scale reproductions")
class DeskReproductionTests(unittest.TestCase):
    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.ctx = RunContext(output_dir=self._tmp.name, install_dir=self._tmp.name, config_path="")

    def test_poisson_rang_m_beats_one_time_random(self) -> None:
        samplers = (SamplerKind.RANDOM, SamplerKind.HAMMERSLEY, SamplerKind.FF_R, SamplerKind.RANG_M)
        stats = run_suite(_spec("poisson", samplers, 5), self.ctx)
        rang_m = stats.get(SamplerKind.RANG_M).p50
        random = stats.get(SamplerKind.RANDOM).p50
        self.assertLessEqual(rang_m, 1e-3)
        self.assertLessEqual(5.0 * rang_m, random)

    def test_wave_rang_m_below_random(self) -> None:
        stats = run_suite(_spec("wave", (SamplerKind.RANDOM, SamplerKind.RANG_M), 3), self.ctx)
        rang_m = stats.get(SamplerKind.RANG_M).p50
        self.assertLessEqual(rang_m, 1e-2)
        self.assertLess(rang_m, stats.get(SamplerKind.RANDOM).p50)


if __name__ == "__main__":
    unittest.main()
