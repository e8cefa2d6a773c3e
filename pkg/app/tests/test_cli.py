from __future__ import annotations

import json
import os
import tempfile
import unittest
from unittest.mock import patch

from app.cli import EXIT_ERROR, EXIT_OK, build_parser, main, parse_launch_argv

TINY_CONFIG = {
    "network": {"hidden": [8, 8]},
    "errormap": {"grid_nx": 16, "grid_ny": 16},
    "training": {"log_every": 10, "condition_nodes": 20},
}


class ParserTests(unittest.TestCase):
    def test_run_defaults(self) -> None:
        opts = parse_launch_argv(["run", "--problem", "poisson"])
        self.assertEqual(opts.command, "run")
        self.assertEqual(opts.args.sampler, "rang-m")
        self.assertEqual(opts.args.seed, 0)
        self.assertIsNone(opts.args.interval)
        self.assertFalse(opts.debug)

    def test_common_flags_on_every_command(self) -> None:
        opts = parse_launch_argv(["plots", "--debug", "--out", "somewhere", "--config", "c.json"])
        self.assertTrue(opts.debug)
        self.assertEqual(opts.output_dir, "somewhere")
        self.assertEqual(opts.config_path, "c.json")

    def test_unknown_problem_and_sampler_rejected(self) -> None:
        parser = build_parser()
        with patch("sys.stderr"):
            with self.assertRaises(SystemExit):
                parser.parse_args(["run", "--problem", "burgers"])
            with self.assertRaises(SystemExit):
                parser.parse_args(["run", "--problem", "kdv", "--sampler", "sobol"])

    def test_suite_sampler_list(self) -> None:
        opts = parse_launch_argv(["suite", "--problem", "wave", "--samplers", "random", "rang-m"])
        self.assertEqual(opts.args.samplers, ["random", "rang-m"])
        self.assertIsNone(opts.args.preset)

    def test_suite_presets(self) -> None:
        for preset in ("desk", "paper"):
            opts = parse_launch_argv(["suite", "--problem", "kdv", "--preset", preset])
            self.assertEqual(opts.args.preset, preset)
        with patch("sys.stderr"):
            with self.assertRaises(SystemExit):
                build_parser().parse_args(["suite", "--problem", "kdv", "--preset", "full"])

    def test_nodes_ratios_and_scales(self) -> None:
        opts = parse_launch_argv(["nodes", "--demo", "lshape", "--r", "2", "--s", "0.1", "0.05"])
        self.assertEqual(opts.args.ratios, [2.0])
        self.assertEqual(opts.args.scales, [0.1, 0.05])


@patch("app.main.enable_crash_logging")
@patch("app.main.configure_logging")
class MainTests(unittest.TestCase):
    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.out = os.path.join(self._tmp.name, "out")

    def _config(self, extra: dict | None = None) -> str:
        config = json.loads(json.dumps(TINY_CONFIG))
        config.update(extra or {})
        path = os.path.join(self._tmp.name, "config.json")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(config, handle)
        return path

    def _main(self, *argv: str, config: dict | None = None) -> int:
        with patch("sys.stderr"), patch("builtins.print"):
            return main([*argv, "--config", self._config(config), "--out", self.out])

    def test_run_writes_history(self, _logging, _crash) -> None:
        code = self._main(
            "run", "--problem", "poisson", "--sampler", "ff-r", "--iters", "20",
            "--interval", "10", "--n-pde", "30",
        )
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(os.path.exists(os.path.join(self.out, "runs", "poisson_ff-r_0.csv")))
        self.assertTrue(os.path.exists(os.path.join(self.out, "runs", "manifest.json")))

    def test_missing_reference_exits_with_error(self, _logging, _crash) -> None:
        empty = os.path.join(self._tmp.name, "no_reference")
        os.makedirs(empty)
        code = self._main(
            "run", "--problem", "allen-cahn", "--iters", "10",
            config={"reference": {"directory": empty}},
        )
        self.assertEqual(code, EXIT_ERROR)

    def test_invalid_config_exits_with_error(self, _logging, _crash) -> None:
        code = self._main("plots", config={"suite": {"preset": "huge"}})
        self.assertEqual(code, EXIT_ERROR)

    def test_plots_without_results_exits_with_error(self, _logging, _crash) -> None:
        self.assertEqual(self._main("plots"), EXIT_ERROR)

    def test_lshape_demo_writes_node_sets(self, _logging, _crash) -> None:
        code = self._main("nodes", "--demo", "lshape", "--r", "1", "4", "--s", "0.1")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(
            sorted(os.listdir(os.path.join(self.out, "nodes"))),
            ["lshape_r1_s0.1.csv", "lshape_r4_s0.1.csv"],
        )
        self.assertEqual(self._main("plots"), EXIT_OK)
        self.assertTrue(os.path.exists(os.path.join(self.out, "scripts", "plot_lshape.py")))

    def test_debug_flag_turns_on_debug_logging(self, logging_mock, _crash) -> None:
        from app.services import debug

        self.addCleanup(debug.set_all_debug_flags, False)
        self.addCleanup(debug.set_debug_enabled, False)
        self._main("nodes", "--demo", "lshape", "--r", "1", "--s", "0.2", "--debug")
        self.assertTrue(debug.is_debug_enabled("ARFF"))
        self.assertTrue(logging_mock.call_args.kwargs["debug"])


if __name__ == "__main__":
    unittest.main()
