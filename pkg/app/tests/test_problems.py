from __future__ import annotations

import math
import os
import tempfile
import unittest

import numpy as np
import torch

from app.services.autodiff.jet import Jet
from app.services.autodiff.tape import DTYPE, Tape
from app.services.problems.allen_cahn import AllenCahn, allen_cahn, initial_profile
from app.services.problems.base import AnalyticProblem, ReferenceDataError
from app.services.problems.conv_diff import ConvectionDiffusion
from app.services.problems.kdv import KdV
from app.services.problems.poisson import Poisson, forcing
from app.services.problems.reference import GridReference, load_grid_reference, write_grid_reference
from app.services.problems.registry import PROBLEM_NAMES, make_problem, normalize_problem_name
from app.services.problems.schrodinger import RECT as NLS_RECT, schrodinger
from app.services.problems.wave import Wave
from app.services.sampling.base import Rect
from app.tests.fixture_paths import allen_cahn_fixture_path, reference_fixture_dir, schrodinger_fixture_path

_X_KEYS = ("u", "u_x", "u_xx", "u_xxx")
_T_KEYS = ("u", "u_t", "u_tt")


class ExactEvaluator:
    """Serves closed-form values and jets in place of a network."""

    def __init__(self, problem: AnalyticProblem) -> None:
        self.problem = problem
        self.tape = Tape()

    def values(self, x, t) -> torch.Tensor:
        u = np.asarray(self.problem.exact(x, t))
        return torch.as_tensor(u.reshape(len(x), -1), dtype=DTYPE)

    def jets(self, x, t, direction, degree):
        d = self.problem.exact_derivatives(x, t)
        keys = _X_KEYS if direction == "x" else _T_KEYS
        return [Jet.from_derivatives(self.tape, [d[k] for k in keys[: degree + 1]])]


class ConstantEvaluator:
    def __init__(self, value: float, components: int = 1) -> None:
        self.value = value
        self.components = components
        self.tape = Tape()

    def values(self, x, t) -> torch.Tensor:
        return torch.full((len(x), self.components), self.value, dtype=DTYPE)

    def jets(self, x, t, direction, degree):
        return [
            Jet.constant(self.tape, np.full(len(x), self.value), degree) for _ in range(self.components)
        ]


def _exact_residual(problem: AnalyticProblem, n: int = 1000, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = problem.rect
    x = r.xmin + r.width * rng.random(n)
    t = r.ymin + r.height * rng.random(n)
    d = problem.exact_derivatives(x, t)
    tape = Tape()
    ux = [Jet.from_derivatives(tape, [d[k] for k in _X_KEYS[: problem.x_degree + 1]])]
    ut = [Jet.from_derivatives(tape, [d[k] for k in _T_KEYS[: problem.t_degree + 1]])]
    res = problem.squared_residual(ux, ut, torch.as_tensor(x), torch.as_tensor(t))
    return res.numpy()


class AnalyticProblemTests(unittest.TestCase):
    def setUp(self) -> None:
        self.problems = [Wave(), KdV(), Poisson(), ConvectionDiffusion()]

    def test_closed_forms_satisfy_their_equations(self) -> None:
        for problem in self.problems:
            with self.subTest(problem=problem.name):
                self.assertLess(float(_exact_residual(problem).max()), 1e-6)

    def test_closed_form_conditions(self) -> None:
        for problem in (KdV(), Poisson(), ConvectionDiffusion()):
            with self.subTest(problem=problem.name):
                ev = ExactEvaluator(problem)
                self.assertLess(float(problem.boundary_loss(ev)), 1e-10)
                if problem.has_initial:
                    self.assertLess(float(problem.initial_loss(ev)), 1e-20)

    def test_wave_conditions_hold_up_to_pulse_tails(self) -> None:
        wave = Wave()
        early = np.linspace(0.0, 4.0, 200)
        self.assertLess(float(np.abs(wave.exact(np.full_like(early, 4.0), early)).max()), 1e-3)
        self.assertLess(float(np.abs(wave.exact(np.full_like(early, -4.0), early)).max()), 1e-3)
        # the second reflection is missing from the reference near t = 6
        late = wave.boundary_times()
        self.assertLess(float(np.abs(wave.exact(np.full_like(late, 4.0), late)).max()), 5e-2)
        ev = ExactEvaluator(wave)
        self.assertLess(float(wave.boundary_loss(ev)), 1e-3)
        self.assertLess(float(wave.initial_loss(ev)), 1e-5)

    def test_wave_printed_velocity_switch_penalizes_slope(self) -> None:
        ev = ExactEvaluator(Wave())
        standard = float(Wave().initial_loss(ev))
        printed = float(Wave(printed_ic_velocity=True).initial_loss(ev))
        self.assertGreater(printed, 100 * standard)

    def test_point_values(self) -> None:
        self.assertAlmostEqual(float(KdV().exact(np.array([0.0]), np.array([1.0]))[0]), 3.5, places=12)
        expected = 0.1 / math.sqrt(0.05 * 1.1)
        self.assertAlmostEqual(
            float(ConvectionDiffusion().exact(np.array([2.0]), np.array([1.0]))[0]), expected, places=12
        )
        self.assertAlmostEqual(float(Poisson().exact(np.array([0.3]), np.array([0.3]))[0]), 1.0, places=12)
        self.assertAlmostEqual(float(Wave().exact(np.array([0.0]), np.array([0.0]))[0]), 1.0, delta=1e-3)

    def test_poisson_forcing_matches_finite_difference_laplacian(self) -> None:
        problem = Poisson()
        n = 401
        xs = np.linspace(-1.0, 1.0, n)
        h = xs[1] - xs[0]
        gx, gy = np.meshgrid(xs, xs, indexing="ij")
        u = problem.exact(gx, gy)
        lap = (u[2:, 1:-1] + u[:-2, 1:-1] + u[1:-1, 2:] + u[1:-1, :-2] - 4.0 * u[1:-1, 1:-1]) / h**2
        w = forcing(gx[1:-1, 1:-1], gy[1:-1, 1:-1])
        # O(h^2) truncation against curvature of order 1/sigma^4
        self.assertLess(float(np.abs(lap - w).max() / np.abs(w).max()), 1e-2)

    def test_forcing_accepts_tensors(self) -> None:
        x = np.array([0.1, -0.4])
        y = np.array([0.2, 0.5])
        torch_values = forcing(torch.as_tensor(x), torch.as_tensor(y)).numpy()
        np.testing.assert_allclose(torch_values, forcing(x, y), rtol=1e-14)

    def test_poisson_boundary_nodes_cover_four_edges(self) -> None:
        xs, ys = Poisson(condition_nodes=10).boundary_nodes()
        self.assertEqual(xs.size, 40)
        on_edge = (np.abs(xs) == 1.0) | (np.abs(ys) == 1.0)
        self.assertTrue(on_edge.all())

    def test_degrees_and_dimensions(self) -> None:
        self.assertEqual((KdV.x_degree, KdV.t_degree), (3, 1))
        self.assertEqual((Wave.x_degree, Wave.t_degree), (2, 2))
        self.assertFalse(Poisson.has_initial)
        self.assertIsNone(Poisson().initial_loss(ConstantEvaluator(0.0)))

    def test_analytic_test_grid_layout(self) -> None:
        grid = KdV().test_grid()
        self.assertEqual(grid.inputs.shape, (256 * 256, 2))
        self.assertEqual(grid.values.shape, (256 * 256, 1))
        # t outer, x inner
        self.assertEqual(grid.inputs[1, 1], grid.inputs[0, 1])
        self.assertGreater(grid.inputs[1, 0], grid.inputs[0, 0])

    def test_condition_nodes_validated(self) -> None:
        with self.assertRaises(ValueError):
            KdV(condition_nodes=1)


class GriddedProblemTests(unittest.TestCase):
    def test_allen_cahn_residual(self) -> None:
        problem = allen_cahn(allen_cahn_fixture_path())
        tape = Tape()
        half = [Jet.constant(tape, np.array([0.5, 1.0]), 2)]
        flat = [Jet.constant(tape, np.array([0.5, 1.0]), 1)]
        res = problem.squared_residual(half, flat, torch.zeros(2), torch.zeros(2))
        np.testing.assert_allclose(res.numpy(), [1.875**2, 0.0], atol=1e-14)

    def test_allen_cahn_condition_losses(self) -> None:
        problem = allen_cahn(allen_cahn_fixture_path(), condition_nodes=50)
        self.assertEqual(float(problem.boundary_loss(ConstantEvaluator(-1.0))), 0.0)
        self.assertAlmostEqual(float(problem.boundary_loss(ConstantEvaluator(0.0))), 2.0)
        x = problem.initial_nodes()
        expected = float(np.mean(initial_profile(x) ** 2))
        self.assertAlmostEqual(float(problem.initial_loss(ConstantEvaluator(0.0))), expected, places=12)

    def test_allen_cahn_printed_slope_adds_derivative_term(self) -> None:
        reference = load_grid_reference(allen_cahn_fixture_path(), AllenCahn.rect, 1)
        plain = AllenCahn(reference)
        printed = AllenCahn(reference, printed_ic_slope=True)
        ev = ConstantEvaluator(0.0)
        self.assertAlmostEqual(float(plain.initial_loss(ev)), float(printed.initial_loss(ev)), places=12)

    def test_schrodinger_residual_of_constant_state(self) -> None:
        problem = schrodinger(schrodinger_fixture_path())
        tape = Tape()
        ux = [Jet.constant(tape, np.ones(1), 2), Jet.constant(tape, np.ones(1), 2)]
        ut = [Jet.constant(tape, np.ones(1), 1), Jet.constant(tape, np.ones(1), 1)]
        res = problem.squared_residual(ux, ut, torch.zeros(1), torch.zeros(1))
        self.assertAlmostEqual(float(res[0]), 8.0)

    def test_schrodinger_periodic_boundary_of_constant_is_zero(self) -> None:
        problem = schrodinger(schrodinger_fixture_path(), condition_nodes=20)
        self.assertEqual(float(problem.boundary_loss(ConstantEvaluator(0.3, components=2))), 0.0)
        self.assertEqual(problem.output_dim, 2)

    def test_fixture_grids_load(self) -> None:
        grid = allen_cahn(allen_cahn_fixture_path()).test_grid()
        self.assertEqual(grid.values.shape, (6, 1))
        np.testing.assert_array_equal(grid.inputs[0], [-1.0, 0.0])
        np.testing.assert_array_equal(grid.inputs[4], [0.0, 1.0])
        self.assertEqual(float(grid.values[4, 0]), -0.5)
        nls = schrodinger(schrodinger_fixture_path()).test_grid()
        self.assertEqual(nls.values.shape, (6, 2))
        np.testing.assert_array_equal(nls.values[1], [2.0, 0.0])


class ReferenceLoaderTests(unittest.TestCase):
    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.rect = Rect(-1.0, 1.0, 0.0, 1.0)
        self.path = os.path.join(self._tmp.name, "ref.csv")
        write_grid_reference(self.path, GridReference(self.rect, 2, 2, 1, np.arange(4.0).reshape(2, 2, 1)))

    def _rewrite(self, old: str, new: str) -> None:
        with open(self.path, "r", encoding="utf-8") as handle:
            text = handle.read()
        with open(self.path, "w", encoding="utf-8") as handle:
            handle.write(text.replace(old, new, 1))

    def test_written_grid_loads_back(self) -> None:
        ref = load_grid_reference(self.path, self.rect, 1)
        np.testing.assert_array_equal(ref.values[:, :, 0], [[0.0, 1.0], [2.0, 3.0]])

    def test_full_precision_values_load_exactly(self) -> None:
        values = np.random.default_rng(3).standard_normal((10, 20, 2)) * 1e-3
        write_grid_reference(self.path, GridReference(self.rect, 10, 20, 2, values))
        np.testing.assert_array_equal(load_grid_reference(self.path, self.rect, 2).values, values)

    def test_degenerate_extent(self) -> None:
        self._rewrite("2,2,0,1,-1,1", "2,2,0,0,-1,1")
        with self.assertRaisesRegex(ReferenceDataError, "degenerate grid extent"):
            load_grid_reference(self.path, self.rect, 1)

    def test_missing_file(self) -> None:
        with self.assertRaisesRegex(ReferenceDataError, "not found"):
            load_grid_reference(os.path.join(self._tmp.name, "absent.csv"), self.rect, 1)

    def test_bad_header(self) -> None:
        self._rewrite("nt,nx", "rows,cols")
        with self.assertRaisesRegex(ReferenceDataError, "expected header"):
            load_grid_reference(self.path, self.rect, 1)

    def test_rect_mismatch(self) -> None:
        with self.assertRaisesRegex(ReferenceDataError, "problem domain"):
            load_grid_reference(self.path, Rect(-1.0, 1.0, 0.0, 2.0), 1)

    def test_component_mismatch(self) -> None:
        with self.assertRaisesRegex(ReferenceDataError, "components"):
            load_grid_reference(self.path, self.rect, 2)

    def test_row_count_mismatch(self) -> None:
        self._rewrite("2,2,0,1", "2,3,0,1")
        with self.assertRaisesRegex(ReferenceDataError, "expected 6 rows"):
            load_grid_reference(self.path, self.rect, 1)

    def test_non_finite_value(self) -> None:
        self._rewrite("\n1\n", "\nnan\n")
        with self.assertRaisesRegex(ReferenceDataError, "non-finite value in data row 1"):
            load_grid_reference(self.path, self.rect, 1)

    def test_schrodinger_rect_matches_fixture_header(self) -> None:
        ref = load_grid_reference(schrodinger_fixture_path(), NLS_RECT, 2)
        self.assertEqual((ref.nt, ref.nx), (2, 3))


class RegistryTests(unittest.TestCase):
    def test_aliases(self) -> None:
        self.assertEqual(normalize_problem_name("Allen_Cahn"), "allen-cahn")
        self.assertEqual(normalize_problem_name("convection-diffusion"), "conv-diff")
        self.assertEqual(len(PROBLEM_NAMES), 6)

    def test_unknown_name(self) -> None:
        with self.assertRaises(ValueError):
            make_problem("burgers")

    def test_analytic_problems_need_no_reference(self) -> None:
        for name in ("wave", "kdv", "poisson", "conv-diff"):
            with self.subTest(name=name):
                self.assertEqual(make_problem(name, condition_nodes=10).name, name)

    def test_missing_reference_raises(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ReferenceDataError):
                make_problem("allen-cahn", reference_dir=tmp)

    def test_fixture_directory_lacks_default_names(self) -> None:
        with self.assertRaises(ReferenceDataError):
            make_problem("schrodinger", reference_dir=str(reference_fixture_dir()))


if __name__ == "__main__":
    unittest.main()
