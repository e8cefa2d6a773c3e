from __future__ import annotations

import math
import unittest

import numpy as np
import torch

from app.services.autodiff.jet import Jet
from app.services.autodiff.tape import DTYPE, Tape, TapeError, backward, check_gradient_fd
from app.services.network.mlp import MlpParams, forward, forward_jet, init_params
from app.services.sampling.base import Rect, RngStream


def _small_net(seed: int = 0) -> MlpParams:
    return init_params((2, 8, 8, 1), RngStream(seed), input_rect=Rect(-1.0, 1.0, 0.0, 1.0))


class JetTests(unittest.TestCase):
    def test_tanh_series_at_zero(self) -> None:
        tape = Tape()
        jet = Jet.variable(tape, 0.0, 3).tanh()
        coeffs = [float(c) for c in jet.coeffs]
        self.assertAlmostEqual(coeffs[0], 0.0)
        self.assertAlmostEqual(coeffs[1], 1.0)
        self.assertAlmostEqual(coeffs[2], 0.0)
        self.assertAlmostEqual(coeffs[3], -1.0 / 3.0)

    def test_tanh_derivatives_away_from_zero(self) -> None:
        x0 = 0.7
        t = math.tanh(x0)
        d1 = 1.0 - t * t
        d2 = -2.0 * t * d1
        d3 = -2.0 * d1 * d1 - 2.0 * t * d2
        jet = Jet.variable(Tape(), x0, 3).tanh()
        for order, expected in ((1, d1), (2, d2), (3, d3)):
            self.assertAlmostEqual(float(jet.derivative(order)), expected, places=12)

    def test_cube_derivatives(self) -> None:
        x = Jet.variable(Tape(), 2.0, 3)
        cube = x * x * x
        self.assertAlmostEqual(float(cube.value), 8.0)
        self.assertAlmostEqual(float(cube.derivative(1)), 12.0)
        self.assertAlmostEqual(float(cube.derivative(2)), 12.0)
        self.assertAlmostEqual(float(cube.derivative(3)), 6.0)

    def test_scalar_arithmetic(self) -> None:
        x = Jet.variable(Tape(), 1.5, 2)
        y = 3.0 - 2.0 * x + 1.0
        self.assertAlmostEqual(float(y.value), 1.0)
        self.assertAlmostEqual(float(y.derivative(1)), -2.0)
        self.assertAlmostEqual(float(y.derivative(2)), 0.0)

    def test_from_derivatives_restores_plain_derivatives(self) -> None:
        jet = Jet.from_derivatives(Tape(), [1.0, 2.0, 3.0, 4.0])
        self.assertEqual([float(jet.derivative(k)) for k in range(4)], [1.0, 2.0, 3.0, 4.0])

    def test_mixing_tapes_rejected(self) -> None:
        a = Jet.variable(Tape(), 1.0, 1)
        b = Jet.variable(Tape(), 1.0, 1)
        with self.assertRaises(TapeError):
            a + b
        with self.assertRaises(TapeError):
            a * b

    def test_mixing_degrees_rejected(self) -> None:
        tape = Tape()
        with self.assertRaises(TapeError):
            Jet.variable(tape, 1.0, 1) * Jet.variable(tape, 1.0, 2)

    def test_derivative_above_degree_rejected(self) -> None:
        with self.assertRaises(TapeError):
            Jet.variable(Tape(), 0.0, 1).derivative(2)


class TapeTests(unittest.TestCase):
    def test_unused_leaf_gets_zero_gradient(self) -> None:
        tape = Tape()
        a = tape.leaf([1.0, 2.0])
        tape.leaf([5.0])
        grad = backward(tape, (a * a).sum())
        np.testing.assert_allclose(grad.numpy(), [2.0, 4.0, 0.0])
        self.assertEqual(tape.leaf_count, 3)

    def test_output_without_leaves_has_zero_gradient(self) -> None:
        tape = Tape()
        tape.leaf([1.0])
        grad = backward(tape, Tape.constant(3.0))
        np.testing.assert_array_equal(grad.numpy(), [0.0])

    def test_non_scalar_output_rejected(self) -> None:
        tape = Tape()
        a = tape.leaf([1.0, 2.0])
        with self.assertRaises(TapeError):
            backward(tape, a * 2.0)

    def test_leaves_are_owned_copies(self) -> None:
        tape = Tape()
        source = torch.ones(2, dtype=DTYPE)
        leaf = tape.leaf(source)
        self.assertTrue(tape.owns(leaf))
        self.assertFalse(tape.owns(source))
        self.assertFalse(Tape().owns(leaf))

    def test_quadratic_matches_finite_differences(self) -> None:
        err = check_gradient_fd(lambda tape, x: (x * x).sum(), [1.0, 2.0, -0.5])
        self.assertLess(err, 1e-8)

    def test_constant_function_has_zero_error(self) -> None:
        err = check_gradient_fd(lambda tape, x: x.sum() * 0.0 + 3.0, [0.3, 0.4])
        self.assertEqual(err, 0.0)

    def test_network_input_gradient_matches_finite_differences(self) -> None:
        params = _small_net()

        def f(tape: Tape, x: torch.Tensor) -> torch.Tensor:
            return torch.tanh(forward(params, x.reshape(1, 2))).sum()

        self.assertLess(check_gradient_fd(f, [0.2, 0.4]), 1e-4)


class ForwardJetTests(unittest.TestCase):
    def setUp(self) -> None:
        self.params = _small_net(3)
        self.x = np.linspace(-0.9, 0.9, 7)
        self.t = np.linspace(0.05, 0.95, 7)

    def _autograd_derivatives(self, direction: int, degree: int) -> list[torch.Tensor]:
        xs = torch.tensor(self.x, dtype=DTYPE, requires_grad=direction == 0)
        ts = torch.tensor(self.t, dtype=DTYPE, requires_grad=direction == 1)
        seed = xs if direction == 0 else ts
        u = forward(self.params, torch.stack([xs, ts], dim=1))[:, 0]
        out = [u]
        for _ in range(degree):
            (u,) = torch.autograd.grad(u.sum(), seed, create_graph=True)
            out.append(u)
        return out

    def test_x_direction_matches_autograd(self) -> None:
        tape = Tape()
        (u,) = forward_jet(
            self.params, tape, Jet.variable(tape, self.x, 3), Jet.constant(tape, self.t, 3)
        )
        expected = self._autograd_derivatives(0, 3)
        for order in range(4):
            np.testing.assert_allclose(
                u.derivative(order).detach().numpy(), expected[order].detach().numpy(), rtol=1e-9, atol=1e-11
            )

    def test_t_direction_matches_autograd(self) -> None:
        tape = Tape()
        (u,) = forward_jet(
            self.params, tape, Jet.constant(tape, self.x, 2), Jet.variable(tape, self.t, 2)
        )
        expected = self._autograd_derivatives(1, 2)
        for order in range(3):
            np.testing.assert_allclose(
                u.derivative(order).detach().numpy(), expected[order].detach().numpy(), rtol=1e-9, atol=1e-11
            )

    def test_full_size_network_matches_extrapolated_differences(self) -> None:
        params = init_params((2, 64, 64, 64, 64, 1), RngStream(4), input_rect=Rect(-1.0, 1.0, 0.0, 1.0))
        x = np.linspace(-0.9, 0.9, 9)
        t = np.linspace(0.1, 0.9, 9)
        tape = Tape()
        (u,) = forward_jet(params, tape, Jet.variable(tape, x, 3), Jet.constant(tape, t, 3))

        def shifted(offset: float) -> np.ndarray:
            inputs = torch.tensor(np.column_stack((x + offset, t)), dtype=DTYPE)
            return forward(params, inputs)[:, 0].numpy()

        def central(h: float) -> list[np.ndarray]:
            g = {k: shifted(k * h) for k in (-2, -1, 0, 1, 2)}
            return [
                (g[1] - g[-1]) / (2.0 * h),
                (g[1] - 2.0 * g[0] + g[-1]) / h**2,
                (g[2] - 2.0 * g[1] + 2.0 * g[-1] - g[-2]) / (2.0 * h**3),
            ]

        coarse, fine = central(1e-2), central(5e-3)
        for order in (1, 2, 3):
            expected = (4.0 * fine[order - 1] - coarse[order - 1]) / 3.0
            got = u.coeffs[order].detach().numpy() * math.factorial(order)
            rel = np.linalg.norm(got - expected) / np.linalg.norm(expected)
            self.assertLess(rel, 1e-5, f"order {order}")

    def test_value_matches_plain_forward(self) -> None:
        tape = Tape()
        (u,) = forward_jet(self.params, tape, Jet.variable(tape, self.x, 1), Jet.constant(tape, self.t, 1))
        plain = forward(self.params, torch.tensor(np.column_stack((self.x, self.t)), dtype=DTYPE))[:, 0]
        np.testing.assert_allclose(u.value.detach().numpy(), plain.numpy(), rtol=1e-12, atol=1e-14)

    def test_zero_network_is_flat(self) -> None:
        arch = (2, 4, 1)
        params = MlpParams(
            arch,
            [torch.zeros(4, 2, dtype=DTYPE), torch.zeros(1, 4, dtype=DTYPE)],
            [torch.zeros(4, dtype=DTYPE), torch.zeros(1, dtype=DTYPE)],
        )
        tape = Tape()
        (u,) = forward_jet(params, tape, Jet.variable(tape, self.x, 2), Jet.constant(tape, self.t, 2))
        for order in range(3):
            np.testing.assert_array_equal(u.derivative(order).detach().numpy(), np.zeros(7))

    def test_two_seeded_directions_rejected(self) -> None:
        tape = Tape()
        with self.assertRaises(ValueError):
            forward_jet(self.params, tape, Jet.variable(tape, self.x, 1), Jet.variable(tape, self.t, 1))

    def test_foreign_tape_rejected(self) -> None:
        tape = Tape()
        other = Tape()
        with self.assertRaises(TapeError):
            forward_jet(self.params, tape, Jet.variable(other, self.x, 1), Jet.constant(other, self.t, 1))

    def test_parameter_gradient_of_jet_loss_matches_finite_differences(self) -> None:
        def loss(params: MlpParams, tape: Tape) -> torch.Tensor:
            (u,) = forward_jet(params, tape, Jet.variable(tape, self.x, 2), Jet.constant(tape, self.t, 2))
            return (u.derivative(2) ** 2).mean() + (u.derivative(1) ** 2).mean()

        tape = Tape()
        grad = backward(tape, loss(self.params.on_tape(tape), tape)).numpy()
        flat = self.params.flat()
        step = 1e-6
        for index in (0, 5, 17, 40, flat.numel() - 1):
            plus, minus = flat.clone(), flat.clone()
            plus[index] += step
            minus[index] -= step
            with torch.no_grad():
                f_plus = float(loss(self.params.with_flat(plus), Tape()))
                f_minus = float(loss(self.params.with_flat(minus), Tape()))
            numeric = (f_plus - f_minus) / (2.0 * step)
            self.assertAlmostEqual(grad[index], numeric, delta=1e-4 * abs(numeric) + 1e-8)


if __name__ == "__main__":
    unittest.main()
