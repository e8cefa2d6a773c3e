from __future__ import annotations

import math
import os
import tempfile
import unittest

import numpy as np
import torch

from app.services.autodiff.tape import DTYPE
from app.services.network.adam import AdamState, DivergenceError, adam_step
from app.services.network.mlp import forward, init_params, load_checkpoint, save_checkpoint
from app.services.sampling.base import Rect, RngStream

DEFAULT_ARCH = (2, 64, 64, 64, 64, 1)


class InitParamsTests(unittest.TestCase):
    def test_default_architecture_parameter_count(self) -> None:
        params = init_params(DEFAULT_ARCH, RngStream(0))
        self.assertEqual(params.parameter_count(), 12737)
        self.assertEqual(params.flat().numel(), 12737)

    def test_glorot_bounds_and_zero_biases(self) -> None:
        params = init_params(DEFAULT_ARCH, RngStream(1))
        for w, b in zip(params.weights, params.biases):
            fan_out, fan_in = w.shape
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            self.assertLessEqual(float(w.abs().max()), limit)
            self.assertGreater(float(w.abs().max()), 0.5 * limit)
            self.assertEqual(float(b.abs().max()), 0.0)

    def test_same_seed_same_weights(self) -> None:
        a = init_params(DEFAULT_ARCH, RngStream(7)).flat()
        b = init_params(DEFAULT_ARCH, RngStream(7)).flat()
        c = init_params(DEFAULT_ARCH, RngStream(8)).flat()
        self.assertTrue(torch.equal(a, b))
        self.assertFalse(torch.equal(a, c))

    def test_invalid_architecture_rejected(self) -> None:
        with self.assertRaises(ValueError):
            init_params((2,), RngStream(0))
        with self.assertRaises(ValueError):
            init_params((2, 0, 1), RngStream(0))

    def test_with_flat_size_checked(self) -> None:
        params = init_params((2, 3, 1), RngStream(0))
        with self.assertRaises(ValueError):
            params.with_flat(torch.zeros(5, dtype=DTYPE))


class ForwardTests(unittest.TestCase):
    def test_input_map_sends_rect_corners_to_unit_box(self) -> None:
        rect = Rect(-4.0, 4.0, 0.0, 6.0)
        mapped = init_params((2, 5, 2), RngStream(2), input_rect=rect)
        raw = init_params((2, 5, 2), RngStream(2))
        corners = torch.tensor([[-4.0, 0.0], [4.0, 6.0], [0.0, 3.0]], dtype=DTYPE)
        unit = torch.tensor([[-1.0, -1.0], [1.0, 1.0], [0.0, 0.0]], dtype=DTYPE)
        torch.testing.assert_close(forward(mapped, corners), forward(raw, unit), rtol=1e-12, atol=1e-14)

    def test_output_shape(self) -> None:
        params = init_params((2, 6, 6, 2), RngStream(0))
        out = forward(params, torch.zeros(10, 2, dtype=DTYPE))
        self.assertEqual(tuple(out.shape), (10, 2))

    def test_bad_input_shape_rejected(self) -> None:
        params = init_params((2, 6, 1), RngStream(0))
        with self.assertRaises(ValueError):
            forward(params, torch.zeros(10, 3, dtype=DTYPE))


class AdamTests(unittest.TestCase):
    def setUp(self) -> None:
        self.params = init_params((2, 4, 1), RngStream(0))
        self.size = self.params.parameter_count()

    def test_zero_gradient_leaves_parameters(self) -> None:
        state = AdamState.zeros(self.size, lr=1e-3)
        new_params, new_state = adam_step(self.params, torch.zeros(self.size, dtype=DTYPE), state)
        self.assertTrue(torch.equal(new_params.flat(), self.params.flat()))
        self.assertEqual(new_state.t, 1)
        self.assertEqual(state.t, 0)

    def test_first_step_moves_each_coordinate_by_lr(self) -> None:
        state = AdamState.zeros(self.size, lr=1e-3)
        grads = torch.linspace(-2.0, 2.0, self.size, dtype=DTYPE) + 0.01
        new_params, _ = adam_step(self.params, grads, state)
        delta = new_params.flat() - self.params.flat()
        np.testing.assert_allclose(delta.abs().numpy(), np.full(self.size, 1e-3), rtol=1e-4)
        self.assertTrue(bool(torch.all(torch.sign(delta) == -torch.sign(grads))))

    def test_update_is_invariant_to_loss_scale(self) -> None:
        grads = torch.linspace(-1.0, 3.0, self.size, dtype=DTYPE)
        state = AdamState.zeros(self.size, lr=1e-3, eps=1e-12)
        small, _ = adam_step(self.params, grads, state)
        large, _ = adam_step(self.params, 10.0 * grads, state)
        np.testing.assert_allclose(small.flat().numpy(), large.flat().numpy(), rtol=0, atol=1e-6)

    def test_minimizes_square(self) -> None:
        params = init_params((1, 1), RngStream(0))
        params = params.with_flat(torch.ones(params.parameter_count(), dtype=DTYPE))
        state = AdamState.zeros(params.parameter_count(), lr=1e-2)
        for _ in range(2000):
            params, state = adam_step(params, 2.0 * params.flat(), state)
        self.assertLess(float(params.flat().abs().max()), 1e-3)

    def test_non_finite_gradient_raises(self) -> None:
        grads = torch.zeros(self.size, dtype=DTYPE)
        grads[3] = float("nan")
        with self.assertRaises(DivergenceError):
            adam_step(self.params, grads, AdamState.zeros(self.size))

    def test_gradient_size_checked(self) -> None:
        with self.assertRaises(ValueError):
            adam_step(self.params, torch.zeros(self.size + 1, dtype=DTYPE), AdamState.zeros(self.size))


class CheckpointTests(unittest.TestCase):
    def test_checkpoint_restores_parameters_and_input_map(self) -> None:
        rect = Rect(-5.0, 5.0, 0.0, math.pi / 2.0)
        params = init_params((2, 6, 6, 2), RngStream(4), input_rect=rect)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "ckpt.csv")
            save_checkpoint(params, path)
            loaded = load_checkpoint(path)
        self.assertEqual(loaded.arch, params.arch)
        self.assertTrue(loaded.input_rect.is_close(rect))
        self.assertTrue(torch.equal(loaded.flat(), params.flat()))


if __name__ == "__main__":
    unittest.main()
