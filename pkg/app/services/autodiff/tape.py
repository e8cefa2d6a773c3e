"""Reverse-mode gradient tape.

A thin ownership layer over torch autograd in float64: the tape registers
its leaves, and ``backward`` returns one flat gradient over them with zeros
for leaves the output does not depend on.
"""

from __future__ import annotations

import itertools
from typing import Callable

import numpy as np
import torch

DTYPE = torch.float64

_tape_ids = itertools.count(1)


class TapeError(RuntimeError):
    pass


class Tape:
    def __init__(self) -> None:
        self.id = next(_tape_ids)
        self._leaves: list[torch.Tensor] = []

    def __repr__(self) -> str:
        return f"Tape(id={self.id}, leaves={len(self._leaves)})"

    @property
    def leaves(self) -> list[torch.Tensor]:
        return list(self._leaves)

    @property
    def leaf_count(self) -> int:
        return sum(int(leaf.numel()) for leaf in self._leaves)

    def leaf(self, value) -> torch.Tensor:
        """Register a fresh differentiable leaf holding a copy of ``value``."""
        tensor = torch.as_tensor(value, dtype=DTYPE).detach().clone().requires_grad_(True)
        self._leaves.append(tensor)
        return tensor

    @staticmethod
    def constant(value) -> torch.Tensor:
        return torch.as_tensor(value, dtype=DTYPE).detach()

    def owns(self, tensor: torch.Tensor) -> bool:
        return any(tensor is leaf for leaf in self._leaves)


def backward(tape: Tape, output: torch.Tensor) -> torch.Tensor:
    """Gradient of a scalar ``output`` with respect to every leaf, flattened in registration order."""
    if not isinstance(output, torch.Tensor) or output.numel() != 1:
        raise TapeError("backward needs a scalar tensor output")
    leaves = tape.leaves
    if not leaves:
        return torch.zeros(0, dtype=DTYPE)
    if output.requires_grad:
        grads = torch.autograd.grad(output.reshape(()), leaves, allow_unused=True)
    else:
        grads = (None,) * len(leaves)
    return torch.cat(
        [
            (g if g is not None else torch.zeros_like(leaf)).reshape(-1).detach()
            for g, leaf in zip(grads, leaves)
        ]
    )


def check_gradient_fd(
    f: Callable[[Tape, torch.Tensor], torch.Tensor],
    point,
    step: float = 1e-5,
) -> float:
    """Max relative error between tape and central-difference gradients of ``f`` at ``point``."""
    x0 = np.asarray(point, dtype=np.float64).reshape(-1)
    tape = Tape()
    analytic = backward(tape, f(tape, tape.leaf(x0))).numpy()

    numeric = np.empty_like(x0)
    with torch.no_grad():
        for i in range(x0.size):
            plus, minus = x0.copy(), x0.copy()
            plus[i] += step
            minus[i] -= step
            f_plus = float(f(Tape(), torch.as_tensor(plus, dtype=DTYPE)))
            f_minus = float(f(Tape(), torch.as_tensor(minus, dtype=DTYPE)))
            numeric[i] = (f_plus - f_minus) / (2.0 * step)

    return float(np.max(np.abs(analytic - numeric) / (np.abs(analytic) + 1e-8)))
