"""Truncated Taylor jets for directional derivatives up to third order.

A jet carries normalized coefficients ``c[k] = (d^k f / dt^k) / k!`` along
one input direction, each coefficient a tensor batched over nodes (and over
layer units inside the network). Products use the truncated Cauchy product
and ``tanh`` is propagated through Faà di Bruno's formula, so every
coefficient stays a differentiable expression on the owning tape.
"""

from __future__ import annotations

import math
from typing import Sequence, Union

import torch

from app.services.autodiff.tape import DTYPE, Tape, TapeError

MAX_DEGREE = 3

Scalar = Union[float, int, torch.Tensor]


class Jet:
    __slots__ = ("tape", "coeffs")

    def __init__(self, tape: Tape, coeffs: Sequence[torch.Tensor]) -> None:
        if not 1 <= len(coeffs) <= MAX_DEGREE + 1:
            raise TapeError(f"jet degree must lie in 0..{MAX_DEGREE}, got {len(coeffs) - 1}")
        self.tape = tape
        self.coeffs = tuple(coeffs)

    def __repr__(self) -> str:
        return f"Jet(degree={self.degree}, shape={tuple(self.coeffs[0].shape)}, tape={self.tape.id})"

    # ── construction ───────────────────────────────────────────────────

    @classmethod
    def variable(cls, tape: Tape, value, degree: int) -> "Jet":
        """The seeded input coordinate: value with unit first derivative."""
        c0 = torch.as_tensor(value, dtype=DTYPE)
        coeffs = [c0]
        if degree >= 1:
            coeffs.append(torch.ones_like(c0))
        coeffs.extend(torch.zeros_like(c0) for _ in range(2, degree + 1))
        return cls(tape, coeffs)

    @classmethod
    def constant(cls, tape: Tape, value, degree: int) -> "Jet":
        c0 = torch.as_tensor(value, dtype=DTYPE)
        return cls(tape, [c0] + [torch.zeros_like(c0) for _ in range(degree)])

    @classmethod
    def from_derivatives(cls, tape: Tape, derivatives: Sequence) -> "Jet":
        """Build a jet from plain derivatives ``[f, f', f'', f''']``."""
        return cls(
            tape,
            [torch.as_tensor(d, dtype=DTYPE) / math.factorial(k) for k, d in enumerate(derivatives)],
        )

    @classmethod
    def stack(cls, jets: Sequence["Jet"]) -> "Jet":
        """Stack per-coordinate jets along a new last axis."""
        first = jets[0]
        for other in jets[1:]:
            first._check(other)
        return cls(
            first.tape,
            [torch.stack([jet.coeffs[k] for jet in jets], dim=-1) for k in range(first.degree + 1)],
        )

    # ── access ─────────────────────────────────────────────────────────

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> torch.Tensor:
        return self.coeffs[0]

    def derivative(self, order: int) -> torch.Tensor:
        if order > self.degree:
            raise TapeError(f"derivative of order {order} requested from a degree-{self.degree} jet")
        return self.coeffs[order] * math.factorial(order)

    def component(self, index: int) -> "Jet":
        return Jet(self.tape, [c[..., index] for c in self.coeffs])

    # ── arithmetic ─────────────────────────────────────────────────────

    def _check(self, other: "Jet") -> None:
        if other.tape is not self.tape:
            raise TapeError(f"jet from tape {other.tape.id} combined with jet from tape {self.tape.id}")
        if other.degree != self.degree:
            raise TapeError(f"jet degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: Union["Jet", Scalar]) -> "Jet":
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.tape, [a + b for a, b in zip(self.coeffs, other.coeffs)])
        return Jet(self.tape, [self.coeffs[0] + other, *self.coeffs[1:]])

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(self.tape, [-c for c in self.coeffs])

    def __sub__(self, other: Union["Jet", Scalar]) -> "Jet":
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "Jet":
        return (-self) + other

    def __mul__(self, other: Union["Jet", Scalar]) -> "Jet":
        if isinstance(other, Jet):
            self._check(other)
            a, b = self.coeffs, other.coeffs
            return Jet(
                self.tape,
                [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(self.degree + 1)],
            )
        return Jet(self.tape, [c * other for c in self.coeffs])

    __rmul__ = __mul__

    def square(self) -> "Jet":
        return self * self

    def affine(self, weight: torch.Tensor, bias: torch.Tensor | None = None) -> "Jet":
        """``W @ c + b`` over the last axis; the bias only shifts the value."""
        coeffs = [c @ weight.T for c in self.coeffs]
        if bias is not None:
            coeffs[0] = coeffs[0] + bias
        return Jet(self.tape, coeffs)

    def tanh(self) -> "Jet":
        a = self.coeffs
        t = torch.tanh(a[0])
        out = [t]
        if self.degree >= 1:
            d1 = 1.0 - t * t
            out.append(d1 * a[1])
        if self.degree >= 2:
            d2 = -2.0 * t * d1
            out.append(d1 * a[2] + 0.5 * d2 * a[1] * a[1])
        if self.degree >= 3:
            d3 = -2.0 * d1 * d1 - 2.0 * t * d2
            out.append(d1 * a[3] + d2 * a[1] * a[2] + d3 / 6.0 * a[1] * a[1] * a[1])
        return Jet(self.tape, out)


def jet_tanh(jet: Jet) -> Jet:
    return jet.tanh()
