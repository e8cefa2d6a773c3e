from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import torch

from app.services.autodiff.jet import Jet
from app.services.autodiff.tape import DTYPE, Tape, TapeError
from app.services.sampling.base import Rect, RngStream

_logger = logging.getLogger("rang.network")


@dataclass(eq=False)
class MlpParams:
    """Fully connected tanh network, no activation on the output layer.

    ``weights[l]`` has shape (out, in). When ``input_rect`` is set the inputs
    are mapped affinely onto [-1, 1]^2 before the first layer; that map is
    fixed, not trained.
    """

    arch: tuple[int, ...]
    weights: list[torch.Tensor]
    biases: list[torch.Tensor]
    input_rect: Optional[Rect] = None
    _shift: torch.Tensor = field(init=False, repr=False)
    _scale: torch.Tensor = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.arch = tuple(int(a) for a in self.arch)
        if len(self.weights) != len(self.arch) - 1 or len(self.biases) != len(self.arch) - 1:
            raise ValueError(f"arch {self.arch} needs {len(self.arch) - 1} layers")
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.arch[layer + 1], self.arch[layer])
            if tuple(w.shape) != expected or tuple(b.shape) != (expected[0],):
                raise ValueError(f"layer {layer}: weight {tuple(w.shape)} bias {tuple(b.shape)}, expected {expected}")
        if self.input_rect is not None and self.arch[0] == 2:
            r = self.input_rect
            self._shift = torch.tensor([(r.xmin + r.xmax) / 2.0, (r.ymin + r.ymax) / 2.0], dtype=DTYPE)
            self._scale = torch.tensor([2.0 / r.width, 2.0 / r.height], dtype=DTYPE)
        else:
            self._shift = torch.zeros(self.arch[0], dtype=DTYPE)
            self._scale = torch.ones(self.arch[0], dtype=DTYPE)

    @property
    def output_dim(self) -> int:
        return self.arch[-1]

    def parameter_count(self) -> int:
        return sum(int(w.numel()) + int(b.numel()) for w, b in zip(self.weights, self.biases))

    def tensors(self) -> list[torch.Tensor]:
        out: list[torch.Tensor] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def flat(self) -> torch.Tensor:
        return torch.cat([t.detach().reshape(-1) for t in self.tensors()])

    def with_flat(self, flat: torch.Tensor) -> "MlpParams":
        flat = flat.detach()
        if flat.numel() != self.parameter_count():
            raise ValueError(f"flat vector has {flat.numel()} entries, network needs {self.parameter_count()}")
        weights, biases = [], []
        offset = 0
        for w, b in zip(self.weights, self.biases):
            weights.append(flat[offset : offset + w.numel()].reshape(w.shape).clone())
            offset += w.numel()
            biases.append(flat[offset : offset + b.numel()].reshape(b.shape).clone())
            offset += b.numel()
        return MlpParams(self.arch, weights, biases, self.input_rect)

    def on_tape(self, tape: Tape) -> "MlpParams":
        """Copy whose tensors are differentiable leaves of ``tape``, in ``tensors()`` order."""
        weights, biases = [], []
        for w, b in zip(self.weights, self.biases):
            weights.append(tape.leaf(w))
            biases.append(tape.leaf(b))
        return MlpParams(self.arch, weights, biases, self.input_rect)

    def detached(self) -> "MlpParams":
        return MlpParams(
            self.arch,
            [w.detach().clone() for w in self.weights],
            [b.detach().clone() for b in self.biases],
            self.input_rect,
        )


def init_params(
    arch: Sequence[int],
    rng: RngStream,
    *,
    input_rect: Optional[Rect] = None,
) -> MlpParams:
    """Glorot-uniform weights drawn from ``rng``, zero biases."""
    arch = tuple(int(a) for a in arch)
    if len(arch) < 2 or any(a < 1 for a in arch):
        raise ValueError(f"invalid architecture {arch}")
    weights, biases = [], []
    for fan_in, fan_out in zip(arch[:-1], arch[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        drawn = rng.generator.uniform(-limit, limit, size=(fan_out, fan_in))
        weights.append(torch.from_numpy(np.ascontiguousarray(drawn)).to(DTYPE))
        biases.append(torch.zeros(fan_out, dtype=DTYPE))
    return MlpParams(arch, weights, biases, input_rect)


def forward(params: MlpParams, inputs: torch.Tensor) -> torch.Tensor:
    """Plain evaluation; ``inputs`` is (batch, in), returns (batch, out)."""
    inputs = torch.as_tensor(inputs, dtype=DTYPE)
    if inputs.ndim != 2 or inputs.shape[1] != params.arch[0]:
        raise ValueError(f"inputs shape {tuple(inputs.shape)} does not match input width {params.arch[0]}")
    a = (inputs - params._shift) * params._scale
    last = len(params.weights) - 1
    for layer, (w, b) in enumerate(zip(params.weights, params.biases)):
        a = a @ w.T + b
        if layer < last:
            a = torch.tanh(a)
    return a


def forward_jet(params: MlpParams, tape: Tape, in_x: Jet, in_t: Jet) -> list[Jet]:
    """Propagate input jets through the network, one output jet per component.

    Only one of the two input jets may carry a derivative seed.
    """
    if params.arch[0] != 2:
        raise ValueError(f"jet evaluation needs a 2-input network, got input width {params.arch[0]}")
    if in_x.tape is not tape or in_t.tape is not tape:
        raise TapeError("input jets belong to a different tape")
    if in_x.degree >= 1 and in_t.degree >= 1:
        if bool(torch.any(in_x.coeffs[1] != 0)) and bool(torch.any(in_t.coeffs[1] != 0)):
            raise ValueError("only one input direction may carry a derivative seed")
    a = Jet.stack([in_x, in_t])
    a = Jet(tape, [(a.coeffs[0] - params._shift) * params._scale] + [c * params._scale for c in a.coeffs[1:]])
    last = len(params.weights) - 1
    for layer, (w, b) in enumerate(zip(params.weights, params.biases)):
        a = a.affine(w, b)
        if layer < last:
            a = a.tanh()
    return [a.component(j) for j in range(params.output_dim)]


def save_checkpoint(params: MlpParams, path: str) -> None:
    """Flat parameter vector, one value per line, with the architecture in the header."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    header = "arch=" + ",".join(str(a) for a in params.arch)
    if params.input_rect is not None:
        r = params.input_rect
        header += f" input_rect={r.xmin:.17g},{r.xmax:.17g},{r.ymin:.17g},{r.ymax:.17g}"
    np.savetxt(path, params.flat().numpy(), fmt="%.17g", header=header)


def load_checkpoint(path: str) -> MlpParams:
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().lstrip("#").strip()
    fields = dict(part.split("=", 1) for part in header.split())
    arch = tuple(int(a) for a in fields["arch"].split(","))
    rect = Rect(*(float(v) for v in fields["input_rect"].split(","))) if "input_rect" in fields else None
    flat = torch.from_numpy(np.loadtxt(path, ndmin=1)).to(DTYPE)
    template = MlpParams(
        arch,
        [torch.zeros(o, i, dtype=DTYPE) for i, o in zip(arch[:-1], arch[1:])],
        [torch.zeros(o, dtype=DTYPE) for o in arch[1:]],
        rect,
    )
    params = template.with_flat(flat)
    _logger.info("Loaded checkpoint %s arch=%s params=%d", path, arch, params.parameter_count())
    return params
