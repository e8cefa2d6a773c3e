from __future__ import annotations

from dataclasses import dataclass, replace

import torch

from app.services.autodiff.tape import DTYPE
from app.services.network.mlp import MlpParams


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class AdamState:
    m: torch.Tensor
    v: torch.Tensor
    t: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(cls, size: int, **hyper) -> "AdamState":
        return cls(torch.zeros(size, dtype=DTYPE), torch.zeros(size, dtype=DTYPE), 0, **hyper)


def adam_step(params: MlpParams, grads: torch.Tensor, state: AdamState) -> tuple[MlpParams, AdamState]:
    """One bias-corrected Adam update; returns new parameters and state."""
    grads = grads.detach().reshape(-1)
    if grads.numel() != state.m.numel():
        raise ValueError(f"gradient has {grads.numel()} entries, optimizer tracks {state.m.numel()}")
    if not bool(torch.isfinite(grads).all()):
        raise DivergenceError(f"non-finite gradient at step {state.t + 1}")
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    v = state.beta2 * state.v + (1.0 - state.beta2) * grads * grads
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    flat = params.flat() - state.lr * m_hat / (torch.sqrt(v_hat) + state.eps)
    return params.with_flat(flat), replace(state, m=m, v=v, t=t)
