"""Space-filling samplers: uniform random, Hammersley and Latin hypercube.

All of them draw in the unit square and affine-map the result onto the
target rectangle.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc

from app.services.debug import debug_log
from app.services.sampling.base import NodeSet, Rect, RngStream, SamplerKind, SamplingError


def _check_count(n: int) -> None:
    if n < 1:
        raise SamplingError(f"node count must be >= 1, got {n}")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def van_der_corput(k: int, p: int) -> float:
    """Radical inverse of ``k`` in base ``p``: digits mirrored about the radix point."""
    if p < 2:
        raise SamplingError(f"base must be >= 2, got {p}")
    if k < 0:
        raise SamplingError(f"index must be >= 0, got {k}")
    num, den = 0, 1
    while k > 0:
        k, digit = divmod(k, p)
        num = num * p + digit
        den *= p
    return num / den


def sample_random(rect: Rect, n: int, rng: RngStream) -> NodeSet:
    _check_count(n)
    unit = rng.random((n, 2))
    return NodeSet(rect.from_unit(unit), rect, rng.seed, SamplerKind.RANDOM)


def sample_hammersley(rect: Rect, n: int, p: int = 2) -> NodeSet:
    """Deterministic Hammersley set: x = k/n, y = radical inverse of k, k = 1..n."""
    _check_count(n)
    if not _is_prime(p):
        raise SamplingError(f"Hammersley base must be prime, got {p}")
    ks = np.arange(1, n + 1)
    unit = np.column_stack(
        (ks / n, np.fromiter((van_der_corput(int(k), p) for k in ks), dtype=np.float64, count=n))
    )
    return NodeSet(rect.from_unit(unit), rect, 0, SamplerKind.HAMMERSLEY)


def sample_lhs(rect: Rect, n: int, rng: RngStream) -> NodeSet:
    """One point per row and per column stratum of an n-by-n partition."""
    _check_count(n)
    engine = qmc.LatinHypercube(d=2, seed=rng.generator)
    unit = engine.random(n)
    debug_log("SAMPLING", "lhs n=%d seed=%d", n, rng.seed)
    return NodeSet(rect.from_unit(unit), rect, rng.seed, SamplerKind.LHS)
