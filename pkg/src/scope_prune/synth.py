"""Deterministic clustered token sets with skewed saliency.

Tokens are assigned round-robin to ``clusters`` random unit-norm centres and
perturbed by isotropic Gaussian noise.  The noise is scaled by ``1/sqrt(d)``
so ``cluster_spread`` is roughly the angle (in radians, for small values)
between a token and its centre, independent of the dimension.

Saliency for a token in cluster ``j`` is ``exp(-saliency_skew * j)`` times a
per-token jitter drawn from ``U[1, 2)``, normalised to sum to 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpecInvalid
from .types import SaliencyVector, TokenMatrix

JITTER_RANGE = (1.0, 2.0)


@dataclass(frozen=True)
class SynthSpec:
    n: int = 576
    d: int = 64
    clusters: int = 8
    cluster_spread: float = 0.5
    saliency_skew: float = 4.0
    seed: int = 0

    def __post_init__(self):
        for name in ("n", "d", "clusters", "seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise SpecInvalid(f"{name} must be an integer, got {value!r}")
        if self.n < 1 or self.d < 1:
            raise SpecInvalid(f"n and d must be >= 1, got n={self.n}, d={self.d}")
        if not 1 <= self.clusters <= self.n:
            raise SpecInvalid(f"clusters must be in [1, n], got {self.clusters}")
        for name in ("cluster_spread", "saliency_skew"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0:
                raise SpecInvalid(f"{name} must be finite and >= 0, got {value!r}")
        if self.seed < 0:
            raise SpecInvalid(f"seed must be non-negative, got {self.seed}")


def generate(spec: SynthSpec) -> tuple[TokenMatrix, SaliencyVector, np.ndarray]:
    """Draw tokens, saliency and cluster labels for ``spec``.

    Returns:
        ``(tokens, saliency, labels)`` where ``labels[i]`` is the cluster of
        token ``i`` (``i % clusters``).
    """
    if not isinstance(spec, SynthSpec):
        raise SpecInvalid(f"expected SynthSpec, got {type(spec).__name__}")
    rng = np.random.default_rng(spec.seed)
    centers = rng.standard_normal((spec.clusters, spec.d))
    norms = np.linalg.norm(centers, axis=1, keepdims=True)
    # a zero draw is practically impossible but would break the unit-norm contract
    centers = np.where(norms > 0, centers / np.where(norms > 0, norms, 1.0), np.eye(1, spec.d))

    labels = np.arange(spec.n) % spec.clusters
    noise = rng.standard_normal((spec.n, spec.d)) * (spec.cluster_spread / np.sqrt(spec.d))
    tokens = centers[labels] + noise

    jitter = rng.uniform(*JITTER_RANGE, size=spec.n)
    raw = np.exp(-spec.saliency_skew * labels) * jitter
    saliency = raw / raw.sum()
    if np.any(saliency <= 0):
        raise SpecInvalid("saliency_skew is too large for this many clusters (saliency underflows to 0)")
    return TokenMatrix(tokens), SaliencyVector(saliency), labels
