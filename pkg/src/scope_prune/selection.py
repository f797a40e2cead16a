"""Saliency-weighted coverage greedy selection and the ablation baselines.

The set function being maximised is the clamped facility-location coverage

    f(S) = sum_u max(0, max_{s in S} sim(u, s)),     f(empty) = 0,

and each round picks the unselected token maximising
``(f(S + v) - f(S)) * saliency[v] ** alpha``.  Ties (up to ``TIE_RTOL``
relative) go to the lowest index, and rounds continue in tie-break order
even once every gain is zero, so a run always returns exactly ``k`` tokens.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, KTooLarge
from .types import SaliencyVector, SelectionConfig, SelectionResult, SimilarityMatrix, _frozen


@dataclass(frozen=True, eq=False)
class CoverageState:
    """Best clamped similarity ``c[u]`` between each token and the selection."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.float64)
        if c.ndim != 1:
            raise DimensionMismatch("coverage state must be a vector")
        if np.any(~np.isfinite(c)) or np.any(c < 0) or np.any(c > 1):
            raise ValueError("coverage state entries must lie in [0, 1]")
        object.__setattr__(self, "c", _frozen(c))

    @classmethod
    def empty(cls, n: int) -> "CoverageState":
        return cls(np.zeros(n))

    @property
    def n(self) -> int:
        return self.c.size

    def update(self, v: int, sim: SimilarityMatrix) -> "CoverageState":
        """Return the state after adding token ``v`` to the selection."""
        _check_index(v, self.n)
        return CoverageState(np.maximum(self.c, sim.values[:, v]))


def _check_index(v, n: int) -> int:
    if isinstance(v, bool) or int(v) != v or not 0 <= v < n:
        raise IndexOutOfRange(f"index {v!r} outside [0, {n})")
    return int(v)


def _check_k(k: int, n: int) -> None:
    if k > n:
        raise KTooLarge(f"k={k} exceeds the number of tokens n={n}")


def _saliency_weights(sim: SimilarityMatrix, saliency: SaliencyVector, alpha: float) -> np.ndarray:
    scores = saliency.scores if isinstance(saliency, SaliencyVector) else SaliencyVector(saliency).scores
    if scores.size != sim.n:
        raise DimensionMismatch(f"saliency has length {scores.size}, similarity matrix has n={sim.n}")
    # numpy follows 0 ** 0 == 1, so alpha = 0 gives all-ones weights
    return np.power(scores, float(alpha))


# Weighted gains within this relative distance of the round's best are
# treated as tied.  Mutually-covering token pairs produce gains that are
# equal in exact arithmetic but differ in the last bits depending on the
# summation route; without a tolerance the tie-break would follow rounding.
TIE_RTOL = 1e-9


def _pick(scores: np.ndarray) -> int:
    """Lowest index whose score is within ``TIE_RTOL`` of the maximum."""
    best = scores.max()
    return int(np.flatnonzero(scores >= best - TIE_RTOL * abs(best))[0])


def marginal_gain(v: int, state: CoverageState, sim: SimilarityMatrix) -> float:
    """Increase in clamped set coverage from adding ``v`` given ``state``."""
    if state.n != sim.n:
        raise DimensionMismatch(f"state has length {state.n}, similarity matrix has n={sim.n}")
    v = _check_index(v, sim.n)
    return float(np.maximum(sim.values[:, v] - state.c, 0.0).sum())


def _greedy(sim: SimilarityMatrix, weights: np.ndarray, k: int) -> SelectionResult:
    s = sim.values
    n = s.shape[0]
    c = np.zeros(n)
    taken = np.zeros(n, dtype=bool)
    buf = np.empty_like(s)
    selected = np.empty(k, dtype=np.int64)
    step_gains = np.empty(k)
    for t in range(k):
        # row v of the symmetric matrix holds sim(u, v) for all u
        np.subtract(s, c, out=buf)
        np.maximum(buf, 0.0, out=buf)
        scope = buf.sum(axis=1) * weights
        scope[taken] = -np.inf
        best = _pick(scope)
        selected[t] = best
        step_gains[t] = scope[best]
        taken[best] = True
        np.maximum(c, s[:, best], out=c)
    return SelectionResult(selected, step_gains, c)


def scope_select(sim: SimilarityMatrix, saliency: SaliencyVector, config: SelectionConfig) -> SelectionResult:
    """Greedy saliency-coverage selection with incremental coverage state.

    Each round costs O(n^2); the whole run is O(k * n^2).
    """
    _check_k(config.k, sim.n)
    weights = _saliency_weights(sim, saliency, config.alpha)
    return _greedy(sim, weights, config.k)


def coverage_only_select(sim: SimilarityMatrix, config: SelectionConfig) -> SelectionResult:
    """Pure facility-location greedy; the saliency factor is dropped."""
    _check_k(config.k, sim.n)
    return _greedy(sim, np.ones(sim.n), config.k)


def _clamped_coverage(s: np.ndarray, members: list[int]) -> float:
    if not members:
        return 0.0
    return float(np.maximum(s[:, members].max(axis=1), 0.0).sum())


def scope_select_naive(sim: SimilarityMatrix, saliency: SaliencyVector, config: SelectionConfig) -> SelectionResult:
    """Reference implementation recomputing f(S + v) - f(S) from scratch.

    Much slower than :func:`scope_select`; used as a correctness oracle.
    """
    _check_k(config.k, sim.n)
    weights = _saliency_weights(sim, saliency, config.alpha)
    s = sim.values
    n = sim.n
    chosen: list[int] = []
    gains: list[float] = []
    for _ in range(config.k):
        base = _clamped_coverage(s, chosen)
        scores = np.full(n, -np.inf)
        for v in range(n):
            if v not in chosen:
                scores[v] = (_clamped_coverage(s, chosen + [v]) - base) * weights[v]
        best = _pick(scores)
        chosen.append(best)
        gains.append(scores[best])
    final = np.maximum(s[:, chosen].max(axis=1), 0.0)
    return SelectionResult(np.array(chosen), np.array(gains), final)


def saliency_topk_select(saliency: SaliencyVector, k: int) -> np.ndarray:
    """Indices of the ``k`` most salient tokens, most salient first."""
    scores = saliency.scores if isinstance(saliency, SaliencyVector) else SaliencyVector(saliency).scores
    _check_k(k, scores.size)
    if k < 1:
        raise ValueError("k must be at least 1")
    return np.argsort(-scores, kind="stable")[:k].astype(np.int64)


def random_select(n: int, k: int, seed: int) -> np.ndarray:
    """``k`` distinct indices drawn uniformly from ``range(n)``."""
    _check_k(k, n)
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = np.random.default_rng(seed)
    return rng.permutation(n)[:k].astype(np.int64)


def replay_selection(
    indices, sim: SimilarityMatrix, saliency: SaliencyVector, alpha: float = 1.0
) -> SelectionResult:
    """Build a :class:`SelectionResult` for an externally chosen pick order.

    ``step_gains`` holds the saliency-weighted coverage gain each pick had at
    the moment it was made, which lets baseline selections be saved and
    compared with greedy ones in the same format.
    """
    weights = _saliency_weights(sim, saliency, alpha)
    s = sim.values
    c = np.zeros(sim.n)
    idx = [_check_index(v, sim.n) for v in np.asarray(indices).tolist()]
    gains = np.empty(len(idx))
    for t, v in enumerate(idx):
        gains[t] = np.maximum(s[:, v] - c, 0.0).sum() * weights[v]
        np.maximum(c, s[:, v], out=c)
    return SelectionResult(np.array(idx, dtype=np.int64), gains, c)


SELECTORS = ("scope", "saliency", "coverage", "random")


def run_selector(
    method: str,
    sim: SimilarityMatrix,
    saliency: SaliencyVector,
    config: SelectionConfig,
) -> SelectionResult:
    """Dispatch to one of :data:`SELECTORS` and return a full result."""
    if method == "scope":
        return scope_select(sim, saliency, config)
    if method == "coverage":
        return coverage_only_select(sim, config)
    if method == "saliency":
        return replay_selection(saliency_topk_select(saliency, config.k), sim, saliency, config.alpha)
    if method == "random":
        if config.seed is None:
            raise ValueError("random selection needs an explicit seed")
        return replay_selection(random_select(sim.n, config.k, config.seed), sim, saliency, config.alpha)
    raise ValueError(f"unknown method {method!r}; expected one of {', '.join(SELECTORS)}")
