"""Immutable domain types with validation at construction.

Every container stores a private float64 (or int64) numpy copy marked
read-only, so instances can be shared freely between threads.  Equality is
element-wise and exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidConfig,
    InvalidSelection,
    InvalidSimilarity,
    NegativeSaliency,
    NonFinite,
)

SYM_TOL = 1e-6


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _as_float64(values, name: str) -> np.ndarray:
    try:
        arr = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise NonFinite(f"{name}: not convertible to real values ({exc})") from None
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{name} contains NaN or Inf")
    return arr


@dataclass(frozen=True, eq=False)
class TokenMatrix:
    """An ``n x d`` matrix of token embeddings; row ``i`` is token ``i``."""

    data: np.ndarray

    def __post_init__(self):
        arr = _as_float64(self.data, "token matrix")
        if arr.ndim != 2:
            raise DimensionMismatch(f"token matrix must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch(f"token matrix needs n >= 1 and d >= 1, got {arr.shape}")
        object.__setattr__(self, "data", _frozen(arr))

    @classmethod
    def from_flat(cls, n: int, d: int, values: Sequence[float]) -> "TokenMatrix":
        flat = np.asarray(values, dtype=np.float64).ravel()
        if n < 1 or d < 1 or flat.size != n * d:
            raise DimensionMismatch(f"expected {n}*{d} values, got {flat.size}")
        return cls(flat.reshape(n, d))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other):
        if not isinstance(other, TokenMatrix):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SaliencyVector:
    """Non-negative per-token importance scores."""

    scores: np.ndarray

    def __post_init__(self):
        arr = _as_float64(self.scores, "saliency")
        if arr.ndim != 1 or arr.size < 1:
            raise DimensionMismatch(f"saliency must be a non-empty vector, got shape {arr.shape}")
        if np.any(arr < 0):
            raise NegativeSaliency(f"saliency has negative entries at {np.flatnonzero(arr < 0)[:5].tolist()}")
        object.__setattr__(self, "scores", _frozen(arr))

    @property
    def n(self) -> int:
        return self.scores.size

    def __len__(self):
        return self.scores.size

    def __eq__(self, other):
        if not isinstance(other, SaliencyVector):
            return NotImplemented
        return bool(np.array_equal(self.scores, other.scores))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Symmetric ``n x n`` cosine-similarity matrix.

    Diagonal entries must be 1 (ordinary rows) or 0 (rows that were
    flagged as zero vectors during normalisation).
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _as_float64(self.values, "similarity matrix")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise DimensionMismatch(f"similarity matrix must be square, got shape {arr.shape}")
        if np.any(np.abs(arr) > 1 + SYM_TOL):
            raise InvalidSimilarity("similarity entries outside [-1, 1]")
        if np.max(np.abs(arr - arr.T)) > SYM_TOL:
            raise InvalidSimilarity("similarity matrix is not symmetric")
        diag = np.diag(arr)
        if not np.all((np.abs(diag - 1) <= SYM_TOL) | (np.abs(diag) <= SYM_TOL)):
            raise InvalidSimilarity("similarity diagonal must be 1 (or 0 for zero rows)")
        object.__setattr__(self, "values", _frozen(arr))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SimilarityMatrix):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(np.array_equal(self.values, other.values))

    __hash__ = None


@dataclass(frozen=True)
class SelectionConfig:
    """Parameters of a single selection run."""

    k: int
    alpha: float = 1.0
    tie_break: str = "lowest-index"
    seed: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise InvalidConfig(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        alpha = float(self.alpha)
        if not np.isfinite(alpha) or alpha < 0:
            raise InvalidConfig(f"alpha must be finite and >= 0, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)
        if self.tie_break != "lowest-index":
            raise InvalidConfig(f"unsupported tie_break rule {self.tie_break!r}")


@dataclass(frozen=True, eq=False)
class SelectionResult:
    """Output of a selector.

    Attributes:
        selected: picked token indices, in pick order.
        step_gains: the saliency-weighted gain of the winner at each pick.
        final_coverage: per-token best clamped similarity to the selection.
    """

    selected: np.ndarray
    step_gains: np.ndarray
    final_coverage: np.ndarray

    def __post_init__(self):
        sel = np.asarray(self.selected)
        if sel.ndim != 1 or sel.size < 1:
            raise DimensionMismatch("selection must contain at least one index")
        if not np.issubdtype(sel.dtype, np.integer):
            if not np.all(np.equal(np.mod(sel, 1), 0)):
                raise IndexOutOfRange("selected indices must be integers")
        sel = sel.astype(np.int64)
        gains = _as_float64(self.step_gains, "step gains")
        cov = _as_float64(self.final_coverage, "final coverage")
        if gains.shape != sel.shape:
            raise DimensionMismatch(f"{sel.size} indices but {gains.size} step gains")
        if cov.ndim != 1:
            raise DimensionMismatch("final coverage must be a vector")
        n = cov.size
        if np.any(sel < 0) or np.any(sel >= n):
            raise IndexOutOfRange(f"selected indices must lie in [0, {n})")
        if np.unique(sel).size != sel.size:
            raise InvalidSelection("selected indices are not distinct")
        if np.any(cov < 0) or np.any(cov > 1):
            raise InvalidSelection("final coverage entries must lie in [0, 1]")
        object.__setattr__(self, "selected", _frozen(sel))
        object.__setattr__(self, "step_gains", _frozen(gains))
        object.__setattr__(self, "final_coverage", _frozen(cov))

    @property
    def k(self) -> int:
        return self.selected.size

    @property
    def n(self) -> int:
        return self.final_coverage.size

    def __eq__(self, other):
        if not isinstance(other, SelectionResult):
            return NotImplemented
        return (
            np.array_equal(self.selected, other.selected)
            and np.array_equal(self.step_gains, other.step_gains)
            and np.array_equal(self.final_coverage, other.final_coverage)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class CoverageReport:
    """Theta-coverage curves, one row per method over a shared theta grid."""

    thetas: np.ndarray
    rows: tuple = field(default_factory=tuple)  # ((method, np.ndarray), ...)

    def __post_init__(self):
        thetas = _as_float64(self.thetas, "thetas")
        if thetas.ndim != 1 or thetas.size < 1:
            raise DimensionMismatch("theta grid must be a non-empty vector")
        if np.any(thetas < 0) or np.any(thetas > 1) or np.any(np.diff(thetas) <= 0):
            raise InvalidConfig("thetas must be strictly ascending within [0, 1]")
        rows = []
        for name, values in self.rows:
            vals = _as_float64(values, f"coverage row {name!r}")
            if vals.shape != thetas.shape:
                raise DimensionMismatch(f"row {name!r} has {vals.size} values for {thetas.size} thetas")
            if np.any(vals < 0) or np.any(vals > 1):
                raise InvalidConfig(f"row {name!r} has coverage outside [0, 1]")
            if np.any(np.diff(vals) > 0):
                raise InvalidConfig(f"row {name!r} is not non-increasing in theta")
            rows.append((str(name), _frozen(vals)))
        object.__setattr__(self, "thetas", _frozen(thetas))
        object.__setattr__(self, "rows", tuple(rows))

    @property
    def methods(self) -> list[str]:
        return [name for name, _ in self.rows]

    def row(self, method: str) -> np.ndarray:
        for name, values in self.rows:
            if name == method:
                return values
        raise KeyError(method)

    def to_csv(self) -> str:
        header = ",".join(["theta", *self.methods])
        lines = [header]
        for j, theta in enumerate(self.thetas):
            cells = [f"{theta:.6f}"] + [f"{values[j]:.6f}" for _, values in self.rows]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        if not isinstance(other, CoverageReport):
            return NotImplemented
        if not np.array_equal(self.thetas, other.thetas) or self.methods != other.methods:
            return False
        return all(np.array_equal(a, b) for (_, a), (_, b) in zip(self.rows, other.rows))

    __hash__ = None


def validate_bundle(tokens: TokenMatrix, saliency: SaliencyVector) -> tuple[TokenMatrix, SaliencyVector]:
    """Check that ``saliency`` pairs with ``tokens`` and return both.

    Raw arrays are accepted too and are converted (and validated) first.
    """
    if not isinstance(tokens, TokenMatrix):
        tokens = TokenMatrix(tokens)
    if not isinstance(saliency, SaliencyVector):
        saliency = SaliencyVector(saliency)
    if saliency.n != tokens.n:
        raise DimensionMismatch(f"saliency has length {saliency.n}, token matrix has n={tokens.n}")
    return tokens, saliency
