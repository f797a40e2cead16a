"""Row normalisation and dense cosine-similarity construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import SimilarityMatrix, TokenMatrix, _frozen

DEFAULT_ZERO_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class UnitTokenMatrix:
    """Token rows scaled to unit norm.

    Rows whose original norm fell below the zero threshold are stored as
    all-zero and marked in ``zero_rows``.
    """

    data: np.ndarray
    zero_rows: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        flags = np.asarray(self.zero_rows, dtype=bool)
        if data.ndim != 2 or flags.shape != (data.shape[0],):
            raise ValueError("zero_rows must flag every row of data")
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "zero_rows", _frozen(flags))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


def normalize_rows(tokens: TokenMatrix, zero_threshold: float = DEFAULT_ZERO_THRESHOLD) -> UnitTokenMatrix:
    x = tokens.data if isinstance(tokens, TokenMatrix) else TokenMatrix(tokens).data
    norms = np.linalg.norm(x, axis=1)
    zero = norms < zero_threshold
    safe = np.where(zero, 1.0, norms)
    unit = x / safe[:, None]
    unit[zero] = 0.0
    return UnitTokenMatrix(unit, zero)


def cosine_similarity_matrix(unit: UnitTokenMatrix) -> SimilarityMatrix:
    """Pairwise dot products of unit rows.

    Only the upper triangle of the product is kept and mirrored, so the
    result is exactly symmetric.  The diagonal is set to 1 for ordinary rows
    and 0 for zero rows, and everything is clamped into [-1, 1].  Rows with
    bit-identical unit vectors get similarity exactly 1, which rounding in
    the dot product would otherwise miss.
    """
    u = unit.data
    gram = u @ u.T
    upper = np.triu(gram, k=1)
    s = upper + upper.T
    _, group = np.unique(u, axis=0, return_inverse=True)
    group = group.ravel()
    dup = (group[:, None] == group[None, :]) & ~unit.zero_rows[:, None]
    s[dup] = 1.0
    np.fill_diagonal(s, np.where(unit.zero_rows, 0.0, 1.0))
    np.clip(s, -1.0, 1.0, out=s)
    return SimilarityMatrix(s)


def similarity_from_tokens(tokens: TokenMatrix, zero_threshold: float = DEFAULT_ZERO_THRESHOLD) -> SimilarityMatrix:
    return cosine_similarity_matrix(normalize_rows(tokens, zero_threshold))
