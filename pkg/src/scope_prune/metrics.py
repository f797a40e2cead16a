"""Theta-coverage, clamped set coverage and coverage-curve reports."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySelection, IndexOutOfRange, InvalidConfig, ThetaOutOfRange
from .types import CoverageReport, SimilarityMatrix, _frozen

DEFAULT_THETAS = tuple(np.round(np.linspace(0.0, 1.0, 11), 10))


@dataclass(frozen=True, eq=False)
class ThetaGrid:
    """Strictly ascending similarity thresholds within [0, 1]."""

    values: np.ndarray = DEFAULT_THETAS

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 1:
            raise InvalidConfig("theta grid must be a non-empty list")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0) or np.any(vals > 1):
            raise ThetaOutOfRange("thetas must lie in [0, 1]")
        if np.any(np.diff(vals) <= 0):
            raise InvalidConfig("thetas must be strictly ascending")
        object.__setattr__(self, "values", _frozen(vals))

    @classmethod
    def parse(cls, text: str) -> "ThetaGrid":
        """Parse ``"0,0.25,0.5"`` or a ``start:stop:count`` linspace spec."""
        text = text.strip()
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise InvalidConfig(f"bad theta range {text!r}; use start:stop:count")
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            return cls(np.linspace(start, stop, count))
        return cls([float(p) for p in text.split(",") if p.strip()])

    def __len__(self):
        return self.values.size

    def __iter__(self):
        return iter(self.values.tolist())


def _indices(selected: Iterable[int], n: int) -> np.ndarray:
    idx = np.asarray(list(selected), dtype=np.int64).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexOutOfRange(f"selected indices must lie in [0, {n})")
    return idx


def best_similarity(selected: Sequence[int], sim: SimilarityMatrix) -> np.ndarray:
    """For every token, its largest similarity to any selected token."""
    idx = _indices(selected, sim.n)
    if idx.size == 0:
        raise EmptySelection("selection is empty")
    return sim.values[:, idx].max(axis=1)


def theta_coverage(selected: Sequence[int], sim: SimilarityMatrix, theta: float) -> float:
    """Fraction of tokens whose best similarity to the selection is ``>= theta``."""
    if not 0.0 <= theta <= 1.0:
        raise ThetaOutOfRange(f"theta={theta} outside [0, 1]")
    best = best_similarity(selected, sim)
    return float(np.count_nonzero(best >= theta)) / sim.n


def set_coverage(selected: Sequence[int], sim: SimilarityMatrix) -> float:
    idx = _indices(selected, sim.n)
    if idx.size == 0:
        return 0.0
    return float(np.maximum(sim.values[:, idx].max(axis=1), 0.0).sum())


def coverage_curve(methods, sim: SimilarityMatrix, grid: ThetaGrid | None = None) -> CoverageReport:
    """Theta-coverage of several selections over a shared grid.

    Args:
        methods: mapping or sequence of ``(name, indices)`` pairs.
        sim: similarity matrix over the full token set.
        grid: thresholds; defaults to 0.0, 0.1, ..., 1.0.
    """
    grid = grid if grid is not None else ThetaGrid()
    items = list(methods.items()) if hasattr(methods, "items") else list(methods)
    rows = []
    for name, selected in items:
        best = best_similarity(selected, sim)
        # sorting once gives every threshold count by binary search
        ordered = np.sort(best)
        below = np.searchsorted(ordered, grid.values, side="left")
        rows.append((name, (sim.n - below) / sim.n))
    return CoverageReport(grid.values, tuple(rows))


def mean_report(reports: Sequence[CoverageReport]) -> CoverageReport:
    """Uniform per-grid-point mean of reports sharing thetas and methods."""
    if not reports:
        raise ValueError("no reports to average")
    first = reports[0]
    for r in reports[1:]:
        if not np.array_equal(r.thetas, first.thetas) or r.methods != first.methods:
            raise ValueError("reports disagree on thetas or methods")
    rows = []
    for name in first.methods:
        stacked = np.stack([r.row(name) for r in reports])
        rows.append((name, stacked.mean(axis=0)))
    return CoverageReport(first.thetas, tuple(rows))
