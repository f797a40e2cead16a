"""Saliency-coverage greedy token subset selection and theta-coverage analysis."""

from .errors import *  # noqa: F401,F403
from .io import load_bundle, load_selection, save_bundle, save_selection
from .metrics import ThetaGrid, coverage_curve, set_coverage, theta_coverage
from .selection import (
    CoverageState,
    coverage_only_select,
    marginal_gain,
    random_select,
    saliency_topk_select,
    scope_select,
    scope_select_naive,
)
from .similarity import UnitTokenMatrix, cosine_similarity_matrix, normalize_rows, similarity_from_tokens
from .synth import SynthSpec, generate
from .types import (
    CoverageReport,
    SaliencyVector,
    SelectionConfig,
    SelectionResult,
    SimilarityMatrix,
    TokenMatrix,
    validate_bundle,
)

__version__ = "0.1.0"
