import math

import numpy as np
import pytest

from scope_prune.similarity import similarity_from_tokens
from scope_prune.types import SaliencyVector, SimilarityMatrix, TokenMatrix


def random_instance(seed, n, d, saliency="uniform"):
    rng = np.random.default_rng(seed)
    tokens = TokenMatrix(rng.standard_normal((n, d)))
    if saliency == "softmax":
        z = rng.standard_normal(n) * 2
        scores = np.exp(z) / np.exp(z).sum()
    else:
        scores = rng.uniform(0.01, 1.0, n)
    return tokens, SaliencyVector(scores), similarity_from_tokens(tokens)


def orthonormal_sim(n):
    return SimilarityMatrix(np.eye(n))


# Pure-Python oracles: deliberately loop-based and independent of numpy paths.

def oracle_cosine(rows):
    n = len(rows)
    out = [[0.0] * n for _ in range(n)]
    norms = [math.sqrt(sum(x * x for x in r)) for r in rows]
    for u in range(n):
        for v in range(n):
            dot = sum(a * b for a, b in zip(rows[u], rows[v]))
            out[u][v] = max(-1.0, min(1.0, dot / (norms[u] * norms[v])))
    return out


def oracle_set_coverage(sim, selected):
    s = sim.values if isinstance(sim, SimilarityMatrix) else sim
    total = 0.0
    for u in range(len(s)):
        best = 0.0
        for j in selected:
            if s[u][j] > best:
                best = s[u][j]
        total += best
    return total


def oracle_theta_coverage(sim, selected, theta):
    s = sim.values
    count = 0
    for u in range(len(s)):
        best = max(s[u][j] for j in selected)
        if best >= theta:
            count += 1
    return count / len(s)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Record one PASS/FAIL line per acceptance criterion for the summary."""

    def record(criterion, ok, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        print(_ACCEPTANCE_LINES[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
