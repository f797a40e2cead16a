"""Exit criteria for the package, one test per criterion.

Run ``pytest tests/test_acceptance.py -v`` to get a PASS/FAIL line per
criterion in the terminal summary.
"""

import time

import numpy as np
import pytest

from conftest import oracle_set_coverage, oracle_theta_coverage, random_instance
from scope_prune.bench import compare_on_synth
from scope_prune.io import load_bundle, load_selection, save_bundle, save_selection, selection_to_dict
from scope_prune.metrics import ThetaGrid, set_coverage, theta_coverage
from scope_prune.selection import (
    CoverageState,
    coverage_only_select,
    marginal_gain,
    scope_select,
    scope_select_naive,
)
from scope_prune.similarity import similarity_from_tokens
from scope_prune.synth import SynthSpec
from scope_prune.types import SaliencyVector, SelectionConfig, TokenMatrix


def test_1_oracle_equivalence(acceptance_report):
    rng = np.random.default_rng(20240601)
    alphas = [0.0, 0.5, 1.0, 2.0]
    mismatches, worst = 0, 0.0
    start = time.perf_counter()
    for i in range(240):
        n, d = int(rng.integers(4, 33)), int(rng.integers(2, 17))
        k = int(rng.integers(1, n + 1))
        alpha = alphas[i % 4]
        _, sal, sim = random_instance(int(rng.integers(2**31)), n, d, saliency="softmax" if i % 2 else "uniform")
        config = SelectionConfig(k=k, alpha=alpha)
        fast, slow = scope_select(sim, sal, config), scope_select_naive(sim, sal, config)
        if fast.selected.tolist() != slow.selected.tolist():
            mismatches += 1
        else:
            worst = max(worst, float(np.max(np.abs(fast.step_gains - slow.step_gains))))
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and worst <= 1e-9 and elapsed < 30
    acceptance_report("1 oracle equivalence", ok,
                      f"240 instances, index mismatches={mismatches}, max gain diff={worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_2_submodularity_and_monotonicity(acceptance_report):
    rng = np.random.default_rng(77)
    violations = 0
    checks = 0
    for i in range(120):
        n = int(rng.integers(3, 25))
        _, sal, sim = random_instance(10_000 + i, n, int(rng.integers(2, 10)))
        order = rng.permutation(n)
        for _ in range(3):
            a = int(rng.integers(0, n))
            b = int(rng.integers(a, n))
            st_s, st_t = CoverageState.empty(n), CoverageState.empty(n)
            for v in order[:a]:
                st_s = st_s.update(v, sim)
            for v in order[:b]:
                st_t = st_t.update(v, sim)
            for v in order[b:]:
                gs, gt = marginal_gain(v, st_s, sim), marginal_gain(v, st_t, sim)
                checks += 1
                violations += (gs < -1e-12) + (gt < -1e-12) + (gs < gt - 1e-12)
        traj = scope_select(sim, sal, SelectionConfig(k=n)).selected.tolist()
        values = [oracle_set_coverage(sim, traj[:t]) for t in range(n + 1)]
        violations += sum(b < a - 1e-12 for a, b in zip(values, values[1:]))
    ok = violations == 0
    acceptance_report("2 submodularity/monotonicity", ok, f"120 instances, {checks} gain pairs, violations={violations}")
    assert ok


def test_3_ablation_equivalences(acceptance_report):
    rng = np.random.default_rng(3)
    byte_diffs, scale_diffs = 0, 0
    for i in range(50):
        n = int(rng.integers(4, 60))
        _, sal, sim = random_instance(500 + i, n, int(rng.integers(2, 12)), saliency="softmax")
        k = int(rng.integers(1, n + 1))
        a = scope_select(sim, sal, SelectionConfig(k=k, alpha=0.0))
        b = coverage_only_select(sim, SelectionConfig(k=k))
        if repr(selection_to_dict(a)) != repr(selection_to_dict(b)) or a.step_gains.tobytes() != b.step_gains.tobytes():
            byte_diffs += 1
        base = scope_select(sim, sal, SelectionConfig(k=k, alpha=1.0)).selected.tolist()
        for c in (1e6, 1e-6):
            scaled = scope_select(sim, SaliencyVector(sal.scores * c), SelectionConfig(k=k, alpha=1.0))
            scale_diffs += scaled.selected.tolist() != base
    ok = byte_diffs == 0 and scale_diffs == 0
    acceptance_report("3 ablation equivalences", ok,
                      f"50 instances, alpha=0 vs coverage diffs={byte_diffs}, rescaling diffs={scale_diffs}")
    assert ok


def test_4_coverage_metrics_vs_brute_force(acceptance_report):
    rng = np.random.default_rng(4)
    worst_theta, worst_set = 0.0, 0.0
    for i in range(100):
        n = int(rng.integers(1, 65))
        _, _, sim = random_instance(900 + i, n, int(rng.integers(2, 10)))
        sel = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist()
        theta = float(rng.uniform(0, 1))
        worst_theta = max(worst_theta, abs(theta_coverage(sel, sim, theta) - oracle_theta_coverage(sim, sel, theta)))
        worst_set = max(worst_set, abs(set_coverage(sel, sim) - oracle_set_coverage(sim, sel)))
    ok = worst_theta <= 1e-12 and worst_set <= 1e-12
    acceptance_report("4 theta/set coverage oracles", ok,
                      f"100 instances, max |dtheta|={worst_theta:.1e}, max |dset|={worst_set:.1e}")
    assert ok


@pytest.mark.slow
def test_5_coverage_ordering_on_skewed_synthetic(acceptance_report):
    base = SynthSpec(n=576, d=64, clusters=8, cluster_spread=0.5, saliency_skew=4.0)
    grid = ThetaGrid([0.3, 0.5, 0.7])
    cmp = compare_on_synth(base, range(100), k=64, alpha=1.0, grid=grid)
    scope, sal = cmp.per_seed("scope"), cmp.per_seed("saliency")
    wins = (scope > sal).sum(axis=0)
    mean = cmp.mean
    beats_saliency = bool(np.all(wins >= 95))
    beats_random = bool(mean.row("scope")[1] > mean.row("random")[1])
    detail = (f"scope>saliency seeds at theta 0.3/0.5/0.7 = {wins.tolist()}/100; "
              f"mean@0.5 scope={mean.row('scope')[1]:.3f} random={mean.row('random')[1]:.3f} "
              f"saliency={mean.row('saliency')[1]:.3f}")
    acceptance_report("5 coverage ordering (scope > saliency)", beats_saliency, detail)
    acceptance_report("5 coverage ordering (scope > random @0.5, mean)", beats_random, detail)
    assert beats_saliency, detail
    assert beats_random, detail


@pytest.mark.slow
@pytest.mark.parametrize("n,k,d,budget", [(576, 64, 1024, 1.0), (2880, 160, 1024, 20.0)])
def test_6_performance_budget(acceptance_report, n, k, d, budget):
    rng = np.random.default_rng(n)
    tokens = TokenMatrix(rng.standard_normal((n, d)))
    sal = SaliencyVector(rng.dirichlet(np.ones(n)))
    start = time.perf_counter()
    sim = similarity_from_tokens(tokens)
    result = scope_select(sim, sal, SelectionConfig(k=k))
    elapsed = time.perf_counter() - start
    ok = elapsed < budget and result.k == k
    acceptance_report(f"6 performance n={n} k={k}", ok, f"{elapsed:.2f}s (budget {budget:.0f}s, incl. similarity)")
    assert ok


def test_7_format_round_trips(tmp_path, acceptance_report):
    rng = np.random.default_rng(7)
    failures = 0
    for i in range(20):
        n, d = int(rng.integers(1, 80)), int(rng.integers(1, 40))
        tokens = TokenMatrix(rng.standard_normal((n, d)) * 10 ** rng.uniform(-3, 3))
        sal = SaliencyVector(rng.random(n))
        t2, s2 = load_bundle(save_bundle(tokens, sal, tmp_path / f"b{i}"))
        ok_bundle = (t2.data.tobytes() == tokens.data.astype("<f4").astype(np.float64).tobytes()
                     and s2.scores.tobytes() == sal.scores.astype("<f4").astype(np.float64).tobytes())
        # a second save/load cycle is lossless once values are at storage precision
        t3, s3 = load_bundle(save_bundle(t2, s2, tmp_path / f"c{i}"))
        ok_bundle = ok_bundle and t3 == t2 and s3 == s2
        sim = similarity_from_tokens(tokens)
        result = scope_select(sim, sal, SelectionConfig(k=int(rng.integers(1, n + 1))))
        back = load_selection(save_selection(result, tmp_path / f"s{i}.json"))
        failures += (not ok_bundle) + (back != result)
    ok = failures == 0
    acceptance_report("7 format round-trips", ok, f"20 bundles + 20 selections, failures={failures}")
    assert ok
