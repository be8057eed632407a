import itertools
import math

import numpy as np
import pytest

from ikemo.metrics import (
    HVConfig,
    RunRecord,
    fe_to_target,
    hypervolume_2d,
    normalized_hypervolume,
    target_hv,
    wilcoxon_rank_sum,
)


def hv_inclusion_exclusion(points, ref):
    """Union area of dominated boxes by inclusion-exclusion (exponential)."""
    boxes = [(p[0], p[1]) for p in points
             if p[0] <= ref[0] and p[1] <= ref[1]]
    total = 0.0
    for r in range(1, len(boxes) + 1):
        for combo in itertools.combinations(boxes, r):
            x = max(b[0] for b in combo)
            y = max(b[1] for b in combo)
            area = (ref[0] - x) * (ref[1] - y)
            total += area if r % 2 == 1 else -area
    return total


class TestHypervolume:
    def test_single_box(self):
        assert hypervolume_2d([(0.5, 0.5)], (1.0, 1.0)) == pytest.approx(0.25)

    def test_three_point_front(self):
        pts = [(0.2, 0.8), (0.5, 0.5), (0.8, 0.2)]
        assert hypervolume_2d(pts, (1.0, 1.0)) == pytest.approx(0.37)

    def test_empty(self):
        assert hypervolume_2d(np.empty((0, 2)), (1.0, 1.0)) == 0.0

    def test_points_beyond_ref_discarded(self):
        assert hypervolume_2d([(2.0, 2.0)], (1.0, 1.0)) == 0.0
        assert hypervolume_2d([(0.5, 0.5), (1.5, 0.1)], (1.0, 1.0)) == pytest.approx(0.25)

    def test_matches_inclusion_exclusion(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            pts = rng.random((int(rng.integers(1, 13)), 2))
            expected = hv_inclusion_exclusion(pts, (1.1, 1.1))
            assert hypervolume_2d(pts, (1.1, 1.1)) == pytest.approx(expected, abs=1e-12)

    def test_permutation_and_dominated_point_invariance(self):
        rng = np.random.default_rng(1)
        pts = rng.random((8, 2))
        base = hypervolume_2d(pts, (1.1, 1.1))
        perm = rng.permutation(8)
        assert hypervolume_2d(pts[perm], (1.1, 1.1)) == pytest.approx(base, abs=1e-15)
        dominated = np.vstack([pts, pts.max(axis=0) + 0.001])
        assert hypervolume_2d(dominated, (1.1, 1.1)) == pytest.approx(base, abs=1e-15)

    def test_monotone_under_new_nondominated_point(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            pts = rng.random((6, 2)) * 0.5 + 0.4
            base = hypervolume_2d(pts, (1.1, 1.1))
            extra = np.vstack([pts, rng.random(2) * 0.3])
            assert hypervolume_2d(extra, (1.1, 1.1)) >= base - 1e-15


def test_hv_config_normalization():
    cfg = HVConfig(ideal=(0.0, 0.0), nadir=(2.0, 4.0))
    assert normalized_hypervolume(np.array([[1.0, 2.0]]), cfg) == pytest.approx(
        (1.1 - 0.5) * (1.1 - 0.5))
    with pytest.raises(ValueError):
        HVConfig(ideal=(1.0, 0.0), nadir=(1.0, 1.0))


class TestTargetHV:
    def test_two_algorithms(self):
        assert target_hv({"a": [0.9], "b": [1.0]}) == pytest.approx(0.8)

    def test_single_algorithm(self):
        assert target_hv({"a": [0.5]}) == pytest.approx(0.4)

    def test_identical_runs(self):
        assert target_hv({"a": [0.6, 0.6, 0.6]}) == pytest.approx(0.48)

    def test_median_inside_algorithm(self):
        assert target_hv({"a": [0.2, 1.0, 0.6], "b": [0.1, 0.1, 0.1]}) == pytest.approx(0.48)


def test_run_record_and_fe_to_target():
    rec = RunRecord(seed=1, algorithm="base")
    rec.append(0, 40, 0.1)
    rec.append(1, 80, 0.5)
    rec.append(2, 120, 0.9)
    assert fe_to_target(rec, 0.5) == 80
    assert fe_to_target(rec, 0.95) is None
    with pytest.raises(ValueError):
        rec.append(3, 160, 0.2)  # decreasing hypervolume
    back = RunRecord.from_json(rec.to_json())
    assert back.final_hv == rec.final_hv and back.history == rec.history


def exact_two_sided_oracle(a, b):
    pooled = list(a) + list(b)
    order = sorted(range(len(pooled)), key=lambda k: pooled[k])
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    w = sum(ranks[: len(a)])
    n1 = len(a)
    le = ge = total = 0
    for combo in itertools.combinations(ranks, n1):
        total += 1
        s = sum(combo)
        if s <= w + 1e-9:
            le += 1
        if s >= w - 1e-9:
            ge += 1
    return w, min(1.0, 2.0 * min(le, ge) / total)


class TestWilcoxon:
    def test_fully_separated_small(self):
        w, p = wilcoxon_rank_sum([1, 2, 3], [4, 5, 6])
        assert w == 6.0
        assert p == pytest.approx(0.1, abs=1e-12)

    def test_identical_samples(self):
        _, p = wilcoxon_rank_sum([2, 2, 2], [2, 2, 2])
        assert p == 1.0

    def test_same_multiset_symmetry(self):
        _, p = wilcoxon_rank_sum([1, 5, 9], [9, 1, 5])
        assert p == 1.0

    def test_separated_large_normal_path(self):
        a = list(range(1, 9))
        b = list(range(9, 17))
        _, p = wilcoxon_rank_sum(a, b, method="normal")
        assert p < 0.01
        _, p_exact = wilcoxon_rank_sum(a, b, method="exact")
        assert p_exact < 0.01

    def test_exact_matches_oracle_with_ties(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n1 = int(rng.integers(3, 6))
            n2 = int(rng.integers(3, 6))
            a = rng.integers(0, 5, n1).tolist()
            b = rng.integers(0, 5, n2).tolist()
            w, p = wilcoxon_rank_sum(a, b, method="exact")
            ow, op = exact_two_sided_oracle(a, b)
            assert w == pytest.approx(ow)
            assert p == pytest.approx(op, abs=1e-12)

    def test_matches_scipy(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        rng = np.random.default_rng(4)
        a = rng.normal(0, 1, 20).tolist()
        b = rng.normal(0.8, 1, 18).tolist()
        _, p = wilcoxon_rank_sum(a, b, method="normal")
        ref = scipy_stats.mannwhitneyu(a, b, alternative="two-sided",
                                       use_continuity=True, method="asymptotic")
        assert p == pytest.approx(ref.pvalue, abs=1e-9)

    def test_too_small_samples_rejected(self):
        with pytest.raises(ValueError):
            wilcoxon_rank_sum([1, 2], [3, 4, 5])

    def test_auto_switch(self):
        a = [1, 2, 3, 4, 5, 6]
        b = [7, 8, 9, 10, 11, 12]
        _, p_auto = wilcoxon_rank_sum(a, b)
        _, p_exact = wilcoxon_rank_sum(a, b, method="exact")
        assert p_auto == p_exact  # pooled size 12 uses enumeration
        a13 = a + [6.5]
        _, p_auto13 = wilcoxon_rank_sum(a13, b)
        _, p_norm13 = wilcoxon_rank_sum(a13, b, method="normal")
        assert p_auto13 == p_norm13
