"""Hypervolume, target tracking, and the rank-sum test for run comparison."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import comb, erfc, sqrt
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "HVConfig",
    "RunRecord",
    "hypervolume_2d",
    "normalized_hypervolume",
    "target_hv",
    "fe_to_target",
    "wilcoxon_rank_sum",
]

EXACT_ENUMERATION_MAX = 12


@dataclass(frozen=True)
class HVConfig:
    """Objective-space normalization anchors and the reference point."""

    ideal: tuple[float, float]
    nadir: tuple[float, float]
    ref: tuple[float, float] = (1.1, 1.1)

    def __post_init__(self):
        if not all(i < n for i, n in zip(self.ideal, self.nadir)):
            raise ValueError("ideal must be strictly below nadir componentwise")

    def normalize(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        ideal = np.asarray(self.ideal)
        nadir = np.asarray(self.nadir)
        return (pts - ideal) / (nadir - ideal)


@dataclass
class RunRecord:
    """Per-run trajectory: (fe, hv) samples plus identifying metadata."""

    seed: int
    algorithm: str = ""
    history: list[dict] = field(default_factory=list)  # {"gen", "fe", "hv", ...}
    final_hv: float = 0.0
    fe_total: int = 0

    def append(self, gen: int, fe: int, hv: float, **extra) -> None:
        if self.history and hv < self.history[-1]["hv"] - 1e-12:
            raise ValueError("hypervolume must be non-decreasing over a run")
        self.history.append({"gen": gen, "fe": fe, "hv": hv, **extra})
        self.final_hv = hv
        self.fe_total = fe

    def to_json(self) -> dict:
        return {"seed": self.seed, "algorithm": self.algorithm,
                "history": self.history, "final_hv": self.final_hv,
                "fe_total": self.fe_total}

    @staticmethod
    def from_json(d: dict) -> "RunRecord":
        rec = RunRecord(seed=d["seed"], algorithm=d.get("algorithm", ""))
        rec.history = list(d["history"])
        rec.final_hv = d.get("final_hv", rec.history[-1]["hv"] if rec.history else 0.0)
        rec.fe_total = d.get("fe_total", rec.history[-1]["fe"] if rec.history else 0)
        return rec


def hypervolume_2d(points: Sequence[Sequence[float]] | np.ndarray,
                   ref: Sequence[float]) -> float:
    """Exact dominated area for minimization, by sort-and-sweep.

    Points that do not dominate the reference point contribute nothing
    and are discarded.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return 0.0
    rx, ry = float(ref[0]), float(ref[1])
    mask = (pts[:, 0] <= rx) & (pts[:, 1] <= ry)
    pts = pts[mask]
    if pts.shape[0] == 0:
        return 0.0
    order = np.lexsort((pts[:, 1], pts[:, 0]))  # by x, then y
    area = 0.0
    best_y = ry
    for x, y in pts[order]:
        if y < best_y:
            area += (rx - x) * (best_y - y)
            best_y = y
    return area


def normalized_hypervolume(points: np.ndarray, cfg: HVConfig) -> float:
    return hypervolume_2d(cfg.normalize(points), cfg.ref)


def target_hv(final_hvs_by_algorithm: dict[str, Sequence[float]],
              fraction: float = 0.8) -> float:
    """Target = fraction of the best median final hypervolume across algorithms."""
    if not final_hvs_by_algorithm:
        raise ValueError("need at least one algorithm with completed runs")
    medians = [float(np.median(list(v))) for v in final_hvs_by_algorithm.values() if len(v)]
    if not medians:
        raise ValueError("need at least one completed run")
    return fraction * max(medians)


def fe_to_target(record: RunRecord, hv_target: float) -> Optional[int]:
    """FEs at the end of the first generation whose archive HV meets the target."""
    for entry in record.history:
        if entry["hv"] >= hv_target:
            return int(entry["fe"])
    return None


def _midranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda k: values[k])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return ranks


def _normal_two_sided(w: float, n1: int, n2: int, tie_term: float) -> float:
    n = n1 + n2
    mu = n1 * (n + 1) / 2.0
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0.0:
        return 1.0
    z = max(0.0, abs(w - mu) - 0.5) / sqrt(var)
    return min(1.0, erfc(z / sqrt(2.0)))


def _exact_two_sided(ranks: list[float], n1: int, w: float) -> float:
    total = comb(len(ranks), n1)
    le = ge = 0
    eps = 1e-9
    for combo in itertools.combinations(ranks, n1):
        ws = sum(combo)
        if ws <= w + eps:
            le += 1
        if ws >= w - eps:
            ge += 1
    return min(1.0, 2.0 * min(le, ge) / total)


def wilcoxon_rank_sum(a: Sequence[float], b: Sequence[float],
                      method: str = "auto") -> tuple[float, float]:
    """Rank-sum statistic of ``a`` and the two-sided p-value.

    Midranks handle ties.  ``auto`` enumerates the exact conditional
    distribution when the pooled size is at most 12 and otherwise uses
    the tie-corrected, continuity-corrected normal approximation;
    ``exact`` / ``normal`` force one path.
    """
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    n1, n2 = len(a), len(b)
    if n1 < 3 or n2 < 3:
        raise ValueError("need at least 3 observations per sample")
    pooled = a + b
    ranks = _midranks(pooled)
    w = float(sum(ranks[:n1]))
    if len(set(pooled)) == 1:
        return w, 1.0

    if method == "auto":
        method = "exact" if n1 + n2 <= EXACT_ENUMERATION_MAX else "normal"
    if method == "exact":
        return w, _exact_two_sided(ranks, n1, w)
    if method == "normal":
        n = n1 + n2
        _, counts = np.unique(np.asarray(pooled), return_counts=True)
        tie_term = float(np.sum(counts**3 - counts)) / (n * (n - 1))
        return w, _normal_two_sided(w, n1, n2, tie_term)
    raise ValueError(f"unknown method {method!r}")
