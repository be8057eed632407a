"""Constrained NSGA-II engine: variation, sorting, selection, ND archive.

The hot kernels (dominance sorting, crowding, SBX, polynomial mutation)
live in ikemo.kernels; this module owns the generational loop, the
feasibility-rule constraint handling, and the unbounded archive of
non-dominated feasible solutions.  An ``offspring_hook`` lets the
knowledge layer rewrite offspring before evaluation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .rules import VariableSpec

__all__ = [
    "Individual",
    "EvoConfig",
    "EvoState",
    "ArchiveStore",
    "fast_nondominated_sort",
    "crowding_distance",
    "sbx_crossover",
    "polynomial_mutation",
    "init_state",
    "step_generation",
    "run_nsga2",
]

OffspringHook = Callable[[np.ndarray, np.random.Generator], tuple[np.ndarray, list]]


@dataclass
class Individual:
    """One solution: decision vector, objectives, constraints, NSGA-II bookkeeping."""

    x: np.ndarray
    f: np.ndarray
    g: np.ndarray
    cv: float
    nd_rank: int = 0
    crowding: float = 0.0
    op_tag: Optional[dict] = None


@dataclass
class EvoConfig:
    pop_size: int = 40
    max_gen: int = 100
    p_c: float = 0.9
    eta_c: float = 30.0
    p_m: Optional[float] = None  # defaults to 1/n_var
    eta_m: float = 50.0
    seed: int = 0
    archive_cap: Optional[int] = None  # None = unbounded

    def __post_init__(self):
        if self.pop_size % 2:
            raise ValueError("pop_size must be even")
        if not (0.0 <= self.p_c <= 1.0):
            raise ValueError("p_c must be in [0,1]")
        if self.p_m is not None and not (0.0 <= self.p_m <= 1.0):
            raise ValueError("p_m must be in [0,1]")


class ArchiveStore:
    """All mutually non-dominated feasible solutions found so far."""

    def __init__(self, n_var: int, n_obj: int = 2, cap: Optional[int] = None):
        self.X = np.empty((0, n_var))
        self.F = np.empty((0, n_obj))
        self.cap = cap

    def __len__(self) -> int:
        return self.X.shape[0]

    def update(self, X_new: np.ndarray, F_new: np.ndarray, cv_new: np.ndarray) -> None:
        for x, f, cv in zip(X_new, F_new, cv_new):
            if cv > 0.0:
                continue
            if len(self):
                dominated = np.any(np.all(self.F <= f, axis=1) & np.any(self.F < f, axis=1))
                if dominated:
                    continue
                if np.any(np.all(self.X == x, axis=1)):  # exact duplicate
                    continue
                keep = ~(np.all(f <= self.F, axis=1) & np.any(f < self.F, axis=1))
                self.X = self.X[keep]
                self.F = self.F[keep]
            self.X = np.vstack([self.X, x[np.newaxis, :]])
            self.F = np.vstack([self.F, f[np.newaxis, :]])
        if self.cap is not None and len(self) > self.cap:
            self._prune_to_cap()

    def _prune_to_cap(self) -> None:
        crowd = crowding_distance(self.F)
        keep = np.argsort(-crowd, kind="stable")[: self.cap]
        keep.sort()
        self.X = self.X[keep]
        self.F = self.F[keep]


@dataclass
class EvoState:
    problem: "object"
    cfg: EvoConfig
    rng: np.random.Generator
    X: np.ndarray
    F: np.ndarray
    G: np.ndarray
    CV: np.ndarray
    rank: np.ndarray
    crowd: np.ndarray
    tags: list
    archive: ArchiveStore
    gen: int = 0
    fe: int = 0
    eval_failures: int = 0

    def population_hash(self) -> str:
        h = hashlib.sha256()
        h.update(self.X.tobytes())
        h.update(self.F.tobytes())
        h.update(self.CV.tobytes())
        return h.hexdigest()

    def to_individuals(self) -> list[Individual]:
        return [Individual(x=self.X[i].copy(), f=self.F[i].copy(), g=self.G[i].copy(),
                           cv=float(self.CV[i]), nd_rank=int(self.rank[i]),
                           crowding=float(self.crowd[i]), op_tag=self.tags[i])
                for i in range(len(self.X))]


def fast_nondominated_sort(F: np.ndarray, CV: Optional[np.ndarray] = None) -> list[np.ndarray]:
    """Fronts as index arrays, best front first (constrained dominance)."""
    F = np.asarray(F, dtype=float)
    if CV is None:
        CV = np.zeros(F.shape[0])
    ranks = kernels.nondominated_ranks(F, np.asarray(CV, dtype=float))
    fronts = []
    for r in range(int(ranks.max()) + 1 if len(ranks) else 0):
        fronts.append(np.flatnonzero(ranks == r))
    return fronts


def crowding_distance(F_front: np.ndarray) -> np.ndarray:
    F_front = np.asarray(F_front, dtype=float)
    k = F_front.shape[0]
    if k == 0:
        return np.empty(0)
    if k <= 2:
        return np.full(k, np.inf)
    orders = np.argsort(F_front, axis=0, kind="stable")
    return kernels.crowding_from_orders(F_front, orders)


def _bounds(specs: Sequence[VariableSpec]) -> tuple[np.ndarray, np.ndarray]:
    lower = np.array([s.lower for s in specs])
    upper = np.array([s.upper for s in specs])
    return lower, upper


def sbx_crossover(p1: np.ndarray, p2: np.ndarray, specs: Sequence[VariableSpec],
                  cfg: EvoConfig, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Bounded SBX on one parent pair."""
    lower, upper = _bounds(specs)
    d = len(p1)
    pair_u = rng.random(1)
    u = rng.random((3, 1, d))
    c1, c2 = kernels.sbx_pairs(p1[np.newaxis, :], p2[np.newaxis, :], lower, upper,
                               cfg.eta_c, cfg.p_c, pair_u, u[0], u[1], u[2])
    return c1[0], c2[0]


def polynomial_mutation(x: np.ndarray, specs: Sequence[VariableSpec],
                        cfg: EvoConfig, rng: np.random.Generator) -> np.ndarray:
    lower, upper = _bounds(specs)
    d = len(x)
    p_m = cfg.p_m if cfg.p_m is not None else 1.0 / d
    u = rng.random((2, 1, d))
    out = kernels.polynomial_mutation(x[np.newaxis, :], lower, upper,
                                      cfg.eta_m, p_m, u[0], u[1])
    return out[0]


def _evaluate(problem, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Evaluate a batch; failed rows get cv = +inf and the run continues."""
    n = X.shape[0]
    failures = 0
    batch = getattr(problem, "evaluate_batch", None)
    if batch is not None:
        try:
            F, G = batch(X)
            F = np.asarray(F, dtype=float)
            G = np.asarray(G, dtype=float)
            CV = np.sum(np.maximum(G, 0.0), axis=1) if G.shape[1] else np.zeros(n)
            return F, G, CV, 0
        except Exception:
            pass  # fall through to row-by-row so one bad row doesn't kill the batch
    F = np.empty((n, problem.n_obj))
    G = np.empty((n, problem.n_constraints))
    CV = np.empty(n)
    for i in range(n):
        try:
            f, g = problem.evaluate(X[i])
            F[i] = f
            G[i] = g
            CV[i] = float(np.sum(np.maximum(np.asarray(g, dtype=float), 0.0))) if len(g) else 0.0
        except Exception:
            F[i] = np.inf
            G[i] = np.inf
            CV[i] = np.inf
            failures += 1
    return F, G, CV, failures


def _rank_and_crowd(F: np.ndarray, CV: np.ndarray) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    fronts = fast_nondominated_sort(F, CV)
    rank = np.empty(len(F), dtype=np.int64)
    crowd = np.empty(len(F))
    for r, front in enumerate(fronts):
        rank[front] = r
        crowd[front] = crowding_distance(F[front])
    return rank, crowd, fronts


def init_state(problem, cfg: EvoConfig, rng: Optional[np.random.Generator] = None) -> EvoState:
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    sampler = getattr(problem, "sample_initial", None)
    if sampler is not None:
        X = np.asarray(sampler(rng, cfg.pop_size), dtype=float)
    else:
        lower, upper = _bounds(problem.specs)
        X = lower + rng.random((cfg.pop_size, problem.n_var)) * (upper - lower)
    F, G, CV, failures = _evaluate(problem, X)
    rank, crowd, _ = _rank_and_crowd(F, CV)
    archive = ArchiveStore(problem.n_var, problem.n_obj, cap=cfg.archive_cap)
    archive.update(X, F, CV)
    return EvoState(problem=problem, cfg=cfg, rng=rng, X=X, F=F, G=G, CV=CV,
                    rank=rank, crowd=crowd, tags=[None] * cfg.pop_size,
                    archive=archive, gen=0, fe=cfg.pop_size,
                    eval_failures=failures)


def _tournament(state: EvoState) -> np.ndarray:
    """Binary tournament on (nd_rank, -crowding); pop_size winners."""
    n = state.cfg.pop_size
    picks = state.rng.integers(0, n, size=(n, 2))
    a, b = picks[:, 0], picks[:, 1]
    a_better = (state.rank[a] < state.rank[b]) | (
        (state.rank[a] == state.rank[b]) & (state.crowd[a] > state.crowd[b]))
    return np.where(a_better, a, b)


def step_generation(state: EvoState, offspring_hook: Optional[OffspringHook] = None) -> EvoState:
    """One generation: select, vary, optionally repair, evaluate, survive."""
    cfg = state.cfg
    problem = state.problem
    rng = state.rng
    n = cfg.pop_size
    d = problem.n_var
    lower, upper = _bounds(problem.specs)

    winners = _tournament(state)
    P1 = state.X[winners[0::2]]
    P2 = state.X[winners[1::2]]
    q = n // 2
    pair_u = rng.random(q)
    u = rng.random((3, q, d))
    C1, C2 = kernels.sbx_pairs(P1, P2, lower, upper, cfg.eta_c, cfg.p_c,
                               pair_u, u[0], u[1], u[2])
    offspring = np.empty((n, d))
    offspring[0::2] = C1
    offspring[1::2] = C2
    p_m = cfg.p_m if cfg.p_m is not None else 1.0 / d
    um = rng.random((2, n, d))
    offspring = kernels.polynomial_mutation(offspring, lower, upper, cfg.eta_m,
                                            p_m, um[0], um[1])

    if offspring_hook is not None:
        offspring, off_tags = offspring_hook(offspring, rng)
    else:
        off_tags = [None] * n

    F_off, G_off, CV_off, failures = _evaluate(problem, offspring)
    state.fe += n
    state.eval_failures += failures
    state.archive.update(offspring, F_off, CV_off)

    X_all = np.vstack([state.X, offspring])
    F_all = np.vstack([state.F, F_off])
    G_all = np.vstack([state.G, G_off])
    CV_all = np.concatenate([state.CV, CV_off])
    tags_all = state.tags + off_tags

    rank_all, crowd_all, fronts = _rank_and_crowd(F_all, CV_all)
    chosen: list[int] = []
    for front in fronts:
        if len(chosen) + len(front) <= n:
            chosen.extend(front.tolist())
        else:
            room = n - len(chosen)
            order = np.argsort(-crowd_all[front], kind="stable")
            chosen.extend(front[order[:room]].tolist())
            break
    idx = np.array(chosen, dtype=np.int64)

    state.X = X_all[idx]
    state.F = F_all[idx]
    state.G = G_all[idx]
    state.CV = CV_all[idx]
    state.rank = rank_all[idx]
    state.crowd = crowd_all[idx]
    state.tags = [tags_all[i] for i in idx]
    state.gen += 1
    # which offspring survived, for ensemble survival tallies
    state.survivor_offspring_tags = [tags_all[i] for i in idx if i >= n]  # type: ignore[attr-defined]
    return state


def run_nsga2(problem, cfg: EvoConfig,
              per_gen: Optional[Callable[[EvoState], None]] = None) -> EvoState:
    """Baseline NSGA-II without any knowledge hooks."""
    state = init_state(problem, cfg)
    if per_gen is not None:
        per_gen(state)
    for _ in range(cfg.max_gen):
        step_generation(state)
        if per_gen is not None:
            per_gen(state)
    return state
