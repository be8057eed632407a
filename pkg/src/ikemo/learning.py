"""Learning agents: mine scored rules from the non-dominated archive.

Constant rules come from per-variable medians, power laws from ordinary
least squares on log-normalized variables, equality/inequality rules
from satisfaction counts.  ``learn_all`` applies the rule hierarchy:
variables that already follow a constant rule are withdrawn from all
two-variable rules, and equal-rank kinds on the same pair are resolved
by score.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .rules import (
    LearningConfig,
    Rule,
    RuleHierarchy,
    RuleKind,
    VariableGroup,
    VariableSpec,
    _tol_const,
    _tol_pair,
)

__all__ = [
    "NDArchive",
    "PowerLawFit",
    "RuleSet",
    "DegenerateRegressorError",
    "learn_constant",
    "learn_power_law",
    "learn_pairwise",
    "learn_all",
    "pearson_correlation",
]

_TINY = 1e-12


class DegenerateRegressorError(ValueError):
    """The regressor variable has zero variance; the pair is skipped."""


@dataclass
class NDArchive:
    """Snapshot of the non-dominated decision vectors used for learning."""

    X: np.ndarray  # (n_solutions, n_var)
    specs: tuple[VariableSpec, ...]

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim != 2:
            raise ValueError("archive X must be 2-D (solutions x variables)")

    def __len__(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True)
class PowerLawFit:
    b: float
    c: float
    r2: float
    sigma_c: float


@dataclass
class RuleSet:
    """All rules learned in one phase, plus provenance metadata."""

    rules: list[Rule]
    generation: int = 0
    fe_count: int = 0
    archive_size: int = 0

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def by_id(self) -> dict[str, Rule]:
        return {r.id: r for r in self.rules}

    def constant_rules(self) -> list[Rule]:
        return [r for r in self.rules if r.kind is RuleKind.CONSTANT]

    def pair_rules(self) -> list[Rule]:
        return [r for r in self.rules if r.kind is not RuleKind.CONSTANT]

    def to_json(self) -> dict:
        return {
            "rules": [r.to_json() for r in self.rules],
            "generation": self.generation,
            "fe_count": self.fe_count,
            "archive_size": self.archive_size,
        }

    @staticmethod
    def from_json(d: dict) -> "RuleSet":
        return RuleSet(
            rules=[Rule.from_json(r) for r in d["rules"]],
            generation=d.get("generation", 0),
            fe_count=d.get("fe_count", 0),
            archive_size=d.get("archive_size", 0),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _log_normalized(col: np.ndarray, spec: VariableSpec) -> np.ndarray:
    t = (col - spec.lower) / (spec.upper - spec.lower)
    t = np.clip(t, 0.0, 1.0)
    return np.log1p(t)  # log(1 + t) == log of the [1,2]-mapped value


def learn_constant(archive: NDArchive, i: int, cfg: LearningConfig,
                   rank: int = 1) -> Rule:
    """Median-based constant rule for variable i.

    The score is the fraction of archive members within rho of the
    median; the rule is returned regardless of score (selection against
    s_min happens during VRG construction).
    """
    col = archive.X[:, i]
    kappa = float(np.median(col))
    tol = _tol_const(cfg, archive.specs, i)
    score = float(np.mean(np.abs(col - kappa) <= tol))
    return Rule(kind=RuleKind.CONSTANT, i=i, kappa=kappa, score=score, rank=rank)


def learn_power_law(archive: NDArchive, i: int, j: int,
                    cfg: LearningConfig) -> PowerLawFit:
    """OLS fit of log xh_i = beta log xh_j + eps, on [1,2]-normalized data.

    Returns b = -beta, c = exp(eps), the training-set coefficient of
    determination, and the spread of per-solution c values
    xh_i * xh_j**b.
    """
    if i == j:
        raise ValueError("power law needs two distinct variables")
    li = _log_normalized(archive.X[:, i], archive.specs[i])
    lj = _log_normalized(archive.X[:, j], archive.specs[j])
    mu_i, mu_j = float(np.mean(li)), float(np.mean(lj))
    sjj = float(np.sum((lj - mu_j) ** 2))
    if sjj <= _TINY:
        raise DegenerateRegressorError(
            f"variable {j} has no variance in log-normalized space")
    sij = float(np.sum((li - mu_i) * (lj - mu_j)))
    sii = float(np.sum((li - mu_i) ** 2))
    beta = sij / sjj
    eps = mu_i - beta * mu_j
    ss_res = sii - beta * sij
    if sii <= _TINY:
        r2 = 1.0 if abs(ss_res) <= _TINY else 0.0
    else:
        r2 = 1.0 - ss_res / sii
    b = -beta
    c = math.exp(eps)
    cs = np.exp(li + b * lj)
    return PowerLawFit(b=b, c=c, r2=min(1.0, r2), sigma_c=float(np.std(cs)))


def _masked_moments(values: np.ndarray, mask: np.ndarray) -> tuple[float, float]:
    # population mean/std over the masked entries; (0, 0) if all skipped
    n = int(np.count_nonzero(mask))
    if n == 0:
        return 0.0, 0.0
    v = values[mask]
    m = float(np.mean(v))
    return m, float(np.std(v))


def learn_pairwise(archive: NDArchive, i: int, j: int,
                   cfg: LearningConfig) -> dict[RuleKind, Rule]:
    """Equality and both inequality rules for the pair (i, j).

    Inequality rules also carry the slack-fraction statistics used by
    the inequality repair operators:

        nu1 = (x_j - x_i) / (xU_i - x_i)   over solutions with x_i < xU_i
        nu2 = (x_i - x_j) / (xU_i - x_j)   over solutions with x_j < xU_i
    """
    if i == j:
        raise ValueError("pairwise rules need two distinct variables")
    xi = archive.X[:, i]
    xj = archive.X[:, j]
    n = len(archive)
    eps = _tol_pair(cfg, archive.specs, i, j)
    eq_score = float(np.mean(np.abs(xi - xj) <= eps)) if n else 0.0
    le_score = float(np.mean(xi <= xj)) if n else 0.0
    ge_score = float(np.mean(xi >= xj)) if n else 0.0

    upper_i = archive.specs[i].upper
    d1 = upper_i - xi
    nu1_mean, nu1_std = _masked_moments(
        np.divide(xj - xi, d1, out=np.zeros_like(d1), where=d1 > _TINY),
        d1 > _TINY)
    d2 = upper_i - xj
    nu2_mean, nu2_std = _masked_moments(
        np.divide(xi - xj, d2, out=np.zeros_like(d2), where=d2 > _TINY),
        d2 > _TINY)

    corr, _ = pearson_correlation(archive, i, j) if n >= 2 else (0.0, True)
    nu = dict(nu1_mean=nu1_mean, nu1_std=nu1_std,
              nu2_mean=nu2_mean, nu2_std=nu2_std)
    return {
        RuleKind.EQUALITY: Rule(kind=RuleKind.EQUALITY, i=i, j=j,
                                score=eq_score, correlation=corr),
        RuleKind.INEQUALITY_LE: Rule(kind=RuleKind.INEQUALITY_LE, i=i, j=j,
                                     score=le_score, correlation=corr, **nu),
        RuleKind.INEQUALITY_GE: Rule(kind=RuleKind.INEQUALITY_GE, i=i, j=j,
                                     score=ge_score, correlation=corr, **nu),
    }


def pearson_correlation(archive: NDArchive, i: int, j: int) -> tuple[float, bool]:
    """Sample Pearson coefficient; (0, True) when either variable is flat."""
    xi = archive.X[:, i]
    xj = archive.X[:, j]
    di = xi - xi.mean()
    dj = xj - xj.mean()
    sii = float(np.sum(di * di))
    sjj = float(np.sum(dj * dj))
    if sii <= _TINY or sjj <= _TINY:
        return 0.0, True
    r = float(np.sum(di * dj) / math.sqrt(sii * sjj))
    return max(-1.0, min(1.0, r)), False


_KIND_ORDER = {RuleKind.POWER_LAW: 0, RuleKind.EQUALITY: 1,
               RuleKind.INEQUALITY_LE: 2, RuleKind.INEQUALITY_GE: 3}


def learn_all(archive: NDArchive, groups: Sequence[VariableGroup],
              hierarchy: RuleHierarchy, cfg: LearningConfig,
              generation: int = 0, fe_count: int = 0) -> RuleSet:
    """Mine the full rule set for every group under the given hierarchy.

    Constant rules are learned first; any variable whose constant score
    reaches s_min is withdrawn from all two-variable rules.  For each
    remaining intra-group pair, one rule per hierarchy rank level is
    kept (the highest-scoring kind among equal-rank candidates).  No
    s_min filtering is applied to the returned pair rules; that happens
    at VRG construction.
    """
    rules: list[Rule] = []
    n = len(archive)
    if n == 0:
        return RuleSet([], generation, fe_count, 0)

    for group in groups:
        members = list(group.members)
        const_rank = hierarchy.rank_of(RuleKind.CONSTANT) if RuleKind.CONSTANT in hierarchy else 1
        constant_ok: set[int] = set()
        for i in members:
            r = learn_constant(archive, i, cfg, rank=const_rank)
            rules.append(r)
            if r.score >= cfg.s_min:
                constant_ok.add(i)

        active = [i for i in members if i not in constant_ok]
        if n < 2 or len(active) < 2:
            continue
        rules.extend(_learn_group_pairs(archive, active, hierarchy, cfg))

    return RuleSet(rules, generation, fe_count, n)


def _learn_group_pairs(archive: NDArchive, active: list[int],
                       hierarchy: RuleHierarchy, cfg: LearningConfig) -> list[Rule]:
    """Vectorized pair learning over one group's non-constant variables."""
    X = archive.X
    specs = archive.specs
    m = len(active)
    A = X[:, active]
    n = A.shape[0]
    kinds_by_rank = hierarchy.pair_kinds_by_rank()
    need_pl = any(RuleKind.POWER_LAW in ks for _, ks in kinds_by_rank)
    need_iq = any(k in ks for _, ks in kinds_by_rank
                  for k in (RuleKind.EQUALITY, RuleKind.INEQUALITY_LE, RuleKind.INEQUALITY_GE))

    # correlations for the specificity filter, shared by every pair rule
    Ac = A - A.mean(axis=0)
    ss = np.sum(Ac * Ac, axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = (Ac.T @ Ac) / np.sqrt(np.outer(ss, ss))
    corr = np.clip(np.nan_to_num(corr, nan=0.0), -1.0, 1.0)

    if need_pl:
        L = np.empty_like(A)
        for k, idx in enumerate(active):
            L[:, k] = _log_normalized(A[:, k], specs[idx])
        mu = L.mean(axis=0)
        Lc = L - mu
        S = Lc.T @ Lc
        diag = np.diag(S).copy()
        with np.errstate(invalid="ignore", divide="ignore"):
            beta = S / diag[np.newaxis, :]        # beta[i,j]: regress i on j
            r2 = (S * S) / np.outer(diag, diag)
        b_mat = -beta
        # wild exponents from junk pairs can overflow exp; cap those stats,
        # selection never admits such rules (their r2 is far below s_min)
        with np.errstate(over="ignore", invalid="ignore"):
            c_mat = np.exp(np.minimum(mu[:, np.newaxis] - beta * mu[np.newaxis, :], 500.0))
            sigma_c = np.empty((m, m))
            for a in range(m):
                cs = np.exp(np.minimum(L[:, a][:, np.newaxis]
                                       + b_mat[a, :][np.newaxis, :] * L, 500.0))
                sigma_c[a, :] = np.std(cs, axis=0)
        c_mat = np.nan_to_num(c_mat, nan=0.0, posinf=1e300)
        sigma_c = np.nan_to_num(sigma_c, nan=0.0, posinf=1e300)

    if need_iq:
        eps_mat = np.array([[_tol_pair(cfg, specs, active[a], active[b])
                             for b in range(m)] for a in range(m)])
        eq_frac = np.empty((m, m))
        le_frac = np.empty((m, m))
        ge_frac = np.empty((m, m))
        nu1_mean = np.empty((m, m)); nu1_std = np.empty((m, m))
        nu2_mean = np.empty((m, m)); nu2_std = np.empty((m, m))
        uppers = np.array([specs[i].upper for i in active])
        for a in range(m):
            diff = A - A[:, a][:, np.newaxis]     # x_j - x_i for all j
            eq_frac[a, :] = np.mean(np.abs(diff) <= eps_mat[a, :][np.newaxis, :], axis=0)
            le_frac[a, :] = np.mean(diff >= 0.0, axis=0)
            ge_frac[a, :] = np.mean(diff <= 0.0, axis=0)
            d1 = uppers[a] - A[:, a]              # xU_i - x_i, shared by all j
            m1 = d1 > _TINY
            with np.errstate(invalid="ignore", divide="ignore"):
                nu1 = np.where(m1[:, np.newaxis], diff / d1[:, np.newaxis], 0.0)
            cnt1 = np.count_nonzero(m1)
            if cnt1:
                s1 = np.sum(nu1, axis=0) / cnt1
                nu1_mean[a, :] = s1
                nu1_std[a, :] = np.sqrt(
                    np.sum(np.where(m1[:, np.newaxis], (nu1 - s1[np.newaxis, :]) ** 2, 0.0),
                           axis=0) / cnt1)
            else:
                nu1_mean[a, :] = 0.0
                nu1_std[a, :] = 0.0
            d2 = uppers[a] - A                    # xU_i - x_j, per j
            m2 = d2 > _TINY
            cnt2 = np.count_nonzero(m2, axis=0)
            with np.errstate(invalid="ignore", divide="ignore"):
                nu2 = np.where(m2, -diff / d2, 0.0)
                s2 = np.where(cnt2 > 0, np.sum(nu2, axis=0) / np.maximum(cnt2, 1), 0.0)
                v2 = np.where(cnt2 > 0,
                              np.sum(np.where(m2, (nu2 - s2[np.newaxis, :]) ** 2, 0.0),
                                     axis=0) / np.maximum(cnt2, 1), 0.0)
            nu2_mean[a, :] = s2
            nu2_std[a, :] = np.sqrt(v2)

    rules: list[Rule] = []
    for a in range(m):
        for bidx in range(a + 1, m):
            i, j = active[a], active[bidx]
            cr = float(corr[a, bidx])
            for rank, kinds in kinds_by_rank:
                best: Rule | None = None
                for kind in kinds:
                    cand = None
                    if kind is RuleKind.POWER_LAW:
                        if S[bidx, bidx] <= _TINY:   # degenerate regressor; skip pair
                            continue
                        sii = diag[a]
                        ss_res = sii - beta[a, bidx] * S[a, bidx]
                        score = (1.0 if abs(ss_res) <= _TINY else 0.0) if sii <= _TINY \
                            else 1.0 - ss_res / sii
                        cand = Rule(kind=kind, i=i, j=j, b=float(b_mat[a, bidx]),
                                    c=float(c_mat[a, bidx]),
                                    sigma_c=float(sigma_c[a, bidx]),
                                    score=min(1.0, max(0.0, score)),
                                    correlation=cr, rank=rank)
                    elif kind is RuleKind.EQUALITY:
                        cand = Rule(kind=kind, i=i, j=j,
                                    score=float(eq_frac[a, bidx]),
                                    correlation=cr, rank=rank)
                    elif kind is RuleKind.INEQUALITY_LE:
                        cand = Rule(kind=kind, i=i, j=j,
                                    score=float(le_frac[a, bidx]),
                                    nu1_mean=float(nu1_mean[a, bidx]),
                                    nu1_std=float(nu1_std[a, bidx]),
                                    nu2_mean=float(nu2_mean[a, bidx]),
                                    nu2_std=float(nu2_std[a, bidx]),
                                    correlation=cr, rank=rank)
                    elif kind is RuleKind.INEQUALITY_GE:
                        cand = Rule(kind=kind, i=i, j=j,
                                    score=float(ge_frac[a, bidx]),
                                    nu1_mean=float(nu1_mean[a, bidx]),
                                    nu1_std=float(nu1_std[a, bidx]),
                                    nu2_mean=float(nu2_mean[a, bidx]),
                                    nu2_std=float(nu2_std[a, bidx]),
                                    correlation=cr, rank=rank)
                    if cand is None:
                        continue
                    if best is None or (cand.score, -_KIND_ORDER[cand.kind]) > (
                            best.score, -_KIND_ORDER[best.kind]):
                        best = cand
                if best is not None:
                    rules.append(best)
    return rules
