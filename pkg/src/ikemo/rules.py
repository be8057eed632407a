"""Rule model: variable specs, rule records, satisfaction predicates, hierarchies.

A rule is a simple algebraic relationship over one or two decision
variables, mined from non-dominated solutions:

    constant     x_i = kappa
    power law    xh_i * xh_j**b = c      (xh = variable mapped to [1, 2])
    equality     x_i = x_j
    inequality   x_i <= x_j  or  x_i >= x_j

Each rule carries a score in [0, 1] measuring how well the current
non-dominated set follows it, and a rank used to order repairs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

__all__ = [
    "VariableSpec",
    "VariableGroup",
    "RuleKind",
    "Rule",
    "RuleHierarchy",
    "LearningConfig",
    "DiagCounters",
    "DegenerateExponentError",
    "normalize",
    "denormalize",
    "normalize01",
    "is_satisfied",
    "rule_id",
]


@dataclass(frozen=True)
class VariableSpec:
    """One decision variable: 0-based index, box bounds, display name."""

    index: int
    lower: float
    upper: float
    name: str = ""

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"variable {self.index}: lower must be < upper")


@dataclass(frozen=True)
class VariableGroup:
    """A set of variable indices the user believes may be related."""

    id: str
    members: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise ValueError(f"group {self.id}: members must be distinct")


class RuleKind(enum.Enum):
    CONSTANT = "constant"
    POWER_LAW = "power_law"
    EQUALITY = "equality"
    INEQUALITY_LE = "inequality_le"  # x_i <= x_j
    INEQUALITY_GE = "inequality_ge"  # x_i >= x_j


PAIR_KINDS = (RuleKind.POWER_LAW, RuleKind.EQUALITY, RuleKind.INEQUALITY_LE, RuleKind.INEQUALITY_GE)


@dataclass(frozen=True)
class Rule:
    """A mined relationship with its fitted parameters and score.

    ``j`` is absent for constant rules.  Power-law rules store (b, c,
    sigma_c); inequality rules store slack-fraction statistics
    (nu1/nu2 means and stds, see the inequality repair operators).
    """

    kind: RuleKind
    i: int
    j: Optional[int] = None
    kappa: Optional[float] = None
    b: Optional[float] = None
    c: Optional[float] = None
    sigma_c: Optional[float] = None
    nu1_mean: Optional[float] = None
    nu1_std: Optional[float] = None
    nu2_mean: Optional[float] = None
    nu2_std: Optional[float] = None
    correlation: Optional[float] = None
    score: float = 0.0
    rank: int = 1
    excluded: bool = False

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0,1], got {self.score}")
        if self.j is not None and self.i == self.j:
            raise ValueError("two-variable rule needs i != j")
        if self.rank < 1:
            raise ValueError("rank must be a positive integer")

    @property
    def id(self) -> str:
        return rule_id(self.kind, self.i, self.j)

    def with_rank(self, rank: int) -> "Rule":
        return replace(self, rank=rank)

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "i": self.i, "score": self.score,
               "rank": self.rank, "excluded": self.excluded, "id": self.id}
        for name in ("j", "kappa", "b", "c", "sigma_c", "correlation"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        if self.nu1_mean is not None:
            out["nu_stats"] = {"nu1_mean": self.nu1_mean, "nu1_std": self.nu1_std,
                               "nu2_mean": self.nu2_mean, "nu2_std": self.nu2_std}
        return out

    @staticmethod
    def from_json(d: dict) -> "Rule":
        nu = d.get("nu_stats") or {}
        return Rule(
            kind=RuleKind(d["kind"]), i=d["i"], j=d.get("j"),
            kappa=d.get("kappa"), b=d.get("b"), c=d.get("c"),
            sigma_c=d.get("sigma_c"),
            nu1_mean=nu.get("nu1_mean"), nu1_std=nu.get("nu1_std"),
            nu2_mean=nu.get("nu2_mean"), nu2_std=nu.get("nu2_std"),
            correlation=d.get("correlation"),
            score=d["score"], rank=d.get("rank", 1),
            excluded=d.get("excluded", False),
        )


def rule_id(kind: RuleKind, i: int, j: Optional[int] = None) -> str:
    """Structural identity of a rule: kind plus the variables it touches.

    This is what survives across learning phases, so user feedback given
    on an old rule set can be matched against freshly learned rules.
    """
    short = {RuleKind.CONSTANT: "const", RuleKind.POWER_LAW: "pl",
             RuleKind.EQUALITY: "eq", RuleKind.INEQUALITY_LE: "le",
             RuleKind.INEQUALITY_GE: "ge"}[kind]
    return f"{short}:{i}" if j is None else f"{short}:{i}-{j}"


class RuleHierarchy:
    """Rank per rule kind; rank 1 is checked/repaired first.

    The three stock hierarchies match the repair-agent families:
    power-law agents see constants then power laws; inequality agents
    see constants, equalities, then both inequality directions; the
    mixed agent ranks every two-variable kind equally and lets the
    score decide.
    """

    def __init__(self, ranks: dict[RuleKind, int]):
        if any(r < 1 for r in ranks.values()):
            raise ValueError("hierarchy ranks must be positive")
        self.ranks = dict(ranks)

    def __contains__(self, kind: RuleKind) -> bool:
        return kind in self.ranks

    def rank_of(self, kind: RuleKind) -> int:
        return self.ranks[kind]

    def pair_kinds_by_rank(self) -> list[tuple[int, list[RuleKind]]]:
        """Two-variable kinds grouped by rank, best rank first."""
        by_rank: dict[int, list[RuleKind]] = {}
        for kind in PAIR_KINDS:
            if kind in self.ranks:
                by_rank.setdefault(self.ranks[kind], []).append(kind)
        return sorted(by_rank.items())

    @classmethod
    def power_law(cls) -> "RuleHierarchy":
        return cls({RuleKind.CONSTANT: 1, RuleKind.POWER_LAW: 2})

    @classmethod
    def inequality(cls) -> "RuleHierarchy":
        return cls({RuleKind.CONSTANT: 1, RuleKind.EQUALITY: 2,
                    RuleKind.INEQUALITY_LE: 3, RuleKind.INEQUALITY_GE: 3})

    @classmethod
    def mixed(cls) -> "RuleHierarchy":
        return cls({RuleKind.CONSTANT: 1, RuleKind.POWER_LAW: 2,
                    RuleKind.EQUALITY: 2, RuleKind.INEQUALITY_LE: 2,
                    RuleKind.INEQUALITY_GE: 2})


@dataclass
class LearningConfig:
    """Tolerances and thresholds for rule mining and satisfaction.

    ``rho`` may be a scalar or one value per variable.  With
    ``normalized_tolerances`` set, rho and eps_eq are interpreted in
    [0,1]-scaled variable space instead of native units.
    """

    rho: float | Sequence[float] = 0.1
    eps_eq: float = 0.1
    e_min: float = 0.01
    s_min: float = 0.7
    b_min: float = 1e-3
    normalized_tolerances: bool = False

    def __post_init__(self):
        rhos = [self.rho] if isinstance(self.rho, (int, float)) else list(self.rho)
        if any(r <= 0 for r in rhos) or self.eps_eq <= 0 or self.e_min <= 0:
            raise ValueError("tolerances must be positive")
        if not 0.0 < self.s_min <= 1.0:
            raise ValueError("s_min must be in (0, 1]")

    def rho_for(self, index: int) -> float:
        if isinstance(self.rho, (int, float)):
            return float(self.rho)
        return float(self.rho[index])


@dataclass
class DiagCounters:
    """Counters for clamped / degenerate events during normalize and repair."""

    normalize_clamps: int = 0
    repair_clamps: int = 0
    nonfinite_repairs: int = 0

    def reset(self):
        self.normalize_clamps = 0
        self.repair_clamps = 0
        self.nonfinite_repairs = 0


class DegenerateExponentError(ValueError):
    """Power-law exponent too close to zero for c**(1/b) to be meaningful."""


def normalize(value: float, spec: VariableSpec, diag: DiagCounters | None = None) -> float:
    """Map a variable value to [1, 2] so logs stay positive and finite.

    Out-of-bounds inputs are clamped (SBX/mutation already bound-clip,
    so a clamp here only happens on caller error or round-off) and
    counted on ``diag``.
    """
    t = (value - spec.lower) / (spec.upper - spec.lower)
    if t < 0.0 or t > 1.0:
        if diag is not None:
            diag.normalize_clamps += 1
        t = min(1.0, max(0.0, t))
    return 1.0 + t


def denormalize(xhat: float, spec: VariableSpec) -> float:
    return spec.lower + (xhat - 1.0) * (spec.upper - spec.lower)


def normalize01(value: float, spec: VariableSpec) -> float:
    return (value - spec.lower) / (spec.upper - spec.lower)


def _tol_pair(cfg: LearningConfig, specs: Sequence[VariableSpec], i: int, j: int) -> float:
    # equality tolerance in native units; scaled mode uses the i-range
    if cfg.normalized_tolerances:
        return cfg.eps_eq * (specs[i].upper - specs[i].lower)
    return cfg.eps_eq


def _tol_const(cfg: LearningConfig, specs: Sequence[VariableSpec], i: int) -> float:
    if cfg.normalized_tolerances:
        return cfg.rho_for(i) * (specs[i].upper - specs[i].lower)
    return cfg.rho_for(i)


def is_satisfied(rule: Rule, x: Sequence[float], specs: Sequence[VariableSpec],
                 cfg: LearningConfig) -> bool:
    """Whether a decision vector follows the rule, per-kind tolerance applied."""
    if rule.kind is RuleKind.CONSTANT:
        return abs(x[rule.i] - rule.kappa) <= _tol_const(cfg, specs, rule.i)
    if rule.kind is RuleKind.POWER_LAW:
        if abs(rule.b) < cfg.b_min:
            raise DegenerateExponentError(
                f"power law {rule.id} has |b|={abs(rule.b):.2e} < b_min={cfg.b_min}")
        xi = normalize(x[rule.i], specs[rule.i])
        xj = normalize(x[rule.j], specs[rule.j])
        predicted = (rule.c / xi) ** (1.0 / rule.b)
        if not math.isfinite(predicted):
            return False
        return (xj - predicted) ** 2 <= cfg.e_min
    if rule.kind is RuleKind.EQUALITY:
        return abs(x[rule.i] - x[rule.j]) <= _tol_pair(cfg, specs, rule.i, rule.j)
    if rule.kind is RuleKind.INEQUALITY_LE:
        return x[rule.i] <= x[rule.j]
    if rule.kind is RuleKind.INEQUALITY_GE:
        return x[rule.i] >= x[rule.j]
    raise ValueError(f"unknown rule kind {rule.kind}")
