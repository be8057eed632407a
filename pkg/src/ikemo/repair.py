"""Repair operators: power-law and inequality/equality rewrites, ensembles.

Each rule family has three adherence levels (tight / one-sigma /
loose) plus an adaptive ensemble that mixes them with a no-repair
option, reweighted by offspring survival rates.  The mixed agent runs
the power-law and inequality families side by side, each with its own
adherence policy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .rules import (
    DiagCounters,
    LearningConfig,
    Rule,
    RuleHierarchy,
    RuleKind,
    VariableSpec,
    denormalize,
    normalize,
)
from .vrg import RepairLog

__all__ = [
    "Adherence",
    "RepairAgentKind",
    "EnsembleState",
    "SurvivalTally",
    "RepairAgent",
    "repair_power_law",
    "repair_inequality",
    "ensemble_pick",
    "ensemble_update",
    "make_agent",
]

_NU_DIV_GUARD = 1.0 - 1e-6


class Adherence(enum.Enum):
    RA1 = "ra1"  # tight: learned parameter as-is
    RA2 = "ra2"  # medium: one-sigma normal perturbation
    RA3 = "ra3"  # loose: two-sigma (power law) or uniform (inequality)


NO_REPAIR = "none"
ENSEMBLE_OPTIONS = (Adherence.RA1.value, Adherence.RA2.value,
                    Adherence.RA3.value, NO_REPAIR)


class RepairAgentKind(enum.Enum):
    PL_RA1 = "pl-ra1"
    PL_RA2 = "pl-ra2"
    PL_RA3 = "pl-ra3"
    PL_RA_E = "pl-ra-e"
    IQ_RA1 = "iq-ra1"
    IQ_RA2 = "iq-ra2"
    IQ_RA3 = "iq-ra3"
    IQ_RA_E = "iq-ra-e"
    MIXED_RA2 = "mixed-ra2"
    MIXED_E = "mixed-e"
    NONE = "none"


@dataclass
class EnsembleState:
    """Selection probabilities over repair options, survival-rate adapted."""

    operators: tuple[str, ...] = ENSEMBLE_OPTIONS
    p: np.ndarray = field(default_factory=lambda: np.full(4, 0.25))
    alpha: float = 0.5
    p_min: float = 0.1

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        if len(self.p) != len(self.operators):
            raise ValueError("p must have one entry per operator")
        if abs(self.p.sum() - 1.0) > 1e-9:
            raise ValueError("p must sum to 1")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if not 0.0 < self.p_min < 1.0 / len(self.operators):
            raise ValueError("p_min must be in (0, 1/n_operators)")


@dataclass
class SurvivalTally:
    """Per-option surviving-offspring counts in one generation."""

    n_s: dict[str, int]
    n_off: int


def ensemble_pick(state: EnsembleState, rng: np.random.Generator) -> str:
    """Sample one option proportionally to the current probabilities."""
    idx = int(rng.choice(len(state.operators), p=state.p))
    return state.operators[idx]


def ensemble_update(state: EnsembleState, tally: SurvivalTally) -> EnsembleState:
    """Probability-matching update with a probability floor.

    With no surviving offspring, or no survivor carrying any tag, there
    is no information and the state is returned unchanged.
    """
    if tally.n_off == 0:
        return state
    r = np.array([tally.n_s.get(op, 0) for op in state.operators], dtype=float)
    r /= tally.n_off
    total = r.sum()
    if total == 0.0:
        return state
    raw = np.maximum(state.p_min, state.alpha * r / total + (1.0 - state.alpha) * state.p)
    return replace(state, p=raw / raw.sum())


def _draw_c(rule: Rule, adherence: Adherence, rng: np.random.Generator) -> float:
    if adherence is Adherence.RA1:
        return rule.c
    scale = rule.sigma_c if adherence is Adherence.RA2 else 2.0 * rule.sigma_c
    return float(rng.normal(rule.c, scale))


def repair_power_law(x: np.ndarray, base: int, target: int, rule: Rule,
                     adherence: Adherence, rng: np.random.Generator,
                     specs: Sequence[VariableSpec],
                     log: Optional[RepairLog] = None) -> None:
    """Set x[target] so the pair lies on xh_i * xh_j**b = c_r.

    The traversal may arrive from either endpoint; the same law is
    enforced by solving for whichever variable is the target.  A
    non-finite intermediate leaves the target untouched.
    """
    if abs(rule.b) < 1e-300:
        raise ValueError("degenerate power-law exponent; selection must filter b")
    c_r = _draw_c(rule, adherence, rng)
    xb = normalize(x[base], specs[base])
    try:
        if target == rule.j:
            value = math.pow(c_r / xb, 1.0 / rule.b)
        else:
            value = c_r * math.pow(xb, -rule.b)
    except (ValueError, OverflowError):
        value = math.nan
    if not math.isfinite(value) or c_r <= 0.0:
        if log is not None:
            log.record(base, target, rule, clamped=False, nonfinite=True)
        return
    native = denormalize(value, specs[target])
    lo, hi = specs[target].lower, specs[target].upper
    clamped = native < lo or native > hi
    x[target] = min(hi, max(lo, native))
    if log is not None:
        log.record(base, target, rule, clamped=clamped)


def _draw_nu(mean: float, std: float, adherence: Adherence,
             rng: np.random.Generator) -> float:
    if adherence is Adherence.RA1:
        return mean
    if adherence is Adherence.RA2:
        nu = float(rng.normal(mean, std))
        return max(0.0, nu)
    return float(rng.uniform(0.0, 1.0))


def repair_inequality(x: np.ndarray, base: int, target: int, rule: Rule,
                      adherence: Adherence, rng: np.random.Generator,
                      specs: Sequence[VariableSpec],
                      log: Optional[RepairLog] = None) -> None:
    """Rewrite x[target] to restore an equality or inequality relation.

    For x_i <= x_j the greater side is placed a learned slack fraction
    nu1 into the headroom above x_i; for x_i >= x_j the lesser side is
    recovered by inverting the nu2 slack definition.  When the traversal
    approaches from the other endpoint, the same relation is enforced by
    the algebraic inverse.  Equality rules copy the base value.
    """
    if rule.kind is RuleKind.EQUALITY:
        value = x[base]
    elif rule.kind is RuleKind.INEQUALITY_LE:
        nu = _draw_nu(rule.nu1_mean, rule.nu1_std, adherence, rng)
        upper_i = specs[rule.i].upper
        if target == rule.j:     # base is x_i
            value = x[base] + nu * (upper_i - x[base])
        else:                    # base is x_j, solve the nu1 relation for x_i
            nu = min(nu, _NU_DIV_GUARD)
            value = (x[base] - nu * upper_i) / (1.0 - nu)
    elif rule.kind is RuleKind.INEQUALITY_GE:
        nu = _draw_nu(rule.nu2_mean, rule.nu2_std, adherence, rng)
        upper_i = specs[rule.i].upper
        if target == rule.j:     # base is x_i, invert the nu2 definition
            nu = min(nu, _NU_DIV_GUARD)
            value = (x[base] - nu * upper_i) / (1.0 - nu)
        else:                    # base is x_j
            value = x[base] + nu * (upper_i - x[base])
    else:
        raise ValueError(f"inequality repair cannot handle {rule.kind}")
    lo, hi = specs[target].lower, specs[target].upper
    clamped = value < lo or value > hi
    x[target] = min(hi, max(lo, value))
    if log is not None:
        log.record(base, target, rule, clamped=clamped)


_PL_FAMILY = "pl"
_IQ_FAMILY = "iq"

_FAMILY_OF_KIND = {
    RuleKind.POWER_LAW: _PL_FAMILY,
    RuleKind.EQUALITY: _IQ_FAMILY,
    RuleKind.INEQUALITY_LE: _IQ_FAMILY,
    RuleKind.INEQUALITY_GE: _IQ_FAMILY,
}


@dataclass
class _FamilyPolicy:
    fixed: Optional[Adherence] = None          # fixed adherence, or
    ensemble: Optional[EnsembleState] = None   # adaptive option mixing


class RepairAgent:
    """Routes VRG edges to the right repair operator for one agent kind.

    Ensemble families draw one option per offspring; the chosen options
    are written to the offspring tag so survival rates can be attributed.
    """

    def __init__(self, kind: RepairAgentKind, families: dict[str, _FamilyPolicy],
                 hierarchy: Optional[RuleHierarchy], specs: Sequence[VariableSpec]):
        self.kind = kind
        self.families = families
        self.hierarchy = hierarchy
        self.specs = specs

    @property
    def is_none(self) -> bool:
        return self.kind is RepairAgentKind.NONE

    def pick_options(self, rng: np.random.Generator) -> dict[str, str]:
        """Per-offspring option choice; the returned dict is the op tag."""
        options: dict[str, str] = {}
        for fam, policy in self.families.items():
            if policy.ensemble is not None:
                options[fam] = ensemble_pick(policy.ensemble, rng)
            else:
                options[fam] = policy.fixed.value
        return options

    def make_dispatch(self, options: dict[str, str]):
        """Repair callback for one offspring, honoring its option picks."""
        def dispatch(x: np.ndarray, base: int, target: int, rule: Rule,
                     rng: np.random.Generator, log: RepairLog) -> None:
            family = _FAMILY_OF_KIND.get(rule.kind)
            if family is None:
                raise ValueError(f"no repair family for rule kind {rule.kind}")
            choice = options.get(family)
            if choice is None or choice == NO_REPAIR:
                return
            adherence = Adherence(choice)
            if family == _PL_FAMILY:
                repair_power_law(x, base, target, rule, adherence, rng,
                                 self.specs, log)
            else:
                repair_inequality(x, base, target, rule, adherence, rng,
                                  self.specs, log)
        return dispatch

    def ensemble_states(self) -> dict[str, EnsembleState]:
        return {fam: pol.ensemble for fam, pol in self.families.items()
                if pol.ensemble is not None}

    def update_ensembles(self, tallies: dict[str, SurvivalTally]) -> None:
        for fam, policy in self.families.items():
            if policy.ensemble is not None and fam in tallies:
                policy.ensemble = ensemble_update(policy.ensemble, tallies[fam])


def make_agent(kind: RepairAgentKind, specs: Sequence[VariableSpec],
               alpha: float = 0.5, p_min: float = 0.1) -> RepairAgent:
    def fixed(adh: Adherence) -> _FamilyPolicy:
        return _FamilyPolicy(fixed=adh)

    def ens() -> _FamilyPolicy:
        return _FamilyPolicy(ensemble=EnsembleState(alpha=alpha, p_min=p_min))

    pl = RuleHierarchy.power_law()
    iq = RuleHierarchy.inequality()
    mixed = RuleHierarchy.mixed()
    table = {
        RepairAgentKind.PL_RA1: ({_PL_FAMILY: fixed(Adherence.RA1)}, pl),
        RepairAgentKind.PL_RA2: ({_PL_FAMILY: fixed(Adherence.RA2)}, pl),
        RepairAgentKind.PL_RA3: ({_PL_FAMILY: fixed(Adherence.RA3)}, pl),
        RepairAgentKind.PL_RA_E: ({_PL_FAMILY: ens()}, pl),
        RepairAgentKind.IQ_RA1: ({_IQ_FAMILY: fixed(Adherence.RA1)}, iq),
        RepairAgentKind.IQ_RA2: ({_IQ_FAMILY: fixed(Adherence.RA2)}, iq),
        RepairAgentKind.IQ_RA3: ({_IQ_FAMILY: fixed(Adherence.RA3)}, iq),
        RepairAgentKind.IQ_RA_E: ({_IQ_FAMILY: ens()}, iq),
        RepairAgentKind.MIXED_RA2: ({_PL_FAMILY: fixed(Adherence.RA2),
                                     _IQ_FAMILY: fixed(Adherence.RA2)}, mixed),
        RepairAgentKind.MIXED_E: ({_PL_FAMILY: ens(), _IQ_FAMILY: ens()}, mixed),
        RepairAgentKind.NONE: ({}, None),
    }
    if kind not in table:
        raise ValueError(f"unknown repair agent kind {kind}")
    families, hierarchy = table[kind]
    return RepairAgent(kind, families, hierarchy, specs)
