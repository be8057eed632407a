"""User feedback on learned rules: rankings, exclusions, specificity filters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

__all__ = ["SpecificityFilter", "UserFeedback"]


@dataclass(frozen=True)
class SpecificityFilter:
    """Predicate-style feedback: keep rules meeting the thresholds.

    ``min_score`` promotes qualifying rules to rank 1 and excludes the
    rest; ``min_correlation`` drops rules whose variable pair is not
    correlated strongly enough.
    """

    min_score: Optional[float] = None
    min_correlation: Optional[float] = None


@dataclass
class UserFeedback:
    """One round of decision-maker feedback, keyed by structural rule id."""

    rankings: dict[str, int] = field(default_factory=dict)
    exclusions: set[str] = field(default_factory=set)
    specificity: Optional[SpecificityFilter] = None

    def __post_init__(self):
        bad = [rid for rid, rank in self.rankings.items() if rank < 1]
        if bad:
            raise ValueError(f"ranks must be positive integers, got {bad}")
        overlap = set(self.rankings) & self.exclusions
        if overlap:
            raise ValueError(f"rules both ranked and excluded: {sorted(overlap)}")

    def is_empty(self) -> bool:
        return not self.rankings and not self.exclusions and self.specificity is None

    def to_json(self) -> dict:
        out: dict = {"rankings": dict(self.rankings),
                     "exclusions": sorted(self.exclusions)}
        if self.specificity is not None:
            spec = {}
            if self.specificity.min_score is not None:
                spec["min_score"] = self.specificity.min_score
            if self.specificity.min_correlation is not None:
                spec["min_correlation"] = self.specificity.min_correlation
            out["specificity"] = spec
        return out

    @staticmethod
    def from_json(d: dict) -> "UserFeedback":
        spec = None
        if d.get("specificity") is not None:
            spec = SpecificityFilter(
                min_score=d["specificity"].get("min_score"),
                min_correlation=d["specificity"].get("min_correlation"))
        return UserFeedback(rankings={k: int(v) for k, v in d.get("rankings", {}).items()},
                            exclusions=set(d.get("exclusions", [])),
                            specificity=spec)
