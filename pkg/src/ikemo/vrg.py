"""Variable relation graphs: build, select, orient, reduce, traverse-and-repair.

One VRG per variable group.  The selected-rule VRG is undirected and
shared; each offspring gets its own random orientation (a permutation
of the group), the per-kind transitive reduction, and a depth-first
repair traversal that applies rules rank by rank.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .feedback import UserFeedback
from .learning import RuleSet
from .rules import LearningConfig, Rule, RuleKind, VariableGroup, VariableSpec

__all__ = [
    "VRGEdge",
    "VRG",
    "OrientationSequence",
    "RepairLog",
    "build_complete",
    "select_rules",
    "orient",
    "transitive_reduce",
    "apply_feedback",
    "traverse_and_repair",
]

logger = logging.getLogger(__name__)

# dispatch(x, base, target, rule, rng, log) mutates x[target] from x[base]
RepairDispatch = Callable[[np.ndarray, int, int, Rule, np.random.Generator, "RepairLog"], None]


@dataclass
class VRGEdge:
    start: int
    end: int
    rule: Optional[Rule] = None
    edge_rank: int = 1

    def key(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass
class VRG:
    group: VariableGroup
    nodes: set[int]
    edges: list[VRGEdge]
    constant_rules: dict[int, Rule] = field(default_factory=dict)
    directed: bool = False

    @property
    def constant_nodes(self) -> set[int]:
        return set(self.constant_rules)

    def copy(self) -> "VRG":
        return VRG(group=self.group, nodes=set(self.nodes),
                   edges=[VRGEdge(e.start, e.end, e.rule, e.edge_rank) for e in self.edges],
                   constant_rules=dict(self.constant_rules), directed=self.directed)

    def to_json(self) -> dict:
        return {
            "group": self.group.id,
            "constant_nodes": sorted(self.constant_rules),
            "edges": [{"start": e.start, "end": e.end,
                       "kind": e.rule.kind.value if e.rule else None,
                       "rank": e.edge_rank,
                       "score": e.rule.score if e.rule else None}
                      for e in self.edges],
        }


@dataclass(frozen=True)
class OrientationSequence:
    group_id: str
    order: tuple[int, ...]


class RepairLog:
    """Records every applied repair for compliance checks and diagnostics."""

    def __init__(self):
        self.entries: list[dict] = []
        self.clamps = 0
        self.nonfinite = 0

    def record(self, base: int, target: int, rule: Rule, clamped: bool,
               nonfinite: bool = False) -> None:
        self.entries.append({"base": base, "target": target, "rule": rule,
                             "clamped": clamped, "nonfinite": nonfinite})
        if clamped:
            self.clamps += 1
        if nonfinite:
            self.nonfinite += 1


def build_complete(group: VariableGroup) -> VRG:
    """Complete undirected graph over the group: m(m-1)/2 edges."""
    members = sorted(group.members)
    edges = [VRGEdge(start=i, end=j)
             for a, i in enumerate(members) for j in members[a + 1:]]
    return VRG(group=group, nodes=set(members), edges=edges, directed=False)


def _selectable(rule: Rule, cfg: LearningConfig) -> bool:
    if rule.excluded or rule.score < cfg.s_min:
        return False
    if rule.kind is RuleKind.POWER_LAW and abs(rule.b) < cfg.b_min:
        return False  # degenerate exponent; constant-rule path owns this variable
    return True


_KIND_LEX = {RuleKind.POWER_LAW: 0, RuleKind.EQUALITY: 1,
             RuleKind.INEQUALITY_LE: 2, RuleKind.INEQUALITY_GE: 3}


def select_rules(vrg: VRG, rules: RuleSet, cfg: LearningConfig) -> VRG:
    """Keep the best qualifying rule per edge; drop nodes with constant rules.

    A node whose constant rule scores at least s_min is removed from the
    graph (the constant repair is applied separately); an edge keeps the
    best-hierarchy-rank rule with score >= s_min, ties broken by score
    then lexicographically, and is deleted when nothing qualifies.
    """
    if vrg.directed:
        raise ValueError("select_rules expects an undirected VRG")
    out = vrg.copy()

    for rule in rules.constant_rules():
        if rule.i in out.nodes and rule.score >= cfg.s_min and not rule.excluded:
            out.constant_rules[rule.i] = rule
    out.nodes -= set(out.constant_rules)
    out.edges = [e for e in out.edges
                 if e.start in out.nodes and e.end in out.nodes]

    pair_rules: dict[tuple[int, int], list[Rule]] = {}
    for rule in rules.pair_rules():
        key = (min(rule.i, rule.j), max(rule.i, rule.j))
        pair_rules.setdefault(key, []).append(rule)

    kept = []
    for edge in out.edges:
        candidates = [r for r in pair_rules.get(edge.key(), [])
                      if _selectable(r, cfg)]
        if not candidates:
            continue
        best = min(candidates,
                   key=lambda r: (r.rank, -r.score, _KIND_LEX[r.kind], r.i, r.j))
        kept.append(VRGEdge(edge.start, edge.end, rule=best, edge_rank=best.rank))
    out.edges = kept
    return out


def orient(vrg: VRG, seq: OrientationSequence) -> VRG:
    """Direct each edge from the earlier to the later node in the sequence.

    Orientation by a total order cannot create cycles.
    """
    if vrg.directed:
        raise ValueError("orient expects an undirected VRG")
    if seq.group_id != vrg.group.id or set(seq.order) != set(vrg.group.members):
        raise ValueError("orientation sequence must permute the group members")
    pos = {node: k for k, node in enumerate(seq.order)}
    out = vrg.copy()
    out.edges = [e if pos[e.start] < pos[e.end]
                 else VRGEdge(e.end, e.start, e.rule, e.edge_rank)
                 for e in out.edges]
    out.directed = True
    return out


def _closure(adj: np.ndarray) -> np.ndarray:
    reach = adj.copy()
    while True:
        nxt = reach | (reach.astype(np.uint8) @ reach.astype(np.uint8) > 0)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def transitive_reduce(vrg: VRG) -> VRG:
    """Drop edges implied by a longer same-kind path; per-kind reachability kept."""
    if not vrg.directed:
        raise ValueError("transitive_reduce expects a directed VRG")
    nodes = sorted(vrg.nodes)
    pos = {n: k for k, n in enumerate(nodes)}
    m = len(nodes)
    out = vrg.copy()
    kept: list[VRGEdge] = []
    kinds = {e.rule.kind for e in out.edges}
    for kind in kinds:
        sub = [e for e in out.edges if e.rule.kind is kind]
        adj = np.zeros((m, m), dtype=bool)
        for e in sub:
            adj[pos[e.start], pos[e.end]] = True
        reach = _closure(adj)
        if reach.diagonal().any():
            raise RuntimeError("cycle detected in oriented VRG; orientation contract violated")
        redundant = adj & (adj.astype(np.uint8) @ reach.astype(np.uint8) > 0)
        kept.extend(e for e in sub if not redundant[pos[e.start], pos[e.end]])
    out.edges = sorted(kept, key=lambda e: (e.start, e.end, _KIND_LEX[e.rule.kind]))
    return out


def apply_feedback(vrg: VRG, feedback: UserFeedback) -> VRG:
    """Overwrite edge ranks, drop excluded rules, apply specificity filters.

    Unknown rule references are ignored with a warning.  Excluding a
    constant rule disables its repair; the variable rejoins pair rules
    only after the next learning phase.
    """
    out = vrg.copy()
    known = {e.rule.id for e in out.edges if e.rule} | {
        r.id for r in out.constant_rules.values()}
    for rid in list(feedback.rankings) + sorted(feedback.exclusions):
        if rid not in known:
            logger.warning("feedback references unknown rule %s; ignored", rid)

    out.constant_rules = {i: r for i, r in out.constant_rules.items()
                          if r.id not in feedback.exclusions}
    edges = []
    for e in out.edges:
        if e.rule.id in feedback.exclusions:
            continue
        rank = feedback.rankings.get(e.rule.id, e.edge_rank)
        edges.append(VRGEdge(e.start, e.end, replace(e.rule, rank=rank), rank))
    spec = feedback.specificity
    if spec is not None:
        if spec.min_correlation is not None:
            edges = [e for e in edges
                     if abs(e.rule.correlation or 0.0) >= spec.min_correlation]
        if spec.min_score is not None:
            edges = [VRGEdge(e.start, e.end, replace(e.rule, rank=1), 1)
                     for e in edges if e.rule.score >= spec.min_score]
    out.edges = edges
    return out


def traverse_and_repair(x: np.ndarray, vrg: VRG, dispatch: RepairDispatch,
                        rng: np.random.Generator,
                        log: Optional[RepairLog] = None,
                        on_visit=None) -> np.ndarray:
    """Repair a decision vector by walking the oriented, reduced VRG.

    Constant-rule variables are set first, unconditionally.  Then for
    each edge rank in ascending order, a random start node with an edge
    of that rank seeds a depth-first walk: outgoing edges first, then
    incoming, repairing the far node from the current node whenever the
    edge carries the current rank and the far node is unvisited.  Nodes
    are visited at most once per rank pass; extra starts are drawn until
    every node holding an edge of the current rank has been visited.
    """
    if not vrg.directed:
        raise ValueError("traverse_and_repair expects a directed acyclic VRG")
    x = np.array(x, dtype=float, copy=True)
    if log is None:
        log = RepairLog()

    for idx in sorted(vrg.constant_rules):
        rule = vrg.constant_rules[idx]
        x[idx] = rule.kappa
        log.record(base=idx, target=idx, rule=rule, clamped=False)

    if not vrg.edges:
        return x

    outgoing: dict[int, list[VRGEdge]] = {n: [] for n in vrg.nodes}
    incoming: dict[int, list[VRGEdge]] = {n: [] for n in vrg.nodes}
    for e in vrg.edges:
        outgoing[e.start].append(e)
        incoming[e.end].append(e)
    for n in vrg.nodes:
        outgoing[n].sort(key=lambda e: (e.end, _KIND_LEX[e.rule.kind]))
        incoming[n].sort(key=lambda e: (e.start, _KIND_LEX[e.rule.kind]))

    ranks = sorted({e.edge_rank for e in vrg.edges})
    for rank in ranks:
        holders = sorted({n for e in vrg.edges if e.edge_rank == rank
                          for n in (e.start, e.end)})
        visited: set[int] = set()
        visit_count = 0

        def visit(node: int, prev: Optional[int]) -> None:
            nonlocal visit_count
            if node in visited:
                return
            visited.add(node)
            visit_count += 1
            if on_visit is not None:
                on_visit(rank, node)
            for e in outgoing[node]:
                far = e.end
                if far not in visited:
                    if e.edge_rank == rank:
                        dispatch(x, node, far, e.rule, rng, log)
                    visit(far, node)
            for e in incoming[node]:
                far = e.start
                if far not in visited and far != prev:
                    if e.edge_rank == rank:
                        dispatch(x, node, far, e.rule, rng, log)
                    visit(far, node)

        while True:
            unvisited = [n for n in holders if n not in visited]
            if not unvisited:
                break
            start = unvisited[int(rng.integers(len(unvisited)))]
            visit(start, None)
        assert visit_count == len(visited), "node revisited within a rank pass"
    return x
