import numpy as np
import pytest

from ikemo.feedback import SpecificityFilter, UserFeedback
from ikemo.learning import RuleSet
from ikemo.repair import Adherence, repair_power_law
from ikemo.rules import LearningConfig, Rule, RuleKind, VariableGroup, VariableSpec, is_satisfied
from ikemo.vrg import (
    VRG,
    OrientationSequence,
    RepairLog,
    VRGEdge,
    apply_feedback,
    build_complete,
    orient,
    select_rules,
    transitive_reduce,
    traverse_and_repair,
)

CFG = LearningConfig(rho=0.1, eps_eq=0.1, e_min=0.01, s_min=0.7)


def pl(i, j, score=0.9, b=-1.0, c=1.0, rank=2, **kw):
    return Rule(RuleKind.POWER_LAW, i, j, b=b, c=c, sigma_c=kw.pop("sigma_c", 0.0),
                score=score, rank=rank, **kw)


def iq(i, j, score=0.9, rank=3, kind=RuleKind.INEQUALITY_LE):
    return Rule(kind, i, j, nu1_mean=0.2, nu1_std=0.0, nu2_mean=0.2, nu2_std=0.0,
                score=score, rank=rank)


class TestBuild:
    @pytest.mark.parametrize("size,edges", [(5, 10), (1, 0), (2, 1)])
    def test_complete_edge_counts(self, size, edges):
        vrg = build_complete(VariableGroup("g", tuple(range(size))))
        assert len(vrg.edges) == edges
        assert not vrg.directed


class TestSelect:
    def test_constant_node_removed(self):
        vrg = build_complete(VariableGroup("g", (0, 1, 2)))
        rules = RuleSet([Rule(RuleKind.CONSTANT, 2, kappa=3.0, score=0.95),
                         pl(0, 1, score=0.9)])
        out = select_rules(vrg, rules, CFG)
        assert out.constant_nodes == {2}
        assert {e.key() for e in out.edges} == {(0, 1)}

    def test_low_power_law_high_inequality_keeps_inequality(self):
        vrg = build_complete(VariableGroup("g", (5, 9)))
        rules = RuleSet([pl(5, 9, score=0.4), iq(5, 9, score=0.85)])
        out = select_rules(vrg, rules, CFG)
        assert len(out.edges) == 1
        assert out.edges[0].rule.kind is RuleKind.INEQUALITY_LE

    def test_all_below_threshold_gives_edgeless_graph(self):
        vrg = build_complete(VariableGroup("g", (0, 1, 2)))
        rules = RuleSet([pl(0, 1, score=0.5), pl(0, 2, score=0.3), iq(1, 2, score=0.6)])
        out = select_rules(vrg, rules, CFG)
        assert out.edges == []

    def test_hierarchy_rank_preferred_then_score(self):
        vrg = build_complete(VariableGroup("g", (0, 1)))
        rules = RuleSet([iq(0, 1, score=0.99, rank=3), pl(0, 1, score=0.75, rank=2)])
        out = select_rules(vrg, rules, CFG)
        assert out.edges[0].rule.kind is RuleKind.POWER_LAW  # better hierarchy rank
        rules2 = RuleSet([iq(0, 1, score=0.99, rank=3,
                             kind=RuleKind.INEQUALITY_GE),
                          iq(0, 1, score=0.8, rank=3)])
        out2 = select_rules(vrg, rules2, CFG)
        assert out2.edges[0].rule.kind is RuleKind.INEQUALITY_GE  # score breaks tie

    def test_degenerate_exponent_filtered(self):
        vrg = build_complete(VariableGroup("g", (0, 1)))
        rules = RuleSet([pl(0, 1, score=0.99, b=1e-6)])
        out = select_rules(vrg, rules, CFG)
        assert out.edges == []

    def test_excluded_rules_not_selectable(self):
        vrg = build_complete(VariableGroup("g", (0, 1)))
        rules = RuleSet([Rule(RuleKind.POWER_LAW, 0, 1, b=-1.0, c=1.0, sigma_c=0.0,
                              score=0.9, rank=2, excluded=True)])
        assert select_rules(vrg, rules, CFG).edges == []


class TestOrient:
    def test_sequence_direction(self):
        vrg = build_complete(VariableGroup("g1", (1, 2, 3, 6)))
        rules = RuleSet([pl(i, j) for i, j in [(1, 2), (1, 3), (1, 6), (2, 3), (2, 6), (3, 6)]])
        selected = select_rules(vrg, rules, CFG)
        seq = OrientationSequence("g1", (2, 1, 3, 6))
        directed = orient(selected, seq)
        edge = next(e for e in directed.edges if {e.start, e.end} == {1, 2})
        assert (edge.start, edge.end) == (2, 1)

    def test_two_node_orientation(self):
        vrg = select_rules(build_complete(VariableGroup("g", (4, 7))),
                           RuleSet([pl(4, 7)]), CFG)
        directed = orient(vrg, OrientationSequence("g", (4, 7)))
        assert (directed.edges[0].start, directed.edges[0].end) == (4, 7)

    def test_complete_graph_acyclic_for_every_permutation(self):
        import itertools
        members = (0, 1, 2, 3)
        vrg = build_complete(VariableGroup("g", members))
        rules = RuleSet([pl(i, j) for i, j in itertools.combinations(members, 2)])
        selected = select_rules(vrg, rules, CFG)
        for perm in itertools.permutations(members):
            directed = orient(selected, OrientationSequence("g", perm))
            transitive_reduce(directed)  # raises on a cycle

    def test_bad_sequence_rejected(self):
        vrg = build_complete(VariableGroup("g", (0, 1)))
        with pytest.raises(ValueError):
            orient(vrg, OrientationSequence("g", (0, 2)))


def _directed_vrg(edges, members=None, kinds=None):
    nodes = members or sorted({n for e in edges for n in e})
    kinds = kinds or [RuleKind.POWER_LAW] * len(edges)
    vrg = VRG(group=VariableGroup("g", tuple(nodes)), nodes=set(nodes),
              edges=[VRGEdge(s, t, pl(s, t) if k is RuleKind.POWER_LAW
                             else iq(s, t, kind=k, rank=2), 1)
                     for (s, t), k in zip(edges, kinds)],
              directed=True)
    return vrg


def _reach(edges, nodes):
    reach = {n: {n} for n in nodes}
    changed = True
    while changed:
        changed = False
        for s, t in edges:
            new = reach[t] - reach[s]
            if new:
                reach[s] |= new
                changed = True
    return {n: reach[n] - {n} for n in nodes}


class TestReduce:
    def test_triangle_shortcut_removed(self):
        vrg = _directed_vrg([(2, 1), (1, 6), (2, 6)])
        out = transitive_reduce(vrg)
        assert {(e.start, e.end) for e in out.edges} == {(2, 1), (1, 6)}

    def test_chain_unchanged(self):
        vrg = _directed_vrg([(0, 1), (1, 2)])
        out = transitive_reduce(vrg)
        assert {(e.start, e.end) for e in out.edges} == {(0, 1), (1, 2)}

    def test_cross_kind_shortcut_kept(self):
        vrg = _directed_vrg([(2, 1), (1, 6), (2, 6)],
                            kinds=[RuleKind.INEQUALITY_LE, RuleKind.INEQUALITY_LE,
                                   RuleKind.POWER_LAW])
        out = transitive_reduce(vrg)
        assert {(e.start, e.end) for e in out.edges} == {(2, 1), (1, 6), (2, 6)}

    def test_reachability_preserved_random(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(3, 9))
            nodes = list(range(n))
            edges = [(i, j) for i in range(n) for j in range(i + 1, n)
                     if rng.random() < 0.4]
            if not edges:
                continue
            vrg = _directed_vrg(edges, members=nodes)
            out = transitive_reduce(vrg)
            kept = [(e.start, e.end) for e in out.edges]
            assert _reach(kept, nodes) == _reach(edges, nodes)

    def test_cycle_detected(self):
        vrg = _directed_vrg([(0, 1), (1, 2), (2, 0)])
        with pytest.raises(RuntimeError):
            transitive_reduce(vrg)


class TestFeedback:
    def _selected(self):
        members = (1, 2, 3, 6)
        rules = RuleSet([pl(1, 6, score=0.9), pl(2, 3, score=0.85), pl(1, 2, score=0.8),
                         pl(3, 6, score=0.75)])
        return select_rules(build_complete(VariableGroup("g", members)), rules, CFG)

    def test_rank_and_discard(self):
        vrg = self._selected()
        fb = UserFeedback(rankings={"pl:1-6": 1, "pl:2-3": 2},
                          exclusions={"pl:1-2", "pl:3-6"})
        out = apply_feedback(vrg, fb)
        assert {e.rule.id: e.edge_rank for e in out.edges} == {"pl:1-6": 1, "pl:2-3": 2}

    def test_empty_feedback_unchanged(self):
        vrg = self._selected()
        out = apply_feedback(vrg, UserFeedback())
        assert {e.rule.id for e in out.edges} == {e.rule.id for e in vrg.edges}
        assert [e.edge_rank for e in out.edges] == [e.edge_rank for e in vrg.edges]

    def test_specificity_threshold(self):
        vrg = select_rules(build_complete(VariableGroup("g", (0, 1, 2))),
                           RuleSet([pl(0, 1, score=0.95), pl(0, 2, score=0.8)]), CFG)
        fb = UserFeedback(specificity=SpecificityFilter(min_score=0.9))
        out = apply_feedback(vrg, fb)
        assert len(out.edges) == 1
        assert out.edges[0].rule.id == "pl:0-1" and out.edges[0].edge_rank == 1

    def test_specificity_correlation_filter(self):
        rules = RuleSet([pl(0, 1, score=0.9, correlation=0.95),
                         pl(0, 2, score=0.9, correlation=0.2)])
        vrg = select_rules(build_complete(VariableGroup("g", (0, 1, 2))), rules, CFG)
        fb = UserFeedback(specificity=SpecificityFilter(min_correlation=0.5))
        out = apply_feedback(vrg, fb)
        assert {e.rule.id for e in out.edges} == {"pl:0-1"}

    def test_unknown_reference_warns_and_ignores(self, caplog):
        vrg = self._selected()
        with caplog.at_level("WARNING"):
            out = apply_feedback(vrg, UserFeedback(rankings={"pl:9-8": 1}))
        assert "unknown rule" in caplog.text
        assert len(out.edges) == len(vrg.edges)

    def test_excluded_constant_rule_removed(self):
        vrg = select_rules(
            build_complete(VariableGroup("g", (0, 1))),
            RuleSet([Rule(RuleKind.CONSTANT, 0, kappa=1.0, score=0.9)]), CFG)
        assert vrg.constant_nodes == {0}
        out = apply_feedback(vrg, UserFeedback(exclusions={"const:0"}))
        assert out.constant_nodes == set()


SPECS4 = tuple(VariableSpec(i, 0.0, 4.0) for i in range(4))


def _pl_dispatch(specs):
    def dispatch(x, base, target, rule, rng, log):
        repair_power_law(x, base, target, rule, Adherence.RA1, rng, specs, log)
    return dispatch


class TestTraverse:
    def test_chain_repair_satisfies_rules(self):
        # 0 -> 1 -> 2, all power laws with distinct parameters
        r01 = pl(0, 1, b=1.0, c=2.0)
        r12 = pl(1, 2, b=-1.0, c=1.0)
        vrg = VRG(group=VariableGroup("g", (0, 1, 2)), nodes={0, 1, 2},
                  edges=[VRGEdge(0, 1, r01, 1), VRGEdge(1, 2, r12, 1)], directed=True)
        x = np.array([1.0, 3.9, 0.5, 0.0])
        rng = np.random.default_rng(0)
        log = RepairLog()
        out = traverse_and_repair(x, vrg, _pl_dispatch(SPECS4), rng, log)
        cfg = LearningConfig(rho=0.1, eps_eq=0.1, e_min=0.01)
        assert is_satisfied(r01, out, SPECS4, cfg)
        assert is_satisfied(r12, out, SPECS4, cfg)
        assert len(log.entries) == 2 and log.clamps == 0

    def test_constants_only(self):
        const = Rule(RuleKind.CONSTANT, 3, kappa=3.0, score=1.0)
        vrg = VRG(group=VariableGroup("g", (3,)), nodes=set(), edges=[],
                  constant_rules={3: const}, directed=True)
        x = np.array([1.0, 1.0, 1.0, 0.1])
        out = traverse_and_repair(x, vrg, _pl_dispatch(SPECS4),
                                  np.random.default_rng(0))
        assert out[3] == 3.0
        assert np.array_equal(out[:3], x[:3])

    def test_rank_filter(self):
        # rank-2 edge is not repaired during the rank-1 pass
        r01 = pl(0, 1, b=1.0, c=2.0, rank=1)
        r23 = pl(2, 3, b=1.0, c=2.0, rank=2)
        vrg = VRG(group=VariableGroup("g", (0, 1, 2, 3)), nodes={0, 1, 2, 3},
                  edges=[VRGEdge(0, 1, r01, 1), VRGEdge(2, 3, r23, 2)], directed=True)
        order = []
        def spy_dispatch(x, base, target, rule, rng, log):
            order.append((rule.rank, base, target))
            repair_power_law(x, base, target, rule, Adherence.RA1, rng, SPECS4, log)
        x = np.array([1.0, 3.9, 1.0, 3.9])
        traverse_and_repair(x, vrg, spy_dispatch, np.random.default_rng(1))
        assert [entry[0] for entry in order] == [1, 2]

    def test_determinism(self):
        import itertools
        members = (0, 1, 2, 3)
        rules = RuleSet([pl(i, j, b=1.0, c=2.0)
                         for i, j in itertools.combinations(members, 2)])
        vrg = select_rules(build_complete(VariableGroup("g", members)), rules, CFG)
        directed = transitive_reduce(orient(vrg, OrientationSequence("g", (2, 0, 3, 1))))
        x = np.array([1.2, 2.2, 3.0, 0.4])
        outs = [traverse_and_repair(x, directed, _pl_dispatch(SPECS4),
                                    np.random.default_rng(99)) for _ in range(3)]
        assert np.array_equal(outs[0], outs[1]) and np.array_equal(outs[1], outs[2])

    def test_every_holder_visited_and_no_revisits(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            n = int(rng.integers(3, 8))
            members = tuple(range(n))
            edges = [(i, j) for i in range(n) for j in range(i + 1, n)
                     if rng.random() < 0.5]
            if not edges:
                continue
            ranks = {e: int(rng.integers(1, 4)) for e in edges}
            vrg = VRG(group=VariableGroup("g", members), nodes=set(members),
                      edges=[VRGEdge(s, t, pl(s, t, rank=ranks[(s, t)]), ranks[(s, t)])
                             for s, t in edges],
                      directed=True)
            visits: dict[int, list[int]] = {}
            def on_visit(rank, node):
                visits.setdefault(rank, []).append(node)
            x = rng.uniform(0, 4, max(members) + 1)
            specs = tuple(VariableSpec(i, 0.0, 4.0) for i in range(max(members) + 1))
            traverse_and_repair(x, vrg, _pl_dispatch(specs),
                                np.random.default_rng(0), on_visit=on_visit)
            for rank in sorted({r for r in ranks.values()}):
                seen = visits.get(rank, [])
                assert len(seen) == len(set(seen)), "revisit within a rank pass"
                holders = {v for e, r in ranks.items() if r == rank for v in e}
                assert holders <= set(seen)


def test_vrg_json_shape():
    vrg = select_rules(build_complete(VariableGroup("g2", (4, 5, 9))),
                       RuleSet([pl(4, 5, score=0.8),
                                Rule(RuleKind.CONSTANT, 9, kappa=1.0, score=0.9)]),
                       CFG)
    blob = vrg.to_json()
    assert blob["group"] == "g2"
    assert blob["constant_nodes"] == [9]
    assert blob["edges"][0] == {"start": 4, "end": 5, "kind": "power_law",
                                "rank": 2, "score": 0.8}
