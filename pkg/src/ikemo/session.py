"""The IK-EMO loop: NSGA-II plus scheduled learning, feedback, and repair.

Learning phases mine rules from the non-dominated archive on a fixed
interval (generations or FEs).  A user, artificial or human, ranks or
excludes the presented rules; feedback is applied immediately in
synchronous mode or after a lag in asynchronous mode, where freshly
learned rules inherit the user's decisions by structural identity.
Repair phases rewrite the next generation's offspring through
per-offspring oriented variable relation graphs.
"""

from __future__ import annotations

import enum
import json
import logging
import math
import queue
import threading
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import problems as problems_mod
from .feedback import SpecificityFilter, UserFeedback
from .learning import NDArchive, RuleSet, learn_all
from .metrics import HVConfig, RunRecord, normalized_hypervolume
from .nsga2 import ArchiveStore, EvoConfig, EvoState, init_state, step_generation
from .repair import (
    RepairAgent,
    RepairAgentKind,
    SurvivalTally,
    make_agent,
)
from .rules import LearningConfig, Rule, RuleKind
from .vrg import (
    VRG,
    OrientationSequence,
    RepairLog,
    build_complete,
    orient,
    select_rules,
    transitive_reduce,
    traverse_and_repair,
)

__all__ = [
    "Schedule",
    "InteractionMode",
    "ArtificialUser",
    "HumanUser",
    "FeedbackClock",
    "artificial_feedback",
    "fold_feedback",
    "merge_feedback_async",
    "IkemoSession",
    "run_ikemo",
]

logger = logging.getLogger(__name__)

CHECKPOINT_SCHEMA = "ikemo-checkpoint-v1"


@dataclass(frozen=True)
class Schedule:
    """Learning / repair intervals, in generations or FEs, plus user lag."""

    t_learn: int = 10
    t_repair: int = 10
    units: str = "generations"  # or "fe"
    t_user: Optional[int] = None  # FEs of decision-maker deliberation

    def __post_init__(self):
        if self.t_learn < 1 or self.t_repair < 1:
            raise ValueError("intervals must be >= 1")
        if self.units not in ("generations", "fe"):
            raise ValueError("units must be 'generations' or 'fe'")


class InteractionMode(enum.Enum):
    SYNCHRONOUS = "sync"
    ASYNCHRONOUS = "async"


RU_FRACTIONS = {"RU1": 0.10, "RU2": 0.20, "RU3": 0.50, "RU4": 1.00}


@dataclass(frozen=True)
class ArtificialUser:
    """Keeps the top score fraction of learned rules, ranked by score."""

    scheme: str

    def __post_init__(self):
        if self.scheme not in RU_FRACTIONS:
            raise ValueError(f"scheme must be one of {sorted(RU_FRACTIONS)}")

    @property
    def fraction(self) -> float:
        return RU_FRACTIONS[self.scheme]


class HumanUser:
    """Mailbox-backed user; the service posts UserFeedback from the API."""

    scheme = "human"

    def __init__(self):
        self.mailbox: "queue.Queue[UserFeedback]" = queue.Queue()

    def post(self, feedback: UserFeedback) -> None:
        self.mailbox.put(feedback)


def artificial_feedback(rules: RuleSet, scheme: str, s_min: float) -> UserFeedback:
    """Rank the top ceil(fraction * count) qualifying pair rules, exclude the rest.

    Constant rules are neither ranked nor excluded: they are always part
    of the repair set.  Rules below s_min are left unmentioned; the VRG
    selection threshold drops them anyway.
    """
    fraction = RU_FRACTIONS[scheme]
    candidates = [r for r in rules.pair_rules() if r.score >= s_min]
    if not candidates:
        return UserFeedback()
    candidates.sort(key=lambda r: (-r.score, r.kind.value, r.i, r.j if r.j is not None else -1))
    keep = math.ceil(fraction * len(candidates))
    rankings = {r.id: k + 1 for k, r in enumerate(candidates[:keep])}
    exclusions = {r.id for r in candidates[keep:]}
    return UserFeedback(rankings=rankings, exclusions=exclusions)


def fold_feedback(rules: Sequence[Rule], feedback: UserFeedback) -> list[Rule]:
    """Apply feedback to a rule list: exclusions, rank overrides, specificity."""
    out: list[Rule] = []
    for r in rules:
        if r.id in feedback.exclusions:
            continue
        rank = feedback.rankings.get(r.id, r.rank)
        out.append(replace(r, rank=rank) if rank != r.rank else r)
    spec = feedback.specificity
    if spec is not None:
        if spec.min_correlation is not None:
            out = [r for r in out
                   if r.kind is RuleKind.CONSTANT
                   or abs(r.correlation or 0.0) >= spec.min_correlation]
        if spec.min_score is not None:
            out = [replace(r, rank=1) if r.kind is not RuleKind.CONSTANT else r
                   for r in out
                   if r.kind is RuleKind.CONSTANT or r.score >= spec.min_score]
    return out


def merge_feedback_async(previous_rules: RuleSet, feedback: UserFeedback,
                         latest_rules: RuleSet) -> list[Rule]:
    """Carry user decisions on an old rule set over to the latest one.

    A latest rule survives only when a structurally identical previous
    rule was not excluded; it keeps the user's rank but its own fresh
    statistics.  Constant rules pass through unless explicitly excluded.
    """
    approved: dict[str, int] = {}
    for prev in previous_rules.pair_rules():
        if prev.id in feedback.exclusions:
            continue
        approved[prev.id] = feedback.rankings.get(prev.id, prev.rank)
    effective: list[Rule] = []
    for rule in latest_rules:
        if rule.kind is RuleKind.CONSTANT:
            if rule.id not in feedback.exclusions:
                effective.append(rule)
            continue
        if rule.id in approved:
            effective.append(replace(rule, rank=approved[rule.id]))
    return effective


class FeedbackClock:
    """Tracks the single outstanding feedback request in asynchronous mode."""

    def __init__(self, t_user: int):
        if t_user < 1:
            raise ValueError("t_user must be >= 1 FE")
        self.t_user = t_user
        self.requested_fe: Optional[int] = None
        self.ready_fe: Optional[int] = None

    @property
    def idle(self) -> bool:
        return self.requested_fe is None

    def request(self, fe: int) -> int:
        if not self.idle:
            raise RuntimeError("a feedback request is already outstanding")
        self.requested_fe = fe
        self.ready_fe = fe + self.t_user
        return self.ready_fe

    def ready(self, fe: int) -> bool:
        return self.ready_fe is not None and fe >= self.ready_fe

    def clear(self) -> None:
        self.requested_fe = None
        self.ready_fe = None


class IkemoSession:
    """One optimization run with knowledge extraction and user interaction."""

    def __init__(self, problem, evo_cfg: EvoConfig,
                 agent_kind: RepairAgentKind = RepairAgentKind.NONE,
                 user: ArtificialUser | HumanUser | None = None,
                 schedule: Schedule = Schedule(),
                 mode: InteractionMode = InteractionMode.SYNCHRONOUS,
                 learn_cfg: Optional[LearningConfig] = None,
                 hv_cfg: Optional[HVConfig] = None,
                 fe_budget: Optional[int] = None,
                 log_path: Optional[str] = None,
                 checkpoint_path: Optional[str] = None,
                 algorithm_label: Optional[str] = None,
                 ensemble_alpha: float = 0.5, ensemble_p_min: float = 0.1):
        self.problem = problem
        self.evo_cfg = evo_cfg
        self.agent_kind = agent_kind
        self.user = user if user is not None else ArtificialUser("RU4")
        self.schedule = schedule
        self.mode = mode
        self.learn_cfg = learn_cfg or problem.default_learning_config()
        ideal, nadir = problem.hv_anchors()
        self.hv_cfg = hv_cfg or HVConfig(ideal=ideal, nadir=nadir)
        self.fe_budget = fe_budget
        self.log_path = log_path
        self.checkpoint_path = checkpoint_path

        self.agent: RepairAgent = make_agent(agent_kind, problem.specs,
                                             alpha=ensemble_alpha, p_min=ensemble_p_min)
        scheme = getattr(self.user, "scheme", "RU4")
        label = algorithm_label or (
            "base" if agent_kind is RepairAgentKind.NONE else f"{agent_kind.value}+{scheme}")
        self.record = RunRecord(seed=evo_cfg.seed, algorithm=label)

        self.state: Optional[EvoState] = None
        self.latest_rules: Optional[RuleSet] = None
        self.effective_rules: list[Rule] = []
        self.vrgs: list[VRG] = []
        self.repair_next = False
        self.clock = FeedbackClock(schedule.t_user) if (
            mode is InteractionMode.ASYNCHRONOUS and schedule.t_user) else None
        self.presented_rules: Optional[RuleSet] = None  # rules shown to the user
        self.last_feedback: Optional[UserFeedback] = None
        self.last_feedback_rules: Optional[RuleSet] = None
        self.feedback_rounds = 0
        self.deducted_fe = 0
        self.learning_phases = 0
        self.repair_phases = 0
        self.next_learn_fe = schedule.t_learn if schedule.units == "fe" else None
        self.next_repair_fe = schedule.t_repair if schedule.units == "fe" else None
        self.status = "created"
        self.stop_event = threading.Event()
        self.pause_event = threading.Event()
        self.publish_snapshots = False
        self.snapshot: dict = {"status": self.status, "gen": 0, "fe": 0, "hv": 0.0,
                               "archive_size": 0, "ensemble_p": {}, "rules": [],
                               "archive": {"F": [], "X": []}}
        self.last_repair_log: Optional[RepairLog] = None
        self._log_fh = None

    # -- schedule ----------------------------------------------------------

    def _learning_due(self) -> bool:
        st = self.state
        if self.schedule.units == "generations":
            return st.gen > 0 and st.gen % self.schedule.t_learn == 0
        if st.fe >= self.next_learn_fe:
            self.next_learn_fe = (st.fe // self.schedule.t_learn + 1) * self.schedule.t_learn
            return True
        return False

    def _repair_due_next_gen(self) -> bool:
        """Whether the offspring of the generation about to run get repaired."""
        if self.agent.is_none or not self.vrgs:
            return False
        if self.mode is InteractionMode.ASYNCHRONOUS:
            due = self.repair_next
            self.repair_next = False
            return due
        st = self.state
        if self.schedule.units == "generations":
            return st.gen > 0 and st.gen % self.schedule.t_repair == 0
        if st.fe >= self.next_repair_fe:
            self.next_repair_fe = (st.fe // self.schedule.t_repair + 1) * self.schedule.t_repair
            return True
        return False

    def _budget_left(self) -> bool:
        st = self.state
        if st.gen >= self.evo_cfg.max_gen:
            return False
        if self.fe_budget is not None:
            return st.fe + self.deducted_fe + self.evo_cfg.pop_size <= self.fe_budget
        return True

    # -- learning and feedback ---------------------------------------------

    def _learning_phase(self) -> None:
        st = self.state
        if len(st.archive) < 2:
            return
        archive = NDArchive(X=st.archive.X, specs=self.problem.specs)
        rules = learn_all(archive, self.problem.groups, self.agent.hierarchy,
                          self.learn_cfg, generation=st.gen, fe_count=st.fe)
        self.latest_rules = rules
        self.learning_phases += 1

        if self.mode is InteractionMode.SYNCHRONOUS:
            feedback = self._get_feedback_sync(rules)
            self.feedback_rounds += 1
            if self.schedule.t_user:
                self.deducted_fe += self.schedule.t_user
            self.last_feedback = feedback
            self.last_feedback_rules = rules
            self.effective_rules = fold_feedback(list(rules), feedback)
        else:
            if self.presented_rules is None:  # user idle; at most one outstanding request
                self.presented_rules = rules
                if self.clock is not None:
                    self.clock.request(st.fe)
            if self.last_feedback is not None:
                self.effective_rules = merge_feedback_async(
                    self.last_feedback_rules, self.last_feedback, rules)
            else:
                self.effective_rules = list(rules)
            self.repair_next = True
        self._rebuild_vrgs()

    def _poll_feedback_async(self) -> None:
        st = self.state
        arrived: Optional[UserFeedback] = None
        if isinstance(self.user, HumanUser):
            try:
                arrived = self.user.mailbox.get_nowait()
            except queue.Empty:
                arrived = None
            if arrived is not None and self.presented_rules is None:
                arrived = None  # nothing was presented yet
        elif self.clock is not None and self.clock.ready(st.fe) and self.presented_rules is not None:
            arrived = artificial_feedback(self.presented_rules, self.user.scheme,
                                          self.learn_cfg.s_min)
        if arrived is None:
            return
        self.last_feedback = arrived
        self.last_feedback_rules = self.presented_rules
        self.feedback_rounds += 1
        latest = self.latest_rules if self.latest_rules is not None else self.presented_rules
        self.effective_rules = merge_feedback_async(self.presented_rules, arrived, latest)
        self.presented_rules = None
        if self.clock is not None:
            self.clock.clear()
        self._rebuild_vrgs()
        self.repair_next = True

    def _get_feedback_sync(self, rules: RuleSet) -> UserFeedback:
        if isinstance(self.user, ArtificialUser):
            return artificial_feedback(rules, self.user.scheme, self.learn_cfg.s_min)
        self.status = "paused_for_feedback"
        self.presented_rules = rules
        self._publish_snapshot()
        if self.checkpoint_path:
            self.save_checkpoint(self.checkpoint_path)
        while True:
            try:
                feedback = self.user.mailbox.get(timeout=0.1)
                self.status = "running"
                self.presented_rules = None
                return feedback
            except queue.Empty:
                if self.stop_event.is_set():
                    raise RuntimeError("session stopped while awaiting feedback")

    def _rebuild_vrgs(self) -> None:
        ruleset = RuleSet(self.effective_rules)
        vrgs = []
        for group in self.problem.groups:
            vrg = select_rules(build_complete(group), ruleset, self.learn_cfg)
            if vrg.edges or vrg.constant_rules:
                vrgs.append(vrg)
        self.vrgs = vrgs

    # -- repair -------------------------------------------------------------

    def _offspring_hook(self, offspring: np.ndarray,
                        rng: np.random.Generator) -> tuple[np.ndarray, list]:
        out = offspring.copy()
        tags: list = []
        log = RepairLog()
        for k in range(out.shape[0]):
            options = self.agent.pick_options(rng)
            dispatch = self.agent.make_dispatch(options)
            x = out[k]
            for vrg_sel in self.vrgs:
                members = sorted(vrg_sel.group.members)
                perm = rng.permutation(len(members))
                seq = OrientationSequence(vrg_sel.group.id,
                                          tuple(members[p] for p in perm))
                directed = transitive_reduce(orient(vrg_sel, seq))
                x = traverse_and_repair(x, directed, dispatch, rng, log)
            out[k] = x
            tags.append(options)
        self.last_repair_log = log
        self.repair_phases += 1 if out.shape[0] else 0
        return out, tags

    def _update_ensembles(self) -> None:
        survivors = getattr(self.state, "survivor_offspring_tags", [])
        states = self.agent.ensemble_states()
        if not states:
            return
        n_off = len(survivors)
        tallies = {}
        for fam in states:
            counts: dict[str, int] = {}
            for tag in survivors:
                if tag and fam in tag:
                    counts[tag[fam]] = counts.get(tag[fam], 0) + 1
            tallies[fam] = SurvivalTally(n_s=counts, n_off=n_off)
        self.agent.update_ensembles(tallies)
        if self._log_fh is not None:
            for fam, st in self.agent.ensemble_states().items():
                self._log_fh.write(json.dumps(
                    {"fe": self.state.fe, "operator": fam,
                     "p": [float(v) for v in st.p]}) + "\n")

    # -- main loop -----------------------------------------------------------

    def _log_generation(self) -> None:
        st = self.state
        hv = normalized_hypervolume(st.archive.F, self.hv_cfg) if len(st.archive) else 0.0
        ens = {fam: [float(v) for v in es.p]
               for fam, es in self.agent.ensemble_states().items()}
        self.record.append(st.gen, st.fe, hv, archive_size=len(st.archive))
        if self._log_fh is not None:
            self._log_fh.write(json.dumps(
                {"gen": st.gen, "fe": st.fe, "hv": hv,
                 "archive_size": len(st.archive), "ensemble_p": ens,
                 "rules_active": len(self.effective_rules)}) + "\n")
        self._publish_snapshot()

    def _rules_view(self) -> list[Rule]:
        """What the decision maker currently sees: pending set while a
        request is outstanding, otherwise the effective (feedback-applied) set."""
        if self.presented_rules is not None:
            return list(self.presented_rules)
        return list(self.effective_rules)

    def _publish_snapshot(self, archive_cap: int = 2000) -> None:
        if not self.publish_snapshots:
            self.snapshot = {**self.snapshot, "status": self.status}
            return
        st = self.state
        hv = self.record.history[-1]["hv"] if self.record.history else 0.0
        self.snapshot = {
            "status": self.status,
            "gen": st.gen if st else 0,
            "fe": st.fe if st else 0,
            "hv": hv,
            "archive_size": len(st.archive) if st else 0,
            "ensemble_p": {fam: [float(v) for v in es.p]
                           for fam, es in self.agent.ensemble_states().items()},
            "rules": [r.to_json() for r in self._rules_view()],
            "archive": ({"F": st.archive.F[:archive_cap].tolist(),
                         "X": st.archive.X[:archive_cap].tolist()}
                        if st else {"F": [], "X": []}),
        }

    def run(self) -> RunRecord:
        if self.log_path:
            self._log_fh = open(self.log_path, "a")
        try:
            if self.state is None:
                self.state = init_state(self.problem, self.evo_cfg)
                self.status = "running"
                self._log_generation()
            while self._budget_left() and not self.stop_event.is_set():
                if self.pause_event.is_set():
                    previous = self.status
                    self.status = "paused_for_feedback"
                    self._publish_snapshot()
                    while self.pause_event.is_set() and not self.stop_event.is_set():
                        time.sleep(0.02)
                    self.status = previous
                    continue
                self.step()
            self.status = "finished"
            if self.checkpoint_path:
                self.save_checkpoint(self.checkpoint_path)
            self._publish_snapshot()
        except Exception:
            self.status = "failed"
            self._publish_snapshot()
            raise
        finally:
            if self._log_fh is not None:
                self._log_fh.close()
                self._log_fh = None
        return self.record

    def step(self) -> None:
        """One generation plus any due learning/feedback events."""
        repaired = self._repair_due_next_gen()
        hook = self._offspring_hook if repaired else None
        step_generation(self.state, hook)
        if repaired:
            self._update_ensembles()
        self._log_generation()
        if not self.agent.is_none and self._learning_due():
            self._learning_phase()
        if self.mode is InteractionMode.ASYNCHRONOUS and not self.agent.is_none:
            self._poll_feedback_async()

    # -- checkpointing --------------------------------------------------------

    def to_checkpoint(self) -> dict:
        st = self.state
        if st is None:
            raise RuntimeError("session not started; nothing to checkpoint")
        return {
            "schema": CHECKPOINT_SCHEMA,
            "problem": {"name": self.problem.name},
            "agent_kind": self.agent_kind.value,
            "mode": self.mode.value,
            "user_scheme": getattr(self.user, "scheme", "human"),
            "schedule": {"t_learn": self.schedule.t_learn,
                         "t_repair": self.schedule.t_repair,
                         "units": self.schedule.units,
                         "t_user": self.schedule.t_user},
            "evo_cfg": {"pop_size": self.evo_cfg.pop_size,
                        "max_gen": self.evo_cfg.max_gen,
                        "p_c": self.evo_cfg.p_c, "eta_c": self.evo_cfg.eta_c,
                        "p_m": self.evo_cfg.p_m, "eta_m": self.evo_cfg.eta_m,
                        "seed": self.evo_cfg.seed},
            "fe_budget": self.fe_budget,
            "state": {
                "X": st.X.tolist(), "F": st.F.tolist(), "G": st.G.tolist(),
                "CV": st.CV.tolist(), "rank": st.rank.tolist(),
                "crowd": st.crowd.tolist(), "tags": st.tags,
                "gen": st.gen, "fe": st.fe, "eval_failures": st.eval_failures,
                "rng": st.rng.bit_generator.state,
            },
            "archive": {"X": st.archive.X.tolist(), "F": st.archive.F.tolist()},
            "rules": {
                "latest": self.latest_rules.to_json() if self.latest_rules else None,
                "effective": [r.to_json() for r in self.effective_rules],
                "presented": self.presented_rules.to_json() if self.presented_rules else None,
                "last_feedback": self.last_feedback.to_json() if self.last_feedback else None,
                "last_feedback_rules": (self.last_feedback_rules.to_json()
                                        if self.last_feedback_rules else None),
            },
            "ensembles": {fam: {"p": es.p.tolist(), "alpha": es.alpha,
                                "p_min": es.p_min, "operators": list(es.operators)}
                          for fam, es in self.agent.ensemble_states().items()},
            "clock": ({"requested_fe": self.clock.requested_fe,
                       "ready_fe": self.clock.ready_fe}
                      if self.clock is not None else None),
            "counters": {"feedback_rounds": self.feedback_rounds,
                         "deducted_fe": self.deducted_fe,
                         "learning_phases": self.learning_phases,
                         "repair_phases": self.repair_phases,
                         "repair_next": self.repair_next,
                         "next_learn_fe": self.next_learn_fe,
                         "next_repair_fe": self.next_repair_fe},
            "record": self.record.to_json(),
        }

    def save_checkpoint(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_checkpoint(), fh)

    @classmethod
    def from_checkpoint(cls, data: dict, problem=None, **overrides) -> "IkemoSession":
        if data.get("schema") != CHECKPOINT_SCHEMA:
            raise ValueError(f"unsupported checkpoint schema {data.get('schema')}")
        if problem is None:
            problem = problems_mod.get_problem(data["problem"]["name"])
        evo = EvoConfig(**data["evo_cfg"])
        sched = Schedule(**data["schedule"])
        mode = InteractionMode(data["mode"])
        scheme = data["user_scheme"]
        user = HumanUser() if scheme == "human" else ArtificialUser(scheme)
        session = cls(problem, evo, RepairAgentKind(data["agent_kind"]), user,
                      sched, mode, fe_budget=data.get("fe_budget"), **overrides)

        st = data["state"]
        rng = np.random.default_rng()
        rng.bit_generator.state = st["rng"]
        archive = ArchiveStore(problem.n_var, problem.n_obj)
        archive.X = np.array(data["archive"]["X"], dtype=float).reshape(-1, problem.n_var)
        archive.F = np.array(data["archive"]["F"], dtype=float).reshape(-1, problem.n_obj)
        session.state = EvoState(
            problem=problem, cfg=evo, rng=rng,
            X=np.array(st["X"], dtype=float), F=np.array(st["F"], dtype=float),
            G=np.array(st["G"], dtype=float).reshape(len(st["X"]), -1),
            CV=np.array(st["CV"], dtype=float),
            rank=np.array(st["rank"], dtype=np.int64),
            crowd=np.array(st["crowd"], dtype=float),
            tags=st["tags"], archive=archive, gen=st["gen"], fe=st["fe"],
            eval_failures=st["eval_failures"])

        rl = data["rules"]
        session.latest_rules = RuleSet.from_json(rl["latest"]) if rl["latest"] else None
        session.effective_rules = [Rule.from_json(r) for r in rl["effective"]]
        session.presented_rules = RuleSet.from_json(rl["presented"]) if rl["presented"] else None
        session.last_feedback = (UserFeedback.from_json(rl["last_feedback"])
                                 if rl["last_feedback"] else None)
        session.last_feedback_rules = (RuleSet.from_json(rl["last_feedback_rules"])
                                       if rl["last_feedback_rules"] else None)
        for fam, es in data["ensembles"].items():
            policy = session.agent.families[fam]
            policy.ensemble = replace(policy.ensemble, p=np.array(es["p"]),
                                      alpha=es["alpha"], p_min=es["p_min"])
        if data["clock"] is not None and session.clock is not None:
            session.clock.requested_fe = data["clock"]["requested_fe"]
            session.clock.ready_fe = data["clock"]["ready_fe"]
        c = data["counters"]
        session.feedback_rounds = c["feedback_rounds"]
        session.deducted_fe = c["deducted_fe"]
        session.learning_phases = c["learning_phases"]
        session.repair_phases = c["repair_phases"]
        session.repair_next = c["repair_next"]
        session.next_learn_fe = c["next_learn_fe"]
        session.next_repair_fe = c["next_repair_fe"]
        session.record = RunRecord.from_json(data["record"])
        session._rebuild_vrgs()
        session.status = "running"
        return session


def run_ikemo(problem, evo_cfg: EvoConfig,
              agent_kind: RepairAgentKind = RepairAgentKind.NONE,
              user: ArtificialUser | HumanUser | None = None,
              schedule: Schedule = Schedule(),
              mode: InteractionMode = InteractionMode.SYNCHRONOUS,
              **kwargs) -> RunRecord:
    """Convenience wrapper: build a session, run it to completion."""
    session = IkemoSession(problem, evo_cfg, agent_kind, user, schedule, mode, **kwargs)
    return session.run()
