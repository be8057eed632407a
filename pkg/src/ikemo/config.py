"""Run configuration: validated JSON schema and session construction."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .metrics import HVConfig
from .nsga2 import EvoConfig
from .problems import get_problem
from .repair import RepairAgentKind
from .rules import LearningConfig
from .session import (
    ArtificialUser,
    HumanUser,
    IkemoSession,
    InteractionMode,
    Schedule,
)

__all__ = ["RunConfig", "BatchConfig", "build_session", "load_config"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ProblemConfig(_Strict):
    name: str
    params: dict = Field(default_factory=dict)


class EvoModel(_Strict):
    pop_size: int = 40
    max_gen: int = 100
    p_c: float = 0.9
    eta_c: float = 30.0
    p_m: Optional[float] = None
    eta_m: float = 50.0


class ScheduleModel(_Strict):
    t_learn: int = 10
    t_repair: int = 10
    units: Literal["generations", "fe"] = "generations"
    t_user: Optional[int] = None


class LearningModel(_Strict):
    rho: float = 0.1
    eps_eq: float = 0.1
    e_min: float = 0.01
    s_min: float = 0.7
    b_min: float = 1e-3
    normalized_tolerances: bool = False


class HVModel(_Strict):
    ideal: tuple[float, float]
    nadir: tuple[float, float]
    ref: tuple[float, float] = (1.1, 1.1)


class EnsembleModel(_Strict):
    alpha: float = 0.5
    p_min: float = 0.1


class RunConfig(_Strict):
    problem: ProblemConfig
    agent: str = "none"
    user: str = "RU4"  # RU1..RU4 or "human"
    mode: Literal["sync", "async"] = "sync"
    evo: EvoModel = EvoModel()
    schedule: ScheduleModel = ScheduleModel()
    learning: Optional[LearningModel] = None
    hv: Optional[HVModel] = None
    ensemble: EnsembleModel = EnsembleModel()
    seed: int = 0
    fe_budget: Optional[int] = None
    out_dir: Optional[str] = None


class BatchConfig(_Strict):
    """Grid driver config: (agent x user x seed) cross product."""

    problem: ProblemConfig
    agents: list[str]
    users: list[str]
    seeds: list[int]
    mode: Literal["sync", "async"] = "sync"
    evo: EvoModel = EvoModel()
    schedule: ScheduleModel = ScheduleModel()
    learning: Optional[LearningModel] = None
    hv: Optional[HVModel] = None
    ensemble: EnsembleModel = EnsembleModel()
    fe_budget: Optional[int] = None
    out_dir: Optional[str] = None


def load_config(data: dict) -> RunConfig | BatchConfig:
    if "agents" in data or "seeds" in data:
        return BatchConfig.model_validate(data)
    return RunConfig.model_validate(data)


def build_session(cfg: RunConfig, seed: Optional[int] = None,
                  log_path: Optional[str] = None,
                  checkpoint_path: Optional[str] = None) -> IkemoSession:
    problem = get_problem(cfg.problem.name, **cfg.problem.params)
    evo = EvoConfig(pop_size=cfg.evo.pop_size, max_gen=cfg.evo.max_gen,
                    p_c=cfg.evo.p_c, eta_c=cfg.evo.eta_c, p_m=cfg.evo.p_m,
                    eta_m=cfg.evo.eta_m, seed=cfg.seed if seed is None else seed)
    schedule = Schedule(t_learn=cfg.schedule.t_learn, t_repair=cfg.schedule.t_repair,
                        units=cfg.schedule.units, t_user=cfg.schedule.t_user)
    mode = InteractionMode.SYNCHRONOUS if cfg.mode == "sync" else InteractionMode.ASYNCHRONOUS
    user = HumanUser() if cfg.user == "human" else ArtificialUser(cfg.user)
    learn_cfg = None
    if cfg.learning is not None:
        learn_cfg = LearningConfig(rho=cfg.learning.rho, eps_eq=cfg.learning.eps_eq,
                                   e_min=cfg.learning.e_min, s_min=cfg.learning.s_min,
                                   b_min=cfg.learning.b_min,
                                   normalized_tolerances=cfg.learning.normalized_tolerances)
    hv_cfg = None
    if cfg.hv is not None:
        hv_cfg = HVConfig(ideal=cfg.hv.ideal, nadir=cfg.hv.nadir, ref=cfg.hv.ref)
    return IkemoSession(
        problem, evo, RepairAgentKind(cfg.agent), user, schedule, mode,
        learn_cfg=learn_cfg, hv_cfg=hv_cfg, fe_budget=cfg.fe_budget,
        log_path=log_path, checkpoint_path=checkpoint_path,
        ensemble_alpha=cfg.ensemble.alpha, ensemble_p_min=cfg.ensemble.p_min)
