"""HTTP API for the dashboard: run lifecycle, state snapshots, feedback intake.

Handlers only read the session's atomically-published snapshots and
write to its mailbox or control events; the optimizer thread owns all
mutable run state.
"""

from __future__ import annotations

import threading
import uuid
from typing import Annotated, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from .config import RunConfig, build_session
from .feedback import SpecificityFilter, UserFeedback
from .session import HumanUser, IkemoSession

__all__ = ["RunManager", "create_app", "FeedbackModel"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SpecificityModel(_Strict):
    min_score: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    min_correlation: Optional[float] = Field(default=None, ge=0.0, le=1.0)


class FeedbackModel(_Strict):
    rankings: dict[str, Annotated[int, Field(ge=1)]] = Field(default_factory=dict)
    exclusions: list[str] = Field(default_factory=list)
    specificity: Optional[SpecificityModel] = None

    def to_feedback(self) -> UserFeedback:
        spec = None
        if self.specificity is not None:
            spec = SpecificityFilter(min_score=self.specificity.min_score,
                                     min_correlation=self.specificity.min_correlation)
        return UserFeedback(rankings=dict(self.rankings),
                            exclusions=set(self.exclusions), specificity=spec)


class RunEntry:
    def __init__(self, run_id: str, session: IkemoSession, config: RunConfig):
        self.id = run_id
        self.session = session
        self.config = config
        self.thread: Optional[threading.Thread] = None

    def start(self) -> None:
        self.session.publish_snapshots = True
        self.thread = threading.Thread(target=self._run, daemon=True)
        self.thread.start()

    def _run(self) -> None:
        try:
            self.session.run()
        except Exception:  # state lands in snapshot as "failed"
            pass

    def summary(self) -> dict:
        snap = self.session.snapshot
        return {"id": self.id, "status": snap["status"], "fe": snap["fe"],
                "gen": snap["gen"], "problem": self.config.problem.name,
                "agent": self.config.agent, "user": self.config.user,
                "mode": self.config.mode}


class RunManager:
    """Owns the run registry; one human-interactive run per process by default."""

    def __init__(self, allow_multiple_human: bool = False):
        self.runs: dict[str, RunEntry] = {}
        self.allow_multiple_human = allow_multiple_human

    def create(self, config: RunConfig) -> RunEntry:
        if config.user == "human" and not self.allow_multiple_human:
            active = [e for e in self.runs.values()
                      if e.config.user == "human"
                      and e.session.snapshot["status"] not in ("finished", "failed")]
            if active:
                raise ValueError("a human-interactive run is already hosted")
        run_id = uuid.uuid4().hex[:12]
        entry = RunEntry(run_id, build_session(config), config)
        self.runs[run_id] = entry
        entry.start()
        return entry

    def get(self, run_id: str) -> RunEntry:
        if run_id not in self.runs:
            raise KeyError(run_id)
        return self.runs[run_id]

    def stop_all(self) -> None:
        for entry in self.runs.values():
            entry.session.stop_event.set()
            entry.session.pause_event.clear()


def create_app(manager: Optional[RunManager] = None) -> FastAPI:
    manager = manager or RunManager()
    app = FastAPI(title="ikemo service", version="0.1.0")
    app.state.manager = manager

    def _entry(run_id: str) -> RunEntry:
        try:
            return manager.get(run_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")

    @app.get("/runs")
    def list_runs() -> list[dict]:
        return [entry.summary() for entry in manager.runs.values()]

    @app.post("/runs", status_code=201)
    def create_run(config: RunConfig) -> dict:
        try:
            entry = manager.create(config)
        except ValueError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except KeyError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"id": entry.id}

    @app.get("/runs/{run_id}/state")
    def run_state(run_id: str) -> dict:
        snap = _entry(run_id).session.snapshot
        return {"fe": snap["fe"], "gen": snap["gen"], "hv": snap["hv"],
                "status": snap["status"], "ensemble_p": snap["ensemble_p"],
                "archive_size": snap["archive_size"]}

    @app.get("/runs/{run_id}/rules")
    def run_rules(run_id: str) -> list[dict]:
        return _entry(run_id).session.snapshot["rules"]

    @app.get("/runs/{run_id}/archive")
    def run_archive(run_id: str) -> dict:
        snap = _entry(run_id).session.snapshot
        return {"fe": snap["fe"], "hv": snap["hv"], **snap["archive"]}

    @app.post("/runs/{run_id}/feedback", status_code=202)
    def post_feedback(run_id: str, body: FeedbackModel) -> dict:
        entry = _entry(run_id)
        status = entry.session.snapshot["status"]
        if status in ("finished", "failed"):
            raise HTTPException(status_code=409, detail=f"run is {status}")
        if not isinstance(entry.session.user, HumanUser):
            raise HTTPException(status_code=409,
                                detail="run uses an artificial user; feedback not accepted")
        entry.session.user.post(body.to_feedback())
        return {"status": "queued"}

    @app.post("/runs/{run_id}/pause")
    def pause_run(run_id: str) -> dict:
        entry = _entry(run_id)
        if entry.session.snapshot["status"] in ("finished", "failed"):
            raise HTTPException(status_code=409, detail="run already ended")
        entry.session.pause_event.set()
        return {"status": "pausing"}

    @app.post("/runs/{run_id}/resume")
    def resume_run(run_id: str) -> dict:
        entry = _entry(run_id)
        entry.session.pause_event.clear()
        return {"status": "resuming"}

    return app
