"""Aggregate batch runs into an agents-by-users grid of FEs to target HV.

Rows are repair agents (base NSGA-II first), columns are user schemes.
Each cell shows median and standard deviation of the FEs needed to
reach the target hypervolume (80% of the best median final HV across
all algorithms) and a rank-sum p-value against the best cell in the
same column.  Runs that never reach the target count at their full FE
budget.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .metrics import RunRecord, fe_to_target, target_hv, wilcoxon_rank_sum

__all__ = ["RunArtifact", "ReportTable", "load_run_dir", "aggregate", "write_report"]


@dataclass
class RunArtifact:
    """One stored run: record plus the grid coordinates it belongs to."""

    agent: str
    user: str
    seed: int
    record: RunRecord

    def to_json(self) -> dict:
        return {"agent": self.agent, "user": self.user, "seed": self.seed,
                "record": self.record.to_json()}

    @staticmethod
    def from_json(d: dict) -> "RunArtifact":
        return RunArtifact(agent=d["agent"], user=d["user"], seed=d["seed"],
                           record=RunRecord.from_json(d["record"]))


@dataclass
class ReportTable:
    hv_target: float
    agents: list[str]
    users: list[str]
    cells: dict[tuple[str, str], dict] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "hv_target": self.hv_target,
            "agents": self.agents,
            "users": self.users,
            "cells": {f"{a}|{u}": c for (a, u), c in self.cells.items()},
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["agent"] + self.users)
        for agent in self.agents:
            row = [agent]
            for user in self.users:
                cell = self.cells.get((agent, user))
                if cell is None or cell["n_runs"] == 0:
                    row.append("")
                    continue
                text = f"{cell['median_fe']:.0f} +/- {cell['std_fe']:.0f}"
                if cell["p_value"] is not None:
                    text += f" (p={cell['p_value']:.4f})"
                if cell["column_best"]:
                    text += " *"
                row.append(text)
            writer.writerow(row)
        return buf.getvalue()


def load_run_dir(path: str) -> list[RunArtifact]:
    runs: list[RunArtifact] = []
    for name in sorted(os.listdir(path)):
        if not name.endswith(".json") or name.startswith("report"):
            continue
        with open(os.path.join(path, name)) as fh:
            data = json.load(fh)
        if isinstance(data, dict) and {"agent", "user", "seed", "record"} <= set(data):
            runs.append(RunArtifact.from_json(data))
    if not runs:
        raise FileNotFoundError(f"no runs found in {path!r}")
    return runs


def aggregate(runs: list[RunArtifact], hv_fraction: float = 0.8) -> ReportTable:
    by_algo: dict[str, list[float]] = {}
    for run in runs:
        by_algo.setdefault(f"{run.agent}|{run.user}", []).append(run.record.final_hv)
    hv_t = target_hv(by_algo, fraction=hv_fraction)

    agents = sorted({r.agent for r in runs}, key=lambda a: (a != "none", a))
    users = sorted({r.user for r in runs})
    fes: dict[tuple[str, str], list[int]] = {}
    for run in runs:
        fe = fe_to_target(run.record, hv_t)
        censored = fe is None
        fes.setdefault((run.agent, run.user), []).append(
            run.record.fe_total if censored else fe)

    table = ReportTable(hv_target=hv_t, agents=agents, users=users)
    for user in users:
        col = {a: fes.get((a, user)) for a in agents if fes.get((a, user))}
        if not col:
            continue
        best_agent = min(col, key=lambda a: float(np.median(col[a])))
        for agent, samples in col.items():
            p: Optional[float] = None
            if agent != best_agent and len(samples) >= 3 and len(col[best_agent]) >= 3:
                _, p = wilcoxon_rank_sum(samples, col[best_agent])
            table.cells[(agent, user)] = {
                "median_fe": float(np.median(samples)),
                "std_fe": float(np.std(samples)),
                "n_runs": len(samples),
                "p_value": p,
                "column_best": agent == best_agent,
            }
    return table


def write_report(table: ReportTable, out_dir: str) -> tuple[str, str]:
    json_path = os.path.join(out_dir, "report.json")
    csv_path = os.path.join(out_dir, "report.csv")
    with open(json_path, "w") as fh:
        json.dump(table.to_json(), fh, indent=2, sort_keys=True)
    with open(csv_path, "w") as fh:
        fh.write(table.to_csv())
    return json_path, csv_path
