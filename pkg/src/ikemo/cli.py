"""Command-line entry points: run, batch, report, serve."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .config import BatchConfig, RunConfig, load_config
from .report import RunArtifact, aggregate, load_run_dir, write_report

logger = logging.getLogger(__name__)


def _setup_logging() -> None:
    level = os.environ.get("IKEMO_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")


def _read_config(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _run_one(cfg: RunConfig, seed: int, out_dir: str | None) -> RunArtifact:
    from .config import build_session

    log_path = None
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        log_path = os.path.join(out_dir, f"{cfg.agent}__{cfg.user}__seed{seed}.jsonl")
        open(log_path, "w").close()  # truncate any previous run's log
    session = build_session(cfg, seed=seed, log_path=log_path)
    record = session.run()
    artifact = RunArtifact(agent=cfg.agent, user=cfg.user, seed=seed, record=record)
    if out_dir:
        path = os.path.join(out_dir, f"{cfg.agent}__{cfg.user}__seed{seed}.json")
        with open(path, "w") as fh:
            json.dump(artifact.to_json(), fh, sort_keys=True)
    return artifact


def cmd_run(args: argparse.Namespace) -> int:
    data = _read_config(args.config)
    cfg = load_config(data)
    if isinstance(cfg, BatchConfig):
        print("config is a batch grid; use `ikemo batch`", file=sys.stderr)
        return 2
    seed = args.seed if args.seed is not None else cfg.seed
    out_dir = args.out or cfg.out_dir
    artifact = _run_one(cfg, seed, out_dir)
    rec = artifact.record
    print(f"{artifact.agent}+{artifact.user} seed={seed}: "
          f"fe={rec.fe_total} final_hv={rec.final_hv:.4f}")
    return 0


def cmd_batch(args: argparse.Namespace) -> int:
    data = _read_config(args.config)
    cfg = load_config(data)
    if isinstance(cfg, RunConfig):
        print("config is a single run; use `ikemo run`", file=sys.stderr)
        return 2
    out_dir = args.out or cfg.out_dir
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    artifacts = []
    for agent in cfg.agents:
        for user in cfg.users:
            for seed in cfg.seeds:
                single = RunConfig(problem=cfg.problem, agent=agent, user=user,
                                   mode=cfg.mode, evo=cfg.evo, schedule=cfg.schedule,
                                   learning=cfg.learning, hv=cfg.hv,
                                   ensemble=cfg.ensemble, seed=seed,
                                   fe_budget=cfg.fe_budget, out_dir=out_dir)
                artifacts.append(_run_one(single, seed, out_dir))
                rec = artifacts[-1].record
                print(f"{agent}+{user} seed={seed}: fe={rec.fe_total} "
                      f"final_hv={rec.final_hv:.4f}")
    table = aggregate(artifacts)
    if out_dir:
        json_path, csv_path = write_report(table, out_dir)
        print(f"report written: {json_path}, {csv_path}")
    else:
        print(table.to_csv())
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    try:
        runs = load_run_dir(args.dir)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    table = aggregate(runs)
    if args.out:
        json_path, csv_path = write_report(table, args.out)
        print(f"report written: {json_path}, {csv_path}")
    else:
        print(f"HV target: {table.hv_target:.4f}")
        print(table.to_csv())
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app()
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(prog="ikemo",
                                     description="interactive knowledge-based "
                                                 "evolutionary multi-objective optimization")
    parser.add_argument("--serve", type=int, metavar="PORT", default=None,
                        help="start the HTTP service on PORT (shortcut for `ikemo serve`)")
    sub = parser.add_subparsers(dest="command")

    p_run = sub.add_parser("run", help="execute a single configured run")
    p_run.add_argument("config", nargs="?", help="path to the run config JSON")
    p_run.add_argument("--config", dest="config_flag", help=argparse.SUPPRESS)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None, help="output directory for records")

    p_batch = sub.add_parser("batch", help="run an (agent x user x seed) grid")
    p_batch.add_argument("config", nargs="?")
    p_batch.add_argument("--config", dest="config_flag", help=argparse.SUPPRESS)
    p_batch.add_argument("--out", default=None)

    p_report = sub.add_parser("report", help="aggregate stored runs into a grid report")
    p_report.add_argument("dir")
    p_report.add_argument("--out", default=None, help="directory for report.csv/json")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")

    args = parser.parse_args(argv)
    if args.serve is not None:
        args.port = args.serve
        args.host = "127.0.0.1"
        return cmd_serve(args)
    if args.command in ("run", "batch"):
        args.config = args.config or args.config_flag
        if not args.config:
            parser.error("a config path is required")
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "batch":
            return cmd_batch(args)
        if args.command == "report":
            return cmd_report(args)
        if args.command == "serve":
            return cmd_serve(args)
    except Exception as exc:  # config/validation errors exit nonzero with the message
        print(f"error: {exc}", file=sys.stderr)
        return 1
    parser.print_help()
    return 2


if __name__ == "__main__":
    sys.exit(main())
