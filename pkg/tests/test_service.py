import time

import pytest
from fastapi.testclient import TestClient

from ikemo.service import RunManager, create_app


@pytest.fixture()
def client():
    manager = RunManager()
    app = create_app(manager)
    with TestClient(app) as c:
        yield c
    manager.stop_all()


def tiny_config(**over):
    cfg = {
        "problem": {"name": "planted_eq_5"},
        "agent": "pl-ra2",
        "user": "RU4",
        "mode": "sync",
        "evo": {"pop_size": 8, "max_gen": 30},
        "schedule": {"t_learn": 5, "t_repair": 5},
        "seed": 0,
    }
    cfg.update(over)
    return cfg


def wait_for(predicate, timeout=15.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        if predicate():
            return True
        time.sleep(0.02)
    return False


def test_run_lifecycle_and_state(client):
    resp = client.post("/runs", json=tiny_config())
    assert resp.status_code == 201
    run_id = resp.json()["id"]

    listing = client.get("/runs").json()
    assert any(r["id"] == run_id for r in listing)

    assert wait_for(lambda: client.get(f"/runs/{run_id}/state").json()["status"] == "finished")
    state = client.get(f"/runs/{run_id}/state").json()
    assert state["fe"] == 8 * 31
    assert state["gen"] == 30
    assert 0.0 <= state["hv"] <= 1.21

    archive = client.get(f"/runs/{run_id}/archive").json()
    assert archive["fe"] == state["fe"]
    assert len(archive["F"]) == state["archive_size"]


def test_unknown_run_404(client):
    assert client.get("/runs/nope/state").status_code == 404
    assert client.post("/runs/nope/feedback", json={}).status_code == 404


def test_rules_empty_before_learning(client):
    cfg = tiny_config(schedule={"t_learn": 1000, "t_repair": 1000})
    run_id = client.post("/runs", json=cfg).json()["id"]
    resp = client.get(f"/runs/{run_id}/rules")
    assert resp.status_code == 200
    assert resp.json() == []


def test_feedback_validation_and_artificial_409(client):
    run_id = client.post("/runs", json=tiny_config()).json()["id"]
    bad = client.post(f"/runs/{run_id}/feedback",
                      json={"rankings": {"pl:0-1": 0}})
    assert bad.status_code == 422
    assert "rankings" in str(bad.json()["detail"])

    ok_body = {"rankings": {"pl:0-1": 1}, "exclusions": []}
    resp = client.post(f"/runs/{run_id}/feedback", json=ok_body)
    assert resp.status_code == 409  # artificial user, no mailbox


def test_feedback_on_finished_run_409(client):
    run_id = client.post("/runs", json=tiny_config(user="human", evo={
        "pop_size": 8, "max_gen": 3}, schedule={"t_learn": 100, "t_repair": 100},
    )).json()["id"]
    assert wait_for(lambda: client.get(f"/runs/{run_id}/state").json()["status"] == "finished")
    resp = client.post(f"/runs/{run_id}/feedback", json={})
    assert resp.status_code == 409


def test_sync_human_feedback_roundtrip(client):
    # a single learning phase at gen 8, then four more generations
    cfg = tiny_config(user="human", evo={"pop_size": 8, "max_gen": 12},
                      schedule={"t_learn": 8, "t_repair": 8})
    run_id = client.post("/runs", json=cfg).json()["id"]

    assert wait_for(lambda: client.get(f"/runs/{run_id}/state").json()[
        "status"] == "paused_for_feedback")
    rules = client.get(f"/runs/{run_id}/rules").json()
    assert rules, "pending rules shown while paused"
    pair_ids = [r["id"] for r in rules if r["kind"] != "constant"]
    keep, exclude = pair_ids[0], pair_ids[1:]
    fe_before = client.get(f"/runs/{run_id}/state").json()["fe"]
    body = {"rankings": {keep: 1}, "exclusions": exclude}
    assert client.post(f"/runs/{run_id}/feedback", json=body).status_code == 202

    # resumes and progresses by at least one generation
    assert wait_for(lambda: client.get(f"/runs/{run_id}/state").json()["fe"]
                    >= fe_before + 8)
    assert wait_for(lambda: client.get(f"/runs/{run_id}/state").json()[
        "status"] == "finished")

    snapshot = client.get(f"/runs/{run_id}/rules").json()
    ids = {r["id"] for r in snapshot if r["kind"] != "constant"}
    assert keep in ids
    assert not (ids & set(exclude))
    ranked = next(r for r in snapshot if r["id"] == keep)
    assert ranked["rank"] == 1


def test_pause_and_resume(client):
    cfg = tiny_config(user="human", evo={"pop_size": 8, "max_gen": 100_000},
                      schedule={"t_learn": 100_000, "t_repair": 100_000})
    run_id = client.post("/runs", json=cfg).json()["id"]
    assert client.post(f"/runs/{run_id}/pause").status_code == 200
    assert wait_for(lambda: client.get(f"/runs/{run_id}/state").json()[
        "status"] == "paused_for_feedback")
    fe = client.get(f"/runs/{run_id}/state").json()["fe"]
    time.sleep(0.2)
    assert client.get(f"/runs/{run_id}/state").json()["fe"] == fe
    assert client.post(f"/runs/{run_id}/resume").status_code == 200
    assert wait_for(lambda: client.get(f"/runs/{run_id}/state").json()["fe"] > fe)


def test_single_human_run_policy(client):
    cfg = tiny_config(user="human", evo={"pop_size": 8, "max_gen": 100_000})
    first = client.post("/runs", json=cfg)
    assert first.status_code == 201
    second = client.post("/runs", json=cfg)
    assert second.status_code == 409


def test_config_validation_rejects_unknown_keys(client):
    cfg = tiny_config()
    cfg["surprise"] = 1
    assert client.post("/runs", json=cfg).status_code == 422
