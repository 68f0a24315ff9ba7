import json
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from blockspeak.services import create_runtime_app

FIXTURES = Path(__file__).parent / "fixtures"

WORKER_ASL = "!setup. +!setup <- +ready(1)."
BOSS_ASL = "!setup. +!setup <- +bossy."


@pytest.fixture()
def service(tmp_path):
    app = create_runtime_app(tmp_path)
    client = TestClient(app)
    yield client
    app.state.runs.stop_all()


def put_text_agent(client, name, source):
    return client.put(f"/agents/{name}",
                      json={"sourceKind": "text", "body": source})


def wait_for_beliefs(client, run_id, agent, expected, timeout=3.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        r = client.get(f"/runs/{run_id}/agents/{agent}/beliefs")
        if r.status_code == 200 and expected in r.json():
            return r.json()
        time.sleep(0.02)
    raise AssertionError(f"agent {agent} never held {expected!r} (last: {r.text})")


# --- templates -----------------------------------------------------------------


def test_put_and_get_text_template(service):
    r = put_text_agent(service, "worker", WORKER_ASL)
    assert r.status_code == 201
    assert r.json()["sourceKind"] == "text"
    assert put_text_agent(service, "worker", WORKER_ASL).status_code == 200
    assert service.get("/agents/worker").json()["body"] == WORKER_ASL
    assert [t["name"] for t in service.get("/agents").json()] == ["worker"]


def test_put_blocks_template(service):
    doc = json.loads((FIXTURES / "ping.blocks.json").read_text())
    r = service.put("/agents/ping", json={"sourceKind": "blocks", "body": doc})
    assert r.status_code == 201


def test_put_template_with_bad_source(service):
    r = put_text_agent(service, "broken", "+!g <- a(.")
    assert r.status_code == 400
    diags = r.json()["diagnostics"]
    assert diags and diags[0]["line"] == 1
    assert service.get("/agents/broken").status_code == 404


def test_delete_template(service):
    put_text_agent(service, "worker", WORKER_ASL)
    assert service.delete("/agents/worker").status_code == 204
    assert service.delete("/agents/worker").status_code == 404


# --- compile preview ---------------------------------------------------------------


def test_compile_preview_golden(service):
    doc = json.loads((FIXTURES / "ping.blocks.json").read_text())
    r = service.post("/compile", json=doc)
    assert r.status_code == 200
    assert r.json()["diagnostics"] == []
    assert r.json()["source"] == (FIXTURES / "ping.golden.asl").read_text()


def test_compile_preview_accepts_thing_blocks(service):
    # documents from editors with TD-driven categories compile server-side
    # because affordance blocks carry their wiring as mutation data
    doc = {
        "formatVersion": 1, "agentName": "switcher",
        "topBlocks": [{
            "id": "p1", "type": "plan", "fields": {"TRIGGER_KIND": "wants"},
            "inputs": {
                "TRIGGER": {"id": "t", "type": "value_atom",
                            "fields": {"NAME": "go"}},
                "BODY": {
                    "id": "s", "type": "thing_lamp_invoke_toggle",
                    "mutation": {"href": "http://lamp.local/actions/toggle",
                                 "httpMethod": "POST",
                                 "affordanceKind": "invokeaction",
                                 "thingId": "urn:example:lamp-1"}}}}],
    }
    r = service.post("/compile", json=doc)
    assert r.status_code == 200
    assert 'wot:invokeaction("http://lamp.local/actions/toggle", "POST")' \
        in r.json()["source"]


def test_compile_preview_invalid_blocks(service):
    doc = {"formatVersion": 1, "agentName": "x", "topBlocks": [
        {"id": "b1", "type": "init_goal"}]}
    r = service.post("/compile", json=doc)
    assert r.status_code == 400
    body = r.json()
    assert body["source"] is None
    assert any(d["code"] == "MissingInput" for d in body["diagnostics"])


# --- configurations ---------------------------------------------------------------


def test_malformed_json_bodies_are_400(service):
    headers = {"Content-Type": "application/json"}
    assert service.post("/compile", content=b"{nope", headers=headers).status_code == 400
    assert service.put("/agents/x", content=b"[1,", headers=headers).status_code == 400
    assert service.put("/configurations/x", content=b"", headers=headers).status_code == 400
    assert service.post("/runs", content=b"junk", headers=headers).status_code == 400


def test_configuration_crud_and_validation(service):
    r = service.put("/configurations/pair", json={
        "entries": [{"template": "worker", "count": 2},
                    {"template": "boss"}]})
    assert r.status_code == 201
    entries = service.get("/configurations/pair").json()["entries"]
    assert entries[0] == {"template": "worker", "baseName": "worker", "count": 2}
    assert entries[1]["count"] == 1

    assert service.put("/configurations/bad", json={"entries": []}).status_code == 400
    assert service.put("/configurations/bad", json={
        "entries": [{"template": "w", "count": 0}]}).status_code == 400
    # worker count 2 expands to worker_1/worker_2; clashing baseName is caught
    assert service.put("/configurations/bad", json={
        "entries": [{"template": "a", "baseName": "x", "count": 2},
                    {"template": "b", "baseName": "x_1"}]}).status_code == 400
    assert service.delete("/configurations/pair").status_code == 204


# --- run lifecycle ------------------------------------------------------------------


def test_full_lifecycle_with_counts(service):
    assert put_text_agent(service, "worker", WORKER_ASL).status_code == 201
    assert put_text_agent(service, "boss", BOSS_ASL).status_code == 201
    assert service.put("/configurations/team", json={
        "entries": [{"template": "boss", "count": 1},
                    {"template": "worker", "count": 2}]}).status_code == 201

    r = service.post("/runs", json={"configuration": "team"})
    assert r.status_code == 201
    run_id = r.json()["runId"]

    wait_for_beliefs(service, run_id, "boss", "bossy")
    wait_for_beliefs(service, run_id, "worker_1", "ready(1)")
    wait_for_beliefs(service, run_id, "worker_2", "ready(1)")

    assert service.get(f"/runs/{run_id}").json()["status"] == "running"
    log = service.get(f"/runs/{run_id}/log").json()
    assert any("spawned" in line for line in log["lines"])
    more = service.get(f"/runs/{run_id}/log", params={"since": log["next"]}).json()
    assert more["lines"] == []

    stopped = service.delete(f"/runs/{run_id}")
    assert stopped.status_code == 200
    deadline = time.monotonic() + 1.0
    while service.get(f"/runs/{run_id}").json()["status"] != "stopped":
        assert time.monotonic() < deadline, "stop took more than a second"
        time.sleep(0.02)
    assert service.delete(f"/runs/{run_id}").status_code == 410
    assert service.get(f"/runs/{run_id}/agents/boss/beliefs").status_code == 410


def test_run_error_statuses(service):
    assert service.post("/runs", json={"configuration": "ghost"}).status_code == 404
    service.put("/configurations/missing_template", json={
        "entries": [{"template": "nobody"}]})
    r = service.post("/runs", json={"configuration": "missing_template"})
    assert r.status_code == 409
    assert service.get("/runs/nope").status_code == 404
    assert service.delete("/runs/nope").status_code == 404
    put_text_agent(service, "worker", WORKER_ASL)
    run = None
    try:
        service.put("/configurations/solo", json={"entries": [{"template": "worker"}]})
        run = service.post("/runs", json={"configuration": "solo"}).json()["runId"]
        assert service.get(f"/runs/{run}/agents/ghost/beliefs").status_code == 404
    finally:
        if run:
            service.delete(f"/runs/{run}")


def test_capacity_limit(tmp_path):
    app = create_runtime_app(tmp_path, max_runs=1)
    client = TestClient(app)
    try:
        put_text_agent(client, "worker", WORKER_ASL)
        client.put("/configurations/solo", json={"entries": [{"template": "worker"}]})
        first = client.post("/runs", json={"configuration": "solo"})
        assert first.status_code == 201
        second = client.post("/runs", json={"configuration": "solo"})
        assert second.status_code == 429
        client.delete(f"/runs/{first.json()['runId']}")
        third = client.post("/runs", json={"configuration": "solo"})
        assert third.status_code == 201
    finally:
        app.state.runs.stop_all()


def test_isolation_between_concurrent_runs(tmp_path):
    app = create_runtime_app(tmp_path)
    client = TestClient(app)
    try:
        # alpha messages a name that exists only within its own run
        put_text_agent(client, "alpha",
                       "!go. +!go <- .send(beta, tell, hello(1)); +sent.")
        put_text_agent(client, "beta", "")
        client.put("/configurations/duo", json={
            "entries": [{"template": "alpha"}, {"template": "beta"}]})
        a = client.post("/runs", json={"configuration": "duo"}).json()["runId"]
        b = client.post("/runs", json={"configuration": "duo"}).json()["runId"]
        assert a != b
        wait_for_beliefs(client, a, "beta", "hello(1)")
        wait_for_beliefs(client, b, "beta", "hello(1)")
        runs = app.state.runs
        for run_id in (a, b):
            trace = runs.live[run_id].container.message_trace
            assert all(t.message.receiver in
                       runs.live[run_id].container.agents for t in trace)
        assert len(runs.live[a].container.message_trace) >= 1
        assert len(runs.live[b].container.message_trace) >= 1
    finally:
        app.state.runs.stop_all()


def test_stopping_one_run_leaves_the_other_alone(tmp_path):
    app = create_runtime_app(tmp_path)
    client = TestClient(app)
    try:
        put_text_agent(client, "worker", WORKER_ASL)
        client.put("/configurations/solo", json={"entries": [{"template": "worker"}]})
        a = client.post("/runs", json={"configuration": "solo"}).json()["runId"]
        b = client.post("/runs", json={"configuration": "solo"}).json()["runId"]
        client.delete(f"/runs/{a}")
        assert client.get(f"/runs/{a}").json()["status"] == "stopped"
        assert client.get(f"/runs/{b}").json()["status"] == "running"
        wait_for_beliefs(client, b, "worker", "ready(1)")
    finally:
        app.state.runs.stop_all()


def test_run_with_unreachable_workspace_still_starts(tmp_path):
    # TDs resolve at run start best-effort; a dead repository is a logged
    # warning, not a failed start (things may come online later)
    app = create_runtime_app(tmp_path, td_repo_url="http://127.0.0.1:1")
    client = TestClient(app)
    try:
        put_text_agent(client, "worker", WORKER_ASL)
        client.put("/configurations/solo", json={
            "entries": [{"template": "worker"}], "workspace": "lab"})
        r = client.post("/runs", json={"configuration": "solo"})
        assert r.status_code == 201
        run_id = r.json()["runId"]
        log = client.get(f"/runs/{run_id}/log").json()["lines"]
        assert any("unavailable" in line for line in log)
    finally:
        app.state.runs.stop_all()


def test_restart_preserves_templates_and_stops_runs(tmp_path):
    app = create_runtime_app(tmp_path)
    client = TestClient(app)
    put_text_agent(client, "worker", WORKER_ASL)
    client.put("/configurations/solo", json={"entries": [{"template": "worker"}]})
    run_id = client.post("/runs", json={"configuration": "solo"}).json()["runId"]
    assert client.get(f"/runs/{run_id}").json()["status"] == "running"
    # simulate process death: threads die, the on-disk record still says running
    for handle in app.state.runs.live.values():
        handle.stop()

    reborn = create_runtime_app(tmp_path)
    client2 = TestClient(reborn)
    assert client2.get("/agents/worker").json()["body"] == WORKER_ASL
    assert client2.get("/configurations/solo").status_code == 200
    record = client2.get(f"/runs/{run_id}").json()
    assert record["status"] == "stopped"
    log = client2.get(f"/runs/{run_id}/log").json()
    assert log["lines"] == []
