import json

import pytest
from fastapi.testclient import TestClient

from blockspeak.services import create_tdrepo_app

LAMP_TD = {
    "id": "urn:example:lamp-1",
    "title": "lamp",
    "base": "http://lamp.local",
    "properties": {"on": {"type": "boolean", "forms": [{"href": "/properties/on"}]}},
    "actions": {"toggle": {"forms": [{"href": "/actions/toggle"}]}},
}


@pytest.fixture()
def repo(tmp_path):
    return TestClient(create_tdrepo_app(tmp_path))


def test_crud_roundtrip(repo):
    assert repo.put("/workspaces/lab").status_code == 201
    assert repo.put("/workspaces/lab").status_code == 200  # idempotent
    r = repo.post("/workspaces/lab/things", json=LAMP_TD)
    assert r.status_code == 201
    assert r.headers["Location"].startswith("/workspaces/lab/things/")
    listing = repo.get("/workspaces/lab/things")
    assert listing.status_code == 200
    assert listing.json() == [LAMP_TD]
    assert repo.get("/workspaces").json() == ["lab"]


def test_served_body_is_byte_identical(repo):
    repo.put("/workspaces/lab")
    raw = b'{"id": "urn:x",\n  "title":    "spacey"  }'
    assert repo.post("/workspaces/lab/things", content=raw).status_code == 201
    got = repo.get("/workspaces/lab/things/urn:x")
    assert got.status_code == 200
    assert got.content == raw
    assert repo.get("/workspaces/lab/things").content == b"[" + raw + b"]"


def test_post_invalid_td(repo):
    repo.put("/workspaces/lab")
    r = repo.post("/workspaces/lab/things", json={"id": "urn:x"})
    assert r.status_code == 400
    assert "title" in r.json()["diagnostics"][0]
    r = repo.post("/workspaces/lab/things", content=b"{nope")
    assert r.status_code == 400


def test_unknown_workspace_404(repo):
    assert repo.get("/workspaces/nope/things").status_code == 404
    assert repo.post("/workspaces/nope/things", json=LAMP_TD).status_code == 404
    assert repo.delete("/workspaces/nope").status_code == 404


def test_duplicate_thing_conflict(repo):
    repo.put("/workspaces/lab")
    assert repo.post("/workspaces/lab/things", json=LAMP_TD).status_code == 201
    assert repo.post("/workspaces/lab/things", json=LAMP_TD).status_code == 409


def test_get_by_location_header(repo):
    repo.put("/workspaces/lab")
    location = repo.post("/workspaces/lab/things", json=LAMP_TD).headers["Location"]
    got = repo.get(location)
    assert got.status_code == 200
    assert got.json() == LAMP_TD


def test_delete_thing_and_workspace(repo):
    repo.put("/workspaces/lab")
    repo.post("/workspaces/lab/things", json=LAMP_TD)
    assert repo.delete("/workspaces/lab/things/urn:example:lamp-1").status_code == 204
    assert repo.get("/workspaces/lab/things").json() == []
    assert repo.delete("/workspaces/lab").status_code == 204
    assert repo.get("/workspaces").json() == []


def test_persistence_across_restart(tmp_path):
    first = TestClient(create_tdrepo_app(tmp_path))
    first.put("/workspaces/lab")
    first.post("/workspaces/lab/things", json=LAMP_TD)
    reborn = TestClient(create_tdrepo_app(tmp_path))
    assert reborn.get("/workspaces").json() == ["lab"]
    assert reborn.get("/workspaces/lab/things").json() == [LAMP_TD]


def test_bad_workspace_name(repo):
    assert repo.put("/workspaces/has space").status_code == 400
