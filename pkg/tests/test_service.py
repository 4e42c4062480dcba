import json

import pytest
from fastapi.testclient import TestClient

from gsnkit.caseio import parse_native, serialize_native
from gsnkit.fixtures import load
from gsnkit.service import CaseService, classify_operation, create_app


@pytest.fixture
def client() -> TestClient:
    service = CaseService.from_document(load("llm_robustness"))
    return TestClient(create_app(service))


def test_get_case_returns_canonical_document(client):
    body = client.get("/case").json()
    assert body["version"] == 1
    assert body["data"]["format_version"] == "1.0"
    assert body["data"]["case"]["id"] == "AC-llm"


def test_get_case_settled_layer_carries_derived_flags(client):
    data = client.get("/case").json()["data"]
    flags = {e["id"]: e.get("flags", {}) for e in data["elements"]}
    assert flags["G-attack-resistance"].get("defeated") is True
    authored = client.get("/case", params={"layer": "authored"}).json()["data"]
    flags = {e["id"]: e.get("flags", {}) for e in authored["elements"]}
    assert "defeated" not in flags["G-attack-resistance"]


def test_infer_returns_result_with_overlays(client):
    body = client.post("/infer").json()
    assert body["data"]["converged"] is True
    assert "rule-triggered" in body["data"]["overlays"]
    assert body["data"]["deltas"]


def test_post_element_and_conflict(client):
    created = client.post(
        "/elements", json={"id": "G-extra", "kind": "Goal", "statement": "one more claim"}
    )
    assert created.status_code == 201
    assert created.json()["version"] == 2
    dup = client.post("/elements", json={"id": "G-extra", "kind": "Goal", "statement": "dup"})
    assert dup.status_code == 409
    assert dup.json()["error"]["type"] == "DuplicateIdentifier"


def test_stale_expected_version_conflicts(client):
    stale = client.post(
        "/elements",
        json={"id": "G-race", "kind": "Goal", "statement": "claim", "expected_version": 77},
    )
    assert stale.status_code == 409
    assert stale.json()["error"]["type"] == "StaleVersion"


def test_post_edge_and_delete_element(client):
    client.post("/elements", json={"id": "G-extra", "kind": "Goal", "statement": "one more"})
    edge = client.post(
        "/edges",
        json={"id": "R-extra", "subject": "G-root", "predicate": "supportedBy", "object": "G-extra"},
    )
    assert edge.status_code == 201
    gone = client.delete("/elements/G-extra")
    assert gone.status_code == 200
    doc = client.get("/case", params={"layer": "authored"}).json()["data"]
    assert all(e["id"] != "G-extra" for e in doc["elements"])
    assert all(r["id"] != "R-extra" for r in doc["relationships"])


def test_version_echo_identical_reads(client):
    first = client.post("/queries/AE-01", json={})
    second = client.post("/queries/AE-01", json={})
    assert first.json() == second.json()


def test_selector_endpoint_accepts_raw_dsl(client):
    rows = client.post("/selector", content="kind:Defeater").json()["data"]
    assert [r["id"] for r in rows] == ["D-exfil", "D-jailbreak"]


def test_selector_endpoint_rejects_bad_dsl(client):
    assert client.post("/selector", content="kind:").status_code == 400


def test_query_endpoint_unknown_id(client):
    assert client.post("/queries/ZZ-99", json={}).status_code == 404


def test_whatif_is_read_only(client):
    v0 = client.get("/case").json()["version"]
    body = client.post(
        "/whatif/invalidate", json={"selector": 'kind:Goal & statement~"Attack Resistance"'}
    ).json()
    assert body["version"] == v0
    assert body["data"]["matched"] == ["G-attack-resistance"]
    assert client.get("/case").json()["version"] == v0


def test_export_import_round_trip(client):
    exported = client.get("/case/export", params={"format": "json"}).text
    assert parse_native(exported)
    imported = client.post("/case/import", content=exported)
    assert imported.status_code == 200
    assert imported.json()["version"] == 2
    ttl = client.get("/case/export", params={"format": "ttl"}).text
    assert "@prefix gsn:" in ttl
    back = client.post("/case/import", params={"format": "ttl"}, content=ttl)
    assert back.status_code == 200


def test_hooks_tick_and_template_endpoints(client):
    hook = {
        "id": "H-perturb",
        "trigger": {
            "type": "on_tick",
            "selector": 'kind:Goal & statement~"Perturbation Robustness"',
            "period_days": 30,
            "last_fired": "2025-01-01T00:00:00Z",
        },
        "action": {
            "type": "attach_artefact",
            "target_selector": 'kind:Goal & statement~"Perturbation Robustness"',
            "template": "Perturbation rerun artefact {date}",
        },
    }
    assert client.post("/hooks", json=hook).status_code == 201
    gated = client.post("/tick", json={"now": "2025-01-10T00:00:00Z"}).json()
    assert gated["data"]["fired"] == []
    fired = client.post("/tick", json={"now": "2025-02-02T00:00:00Z"}).json()
    assert len(fired["data"]["fired"]) == 1

    outcome = client.post(
        "/templates/Tmpl-attack-test/instantiate", json={"bindings": {"attack prompt": "DAN 7.0"}}
    ).json()
    assert len(outcome["data"]["created"]) == 2
    doc = client.get("/case", params={"layer": "authored"}).json()["data"]
    ids = {e["id"] for e in doc["elements"]}
    assert all(c in ids for c in outcome["data"]["created"])


def test_overlays_endpoint(client):
    body = client.get("/overlays").json()
    assert "defeated-closure" in body["data"]
    assert "G-attack-resistance" in body["data"]["defeated-closure"]


def test_defeater_toggle_restores_settled_flags(client):
    before = client.get("/case").json()["data"]
    flag_map_before = {e["id"]: e.get("flags", {}) for e in before["elements"]}
    assert flag_map_before["G-attack-resistance"].get("defeated") is True

    authored = client.get("/case", params={"layer": "authored"}).json()["data"]
    defeater = next(e for e in authored["elements"] if e["id"] == "D-jailbreak")
    incident = [
        r
        for r in authored["relationships"]
        if r["subject"] == "D-jailbreak" or r["object"] == "D-jailbreak"
    ]

    client.delete("/elements/D-jailbreak")
    client.post("/infer")
    mid = client.get("/case").json()["data"]
    flags_mid = {e["id"]: e.get("flags", {}) for e in mid["elements"]}
    assert "defeated" not in flags_mid["G-attack-resistance"]

    client.post("/elements", json=defeater)
    for r in incident:
        client.post("/edges", json=r)
    client.post("/infer")
    after = client.get("/case").json()["data"]
    flag_map_after = {e["id"]: e.get("flags", {}) for e in after["elements"]}
    assert flag_map_after == flag_map_before


def test_classify_operation_rules():
    assert classify_operation("kind:Goal") == "read"
    assert classify_operation(json.dumps({"id": "G1", "kind": "Goal", "statement": "x"})) == "update"
    assert classify_operation(json.dumps({"whatif": {"selector": "kind:Goal"}})) == "read"
    assert classify_operation(json.dumps({"hook": {}})) == "update"
    with pytest.raises(Exception):
        classify_operation("??")


def test_classify_endpoint(client):
    body = client.post("/classify", content="kind:Goal").json()
    assert body["data"]["operation"] == "read"


def test_queries_listing_endpoint(client):
    body = client.get("/queries").json()
    ids = [q["id"] for q in body["data"]]
    assert len(ids) == 10 and "AE-01" in ids
    ae05 = next(q for q in body["data"] if q["id"] == "AE-05")
    assert ae05["params"][0]["name"] == "cutoff"
