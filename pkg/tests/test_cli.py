import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from gsnkit.caseio import serialize_native
from gsnkit.cli import main
from gsnkit.fixtures import fixture_text, load
from gsnkit.service import CaseService, create_app


@pytest.fixture
def llm_path(tmp_path) -> Path:
    path = tmp_path / "llm.gsn.json"
    path.write_text(fixture_text("llm_robustness"), encoding="utf-8")
    return path


def _run(capsys, *argv) -> tuple[int, dict | None]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else None)


def test_validate_clean_case_exits_zero(capsys, llm_path):
    code, body = _run(capsys, "validate", str(llm_path))
    assert code == 0 and body["data"] == []


def test_validate_incomplete_case_exits_one(capsys, tmp_path):
    path = tmp_path / "bad.gsn.json"
    path.write_text(
        json.dumps(
            {
                "format_version": "1.0",
                "case": {"id": "AC1", "kind": "AssuranceCase"},
                "containers": [{"id": "Arg1", "kind": "Argument", "name": "empty"}],
            }
        ),
        encoding="utf-8",
    )
    code, body = _run(capsys, "validate", str(path))
    assert code == 1
    assert any("lacks a Goal" in d["message"] for d in body["data"])


def test_infer_outputs_result(capsys, llm_path):
    code, body = _run(capsys, "infer", str(llm_path))
    assert code == 0 and body["data"]["converged"] is True


def test_infer_explain(capsys, llm_path):
    code, body = _run(capsys, "infer", str(llm_path), "--explain", "G-attack-resistance:defeated")
    assert code == 0
    assert body["data"][-1]["rule"] == "R9"


def test_infer_explain_not_derived(capsys, llm_path):
    code, _ = _run(capsys, "infer", str(llm_path), "--explain", "G-root:public")
    assert code == 1


def test_export_ttl(capsys, llm_path):
    code = main(["export", str(llm_path), "--format", "ttl"])
    out = capsys.readouterr().out
    assert code == 0 and "@prefix gsn:" in out


def test_import_normalizes_to_canonical(capsys, tmp_path, llm_path):
    ttl_path = tmp_path / "case.ttl"
    main(["export", str(llm_path), "--format", "ttl"])
    ttl_path.write_text(capsys.readouterr().out, encoding="utf-8")
    out_path = tmp_path / "normalized.gsn.json"
    code, body = _run(capsys, "import", str(ttl_path), "--out", str(out_path))
    assert code == 0 and body["data"]["imported"] == 24
    assert out_path.read_text(encoding="utf-8") == serialize_native(load("llm_robustness"))


def test_tick_command(capsys, tmp_path, llm_path):
    hooks_path = tmp_path / "hooks.gsn.json"
    hooks_path.write_text(
        json.dumps(
            {
                "hooks": [
                    {
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
                        },
                    }
                ]
            }
        ),
        encoding="utf-8",
    )
    out_path = tmp_path / "ticked.gsn.json"
    code, body = _run(
        capsys,
        "tick",
        "--case", str(llm_path),
        "--hooks", str(hooks_path),
        "--now", "2025-02-02T00:00:00Z",
        "--out", str(out_path),
    )
    assert code == 0 and body["data"]["hooks_loaded"] == 1
    assert len(body["data"]["fired"]) == 1
    assert "A-H-perturb-2025-02-02" in out_path.read_text(encoding="utf-8")


def test_cli_matches_http_bodies(capsys, llm_path):
    """CLI/HTTP parity: identical data payloads for select and query."""
    client = TestClient(create_app(CaseService.from_document(load("llm_robustness"))))

    _, cli_select = _run(capsys, "select", str(llm_path), "kind:Defeater")
    http_select = client.post("/selector", content="kind:Defeater").json()
    assert cli_select["data"] == http_select["data"]
    assert cli_select["version"] == http_select["version"]

    _, cli_query = _run(capsys, "query", str(llm_path), "--cq", "AE-05",
                        "--param", "cutoff=2024-11-14T00:00:00Z")
    http_query = client.post(
        "/queries/AE-05", json={"params": {"cutoff": "2024-11-14T00:00:00Z"}}
    ).json()
    assert cli_query["data"] == http_query["data"]


def test_cli_error_reporting(capsys, tmp_path):
    missing = tmp_path / "missing.gsn.json"
    missing.write_text("{", encoding="utf-8")
    code = main(["validate", str(missing)])
    err = capsys.readouterr().err
    assert code == 1 and "ParseError" in err
