"""
Tests for the Flask endpoints using the test client.
"""
import pytest

from malea.app import create_app
from malea.errors import ProviderError, ProviderErrorKind
from malea.providers import ScriptedProvider
from tests.conftest import DRAFT, FINAL_DOCUMENT, FIXTURES


@pytest.fixture
def client():
    return create_app().test_client()


def test_health(client):
    """GET /test answers with a status message"""
    response = client.get("/test")
    assert response.status_code == 200, f"Expected 200, got {response.status_code}"
    assert response.get_json()["message"] == "MALEA backend running", f"Unexpected body {response.get_json()}"


def test_lint_endpoint(client):
    """POST /lint returns the report for a posted document"""
    document = (FIXTURES / "lint" / "seeded.md").read_text(encoding="utf-8")
    response = client.post("/lint", json={"document": document})

    body = response.get_json()
    assert response.status_code == 200, f"Expected 200, got {response.status_code}"
    assert body["stories"] == 20, f"Expected 20 stories, got {body['stories']}"
    assert body["report"]["total"] == 20, f"Expected 20 violations, got {body['report']['total']}"


def test_lint_requires_document(client):
    """A request without a document is a 400"""
    response = client.post("/lint", json={})
    assert response.status_code == 400, f"Expected 400, got {response.status_code}"


def test_decompose_endpoint(client):
    """POST /decompose splits criteria and reports coverage"""
    response = client.post("/decompose", json={"document": FINAL_DOCUMENT})

    body = response.get_json()
    assert response.status_code == 200, f"Expected 200, got {response.status_code}"
    assert [r["id"] for r in body["requirements"]] == ["R-1.1", "R-1.2", "R-2.1", "R-2.2"], \
        f"Unexpected ids {[r['id'] for r in body['requirements']]}"
    assert body["requirements"][3]["placeholders"] == ["retention period"], "Placeholder not exported"
    assert "hits" in body["coverage"], f"Coverage missing: {body['coverage']}"


def test_decompose_llm_without_provider(client):
    """LLM mode needs a provider configured on the app"""
    response = client.post("/decompose", json={"document": DRAFT, "mode": "llm"})
    assert response.status_code == 400, f"Expected 400, got {response.status_code}"


def test_evaluate_bundled_case(client):
    """POST /evaluate with a case name returns its metrics"""
    response = client.post("/evaluate", json={"case": "fake_review", "set": "malea"})

    body = response.get_json()
    assert response.status_code == 200, f"Expected 200, got {response.status_code}"
    assert body["metrics"]["tp"] == 18 and body["metrics"]["fn_a"] == 1, f"Unexpected metrics {body['metrics']}"


def test_evaluate_posted_records(client):
    """Posted gold and mapping records are validated before scoring"""
    gold = [{"id": "G-1", "text": "a"}, {"id": "G-2", "text": "b"}]
    good = client.post("/evaluate", json={"gold": gold, "mapping": [
        {"gen_id": "R-1", "gold_id": "G-1"}, {"gen_id": "R-2", "relevant": True},
    ]})
    bad = client.post("/evaluate", json={"gold": gold, "mapping": [{"gen_id": "R-1", "gold_id": "G-7"}]})

    assert good.status_code == 200, f"Expected 200, got {good.status_code}"
    assert good.get_json()["metrics"]["recall"] == 0.5, f"Unexpected metrics {good.get_json()}"
    assert bad.status_code == 400, f"Expected 400, got {bad.status_code}"
    assert bad.get_json()["findings"], "Findings missing from the error"


def test_evaluate_unknown_case(client):
    """Unknown cases are a 400"""
    response = client.post("/evaluate", json={"case": "chess"})
    assert response.status_code == 400, f"Expected 400, got {response.status_code}"


def test_run_endpoint(run_config, scripted_session):
    """POST /run runs a full session with the app's provider"""
    client = create_app(run_config, scripted_session()).test_client()
    response = client.post("/run", json={"description": "Detects fake reviews.", "title": "Fake review detector"})

    body = response.get_json()
    assert response.status_code == 200, f"Expected 200, got {response.status_code}: {body}"
    assert body["status"] == "Approved" and body["provider_calls"] == 4, f"Unexpected result {body}"
    assert len(body["requirements"]) == 4, f"Expected 4 requirements, got {len(body['requirements'])}"


def test_run_endpoint_provider_failure(run_config):
    """A provider failure is a 502 with the partial message count"""
    provider = ScriptedProvider([ProviderError(ProviderErrorKind.AUTH, "bad key")])
    client = create_app(run_config, provider).test_client()
    response = client.post("/run", json={"description": "Detects fake reviews."})

    assert response.status_code == 502, f"Expected 502, got {response.status_code}"
    assert response.get_json()["messages"] == 1, f"Unexpected body {response.get_json()}"


def test_run_endpoint_needs_config(client):
    """Without a run configuration the server cannot run sessions"""
    response = client.post("/run", json={"description": "Detects fake reviews."})
    assert response.status_code == 500, f"Expected 500, got {response.status_code}"
