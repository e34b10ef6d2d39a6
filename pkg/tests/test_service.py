import pytest
from fastapi.testclient import TestClient

from immunoscan.panel import serialize_panel_csv
from immunoscan.service import create_app
from immunoscan.synth import generate_panel


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


@pytest.fixture(scope="module")
def panel_csv():
    return serialize_panel_csv(generate_panel(entities=4, features=3, years=4, seed=13))


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["tool"] == "immunoscan"


def test_run_endpoint(client, panel_csv):
    response = client.post(
        "/run",
        json={"panel_csv": panel_csv, "self_id": "SELF", "trials": 30, "seed": 5},
    )
    assert response.status_code == 200
    body = response.json()
    assert set(body["rank_csvs"]) == {"euclidean", "cosine"}
    assert body["report"]["summaries"]["euclidean"]["TGT"]["modal_rank"] == 1


def test_run_rejects_unknown_entity_with_400(client, panel_csv):
    response = client.post(
        "/run",
        json={"panel_csv": panel_csv, "self_id": "NOPE", "trials": 5, "seed": 5},
    )
    assert response.status_code == 400
    body = response.json()
    assert body["error"] == "EntityNotFoundError"
    assert "NOPE" in body["detail"]


def test_run_rejects_bad_config_with_400(client, panel_csv):
    response = client.post(
        "/run",
        json={"panel_csv": panel_csv, "self_id": "SELF", "trials": 0, "seed": 5},
    )
    assert response.status_code == 400
    assert response.json()["error"] == "InvalidParameterError"


def test_run_rejects_malformed_body_with_422(client):
    response = client.post("/run", json={"panel_csv": 7})
    assert response.status_code == 422


def test_run_rejects_broken_csv_with_400(client):
    response = client.post(
        "/run",
        json={"panel_csv": "entity,year\nA,1\n", "self_id": "A", "trials": 5, "seed": 5},
    )
    assert response.status_code == 400
    assert response.json()["error"] == "PanelFormatError"


def test_detect_endpoint(client, panel_csv):
    response = client.post(
        "/detect", json={"panel_csv": panel_csv, "self_id": "SELF", "n": 0.45}
    )
    assert response.status_code == 200
    detectors = response.json()["snapshot"]["detectors"]
    assert len(detectors["lower"]) == 3


def test_synth_endpoint_round_trips(client):
    response = client.post(
        "/synth", json={"entities": 4, "features": 2, "years": 3, "seed": 9}
    )
    assert response.status_code == 200
    text = response.json()["panel_csv"]
    assert text.splitlines()[0] == "entity,year,feature,value"
    assert len(text.splitlines()) == 1 + 4 * 2 * 3


def test_synth_matches_library(client):
    response = client.post(
        "/synth", json={"entities": 4, "features": 2, "years": 3, "seed": 9}
    )
    direct = serialize_panel_csv(generate_panel(entities=4, features=2, years=3, seed=9))
    assert response.json()["panel_csv"] == direct


def test_baseline_endpoint(client, panel_csv):
    response = client.post(
        "/baseline", json={"panel_csv": panel_csv, "self_id": "SELF"}
    )
    assert response.status_code == 200
    body = response.json()
    assert body["report"]["basis"] == "normalized"
    assert body["csv"].startswith("entity,r\n")
    raw = client.post(
        "/baseline",
        json={"panel_csv": panel_csv, "self_id": "SELF", "basis": "raw"},
    )
    assert raw.json()["report"]["basis"] == "raw"
    bad = client.post(
        "/baseline",
        json={"panel_csv": panel_csv, "self_id": "SELF", "basis": "spearman"},
    )
    assert bad.status_code == 400
