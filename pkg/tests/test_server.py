"""Tests for the contract-design REST API server (twincontract.server).

Run: pytest tests/test_server.py -v
Requires: pip install -e ".[dev,server]"
"""

import pytest
from fastapi.testclient import TestClient

from twincontract.experiments.scenario import load_default_scenario
from twincontract.server import routes
from twincontract.server.app import app

TWO_TYPES = {"economics": {"thetas": [1e11, 3e11], "probabilities": [0.4, 0.6]}}


@pytest.fixture(autouse=True)
def default_state():
    """Pin the server to the shipped scenario whatever TWINCONTRACT_SCENARIO says."""
    app.state.scenario = load_default_scenario()


@pytest.fixture
def client():
    with TestClient(app) as c:
        yield c


# ── Health / scenario ─────────────────────────────────────────────────────────

def test_health(client):
    """Verify health reports the default scenario."""
    r = client.get("/health")
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ok"
    assert body["scenario"]["name"] == "default"
    assert body["scenario"]["types"] == 4


def test_default_scenario_round_trips_as_request_body(client):
    """Verify GET /v1/scenarios/default is accepted back as an inline scenario."""
    r = client.get("/v1/scenarios/default")
    assert r.status_code == 200
    body = r.json()
    assert body["economics"]["theta_base"] == 1e11

    design = client.post("/v1/contracts/design", json={"scenario": body})
    assert design.status_code == 200
    assert design.json()["scenario_digest"] == load_default_scenario().digest


# ── Design ────────────────────────────────────────────────────────────────────

def test_design_default(client):
    """Verify the default design is asymmetric, ordered and leaves type 1 no surplus."""
    r = client.post("/v1/contracts/design", json={})
    assert r.status_code == 200
    body = r.json()
    assert body["mechanism"] == "asymmetric"
    assert body["data_bits"] == 8e8
    assert [item["type_index"] for item in body["items"]] == [1, 2, 3, 4]
    bandwidths = [item["bandwidth_hz"] for item in body["items"]]
    assert bandwidths == sorted(bandwidths)
    assert body["items"][0]["mrp_utility"] == pytest.approx(0.0, abs=1e-9)
    assert body["bunches"] == []


def test_design_inline_scenario(client):
    r = client.post("/v1/contracts/design", json={"scenario": TWO_TYPES, "mechanism": "complete-info"})
    assert r.status_code == 200
    body = r.json()
    assert len(body["items"]) == 2
    assert body["mrp_sum_utility"] == 0.0
    assert [item["probability"] for item in body["items"]] == [0.4, 0.6]


def test_design_data_size_override(client):
    small = client.post("/v1/contracts/design", json={"data_size_mb": 100}).json()
    large = client.post("/v1/contracts/design", json={"data_size_mb": 200}).json()
    assert large["data_bits"] == 1.6e9
    assert large["msp_utility"] < small["msp_utility"]


def test_design_no_admissible_bandwidth(client):
    """Verify a payload no bandwidth can move in time maps to 422."""
    r = client.post("/v1/contracts/design", json={"data_size_mb": 1e6})
    assert r.status_code == 422
    assert r.json()["detail"]["error"] == "No admissible bandwidth"


def test_design_rejects_bad_probabilities(client):
    scenario = {"economics": {"thetas": [1e11, 2e11], "probabilities": [0.5, 0.6]}}
    r = client.post("/v1/contracts/design", json={"scenario": scenario})
    assert r.status_code == 422
    assert "Q_n = 1" in r.text


def test_design_rejects_unknown_mechanism(client):
    r = client.post("/v1/contracts/design", json={"mechanism": "auction"})
    assert r.status_code == 422


def test_design_rejects_oversized_grid(client):
    """Verify grids above TWINCONTRACT_MAX_GRID_POINTS are refused."""
    scenario = {**TWO_TYPES, "grid": {"b_min": 1.0, "b_max": 4e7, "step": 1.0}}
    r = client.post("/v1/contracts/design", json={"scenario": scenario})
    assert r.status_code == 422
    assert "server limit" in r.json()["detail"]["error"]


# ── Feasibility ───────────────────────────────────────────────────────────────

def test_feasibility_default(client):
    """Verify the feasibility matrix is 4x4 with every IR and IC check passing."""
    r = client.post("/v1/contracts/feasibility", json={})
    assert r.status_code == 200
    body = r.json()
    assert body["feasible"] is True
    assert body["ir_satisfied"] == [True] * 4
    assert body["ic_satisfied"] == [True] * 4
    u = body["utilities"]
    assert len(u) == 4 and all(len(row) == 4 for row in u)
    for n in range(4):
        assert u[n][n] >= max(u[n]) - 1e-9


# ── Sweeps ────────────────────────────────────────────────────────────────────

def test_sweep_default_sizes(client):
    r = client.post("/v1/sweeps", json={})
    assert r.status_code == 200
    rows = r.json()["rows"]
    assert len(rows) == 3 * len(load_default_scenario().sweep_data_bits)
    assert all(row["status"] == "ok" for row in rows)


def test_sweep_reports_failed_points(client):
    """Verify a failed data size is reported in-row instead of failing the request."""
    r = client.post("/v1/sweeps", json={"mechanisms": ["asymmetric"], "data_sizes_mb": [1e6, 100]})
    assert r.status_code == 200
    rows = r.json()["rows"]
    assert [row["status"] for row in rows] == ["ok", "no-admissible-bandwidth"]
    assert rows[1]["msp_utility"] is None
    assert rows[1]["bandwidths"] == []


# ── Request ID / auth ─────────────────────────────────────────────────────────

def test_request_id_echoed(client):
    r = client.post("/v1/contracts/design", json={}, headers={"X-Request-ID": "trace-42"})
    assert r.headers["X-Request-ID"] == "trace-42"


def test_request_id_generated(client):
    r = client.post("/v1/contracts/feasibility", json={})
    assert r.headers.get("X-Request-ID")


def test_api_key_enforced(client, monkeypatch):
    """Verify a configured key guards contract routes but not health."""
    monkeypatch.setattr(routes, "_API_KEY", "secret")
    assert client.post("/v1/contracts/design", json={}).status_code == 401
    wrong = client.post("/v1/contracts/design", json={}, headers={"Authorization": "Bearer wrong"})
    assert wrong.status_code == 401
    assert wrong.headers["WWW-Authenticate"] == "Bearer"
    ok = client.post("/v1/contracts/design", json={}, headers={"Authorization": "Bearer secret"})
    assert ok.status_code == 200
    assert client.get("/health").status_code == 200
