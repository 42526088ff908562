import pytest
from fastapi.testclient import TestClient

from xychain.service import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


SMALL_RUN = {"chain": {"n_sites": 8, "gamma": 1.0, "kT": 0.5,
                       "j_profile": {"kind": "exp", "j0": 0.5, "j1": 2.0, "k": 1.0},
                       "h_profile": {"kind": "constant", "j0": 1.0}},
             "t_max": 1.0, "n_samples": 5}

SMALL_SWEEP = {"base": {"chain": {"n_sites": 8, "gamma": 1.0, "kT": 0.0,
                        "j_profile": {"kind": "exp", "j0": 0.5, "j1": 1.0, "k": 0.5},
                        "h_profile": {"kind": "proportional", "lambda": 1.0}},
                        "t_max": 30.0, "n_samples": 61},
               "sweep_variable": "lambda", "values": [0.5, 1.0]}


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


def test_presets_listing(client):
    resp = client.get("/presets")
    assert resp.status_code == 200
    names = {p["name"] for p in resp.json()["presets"]}
    assert {"fig1a", "fig1b", "fig2", "fig3c", "fig5a", "fig6a"} <= names
    for p in resp.json()["presets"]:
        assert p["kind"] in ("run", "sweep")
        assert p["config"]


def test_run_endpoint(client):
    resp = client.post("/run", json=SMALL_RUN)
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["columns"] == ["t", "r", "M", "Sx", "Sy", "Sz", "C"]
    assert len(payload["rows"]) == 5
    assert payload["csv"].startswith("t,r,M,Sx,Sy,Sz,C\n")


def test_run_deterministic(client):
    a = client.post("/run", json=SMALL_RUN).json()["csv"]
    b = client.post("/run", json=SMALL_RUN).json()["csv"]
    assert a == b


def test_run_with_preset_override(client):
    resp = client.post("/run", json={"preset": "fig1a",
                                     "chain": {"n_sites": 12},
                                     "t_max": 1.0, "n_samples": 3})
    assert resp.status_code == 200
    rows = resp.json()["rows"]
    assert len(rows) == 3


def test_sweep_endpoint(client):
    resp = client.post("/sweep", json=SMALL_SWEEP)
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["columns"] == ["value", "C_asym"]
    assert len(payload["rows"]) == 2


def test_bad_config_maps_to_400(client):
    resp = client.post("/run", json={"preset": "no-such-preset"})
    assert resp.status_code == 400
    assert resp.json()["code"] == 1
    bad = {"chain": {"n_sites": 7, "gamma": 1.0,
                     "j_profile": {"kind": "constant", "j0": 1.0},
                     "h_profile": {"kind": "constant", "j0": 1.0}},
           "t_max": 1.0}
    resp = client.post("/run", json=bad)
    assert resp.status_code == 400


def test_verify_endpoint_small(client):
    resp = client.post("/verify", json={"max_n": 4, "t_max": 2.0})
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["passed"] is True
    assert any("Fock-oracle gate" in c["name"] for c in payload["checks"])
    assert "PASS" in payload["report"]
