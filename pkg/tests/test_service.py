"""HTTP surface: payload shapes, the "lambda" alias, error mapping, and
byte-level determinism of seeded endpoints."""

import math

import pytest
from fastapi.testclient import TestClient

from sbmbounds.service.app import create_app

TWO_TRIANGLES = [[0, 1], [0, 2], [1, 2], [3, 4], [3, 5], [4, 5]]


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_thresholds_round_trip(client):
    r = client.post("/thresholds", json={"k": 5, "lambda": -0.25})
    assert r.status_code == 200
    body = r.json()
    assert set(body) == {"k", "lambda", "d_lower", "d_ks", "d_upper", "below_ks_detectable"}
    assert body["lambda"] == -0.25
    assert body["d_ks"] == pytest.approx(16.0)
    assert body["d_lower"] == pytest.approx(2 * math.log(4) / (4 * 0.0625**2) * 0.0625)
    assert body["below_ks_detectable"] is True
    assert body["d_upper"] < body["d_ks"]


def test_thresholds_serializes_infinities(client):
    r = client.post("/thresholds", json={"k": 3, "lambda": 0.0})
    assert r.status_code == 200
    assert b"Infinity" in r.content
    body = r.json()  # std json.loads accepts the Infinity constant
    assert body["d_lower"] == math.inf
    assert body["d_ks"] == math.inf
    assert body["d_upper"] == math.inf
    assert body["below_ks_detectable"] is False


def test_domain_error_maps_to_422(client):
    r = client.post("/thresholds", json={"k": 1, "lambda": 0.5})
    assert r.status_code == 422
    assert r.json()["error"] == "domain"


def test_budget_error_maps_to_400(client):
    r = client.post(
        "/secondmoment", json={"k": 2, "d": 1.0, "lambda": 0.5, "n": 30, "trials": 1}
    )
    assert r.status_code == 400
    assert r.json()["error"] == "budget"


def test_generate_models(client):
    params = {"k": 2, "n": 10, "c_in": 8, "c_out": 1}

    r = client.post("/generate", json={"params": params, "model": "planted", "seed": 3})
    body = r.json()
    assert body["n"] == 10
    assert len(body["labels"]) == 10 and set(body["labels"]) <= {0, 1}
    assert all(0 <= u < v < 10 for u, v in body["edges"])

    r = client.post("/generate", json={"params": params, "model": "er", "seed": 3})
    assert r.json()["labels"] is None

    r = client.post(
        "/generate", json={"params": params, "model": "er_fixed_m", "m": 12, "seed": 3}
    )
    assert len(r.json()["edges"]) == 12

    r = client.post(
        "/generate", json={"params": params, "model": "sbm_fixed_m", "m": 12, "seed": 3}
    )
    body = r.json()
    assert len(body["edges"]) == 12
    assert body["labels"] == [0] * 5 + [1] * 5


def test_generate_is_deterministic(client):
    req = {"params": {"k": 2, "n": 12, "c_in": 6, "c_out": 1}, "model": "planted", "seed": 9}
    a = client.post("/generate", json=req)
    b = client.post("/generate", json=req)
    assert a.content == b.content
    c = client.post("/generate", json={**req, "seed": 10})
    assert c.content != a.content


def test_generate_rejects_bad_model_and_missing_m(client):
    params = {"k": 2, "n": 10, "c_in": 8, "c_out": 1}
    r = client.post("/generate", json={"params": params, "model": "triangle_soup"})
    assert r.status_code == 422 and r.json()["error"] == "domain"
    r = client.post("/generate", json={"params": params, "model": "er_fixed_m"})
    assert r.status_code == 422 and r.json()["error"] == "domain"


def test_detect_finds_planted_cliques(client):
    r = client.post(
        "/detect",
        json={"graph": {"n": 6, "edges": TWO_TRIANGLES}, "k": 2, "c_in": 6, "c_out": 0},
    )
    assert r.json() == {"found": True, "labels": [0, 0, 0, 1, 1, 1]}
    # the (d, lambda) form of the same rates
    r = client.post(
        "/detect",
        json={"graph": {"n": 6, "edges": TWO_TRIANGLES}, "k": 2, "d": 3.0, "lambda": 1.0},
    )
    assert r.json()["found"] is True


def test_detect_reports_absence_and_budget(client):
    r = client.post(
        "/detect", json={"graph": {"n": 6, "edges": []}, "k": 2, "c_in": 6, "c_out": 0}
    )
    assert r.json() == {"found": False, "labels": None}
    r = client.post(
        "/detect",
        json={
            "graph": {"n": 6, "edges": TWO_TRIANGLES},
            "k": 2,
            "c_in": 6,
            "c_out": 0,
            "budget": 2,
        },
    )
    assert r.status_code == 400 and r.json()["error"] == "budget"


def test_phi_certified_and_uncertified(client):
    r = client.post("/phi", json={"k": 2, "d": 4.0, "lambda": 0.5, "restarts": 2})
    body = r.json()
    assert body["negative_certified"] is True
    assert body["phi_value"] <= 1e-8
    assert len(body["certificate"]) == 200
    assert all(len(pair) == 2 for pair in body["certificate"])
    flat = [x for row in body["best_alpha"] for x in row]
    assert all(abs(x - 0.5) < 1e-3 for x in flat)

    r = client.post("/phi", json={"k": 3, "d": 6.0, "lambda": 0.5, "restarts": 2})
    body = r.json()
    assert body["negative_certified"] is False
    assert body["phi_value"] > 0.0


def test_secondmoment_frozen_estimate(client):
    r = client.post(
        "/secondmoment",
        json={"k": 3, "d": 0.5, "lambda": 0.6, "n": 6, "trials": 50, "seed": 0},
    )
    body = r.json()
    assert body["estimate"] == pytest.approx(0.9803193469844603, rel=1e-12)
    assert body["stderr"] == pytest.approx(0.009770256120677407, rel=1e-12)
    assert body["lambda"] == 0.6 and body["trials"] == 50


def test_distinguish_round_trip(client):
    req = {
        "params": {"k": 2, "n": 6, "c_in": 6, "c_out": 0},
        "trials": 12,
        "seed": 2,
    }
    body = client.post("/distinguish", json=req).json()
    assert body["detected_sbm"] == 4 and body["detected_er"] == 0
    assert body["p_good_sbm"] == pytest.approx(4 / 12)
    assert body["mean_overlap"] == 1.0
    assert body["lambda"] == 1.0
    parallel = client.post("/distinguish", json={**req, "workers": 4}).json()
    assert parallel == body


def test_table1_endpoint(client):
    rows = client.post("/table1", json={}).json()["rows"]
    assert len(rows) == 11
    by_k = {row["k"]: row["lambda_star"] for row in rows}
    assert by_k[10] == pytest.approx(-0.008424848023366429, abs=1e-12)
    assert client.post("/table1", json={"ks": [7]}).json()["rows"] == [
        {"k": 7, "lambda_star": pytest.approx(-0.11122260929047414)}
    ]


def test_grid_endpoint_skips_out_of_range(client):
    body = client.post("/grid", json={"ks": [2, 5], "lambdas": [-0.5, 0.5]}).json()
    cells = [(row["k"], row["lambda"]) for row in body["rows"]]
    assert cells == [(2, -0.5), (2, 0.5), (5, 0.5)]
