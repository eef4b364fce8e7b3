import numpy as np
import pytest
from starlette.testclient import TestClient

from degenflux.service import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app, raise_server_exceptions=False) as c:
        yield c


def _config(**overrides):
    cfg = {
        "problem": {
            "theta": 1.5,
            "a": 0.5,
            "alpha": 1.0,
            "beta": 1.0,
            "initial": {"kind": "constant", "cu": 1.0, "cv": 1.0},
        },
        "measurement": {"t_star": 1.99},
    }
    cfg.update(overrides)
    return cfg


POINT_INVERSE = {
    "kind": "point",
    "init": [0.1],
    "lower": [0.02],
    "upper": [0.98],
    "noise_percents": [0.0],
}


def test_request_validation(client):
    assert client.post("/forward", json={}).status_code == 422
    assert client.post("/forward", json={"config": _config(), "bogus": 1}).status_code == 422
    bad = _config()
    bad["problem"]["theta"] = 2.5
    assert client.post("/forward", json={"config": bad}).status_code == 422
    assert client.post("/scan-stability", json={"config": _config(), "count": 1}).status_code == 422


def test_core_error_maps_to_500(client):
    cfg = _config(measurement={"t_star": 0.0001})
    resp = client.post("/measure", json={"config": cfg})
    assert resp.status_code == 500
    assert "0.001" in resp.json()["detail"]


def test_forward_shape(client):
    resp = client.post(
        "/forward", json={"config": _config(), "nx": 21, "times": [0.5, 1.0, 1.5]}
    )
    assert resp.status_code == 200
    data = resp.json()
    assert data["xs"][0] == 0.0 and data["xs"][-1] == 1.0
    assert len(data["xs"]) == 21
    assert data["ts"] == [0.5, 1.0, 1.5]
    assert len(data["u"]) == 3 and len(data["u"][0]) == 21
    assert len(data["v"]) == 3
    assert abs(data["u"][0][0]) <= 1e-10  # boundary condition
    # default times come from the measurement schedule
    resp = client.post("/forward", json={"config": _config(), "nx": 5})
    assert resp.json()["ts"] == [1.99]


def test_measure_ordering(client):
    cfg = _config(
        measurement={"sides": [1, 0], "t1": 0.0, "t2": 1.0, "samples": 5, "seed": 2}
    )
    resp = client.post("/measure", json={"config": cfg})
    assert resp.status_code == 200
    samples = resp.json()["samples"]
    keys = [(s["side"], s["t"]) for s in samples]
    assert keys == sorted(keys)
    assert {s["side"] for s in samples} == {0, 1}


def test_scan_threads_match(client):
    cfg = _config(measurement={"t_star": 1.0})
    body = {"config": cfg, "a_min": 0.2, "a_max": 0.6, "count": 9}
    one = client.post("/scan-stability", json={**body, "threads": 1}).json()["scans"][0]
    two = client.post("/scan-stability", json={**body, "threads": 2}).json()["scans"][0]
    assert one["d_values"] == two["d_values"]
    assert one["a_values"][0] == 0.2 and one["a_values"][-1] == 0.6
    assert set(one["summary"]) == {"min", "argmin", "t", "theta", "alpha", "beta", "max", "flag"}
    assert one["summary"]["max"] == max(one["d_values"])


def test_reconstruct_endpoint(client):
    resp = client.post("/reconstruct", json={"config": _config(inverse=POINT_INVERSE)})
    assert resp.status_code == 200
    result = resp.json()["result"]
    assert abs(result["params"][0] - 0.5) <= 1e-6
    assert result["status"] == "converged"
    assert result["trace"][0]["eval"] >= 1


def test_reconstruct_needs_inverse(client):
    resp = client.post("/reconstruct", json={"config": _config()})
    assert resp.status_code == 422
    assert "inverse" in resp.json()["detail"]


def test_noise_study_endpoint(client):
    resp = client.post("/noise-study", json={"config": _config(inverse=POINT_INVERSE)})
    assert resp.status_code == 200
    rows = resp.json()["rows"]
    assert len(rows) == 1
    assert set(rows[0]) == {"percent", "cost", "iterations", "a_c"}
    assert abs(rows[0]["a_c"] - 0.5) <= 1e-6


def test_noise_study_needs_percents(client):
    inverse = {k: v for k, v in POINT_INVERSE.items() if k != "noise_percents"}
    resp = client.post("/noise-study", json={"config": _config(inverse=inverse)})
    assert resp.status_code == 422
    assert "noise_percents" in resp.json()["detail"]


def test_selftest_endpoint(client):
    resp = client.post("/selftest", json={})
    assert resp.status_code == 200
    data = resp.json()
    assert data["passed"] is True
    assert all(c["passed"] for c in data["checks"])
    assert len(data["checks"]) == 10
    faulty = client.post("/selftest", json={"inject_zero_fault": True}).json()
    assert faulty["passed"] is False
    failed = [c["name"] for c in faulty["checks"] if not c["passed"]]
    assert failed == ["zero-tables"]
