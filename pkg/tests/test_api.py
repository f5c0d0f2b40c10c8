import pytest
from fastapi.testclient import TestClient

from app.main import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


P3 = {"n": 3, "edges": [[0, 1], [1, 2]]}
STAR = {"n": 4, "edges": [[0, 1], [0, 2], [0, 3]]}


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_generate_graph(client):
    r = client.post("/api/graphs/generate", json={"model": "er", "n": 100, "m": 200, "seed": 7})
    assert r.status_code == 200
    body = r.json()
    assert body["m"] == 200 and len(body["edges"]) == 200


def test_generate_rejects_bad_model(client):
    r = client.post("/api/graphs/generate", json={"model": "binomial:3", "n": 10})
    assert r.status_code == 400


def test_upload_edge_list(client):
    r = client.post("/api/graphs/upload", files={"file": ("g.txt", b"# n=5\n0 1\n1 2\n", "text/plain")})
    assert r.status_code == 200
    assert (r.json()["n"], r.json()["m"]) == (5, 2)
    bad = client.post("/api/graphs/upload", files={"file": ("g.txt", b"0 1\n0 x\n", "text/plain")})
    assert bad.status_code == 400
    assert "line 2" in bad.json()["detail"]


def test_balance_exact(client):
    r = client.post("/api/balance", json={"graph": P3})
    assert r.status_code == 200
    body = r.json()
    assert body["loads"] == pytest.approx([2 / 3] * 3, abs=1e-9)
    assert body["balanced"]
    assert len(body["theta"]) == 4
    assert {(u, v): x for u, v, x in body["theta"]}[(1, 0)] == pytest.approx(2 / 3, abs=1e-9)


def test_balance_eps_needs_eps(client):
    r = client.post("/api/balance", json={"graph": P3, "mode": "eps"})
    assert r.status_code == 400
    r = client.post("/api/balance", json={"graph": {"n": 2, "edges": [[0, 1]]}, "mode": "eps", "eps": 0.5})
    assert r.json()["loads"] == pytest.approx([0.5, 0.5])


def test_balance_rejects_invalid_graph(client):
    r = client.post("/api/balance", json={"graph": {"n": 2, "edges": [[0, 5]]}})
    assert r.status_code == 400


def test_density_and_decomposition(client):
    r = client.post("/api/density", json={"graph": STAR, "decompose": True})
    assert r.status_code == 200
    body = r.json()
    assert (body["rho_num"], body["rho_den"], body["H"]) == (3, 4, [0, 1, 2, 3])
    assert body["blocks"] == [{"density_num": 3, "density_den": 4, "vertices": [0, 1, 2, 3]}]
    brute = client.post("/api/density", json={"graph": STAR, "brute": True}).json()
    assert brute["rho"] == pytest.approx(0.75)


def test_orient(client):
    k4 = {"n": 4, "edges": [[i, j] for i in range(4) for j in range(i + 1, 4)]}
    r = client.post("/api/density/orient", json={"graph": k4, "k": 1})
    assert r.json() == {"orientable": False, "orientation": None, "violating_set": [0, 1, 2, 3]}
    r = client.post("/api/density/orient", json={"graph": k4, "k": 2})
    assert r.json()["orientable"]


def test_phi_endpoint(client):
    r = client.post(
        "/api/predictions/phi",
        json={"model": "regular:3", "t_grid": [1.0, 1.6], "pool_size": 1000, "samples": 10000, "seed": 1},
    )
    assert r.status_code == 200
    points = r.json()["points"]
    assert points[0]["phi"] == pytest.approx(0.5, abs=0.01)
    assert points[0]["branch"] == "delta1"
    assert points[1]["phi"] == pytest.approx(0.0, abs=0.005)


def test_rho_endpoint(client):
    r = client.post(
        "/api/predictions/rho",
        json={"model": "regular:3", "pool_size": 1000, "samples": 10000, "tol": 0.01, "seed": 1},
    )
    assert r.json()["rho"] == pytest.approx(1.5, abs=0.02)


def test_z_bound_endpoint(client):
    r = client.post("/api/bounds/z", json={"t": 2.0, "degrees": [3] * 200})
    assert r.status_code == 200
    body = r.json()
    assert body["delta"] == 2.0**-9
    assert body["lambda"] == pytest.approx(2.718281828459045**3)
    assert client.post("/api/bounds/z", json={"t": 1.0, "degrees": [3] * 200}).status_code == 400
    assert client.post("/api/bounds/z", json={"t": 2.0}).status_code == 400


def test_dense_count_endpoint(client):
    payload = {"k_values": [2, 3], "r_values": [1, 2, 3], "degrees": [3] * 12, "samples": 500, "seed": 2}
    r = client.post("/api/bounds/dense-counts", json=payload)
    assert r.status_code == 200
    body = r.json()
    assert body["n"] == 12 and len(body["rows"]) == 6
    for row in body["rows"]:
        assert row["mc_mean"] <= row["bound"] + 3 * row["mc_stderr"]
    bare = client.post("/api/bounds/dense-counts", json={"k_values": [2], "r_values": [1], "degrees": [3] * 12})
    assert bare.json()["rows"][0]["mc_mean"] is None
    assert client.post("/api/bounds/dense-counts", json={"k_values": [0], "r_values": [1], "degrees": [3] * 12}).status_code == 400


def test_compare_is_queued_and_finishes(client):
    config = {
        "model": "regular:3",
        "n_grid": [50],
        "replicates": 2,
        "seed": 2,
        "t_grid": [1.01, 1.51],
        "pool_size": 1000,
        "samples": 10000,
        "rho_tol": 0.01,
    }
    r = client.post("/api/experiments/compare", json=config)
    assert r.status_code == 202
    task_id = r.json()["task_id"]
    status = client.get(f"/api/experiments/{task_id}").json()
    assert status["status"] == "finished"
    assert status["result"]["rho_mu"] == pytest.approx(1.5, abs=0.02)
    assert [row["rho"] for row in status["result"]["rows"]] == [1.5, 1.5]


def test_compare_rejects_bad_config(client):
    r = client.post("/api/experiments/compare", json={"model": "regular:3", "n_grid": []})
    assert r.status_code == 422
