import json

import pandas as pd
import pytest

from app.cli import EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE, main
from app.core.graph import load_edge_list, write_edge_list
from tests.conftest import path_graph, star_graph


def _write(tmp_path, name, g):
    path = tmp_path / name
    with open(path, "w") as fh:
        write_edge_list(g, fh)
    return str(path)


def _read_graph(path):
    with open(path) as fh:
        return load_edge_list(fh)


def test_gen_models(tmp_path):
    out = tmp_path / "reg.txt"
    assert main(["gen", "--model", "regular:3", "--n", "10", "--seed", "1", "--out", str(out)]) == EXIT_OK
    g = _read_graph(out)
    assert g.n == 10 and g.degrees.max() <= 3

    out = tmp_path / "er.txt"
    assert main(["gen", "--model", "er", "--n", "100", "--m", "200", "--seed", "7", "--out", str(out)]) == EXIT_OK
    assert _read_graph(out).m == 200

    out = tmp_path / "poi.txt"
    assert main(["gen", "--model", "poisson:2", "--n", "1000", "--seed", "3", "--out", str(out)]) == EXIT_OK
    assert _read_graph(out).n == 1000


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for out in (a, b):
        main(["gen", "--model", "poisson:3", "--n", "200", "--seed", "5", "--out", str(out)])
    assert a.read_text() == b.read_text()


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--model", "binomial:3", "--n", "10"],
        ["gen", "--model", "er", "--n", "10"],
        ["gen", "--n", "10"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(argv):
    assert main(argv) == EXIT_USAGE


def test_balance_exact_and_eps(tmp_path):
    p3 = _write(tmp_path, "p3.txt", path_graph(3))
    out, csv = tmp_path / "p3.json", tmp_path / "p3.csv"
    assert main(["balance", p3, "--mode", "exact", "--out", str(out), "--csv", str(csv)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["loads"] == pytest.approx([2 / 3] * 3, abs=1e-9)
    assert payload["balanced"]
    assert payload["config"]["mode"] == "exact"
    theta = sorted(payload["theta"])
    assert [t[:2] for t in theta] == [[0, 1], [1, 0], [1, 2], [2, 1]]
    assert [t[2] for t in theta] == pytest.approx([1 / 3, 2 / 3, 2 / 3, 1 / 3], abs=1e-9)
    assert payload["version"]
    frame = pd.read_csv(csv)
    assert list(frame.columns) == ["vertex", "load"]

    k2 = _write(tmp_path, "k2.txt", path_graph(2))
    out = tmp_path / "k2.json"
    assert main(["balance", k2, "--mode", "eps", "--eps", "0.5", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["loads"] == pytest.approx([0.5, 0.5])
    assert main(["balance", k2, "--mode", "eps"]) == EXIT_USAGE


def test_balance_regular_sample(tmp_path):
    graph = tmp_path / "r3.txt"
    main(["gen", "--model", "regular:3", "--n", "60", "--seed", "4", "--out", str(graph)])
    out = tmp_path / "r3.json"
    assert main(["balance", str(graph), "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["loads"] == pytest.approx([1.5] * 60, abs=1e-6)


def test_balance_non_convergence_exit_code(tmp_path, monkeypatch):
    from app.utils.exceptions import ConvergenceError

    def fail(*args, **kwargs):
        raise ConvergenceError("eps schedule did not settle", 1.0, 80)

    monkeypatch.setattr("app.cli.exact_loads", fail)
    p3 = _write(tmp_path, "p3.txt", path_graph(3))
    assert main(["balance", p3]) == EXIT_NOT_CONVERGED


def test_malformed_graph_file(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1 1\n")
    assert main(["balance", str(bad)]) == EXIT_USAGE
    assert main(["density", str(tmp_path / "missing.txt")]) == EXIT_USAGE


def test_density(tmp_path):
    star = _write(tmp_path, "star.txt", star_graph(3))
    for extra in ([], ["--brute"]):
        out = tmp_path / "d.json"
        assert main(["density", star, "--out", str(out)] + extra) == EXIT_OK
        payload = json.loads(out.read_text())
        assert (payload["rho_num"], payload["rho_den"]) == (3, 4)
        assert payload["H"] == [0, 1, 2, 3]
    out, csv = tmp_path / "dec.json", tmp_path / "dec.csv"
    assert main(["density", star, "--decompose", "--out", str(out), "--csv", str(csv)]) == EXIT_OK
    assert json.loads(out.read_text())["blocks"] == [{"density_num": 3, "density_den": 4, "vertices": [0, 1, 2, 3]}]
    assert pd.read_csv(csv)["block"].tolist() == [0, 0, 0, 0]


def test_predict_regular_law(tmp_path):
    out, csv = tmp_path / "pred.json", tmp_path / "pred.csv"
    argv = [
        "predict", "--model", "regular:3", "--t-grid", "1.0,1.6", "--pool-size", "1000",
        "--samples", "10000", "--seed", "1", "--rho", "--rho-tol", "0.01", "--out", str(out), "--csv", str(csv),
    ]
    assert main(argv) == EXIT_OK
    payload = json.loads(out.read_text())
    phi = {round(row["t"], 6): row["phi"] for row in payload["curve"]}
    assert phi[1.0] == pytest.approx(0.5, abs=0.01)
    assert phi[1.6] == pytest.approx(0.0, abs=0.005)
    assert payload["rho_mu"] == pytest.approx(1.5, abs=0.02)
    assert pd.read_csv(csv)["tail"].tolist() == [1.0, 0.0]


def test_compare_regular_law(tmp_path):
    out, csv = tmp_path / "cmp.json", tmp_path / "cmp.csv"
    argv = [
        "compare", "--model", "regular:3", "--n-grid", "50,200", "--replicates", "2", "--seed", "3",
        "--t-grid", "0.01:3:0.25", "--pool-size", "1000", "--samples", "10000", "--rho-tol", "0.01",
        "--out", str(out), "--csv", str(csv),
    ]
    assert main(argv) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["monotone"]
    assert payload["rho_mu"] == pytest.approx(1.5, abs=0.02)
    rows = pd.read_csv(csv)
    assert len(rows) == 4
    assert (rows["rho_num"] == 3).all() and (rows["rho_den"] == 2).all()
    assert rows["kolmogorov"].max() == 0.0


def test_compare_poisson_law(tmp_path):
    out, csv = tmp_path / "cmp.json", tmp_path / "cmp.csv"
    argv = [
        "compare", "--model", "poisson:2", "--n-grid", "100,200", "--replicates", "2", "--seed", "3",
        "--t-grid", "0.01:3:0.25", "--pool-size", "1000", "--samples", "10000", "--rho-tol", "0.01",
        "--out", str(out), "--csv", str(csv),
    ]
    assert main(argv) == EXIT_OK
    payload = json.loads(out.read_text())
    assert 1 - 0.05 <= payload["rho_mu"] <= 2
    rows = pd.read_csv(csv)
    assert len(rows) == 4
    assert ((rows["kolmogorov"] >= 0) & (rows["kolmogorov"] <= 1)).all()


def test_bound_from_model_and_file(tmp_path):
    out = tmp_path / "z.json"
    assert main(["bound", "--model", "regular:3", "--n", "200", "--t", "2", "--theta", "1", "--out", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["delta"] == 2.0**-9
    assert payload["f_delta"] < 1

    degrees = tmp_path / "deg.txt"
    degrees.write_text(" ".join(["3"] * 200))
    out = tmp_path / "z2.json"
    assert main(["bound", "--degrees", str(degrees), "--t", "2", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["delta"] == payload["delta"]
    assert main(["bound", "--model", "regular:3", "--n", "200", "--t", "1"]) == EXIT_USAGE


def test_bound_dense_count_csv(tmp_path):
    out, csv = tmp_path / "counts.json", tmp_path / "counts.csv"
    argv = ["bound", "--model", "regular:3", "--n", "12", "--seed", "1", "--k-grid", "2,3", "--r-grid", "1,2"]
    argv += ["--mc-samples", "500", "--out", str(out), "--csv", str(csv)]
    assert main(argv) == EXIT_OK
    frame = pd.read_csv(csv)
    assert list(frame.columns) == ["k", "r", "theta", "log_bound", "bound", "mc_mean", "mc_stderr"]
    assert len(frame) == 4
    assert (frame["mc_mean"] <= frame["bound"] + 3 * frame["mc_stderr"]).all()
    payload = json.loads(out.read_text())
    assert len(payload["dense_counts"]) == 4
    assert "delta" not in payload

    assert main(["bound", "--model", "regular:3", "--n", "12"]) == EXIT_USAGE
