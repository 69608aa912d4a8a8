import json
import math
import os
import subprocess

import pytest

import vbma


@pytest.fixture(scope="module")
def series():
    return vbma.simulate(n=80, c=15.0, u=0.3, seed=3)


def test_simulate_shapes(series):
    assert len(series["x"]) == 80
    assert set(series["s"]) <= {0, 1}
    assert all(0.0 <= t <= 1.0 for t in series["t_theoretical"])
    again = vbma.simulate(n=80, c=15.0, u=0.3, seed=3)
    assert again["x"] == series["x"]


def test_fit_and_weights(series):
    fits = vbma.fit_collection(series["x"], [1, 2, 3], seed=1)
    assert [f.m for f in fits] == [1, 2, 3]
    for f in fits:
        assert all(b >= a - 1e-8 for a, b in zip(f.elbo_trace, f.elbo_trace[1:]))
        assert len(f.track) == 80
    for w in (vbma.vb_weights(fits), vbma.pe_weights(fits, series["x"]),
              vbma.is_weights(fits, series["x"], samples=200, seed=2)):
        assert math.isclose(sum(w["values"]), 1.0, abs_tol=1e-10)
        assert w["model_ids"] == [1, 2, 3]
    vb = vbma.vb_weights(fits)
    track = vbma.averaged_posterior(fits, vb["values"])
    lo = [min(f.track[t] for f in fits) for t in range(80)]
    hi = [max(f.track[t] for f in fits) for t in range(80)]
    assert all(a <= v <= b for a, v, b in zip(lo, track, hi))
    labels = vbma.classify(track)
    assert len(labels) == 80


def test_fit_round_trip(series):
    f = vbma.fit(series["x"], 2, seed=4)
    g = vbma.FitResult.from_json(f.to_json())
    assert g.to_json() == f.to_json()
    assert g.elbo == f.elbo
    assert len(f.transition) == 2


def test_oracle_and_tv():
    w = vbma.oracle_weights([0.2, 0.8, 0.5], [[0.2, 0.8, 0.5], [0.9, 0.1, 0.4]])
    assert w["values"][0] == pytest.approx(1.0, abs=1e-9)
    assert vbma.total_variation([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)


def test_forward_backward_uniform():
    import numpy as np

    out = vbma.forward_backward(np.zeros(2), np.zeros((2, 2)), np.zeros((3, 2)))
    assert np.allclose(out["marginals"], 0.5)
    assert out["log_normalizer"] == pytest.approx(3 * math.log(2))


def test_errors():
    with pytest.raises(vbma.VbmaError):
        vbma.fit([0.1, 0.2, 0.3], 0)
    with pytest.raises(ValueError):
        vbma.classify([0.5], threshold=1.0)


def test_benchmark_smoke():
    rep = vbma.benchmark(replicates=1, n=40, max_components=2, is_samples=50)
    assert rep["replicates_ok"] == 1
    assert "VB" in rep["methods"]


def test_cli_in_process_and_binary(tmp_path):
    out = tmp_path / "sim"
    assert vbma.cli(["--seed", "1", "--out-dir", str(out), "simulate", "--replicates", "1", "--n", "20"]) == 0
    assert (out / "sim_000.csv").exists()
    manifest = json.loads((out / "simulate.manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert vbma.cli(["bogus"]) == 2
    exe = os.environ.get("VBMA_CLI")
    if exe:
        res = subprocess.run([exe, "--version"], capture_output=True, text=True)
        assert res.returncode == 0
        assert vbma.__version__ in res.stdout
