import json
import subprocess
import sys

import numpy as np
import pytest

from symdet.cli import main


@pytest.fixture
def ones_csv(tmp_path):
    path = tmp_path / "J3.csv"
    np.savetxt(path, np.ones((3, 3)), delimiter=",")
    return str(path)


def write_json(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def parse_kv(text):
    return dict(line.split("=", 1) for line in text.split())


def test_exact(ones_csv, capsys):
    assert main(["exact", "--matrix", ones_csv]) == 0
    out = parse_kv(capsys.readouterr().out)
    assert float(out["per"]) == 6.0 and float(out["det"]) == 0.0


def test_estimate(ones_csv, capsys):
    assert main(["estimate", "--matrix", ones_csv, "--estimator", "sdet", "--d", "2",
                 "--samples", "200", "--seed", "3"]) == 0
    out = parse_kv(capsys.readouterr().out)
    assert float(out["per"]) == 6.0
    assert abs(float(out["estimate"]) - 6.0) < 5 * float(out["stderr"])


def test_estimate_independent_denominator(ones_csv, capsys):
    args = ["estimate", "--matrix", ones_csv, "--estimator", "sdet", "--d", "2", "--samples", "20", "--seed", "3"]
    main(args)
    a = capsys.readouterr().out
    main(args + ["--independent-denominator"])
    assert a != capsys.readouterr().out


def test_sdet(tmp_path, capsys):
    layers = np.zeros((4, 2, 2))
    layers[1, 0, 0] = layers[2, 0, 1] = layers[3, 1, 0] = layers[0, 1, 1] = 1.0
    path = write_json(tmp_path, "q.json", {"algebra": "quaternions", "n": 2, "layers": layers.tolist()})
    assert main(["sdet", "--input", path]) == 0
    assert np.allclose(json.loads(capsys.readouterr().out), [0, 1, 0, 0], atol=1e-15)


def test_sdet_custom_algebra(tmp_path, capsys):
    beta = np.zeros((2, 2, 2))
    beta[0, 0, 0] = beta[0, 1, 1] = beta[1, 0, 1] = 1.0
    beta[1, 1, 0] = -1.0
    alg = {"name": "C", "r": 2, "beta": beta.tolist()}
    path = write_json(tmp_path, "c.json", {"algebra": alg, "layers": [[[2.0]], [[3.0]]]})
    assert main(["sdet", "--input", path]) == 0
    assert json.loads(capsys.readouterr().out) == [2.0, 3.0]


def test_mixed_disc(tmp_path, capsys):
    path = write_json(tmp_path, "m.json", {"matrices": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]})
    assert main(["mixed-disc", "--input", path]) == 0
    assert float(parse_kv(capsys.readouterr().out)["D"]) == pytest.approx(0.5)
    path = write_json(tmp_path, "m2.json", {"matrices": [[[2, 0], [0, 3]]], "composition": [2]})
    assert main(["mixed-disc", "--input", path]) == 0
    assert float(parse_kv(capsys.readouterr().out)["D"]) == pytest.approx(6.0)


def test_experiment_and_sweep(tmp_path, capsys):
    cfg = write_json(tmp_path, "e.json", {"matrix_source": "identity", "n": 3, "estimator": "gg-real-gauss",
                                          "samples": 50, "master_seed": 1})
    assert main(["experiment", "--config", cfg, "--output", str(tmp_path / "out")]) == 0
    assert json.loads(capsys.readouterr().out)["exact_permanent"] == 1.0
    assert (tmp_path / "out" / "samples.csv").exists()
    sw = write_json(tmp_path, "s.json", {"d_values": [1], "n_values": [3, 4], "samples": 20})
    assert main(["sweep", "--config", sw]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "kernel backend" in out


@pytest.mark.parametrize("argv_builder", [
    lambda p: ["estimate", "--matrix", p["neg"], "--estimator", "gg-real-gauss", "--samples", "5", "--seed", "1"],
    lambda p: ["estimate", "--matrix", p["ones"], "--estimator", "sdet", "--samples", "0", "--seed", "1"],
    lambda p: ["exact", "--matrix", p["rect"]],
    lambda p: ["experiment", "--config", p["badcfg"]],
    lambda p: ["experiment", "--config", p["garbage"]],
    lambda p: ["sdet", "--input", p["nolayers"]],
    lambda p: ["sdet", "--input", p["badalg"]],
    lambda p: ["mixed-disc", "--input", p["nomats"]],
])
def test_validation_errors_exit_2(argv_builder, tmp_path, ones_csv, capsys):
    neg = tmp_path / "neg.csv"
    np.savetxt(neg, -np.ones((2, 2)), delimiter=",")
    rect = tmp_path / "rect.csv"
    np.savetxt(rect, np.ones((2, 3)), delimiter=",")
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    paths = {
        "ones": ones_csv, "neg": str(neg), "rect": str(rect), "garbage": str(garbage),
        "badcfg": write_json(tmp_path, "b.json", {"matrix_source": "all_ones", "n": 3, "samples": 0}),
        "nolayers": write_json(tmp_path, "nl.json", {"algebra": "reals"}),
        "badalg": write_json(tmp_path, "ba.json", {"algebra": "octonions", "layers": [[[1.0]]]}),
        "nomats": write_json(tmp_path, "nm.json", {}),
    }
    assert main(argv_builder(paths)) == 2
    assert "error:" in capsys.readouterr().err


def test_runtime_error_exit_1(tmp_path, capsys):
    assert main(["exact", "--matrix", str(tmp_path / "missing.csv")]) == 1
    blocker = tmp_path / "file"
    blocker.write_text("")
    cfg = write_json(tmp_path, "e.json", {"matrix_source": "identity", "n": 2, "samples": 2})
    assert main(["experiment", "--config", cfg, "--output", str(blocker / "sub")]) == 1


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "symdet.cli", "exact", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "--matrix" in r.stdout
    r = subprocess.run([sys.executable, "-m", "symdet.cli", "bogus"], capture_output=True, text=True)
    assert r.returncode == 2
