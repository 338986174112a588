import json
import math

import pytest

from oscint import __version__
from oscint.cli import config_hash, drop_linear, run

QUAD4 = '{"coeffs": [1, 1], "exponents": [2, 4]}'


def _json(capsys, argv, code=0, err=None):
    assert run(argv) == code
    cap = capsys.readouterr()
    if err is not None:
        assert err in cap.err
    return json.loads(cap.out)


def test_decompose(capsys):
    out = _json(capsys, ["decompose", "--input", QUAD4, "--gamma", "2", "--window=-50,50"])
    assert out["meta"]["version"] == __version__
    assert out["meta"]["config"]["gamma"] == 2 and out["meta"]["config"]["tol"] == 1e-6
    assert out["bad0"] == [{"j1": 1, "j2": 2, "lo": -4, "hi": 4}]
    assert out["bad1"] == [{"j1": 1, "j2": 2, "lo": -9, "hi": -2}]
    assert [(c["lo"], c["hi"]) for c in out["components"]] == [(-50, -10), (5, 50)]


def test_multiplier_and_csv(capsys):
    out = _json(capsys, ["multiplier", "--input", '{"coeffs": [1], "exponents": [3]}', "--xi", "0,1"])
    assert out["records"][0]["im"] == pytest.approx(math.pi / 3, abs=1e-6)
    assert run(["multiplier", "--input", QUAD4, "--xi", "0.5", "--format", "csv"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("# version=") and "xi,re,im,abs,err,certified" in text


def test_sup_with_grid(capsys):
    out = _json(capsys, ["sup", "--input", '{"coeffs": [1], "exponents": [3]}', "--grid-k", "8"])
    assert out["certified_fraction"] == 1.0
    assert len(out["records"]) == 2 * 17 + 1


def test_usage_errors(capsys):
    assert run(["multiplier", "--bogus-flag"]) == 2
    assert run(["multiplier", "--input", '{"coeffs": [1], "exponents": [1]}']) == 2
    assert "frequency" in capsys.readouterr().err
    assert run(["multiplier"]) == 2
    assert run(["decay", "--input", QUAD4, "--component", "9"]) == 2


def test_drop_linear(capsys):
    out = _json(capsys, ["multiplier", "--drop-linear", "--xi", "1",
                         "--input", '{"coeffs": [5, 1], "exponents": [1, 3]}'], err="dropped linear term")
    assert out["fewnomial"] == {"coeffs": [1.0], "exponents": [3]}
    assert drop_linear({"coeffs": [2.0], "exponents": [1]}) == {"coeffs": [], "exponents": []}


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"xi": "2", "tol": 1e-5}))
    out = _json(capsys, ["multiplier", "--config", str(cfg), "--input", QUAD4])
    assert [r["xi"] for r in out["records"]] == [2.0]
    out2 = _json(capsys, ["multiplier", "--config", str(cfg), "--input", QUAD4, "--xi", "3"])
    assert [r["xi"] for r in out2["records"]] == [3.0]
    assert out["meta"]["config_hash"] != out2["meta"]["config_hash"]
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert run(["multiplier", "--config", str(cfg), "--input", QUAD4]) == 2


def test_config_hash_ignores_output_settings():
    base = {"seed": 0, "tol": 1e-6}
    assert config_hash(dict(base, output="a", threads=4)) == config_hash(dict(base, output="b", threads=1))
    assert config_hash(base) != config_hash(dict(base, seed=1))


def test_sweep_reproducible(tmp_path, capsys):
    argv = ["sweep", "--exponent-sets", "2,3", "--draws", "2", "--grid-k", "4", "--tol", "1e-5",
            "--format", "csv", "--no-timing", "--threads", "1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(argv + ["--output", str(a)]) == 0
    assert run(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "# config_hash=" in a.read_text()


def test_check_and_decay(capsys):
    out = _json(capsys, ["check", "--instances", "100", "--gammas", "1"])
    assert all(v["failed"] == 0 for v in out["checks"].values())
    out = _json(capsys, ["decay", "--input", '{"coeffs": [1], "exponents": [2]}'])
    assert 0.4 <= out["delta_hat"] <= 0.6


def test_output_file(tmp_path, capsys):
    p = tmp_path / "o.json"
    assert run(["decompose", "--input", QUAD4, "--output", str(p)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(p.read_text())["fewnomial"]["exponents"] == [2, 4]
