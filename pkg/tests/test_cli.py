import csv

import pytest
import yaml

from mismatch.cli import main
from mismatch.config import load_config, parse_config
from mismatch.errors import ConfigError


def write(tmp_path, data, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


RATE = {
    "kind": "rate",
    "source": {"kind": "bernoulli", "params": {"p": 0.3}},
    "codebook": {"kind": "bernoulli", "params": {"p": 0.9}},
    "distortion": {"kind": "hamming"},
    "D": [0.1, 0.15],
}


def read_csv(path):
    lines = path.read_text().splitlines()
    meta = dict(l[2:].split(": ", 1) for l in lines if l.startswith("# "))
    rows = list(csv.DictReader(l for l in lines if not l.startswith("#")))
    return meta, rows


class TestConfig:
    def test_parse_valid(self):
        cfg = parse_config(RATE, "rate")
        assert cfg.D == [0.1, 0.15]
        assert len(cfg.digest) == 64

    def test_collects_every_problem(self):
        raw = dict(RATE, D=[0.9], distortion={"kind": "nope"})
        with pytest.raises(ConfigError) as exc:
            parse_config(raw, "rate")
        assert len(exc.value.problems) >= 1
        raw = {"kind": "simulate", "source": RATE["source"]}
        with pytest.raises(ConfigError) as exc:
            parse_config(raw, "simulate")
        assert len(exc.value.problems) >= 3

    def test_D_outside_interval(self):
        with pytest.raises(ConfigError, match="outside"):
            parse_config(dict(RATE, D=0.9), "rate")

    def test_kind_mismatch(self):
        with pytest.raises(ConfigError, match="does not match"):
            parse_config(RATE, "simulate")

    def test_entropy_gain_guard(self):
        raw = dict(RATE, kind="entropy-gain", D=0.15, n=[40], trials=10)
        with pytest.raises(ConfigError, match="exceeds"):
            parse_config(raw, "entropy-gain")

    def test_load(self, tmp_path):
        assert load_config(write(tmp_path, RATE)).kind == "rate"


class TestCli:
    def test_rate(self, tmp_path, capsys):
        assert main(["rate", "--config", str(write(tmp_path, RATE)), "--out", str(tmp_path)]) == 0
        meta, rows = read_csv(tmp_path / "rate.csv")
        assert len(rows) == 2 and float(rows[0]["rate_bits"]) > float(rows[1]["rate_bits"])
        assert {"config_sha256", "version", "seed", "budget", "units", "tolerances"} <= set(meta)

    def test_simulate_seed_override(self, tmp_path):
        cfg = dict(RATE, kind="simulate", codebook={"kind": "bernoulli", "params": {"p": 0.5}}, D=0.2, n=[12], trials=5)
        path = write(tmp_path, cfg)
        assert main(["simulate", "--config", str(path), "--out", str(tmp_path / "a"), "--seed", "9"]) == 0
        assert main(["simulate", "--config", str(path), "--out", str(tmp_path / "b"), "--seed", "9", "--threads", "2"]) == 0
        _, a = read_csv(tmp_path / "a" / "simulate.csv")
        _, b = read_csv(tmp_path / "b" / "simulate.csv")
        assert a == b
        assert read_csv(tmp_path / "a" / "simulate.csv")[0]["seed"] == "9"

    def test_validate(self, tmp_path, capsys):
        path = write(tmp_path, {"kind": "validate", "instances": 3, "seed": 2})
        assert main(["validate", "--config", str(path), "--out", str(tmp_path)]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_asymptotics(self, tmp_path):
        cfg = {
            "kind": "asymptotics",
            "source": {"kind": "gaussian", "params": {"variance": 1.0}},
            "distortion": {"kind": "squared"},
            "D": 0.25,
            "tau_sq": [10, 100],
        }
        assert main(["asymptotics", "--config", str(write(tmp_path, cfg)), "--out", str(tmp_path)]) == 0
        _, rows = read_csv(tmp_path / "asymptotics.csv")
        assert float(rows[1]["abs_diff"]) < float(rows[0]["abs_diff"])

    def test_bad_config_exits_1(self, tmp_path, capsys):
        assert main(["rate", "--config", str(write(tmp_path, dict(RATE, D=2.0)))]) == 1
        assert "invalid configuration" in capsys.readouterr().err

    def test_missing_file_exits_1(self, tmp_path):
        assert main(["rate", "--config", str(tmp_path / "absent.yaml")]) == 1

    def test_runtime_error_exits_2(self, tmp_path, capsys):
        cfg = dict(RATE, kind="simulate", codebook={"kind": "bernoulli", "params": {"p": 0.99}}, D=0.0, n=[30], trials=1, b=1.0)
        path = write(tmp_path, cfg)
        assert main(["simulate", "--config", str(path), "--out", str(tmp_path), "--budget", "100"]) == 2
        assert "ResourceError" in capsys.readouterr().err

    def test_missing_config_flag(self):
        with pytest.raises(SystemExit):
            main(["rate"])
