import json
import os

import pytest

from coldgate import cli
from coldgate.errors import ValidationError


def test_parse_key_value_config(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# comment\nlx=6\nboundary=open\nu=12.5\n")
    cfg = cli.parse_config_file(str(p))
    assert cfg == {"lx": 6, "boundary": "open", "u": 12.5}


def test_parse_json_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"n": 3}')
    assert cli.parse_config_file(str(p)) == {"n": 3}


def test_parse_config_rejects_bad_line(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("this is not a pair\n")
    with pytest.raises(ValidationError):
        cli.parse_config_file(str(p))


def test_unknown_config_key_exits_2(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("bogus=1\n")
    rc = cli.main(["qc-ghz", "--config", str(p), "--out", str(tmp_path / "o")])
    assert rc == 2


def test_syndrome_table_scenario(tmp_path):
    out = tmp_path / "o"
    rc = cli.main(["qc-syndrome-table", "--out", str(out)])
    assert rc == 0
    lines = (out / "syndrome_table.txt").read_text().splitlines()
    assert len(lines) == 27
    assert lines[0] == "sx,1 110 00 000 a0-b1"
    assert lines[-1] == "sz,9 000 00 010 a0+b1"
    resolved = json.loads((out / "resolved_config.json").read_text())
    assert resolved["scenario"] == "qc-syndrome-table"
    assert resolved["alpha"] == 0.6


def test_env_var_overrides_out(tmp_path, monkeypatch):
    env_dir = tmp_path / "env_out"
    monkeypatch.setenv("COLDGATE_OUT", str(env_dir))
    rc = cli.main(["qc-ghz", "--out", str(tmp_path / "ignored")])
    assert rc == 0
    assert (env_dir / "summary.json").exists()
    assert not (tmp_path / "ignored").exists()


def test_mott_scenario_reproducible(tmp_path):
    cfgp = tmp_path / "c.cfg"
    cfgp.write_text("lx=6\nly=6\nperiod=3.0\n")
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert cli.main(["mott", "--config", str(cfgp), "--out", str(out), "--seed", "4"]) == 0
        outs.append((out / "density.csv").read_bytes())
    assert outs[0] == outs[1]


def test_qft_scenario_with_jobs(tmp_path):
    out = tmp_path / "o"
    rc = cli.main(["qc-qft", "--out", str(out), "--jobs", "2"])
    assert rc == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["max_dev"] < 1e-10


def test_nonconvergent_grid_exits_3(tmp_path):
    cfgp = tmp_path / "c.cfg"
    cfgp.write_text("grid_n=64\nsteps_per_period=200\nn_periods=1\n")
    rc = cli.main(["gate-switching", "--config", str(cfgp), "--out", str(tmp_path / "o")])
    assert rc == 3


def test_accept_subset_and_fault_injection(tmp_path):
    cfgp = tmp_path / "ok.cfg"
    cfgp.write_text("only=perturbative-oracle,syndrome-table\n")
    assert cli.main(["accept", "--config", str(cfgp), "--out", str(tmp_path / "ok")]) == 0
    report = json.loads((tmp_path / "ok" / "accept_report.json").read_text())
    assert report["passed"]
    assert [c["criterion"] for c in report["criteria"]] == ["perturbative-oracle", "syndrome-table"]

    bad = tmp_path / "bad.cfg"
    bad.write_text("only=syndrome-table\ntamper_lx_phase=0.1\n")
    assert cli.main(["accept", "--config", str(bad), "--out", str(tmp_path / "bad")]) == 1
    report = json.loads((tmp_path / "bad" / "accept_report.json").read_text())
    assert not report["passed"]


def test_accept_rejects_unknown_criterion(tmp_path):
    cfgp = tmp_path / "c.cfg"
    cfgp.write_text("only=not-a-criterion\n")
    assert cli.main(["accept", "--config", str(cfgp), "--out", str(tmp_path / "o")]) == 2


def test_benchmark_trajectories_shapes():
    trajs = cli.benchmark_trajectories()
    assert len(trajs) == 5
    assert all(t.tau > 0 for t in trajs)
