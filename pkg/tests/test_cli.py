from __future__ import annotations

import json

import pytest

from heckenew.arith import DomainError
from heckenew.cli import build_parser, load_config, main, parse_chi


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_a2new(capsys):
    code, out, _ = _run(capsys, ["a2new", "--m", "2", "--N", "37", "--k", "2"])
    assert code == 0
    data = json.loads(out)
    assert data["a2"] == "0" and data["dim_new"] == 2 and data["class"] == "nontrivial-vanishing"


def test_a2new_with_character(capsys):
    code, out, _ = _run(capsys, ["a2new", "--m", "2", "--N", "13", "--k", "3", "--chi", "1"])
    assert code == 0
    assert "a2" in json.loads(out)


def test_trace(capsys):
    code, out, _ = _run(capsys, ["trace", "--m", "1", "--N", "1", "--k", "12"])
    assert code == 0
    assert json.loads(out)["trace"] == "1"
    code, out, _ = _run(capsys, ["trace", "--new", "--m", "2", "--N", "11", "--k", "2"])
    assert code == 0
    data = json.loads(out)
    assert data["trace"] == "-2" and data["space"] == "new"


def test_domain_errors_exit_1(capsys):
    code, _, err = _run(capsys, ["a2new", "--m", "2", "--N", "6", "--k", "2"])
    assert code == 1 and err.startswith("error:")
    code, _, _ = _run(capsys, ["trace", "--m", "1", "--N", "5", "--k", "3"])
    assert code == 1
    code, _, _ = _run(capsys, ["trace", "--m", "1", "--N", "5", "--k", "2", "--chi", "x"])
    assert code == 1
    code, _, _ = _run(capsys, ["bounds", "--m", "2", "--N", "10"])
    assert code == 1


def test_io_error_exit_2(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = _run(capsys, ["scan", "--m", "2", "--n-max", "5", "--out", str(blocker / "x" / "r.jsonl")])
    assert code == 2 and "I/O error" in err


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["bounds", "--m", "3", "--N", "5"])
    assert exc.value.code == 2


def test_scan(capsys, tmp_path):
    code, out, _ = _run(capsys, ["scan", "--m", "2", "--n-max", "60", "--out", "r.jsonl",
                                 "--output-dir", str(tmp_path), "--csv"])
    assert code == 0
    summary = json.loads(out)
    assert summary["complete"]
    assert (tmp_path / "r.jsonl").exists() and (tmp_path / "r.csv").exists()
    assert [37, 2] in summary["nontrivial_vanishing"] and [57, 2] in summary["nontrivial_vanishing"]


def test_scan_chi_and_trace_scan(capsys, tmp_path):
    code, _, _ = _run(capsys, ["scan-chi", "--m", "2", "--n-max", "15", "--k-max", "4",
                               "--out", str(tmp_path / "c.jsonl")])
    assert code == 0
    code, out, _ = _run(capsys, ["trace-scan", "--m", "2", "--n-max", "40", "--k-max", "4",
                                 "--out", str(tmp_path / "t.jsonl")])
    assert code == 0
    assert json.loads(out)["k_max"] == 4


def test_bounds(capsys):
    code, out, _ = _run(capsys, ["bounds", "--m", "2", "--N", "1"])
    assert code == 0
    data = json.loads(out)
    assert data["threshold"] == "1/16" and data["c1"] == "0"
    assert isinstance(data["k_cutoff"], int)
    code, out, _ = _run(capsys, ["bounds", "--m", "4", "--N", "10284270", "--envelope"])
    assert code == 0
    data = json.loads(out)
    assert "c0" not in data
    assert data["envelope"]["rounding"] == "upward"
    assert float(data["envelope"]["error_bound"]) < 1 / 192


def test_table_and_oracles(capsys):
    code, out, _ = _run(capsys, ["table", "hw"])
    rows = json.loads(out)
    assert code == 0 and rows[0] == {"D": -3, "h_w": "1/3"} and len(rows) == 33
    code, out, _ = _run(capsys, ["oracle", "tau", "--max", "3"])
    assert json.loads(out)["tau"] == [1, -24, 252]
    code, out, _ = _run(capsys, ["oracle", "dim", "--N", "37", "--k", "2"])
    assert json.loads(out)["dim"] == 2


@pytest.mark.parametrize("cmd", ["trace", "a2new", "scan", "scan-chi", "trace-scan", "bounds", "table", "oracle"])
def test_subcommand_help(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args([cmd, "--help"])
    assert exc.value.code == 0
    assert "usage:" in capsys.readouterr().out


def test_config_precedence(tmp_path):
    cfg_file = tmp_path / "hecke.conf"
    cfg_file.write_text("# settings\nthreads = 3\ncache_mb = 64  # small\noutput_dir = /from/file\n")
    assert load_config({}, env={}, path=cfg_file).threads == 3
    env = {"HECKE_THREADS": "5", "HECKE_CONFIG": str(cfg_file)}
    cfg = load_config({}, env=env)
    assert cfg.threads == 5 and cfg.cache_mb == 64 and str(cfg.output_dir) == "/from/file"
    cfg = load_config({"threads": 7, "cache_mb": None}, env=env)
    assert cfg.threads == 7 and cfg.cache_mb == 64
    cfg = load_config({}, env={})
    assert cfg.threads == 1 and cfg.cache_mb == 256


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("threads\n")
    with pytest.raises(DomainError):
        load_config({}, env={}, path=bad)
    with pytest.raises(DomainError):
        load_config({"threads": 0}, env={})
    with pytest.raises(DomainError):
        load_config({}, env={"HECKE_CACHE_MB": "lots"})


def test_parse_chi():
    assert parse_chi(5, None) is None
    assert parse_chi(15, "1, 2").modulus == 15
    with pytest.raises(DomainError):
        parse_chi(15, "1")
