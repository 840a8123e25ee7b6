from __future__ import annotations

import json

import pytest

from deltasob.cli import main
from deltasob.config import ConfigError, RunConfig, load_config
from deltasob.report import SweepReport, format_cell, read_csv


def test_format_cell_round_trips_doubles():
    x = 0.1 + 0.2
    assert float(format_cell(x)) == x
    assert format_cell(1.0) == "1.0000000000000000e+00"
    assert format_cell(True) == "true"
    assert format_cell(float("inf")) == "inf"


def test_config_file_parsing(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# comment\ndims = 2, 3  # trailing\nseed=7\nplot = off\n")
    cfg = load_config(p, {"tol": "1e-8"})
    assert cfg.dims == [2, 3] and cfg.seed == 7 and cfg.plot is False and cfg.tol == 1e-8


def test_config_errors(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("nonsense = 1\n")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(None, {"dims": ""})
    with pytest.raises(ConfigError):
        load_config(None, {"seed": "x"})
    with pytest.raises(ConfigError):
        load_config(None, {"sigma": "1.5"})


def test_digest_ignores_output_settings():
    a = RunConfig().validate()
    b = RunConfig(out="x.csv", jobs=4, plot=False).validate()
    assert a.digest() == b.digest()
    assert RunConfig(seed=1).digest() != a.digest()


def test_report_writes_lf_utf8(tmp_path):
    rep = SweepReport("s", ["a", "b"])
    rep.add(a=1, b=0.5)
    path = tmp_path / "r.csv"
    rep.write_csv(path)
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.startswith(b"a,b\n")
    assert read_csv(path) == [{"a": "1", "b": "5.0000000000000000e-01"}]


def test_empty_dims_exit_two():
    assert main(["check-inequalities", "--dims", ""]) == 2


def test_unknown_key_exit_two():
    assert main(["lq-constants", "--set", "bogus=1"]) == 2


def test_bad_family_exit_two(capsys):
    with pytest.raises(SystemExit) as e:
        main(["sweep-sharpness", "--family", "nope"])
    assert e.value.code == 2


def test_corrupted_kernel_exit_one(tmp_path):
    out = tmp_path / "c.csv"
    code = main(["check-inequalities", "--dims", "3", "--set", "n_random=20", "--set", "kernel_scale=0.5",
                 "--out", str(out), "--no-plot"])
    assert code == 1
    meta = json.loads((tmp_path / "c.csv.meta.json").read_text())
    assert meta["ok"] is False and meta["failures"]


def test_lq_constants_deterministic_with_figure(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["lq-constants", "--out", str(a)]) == 0
    assert main(["lq-constants", "--out", str(b), "--no-plot", "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv.png").stat().st_size > 1000
    assert not (tmp_path / "b.csv.png").exists()
    rows = read_csv(a)
    assert {"target", "sharp", "no-target"} <= {r["flag"] for r in rows}


def test_sweep_csv_schema(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep-sharpness", "--family", "bump", "--dims", "2,3", "--out", str(out), "--no-plot"]) == 0
    header = out.read_text().splitlines()[0]
    assert header == "family,n,t,delta,epsilon,lambda,R,l1,ratio,target,gap,res_tol"
    rows = read_csv(out)
    assert [int(r["n"]) for r in rows] == sorted(int(r["n"]) for r in rows)
    assert max(float(r["gap"]) for r in rows) <= 1e-10


def test_translated_family_skips_the_plane(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["sweep-sharpness", "--family", "translated", "--dims", "2", "--out", str(out), "--no-plot"]) == 0
    assert read_csv(out) == []


def test_stdout_when_no_out(capsys):
    assert main(["brezis-merle"]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("family,alpha_over_pi,delta")
    assert "ok" in captured.err


def test_config_file_via_cli(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("dims = 3\nfatou_max = 3\nchain_points = 200\n")
    out = tmp_path / "m.csv"
    assert main(["target-membership", "--config", str(cfg), "--out", str(out), "--no-plot"]) == 0
    sections = {r["section"] for r in read_csv(out)}
    assert sections == {"defect", "verdict", "domination", "chain", "fatou"}
