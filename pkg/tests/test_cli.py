import csv
import json

import numpy as np
import pytest

from renormqp.cli import default_eps_ladder, main
from renormqp.config import RenormConfig


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("run")
    assert main(["fixed-point", "--out", str(d)]) == 0
    return d


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def manifest(d, command):
    return json.loads((d / f"manifest_{command}.json").read_text())


def test_fixed_point_prints_and_writes(workdir, capsys, tmp_path):
    assert main(["fixed-point", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    a = float(out.split("a = ")[1].split()[0])
    assert -1 < a < 0
    assert (tmp_path / "fixed_point.json").exists()
    m = manifest(tmp_path, "fixed-point")
    assert m["outputs"] == ["fixed_point.json"]
    assert m["config"] == RenormConfig().to_dict()
    assert set(m["versions"]) >= {"renormqp", "numpy", "scipy", "kernels"}


def test_fixed_point_fine_truncation(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n_x": 60, "tol_newton": 1e-14}))
    assert main(["fixed-point", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert float(out.split("residual = ")[1].split()[0]) <= 1e-12


def test_malformed_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{\n "n_x": 40,\n "delta": ,\n}')
    assert main(["fixed-point", "--config", str(cfg), "--out", str(tmp_path)]) == 4
    assert "line 3" in capsys.readouterr().err


def test_bad_arguments_exit_code(tmp_path):
    assert main(["spectrum", "--top", "zero", "--out", str(tmp_path)]) == 4
    assert main(["no-such-command"]) == 4


def test_missing_fixed_point(tmp_path):
    assert main(["slopes", "--out", str(tmp_path)]) == 5
    assert main(["spectrum", "--out", str(tmp_path)]) == 5


def test_print_default_config(capsys):
    assert main(["--print-default-config"]) == 0
    assert json.loads(capsys.readouterr().out) == RenormConfig().to_dict()


def test_spectrum_one_dim(workdir):
    assert main(["spectrum", "--one-dim", "--top", "4", "--out", str(workdir)]) == 0
    rows = read_csv(workdir / "spectrum_1d.csv")
    assert rows[0] == ["j", "re_lambda", "im_lambda"]
    assert abs(float(rows[1][1]) - 4.66920) < 1e-5
    assert len(rows) == 5


def test_spectrum_top_zero(workdir):
    assert main(["spectrum", "--top", "0", "--out", str(workdir)]) == 4


def test_spectrum_sweep_rows(workdir):
    assert main(["spectrum", "--omega-grid", "16", "--top", "4", "--jobs", "1", "--out", str(workdir)]) == 0
    rows = read_csv(workdir / "spectrum_sweep.csv")
    assert len(rows) - 1 == 16 * 4
    assert "spectrum_sweep.csv" in manifest(workdir, "spectrum")["outputs"]


def test_superstable_csv(tmp_path):
    assert main(["superstable", "--n-max", "6", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "superstable.csv")
    assert rows[0] == ["n", "alpha_n", "ratio"]
    assert float(rows[1][1]) == 2.0
    assert float(rows[2][1]) == pytest.approx(1 + np.sqrt(5), abs=1e-15)
    assert abs(float(rows[-1][2]) - 4.6692016) / 4.6692016 <= 0.01


def test_slopes_command(workdir):
    assert main(["slopes", "--n-max", "2", "--out", str(workdir)]) == 0
    rows = read_csv(workdir / "slopes.csv")
    assert len(rows) == 3
    assert float(rows[1][2]) == pytest.approx(-5.832914922875437, rel=1e-12)


def test_slopes_unforced(workdir):
    assert main(["slopes", "--n-max", "1", "--unforced", "--out", str(workdir)]) == 0
    rows = read_csv(workdir / "slopes.csv")
    assert float(rows[1][2]) == 0.0 and float(rows[1][3]) == 0.0


def test_slopes_additive_family(workdir, tmp_path):
    fam = tmp_path / "family.json"
    fam.write_text('{"family": "flm", "forcing": "additive"}')
    assert main(["slopes", "--n-max", "1", "--family", str(fam), "--out", str(workdir)]) == 0
    rows = read_csv(workdir / "slopes.csv")
    assert float(rows[1][2]) == pytest.approx(-8.160783704320785, rel=1e-12)


def test_determinism(workdir, tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        d.mkdir()
        (d / "fixed_point.json").write_bytes((workdir / "fixed_point.json").read_bytes())
        assert main(["slopes", "--n-max", "3", "--out", str(d)]) == 0
        assert main(["superstable", "--out", str(d)]) == 0
    for name in ("slopes.csv", "superstable.csv"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_fixed_point_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["fixed-point", "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "fixed_point.json").read_bytes() == (tmp_path / "b" / "fixed_point.json").read_bytes()


def test_manifest_lists_outputs(workdir):
    for command in ("fixed-point", "spectrum", "slopes"):
        m = manifest(workdir, command)
        assert m["outputs"]
        for name in m["outputs"]:
            assert (workdir / name).exists()
        assert m["wall_time"] >= 0


def test_verify_level_one(workdir, capsys):
    assert main(["verify", "--n-max", "1", "--jobs", "1", "--out", str(workdir)]) == 0
    rows = read_csv(workdir / "verify.csv")
    assert rows[0][:4] == ["n", "slope_formula_plus", "slope_dynamics_plus", "rel_err_plus"]
    assert float(rows[1][3]) <= 0.05 and float(rows[1][6]) <= 0.05
    m = manifest(workdir, "verify")
    assert set(m["outputs"]) == {"boundary_n1_plus.csv", "boundary_n1_minus.csv", "verify.csv"}


def test_verify_failure_exit_code(workdir):
    assert main(["verify", "--n-max", "1", "--jobs", "1", "--tol", "1e-12", "--out", str(workdir)]) == 6


def test_scan_command(tmp_path, capsys):
    args = ["scan", "--alpha-min", "3.1", "--alpha-max", "3.3", "--alpha-steps", "3",
            "--eps-min", "0.01", "--eps-max", "0.01", "--eps-steps", "1", "--out", str(tmp_path)]
    assert main(args) == 0
    rows = read_csv(tmp_path / "scan.csv")
    assert [r[-1] for r in rows[1:]] == ["reducible", "nonreducible", "reducible"]


def test_corrupt_fixed_point(tmp_path):
    (tmp_path / "fixed_point.json").write_text("{}")
    assert main(["slopes", "--out", str(tmp_path)]) == 5


def test_jobs_env_override(monkeypatch, workdir):
    monkeypatch.setenv("RENORM_QP_JOBS", "many")
    assert main(["spectrum", "--omega-grid", "2", "--out", str(workdir)]) == 4
    monkeypatch.setenv("RENORM_QP_JOBS", "1")
    assert main(["spectrum", "--omega-grid", "2", "--top", "2", "--jobs", "8", "--out", str(workdir)]) == 0


def test_eps_ladder():
    assert default_eps_ladder(1) == (1e-5, 5e-6, 2.5e-6)
    assert default_eps_ladder(4)[0] == pytest.approx(2.5e-6)
