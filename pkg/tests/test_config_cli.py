import io

import numpy as np
import pytest

from kinchar import cli
from kinchar.config import SCHEMA, ConfigError, RunConfig, documented_keys


def run(argv):
    buf = io.StringIO()
    code = cli.main(argv, stdout=buf)
    return code, buf.getvalue()


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_defaults_validate():
    cfg = RunConfig.default()
    assert cfg["solver.mode"] == "isotropic"
    assert cfg.solver().N == 512
    assert {k for k, _ in documented_keys()} == set(SCHEMA)


def test_unknown_key_named():
    with pytest.raises(ConfigError, match="solver.dtt"):
        RunConfig.from_text("solver.dtt = 0.1\n")


@pytest.mark.parametrize("text,key", [
    ("solver.dt = abc", "solver.dt"),
    ("kernel.nu = 3.0\nkernel.form = grazing", "kernel."),
    ("solver.mode = grid3d\nsolver.N = 32", "solver."),
    ("diagnostic.k = 0", "diagnostic.k"),
    ("solver.T = 1\nsolver.T = 2", "solver.T"),
])
def test_invalid_values_named(text, key):
    with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
        RunConfig.from_text(text)


def test_comments_and_lists():
    cfg = RunConfig.from_text("# run\nlambda.betas = 1.0, 1.5  # trailing\n"
                              "measure.points = 1 0 0; -1 0 0; 0 2 0\n"
                              "measure.weights = 0.25 0.25 0.5\n")
    assert cfg["lambda.betas"] == (1.0, 1.5)
    assert cfg.measure().points.shape == (3, 3)


def test_cli_unknown_key_exit_code(tmp_path, capsys):
    code, _ = run(["solve", "--config", write(tmp_path, "solver.bogus = 1\n")])
    assert code == 2 and "solver.bogus" in capsys.readouterr().err


def test_cli_coeffs():
    code, out = run(["coeffs", "2"])
    assert code == 0
    assert out.splitlines() == ["k,j,c", "2,0,0.375", "2,1,-0.5", "2,2,0.125"]
    assert run(["coeffs", "17"])[0] == 2


def test_cli_solve_deterministic(tmp_path):
    cfg = write(tmp_path, "initial.kind = isotropic_average\nkernel.normalize_rate = 1\n"
                          "solver.dump = true\n")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run(["solve", "--config", cfg, "--out", str(out1)])[0] == 0
    assert run(["solve", "--config", cfg, "--out", str(out2)])[0] == 0
    for name in ("trajectory.csv", "states.bin"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    lines = (out1 / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,mass,momentum_x,momentum_y,momentum_z,energy,sup_abs_phi,tail_decay_proxy"
    assert len(lines) == 10
    energy = lines[-1].split(",")[5]
    assert len(energy.replace("-", "").replace(".", "").lstrip("0")) >= 16


def test_cli_solve_refuses_unstable(tmp_path, capsys):
    cfg = write(tmp_path, "initial.kind = isotropic_average\nsolver.dt = 0.5\n")
    assert run(["solve", "--config", cfg])[0] == 2
    assert "dt*Lambda" in capsys.readouterr().err


def test_cli_diagnose_from_dump(tmp_path):
    cfg = write(tmp_path, "initial.kind = isotropic_average\nkernel.normalize_rate = 1\n"
                          "solver.dump = true\ndiagnostic.alpha = 0.5\n")
    out = tmp_path / "o"
    run(["solve", "--config", cfg, "--out", str(out)])
    cfg2 = write(tmp_path, "kernel.normalize_rate = 1\ndiagnostic.alpha = 0.5\n"
                           f"diagnostic.trajectory = {out / 'states.bin'}\n", "d.cfg")
    code, text = run(["diagnose", "--config", cfg2])
    rows = text.splitlines()
    assert code == 0 and rows[0] == "check,k,alpha,beta,s,t,lhs,rhs,ratio,pass"
    assert sum(r.startswith("continuity_beta") for r in rows) == 3 * 36


def test_cli_lambda_and_moments():
    code, out = run(["lambda"])
    rows = out.splitlines()
    assert code == 0 and rows[0] == "beta,lambda,remainder_bound,ill_conditioned"
    assert float(rows[-1].split(",")[1]) == pytest.approx(0.0, abs=1e-12)
    code, out = run(["moments"])
    assert code == 0
    assert out.splitlines()[0] == "k,alpha,d,R,moment_lhs,fourier_rhs,constant,holds"
    assert all(r.endswith("true") for r in out.splitlines()[1:])


def test_cli_charfun():
    code, out = run(["charfun"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "radius,axis,re_phi,im_phi,delta_2"
    assert "name,k,alpha,beta,value,est_error" in lines
    first = lines[1].split(",")
    assert float(first[2]) == pytest.approx(np.cos(0.1))


def test_cli_threads_flag():
    assert run(["coeffs", "1", "--threads", "1"])[0] == 0
    assert run(["coeffs", "1", "--threads", "0"])[0] == 2
