import json

import numpy as np
import pytest

from memodyn.cli import main
from memodyn.netlist import parse_netlist

# a mild two-timescale point that settles onto a fast limit cycle; cheap to
# integrate, converged period detection, tiny closure defect
MILD_MMO = {
    "model": "mmo",
    "epsilon": 0.1,
    "alpha": 1.0,
    "K": 1.0,
    "beta": 1.0,
    "eta": 2.0,
    "s_c": 1.0,
    "a_s": 0.0,
    "g": [-0.1, 0.0, 0.3],
}


def _write_config(tmp_path, name="config.json", *, t1=60.0, rtol=1e-9, **over):
    config = {
        "params": dict(MILD_MMO),
        "initial_state": [0.1, 0.0, 0.0, 0.0],
        "integrator": {"method": "dopri45", "t0": 0.0, "t1": t1, "rtol": rtol,
                       "atol": 1e-12},
    }
    config.update(over)
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return str(path)


@pytest.fixture(scope="module")
def sim_dir(tmp_path_factory):
    """One simulate run shared by the analyze/verify/equivalent tests."""
    d = tmp_path_factory.mktemp("sim")
    cfg = _write_config(d)
    out = str(d / "traj.csv")
    assert main(["simulate", "--config", cfg, "--out", out]) == 0
    return d


def test_simulate_writes_csv_and_manifest(tmp_path, capsys):
    cfg = _write_config(tmp_path, t1=5.0, rtol=1e-8)
    out = str(tmp_path / "run.csv")
    assert main(["simulate", "--config", cfg, "--out", out]) == 0
    text = capsys.readouterr().out
    assert "wrote" in text and "model mmo" in text
    header = open(out).readline().strip()
    assert header == "t,x,y,z,w,I_w,I_gG,I_gGt,I_y,I_z"
    manifest = json.load(open(out + ".manifest.json"))
    assert manifest["model"] == "mmo"
    assert manifest["params"]["epsilon"] == 0.1
    assert manifest["initial_state"] == [0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
    assert manifest["integrator"]["method"] == "dopri45"
    assert manifest["equilibrium_start"] is False


def test_simulate_flags_equilibrium_start(tmp_path, capsys):
    cfg = _write_config(tmp_path, t1=1.0, rtol=1e-8,
                        initial_state=[0.0, 0.0, 0.0, 0.0])
    out = str(tmp_path / "eq.csv")
    assert main(["simulate", "--config", cfg, "--out", out]) == 0
    assert "initial state is an equilibrium" in capsys.readouterr().out
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    assert np.all(data[:, 1:] == 0.0)  # bias-free model pinned at rest


def test_simulate_plot_cols(tmp_path, capsys):
    cfg = _write_config(tmp_path, t1=1.0, rtol=1e-8)
    out = str(tmp_path / "p.csv")
    assert main(["simulate", "--config", cfg, "--out", out,
                 "--plot-cols", "t,x,w"]) == 0
    lines = capsys.readouterr().out.splitlines()
    header_idx = next(i for i, l in enumerate(lines) if l.split() == ["t", "x", "w"])
    first = lines[header_idx + 1].split()
    assert len(first) == 3
    assert float(first[0]) == 0.0


def test_analyze_reports_period_and_signature(sim_dir, capsys):
    traj = str(sim_dir / "traj.csv")
    report_path = str(sim_dir / "report.json")
    assert main(["analyze", traj, "--out", report_path]) == 0
    text = capsys.readouterr().out
    assert "period T =" in text and "signature" in text
    report = json.load(open(report_path))
    assert report["period"]["converged"] is True
    assert 2.0 < report["period"]["T"] < 2.5
    assert report["signature"] != []
    assert "pair_sums" in report["quantities"]


def test_analyze_non_oscillatory_exit_2(tmp_path, capsys):
    cfg = _write_config(tmp_path, t1=0.5, rtol=1e-8)
    out = str(tmp_path / "short.csv")
    assert main(["simulate", "--config", cfg, "--out", out]) == 0
    capsys.readouterr()
    assert main(["analyze", out]) == 2
    assert "non-oscillatory trajectory" in capsys.readouterr().err


def test_verify_exit_codes_follow_tolerance(sim_dir, capsys):
    traj = str(sim_dir / "traj.csv")
    report_path = str(sim_dir / "verify.json")
    assert main(["verify", traj, "--out", report_path]) == 0
    text = capsys.readouterr().out
    assert "PASS" in text and "FAIL" not in text
    reports = json.load(open(report_path))
    assert {r["claim"] for r in reports} >= {"force_w_mmo", "jounce_mmo"}
    # an absurdly tight tolerance flips the exit code, not the numbers
    assert main(["verify", traj, "--force-tol", "1e-16",
                 "--reconstruct-tol", "1e-16"]) == 2


def test_verify_without_params_exit_2(sim_dir, tmp_path, capsys):
    bare = tmp_path / "bare.csv"
    bare.write_bytes((sim_dir / "traj.csv").read_bytes())  # no manifest copied
    assert main(["verify", str(bare)]) == 2
    assert "needs model parameters" in capsys.readouterr().err


def test_equivalent_on_plain_waveform(tmp_path, capsys):
    t = np.linspace(0.0, 2.0, 4001)
    v = np.sin(np.pi * t)
    i = 0.7 * v + 0.05 * np.pi * np.cos(np.pi * t)
    path = tmp_path / "wave.csv"
    np.savetxt(path, np.column_stack([t, v, i]), delimiter=",",
               header="t,v,i", comments="")
    out = str(tmp_path / "eq.json")
    assert main(["equivalent", str(path), "--out", out]) == 0
    eq = json.load(open(out))
    assert abs(eq["gc"]["G"] - 0.7) < 1e-6
    assert abs(eq["gc"]["C"] - 0.05) < 1e-6
    assert eq["rl"]["R"] > 0
    assert "G = " in capsys.readouterr().out


def test_equivalent_on_trajectory(sim_dir, capsys):
    traj = str(sim_dir / "traj.csv")
    assert main(["equivalent", traj]) == 0
    text = capsys.readouterr().out
    assert "G = " in text and "R = " in text


def test_netlist_stdout_and_file(tmp_path, capsys):
    cfg = _write_config(tmp_path, t1=1.0)
    assert main(["netlist", "--config", cfg]) == 0
    deck = capsys.readouterr().out
    parsed = parse_netlist(deck)
    assert "C1" in parsed["components"]
    out = str(tmp_path / "osc.cir")
    assert main(["netlist", "--config", cfg, "--out", out]) == 0
    assert open(out).read() == deck


def test_netlist_default_params(capsys):
    assert main(["netlist"]) == 0
    parsed = parse_netlist(capsys.readouterr().out)
    # default point: R1 = 0.1 * eps * R / s = 0.1 * 0.01 * 1e5
    assert parsed["components"]["R1"]["value"] == 100.0


def test_sweep_grid_rows_and_determinism(tmp_path, capsys):
    base = {
        "params": dict(MILD_MMO),
        "initial_state": [0.1, 0.0, 0.0, 0.0],
        "integrator": {"method": "dopri45", "t1": 40.0, "rtol": 1e-8,
                       "atol": 1e-11},
    }
    spec = {"base": base, "grid": {"params.a_s": [0.0, 0.01]}}
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(spec))
    out1, out2 = str(tmp_path / "s1.csv"), str(tmp_path / "s2.csv")
    assert main(["sweep", "--config", str(cfg), "--out", out1]) == 0
    assert "2 points, 2 analyzed cleanly" in capsys.readouterr().out
    rows = list(np.genfromtxt(out1, delimiter=",", names=True, dtype=None,
                              encoding="utf-8"))
    assert len(rows) == 2
    header = open(out1).readline().strip()
    assert header == "params.a_s,T,converged,signature,closure,max_force_residual,error"
    # reruns are byte-identical
    assert main(["sweep", "--config", str(cfg), "--out", out2]) == 0
    assert open(out1, "rb").read() == open(out2, "rb").read()


def test_sweep_sampled_axis_seeded(tmp_path, capsys):
    base = {
        "params": dict(MILD_MMO),
        "initial_state": [0.1, 0.0, 0.0, 0.0],
        "integrator": {"method": "dopri45", "t1": 1.0, "rtol": 1e-8},
    }
    spec = {"base": base,
            "grid": {"params.a_s": {"low": 0.0, "high": 0.01, "n": 2}}}
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(spec))
    out1, out2 = str(tmp_path / "r1.csv"), str(tmp_path / "r2.csv")
    assert main(["sweep", "--config", str(cfg), "--out", out1, "--seed", "7"]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", out2, "--seed", "7"]) == 0
    assert open(out1).read() == open(out2).read()
    # short runs cannot oscillate: rows carry the error column instead
    body = open(out1).read().splitlines()
    assert len(body) == 3
    assert "non-oscillatory trajectory" in body[1]


def test_sweep_empty_grid_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"base": {}, "grid": {}}))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
    assert "empty grid" in capsys.readouterr().err


def test_threads_env_fallback(tmp_path, monkeypatch, capsys):
    base = {
        "params": dict(MILD_MMO),
        "initial_state": [0.1, 0.0, 0.0, 0.0],
        "integrator": {"method": "dopri45", "t1": 1.0, "rtol": 1e-8},
    }
    spec = {"base": base, "grid": {"params.a_s": [0.0]}}
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(spec))
    out = str(tmp_path / "env.csv")
    monkeypatch.setenv("MEMODYN_THREADS", "2")
    assert main(["sweep", "--config", str(cfg), "--out", out]) == 0
    capsys.readouterr()
    monkeypatch.setenv("MEMODYN_THREADS", "abc")
    assert main(["sweep", "--config", str(cfg), "--out", out]) == 2
    assert "must be an integer" in capsys.readouterr().err


def test_divergence_exit_3(tmp_path, capsys):
    config = {
        "params": {"model": "canonical_chua", "k": 1.0, "alpha": 5.0,
                   "beta": 1.0, "gamma": 0.0, "g": [-3.0]},
        "initial_state": [1.0, 1.0, 1.0, 0.0],
        "integrator": {"method": "rk4", "t0": 0.0, "t1": 400.0, "h": 0.05},
    }
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(config))
    assert main(["simulate", "--config", str(cfg),
                 "--out", str(tmp_path / "d.csv")]) == 3
    assert "numerical failure: divergence" in capsys.readouterr().err


def test_invalid_inputs_exit_2(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "missing.json"),
                 "--out", str(tmp_path / "o.csv")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--config", str(bad),
                 "--out", str(tmp_path / "o.csv")]) == 2
    unk = tmp_path / "unk.json"
    unk.write_text(json.dumps({"params": {"model": "pendulum"}}))
    assert main(["simulate", "--config", str(unk),
                 "--out", str(tmp_path / "o.csv")]) == 2
    err = capsys.readouterr().err
    assert err.count("error:") == 3


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("memodyn ")
