import csv

import numpy as np
import pytest

from cavity_loader import cli, pulses, two_level


def run(argv):
    return cli.main(argv)


def read_csv(path):
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    return rows[0], [[float(v) for v in row] for row in rows[1:]]


def test_simulate_two_level_schema(tmp_path):
    out = tmp_path / "traj.csv"
    rc = run(
        [
            "simulate",
            "--scenario",
            "two_level",
            "--kT",
            "2",
            "--g_over_k",
            "1",
            "--pulse",
            "sech",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    header, rows = read_csv(out)
    assert header == ["t_over_T", "pop_beta", "pop_ce"]
    data = np.asarray(rows)
    assert np.all(np.diff(data[:, 0]) > 0)
    # the sampled maximum matches the module's value on the same grid
    pulse = pulses.make_sech(2.0, 2.0)
    grid = data[:, 0] * 2.0
    traj = two_level.amplitude_ode(
        two_level.TwoLevelParams(g=1.0, kappa=1.0), pulse, grid
    )
    assert data[:, 2].max() == pytest.approx(traj.population("c_e").max(), abs=1e-9)
    assert data[:, 2].max() == pytest.approx(0.902, abs=5e-3)


def test_simulate_zero_pulse(tmp_path):
    out = tmp_path / "zero.csv"
    rc = run(
        [
            "simulate",
            "--scenario",
            "two_level",
            "--kT",
            "2",
            "--g_over_k",
            "1",
            "--pulse",
            "zero",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    _, rows = read_csv(out)
    data = np.asarray(rows)
    assert np.all(data[:, 1:] == 0.0)


def test_simulate_missing_kt_names_field(capsys):
    rc = run(["simulate", "--scenario", "two_level", "--g_over_k", "1"])
    assert rc == 2
    assert "kT" in capsys.readouterr().err


def test_simulate_unknown_scenario(capsys):
    rc = run(["simulate", "--scenario", "four_level", "--kT", "2"])
    assert rc == 2


def test_simulate_bad_pulse(capsys):
    rc = run(
        [
            "simulate",
            "--scenario",
            "two_level",
            "--kT",
            "2",
            "--g_over_k",
            "1",
            "--pulse",
            "gaussian",
        ]
    )
    assert rc == 2
    assert "pulse" in capsys.readouterr().err


def test_simulate_lambda_nonadiabatic(tmp_path):
    out = tmp_path / "lam.csv"
    rc = run(
        [
            "simulate",
            "--scenario",
            "lambda_nonadiabatic",
            "--kT",
            "2",
            "--gc_over_k",
            "5",
            "--omega_over_k",
            "5",
            "--delta1_over_k",
            "50",
            "--points",
            "200",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    header, rows = read_csv(out)
    assert header == ["t_over_T", "pop_beta", "pop_cr", "pop_ce"]
    data = np.asarray(rows)
    # frozen oscillation: the target population is flat at the end
    tail = data[data[:, 0] > 4.5, 3]
    assert np.max(tail) - np.min(tail) < 1e-6


def test_simulate_mitnu(tmp_path):
    out = tmp_path / "mitnu.csv"
    rc = run(
        [
            "simulate",
            "--scenario",
            "mitnu",
            "--kT",
            "2",
            "--kT0",
            "2",
            "--g_over_k",
            "1",
            "--points",
            "150",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    header, rows = read_csv(out)
    assert header == ["t_over_T", "pop_ce"]
    assert max(r[1] for r in rows) > 0.5


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kT = 2\ng_over_k = 5.0\npulse = sech\n")
    out = tmp_path / "cfg.csv"
    rc = run(
        [
            "simulate",
            "--scenario",
            "two_level",
            "--config",
            str(cfg),
            "--g_over_k",
            "1",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    _, rows = read_csv(out)
    # g = 1 (flag) not 5 (file): peak just above 0.9
    assert max(r[2] for r in rows) == pytest.approx(0.902, abs=5e-3)


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("kT = 2\ncoupling = 1\n")
    rc = run(
        ["simulate", "--scenario", "two_level", "--config", str(cfg), "--g_over_k", "1"]
    )
    assert rc == 2
    assert "coupling" in capsys.readouterr().err


def test_optimize_row_and_determinism(tmp_path):
    out = tmp_path / "opt.csv"
    argv = [
        "optimize",
        "--scenario",
        "two_level",
        "--kT",
        "2",
        "--g_min",
        "0.5",
        "--g_max",
        "3.0",
        "--out",
        str(out),
    ]
    assert run(argv) == 0
    first = out.read_bytes()
    header, rows = read_csv(out)
    assert header == ["g_opt", "P_max", "T_load"]
    assert rows[0][1] > 0.9
    assert run(argv) == 0
    assert out.read_bytes() == first


def test_optimize_empty_range(capsys):
    rc = run(
        [
            "optimize",
            "--scenario",
            "two_level",
            "--kT",
            "2",
            "--g_min",
            "2.0",
            "--g_max",
            "1.0",
        ]
    )
    assert rc == 2
    assert "g_m" in capsys.readouterr().err


def test_optimize_mitnu_needs_kt0(capsys):
    rc = run(["optimize", "--scenario", "mitnu", "--kT", "2"])
    assert rc == 2
    assert "kT0" in capsys.readouterr().err


def test_figure_unknown_preset(capsys):
    rc = run(["figure", "--preset", "fig99"])
    assert rc == 2


def test_figure_fig5_runs_and_is_deterministic(tmp_path):
    outdir = tmp_path / "figs"
    argv = ["figure", "--preset", "fig5", "--outdir", str(outdir)]
    assert run(argv) == 0
    files = sorted(p.name for p in outdir.iterdir())
    assert files == [
        "fig5_exp_decaying.csv",
        "fig5_exp_rising.csv",
        "fig5_params.txt",
        "fig5_rectangular.csv",
        "fig5_sech.csv",
    ]
    blobs = {p.name: p.read_bytes() for p in outdir.iterdir()}
    assert run(argv) == 0
    for p in outdir.iterdir():
        assert p.read_bytes() == blobs[p.name]


def test_csv_round_trip_format(tmp_path):
    out = tmp_path / "fmt.csv"
    cli.write_csv(out, ["a", "b"], [(0.1, 1e-17), (float("nan"), 2.0)])
    text = out.read_text()
    assert "\r" not in text
    header, rows = read_csv(out)
    assert rows[0][0] == 0.1
    assert rows[0][1] == 1e-17
    assert np.isnan(rows[1][0])
