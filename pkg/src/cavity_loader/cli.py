"""Command-line front end: trajectory runs, coupling optimization, presets.

All rates are entered in units of kappa (kappa = 1 internally) and times
in units of the pulse width T.  Results are written as plain CSV with
shortest round-trip float formatting, atomically (temp file + rename).

Exit codes: 0 success, 2 usage/configuration error, 3 numeric failure.
The worker count for sweep presets is capped by the environment variable
CAVITY_LOADER_THREADS.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import entangled_loading, lambda_memory, numerics, optimize, pulses, two_level

__all__ = ["main", "cmd_simulate", "cmd_optimize", "cmd_figure"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SIMULATE_FIELDS = {
    "two_level": {
        "required": ("kT", "g_over_k"),
        "optional": ("gamma_over_k", "delta_over_k", "pulse", "points", "out"),
    },
    "lambda_nonadiabatic": {
        "required": ("kT", "gc_over_k", "omega_over_k", "delta1_over_k"),
        "optional": (
            "delta2_over_k",
            "gamma_r_over_k",
            "t_load_over_T",
            "pulse",
            "points",
            "out",
        ),
    },
    "lambda_adiabatic_tpr": {
        "required": ("kT", "g_prime_over_k"),
        "optional": ("points", "out"),
    },
    "lambda_adiabatic_zed": {
        "required": ("kT", "g_prime_over_k"),
        "optional": ("points", "out"),
    },
    "mitnu": {
        "required": ("kT", "kT0", "g_over_k"),
        "optional": ("points", "out"),
    },
}

FIGURE_PRESETS = ("fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10")


class ConfigError(ValueError):
    pass


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    v = float(value)
    if v != v:  # NaN
        return "nan"
    return repr(v)


def write_csv(path, header: list[str], rows) -> None:
    """Write CSV atomically with '\\n' endings and round-trip floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(",".join(header) + "\n")
            for row in rows:
                handle.write(",".join(_fmt(v) for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_config_file(path) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def _gather(args, parser_fields: dict) -> dict:
    """Merge config-file values under explicit flags; reject unknown keys."""
    known = set(parser_fields["required"]) | set(parser_fields["optional"])
    merged = {}
    if args.config:
        file_values = _read_config_file(args.config)
        unknown = sorted(set(file_values) - known - {"scenario"})
        if unknown:
            raise ConfigError(f"unknown config key {unknown[0]!r}")
        merged.update(file_values)
    for key in known:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            merged[key] = flag_val
    missing = [k for k in parser_fields["required"] if k not in merged]
    if missing:
        raise ConfigError(f"missing required field {missing[0]} for this scenario")
    return merged


def _floats(cfg: dict, keys, default=None) -> dict:
    out = {}
    for k in keys:
        if k in cfg:
            try:
                out[k] = float(cfg[k])
            except (TypeError, ValueError):
                raise ConfigError(f"field {k} must be a number, got {cfg[k]!r}")
        elif default is not None:
            out[k] = default
    return out


def cmd_simulate(args) -> int:
    scenario = args.scenario
    if scenario not in SIMULATE_FIELDS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    cfg = _gather(args, SIMULATE_FIELDS[scenario])
    points = int(float(cfg.get("points", 600)))
    out_path = cfg.get("out", f"{scenario}_trajectory.csv")
    kappa = 1.0
    kT = float(cfg["kT"])
    T = kT / kappa

    if scenario == "two_level":
        kind = cfg.get("pulse", "sech")
        if kind not in pulses.PULSE_KINDS:
            raise ConfigError(f"field pulse must be one of {pulses.PULSE_KINDS}")
        g = float(cfg["g_over_k"]) * kappa
        gamma = float(cfg.get("gamma_over_k", 0.0)) * kappa
        delta = float(cfg.get("delta_over_k", 0.0)) * kappa
        pulse = pulses.make_named(kind, T, T)
        params = two_level.TwoLevelParams(g=g, kappa=kappa, gamma=gamma, delta=delta)
        grid = np.linspace(min(0.0, pulse.support[0]), 5.0 * T, points)
        traj = two_level.amplitude_ode(params, pulse, grid)
        header = ["t_over_T", "pop_beta", "pop_ce"]
        rows = zip(grid / T, traj.population("beta"), traj.population("c_e"))
        write_csv(out_path, header, rows)
        return EXIT_OK

    if scenario == "lambda_nonadiabatic":
        kind = cfg.get("pulse", "sech")
        if kind not in pulses.PULSE_KINDS:
            raise ConfigError(f"field pulse must be one of {pulses.PULSE_KINDS}")
        g_c = float(cfg["gc_over_k"]) * kappa
        om = float(cfg["omega_over_k"]) * kappa
        d1 = float(cfg["delta1_over_k"]) * kappa
        gamma_r = float(cfg.get("gamma_r_over_k", 0.0)) * kappa
        base = lambda_memory.LambdaParams(
            g_c=g_c, kappa=kappa, delta1=d1, delta2=d1, omega=om, gamma_r=gamma_r
        )
        if "delta2_over_k" in cfg:
            d2 = float(cfg["delta2_over_k"]) * kappa
        else:
            d2 = lambda_memory.stark_compensation(base)
        pulse = pulses.make_named(kind, T, T)
        if "t_load_over_T" in cfg:
            t_load = float(cfg["t_load_over_T"]) * T
        else:
            g_eff = g_c * om / d1
            t_load, _ = two_level.peak_loading(
                two_level.TwoLevelParams(g=g_eff, kappa=kappa), pulse, 5.0 * T
            )

        def omega_step(t):
            return np.where(np.asarray(t) <= t_load, om, 0.0)

        params = lambda_memory.LambdaParams(
            g_c=g_c,
            kappa=kappa,
            delta1=d1,
            delta2=d2,
            omega=omega_step,
            gamma_r=gamma_r,
        )
        drive = lambda_memory.compensated_pulse(pulse, params)
        grid = np.linspace(min(0.0, pulse.support[0]), 5.0 * T, points)
        traj = lambda_memory.full_ode(params, drive, grid, breakpoints=(t_load,))
        header = ["t_over_T", "pop_beta", "pop_cr", "pop_ce"]
        rows = zip(
            grid / T,
            traj.population("beta"),
            traj.population("c_r"),
            traj.population("c_e"),
        )
        write_csv(out_path, header, rows)
        return EXIT_OK

    if scenario in ("lambda_adiabatic_tpr", "lambda_adiabatic_zed"):
        g_prime = float(cfg["g_prime_over_k"]) * kappa
        # only g' = g_c^2/Delta1 matters; a deep-elimination split is used
        delta1 = 400.0 * kappa
        g_c = float(np.sqrt(g_prime * delta1))
        loader = (
            lambda_memory.adiabatic_load_tpr
            if scenario.endswith("tpr")
            else lambda_memory.adiabatic_load_zed
        )
        pulse = pulses.make_sech(T, T)
        grid = np.linspace(pulse.support[0], 5.0 * T, points)
        traj, _ = loader(g_c, delta1, kappa, T, grid=grid)
        header = ["t_over_T", "pop_beta", "pop_cr", "pop_ce"]
        rows = zip(
            grid / T,
            traj.population("beta"),
            traj.population("c_r"),
            traj.population("c_e"),
        )
        write_csv(out_path, header, rows)
        return EXIT_OK

    # mitnu
    kT0 = float(cfg["kT0"])
    g = float(cfg["g_over_k"]) * kappa
    sp = entangled_loading.SpdcParams(T=T, T0=kT0 / kappa)
    b = entangled_loading.spdc_biphoton(sp)
    params = two_level.TwoLevelParams(g=g, kappa=kappa)
    grid = np.linspace(0.0, b.support[1] + 2.0 / kappa, points)
    traj = entangled_loading.joint_trajectory(params, b, grid)
    write_csv(out_path, ["t_over_T", "pop_ce"], zip(grid / T, traj.population("c_ee")))
    return EXIT_OK


OPTIMIZE_FIELDS = {
    "required": ("scenario", "kT"),
    "optional": (
        "kT0",
        "gamma_over_g",
        "delta_over_k",
        "pulse",
        "g_min",
        "g_max",
        "tol",
        "out",
    ),
}


def cmd_optimize(args) -> int:
    fields = dict(OPTIMIZE_FIELDS)
    cfg = _gather(args, fields)
    scenario = cfg.get("scenario", args.scenario)
    if scenario not in optimize.SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    g_min = float(cfg.get("g_min", optimize.DEFAULT_G_RANGE[0]))
    g_max = float(cfg.get("g_max", optimize.DEFAULT_G_RANGE[1]))
    if not g_min < g_max:
        raise ConfigError("field g_min must be below g_max (empty search range)")
    tol = float(cfg.get("tol", optimize.DEFAULT_G_TOL))
    fixed = {"kT": float(cfg["kT"])}
    if scenario == "mitnu":
        if "kT0" not in cfg:
            raise ConfigError("missing required field kT0 for scenario mitnu")
        fixed["kT0"] = float(cfg["kT0"])
    for key in ("gamma_over_g", "delta_over_k"):
        if key in cfg:
            fixed[key] = float(cfg[key])
    if "pulse" in cfg:
        fixed["pulse"] = cfg["pulse"]
    opt = optimize.optimize_coupling(scenario, fixed, (g_min, g_max), tol)
    out_path = cfg.get("out", f"{scenario}_optimum.csv")
    write_csv(out_path, ["g_opt", "P_max", "T_load"], [(opt.g_opt, opt.P_max, opt.T_load)])
    return EXIT_OK


def _figure_fig3(outdir: Path) -> dict:
    kT, g_values = 2.0, (0.3, 0.6, 1.0, 1.5, 2.5)
    T = kT
    pulse = pulses.make_sech(T, T)
    grid = np.linspace(min(0.0, pulse.support[0]), 5.0 * T, 501)
    cols = [grid / T]
    for g in g_values:
        traj = two_level.amplitude_ode(
            two_level.TwoLevelParams(g=g, kappa=1.0), pulse, grid
        )
        cols.append(traj.population("c_e"))
    header = ["t_over_T"] + [f"pop_ce_g{g}" for g in g_values]
    write_csv(outdir / "fig3_loading_vs_time.csv", header, zip(*cols))
    return {"kT": kT, "g_over_k": list(g_values), "pulse": "sech", "gamma": 0.0, "delta": 0.0}


def _figure_fig4(outdir: Path, workers=None) -> dict:
    gamma_family = (0.0, 0.1, 0.25, 0.5)
    kT_grid = tuple(float(x) for x in np.geomspace(0.5, 20.0, 9))
    for gamma_over_g in gamma_family:
        spec = optimize.SweepSpec(
            scenario="two_level",
            axes=(("kT", kT_grid),),
            fixed={"gamma_over_g": gamma_over_g},
            optimize_g=True,
        )
        rows = optimize.sweep(spec, workers=workers)
        write_csv(
            outdir / f"fig4_design_gamma{gamma_over_g}.csv",
            ["kT", "g_opt", "P_max", "T_load"],
            [(r["kT"], r["g_opt"], r["P_max"], r["T_load"]) for r in rows],
        )
    return {"gamma_over_g": list(gamma_family), "kT_grid": list(kT_grid), "pulse": "sech"}


def _figure_fig5(outdir: Path) -> dict:
    kT, g = 2.0, 1.0
    T = kT
    kinds = ("sech", "rectangular", "exp_rising", "exp_decaying")
    for kind in kinds:
        pulse = pulses.make_named(kind, T, T)
        grid = np.linspace(min(0.0, pulse.support[0]), 5.0 * T, 501)
        traj = two_level.amplitude_ode(
            two_level.TwoLevelParams(g=g, kappa=1.0), pulse, grid
        )
        write_csv(
            outdir / f"fig5_{kind}.csv",
            ["t_over_T", "pop_beta", "pop_ce"],
            zip(grid / T, traj.population("beta"), traj.population("c_e")),
        )
    return {"kT": kT, "g_over_k": g, "pulses": list(kinds)}


def _figure_fig6(outdir: Path) -> dict:
    kT_values = (4.5, 5.0, 7.0, 10.0)
    g_prime_grid = np.linspace(0.25, 4.0, 16)
    cols = [g_prime_grid]
    for kT in kT_values:
        probs = [
            optimize.scenario_probability("lambda_adiabatic_tpr", float(gp), {"kT": kT})[0]
            for gp in g_prime_grid
        ]
        cols.append(np.asarray(probs))
    header = ["g_prime_over_k"] + [f"P_kT{kT}" for kT in kT_values]
    write_csv(outdir / "fig6_adiabatic_tpr.csv", header, zip(*cols))
    return {"kT": list(kT_values), "g_prime_grid": [float(x) for x in g_prime_grid]}


def _figure_fig7(outdir: Path, workers=None) -> dict:
    kT_nonad = tuple(float(x) for x in np.geomspace(0.5, 20.0, 10))
    kT_adiab = (4.5, 5.0, 6.0, 8.0, 10.0)
    spec_n = optimize.SweepSpec(
        scenario="lambda_nonadiabatic", axes=(("kT", kT_nonad),), optimize_g=True
    )
    rows = optimize.sweep(spec_n, workers=workers)
    write_csv(
        outdir / "fig7_nonadiabatic.csv",
        ["kT", "g_opt", "P_max"],
        [(r["kT"], r["g_opt"], r["P_max"]) for r in rows],
    )
    spec_a = optimize.SweepSpec(
        scenario="lambda_adiabatic_zed",
        axes=(("kT", kT_adiab),),
        optimize_g=True,
        g_range=(0.2, 5.0),
    )
    rows = optimize.sweep(spec_a, workers=workers)
    write_csv(
        outdir / "fig7_adiabatic_zed.csv",
        ["kT", "g_opt", "P_max"],
        [(r["kT"], r["g_opt"], r["P_max"]) for r in rows],
    )
    return {"kT_nonadiabatic": list(kT_nonad), "kT_adiabatic": list(kT_adiab)}


def _figure_fig8(outdir: Path) -> dict:
    offsets = np.linspace(-1.0, 1.0, 17)
    # non-adiabatic at kT = 1, its optimum coupling
    kT_n = 1.0
    opt_n = optimize.optimize_coupling("two_level", {"kT": kT_n}, (0.5, 4.0))
    probs_n = lambda_memory.timing_offset_scan(
        "nonadiabatic",
        {"kappa": 1.0, "T": kT_n, "g": opt_n.g_opt, "t_load": opt_n.T_load},
        offsets * kT_n,
    )
    write_csv(
        outdir / "fig8_nonadiabatic.csv",
        ["offset_over_T", "P"],
        zip(offsets, probs_n),
    )
    # adiabatic (zero effective detuning) at kT = 4.5, its optimum coupling
    kT_a = 4.5
    opt_a = optimize.optimize_coupling(
        "lambda_adiabatic_zed", {"kT": kT_a}, (0.4, 2.5)
    )
    probs_a = lambda_memory.timing_offset_scan(
        "adiabatic",
        {"kappa": 1.0, "T": kT_a, "g_prime": opt_a.g_opt, "variant": "zed"},
        offsets * kT_a,
    )
    write_csv(
        outdir / "fig8_adiabatic.csv", ["offset_over_T", "P"], zip(offsets, probs_a)
    )
    return {
        "offsets_over_T": [float(x) for x in offsets],
        "nonadiabatic": {"kT": kT_n, "g_opt": opt_n.g_opt},
        "adiabatic_zed": {"kT": kT_a, "g_prime_opt": opt_a.g_opt},
    }


def _figure_fig9(outdir: Path) -> dict:
    kappa = 1.0
    kT = 2.0
    g_values = (0.6, 0.9, 1.2, 2.0)
    kT0_values = (0.5, 1.0, 2.0, 4.0)
    # panel (a): fixed kT0 = 2, family over g
    sp = entangled_loading.SpdcParams(T=kT, T0=2.0)
    b = entangled_loading.spdc_biphoton(sp)
    grid = np.linspace(0.0, b.support[1] + 2.0, 501)
    cols = [grid / kT]
    for g in g_values:
        traj = entangled_loading.joint_trajectory(
            two_level.TwoLevelParams(g=g, kappa=kappa), b, grid
        )
        cols.append(traj.population("c_ee"))
    write_csv(
        outdir / "fig9_vs_g.csv",
        ["t_over_T"] + [f"pop_cee_g{g}" for g in g_values],
        zip(*cols),
    )
    # panel (b): fixed g = 1, family over kT0
    hi = max(
        entangled_loading.spdc_biphoton(
            entangled_loading.SpdcParams(T=kT, T0=t0)
        ).support[1]
        for t0 in kT0_values
    )
    grid = np.linspace(0.0, hi + 2.0, 501)
    cols = [grid / kT]
    for t0 in kT0_values:
        b = entangled_loading.spdc_biphoton(entangled_loading.SpdcParams(T=kT, T0=t0))
        traj = entangled_loading.joint_trajectory(
            two_level.TwoLevelParams(g=1.0, kappa=kappa), b, grid
        )
        cols.append(traj.population("c_ee"))
    write_csv(
        outdir / "fig9_vs_kT0.csv",
        ["t_over_T"] + [f"pop_cee_kT0{t0}" for t0 in kT0_values],
        zip(*cols),
    )
    return {"kT": kT, "g_over_k": list(g_values), "kT0": list(kT0_values)}


def _figure_fig10(outdir: Path, workers=None) -> dict:
    grid = tuple(float(x) for x in np.linspace(2.0, 6.0, 5))
    spec = optimize.SweepSpec(
        scenario="mitnu",
        axes=(("kT", grid), ("kT0", grid)),
        optimize_g=True,
        g_range=(0.1, 5.0),
    )
    rows = optimize.sweep(spec, workers=workers)
    write_csv(
        outdir / "fig10_g_opt.csv",
        ["kT", "kT0", "g_opt"],
        [(r["kT"], r["kT0"], r["g_opt"]) for r in rows],
    )
    write_csv(
        outdir / "fig10_P_max.csv",
        ["kT", "kT0", "P_max"],
        [(r["kT"], r["kT0"], r["P_max"]) for r in rows],
    )
    return {"kT_grid": list(grid), "kT0_grid": list(grid)}


def cmd_figure(args) -> int:
    preset = args.preset
    if preset not in FIGURE_PRESETS:
        raise ConfigError(f"unknown preset {preset!r}")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    workers = args.workers
    builders = {
        "fig3": lambda: _figure_fig3(outdir),
        "fig4": lambda: _figure_fig4(outdir, workers),
        "fig5": lambda: _figure_fig5(outdir),
        "fig6": lambda: _figure_fig6(outdir),
        "fig7": lambda: _figure_fig7(outdir, workers),
        "fig8": lambda: _figure_fig8(outdir),
        "fig9": lambda: _figure_fig9(outdir),
        "fig10": lambda: _figure_fig10(outdir, workers),
    }
    meta = builders[preset]()
    sidecar = outdir / f"{preset}_params.txt"
    lines = [f"{key} = {value}" for key, value in sorted(meta.items())]
    sidecar.write_text("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavity-loader",
        description="Loading simulations for trapped-atom quantum memories",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write a trajectory CSV for one scenario")
    sim.add_argument("--scenario", required=True)
    for flag in (
        "kT",
        "kT0",
        "g_over_k",
        "gc_over_k",
        "omega_over_k",
        "delta1_over_k",
        "delta2_over_k",
        "gamma_over_k",
        "gamma_r_over_k",
        "delta_over_k",
        "t_load_over_T",
        "points",
    ):
        sim.add_argument(f"--{flag}", type=float, default=None)
    sim.add_argument("--pulse", default=None)
    sim.add_argument("--out", default=None)
    sim.add_argument("--config", default=None)
    sim.set_defaults(func=cmd_simulate)

    opt = sub.add_parser("optimize", help="find the optimum coupling rate")
    opt.add_argument("--scenario", required=True)
    for flag in ("kT", "kT0", "gamma_over_g", "delta_over_k", "g_min", "g_max", "tol"):
        opt.add_argument(f"--{flag}", type=float, default=None)
    opt.add_argument("--pulse", default=None)
    opt.add_argument("--out", default=None)
    opt.add_argument("--config", default=None)
    opt.set_defaults(func=cmd_optimize)

    fig = sub.add_parser("figure", help="regenerate a figure dataset")
    fig.add_argument("--preset", required=True)
    fig.add_argument("--outdir", default="figures")
    fig.add_argument("--workers", type=int, default=None)
    fig.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (numerics.OdeFailure, numerics.QuadratureFailure) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
