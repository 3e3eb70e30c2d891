"""Coupling-rate optimization and design-curve sweeps.

Every loading scheme exposes a scalar objective: the time-peak loading
probability at fixed bandwidth(s) as a function of the coupling rate in
units of kappa.  The Rabi-oscillation structure creates multiple local
maxima in time but the coupling dependence is tame once the global basin
is isolated, so the search is a coarse log-spaced scan followed by
golden-section refinement.  Sweeps evaluate grids of bandwidth points
(optionally optimizing the coupling per cell) on a small process pool.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import entangled_loading, lambda_memory, pulses, two_level

__all__ = [
    "SCENARIOS",
    "SweepSpec",
    "OptimumPoint",
    "scenario_probability",
    "optimize_coupling",
    "sweep",
    "throughput_compare",
    "resolve_workers",
]

SCENARIOS = (
    "two_level",
    "lambda_nonadiabatic",
    "lambda_adiabatic_tpr",
    "lambda_adiabatic_zed",
    "mitnu",
)

WORKERS_ENV = "CAVITY_LOADER_THREADS"

DEFAULT_G_RANGE = (0.05, 10.0)
DEFAULT_G_TOL = 1e-3


@dataclass(frozen=True)
class OptimumPoint:
    """Result of a coupling optimization (coupling in units of kappa)."""

    g_opt: float
    P_max: float
    T_load: float
    bracket: float
    degenerate: bool = False


@dataclass(frozen=True)
class SweepSpec:
    """A 1-D or 2-D parameter sweep of one scenario.

    ``axes`` maps axis names (e.g. "kT", "kT0", "g_over_k") to strictly
    increasing grids.  With ``optimize_g`` set, each cell runs a coupling
    optimization; otherwise ``fixed`` must carry g_over_k.
    """

    scenario: str
    axes: tuple[tuple[str, tuple[float, ...]], ...]
    fixed: dict = field(default_factory=dict)
    optimize_g: bool = False
    g_range: tuple[float, float] = DEFAULT_G_RANGE
    g_tol: float = DEFAULT_G_TOL

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep needs one or two axes")
        for name, grid in self.axes:
            arr = np.asarray(grid, dtype=float)
            if arr.ndim != 1 or arr.size == 0 or np.any(np.diff(arr) <= 0):
                raise ValueError(f"axis {name!r} must be a strictly increasing grid")


def scenario_probability(scenario: str, g_over_k: float, fixed: dict) -> tuple[float, float]:
    """(loading probability, time of the relevant peak) for one design point.

    All rates are in units of kappa (kappa = 1 internally).  ``fixed``
    carries the bandwidth parameters: kT for all scenarios, kT0 for the
    biphoton one, plus optional gamma_over_g / delta_over_k / pulse for
    the two-level family.
    """
    kappa = 1.0
    kT = float(fixed["kT"])
    T = kT / kappa
    if scenario in ("two_level", "lambda_nonadiabatic"):
        g = g_over_k * kappa
        gamma = float(fixed.get("gamma_over_g", 0.0)) * g
        delta = float(fixed.get("delta_over_k", 0.0)) * kappa
        kind = fixed.get("pulse", "sech")
        pulse = pulses.make_named(kind, T, T)
        params = two_level.TwoLevelParams(g=g, kappa=kappa, gamma=gamma, delta=delta)
        horizon = float(fixed.get("horizon_over_T", 5.0)) * T
        t_load, p_max = two_level.peak_loading(params, pulse, horizon)
        return p_max, t_load
    if scenario in ("lambda_adiabatic_tpr", "lambda_adiabatic_zed"):
        detuned = scenario.endswith("tpr")
        traj = lambda_memory._adiabatic_reduced_run(
            g_over_k * kappa, kappa, T, T, detuned=detuned
        )
        pop = traj.population("c_e")
        return float(pop[-1]), float(traj.times[-1])
    if scenario == "mitnu":
        kT0 = float(fixed["kT0"])
        sp = entangled_loading.SpdcParams(T=T, T0=kT0 / kappa)
        b = entangled_loading.spdc_biphoton(sp)
        params = two_level.TwoLevelParams(g=g_over_k * kappa, kappa=kappa)
        horizon = b.support[1] + 2.0 / kappa
        t_pk, p_max = entangled_loading.peak_joint_loading(params, b, horizon)
        return p_max, t_pk
    raise ValueError(f"unknown scenario {scenario!r}")


def optimize_coupling(
    scenario: str,
    fixed: dict,
    g_range: tuple[float, float] = DEFAULT_G_RANGE,
    tol: float = DEFAULT_G_TOL,
    n_coarse: int = 40,
) -> OptimumPoint:
    """Maximize the loading probability over the coupling rate.

    Coarse scan on a log-spaced grid (at least 40 points) followed by
    golden-section refinement of the best grid cell; ties break toward
    the smaller coupling.
    """
    lo, hi = float(g_range[0]), float(g_range[1])
    if not (0 < lo < hi):
        raise ValueError("coupling search range must be positive and increasing")
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    grid = np.geomspace(lo, hi, max(n_coarse, 40))
    probs = np.empty(grid.size)
    t_loads = np.empty(grid.size)
    for i, g in enumerate(grid):
        probs[i], t_loads[i] = scenario_probability(scenario, float(g), fixed)
    if probs.max() - probs.min() < 1e-9:
        return OptimumPoint(
            g_opt=float(grid[0]),
            P_max=float(probs[0]),
            T_load=float(t_loads[0]),
            bracket=hi - lo,
            degenerate=True,
        )
    best = int(np.argmax(probs))
    a = float(grid[max(best - 1, 0)])
    b = float(grid[min(best + 1, grid.size - 1)])

    cache: dict[float, tuple[float, float]] = {}

    def objective(g: float) -> float:
        if g not in cache:
            cache[g] = scenario_probability(scenario, g, fixed)
        return cache[g][0]

    g_ref, p_ref = two_level._golden_max(objective, a, b, tol)
    if probs[best] >= p_ref:
        g_opt, p_max, t_load = float(grid[best]), float(probs[best]), float(t_loads[best])
    else:
        g_opt, p_max = float(g_ref), float(p_ref)
        t_load = cache[g_ref][1]
    return OptimumPoint(g_opt=g_opt, P_max=p_max, T_load=t_load, bracket=min(tol, b - a))


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, then the env cap, then cpu count."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV)
    cap = int(env) if env else 4
    return max(1, min(cap, os.cpu_count() or 1))


def _sweep_cell(args) -> dict:
    scenario, axis_items, fixed, optimize_g, g_range, g_tol = args
    row = dict(axis_items)
    try:
        cell_fixed = dict(fixed)
        cell_fixed.update(axis_items)
        if optimize_g:
            opt = optimize_coupling(scenario, cell_fixed, g_range, g_tol)
            row.update(
                g_opt=opt.g_opt, P_max=opt.P_max, T_load=opt.T_load, error=""
            )
        else:
            g = float(cell_fixed.pop("g_over_k"))
            p_max, t_load = scenario_probability(scenario, g, cell_fixed)
            row.update(P_max=p_max, T_load=t_load, error="")
    except Exception as exc:  # per-cell failures are recorded, not fatal
        row.update(P_max=float("nan"), T_load=float("nan"), error=str(exc))
        if optimize_g:
            row.update(g_opt=float("nan"))
    return row


def sweep(spec: SweepSpec, workers: int | None = None) -> list[dict]:
    """Evaluate a sweep, row-major over the axes, deterministically ordered."""
    names = [name for name, _ in spec.axes]
    grids = [np.asarray(grid, dtype=float) for _, grid in spec.axes]
    cells = []
    if len(grids) == 1:
        for v in grids[0]:
            cells.append(((names[0], float(v)),))
    else:
        for v1 in grids[0]:
            for v2 in grids[1]:
                cells.append(((names[0], float(v1)), (names[1], float(v2))))
    payloads = [
        (spec.scenario, cell, spec.fixed, spec.optimize_g, spec.g_range, spec.g_tol)
        for cell in cells
    ]
    n_workers = resolve_workers(workers)
    if n_workers == 1 or len(payloads) == 1:
        return [_sweep_cell(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(_sweep_cell, payloads))


def throughput_compare(T_a: float, P_a: float, T_b: float, P_b: float) -> float:
    """Throughput ratio of two source+loading designs.

    The source rate scales with bandwidth, i.e. inversely with the pulse
    width, so the ratio is (P_a / T_a) / (P_b / T_b).
    """
    if P_b <= 0:
        raise ValueError("reference design has zero throughput")
    if T_a <= 0 or T_b <= 0:
        raise ValueError("pulse widths must be positive")
    return (P_a / T_a) / (P_b / T_b)
