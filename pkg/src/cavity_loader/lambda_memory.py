"""Loading a Lambda-level trapped atom: full dynamics and reductions.

The cavity photon drives |g> -> |r> with vacuum Rabi coupling g_c while a
classical control field of Rabi frequency Omega(t) (and optional phase
ramp phi_z) connects |r> to the metastable target |e>.  The full
three-amplitude equations of motion are

    d(beta)/dt = -i g_c c_r - i sqrt(2 kappa) Phi_b(t) - kappa beta
    d(c_r)/dt  = -i g_c beta + i Delta1 c_r - i Omega(t) c_e - gamma_r c_r
    d(c_e)/dt  = -i Omega(t) c_r - i (Delta2 - Delta1 + dphi_z/dt) c_e.

For detunings large compared to the couplings, the far-detuned upper
state follows the others adiabatically and the system reduces to an
effective two-level problem with coupling g_c Omega(t) / Delta1, which
is what makes both loading schemes analyzable:

* non-adiabatic: constant control switched off at the instant the
  target population peaks, freezing the Rabi oscillation;
* adiabatic passage: a shaped control that keeps the system in the
  dark state while the photon enters the cavity (requires kappa T >= 4).

Throughout, the constant light shift imprinted on the cavity leg is
assumed compensated by pre-shifting the input photon's carrier by
g_c^2 / Delta1 (see ``compensated_pulse``); populations are reported in
that convention.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import numerics
from .numerics import OdeSystem
from .pulses import PulseShape, frequency_shifted, make_sech
from .two_level import (
    Trajectory,
    _drive_max_step,
    _Kernels,
    peak_loading,
    TwoLevelParams,
)

__all__ = [
    "LambdaParams",
    "ReducedParams",
    "DarkBright",
    "full_ode",
    "reduce",
    "stark_compensation",
    "compensated_pulse",
    "nonadiabatic_load",
    "nonadiabatic_amplitude",
    "adiabatic_control_pulse",
    "adiabatic_load_tpr",
    "adiabatic_load_zed",
    "zed_phase_rate",
    "dark_bright_decompose",
    "timing_offset_scan",
    "control_from_csv",
]

# adiabatic elimination is trusted when the detuning exceeds the couplings
# (and gamma_r) by at least this factor
VALIDITY_RATIO = 10.0


@dataclass(frozen=True)
class LambdaParams:
    """Rates of the Lambda system (1/time units).

    ``omega`` may be a nonnegative constant or a map t -> Omega(t);
    ``phi_z_dot`` is the control phase derivative (defaults to zero).
    """

    g_c: float
    kappa: float
    delta1: float
    delta2: float
    omega: float | Callable[[float], float] = 0.0
    gamma_r: float = 0.0
    phi_z_dot: Callable[[float], float] | None = None

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.g_c < 0:
            raise ValueError("g_c must be nonnegative")
        if self.gamma_r < 0:
            raise ValueError("gamma_r must be nonnegative")
        if not callable(self.omega) and self.omega < 0:
            raise ValueError("omega must be nonnegative")

    @property
    def omega_const(self) -> float:
        """The constant control amplitude; error if omega is time dependent."""
        if callable(self.omega):
            raise ValueError("omega is time dependent")
        return float(self.omega)

    def omega_at(self, t):
        if callable(self.omega):
            return self.omega(t)
        return self.omega if np.ndim(t) == 0 else np.full(np.shape(t), self.omega)

    def phi_z_dot_at(self, t):
        if self.phi_z_dot is None:
            return 0.0 if np.ndim(t) == 0 else np.zeros(np.shape(t))
        return self.phi_z_dot(t)


@dataclass(frozen=True)
class ReducedParams:
    """Effective two-level quantities after adiabatic elimination of |r>.

    ``g_eff``, ``delta_eff`` and ``gamma_eff`` are maps of time (constant
    functions when the control is constant); ``drive_decay_rate`` is the
    g_c^2 gamma_r / Delta1^2 damping the loading inherits from the upper
    state.
    """

    g_eff: Callable[[float], float]
    Gamma_r: complex
    delta_eff: Callable[[float], float]
    gamma_eff: Callable[[float], float]
    drive_decay_rate: float
    valid_regime: bool
    constant: bool


@dataclass(frozen=True)
class DarkBright:
    theta: float
    d_amp: complex
    b_amp: complex
    r_amp: complex


def full_ode(
    p: LambdaParams,
    pulse: PulseShape,
    grid,
    breakpoints: Sequence[float] = (),
    rtol: float = numerics.DEFAULT_RTOL,
    atol: float = numerics.DEFAULT_ATOL,
) -> Trajectory:
    """Integrate the full three-amplitude system from the vacuum state.

    ``breakpoints`` lists times where the control is discontinuous (e.g.
    the switch-off of a step control) so the integrator never steps
    across them.
    """
    grid = np.asarray(grid, dtype=float)
    t_start = min(float(grid[0]), pulse.support[0])
    g_c, kappa, gamma_r = p.g_c, p.kappa, p.gamma_r
    d1, d2 = p.delta1, p.delta2
    drive = math.sqrt(2.0 * kappa)

    def rhs(t, y):
        beta, cr, ce = y
        om = p.omega_at(t)
        return np.array(
            [
                -1j * g_c * cr - 1j * drive * pulse.amplitude(t) - kappa * beta,
                -1j * g_c * beta + 1j * d1 * cr - 1j * om * ce - gamma_r * cr,
                -1j * om * cr - 1j * (d2 - d1 + p.phi_z_dot_at(t)) * ce,
            ]
        )

    system = OdeSystem(3, rhs, np.zeros(3, dtype=complex), (t_start, float(grid[-1])))
    # the c_r phase rotates at Delta1; keep steps well inside one cycle
    max_step = _drive_max_step(pulse, t_start, float(grid[-1]))
    phase_rate = max(abs(d1), abs(d2 - d1)) + p.kappa
    max_step = min(max_step, 0.5 / phase_rate if phase_rate > 0 else max_step)
    states = numerics.integrate(
        system, grid, rtol=rtol, atol=atol, max_step=max_step, breakpoints=breakpoints
    )
    return Trajectory(
        times=grid,
        amplitudes={"beta": states[:, 0], "c_r": states[:, 1], "c_e": states[:, 2]},
        metadata={"params": p, "pulse": pulse.kind},
    )


def reduce(p: LambdaParams, omega_sup: float | None = None) -> ReducedParams:
    """Adiabatically eliminate the upper state.

    Valid for detunings much larger than the couplings; a diagnostic
    warning is issued when Delta1 is less than 10x max(g_c, sup Omega)
    or 10x gamma_r.
    """
    if p.delta1 == 0:
        raise ValueError("adiabatic elimination requires a nonzero Delta1")
    d1 = p.delta1
    g_c, gamma_r = p.g_c, p.gamma_r
    Gamma_r = 1.0 + 1j * gamma_r / d1
    constant = not callable(p.omega)

    def g_eff(t):
        return g_c * p.omega_at(t) / d1

    def delta_eff(t):
        om = p.omega_at(t)
        return (g_c**2 - om**2) / d1 + p.delta1 - p.delta2 - p.phi_z_dot_at(t)

    def gamma_eff(t):
        # g_eff * gamma_r * (Omega/g_c - g_c/Omega) / Delta1, written in the
        # cancelled form that stays finite as Omega -> 0
        om = p.omega_at(t)
        return gamma_r * (om**2 - g_c**2) / d1**2

    if omega_sup is None and constant:
        omega_sup = float(p.omega)
    valid = True
    if omega_sup is not None:
        scale = max(g_c, omega_sup, gamma_r)
        valid = abs(d1) >= VALIDITY_RATIO * scale
        if not valid:
            warnings.warn(
                "adiabatic elimination outside its validity regime: "
                f"|Delta1| = {abs(d1):.3g} < {VALIDITY_RATIO} x max(g_c, Omega, gamma_r) = "
                f"{VALIDITY_RATIO * scale:.3g}",
                stacklevel=2,
            )
    return ReducedParams(
        g_eff=g_eff,
        Gamma_r=complex(Gamma_r),
        delta_eff=delta_eff,
        gamma_eff=gamma_eff,
        drive_decay_rate=g_c**2 * gamma_r / d1**2,
        valid_regime=valid,
        constant=constant,
    )


def stark_compensation(p: LambdaParams) -> float:
    """Delta2 that zeroes the effective detuning for a constant control."""
    if p.delta1 == 0:
        raise ValueError("stark compensation requires a nonzero Delta1")
    if p.phi_z_dot is not None:
        raise ValueError("stark compensation assumes a constant control phase")
    om = p.omega_const
    return (p.g_c**2 - om**2) / p.delta1 + p.delta1


def compensated_pulse(pulse: PulseShape, p: LambdaParams) -> PulseShape:
    """Input pulse with its carrier pre-shifted by the cavity-leg light shift.

    Shifting the photon's center frequency by g_c^2 / Delta1 cancels the
    constant phase the reduction imprints on the cavity amplitude; the
    reduced models assume this has been done, so full-system runs should
    be driven with the pulse returned here.
    """
    return frequency_shifted(pulse, p.g_c**2 / p.delta1)


def effective_two_level(p: LambdaParams) -> tuple[complex, float, float, float]:
    """(complex coupling, gamma_eff, delta_eff, drive decay) for constant control."""
    red = reduce(p)
    om = p.omega_const
    g_tilde = complex(p.g_c * om / p.delta1) / red.Gamma_r
    return g_tilde, float(red.gamma_eff(0.0)), float(red.delta_eff(0.0)), red.drive_decay_rate


def nonadiabatic_amplitude(
    p: LambdaParams,
    pulse: PulseShape,
    t: float,
    spec: numerics.QuadratureSpec = numerics.DEFAULT_QUAD,
) -> complex:
    """Target-state amplitude at time t (control still on) for constant Omega.

    Uses the effective two-level closed form; the magnitude includes the
    upper-state-induced damping, so |.|^2 is the loading probability.
    """
    if p.omega_const <= 0:
        return 0.0 + 0.0j
    g_tilde, gamma_e, delta_e, d = effective_two_level(p)
    kern = _Kernels(p.kappa, complex(gamma_e, -delta_e), g_tilde, extra_decay=d)
    _, c_e = kern.amplitudes_at(pulse, t, spec)
    return c_e


def nonadiabatic_load(
    p: LambdaParams,
    pulse: PulseShape,
    t_load: float,
) -> float:
    """Loading probability |c_e(T_Load)|^2 for the step-control scheme.

    The control is constant up to ``t_load`` and zero afterwards; the
    target amplitude is frozen at switch-off, so the value at t_load is
    the final loading probability.
    """
    return float(abs(nonadiabatic_amplitude(p, pulse, t_load)) ** 2)


def adiabatic_control_pulse(g_c: float, kappa: float, T: float, t):
    """Dark-state control amplitude matched to a sech input of width T.

    ``t`` is measured from the input pulse center.  Finite positive for
    all finite t when kappa T > 4; at kappa T = 4 the amplitude diverges
    as t -> -infinity.  kappa T < 4 is rejected: no positive real control
    can impedance-match a shorter pulse.
    """
    kT = kappa * T
    if kT < 4.0:
        raise ValueError(f"adiabatic control requires kappa*T >= 4, got {kT:.4g}")
    x = np.clip(np.asarray(t, dtype=float) * 4.0 / T, -350.0, 350.0)
    # sech(x)/sqrt(1+tanh(x)) = sqrt(2)/sqrt(e^{2x}+1), stable for x << 0
    with np.errstate(divide="ignore"):
        val = g_c * math.sqrt(2.0) / np.sqrt(
            (np.exp(2.0 * x) + 1.0) * (np.tanh(x) + kT / 2.0 - 1.0)
        )
    return val if np.ndim(t) else float(val)


def zed_phase_rate(
    p: LambdaParams, T: float, t_center: float = 0.0
) -> Callable[[float], float]:
    """Analytic control phase ramp that zeroes the effective detuning.

    dphi_z/dt = Delta1 - Delta2 + (g_c^2 - Omega^2(t)) / Delta1 with the
    dark-state control of ``adiabatic_control_pulse`` centered at
    ``t_center``.
    """
    g_c, kappa, d1, d2 = p.g_c, p.kappa, p.delta1, p.delta2

    def rate(t):
        om = adiabatic_control_pulse(g_c, kappa, T, np.asarray(t) - t_center)
        return d1 - d2 + (g_c**2 - om**2) / d1

    return rate


def _adiabatic_reduced_run(
    g_prime: float,
    kappa: float,
    T: float,
    t0: float,
    detuned: bool,
    grid=None,
    control_offset: float = 0.0,
    rtol: float = numerics.DEFAULT_RTOL,
    atol: float = numerics.DEFAULT_ATOL,
) -> Trajectory:
    """Reduced-model adiabatic run.

    ``detuned`` selects the two-photon-resonance variant, which keeps the
    light shifts g' and g' Omega'^2 on the diagonal (the dark state stays
    at zero energy, resonant with the raw drive).  The zero-effective-
    detuning variant cancels the shift between the two levels with the
    phase ramp and assumes the drive carrier has been pre-shifted to
    match, leaving a resonant two-level pair.
    """
    pulse = make_sech(T, t0)
    t_end = t0 + 4.0 * T + max(control_offset, 0.0)
    if grid is None:
        grid = np.linspace(pulse.support[0], t_end, 1201)
    else:
        grid = np.asarray(grid, dtype=float)
        t_end = float(grid[-1])
    drive = math.sqrt(2.0 * kappa)

    def omega_unit(t):
        # control amplitude in units of g_c, shifted to the pulse frame
        return adiabatic_control_pulse(1.0, kappa, T, t - t0 - control_offset)

    def rhs(t, y):
        beta, ce = y
        om_u = omega_unit(t)
        g_t = g_prime * om_u
        shift_b = g_prime if detuned else 0.0
        shift_e = g_prime * om_u**2 if detuned else 0.0
        return np.array(
            [
                -1j * shift_b * beta
                - 1j * g_t * ce
                - 1j * drive * pulse.amplitude(t)
                - kappa * beta,
                -1j * g_t * beta - 1j * shift_e * ce,
            ]
        )

    system = OdeSystem(
        2, rhs, np.zeros(2, dtype=complex), (float(grid[0]), float(grid[-1]))
    )
    states = numerics.integrate(
        system, grid, rtol=rtol, atol=atol, max_step=T / 16.0
    )
    return Trajectory(
        times=grid,
        amplitudes={"beta": states[:, 0], "c_e": states[:, 1]},
        metadata={
            "g_prime": g_prime,
            "kappa": kappa,
            "T": T,
            "pulse_t0": t0,
            "scheme": "tpr" if detuned else "zed",
            "control_offset": control_offset,
            "t_end": t_end,
        },
    )


def adiabatic_load_tpr(
    g_c: float,
    delta1: float,
    kappa: float,
    T: float,
    grid=None,
    pulse_t0: float | None = None,
) -> tuple[Trajectory, float]:
    """Adiabatic passage at two-photon resonance (Delta1 = Delta2, no ramp).

    Returns the reduced-model trajectory and the settled loading
    probability |c_e|^2 at four widths past the pulse center (t = 5T in
    the default convention where the pulse is centered at T).  Only the
    combination g' = g_c^2 / Delta1 matters for the populations.
    """
    g_prime = g_c**2 / delta1
    t0 = T if pulse_t0 is None else pulse_t0
    traj = _adiabatic_reduced_run(g_prime, kappa, T, t0, detuned=True, grid=grid)
    _attach_upper_state(traj, g_c, delta1, kappa, T, t0)
    return traj, float(traj.population("c_e")[-1])


def adiabatic_load_zed(
    g_c: float,
    delta1: float,
    kappa: float,
    T: float,
    grid=None,
    pulse_t0: float | None = None,
) -> tuple[Trajectory, float]:
    """Adiabatic passage with the phase ramp that zeroes the effective
    detuning; same conventions as ``adiabatic_load_tpr``."""
    g_prime = g_c**2 / delta1
    t0 = T if pulse_t0 is None else pulse_t0
    traj = _adiabatic_reduced_run(g_prime, kappa, T, t0, detuned=False, grid=grid)
    _attach_upper_state(traj, g_c, delta1, kappa, T, t0)
    return traj, float(traj.population("c_e")[-1])


def _attach_upper_state(
    traj: Trajectory, g_c: float, delta1: float, kappa: float, T: float, t0: float
) -> None:
    """Reconstruct c_r from the eliminated-state relation and store it."""
    om = adiabatic_control_pulse(g_c, kappa, T, traj.times - t0)
    traj.amplitudes["c_r"] = (
        g_c * traj.amplitudes["beta"] + om * traj.amplitudes["c_e"]
    ) / delta1
    traj.metadata["omega"] = om


def dark_bright_decompose(
    g_amp: complex, e_amp: complex, omega: float, g_c: float, r_amp: complex = 0.0
) -> DarkBright:
    """Project (cavity, target) amplitudes onto the dark/bright basis."""
    omega0 = math.hypot(omega, g_c)
    if omega0 == 0.0:
        raise ValueError("dark/bright basis undefined for Omega = g_c = 0")
    cos_t = omega / omega0
    sin_t = g_c / omega0
    return DarkBright(
        theta=math.atan2(g_c, omega),
        d_amp=-cos_t * g_amp + sin_t * e_amp,
        b_amp=sin_t * g_amp + cos_t * e_amp,
        r_amp=complex(r_amp),
    )


def timing_offset_scan(scheme: str, config: dict, offsets) -> np.ndarray:
    """Loading probability versus timing error for either scheme.

    For the non-adiabatic scheme the control stops at T_Load + offset;
    for the adiabatic scheme the whole control is shifted by the offset.
    ``config`` carries kappa, T and the scheme's coupling (``g`` for
    non-adiabatic, ``g_prime`` and optional ``variant`` for adiabatic).
    """
    if scheme not in ("nonadiabatic", "adiabatic"):
        raise ValueError(f"unknown scheme {scheme!r}")
    offsets = np.asarray(offsets, dtype=float)
    kappa = float(config["kappa"])
    T = float(config["T"])
    if scheme == "nonadiabatic":
        g = float(config["g"])
        pulse = config.get("pulse") or make_sech(T, T)
        params = TwoLevelParams(g=g, kappa=kappa)
        t_load = config.get("t_load")
        if t_load is None:
            t_load, _ = peak_loading(params, pulse, config.get("horizon", 5.0 * T))
        kern = _Kernels(kappa, 0.0 + 0.0j, g)
        out = np.empty(offsets.shape)
        for i, off in enumerate(offsets):
            t_stop = t_load + off
            if t_stop <= pulse.support[0]:
                out[i] = 0.0
            else:
                _, c_e = kern.amplitudes_at(pulse, float(t_stop))
                out[i] = abs(c_e) ** 2
        return out
    g_prime = float(config["g_prime"])
    detuned = config.get("variant", "zed") == "tpr"
    t0 = float(config.get("pulse_t0", T))
    out = np.empty(offsets.shape)
    for i, off in enumerate(offsets):
        traj = _adiabatic_reduced_run(
            g_prime, kappa, T, t0, detuned=detuned, control_offset=float(off)
        )
        out[i] = float(traj.population("c_e")[-1])
    return out


def control_from_csv(path):
    """Load a tabulated control field from CSV columns (t, Omega, phi_z).

    Returns (omega, phi_z, phi_z_dot) callables; Omega and phi_z are
    linearly interpolated, so phi_z_dot is piecewise constant.
    """
    import csv as _csv

    with open(path, newline="") as handle:
        rows = list(_csv.reader(handle))
    if not rows:
        raise ValueError(f"{path}: empty control file")
    try:
        float(rows[0][0])
    except (ValueError, IndexError):
        pass
    else:
        raise ValueError(f"{path}: header row required")
    data = np.array([[float(c) for c in row] for row in rows[1:] if row])
    if data.shape[1] != 3:
        raise ValueError(f"{path}: expected columns t, Omega, phi_z")
    t, om, phz = data[:, 0], data[:, 1], data[:, 2]
    if np.any(np.diff(t) <= 0):
        raise ValueError(f"{path}: times must be strictly increasing")
    if np.any(om < 0):
        raise ValueError(f"{path}: Omega must be nonnegative")
    slopes = np.diff(phz) / np.diff(t)

    def omega(x):
        return np.interp(x, t, om)

    def phi_z(x):
        return np.interp(x, t, phz)

    def phi_z_dot(x):
        idx = np.clip(np.searchsorted(t, x, side="right") - 1, 0, len(slopes) - 1)
        inside = (np.asarray(x) >= t[0]) & (np.asarray(x) <= t[-1])
        return np.where(inside, slopes[idx], 0.0)

    return omega, phi_z, phi_z_dot
