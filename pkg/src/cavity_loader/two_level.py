"""Loading dynamics of a two-level trapped atom driven by a single photon.

Two independent routes are provided and cross-checked against each
other: direct integration of the baseband equations of motion

    d(beta)/dt = -i g c_e - i sqrt(2 kappa) Phi_b(t) - kappa beta
    d(c_e)/dt  =  i Delta c_e - i g beta - gamma c_e

and the closed-form convolution solution obtained by Laplace transform,
whose decay constants are

    gamma' = gamma - i Delta
    xi     = sqrt((kappa - gamma')^2 - 4 g^2)      (principal branch)
    kappa_pm = (kappa + gamma' +/- xi) / 2,   kappa'_pm = kappa_pm - gamma'.

The loading probability is |c_e(t)|^2.  All rates are in inverse time
units; time is whatever unit makes kappa of order one (the CLI works in
units of kappa).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import numerics
from .numerics import OdeSystem, QuadratureSpec
from .pulses import PulseShape

__all__ = [
    "TwoLevelParams",
    "DerivedRates",
    "Trajectory",
    "derived_rates",
    "amplitude_closed_form",
    "amplitude_ode",
    "spectral_amplitude",
    "peak_loading",
    "dimensionless_load",
]

# |xi| below this multiple of kappa is treated as the confluent (critically
# damped) point; the factored kernels below are continuous through it anyway
DEGENERATE_XI_FRACTION = 1e-6


@dataclass(frozen=True)
class TwoLevelParams:
    """Physical rates of the atom-cavity system (all 1/time).

    g is the vacuum Rabi coupling, kappa the cavity decay rate, gamma the
    non-cavity spontaneous decay rate and delta the detuning between the
    input carrier and the atomic transition.
    """

    g: float
    kappa: float
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.g < 0:
            raise ValueError("g must be nonnegative")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")


@dataclass(frozen=True)
class DerivedRates:
    """Laplace-domain constants of the closed-form solution."""

    gamma_prime: complex
    xi: complex
    kappa_plus: complex
    kappa_minus: complex
    kappa_p_plus: complex
    kappa_p_minus: complex
    degenerate: bool


@dataclass
class Trajectory:
    """Simulation result: time grid, named complex series, populations."""

    times: np.ndarray
    amplitudes: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    @property
    def populations(self) -> dict[str, np.ndarray]:
        return {k: np.abs(v) ** 2 for k, v in self.amplitudes.items()}

    def population(self, name: str) -> np.ndarray:
        return np.abs(self.amplitudes[name]) ** 2


def derived_rates(p: TwoLevelParams) -> DerivedRates:
    """Decay constants kappa_pm, kappa'_pm, xi, gamma' for the closed form."""
    return _derived_rates_general(p.kappa, complex(p.gamma, -p.delta), p.g**2)


def _derived_rates_general(
    kappa: float, gamma_prime: complex, g_squared: complex
) -> DerivedRates:
    xi = np.sqrt(complex((kappa - gamma_prime) ** 2 - 4.0 * g_squared))
    kp = (kappa + gamma_prime + xi) / 2.0
    km = (kappa + gamma_prime - xi) / 2.0
    return DerivedRates(
        gamma_prime=complex(gamma_prime),
        xi=complex(xi),
        kappa_plus=complex(kp),
        kappa_minus=complex(km),
        kappa_p_plus=complex(kp - gamma_prime),
        kappa_p_minus=complex(km - gamma_prime),
        degenerate=bool(abs(xi) < DEGENERATE_XI_FRACTION * kappa),
    )


def _sinhc(z):
    """sinh(z)/z, stable at z -> 0 (series below |z| = 1e-4)."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    out = np.where(small, 1.0 + z * z / 6.0, np.sinh(safe) / safe)
    return out


# kernel evaluation switches from the exponential difference to the factored
# sinhc form when |xi s / 2| drops below this, avoiding cancellation near the
# confluent point and overflow far from it
_FACTORED_THRESHOLD = 0.1


class _Kernels:
    """Causal response kernels of the linear (beta, c_e) pair.

    Parameterized by complex gamma' and complex g^2 so the lambda-system
    reduction (complex effective coupling, extra drive damping) can reuse
    the same closed form.  For s >= 0:

        ce_kernel(s)   = (e^{-kappa_+ s} - e^{-kappa_- s}) / xi * e^{-d s}
        beta_kernel(s) = (kappa'_+ e^{-kappa_+ s} - kappa'_- e^{-kappa_- s})
                         / xi * e^{-d s}

    evaluated in a factored form that is exact and cancellation-free
    through the confluent point xi = 0.
    """

    def __init__(
        self,
        kappa: float,
        gamma_prime: complex,
        g_amp: complex,
        extra_decay: float = 0.0,
    ):
        self.kappa = float(kappa)
        self.gamma_prime = complex(gamma_prime)
        self.g_amp = complex(g_amp)
        self.rates = _derived_rates_general(kappa, gamma_prime, g_amp**2)
        self.extra_decay = float(extra_decay)
        self._mean = (kappa + gamma_prime) / 2.0 + extra_decay
        self._half_diff = (kappa - gamma_prime) / 2.0

    def ce_kernel(self, s):
        return self._eval(s, want_beta=False)

    def beta_kernel(self, s):
        return self._eval(s, want_beta=True)

    def _eval(self, s, want_beta: bool):
        s_arr = np.asarray(s, dtype=float)
        scalar = s_arr.ndim == 0
        s_arr = np.atleast_1d(s_arr)
        out = np.zeros(s_arr.shape, dtype=complex)
        pos = s_arr >= 0 if want_beta else s_arr > 0
        if np.any(pos):
            sp = s_arr[pos]
            xi = self.rates.xi
            half = 0.5 * xi * sp
            factored = np.abs(half) < _FACTORED_THRESHOLD
            vals = np.empty(sp.shape, dtype=complex)
            if np.any(factored):
                sf = sp[factored]
                hf = half[factored]
                damp = np.exp(-self._mean * sf)
                if want_beta:
                    vals[factored] = (
                        np.cosh(hf) - self._half_diff * sf * _sinhc(hf)
                    ) * damp
                else:
                    vals[factored] = -sf * _sinhc(hf) * damp
            direct = ~factored
            if np.any(direct):
                sd = sp[direct]
                ep = np.exp(-(self.rates.kappa_plus + self.extra_decay) * sd)
                em = np.exp(-(self.rates.kappa_minus + self.extra_decay) * sd)
                if want_beta:
                    vals[direct] = (
                        self.rates.kappa_p_plus * ep - self.rates.kappa_p_minus * em
                    ) / xi
                else:
                    vals[direct] = (ep - em) / xi
            out[pos] = vals
        return out[0] if scalar else out

    def ce_prefactor(self) -> complex:
        return self.g_amp * math.sqrt(2.0 * self.kappa)

    def amplitudes_at(
        self,
        pulse: PulseShape,
        t: float,
        spec: QuadratureSpec = numerics.DEFAULT_QUAD,
    ) -> tuple[complex, complex]:
        """(beta, c_e) at time t by convolution over the pulse support."""
        lo, hi = pulse.support
        upper = min(t, hi)
        if upper <= lo:
            return 0.0 + 0.0j, 0.0 + 0.0j
        brk = pulse.breakpoints + (pulse.t0,)
        beta = -1j * math.sqrt(2.0 * self.kappa) * numerics.quad1(
            lambda tau: pulse.amplitude(tau) * self.beta_kernel(t - tau),
            (lo, upper),
            spec,
            breakpoints=brk,
        )
        c_e = self.ce_prefactor() * numerics.quad1(
            lambda tau: pulse.amplitude(tau) * self.ce_kernel(t - tau),
            (lo, upper),
            spec,
            breakpoints=brk,
        )
        return beta, c_e


def amplitude_closed_form(
    p: TwoLevelParams,
    pulse: PulseShape,
    t: float,
    spec: QuadratureSpec = numerics.DEFAULT_QUAD,
) -> tuple[complex, complex]:
    """Closed-form (beta, c_e) at time t.

    The convolution runs from the pulse support start, which generalizes
    the textbook lower limit 0 to pulses that begin before t = 0.
    """
    kern = _Kernels(p.kappa, complex(p.gamma, -p.delta), p.g)
    return kern.amplitudes_at(pulse, t, spec)


def amplitude_ode(
    p: TwoLevelParams,
    pulse: PulseShape,
    grid,
    rtol: float = numerics.DEFAULT_RTOL,
    atol: float = numerics.DEFAULT_ATOL,
    dense_output: bool = False,
):
    """Integrate the baseband equations of motion on the given time grid.

    This is the brute-force cross-check for the closed form; it also
    covers time-dependent generalizations the closed form cannot.
    """
    grid = np.asarray(grid, dtype=float)
    lo = pulse.support[0]
    t_start = min(float(grid[0]), lo)
    g, kappa, gamma, delta = p.g, p.kappa, p.gamma, p.delta
    drive = math.sqrt(2.0 * kappa)

    def rhs(t, y):
        beta, ce = y
        return np.array(
            [
                -1j * g * ce - 1j * drive * pulse.amplitude(t) - kappa * beta,
                1j * delta * ce - 1j * g * beta - gamma * ce,
            ]
        )

    system = OdeSystem(2, rhs, np.zeros(2, dtype=complex), (t_start, float(grid[-1])))
    max_step = _drive_max_step(pulse, t_start, float(grid[-1]))
    result = numerics.integrate(
        system, grid, rtol=rtol, atol=atol, max_step=max_step, dense_output=dense_output
    )
    states = result[0] if dense_output else result
    traj = Trajectory(
        times=grid,
        amplitudes={"beta": states[:, 0], "c_e": states[:, 1]},
        metadata={"params": p, "pulse": pulse.kind},
    )
    if dense_output:
        return traj, result[1]
    return traj


def _drive_max_step(pulse: PulseShape, t_start: float, t_end: float) -> float:
    """Step cap so the solver cannot leap over the pulse from a quiet state."""
    width = pulse.T if math.isfinite(pulse.T) and pulse.T > 0 else (t_end - t_start)
    return max(width / 16.0, (t_end - t_start) * 1e-6)


def spectral_amplitude(
    p: TwoLevelParams,
    spectral_weight: Callable[[float], complex],
    omega_interval: tuple[float, float],
    t: float,
    origin: float = 0.0,
    spec: QuadratureSpec = numerics.DEFAULT_QUAD,
) -> complex:
    """c_e(t) assembled from per-frequency amplitudes.

    ``spectral_weight`` is the baseband spectrum (argument is the offset
    from the carrier) normalized so its |.|^2 integrates to one over
    ``omega_interval``.  Each frequency component responds independently;
    the results superpose.  Converges to the time-domain closed form when
    the weight is the Fourier transform of the pulse; quadratic cost, so
    intended for validation rather than production runs.
    """
    kern = _Kernels(p.kappa, complex(p.gamma, -p.delta), p.g)
    if t <= origin:
        return 0.0 + 0.0j
    inner_spec = QuadratureSpec(
        rtol=spec.rtol * 0.1, atol=spec.atol * 0.1, max_subdivisions=spec.max_subdivisions
    )

    def per_frequency(nu: float) -> complex:
        conv = numerics.quad1(
            lambda tau: np.exp(-1j * nu * tau) * kern.ce_kernel(t - tau),
            (origin, t),
            inner_spec,
        )
        return spectral_weight(nu) * conv

    integral = numerics.quad1(per_frequency, omega_interval, spec)
    return p.g * math.sqrt(p.kappa / math.pi) * integral


def peak_loading(
    p: TwoLevelParams,
    pulse: PulseShape,
    horizon: float,
    points_per_width: int = 400,
    refine_tol: float = 1e-10,
) -> tuple[float, float]:
    """Global maximum of |c_e(t)|^2 over [0, horizon].

    A dense scan (>= ``points_per_width`` samples per pulse width) locates
    the global basin despite Rabi oscillations; golden-section refinement
    then sharpens the peak.  Ties break toward the earliest time.
    """
    if pulse.kind == "zero":
        return 0.0, 0.0
    t_begin = min(0.0, pulse.support[0])
    width = pulse.T if math.isfinite(pulse.T) else (horizon - t_begin)
    n = max(int(np.ceil((horizon - t_begin) / width * points_per_width)), 64)
    grid = np.linspace(t_begin, horizon, n + 1)
    traj, interp = amplitude_ode(p, pulse, grid, dense_output=True)
    pop = traj.population("c_e")
    best = int(np.argmax(pop))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, n)]

    def objective(t: float) -> float:
        return abs(interp(t)[1]) ** 2

    t_peak, p_peak = _golden_max(objective, lo, hi, refine_tol * max(width, 1.0))
    if pop[best] >= p_peak:
        return float(grid[best]), float(pop[best])
    return float(t_peak), float(p_peak)


def _golden_max(f, a: float, b: float, tol: float) -> tuple[float, float]:
    """Golden-section maximum of f on [a, b] (unimodal on the bracket)."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    t = c if fc >= fd else d
    return t, max(fc, fd)


def dimensionless_load(
    kT: float,
    g_over_k: float,
    gamma_over_g: float,
    t_over_T: float,
    pulse_kind: str = "sech",
) -> float:
    """|c_e|^2 at t/T for the dimensionless design parameters.

    Works at kappa = 1 internally; the result depends only on the ratios
    (kappa T, g/kappa, gamma/g, t/T), not on the absolute rate scale.
    """
    if not kT > 0:
        raise ValueError("kT must be positive")
    kappa = 1.0
    T = kT / kappa
    g = g_over_k * kappa
    p = TwoLevelParams(g=g, kappa=kappa, gamma=gamma_over_g * g, delta=0.0)
    pulse = _standard_pulse(pulse_kind, T)
    _, c_e = amplitude_closed_form(p, pulse, t_over_T * T)
    return float(abs(c_e) ** 2)


def _standard_pulse(kind: str, T: float) -> PulseShape:
    """Pulse of the given family centered one width after the time origin."""
    from .pulses import make_named

    return make_named(kind, T, T)
