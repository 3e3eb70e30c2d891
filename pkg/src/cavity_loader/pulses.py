"""Baseband temporal pulse shapes for single-photon drives.

Every simulation in this package is driven by a normalized complex
envelope Phi_b(t) (the optical carrier is factored out).  A pulse knows
its effective width T, its center/reference time t0 and a finite support
window outside which it evaluates to exactly zero, so quadrature and ODE
windows can be chosen mechanically.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "PulseShape",
    "make_sech",
    "make_named",
    "make_zero",
    "make_tabulated",
    "read_pulse_csv",
    "effective_width",
    "frequency_shifted",
    "PULSE_KINDS",
]

#: named analytic families accepted by make_named / the CLI
PULSE_KINDS = ("sech", "rectangular", "exp_rising", "exp_decaying", "zero")

# sech support cutoff |t - t0| <= _SECH_CUTOFF * T; tail norm 1 - tanh(20) ~ 4e-18
_SECH_CUTOFF = 5.0
# one-sided exponential cutoff in units of T; tail norm e^{-32} ~ 1.3e-14
_EXP_CUTOFF = 16.0


@dataclass(frozen=True)
class PulseShape:
    """Normalized complex baseband envelope with finite support.

    Attributes
    ----------
    kind : str
        Family tag ("sech", "rectangular", ... or a derived tag).
    T : float
        Effective width in time units (NaN for the zero pulse).
    t0 : float
        Center or reference time of the envelope.
    support : (float, float)
        Window outside which ``amplitude`` returns exactly 0.
    """

    kind: str
    T: float
    t0: float
    support: tuple[float, float]
    _func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    #: interior times where the envelope is non-smooth (quadrature split points)
    breakpoints: tuple[float, ...] = ()

    def amplitude(self, t):
        """Evaluate Phi_b(t); accepts scalars or arrays, zero off support."""
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.support
        inside = (t_arr >= lo) & (t_arr <= hi)
        out = np.zeros(t_arr.shape, dtype=complex)
        if np.any(inside):
            vals = self._func(t_arr[inside] if t_arr.ndim else t_arr)
            if t_arr.ndim:
                out[inside] = vals
            else:
                out = np.where(inside, np.asarray(vals, dtype=complex), 0.0 + 0.0j)
        return out if t_arr.ndim else complex(out)

    def __call__(self, t):
        return self.amplitude(t)

    def norm_squared(self) -> float:
        """Adaptive quadrature of |Phi_b|^2 over the support."""
        from . import numerics

        lo, hi = self.support
        if not hi > lo:
            return 0.0
        val = numerics.quad1(
            lambda t: complex(abs(self.amplitude(t)) ** 2),
            (lo, hi),
            breakpoints=self.breakpoints + (self.t0,),
        )
        return float(val.real)


def make_sech(T: float, t0: float) -> PulseShape:
    """Hyperbolic-secant envelope sqrt(2/T)*sech(4(t-t0)/T).

    The tails are truncated at |t - t0| = 5T (discarded norm ~4e-18) and
    the envelope is renormalized over the retained window.
    """
    _check_width(T)
    # exact norm over the truncated window: tanh(4*cutoff)
    renorm = 1.0 / math.sqrt(math.tanh(4.0 * _SECH_CUTOFF))
    amp = math.sqrt(2.0 / T) * renorm

    def func(t):
        return amp / np.cosh(4.0 * (t - t0) / T) + 0.0j

    return PulseShape(
        kind="sech",
        T=T,
        t0=t0,
        support=(t0 - _SECH_CUTOFF * T, t0 + _SECH_CUTOFF * T),
        _func=func,
    )


def make_named(kind: str, T: float, t0: float) -> PulseShape:
    """Construct a unit-norm pulse of a named family with width T.

    Families: "sech"; "rectangular" (height 1/sqrt(T) on
    [t0 - T/2, t0 + T/2]); "exp_decaying" (sqrt(2/T) e^{-(t-t0)/T} for
    t >= t0); "exp_rising" (its time mirror, nonzero for t <= t0);
    "zero".
    """
    if kind == "sech":
        return make_sech(T, t0)
    if kind == "zero":
        return make_zero(T, t0)
    _check_width(T)
    if kind == "rectangular":
        height = 1.0 / math.sqrt(T)

        def func(t):
            return np.full(np.shape(t), height, dtype=complex)

        return PulseShape(
            kind="rectangular",
            T=T,
            t0=t0,
            support=(t0 - T / 2.0, t0 + T / 2.0),
            _func=func,
        )
    if kind in ("exp_decaying", "exp_rising"):
        sign = -1.0 if kind == "exp_decaying" else 1.0
        # norm over the truncated one-sided window: 1 - e^{-2*cutoff}
        renorm = 1.0 / math.sqrt(1.0 - math.exp(-2.0 * _EXP_CUTOFF))
        amp = math.sqrt(2.0 / T) * renorm

        def func(t):
            return amp * np.exp(sign * (np.asarray(t) - t0) / T) + 0.0j

        support = (
            (t0, t0 + _EXP_CUTOFF * T)
            if kind == "exp_decaying"
            else (t0 - _EXP_CUTOFF * T, t0)
        )
        return PulseShape(kind=kind, T=T, t0=t0, support=support, _func=func)
    raise ValueError(f"unknown pulse kind {kind!r}")


def make_zero(T: float = math.nan, t0: float = 0.0) -> PulseShape:
    """The identically-zero drive (no photon); width is undefined."""

    def func(t):
        return np.zeros(np.shape(t), dtype=complex)

    return PulseShape(kind="zero", T=T, t0=t0, support=(t0, t0), _func=func)


def make_tabulated(times: Sequence[float], values: Sequence[complex]) -> PulseShape:
    """Pulse from samples, linearly interpolated and renormalized to unit norm.

    The effective width is the inverse-participation measure
    (integral |Phi|^2)^2 / integral |Phi|^4, which equals T for a
    rectangular pulse.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=complex)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("tabulated pulse needs at least two samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample times must be strictly increasing")
    if v.shape != t.shape:
        raise ValueError("times and values must have equal length")

    norm2 = _piecewise_linear_norms(t, v, power=2)
    if norm2 <= 0.0:
        raise ValueError("tabulated pulse has zero norm")
    v = v / math.sqrt(norm2)

    norm4 = _piecewise_linear_norms(t, v, power=4)
    width = 1.0 / norm4  # (int |f|^2)^2 = 1 after renormalization
    center = float(
        np.trapezoid(np.abs(v) ** 2 * t, t)
    )  # |f|^2-weighted mean time, trapezoid is adequate for a reference time

    real_i = np.interp
    tt, vv = t, v

    def func(x):
        xr = np.asarray(x, dtype=float)
        return real_i(xr, tt, vv.real) + 1j * real_i(xr, tt, vv.imag)

    return PulseShape(
        kind="tabulated",
        T=width,
        t0=center,
        support=(float(t[0]), float(t[-1])),
        _func=func,
        breakpoints=tuple(float(x) for x in t[1:-1]),
    )


def read_pulse_csv(path) -> PulseShape:
    """Load a tabulated pulse from CSV columns (t, re[, im]); header required."""
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise ValueError(f"{path}: empty pulse file")
    header = rows[0]
    try:
        float(header[0])
    except (ValueError, IndexError):
        pass
    else:
        raise ValueError(f"{path}: header row required (got numeric first row)")
    if len(header) not in (2, 3):
        raise ValueError(f"{path}: expected 2 or 3 columns, got {len(header)}")
    times, values = [], []
    for row in rows[1:]:
        if not row:
            continue
        times.append(float(row[0]))
        re = float(row[1])
        im = float(row[2]) if len(row) > 2 else 0.0
        values.append(complex(re, im))
    return make_tabulated(times, values)


def effective_width(pulse: PulseShape) -> float:
    """Return the pulse's effective width T."""
    if pulse.kind == "zero":
        raise ValueError("zero pulse has no defined effective width")
    return pulse.T


def frequency_shifted(pulse: PulseShape, delta_omega: float) -> PulseShape:
    """Shift the pulse's carrier by +delta_omega.

    The baseband envelope picks up a phase e^{-i delta_omega t}; norm,
    support and width are unchanged.
    """
    base = pulse._func

    def func(t):
        return base(t) * np.exp(-1j * delta_omega * np.asarray(t, dtype=float))

    return PulseShape(
        kind=pulse.kind + "+carrier",
        T=pulse.T,
        t0=pulse.t0,
        support=pulse.support,
        _func=func,
        breakpoints=pulse.breakpoints,
    )


def _check_width(T: float) -> None:
    if not (isinstance(T, (int, float)) and math.isfinite(T) and T > 0):
        raise ValueError(f"pulse width must be positive and finite, got {T!r}")


def _piecewise_linear_norms(t: np.ndarray, v: np.ndarray, power: int) -> float:
    """Integral of |f|^power for piecewise-linear f (3-pt Gauss per segment)."""
    # 3-point Gauss-Legendre is exact up to degree 5, enough for |f|^4
    nodes = np.array([-math.sqrt(3.0 / 5.0), 0.0, math.sqrt(3.0 / 5.0)])
    weights = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
    a, b = t[:-1], t[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    total = 0.0
    for x, w in zip(nodes, weights):
        pts = mid + x * half
        frac = (pts - a) / (b - a)
        vals = v[:-1] * (1.0 - frac) + v[1:] * frac
        total += w * float(np.sum(half * np.abs(vals) ** power))
    return total
