"""Shared numerical engines: complex linear ODE integration and quadrature.

The ODE path is the brute-force reference for every model in the
package; the quadrature routines evaluate the convolution kernels of the
closed-form solutions.  Both wrap scipy (Dormand-Prince RK45 and
QUADPACK Gauss-Kronrod) behind small, deterministic interfaces with
explicit failure signalling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp

__all__ = [
    "OdeSystem",
    "QuadratureSpec",
    "OdeFailure",
    "QuadratureFailure",
    "integrate",
    "quad1",
    "quad2",
]

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10


class OdeFailure(RuntimeError):
    """Integration could not proceed (e.g. step-size underflow)."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} (t = {t_fail:.6g})")
        self.t_fail = t_fail


class QuadratureFailure(RuntimeError):
    """Adaptive quadrature did not converge within the subdivision limit."""


@dataclass(frozen=True)
class OdeSystem:
    """A linear-inhomogeneous complex ODE dy/dt = rhs(t, y).

    ``rhs`` must be linear in the state plus an additive drive; that is
    all this package ever integrates, and it is what makes superposition
    tests meaningful.
    """

    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    y0: np.ndarray
    t_span: tuple[float, float]

    def __post_init__(self):
        y0 = np.asarray(self.y0, dtype=complex)
        if y0.shape != (self.dimension,):
            raise ValueError(
                f"initial state has shape {y0.shape}, expected ({self.dimension},)"
            )
        object.__setattr__(self, "y0", y0)


@dataclass(frozen=True)
class QuadratureSpec:
    rtol: float = 1e-8
    atol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("quadrature tolerances must be positive")


DEFAULT_QUAD = QuadratureSpec()


def integrate(
    system: OdeSystem,
    grid: Sequence[float],
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    max_step: float = np.inf,
    breakpoints: Sequence[float] = (),
    dense_output: bool = False,
):
    """Integrate ``system`` and return the state at the requested times.

    Parameters
    ----------
    grid : array_like
        Strictly increasing output times inside the system's span.
    max_step : float
        Upper bound on the internal step; keep it below the drive's
        width so a pulse cannot be stepped over from a quiescent state.
    breakpoints : sequence of float
        Times where the right-hand side is discontinuous; integration is
        split there instead of stepping across.
    dense_output : bool
        Also return a callable interpolant t -> state vector.

    Returns
    -------
    states : ndarray, shape (len(grid), dimension)
        complex state at each grid time (and the interpolant if asked).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("output grid must be a nonempty 1-D array")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("output grid must be strictly increasing")
    t0, t1 = system.t_span
    if grid[0] < t0 - 1e-12 or grid[-1] > t1 + 1e-12:
        raise ValueError("output grid extends beyond the system time span")

    cuts = [t0]
    for b in sorted(set(float(b) for b in breakpoints)):
        if t0 < b < t1:
            cuts.append(b)
    cuts.append(t1)

    states = np.empty((grid.size, system.dimension), dtype=complex)
    filled = 0
    y = system.y0
    interps = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        # grid points in (a, b], plus the very first point if it sits at t0
        n_here = int(np.count_nonzero((grid > a) & (grid <= b)))
        if filled == 0 and grid.size and grid[0] <= a:
            n_here += 1
        t_eval = grid[filled : filled + n_here]
        sol = solve_ivp(
            system.rhs,
            (a, b),
            y,
            method="RK45",
            t_eval=t_eval if t_eval.size else None,
            rtol=rtol,
            atol=atol,
            max_step=max_step,
            dense_output=True,
        )
        if not sol.success:
            if sol.sol is not None:
                t_fail = float(sol.sol.t_max)
            else:
                t_fail = float(sol.t[-1]) if len(sol.t) else a
            raise OdeFailure(sol.message, t_fail)
        if t_eval.size:
            states[filled : filled + t_eval.size] = sol.y.T
            filled += t_eval.size
        y = np.asarray(sol.sol(b), dtype=complex)
        if dense_output:
            interps.append((a, b, sol.sol))
    if filled != grid.size:  # pragma: no cover - guarded by the span check
        raise OdeFailure("output grid not fully covered", float(grid[filled]))
    if dense_output:
        return states, _PiecewiseInterpolant(interps)
    return states


class _PiecewiseInterpolant:
    """Dense output stitched across breakpoint segments."""

    def __init__(self, pieces):
        self._pieces = pieces

    def __call__(self, t: float) -> np.ndarray:
        for a, b, sol in self._pieces:
            if a - 1e-12 <= t <= b + 1e-12:
                return sol(min(max(t, a), b))
        raise ValueError(f"time {t} outside the integrated span")


def quad1(
    f: Callable[[float], complex],
    interval: tuple[float, float],
    spec: QuadratureSpec = DEFAULT_QUAD,
    breakpoints: Sequence[float] = (),
) -> complex:
    """Adaptive Gauss-Kronrod integral of a complex integrand on [a, b]."""
    a, b = float(interval[0]), float(interval[1])
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("quad1 requires a finite interval")
    if a == b:
        return 0.0 + 0.0j
    pts = sorted(p for p in set(float(p) for p in breakpoints) if a < p < b)
    re = _quad_real(lambda t: f(t).real, a, b, spec, pts)
    im = _quad_real(lambda t: f(t).imag, a, b, spec, pts)
    return complex(re, im)


def quad2(
    f: Callable[[float, float], complex],
    rectangle: tuple[float, float, float, float],
    spec: QuadratureSpec = DEFAULT_QUAD,
    breakpoints_x: Sequence[float] = (),
    breakpoints_y: Sequence[float] = (),
) -> complex:
    """Iterated adaptive integral of f(x, y) over [x0, x1] x [y0, y1]."""
    x0, x1, y0, y1 = (float(v) for v in rectangle)
    if not all(np.isfinite(v) for v in (x0, x1, y0, y1)):
        raise ValueError("quad2 requires a finite rectangle")
    # the inner integral is smooth in y away from the listed breakpoints,
    # so a mildly tighter inner tolerance keeps the outer estimate honest
    inner_spec = QuadratureSpec(
        rtol=spec.rtol * 0.1, atol=spec.atol * 0.1, max_subdivisions=spec.max_subdivisions
    )

    def inner(y: float) -> complex:
        return quad1(lambda x: f(x, y), (x0, x1), inner_spec, breakpoints_x)

    return quad1(inner, (y0, y1), spec, breakpoints_y)


def _quad_real(g, a, b, spec, points):
    out = quad(
        g,
        a,
        b,
        epsabs=spec.atol,
        epsrel=spec.rtol,
        limit=spec.max_subdivisions,
        points=points if points else None,
        full_output=1,
    )
    if len(out) > 3:
        raise QuadratureFailure(f"quadrature on [{a:.6g}, {b:.6g}]: {out[3]}")
    return out[0]
