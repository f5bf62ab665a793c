"""Post-preparation magnon damping and cat lifetime extraction.

The single-mode loss channel (zero-temperature master equation at rate
gamma with free rotation at omega_m) acts exactly on the characteristic
function: arguments contract by e^{-gamma t} and rotate by omega_m t, and
the function picks up the vacuum-replacement factor
exp(-(1 - e^{-2 gamma t}) |lambda|^2 / 2).  This is closed on the
PolyGaussian family, so the evolution is exact; the finite-difference
Fokker-Planck integrator below serves as its numerical oracle.

Rates follow the nu-convention of :mod:`magnoncat.dynamics`:
gamma_mhz = gamma/2pi in MHz, omega in GHz; times in microseconds.  All
scalar figures of merit are rotation invariant, so lifetimes are scanned
in the frame rotating at omega_m (omega = 0) by default.
"""

from __future__ import annotations

import math

import numpy as np

from . import phasespace as ps
from .errors import HorizonError, StabilityError

TWO_PI = 2.0 * math.pi


def damp_channel(state, gamma_mhz: float, t_us: float, omega_ghz: float = 0.0):
    """Exact loss-channel evolution of a 1-mode state for time t_us.

    Accepts characteristic- or Wigner-domain states (or mixtures) and
    returns the evolved state in the same domain.
    """
    if t_us < 0:
        raise ValueError("time must be non-negative")
    if t_us == 0.0:
        return state
    was_wigner = ps.as_mixture(state).domain == ps.WIGNER
    work = ps.wigner_to_char(state) if was_wigner else state

    gamma = TWO_PI * gamma_mhz            # rad/us
    omega_t = TWO_PI * 1e3 * omega_ghz * t_us
    decay = math.exp(-gamma * t_us)

    def evolve(term: ps.PolyGaussian) -> ps.PolyGaussian:
        out = term
        if omega_t != 0.0:
            out = out.rotate_mode(0, -omega_t)
        if decay != 1.0:
            out = out.scale_arguments([decay, decay])
            out = out.multiply_gaussian((1.0 - decay * decay) * np.eye(2))
        return out

    evolved = ps.map_state(work, evolve)
    return ps.char_to_wigner(evolved) if was_wigner else evolved


def fp_evolve_grid(grid: ps.WignerGrid, gamma_mhz: float, dt_us: float,
                   n_steps: int, omega_ghz: float = 0.0) -> ps.WignerGrid:
    """Finite-difference Fokker-Planck oracle for :func:`damp_channel`.

    Explicit RK4 time stepping of
    dW/dt = gamma [d_X(X W) + d_Y(Y W)] + (gamma/2) Lap W
            + omega (X d_Y - Y d_X) W
    with central differences.  Raises on CFL-violating growth.
    """
    gamma = TWO_PI * gamma_mhz
    omega = TWO_PI * 1e3 * omega_ghz
    x = grid.axis_x
    y = grid.axis_y
    hx = x[1] - x[0]
    hy = y[1] - y[0]
    X, Y = np.meshgrid(x, y)
    W = grid.values.copy()
    bound = 10.0 * max(np.max(np.abs(W)), 1e-300)

    def ddx(F):
        out = np.zeros_like(F)
        out[:, 1:-1] = (F[:, 2:] - F[:, :-2]) / (2 * hx)
        return out

    def ddy(F):
        out = np.zeros_like(F)
        out[1:-1, :] = (F[2:, :] - F[:-2, :]) / (2 * hy)
        return out

    def lap(F):
        out = np.zeros_like(F)
        out[:, 1:-1] += (F[:, 2:] - 2 * F[:, 1:-1] + F[:, :-2]) / hx**2
        out[1:-1, :] += (F[2:, :] - 2 * F[1:-1, :] + F[:-2, :]) / hy**2
        return out

    def rhs(F):
        drift = gamma * (ddx(X * F) + ddy(Y * F))
        diff = 0.5 * gamma * lap(F)
        rot = omega * (X * ddy(F) - Y * ddx(F))
        return drift + diff + rot

    for _ in range(n_steps):
        k1 = rhs(W)
        k2 = rhs(W + 0.5 * dt_us * k1)
        k3 = rhs(W + 0.5 * dt_us * k2)
        k4 = rhs(W + dt_us * k3)
        W = W + dt_us / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(W)) or np.max(np.abs(W)) > bound:
            raise StabilityError("Fokker-Planck step size is unstable for this grid")
    return ps.WignerGrid(grid.axis_x, grid.axis_y, W, grid.cell_area, grid.trace_weight)


def metrics_at(state, gamma_mhz: float, t_us: float, axes=None) -> tuple[float, float]:
    """(delta, I) of the damped state at time t, evaluated in the rotating frame."""
    from .catmetrics import _values_and_laplacian

    evolved = damp_channel(state, gamma_mhz, t_us)
    if axes is None:
        axes = ps.default_axes()
    W, lap = _values_and_laplacian(evolved, axes)
    cell = float((axes[0][1] - axes[0][0]) * (axes[1][1] - axes[1][0]))
    delta = float(np.sum(np.abs(W) - W) * cell)
    macro = float(np.pi * np.sum(W * (-0.5 * lap - W)) * cell)
    return delta, macro


def lifetime(state, gamma_mhz: float, threshold_delta: float = 1e-3,
             threshold_macro: float = 1e-3, t_max_us: float = 10.0,
             coarse_step_us: float = 0.1, refine_us: float = 0.01,
             axes=None) -> dict:
    """First times at which delta and I fall below their thresholds.

    Scans coarsely, then bisects each crossing to ``refine_us``.  The state
    must start above both thresholds; a missing crossing within
    ``t_max_us`` raises :class:`HorizonError`.
    """
    if gamma_mhz <= 0:
        raise HorizonError("no damping, metrics never decay")
    d0, i0 = metrics_at(state, gamma_mhz, 0.0, axes)
    if d0 <= threshold_delta or i0 <= threshold_macro:
        raise ValueError("state starts below the lifetime thresholds")

    crossings = {"delta": None, "macro": None}
    thresholds = {"delta": threshold_delta, "macro": threshold_macro}
    prev_t, prev = 0.0, {"delta": d0, "macro": i0}
    t = coarse_step_us
    while t <= t_max_us + 1e-12 and (crossings["delta"] is None or crossings["macro"] is None):
        d, i = metrics_at(state, gamma_mhz, t, axes)
        now = {"delta": d, "macro": i}
        for key in ("delta", "macro"):
            if crossings[key] is None and now[key] < thresholds[key]:
                lo, hi = prev_t, t
                while hi - lo > refine_us:
                    mid = 0.5 * (lo + hi)
                    dm, im = metrics_at(state, gamma_mhz, mid, axes)
                    val = dm if key == "delta" else im
                    if val < thresholds[key]:
                        hi = mid
                    else:
                        lo = mid
                crossings[key] = 0.5 * (lo + hi)
        prev_t, prev = t, now
        t += coarse_step_us
    if crossings["delta"] is None or crossings["macro"] is None:
        raise HorizonError(f"threshold not crossed within {t_max_us} us")
    return {"t_delta_us": crossings["delta"], "t_macro_us": crossings["macro"]}
