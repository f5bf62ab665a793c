"""Figures of merit for the prepared magnon state.

All metrics evaluate on a shared quadrature grid (default [-6, 6]^2 with
257 points per axis) under the package convention
Tr(rho sigma) = 2 pi * integral(W_rho W_sigma dX dY).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from . import phasespace as ps
from .errors import DegenerateCatError, NormalizationError

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class CatReport:
    alpha_sq: float
    fidelity: float
    negativity: float
    macroscopicity: float
    parity_sign: int
    peak_overlap: float
    herald_weight: float

    def to_json(self, **extra) -> str:
        doc = asdict(self)
        doc.update(extra)
        return json.dumps(doc, indent=2, sort_keys=True)


def ideal_cat_wigner(alpha: float, parity: str):
    """Closed-form Wigner density of N(|alpha> +/- |-alpha>), alpha real > 0.

    Returns a callable W(X, Y) normalized to integral(W dX dY) = 1: two
    coherent peaks at X = +/- sqrt(2) alpha and the interference fringe
    cos(2 sqrt(2) alpha Y) at the origin.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    sgn = {"even": 1.0, "odd": -1.0}[parity]
    s2a = math.sqrt(2.0) * alpha
    norm2 = 1.0 / (2.0 * (1.0 + sgn * math.exp(-2.0 * alpha * alpha)))

    def w(X, Y):
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        peaks = np.exp(-(X - s2a) ** 2 - Y**2) + np.exp(-(X + s2a) ** 2 - Y**2)
        fringe = 2.0 * np.exp(-X**2 - Y**2) * np.cos(2.0 * s2a * Y)
        return norm2 / np.pi * (peaks + sgn * fringe)

    return w


def ideal_cat_state(alpha: float, parity: str) -> ps.PolyGaussianMixture:
    """The same ideal cat as a Wigner-domain PolyGaussian mixture.

    The interference fringe is carried by a conjugate pair of Gaussians with
    imaginary Y-means; their combined value is real on the real plane.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    sgn = {"even": 1.0, "odd": -1.0}[parity]
    s2a = math.sqrt(2.0) * alpha
    norm2 = 1.0 / (2.0 * (1.0 + sgn * math.exp(-2.0 * alpha * alpha)))
    Q = 2.0 * np.eye(2)
    base = norm2 / np.pi
    terms = [
        (1.0, ps.PolyGaussian(ps.WIGNER, Q, scale=base, mu=[s2a, 0.0])),
        (1.0, ps.PolyGaussian(ps.WIGNER, Q, scale=base, mu=[-s2a, 0.0])),
        (1.0, ps.PolyGaussian(ps.WIGNER, Q, scale=sgn * base * math.exp(-2 * alpha * alpha),
                              mu=[0.0, 1j * s2a])),
        (1.0, ps.PolyGaussian(ps.WIGNER, Q, scale=sgn * base * math.exp(-2 * alpha * alpha),
                              mu=[0.0, -1j * s2a])),
    ]
    return ps.PolyGaussianMixture(terms)


def _as_grid(state, axes) -> ps.WignerGrid:
    if isinstance(state, ps.WignerGrid):
        return state
    return ps.eval_grid(state, axes)


def _check_normalized(grid: ps.WignerGrid):
    total = grid.integral()
    if abs(total - 1.0) > 1e-3:
        raise NormalizationError(f"state integral {total:.6f} is not 1")


def fidelity(state, alpha: float, parity: str, axes=None) -> float:
    """Overlap <psi_cat| rho |psi_cat> via 2 pi * int(W W_cat)."""
    grid = _as_grid(state, axes)
    _check_normalized(grid)
    X, Y = np.meshgrid(grid.axis_x, grid.axis_y)
    w_cat = ideal_cat_wigner(alpha, parity)(X, Y)
    return float(2.0 * np.pi * np.sum(grid.values * w_cat) * grid.cell_area)


def estimate_cat_size(state, parity: str, axes=None,
                      alpha_range=(0.05, 3.0)) -> tuple[float, float, float]:
    """Cat size as the fidelity-maximizing |alpha|^2.

    Golden-section search over alpha (tolerance 1e-4), seeded by a coarse
    scan.  Returns (alpha_sq, best fidelity, peak-position cross-estimate
    X_peak^2 / 2 from the Wigner maximum away from the origin).
    """
    grid = _as_grid(state, axes)
    _check_normalized(grid)
    X, Y = np.meshgrid(grid.axis_x, grid.axis_y)
    two_pi_cell = 2.0 * np.pi * grid.cell_area

    def fid(alpha):
        return float(np.sum(grid.values * ideal_cat_wigner(alpha, parity)(X, Y)) * two_pi_cell)

    scan = np.linspace(alpha_range[0], alpha_range[1], 160)
    vals = [fid(al) for al in scan]
    k = int(np.argmax(vals))
    if k == 0 or k == len(scan) - 1:
        raise DegenerateCatError("fidelity has no interior maximum in the alpha range")
    a, b = scan[k - 1], scan[k + 1]
    while b - a > 1e-4:
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        if fid(c) > fid(d):
            b = d
        else:
            a = c
    alpha_hat = 0.5 * (a + b)

    # cross-check: radial position of the Wigner maximum (peaks at sqrt(2) alpha)
    R2 = X**2 + Y**2
    masked = np.where(R2 > 0.5, grid.values, -np.inf)
    iy, ix = np.unravel_index(np.argmax(masked), masked.shape)
    peak_alpha_sq = float(R2[iy, ix] / 2.0)
    return alpha_hat**2, fid(alpha_hat), peak_alpha_sq


def wigner_negativity(grid: ps.WignerGrid) -> float:
    """delta = integral(|W| - W); zero exactly for Gaussian states."""
    _check_normalized(grid)
    return float(np.sum(np.abs(grid.values) - grid.values) * grid.cell_area)


def _values_and_laplacian(state, axes):
    """(W, Lap W) on the grid, with the Laplacian taken symbolically.

    Each mixture term contributes its value and second-derivative
    polynomials against one shared exponential evaluation.
    """
    mix = ps.as_mixture(state)
    axis_x, axis_y = axes
    X, Y = np.meshgrid(axis_x, axis_y)
    vals = np.zeros(X.shape, dtype=complex)
    lap = np.zeros(X.shape, dtype=complex)
    for w, t in mix.terms:
        lap_poly = t.derivative(0).derivative(0).poly + t.derivative(1).derivative(1).poly
        v, lp = ps.eval_term_polys(t, [t.poly, lap_poly], X, Y)
        vals += w * v
        lap += w * lp
    return vals.real, lap.real


def laplacian_grid(state, axes=None) -> np.ndarray:
    """Analytic (d^2/dX^2 + d^2/dY^2) W sampled on the grid axes."""
    if axes is None:
        axes = ps.default_axes()
    return _values_and_laplacian(state, axes)[1]


def macroscopicity(state, axes=None) -> float:
    """Quantum-superposition measure I via exact phase-space derivatives.

    Equals pi * integral(W (-1/2 Lap - 1) W dX dY); the Laplacian is taken
    symbolically on the PolyGaussian terms, the final integral on the grid.
    Anchors: coherent states give 0, the one-photon Fock state gives 1.
    """
    if axes is None:
        axes = ps.default_axes()
    W, lap = _values_and_laplacian(state, axes)
    cell = float((axes[0][1] - axes[0][0]) * (axes[1][1] - axes[1][0]))
    total = np.sum(W) * cell
    if abs(total - 1.0) > 1e-3:
        raise NormalizationError(f"state integral {total:.6f} is not 1")
    integrand = W * (-0.5 * lap - W)
    return float(np.pi * np.sum(integrand) * cell)


def macroscopicity_fd(grid: ps.WignerGrid) -> float:
    """Finite-difference cross-check of :func:`macroscopicity`."""
    W = grid.values
    hx = grid.axis_x[1] - grid.axis_x[0]
    hy = grid.axis_y[1] - grid.axis_y[0]
    lap = np.zeros_like(W)
    lap[1:-1, :] += (W[2:, :] - 2 * W[1:-1, :] + W[:-2, :]) / hy**2
    lap[:, 1:-1] += (W[:, 2:] - 2 * W[:, 1:-1] + W[:, :-2]) / hx**2
    integrand = W * (-0.5 * lap - W)
    return float(np.pi * np.sum(integrand) * grid.cell_area)


def parity_sign(state) -> int:
    """Sign of the Wigner function at the phase-space origin."""
    value = ps.as_mixture(state).value(np.zeros(2)).real
    return 1 if value >= 0 else -1


def cat_report(state, parity: str, axes=None, herald_weight: float = 1.0) -> CatReport:
    """Bundle all figures of merit computed on one shared grid."""
    if axes is None:
        axes = ps.default_axes()
    grid = _as_grid(state, axes)
    alpha_sq, best_f, _peak = estimate_cat_size(grid, parity)
    return CatReport(
        alpha_sq=alpha_sq,
        fidelity=best_f,
        negativity=wigner_negativity(grid),
        macroscopicity=macroscopicity(state, axes),
        parity_sign=parity_sign(state),
        peak_overlap=math.exp(-2.0 * alpha_sq),
        herald_weight=herald_weight,
    )
