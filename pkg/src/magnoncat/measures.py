"""Gaussian entanglement and steering measures on 4x4 covariance matrices.

Quadrature ordering is u = (X_C, Y_C, X_M, Y_M) with vacuum variance 1/2.
All logarithms are natural.
"""

from __future__ import annotations

import numpy as np

from .errors import ConditioningError, DimensionError

# Benign negative radicands from float noise near the separability boundary
# are clamped; anything larger is a genuine conditioning failure.
_RADICAND_TOL = -1e-12


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal standard symplectic form for (X, Y) pairs."""
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    Omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        Omega[2 * k: 2 * k + 2, 2 * k: 2 * k + 2] = J
    return Omega


def physicality_check(V, tol: float = 1e-10) -> bool:
    """True iff V + (i/2) Omega >= 0 (uncertainty principle)."""
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
        raise DimensionError(f"covariance must be 2n x 2n, got {V.shape}")
    if np.max(np.abs(V - V.T)) > 1e-9 * max(1.0, np.max(np.abs(V))):
        raise DimensionError("covariance must be symmetric")
    Omega = symplectic_form(V.shape[0] // 2)
    eigs = np.linalg.eigvalsh(V + 0.5j * Omega)
    return bool(np.min(eigs) >= -tol)


def _blocks(V):
    V = np.asarray(V, dtype=float)
    if V.shape != (4, 4):
        raise DimensionError("two-mode measures need a 4x4 covariance")
    return V[:2, :2], V[2:, 2:], V[:2, 2:]


def log_negativity(V) -> float:
    """Logarithmic negativity E_N = max(0, -ln 2 eta^-) of a two-mode Gaussian."""
    A, B, C = _blocks(V)
    sigma = np.linalg.det(A) + np.linalg.det(B) - 2.0 * np.linalg.det(C)
    detV = np.linalg.det(np.asarray(V, dtype=float))
    rad = sigma * sigma - 4.0 * detV
    if rad < _RADICAND_TOL:
        raise ConditioningError(f"negative radicand {rad} in eta^-")
    inner = sigma - np.sqrt(max(rad, 0.0))
    if inner < _RADICAND_TOL:
        raise ConditioningError(f"negative radicand {inner} in eta^-")
    eta_minus = np.sqrt(max(inner, 0.0)) / np.sqrt(2.0)
    return max(0.0, -np.log(2.0 * eta_minus))


def renyi2_entropy(V_block) -> float:
    """Renyi-2 entropy S(V) = 1/2 ln det V of a (doubled) covariance block."""
    det = np.linalg.det(np.asarray(V_block, dtype=float))
    if det <= 0:
        raise ConditioningError(f"non-positive determinant {det} in Renyi-2 entropy")
    return 0.5 * np.log(det)


def steering(V, direction: str = "M->C") -> float:
    """Gaussian EPR steering via Renyi-2 entropies.

    ``M->C`` quantifies how well measurements on the magnon steer the optical
    mode: max(0, S(2 V_M) - S(2 V)), and symmetrically for ``C->M``.
    """
    V = np.asarray(V, dtype=float)
    A, B, _ = _blocks(V)
    steered_by = {"M->C": B, "C->M": A}
    try:
        block = steered_by[direction]
    except KeyError:
        raise ValueError(f"direction must be 'M->C' or 'C->M', got {direction!r}") from None
    return max(0.0, renyi2_entropy(2.0 * block) - renyi2_entropy(2.0 * V))
