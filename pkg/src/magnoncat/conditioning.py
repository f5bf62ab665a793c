"""Remote cat-state preparation: photon operations, homodyne projection,
dark-count mixtures, and the end-to-end pipeline.

The optical mode C occupies symbols (0, 1) and the magnon mode M symbols
(2, 3) of the joint state.  Photon operations act in the characteristic
domain, the projective measurement in the Wigner domain; the single domain
switch happens between them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import phasespace as ps
from .dynamics import SystemParams, output_covariance
from .errors import DegenerateHeraldError, DomainError, ZeroProbabilityOutcomeError

MODE_C = 0
MODE_M = 1


@dataclass(frozen=True)
class Imperfections:
    """Experimental imperfections of the conditioning chain.

    epsilon: homodyne acceptance half-width |X_C| <= epsilon (0 = exact);
    xi: success probability of each single-photon operation (dark counts);
    theta: homodyne angle, projecting X_C cos(theta) + Y_C sin(theta) = 0;
    window_points: Gauss-Legendre nodes across the acceptance window;
    dark_count_model: 'per_click' treats every heralding click independently,
    'all_or_nothing' fails the whole operation chain at once.
    """

    epsilon: float = 0.0
    xi: float = 1.0
    theta: float = 0.0
    window_points: int = 21
    dark_count_model: str = "per_click"

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if not 0.0 < self.xi <= 1.0:
            raise ValueError("xi must lie in (0, 1]")
        if self.epsilon > 0 and (self.window_points < 3 or self.window_points % 2 == 0):
            raise ValueError("window quadrature needs an odd node count >= 3")
        if self.dark_count_model not in ("per_click", "all_or_nothing"):
            raise ValueError(f"unknown dark-count model {self.dark_count_model!r}")


IDEAL = Imperfections()


def _project_slice(state, x_outcome: float):
    """Slice X_C = x_outcome and trace out Y_C; unnormalized magnon state."""
    return ps.map_state(state, lambda t: t.substitute(0, x_outcome).integrate_out([0]))


def homodyne_project_exact(state, theta: float = 0.0, outcome: float = 0.0):
    """Project the optical mode onto X_theta = outcome (exact measurement).

    Returns the unnormalized 1-mode magnon state and the outcome density
    (the projection weight); renormalization is the caller's choice.
    """
    mix = ps.as_mixture(state)
    if mix.domain != ps.WIGNER:
        raise DomainError("homodyne projection acts on the Wigner function")
    if mix.n_symbols != 4:
        raise DomainError("projection expects the joint 2-mode state")
    if theta != 0.0:
        state = ps.rotate_mode(state, MODE_C, -theta)
    projected = _project_slice(state, outcome)
    weight = ps.as_mixture(projected).trace().real
    if weight <= 1e-14:
        raise ZeroProbabilityOutcomeError(f"outcome density {weight:.3e} at X_theta = {outcome}")
    return projected, weight


def homodyne_project_window(state, theta: float = 0.0, epsilon: float = 0.1,
                            n_points: int = 21):
    """Project onto the windowed outcome |X_theta| <= epsilon.

    The unrecorded outcomes across the window are averaged: the result is
    the Gauss-Legendre mixture of exact projections, with total weight
    P(|X_theta| <= epsilon).
    """
    if epsilon <= 0:
        raise ValueError("window projection needs epsilon > 0")
    mix = ps.as_mixture(state)
    if mix.domain != ps.WIGNER:
        raise DomainError("homodyne projection acts on the Wigner function")
    if theta != 0.0:
        state = ps.rotate_mode(state, MODE_C, -theta)
    nodes, gl_weights = leggauss(n_points)
    terms = []
    for xk, wk in zip(nodes, gl_weights):
        slice_k = ps.as_mixture(_project_slice(state, epsilon * xk))
        for w, t in slice_k.terms:
            terms.append((w * wk * epsilon, t))
    mixture = ps.PolyGaussianMixture(terms)
    weight = mixture.trace().real
    if weight <= 1e-14:
        raise ZeroProbabilityOutcomeError("window outcome has vanishing probability")
    return mixture, weight


def dark_count_mixture(branch_states, xi: float):
    """Combine heralded branches with per-click success probability xi.

    ``branch_states`` maps a tuple of per-click success flags to the
    (unnormalized) state produced by applying exactly the successful
    operations.  Branch weights are the click-pattern probability times the
    branch's heralding weight; the result is a normalized mixture.
    """
    weighted = []
    for pattern, state in branch_states.items():
        p = 1.0
        for ok in pattern:
            p *= xi if ok else (1.0 - xi)
        if p == 0.0:
            continue
        herald = ps.as_mixture(state).trace().real
        if herald <= 0.0:
            continue
        normalized = ps.map_state(state, lambda t: t.scaled(1.0 / herald))
        for w, t in ps.as_mixture(normalized).terms:
            weighted.append((p * herald * w, t))
    total = sum(w for w, _ in weighted)
    mixture = ps.PolyGaussianMixture([(w / total, t) for w, t in weighted])
    return mixture, total


def _click_sequence(parity: str) -> list[str]:
    if parity == "odd":
        return ["subtract"]
    if parity == "even":
        return ["subtract", "add"]
    raise ValueError(f"parity must be 'odd' or 'even', got {parity!r}")


@dataclass
class PreparedCat:
    """Output of the preparation pipeline."""

    state: ps.PolyGaussianMixture            # normalized 1-mode Wigner mixture
    parity: str
    herald_weight: float                     # mean heralding trace over branches
    projection_weight: float                 # homodyne outcome weight
    covariance: np.ndarray                   # joint Gaussian covariance used

    @property
    def total_weight(self) -> float:
        return self.herald_weight * self.projection_weight


def prepare_cat(params: SystemParams, parity: str = "odd",
                imperfections: Imperfections = IDEAL) -> PreparedCat:
    """Run the full remote-preparation pipeline.

    Pulse covariance -> Gaussian characteristic function -> photon
    subtraction (odd) or subtraction followed by addition (even) on the
    optical mode, with dark-count branches -> Wigner domain -> homodyne
    projection (exact or windowed) -> normalized magnon state.
    """
    imp = imperfections
    V = output_covariance(params)
    gauss = ps.gaussian_char_from_cov(V)
    clicks = _click_sequence(parity)

    def run_ops(pattern):
        st = gauss
        for op, ok in zip(clicks, pattern):
            if ok:
                st = st.photon_op(MODE_C, op)
        return st

    all_true = tuple([True] * len(clicks))
    ideal = run_ops(all_true)
    if ideal.trace().real <= 1e-12:
        raise DegenerateHeraldError("heralding weight vanishes (subtraction from vacuum?)")

    if imp.xi >= 1.0:
        branches = {all_true: ideal}
    elif imp.dark_count_model == "all_or_nothing":
        branches = {(True,): ideal, (False,): run_ops(tuple([False] * len(clicks)))}
    else:
        branches = {all_true: ideal}
        for pattern in itertools.product([True, False], repeat=len(clicks)):
            if pattern != all_true:
                branches[pattern] = run_ops(pattern)

    mixed, herald_weight = dark_count_mixture(branches, imp.xi)
    wigner = ps.char_to_wigner(mixed)

    if imp.epsilon == 0.0:
        projected, proj_weight = homodyne_project_exact(wigner, theta=imp.theta)
    else:
        projected, proj_weight = homodyne_project_window(
            wigner, theta=imp.theta, epsilon=imp.epsilon, n_points=imp.window_points)

    magnon = ps.as_mixture(projected)
    if imp.theta != 0.0:
        # the conditional state co-rotates with the measurement direction;
        # undo it so the cat lies along X_M for any theta
        magnon = ps.rotate_mode(magnon, 0, imp.theta)
    magnon = magnon.normalized()
    return PreparedCat(state=magnon, parity=parity, herald_weight=herald_weight,
                       projection_weight=proj_weight, covariance=V)
