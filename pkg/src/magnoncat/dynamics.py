"""Pulsed optomagnonic dynamics: output covariance matrix and oracles.

User-facing rates follow the nu = (angular rate)/2pi convention, in MHz
(magnon frequency in GHz); internal computation is in rad/us.  A blue
detuned drive pulse of duration tau produces a two-mode-squeezing
interaction between the magnon mode M and the filtered optical output
temporal mode C, with effective pump rate G = g^2/kappa - gamma and
squeezing parameter r = G tau.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NumericalIntegrationError, PhysicalityError, UnstableRegimeError
from .measures import physicality_check

TWO_PI = 2.0 * math.pi

# h * 1 GHz / k_B in kelvin
_H_OVER_KB_GHZ = 6.62607015e-34 * 1e9 / 1.380649e-23


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the pulsed optomagnonic system.

    Rates are nu-convention: g0_mhz is the single-photon coupling /2pi,
    g_mhz = g0 |beta| the pump-enhanced coupling, kappa_mhz the optical
    decay, gamma_mhz the magnon decay, omega_m_ghz the magnon frequency.
    Exactly one of (tau_us, r) must be supplied; the other is derived.
    n_m and n_c default to the Bose-Einstein occupation at temperature_k
    (the optical occupation is zero at any cryogenic temperature).
    """

    g0_mhz: float = 0.1
    beta_amp: float = 50.0
    g_mhz: float | None = None
    kappa_mhz: float = 100.0
    gamma_mhz: float = 0.1
    omega_m_ghz: float = 10.0
    tau_us: float | None = None
    r: float | None = 0.2
    temperature_k: float = 0.0
    n_m: float | None = None
    n_c: float | None = None
    s_total: float = 1e10

    def __post_init__(self):
        if (self.tau_us is None) == (self.r is None):
            raise ValueError("exactly one of tau_us / r must be supplied")
        g = self.coupling_mhz
        if g <= 0 or self.kappa_mhz <= 0:
            raise ValueError("couplings and kappa must be positive")
        if self.gamma_mhz < 0 or self.temperature_k < 0:
            raise ValueError("gamma and temperature must be non-negative")
        if g * g / self.kappa_mhz - self.gamma_mhz <= 0:
            raise UnstableRegimeError(
                f"G = g^2/kappa - gamma = {g * g / self.kappa_mhz - self.gamma_mhz:.4g} MHz <= 0")
        if self.kappa_mhz < 10.0 * g or self.kappa_mhz < 10.0 * self.gamma_mhz:
            warnings.warn("kappa is not large against g and gamma; the adiabatic "
                          "covariance is a poor approximation here", stacklevel=2)

    @property
    def coupling_mhz(self) -> float:
        return self.g_mhz if self.g_mhz is not None else self.g0_mhz * self.beta_amp

    @property
    def occupation_m(self) -> float:
        if self.n_m is not None:
            return self.n_m
        return thermal_occupation(self.omega_m_ghz, self.temperature_k)

    @property
    def occupation_c(self) -> float:
        # optical frequencies are ~200 THz; thermal photons are absent
        return self.n_c if self.n_c is not None else 0.0


def thermal_occupation(frequency_ghz: float, temperature_k: float) -> float:
    """Bose-Einstein occupation 1/(exp(h nu / k_B T) - 1); zero at T = 0."""
    if temperature_k < 0:
        raise ValueError("temperature must be non-negative")
    if temperature_k == 0.0:
        return 0.0
    x = _H_OVER_KB_GHZ * frequency_ghz / temperature_k
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def derive_rates(params: SystemParams) -> dict:
    """Effective pump rate G (rad/us), squeezing r = G tau, and tau (us)."""
    g = params.coupling_mhz
    G_mhz = g * g / params.kappa_mhz - params.gamma_mhz
    if G_mhz <= 0:
        raise UnstableRegimeError(f"G = {G_mhz:.4g} MHz <= 0")
    G = TWO_PI * G_mhz
    if params.r is not None:
        r = params.r
        tau = r / G
    else:
        tau = params.tau_us
        r = G * tau
    return {"G": G, "G_mhz": G_mhz, "r": r, "tau_us": tau}


def hp_validity(magnon_number: float, s_total: float) -> float:
    """Holstein-Primakoff validity ratio <m^dag m>/(2S); warns above 1e-3."""
    if s_total <= 0:
        raise ValueError("total spin must be positive")
    ratio = magnon_number / (2.0 * s_total)
    if ratio > 1e-3:
        warnings.warn(f"magnon number approaches the total spin (ratio {ratio:.2e}); "
                      "bosonization is questionable", stacklevel=2)
    return ratio


@dataclass(frozen=True)
class TemporalOverlaps:
    """Second moments of the exponentially filtered input temporal modes.

    ``cross`` is the kernel overlap r/sinh(r) between the rising and falling
    filtered copies of the same white noise; self moments are those of a
    normalized mode at the given occupation.
    """

    r: float
    n_c: float
    n_m: float
    cross: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "cross", overlap_kernel(self.r))

    def moment_table(self) -> np.ndarray:
        """10x10 table <e_i e_j> over the operator basis used by the
        covariance assembly (see ``_BASIS``)."""
        E = np.zeros((10, 10))
        for base, n in ((0, self.n_m), (2, self.n_c), (4, self.n_c),
                        (6, self.n_m), (8, self.n_m)):
            E[base, base + 1] = n + 1.0
            E[base + 1, base] = n
        for lo, n in ((2, self.n_c), (6, self.n_m)):
            # rising/falling filtered pair of one white noise
            E[lo, lo + 3] = (n + 1.0) * self.cross
            E[lo + 3, lo] = n * self.cross
            E[lo + 2, lo + 1] = (n + 1.0) * self.cross
            E[lo + 1, lo + 2] = n * self.cross
        return E

    def commutator_table(self) -> np.ndarray:
        E = self.moment_table()
        return E - E.T


# operator basis for the bilinear expansion of the output modes:
_BASIS = ("M_in", "M_in+", "C_in", "C_in+", "Ct_in", "Ct_in+",
          "M_m", "M_m+", "Mt_m", "Mt_m+")
_CONJ = (1, 0, 3, 2, 5, 4, 7, 6, 9, 8)


def overlap_kernel(r: float) -> float:
    """Overlap r/sinh(r) of the two filtered temporal modes; 1 as r -> 0."""
    if abs(r) < 1e-6:
        return 1.0 - r * r / 6.0
    return r / math.sinh(r)


def temporal_overlaps(r: float, n_c: float = 0.0, n_m: float = 0.0) -> TemporalOverlaps:
    if r < 0:
        raise ValueError("r must be non-negative")
    return TemporalOverlaps(r=r, n_c=n_c, n_m=n_m)


def bogoliubov_coefficients(params: SystemParams):
    """Coefficient vectors of (C_out, M_out) over the input-mode basis.

    At the end of the pulse the filtered optical output and the magnon mode
    are linear combinations of the initial magnon mode and the four filtered
    noise modes; the coefficients preserve the bosonic commutators exactly.
    """
    rates = derive_rates(params)
    g = TWO_PI * params.coupling_mhz
    kappa = TWO_PI * params.kappa_mhz
    gamma = TWO_PI * params.gamma_mhz
    G, r = rates["G"], rates["r"]
    er = math.exp(r)
    s_r = math.sqrt((math.exp(2 * r) - 1.0) / (2.0 * G)) if r > 0 else 0.0
    a = g * g / (G * kappa)

    M = np.zeros(10, dtype=complex)
    M[0] = er
    M[3] = 1j * math.sqrt(2.0 * g * g / kappa) * s_r
    M[6] = -math.sqrt(2.0 * gamma) * s_r

    C = np.zeros(10, dtype=complex)
    C[1] = -1j * math.sqrt(2.0 * g * g / kappa) * s_r
    C[4] = a - 1.0
    C[2] = -a * er
    C[7] = 1j * (g / G) * math.sqrt(gamma / kappa) * er
    C[9] = -1j * (g / G) * math.sqrt(gamma / kappa)
    return C, M, rates


def _dagger(vec: np.ndarray) -> np.ndarray:
    out = np.zeros_like(vec)
    for i, j in enumerate(_CONJ):
        out[j] = np.conj(vec[i])
    return out


def commutator_defects(params: SystemParams) -> tuple[float, float]:
    """|[C_out, C_out^dag] - 1| and |[M_out, M_out^dag] - 1|."""
    C, M, rates = bogoliubov_coefficients(params)
    K = temporal_overlaps(rates["r"], params.occupation_c, params.occupation_m).commutator_table()
    cc = C @ K @ _dagger(C)
    mm = M @ K @ _dagger(M)
    return abs(cc - 1.0), abs(mm - 1.0)


def output_covariance(params: SystemParams) -> np.ndarray:
    """4x4 covariance of (X_C, Y_C, X_M, Y_M) after the pulse (vacuum = 1/2).

    Assembled by explicit bilinear expansion over the moment table of the
    non-orthogonal filtered input modes.
    """
    C, M, rates = bogoliubov_coefficients(params)
    E = temporal_overlaps(rates["r"], params.occupation_c, params.occupation_m).moment_table()
    Cd, Md = _dagger(C), _dagger(M)
    s2 = math.sqrt(2.0)
    quads = [(C + Cd) / s2, (C - Cd) / (1j * s2), (M + Md) / s2, (M - Md) / (1j * s2)]
    V = np.empty((4, 4))
    for i in range(4):
        for j in range(i, 4):
            m = quads[i] @ E @ quads[j] + quads[j] @ E @ quads[i]
            V[i, j] = V[j, i] = 0.5 * m.real
    if not physicality_check(V):
        raise PhysicalityError("assembled covariance is unphysical")
    return V


def covariance_oracle_ode(params: SystemParams, n_steps: int = 20000,
                          adiabatic: bool = False) -> np.ndarray:
    """Independent moment-ODE oracle for :func:`output_covariance`.

    Integrates all second moments of the coupled magnon/cavity quadratures
    plus accumulators for the filtered optical output mode with a classical
    fixed-step 4th-order scheme.  By default the full (non-adiabatic)
    Langevin system is used, so agreement with the analytic route is limited
    by the physical adiabatic residual, first order in 1/kappa.  With
    ``adiabatic=True`` the cavity is eliminated and agreement is exact up to
    integrator error.

    The step count is raised automatically if the requested one would make
    the stiff cavity moments (decay rate 2 kappa) unstable under RK4.
    """
    rates = derive_rates(params)
    g = TWO_PI * params.coupling_mhz
    kappa = TWO_PI * params.kappa_mhz
    gamma = TWO_PI * params.gamma_mhz
    G, r, tau = rates["G"], rates["r"], rates["tau_us"]
    if r <= 0:
        return np.eye(4) * 0.5 + np.diag([0, 0, params.occupation_m, params.occupation_m])
    n_m, n_c = params.occupation_m, params.occupation_c
    norm = math.sqrt(2.0 * G / (math.exp(2.0 * r) - 1.0))
    Nw = np.diag([n_m + 0.5, n_m + 0.5, n_c + 0.5, n_c + 0.5])

    if adiabatic:
        gk = g * math.sqrt(2.0 / kappa)
        # z = (x_m, y_m, Xacc, Yacc); c_out = -c_in - i g sqrt(2/kappa) m^dag
        def drift(f):
            A = np.zeros((4, 4))
            A[0, 0] = A[1, 1] = G
            A[2, 1] = -f * gk
            A[3, 0] = -f * gk
            return A

        def noise_map(f):
            B = np.zeros((4, 4))
            B[0, 0] = B[1, 1] = -math.sqrt(2.0 * gamma)
            B[2, 2] = B[3, 3] = -f
            return B

        V = np.diag([n_m + 0.5, n_m + 0.5, 0.0, 0.0])
        acc = (2, 3)
        mag = (0, 1)
        stiff_rate = max(2.0 * abs(G), 1e-12)
    else:
        # z = (x_m, y_m, x_c, y_c, Xacc, Yacc); c_out = c_in + sqrt(2 kappa) c
        sqk, sqg = math.sqrt(2.0 * kappa), math.sqrt(2.0 * gamma)

        def drift(f):
            A = np.zeros((6, 6))
            A[0, 0] = A[1, 1] = -gamma
            A[0, 3] = A[1, 2] = -g
            A[2, 2] = A[3, 3] = -kappa
            A[2, 1] = A[3, 0] = -g
            A[4, 2] = A[5, 3] = sqk * f
            return A

        def noise_map(f):
            B = np.zeros((6, 4))
            B[0, 0] = B[1, 1] = -sqg
            B[2, 2] = B[3, 3] = -sqk
            B[4, 2] = B[5, 3] = f
            return B

        V = np.diag([n_m + 0.5, n_m + 0.5, n_c + 0.5, n_c + 0.5, 0.0, 0.0])
        acc = (4, 5)
        mag = (0, 1)
        stiff_rate = 2.0 * kappa

    # RK4 stability for the fastest decaying moment requires rate*dt < 2.78;
    # keep a comfortable margin.
    min_steps = int(math.ceil(stiff_rate * tau / 1.2))
    steps = max(int(n_steps), min_steps)
    dt = tau / steps

    def rhs(t, V):
        f = norm * math.exp(G * t)
        A = drift(f)
        B = noise_map(f)
        return A @ V + V @ A.T + B @ Nw @ B.T

    t = 0.0
    for _ in range(steps):
        k1 = rhs(t, V)
        k2 = rhs(t + 0.5 * dt, V + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, V + 0.5 * dt * k2)
        k4 = rhs(t + dt, V + dt * k3)
        V = V + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
    if not np.all(np.isfinite(V)):
        raise NumericalIntegrationError("moment ODE produced non-finite values")

    order = [acc[0], acc[1], mag[0], mag[1]]
    return V[np.ix_(order, order)]
