"""Exact polynomial-times-Gaussian phase-space calculus.

States are carried as `PolyGaussian` objects in one of two domains:

* ``char``   -- symmetric-ordered characteristic function C(beta, beta*),
  parameterized by the real symbols (Re beta_k, Im beta_k) per mode.
* ``wigner`` -- Wigner function as a density over the quadratures
  (X_k, Y_k) with X = (a + a^dag)/sqrt(2), vacuum variance 1/2,
  normalized so that the integral over dX dY equals the trace.

A state value is ``scale * poly(v) * exp(-1/2 (v-mu)^T Q (v-mu))`` where v
is the symbol vector.  All pipeline operations (photon subtraction and
addition, the Fourier transform between the domains, quadrature
substitution, Gaussian marginalization, mode rotation, damping factors)
are closed on this family and are evaluated exactly, so the only numerics
left in the package are dense grid evaluations and quadratures over them.

Conventions fixed here and used package-wide: with covariance matrix V
(vacuum = I/2) the Gaussian characteristic function is
exp(-lambda^T V lambda), i.e. Q = 2V; the corresponding Wigner density has
Q = V^{-1} and normalization 1/((2 pi)^n sqrt(det V)); overlaps obey
Tr(rho sigma) = 2 pi * integral(W_rho W_sigma dX dY) per mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateHeraldError,
    DimensionError,
    DomainError,
    IntegrabilityError,
    PhysicalityError,
)
from .polynomial import ComplexPolynomial

CHAR = "char"
WIGNER = "wigner"

_SQRT2 = np.sqrt(2.0)

# Convergence of the wick/pairing machinery is exact; this tolerance only
# gates "is this matrix still symmetric / real" style sanity checks.
_SYM_TOL = 1e-10


def _check_square_symmetric(Q: np.ndarray, what: str = "matrix") -> np.ndarray:
    Q = np.asarray(Q, dtype=complex)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise DimensionError(f"{what} must be square, got shape {Q.shape}")
    if Q.size and np.max(np.abs(Q - Q.T)) > _SYM_TOL * max(1.0, np.max(np.abs(Q))):
        raise DimensionError(f"{what} must be symmetric")
    return 0.5 * (Q + Q.T)


def _sqrt_det(Q: np.ndarray) -> complex:
    """sqrt(det Q) for the (effectively real positive) determinants here."""
    det = np.linalg.det(Q)
    if abs(det.imag) > 1e-8 * max(1.0, abs(det)) or det.real <= 0:
        raise IntegrabilityError(f"Gaussian determinant not positive: {det}")
    return np.sqrt(det.real)


class PolyGaussian:
    """Immutable polynomial-times-Gaussian phase-space function."""

    __slots__ = ("domain", "Q", "mu", "poly", "scale")

    def __init__(self, domain, Q, poly=None, scale=1.0, mu=None):
        if domain not in (CHAR, WIGNER):
            raise DomainError(f"unknown domain {domain!r}")
        self.domain = domain
        self.Q = _check_square_symmetric(Q, "quadratic form")
        n = self.Q.shape[0]
        self.mu = np.zeros(n, dtype=complex) if mu is None else np.asarray(mu, dtype=complex)
        if self.mu.shape != (n,):
            raise DimensionError("mean vector size mismatch")
        self.poly = ComplexPolynomial.constant(n) if poly is None else poly
        if self.poly.n_symbols != n:
            raise DimensionError("polynomial symbol count mismatch")
        self.scale = complex(scale)

    # -- basic structure ---------------------------------------------------

    @property
    def n_symbols(self) -> int:
        return self.Q.shape[0]

    @property
    def n_modes(self) -> int:
        if self.n_symbols % 2:
            raise DimensionError("state does not have a whole number of modes")
        return self.n_symbols // 2

    def _clone(self, **kw) -> "PolyGaussian":
        args = dict(domain=self.domain, Q=self.Q, poly=self.poly, scale=self.scale, mu=self.mu)
        args.update(kw)
        return PolyGaussian(**args)

    def value(self, point) -> complex:
        v = np.asarray(point, dtype=complex)
        d = v - self.mu
        expo = -0.5 * d @ self.Q @ d
        return self.scale * self.poly.evaluate(list(v)) * np.exp(expo)

    def trace(self) -> complex:
        """Trace of the underlying operator.

        Characteristic domain: the value at the origin.  Wigner domain: the
        integral over all quadratures.
        """
        if self.domain == CHAR:
            return self.value(np.zeros(self.n_symbols))
        return self.integrate_out(list(range(self.n_symbols))).constant_value()

    def constant_value(self) -> complex:
        if self.n_symbols != 0:
            raise DimensionError("state still depends on symbols")
        return self.scale * self.poly.value_at_zero()

    def normalized(self) -> "PolyGaussian":
        tr = self.trace()
        if abs(tr) < 1e-300:
            raise ZeroDivisionError("cannot normalize a traceless state")
        return self._clone(scale=self.scale / tr)

    def scaled(self, factor: complex) -> "PolyGaussian":
        return self._clone(scale=self.scale * factor)

    # -- closed-form operations --------------------------------------------

    def derivative(self, index: int) -> "PolyGaussian":
        """d/d(symbol_index), carried on the polynomial prefactor."""
        Qrow = self.Q[index]
        const = complex(Qrow @ self.mu)
        linear = {j: -Qrow[j] for j in range(self.n_symbols) if Qrow[j] != 0.0}
        new_poly = self.poly.derivative(index) + self.poly.mul_affine(const, linear)
        return self._clone(poly=new_poly)

    def multiply_poly(self, p: ComplexPolynomial) -> "PolyGaussian":
        return self._clone(poly=self.poly * p)

    def multiply_gaussian(self, D, nu=None) -> "PolyGaussian":
        """Multiply by exp(-1/2 (v-nu)^T D (v-nu)); closed on the family."""
        D = _check_square_symmetric(D, "gaussian factor")
        if D.shape[0] != self.n_symbols:
            raise DimensionError("gaussian factor dimension mismatch")
        nu = np.zeros(self.n_symbols, dtype=complex) if nu is None else np.asarray(nu, dtype=complex)
        Qn = self.Q + D
        rhs = self.Q @ self.mu + D @ nu
        mun = np.linalg.solve(Qn, rhs)
        expo = -0.5 * (self.mu @ self.Q @ self.mu + nu @ D @ nu - mun @ Qn @ mun)
        return self._clone(Q=Qn, mu=mun, scale=self.scale * np.exp(expo))

    def substitute(self, index: int, value: float) -> "PolyGaussian":
        """Pin one symbol to a value; returns a state over the others."""
        n = self.n_symbols
        if not 0 <= index < n:
            raise DimensionError("symbol index out of range")
        keep = [i for i in range(n) if i != index]
        da = complex(value) - self.mu[index]
        q_aa = self.Q[index, index]
        if keep:
            q_ab = self.Q[index, keep]
            Q_bb = self.Q[np.ix_(keep, keep)]
            w = np.linalg.solve(Q_bb, q_ab)
            mu_b = self.mu[keep] - w * da
            expo = -0.5 * da * da * (q_aa - q_ab @ w)
            Q_new, mu_new = Q_bb, mu_b
        else:
            expo = -0.5 * da * da * q_aa
            Q_new, mu_new = np.zeros((0, 0)), np.zeros(0)
        new_poly = self.poly.substitute_affine(index, complex(value)).drop_symbol(index)
        return PolyGaussian(self.domain, Q_new, new_poly, self.scale * np.exp(expo), mu_new)

    def integrate_out(self, indices) -> "PolyGaussian":
        """Marginalize over the given symbol directions (exact Gaussian moments)."""
        drop = sorted(set(int(i) for i in indices))
        n = self.n_symbols
        if any(i < 0 or i >= n for i in drop):
            raise DimensionError("symbol index out of range")
        if not drop:
            return self
        keep = [i for i in range(n) if i not in drop]
        Q_dd = self.Q[np.ix_(drop, drop)]
        re_eigs = np.linalg.eigvalsh(0.5 * (Q_dd.real + Q_dd.real.T))
        if np.min(re_eigs) <= 0:
            raise IntegrabilityError("Gaussian does not decay along the integration directions")
        nd = len(drop)
        Sigma = np.linalg.inv(Q_dd)
        gauss_const = (2.0 * np.pi) ** (nd / 2.0) / _sqrt_det(Q_dd)

        if keep:
            Q_dk = self.Q[np.ix_(drop, keep)]
            A = -Sigma @ Q_dk                       # conditional response to kept symbols
            Q_new = self.Q[np.ix_(keep, keep)] - Q_dk.T @ Sigma @ Q_dk
            mu_new = self.mu[keep]
        else:
            A = np.zeros((nd, 0))
            Q_new = np.zeros((0, 0))
            mu_new = np.zeros(0)

        # Substitute each dropped symbol by its conditional mean plus a
        # zero-mean fluctuation symbol, then take the Gaussian expectation of
        # the fluctuation monomials (Isserlis pairings over Sigma).
        poly = self.poly.insert_symbols(nd)          # slots n..n+nd-1 hold the fluctuations
        for row, i_d in enumerate(drop):
            const = self.mu[i_d] - A[row] @ self.mu[keep] if keep else self.mu[i_d]
            linear = {keep[j]: A[row, j] for j in range(len(keep)) if A[row, j] != 0.0}
            linear[n + row] = 1.0
            poly = poly.substitute_affine(i_d, complex(const), linear)

        out: dict[tuple[int, ...], complex] = {}
        for key, c in poly.coeffs.items():
            zeta = []
            for row in range(nd):
                zeta.extend([row] * key[n + row])
            moment = _gaussian_moment(zeta, Sigma)
            if moment == 0.0:
                continue
            kept_key = tuple(key[i] for i in keep)
            out[kept_key] = out.get(kept_key, 0.0) + c * moment
        new_poly = ComplexPolynomial(len(keep), out)
        return PolyGaussian(self.domain, Q_new, new_poly, self.scale * gauss_const, mu_new)

    def linear_substitution(self, L) -> "PolyGaussian":
        """Coordinate substitution v -> L v (L invertible)."""
        L = np.asarray(L, dtype=complex)
        n = self.n_symbols
        if L.shape != (n, n):
            raise DimensionError("substitution matrix dimension mismatch")
        Q_new = L.T @ self.Q @ L
        mu_new = np.linalg.solve(L, self.mu)
        # polynomial: map old symbol i to sum_j L[i, j] * (temp symbol j)
        poly = self.poly.insert_symbols(n)
        for i in range(n):
            linear = {n + j: L[i, j] for j in range(n) if L[i, j] != 0.0}
            poly = poly.substitute_affine(i, 0.0, linear)
        for _ in range(n):
            poly = poly.drop_symbol(0)
        return PolyGaussian(self.domain, Q_new, poly, self.scale, mu_new)

    def rotate_mode(self, mode: int, theta: float) -> "PolyGaussian":
        """Rotate one mode counterclockwise by theta in its phase plane."""
        n = self.n_symbols
        if n % 2 or not 0 <= mode < n // 2:
            raise DimensionError("mode index out of range")
        c, s = np.cos(theta), np.sin(theta)
        L = np.eye(n, dtype=complex)
        ix, iy = 2 * mode, 2 * mode + 1
        # state rotation by +theta reads the function at R(-theta) v
        L[ix, ix] = c
        L[ix, iy] = s
        L[iy, ix] = -s
        L[iy, iy] = c
        return self.linear_substitution(L)

    def scale_arguments(self, factors) -> "PolyGaussian":
        """Evaluate at diag(factors) * v; factors per symbol."""
        f = np.asarray(factors, dtype=complex)
        if f.shape != (self.n_symbols,):
            raise DimensionError("one factor per symbol required")
        Q_new = self.Q * np.outer(f, f)
        mu_new = self.mu / f
        coeffs = {}
        for key, c in self.poly.coeffs.items():
            fac = np.prod([f[i] ** e for i, e in enumerate(key) if e])
            coeffs[key] = c * fac
        return PolyGaussian(self.domain, Q_new, ComplexPolynomial(self.n_symbols, coeffs),
                            self.scale, mu_new)

    # -- domain transforms ---------------------------------------------------

    def to_wigner(self) -> "PolyGaussian":
        if self.domain == WIGNER:
            return self
        n = self.n_modes
        return self._fourier(WIGNER, kernel_sign=-1.0, prefactor=(1.0 / (2.0 * np.pi**2)) ** n)

    def to_char(self) -> "PolyGaussian":
        if self.domain == CHAR:
            return self
        return self._fourier(CHAR, kernel_sign=+1.0, prefactor=1.0)

    def _fourier(self, new_domain, kernel_sign, prefactor) -> "PolyGaussian":
        """Exact Fourier transform with kernel exp(kernel_sign * i*sqrt(2) v.u).

        The Gaussian part transforms in closed form; each polynomial monomial
        is transported as a differential operator acting on the transformed
        Gaussian, so the result is again a PolyGaussian.
        """
        n = self.n_symbols
        re_eigs = np.linalg.eigvalsh(0.5 * (self.Q.real + self.Q.real.T))
        if n and np.min(re_eigs) <= 0:
            raise IntegrabilityError("exponent is not integrable")
        Qinv = np.linalg.inv(self.Q)
        M = 2.0 * Qinv
        const = prefactor * (2.0 * np.pi) ** (n / 2.0) / _sqrt_det(self.Q)

        shifted = self.poly.shift(self.mu)          # integrate over v - mu
        # monomial v_j inside the integral becomes a u-derivative of the
        # transformed Gaussian: v_j e^{s i sqrt2 v.u} = -s(i/sqrt2) d/du_j e^{...}
        deriv_factor = -kernel_sign * 1j / _SQRT2

        out_poly = ComplexPolynomial(n)
        base = ComplexPolynomial.constant(n)
        for key, c in shifted.coeffs.items():
            term = base
            for j, e in enumerate(key):
                for _ in range(e):
                    term = _derivative_against_gaussian(term, M, j)
            out_poly = out_poly + term.scaled(c * deriv_factor ** sum(key))

        result = PolyGaussian(new_domain, M, out_poly, self.scale * const)
        if np.max(np.abs(self.mu)) > 0:
            # kernel phase exp(kernel_sign * i*sqrt(2) mu.u) folds into a mean
            b = kernel_sign * 1j * _SQRT2 * self.mu
            m = np.linalg.solve(M, b)
            result = PolyGaussian(new_domain, M, out_poly, result.scale * np.exp(0.5 * b @ m), m)
        return result

    # -- photon operations (characteristic domain) ---------------------------

    def _ladder_step(self, mode, d_coeffs, m_coeffs) -> "PolyGaussian":
        """Apply sum_j d_coeffs[j] d/dv_j + (affine multiplication m_coeffs)."""
        acc = None
        for j, dc in d_coeffs.items():
            contrib = self.derivative(j).poly.scaled(dc)
            acc = contrib if acc is None else acc + contrib
        acc = acc + self.poly.mul_affine(0.0, m_coeffs)
        return self._clone(poly=acc)

    def photon_op(self, mode: int, kind: str) -> "PolyGaussian":
        """Single-photon subtraction (a rho a^dag) or addition (a^dag rho a).

        Acts on the characteristic function as
        -(d/dbeta -+ beta*/2)(d/dbeta* -+ beta/2), upper signs for addition,
        expressed here in the real symbols of the target mode.  The result is
        unnormalized; its trace is the heralding weight.
        """
        if self.domain != CHAR:
            raise DomainError("photon operations act on the characteristic function")
        sgn = {"subtract": 1.0, "add": -1.0}[kind]
        ix, iy = 2 * mode, 2 * mode + 1
        if iy >= self.n_symbols:
            raise DimensionError("mode index out of range")
        # (d/dbeta* + sgn beta/2) = (Dx + i Dy)/2 + sgn (x + i y)/2
        step1 = self._ladder_step(
            mode, {ix: 0.5, iy: 0.5j}, {ix: 0.5 * sgn, iy: 0.5j * sgn}
        )
        # (d/dbeta + sgn beta*/2) = (Dx - i Dy)/2 + sgn (x - i y)/2
        step2 = step1._ladder_step(
            mode, {ix: 0.5, iy: -0.5j}, {ix: 0.5 * sgn, iy: -0.5j * sgn}
        )
        return step2._clone(poly=step2.poly.scaled(-1.0))

    def __repr__(self) -> str:
        return (f"PolyGaussian(domain={self.domain!r}, symbols={self.n_symbols}, "
                f"deg={self.poly.degree()}, scale={self.scale:.4g})")


def _derivative_against_gaussian(poly: ComplexPolynomial, M: np.ndarray, j: int) -> ComplexPolynomial:
    """d/du_j of poly(u) exp(-1/2 u^T M u), returned as the new polynomial."""
    linear = {i: -M[j, i] for i in range(poly.n_symbols) if M[j, i] != 0.0}
    return poly.derivative(j) + poly.mul_affine(0.0, linear)


def _gaussian_moment(indices: list[int], Sigma: np.ndarray) -> complex:
    """E[prod zeta_i] for zero-mean Gaussian zeta with covariance Sigma."""
    k = len(indices)
    if k == 0:
        return 1.0
    if k % 2:
        return 0.0
    if k == 2:
        return Sigma[indices[0], indices[1]]
    first, rest = indices[0], indices[1:]
    total = 0.0
    for pos in range(len(rest)):
        pair = Sigma[first, rest[pos]]
        remaining = rest[:pos] + rest[pos + 1:]
        total += pair * _gaussian_moment(remaining, Sigma)
    return total


# -- shift support on polynomials (used by the Fourier transport) -----------

def _poly_shift(self: ComplexPolynomial, offsets) -> ComplexPolynomial:
    """P(v + offsets) via per-symbol binomial expansion."""
    offsets = np.asarray(offsets, dtype=complex)
    result = self
    for i, off in enumerate(offsets):
        if off == 0.0:
            continue
        out: dict[tuple[int, ...], complex] = {}
        for key, c in result.coeffs.items():
            e = key[i]
            if e == 0:
                out[key] = out.get(key, 0.0) + c
                continue
            binom = 1.0
            for j in range(e + 1):
                k2 = list(key)
                k2[i] = j
                k2 = tuple(k2)
                out[k2] = out.get(k2, 0.0) + c * binom * off ** (e - j)
                binom = binom * (e - j) / (j + 1)
        result = ComplexPolynomial(result.n_symbols, out)
    return result


ComplexPolynomial.shift = _poly_shift


# -- mixtures -----------------------------------------------------------------


class PolyGaussianMixture:
    """Weighted list of PolyGaussian terms sharing domain and symbol layout."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = []
        for w, t in terms:
            if w < 0:
                raise ValueError("mixture weights must be non-negative")
            if w == 0:
                continue
            self.terms.append((float(w), t))
        if not self.terms:
            raise ValueError("mixture needs at least one term of positive weight")
        d0, n0 = self.terms[0][1].domain, self.terms[0][1].n_symbols
        for _, t in self.terms:
            if t.domain != d0 or t.n_symbols != n0:
                raise DimensionError("mixture terms must share domain and symbols")

    @property
    def domain(self):
        return self.terms[0][1].domain

    @property
    def n_symbols(self):
        return self.terms[0][1].n_symbols

    @property
    def n_modes(self):
        return self.terms[0][1].n_modes

    def map_terms(self, fn) -> "PolyGaussianMixture":
        return PolyGaussianMixture([(w, fn(t)) for w, t in self.terms])

    def trace(self) -> complex:
        return sum(w * t.trace() for w, t in self.terms)

    def normalized(self) -> "PolyGaussianMixture":
        total = self.trace().real
        if total <= 0:
            raise ZeroDivisionError("mixture has non-positive total trace")
        return PolyGaussianMixture([(w / total, t) for w, t in self.terms])

    def value(self, point) -> complex:
        return sum(w * t.value(point) for w, t in self.terms)


def as_mixture(state) -> PolyGaussianMixture:
    if isinstance(state, PolyGaussianMixture):
        return state
    return PolyGaussianMixture([(1.0, state)])


def map_state(state, fn):
    """Apply a PolyGaussian -> PolyGaussian function to a state or mixture."""
    if isinstance(state, PolyGaussianMixture):
        return state.map_terms(fn)
    return fn(state)


# -- spec-level operations ----------------------------------------------------


def gaussian_char_from_cov(V) -> PolyGaussian:
    """Characteristic function of the zero-mean Gaussian state with covariance V."""
    from .measures import physicality_check

    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
        raise DimensionError(f"covariance must be 2n x 2n, got {V.shape}")
    if np.max(np.abs(V - V.T)) > _SYM_TOL * max(1.0, np.max(np.abs(V))):
        raise DimensionError("covariance must be symmetric")
    if not physicality_check(V):
        raise PhysicalityError("covariance violates the uncertainty principle")
    return PolyGaussian(CHAR, 2.0 * V)


def apply_subtraction(state, mode: int):
    out = map_state(state, lambda t: t.photon_op(mode, "subtract"))
    weight = _herald_weight(out)
    if abs(weight) <= 1e-12:
        raise DegenerateHeraldError("photon subtraction from a photonless mode")
    return out


def apply_addition(state, mode: int):
    return map_state(state, lambda t: t.photon_op(mode, "add"))


def heralding_weight(state) -> float:
    return _herald_weight(state)


def _herald_weight(state) -> float:
    tr = state.trace()
    return float(tr.real)


def char_to_wigner(state):
    return map_state(state, lambda t: t.to_wigner())


def wigner_to_char(state):
    return map_state(state, lambda t: t.to_char())


def substitute(state, index: int, value: float):
    return map_state(state, lambda t: t.substitute(index, value))


def integrate_out(state, indices):
    return map_state(state, lambda t: t.integrate_out(indices))


def rotate_mode(state, mode: int, theta: float):
    return map_state(state, lambda t: t.rotate_mode(mode, theta))


def scale_arguments(state, factors):
    return map_state(state, lambda t: t.scale_arguments(factors))


def multiply_gaussian(state, D, nu=None):
    return map_state(state, lambda t: t.multiply_gaussian(D, nu))


# -- grid evaluation ----------------------------------------------------------


@dataclass
class WignerGrid:
    """Sampled single-mode Wigner function over a rectangular grid.

    ``values[i, j]`` is the density at (axis_x[j], axis_y[i]), so a row has
    fixed Y, matching the CSV layout.
    """

    axis_x: np.ndarray
    axis_y: np.ndarray
    values: np.ndarray
    cell_area: float
    trace_weight: float = 1.0

    def integral(self) -> float:
        return float(np.sum(self.values) * self.cell_area)

    def min_value(self) -> float:
        return float(np.min(self.values))

    def renormalized(self) -> "WignerGrid":
        total = self.integral()
        return WignerGrid(self.axis_x, self.axis_y, self.values / total,
                          self.cell_area, self.trace_weight)

    def write_csv(self, path) -> None:
        x, y = self.axis_x, self.axis_y
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# {x[0]:.17g},{x[-1]:.17g},{len(x)},"
                     f"{y[0]:.17g},{y[-1]:.17g},{len(y)},{self.trace_weight:.17g}\n")
            for row in self.values:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

    @classmethod
    def read_csv(cls, path) -> "WignerGrid":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline()
            if not header.startswith("#"):
                raise ValueError("missing WignerGrid header")
            x0, x1, nx, y0, y1, ny, tw = header[1:].strip().split(",")
            nx, ny = int(nx), int(ny)
            values = np.loadtxt(fh, delimiter=",", ndmin=2)
        if values.shape != (ny, nx):
            raise ValueError(f"grid shape {values.shape} does not match header")
        axis_x = np.linspace(float(x0), float(x1), nx)
        axis_y = np.linspace(float(y0), float(y1), ny)
        cell = (axis_x[1] - axis_x[0]) * (axis_y[1] - axis_y[0])
        return cls(axis_x, axis_y, values, cell, float(tw))


def default_axes(lo: float = -6.0, hi: float = 6.0, n: int = 257):
    """Default evaluation window; resolves the interference fringes of
    cats up to |alpha|^2 of about 4."""
    axis = np.linspace(lo, hi, n)
    return axis, axis.copy()


def recommended_axes(state, n: int = 257, min_extent: float = 6.0):
    """Axes wide enough to hold the state's Gaussian footprint.

    Uses the default [-6, 6] window unless some mixture term's mean or
    covariance pushes appreciable mass outside it; the window then grows so
    grid quadratures stay converged (5.5 sigma plus the mean offset).
    """
    extent = min_extent
    for _, t in as_mixture(state).terms:
        cov = np.linalg.inv(t.Q.real)
        sigma = np.sqrt(max(np.linalg.eigvalsh(cov).max(), 0.0))
        reach = float(np.max(np.abs(t.mu.real))) + 5.5 * sigma
        extent = max(extent, reach)
    axis = np.linspace(-extent, extent, n)
    return axis, axis.copy()


def _poly_on_powers(poly: ComplexPolynomial, xp: list, yp: list):
    """Evaluate a 2-symbol polynomial using cached power tables."""
    total = 0.0
    for (i, j), c in poly.coeffs.items():
        total = total + c * (xp[i] * yp[j] if i or j else 1.0)
    return total


def eval_term_polys(term: PolyGaussian, polys, X, Y):
    """Evaluate several polynomials against one term's Gaussian on a grid.

    All polynomials share the term's exponential, which dominates the cost;
    used for joint value/Laplacian evaluation.
    """
    dx = X - term.mu[0]
    dy = Y - term.mu[1]
    expo = np.exp(-0.5 * (term.Q[0, 0] * dx * dx + 2.0 * term.Q[0, 1] * dx * dy
                          + term.Q[1, 1] * dy * dy))
    max_pow = 0
    for p in polys:
        for i, j in p.coeffs:
            max_pow = max(max_pow, i, j)
    xp, yp = [1.0, X], [1.0, Y]
    for _ in range(2, max_pow + 1):
        xp.append(xp[-1] * X)
        yp.append(yp[-1] * Y)
    return [term.scale * _poly_on_powers(p, xp, yp) * expo for p in polys]


def mixture_values(state, X, Y) -> np.ndarray:
    """Raw (complex) mixture values on a meshgrid, no trace bookkeeping."""
    mix = as_mixture(state)
    total = np.zeros(np.shape(X), dtype=complex)
    for w, t in mix.terms:
        total += w * eval_term_polys(t, [t.poly], X, Y)[0]
    return total


def eval_grid(state, axes=None, renormalize: bool = False) -> WignerGrid:
    """Evaluate a 1-mode Wigner state (or mixture) on a dense grid."""
    mix = as_mixture(state)
    if mix.domain != WIGNER:
        raise DomainError("only Wigner-domain states can be gridded")
    if mix.n_symbols != 2:
        raise DimensionError("grid evaluation requires exactly one mode")
    if axes is None:
        axes = default_axes()
    axis_x, axis_y = axes
    X, Y = np.meshgrid(axis_x, axis_y)   # rows have fixed Y
    total = mixture_values(mix, X, Y)
    peak = np.max(np.abs(total.real))
    if peak > 0 and np.max(np.abs(total.imag)) > 1e-10 * peak:
        raise DomainError("Wigner values have a non-negligible imaginary part")
    values = total.real
    cell = float((axis_x[1] - axis_x[0]) * (axis_y[1] - axis_y[0]))
    grid = WignerGrid(np.asarray(axis_x, dtype=float), np.asarray(axis_y, dtype=float),
                      values, cell, trace_weight=float(np.sum(values) * cell))
    return grid.renormalized() if renormalize else grid
