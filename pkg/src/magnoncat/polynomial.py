"""Complex multivariate polynomials over a fixed set of real symbols.

The phase-space objects of this package are polynomials times Gaussians.
For every state arising in the supported pipelines (at most one photon
subtraction plus one addition) the total degree stays at or below four,
so a sparse multi-index map is ample.
"""

from __future__ import annotations

import numpy as np

# Coefficients below this magnitude are dropped after every operation; this
# keeps the monomial map from accumulating float dust without touching any
# quantity at the package's 1e-6 working accuracy.
COEFF_DROP = 1e-14


class ComplexPolynomial:
    """Sparse complex polynomial: map from exponent tuples to coefficients.

    Keys are tuples of non-negative integer exponents, one entry per symbol.
    The zero polynomial is the empty map.
    """

    __slots__ = ("n_symbols", "coeffs")

    def __init__(self, n_symbols: int, coeffs: dict[tuple[int, ...], complex] | None = None):
        self.n_symbols = n_symbols
        self.coeffs = {}
        if coeffs:
            for key, c in coeffs.items():
                if len(key) != n_symbols:
                    raise ValueError(f"exponent tuple {key} does not match {n_symbols} symbols")
                if abs(c) > COEFF_DROP:
                    self.coeffs[tuple(key)] = complex(c)

    @classmethod
    def constant(cls, n_symbols: int, value: complex = 1.0) -> "ComplexPolynomial":
        return cls(n_symbols, {(0,) * n_symbols: value})

    @classmethod
    def symbol(cls, n_symbols: int, index: int, coeff: complex = 1.0) -> "ComplexPolynomial":
        key = tuple(1 if i == index else 0 for i in range(n_symbols))
        return cls(n_symbols, {key: coeff})

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return max((sum(k) for k in self.coeffs), default=0)

    def copy(self) -> "ComplexPolynomial":
        out = ComplexPolynomial(self.n_symbols)
        out.coeffs = dict(self.coeffs)
        return out

    def __add__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        if other.n_symbols != self.n_symbols:
            raise ValueError("symbol count mismatch")
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0.0) + c
        return ComplexPolynomial(self.n_symbols, out)

    def __sub__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        return self + other.scaled(-1.0)

    def scaled(self, factor: complex) -> "ComplexPolynomial":
        return ComplexPolynomial(
            self.n_symbols, {k: c * factor for k, c in self.coeffs.items()}
        )

    def __mul__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        if other.n_symbols != self.n_symbols:
            raise ValueError("symbol count mismatch")
        out: dict[tuple[int, ...], complex] = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                out[key] = out.get(key, 0.0) + c1 * c2
        return ComplexPolynomial(self.n_symbols, out)

    def mul_affine(self, const: complex, linear: dict[int, complex]) -> "ComplexPolynomial":
        """Multiply by (const + sum_i linear[i] * symbol_i)."""
        out: dict[tuple[int, ...], complex] = {}
        for key, c in self.coeffs.items():
            if const != 0.0:
                out[key] = out.get(key, 0.0) + c * const
            for i, a in linear.items():
                if a == 0.0:
                    continue
                k2 = list(key)
                k2[i] += 1
                k2 = tuple(k2)
                out[k2] = out.get(k2, 0.0) + c * a
        return ComplexPolynomial(self.n_symbols, out)

    def derivative(self, index: int) -> "ComplexPolynomial":
        out: dict[tuple[int, ...], complex] = {}
        for key, c in self.coeffs.items():
            e = key[index]
            if e == 0:
                continue
            k2 = list(key)
            k2[index] = e - 1
            k2 = tuple(k2)
            out[k2] = out.get(k2, 0.0) + c * e
        return ComplexPolynomial(self.n_symbols, out)

    def substitute_affine(
        self, index: int, const: complex, linear: dict[int, complex] | None = None
    ) -> "ComplexPolynomial":
        """Replace symbol `index` by an affine form of the *other* symbols.

        The substituted symbol keeps its slot with exponent 0 in every key,
        so the symbol count does not change; use `drop_symbol` afterwards to
        compact the representation.
        """
        linear = linear or {}
        if index in linear:
            raise ValueError("substitution must not be self-referential")
        form = ComplexPolynomial(self.n_symbols, {(0,) * self.n_symbols: const})
        for i, a in linear.items():
            form = form + ComplexPolynomial.symbol(self.n_symbols, i, a)
        result = ComplexPolynomial(self.n_symbols)
        powers: list[ComplexPolynomial] = [ComplexPolynomial.constant(self.n_symbols)]
        max_pow = max((k[index] for k in self.coeffs), default=0)
        for _ in range(max_pow):
            powers.append(powers[-1] * form)
        for key, c in self.coeffs.items():
            rest = list(key)
            e = rest[index]
            rest[index] = 0
            term = ComplexPolynomial(self.n_symbols, {tuple(rest): c}) * powers[e]
            result = result + term
        return result

    def drop_symbol(self, index: int) -> "ComplexPolynomial":
        """Remove a symbol slot; every key must have exponent 0 there."""
        out: dict[tuple[int, ...], complex] = {}
        for key, c in self.coeffs.items():
            if key[index] != 0:
                raise ValueError("cannot drop a symbol that still appears")
            out[key[:index] + key[index + 1:]] = c
        return ComplexPolynomial(self.n_symbols - 1, out)

    def insert_symbols(self, n_extra: int) -> "ComplexPolynomial":
        """Append `n_extra` fresh symbols (exponent 0 everywhere)."""
        out = {k + (0,) * n_extra: c for k, c in self.coeffs.items()}
        return ComplexPolynomial(self.n_symbols + n_extra, out)

    def evaluate(self, values) -> complex | np.ndarray:
        """Evaluate at a point or on broadcastable arrays (one per symbol)."""
        values = [np.asarray(v) for v in values]
        if len(values) != self.n_symbols:
            raise ValueError("value count mismatch")
        total = 0.0
        for key, c in self.coeffs.items():
            term = c
            for v, e in zip(values, key):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def __call__(self, *values):
        return self.evaluate(values)

    def value_at_zero(self) -> complex:
        return self.coeffs.get((0,) * self.n_symbols, 0.0 + 0.0j)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "ComplexPolynomial(0)"
        parts = [f"{c:.4g}*{k}" for k, c in sorted(self.coeffs.items())]
        return "ComplexPolynomial(" + " + ".join(parts) + ")"
