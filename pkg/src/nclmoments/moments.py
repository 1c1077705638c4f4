"""Normally ordered moments of truncated single-mode states.

The central object is the :class:`MomentTable`: the array of expectation
values ``<a^dag^k a^l>`` up to a maximum total order.  Every derived
quantity in this package — quadrature moments, photon-number
cross-correlations, moment matrices, witnesses — is a finite linear
combination of these entries, expressed through :class:`NormalPolynomial`.

Conventions
-----------
* ``x_phi = a e^{-i phi} + a^dag e^{i phi}``, ``p_phi = x_{phi + pi/2}``,
  so ``<x^2> = 1`` in vacuum and ``<:x^2:> + <:p^2:> = 4 <n>``.
* ``:·:`` denotes normal ordering; inside it the mode operators commute,
  so products of normally ordered polynomials reduce to dictionary
  convolutions over ``(creation power, annihilation power)`` pairs.
* ``char_function`` returns the normally ordered characteristic function
  ``Phi(beta) = exp(|beta|^2 / 2) <D(beta)>`` with
  ``D(beta) = exp(beta a^dag - conj(beta) a)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Mapping, Union

import numpy as np

from .errors import (
    InsufficientOrderError,
    NumericConsistencyError,
    OrderAccuracyWarning,
    ValidationError,
)
from .operators import Array, displacement_matrix, lowered
from .states import DensityState, FockState, State

_SYMMETRY_TOL = 1e-10
_DIAGONAL_TOL = 1e-12
_IMAG_TOL = 1e-8

MomentSource = Union["MomentTable", FockState, DensityState]


def moment_aa(state: State, k: int, l: int) -> complex:
    """Normally ordered moment ``<a^dag^k a^l>`` of a truncated state.

    Emits :class:`OrderAccuracyWarning` when the requested order uses more
    than half of the truncated basis, where the missing tail of a generic
    state starts to bite.
    """
    if k < 0 or l < 0:
        raise ValidationError("moment orders must be nonnegative")
    dim = state.dim
    if k + l > dim / 2:
        warnings.warn(
            f"moment order k+l={k + l} exceeds half the truncation dim={dim}; "
            "the result may be dominated by truncation error",
            OrderAccuracyWarning,
            stacklevel=2,
        )
    if isinstance(state, FockState):
        left = lowered(state.amplitudes, k)
        right = lowered(state.amplitudes, l)
        return complex(np.vdot(left, right))
    # Tr(rho a^dag^k a^l) = sum_m rho[m, m + k - l] * sqrt(m!/(m-l)!) *
    # sqrt((m - l + k)!/(m - l)!), over m with both indices in range.
    total = 0.0 + 0.0j
    for m in range(l, dim):
        col = m + k - l
        if col < 0 or col >= dim:
            continue
        coeff = 1.0
        for i in range(l):
            coeff *= m - i
        for i in range(k):
            coeff *= m - l + k - i
        total += state.matrix[m, col] * math.sqrt(coeff)
    return complex(total)


@dataclass(frozen=True)
class MomentTable:
    """Dense table of the moments ``<a^dag^k a^l>`` for ``k, l <= max_order``.

    ``values[k, l]`` holds ``<a^dag^k a^l>``.  Tables built from states are
    exactly conjugate-symmetric; tables reconstructed from simulated
    measurement records keep the symmetry but may violate diagonal
    positivity by the size of the injected noise, which is why validation
    of positivity can be relaxed at construction.
    """

    max_order: int
    values: Array
    validate: bool = True

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=complex)
        expected = (self.max_order + 1, self.max_order + 1)
        if vals.shape != expected:
            raise ValidationError(
                f"values shape {vals.shape} does not match max_order "
                f"{self.max_order}; expected {expected}"
            )
        scale = float(np.max(np.abs(vals))) if vals.size else 0.0
        sym_tol = _SYMMETRY_TOL * max(1.0, scale)
        sym_residue = float(np.max(np.abs(vals - vals.conj().T)))
        if sym_residue > sym_tol:
            raise ValidationError(
                f"moment table is not conjugate-symmetric (residue {sym_residue:.3e})"
            )
        if self.validate:
            diag = np.diag(vals)
            worst = float(np.min(diag.real))
            if worst < -_DIAGONAL_TOL * max(1.0, scale):
                raise ValidationError(
                    f"diagonal moment <a^dag^k a^k> = {worst:.3e} is negative"
                )
        if abs(vals[0, 0] - 1.0) > 1e-6:
            raise ValidationError(
                f"zeroth moment must be 1, got {vals[0, 0]!r}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def entry(self, k: int, l: int) -> complex:
        """``<a^dag^k a^l>``; raises when the order exceeds the table."""
        if k < 0 or l < 0:
            raise ValidationError("moment orders must be nonnegative")
        if k > self.max_order or l > self.max_order:
            raise InsufficientOrderError(
                f"moment ({k},{l}) exceeds table max_order={self.max_order}"
            )
        return complex(self.values[k, l])


def moment_table(state: State, max_order: int) -> MomentTable:
    """Tabulate ``<a^dag^k a^l>`` for all ``k, l <= max_order``."""
    if max_order < 0:
        raise ValidationError("max_order must be nonnegative")
    size = max_order + 1
    vals = np.zeros((size, size), dtype=complex)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", OrderAccuracyWarning)
        for k in range(size):
            for l in range(k + 1):
                vals[k, l] = moment_aa(state, k, l)
                if l < k:
                    vals[l, k] = np.conj(vals[k, l])
    if caught:
        # One warning for the whole table instead of one per entry.
        warnings.warn(caught[-1].message, stacklevel=2)
    return MomentTable(max_order=max_order, values=vals)


@dataclass(frozen=True)
class NormalPolynomial:
    """Polynomial in ``a^dag`` and ``a`` understood under normal ordering.

    ``terms`` maps ``(creation power, annihilation power)`` to a complex
    coefficient.  Because every expectation taken through this type is of a
    *normally ordered* expression, the symbols commute and multiplication is
    plain convolution of exponent pairs.
    """

    terms: Mapping[tuple[int, int], complex]

    def __post_init__(self) -> None:
        clean = {}
        for (k, l), coeff in self.terms.items():
            if k < 0 or l < 0:
                raise ValidationError("operator powers must be nonnegative")
            c = complex(coeff)
            if c != 0.0:
                clean[(int(k), int(l))] = c
        object.__setattr__(self, "terms", clean)

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, value: complex) -> NormalPolynomial:
        return cls({(0, 0): value})

    @classmethod
    def annihilation(cls) -> NormalPolynomial:
        return cls({(0, 1): 1.0})

    @classmethod
    def creation(cls) -> NormalPolynomial:
        return cls({(1, 0): 1.0})

    @classmethod
    def number(cls) -> NormalPolynomial:
        return cls({(1, 1): 1.0})

    @classmethod
    def quadrature(cls, phi: float = 0.0) -> NormalPolynomial:
        """``x_phi = a e^{-i phi} + a^dag e^{i phi}``."""
        return cls({(0, 1): np.exp(-1j * phi), (1, 0): np.exp(1j * phi)})

    @classmethod
    def momentum(cls, phi: float = 0.0) -> NormalPolynomial:
        """``p_phi = x_{phi + pi/2} = i (a^dag e^{i phi} - a e^{-i phi})``."""
        return cls.quadrature(phi + math.pi / 2.0)

    # -- algebra -------------------------------------------------------
    def __add__(self, other: NormalPolynomial) -> NormalPolynomial:
        merged = dict(self.terms)
        for key, coeff in other.terms.items():
            merged[key] = merged.get(key, 0.0) + coeff
        return NormalPolynomial(merged)

    def __sub__(self, other: NormalPolynomial) -> NormalPolynomial:
        return self + (-1.0) * other

    def __mul__(self, other: Union["NormalPolynomial", complex, float, int]):
        if isinstance(other, NormalPolynomial):
            product: dict[tuple[int, int], complex] = {}
            for (k1, l1), c1 in self.terms.items():
                for (k2, l2), c2 in other.terms.items():
                    key = (k1 + k2, l1 + l2)
                    product[key] = product.get(key, 0.0) + c1 * c2
            return NormalPolynomial(product)
        return NormalPolynomial(
            {key: coeff * complex(other) for key, coeff in self.terms.items()}
        )

    def __rmul__(self, other: Union[complex, float, int]) -> NormalPolynomial:
        return self * other

    def __pow__(self, exponent: int) -> NormalPolynomial:
        if exponent < 0:
            raise ValidationError("exponent must be nonnegative")
        out = NormalPolynomial.constant(1.0)
        for _ in range(exponent):
            out = out * self
        return out

    def adjoint(self) -> NormalPolynomial:
        return NormalPolynomial(
            {(l, k): np.conj(c) for (k, l), c in self.terms.items()}
        )

    @property
    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(k + l for (k, l) in self.terms)

    # -- evaluation ----------------------------------------------------
    def expectation(self, source: MomentSource) -> complex:
        """Expectation of the normally ordered polynomial, ``sum c_kl <a^dag^k a^l>``."""
        getter = _entry_getter(source)
        total = 0.0 + 0.0j
        for (k, l), coeff in self.terms.items():
            total += coeff * getter(k, l)
        return complex(total)


def _entry_getter(source: MomentSource) -> Callable[[int, int], complex]:
    if isinstance(source, MomentTable):
        return source.entry
    if isinstance(source, (FockState, DensityState)):
        return lambda k, l: moment_aa(source, k, l)
    raise ValidationError(
        f"expected a MomentTable or a state, got {type(source).__name__}"
    )


def resolve_table(source: MomentSource, needed_order: int) -> MomentTable:
    """Return a moment table of at least ``needed_order``.

    States are tabulated on demand; an existing table is passed through
    after an order check (:class:`InsufficientOrderError` if too small).
    """
    if isinstance(source, MomentTable):
        if source.max_order < needed_order:
            raise InsufficientOrderError(
                f"moment table has max_order={source.max_order}, "
                f"but order {needed_order} is required"
            )
        return source
    if isinstance(source, (FockState, DensityState)):
        return moment_table(source, needed_order)
    raise ValidationError(
        f"expected a MomentTable or a state, got {type(source).__name__}"
    )


def as_real(value: complex, context: str) -> float:
    """Collapse a nominally real expectation to float.

    Raises :class:`NumericConsistencyError` when the imaginary residue
    exceeds ``1e-8`` relative to the value's magnitude (with an absolute
    floor of 1 so that tiny values near zero are not penalized).
    """
    residue = abs(value.imag)
    if residue > _IMAG_TOL * max(1.0, abs(value)):
        raise NumericConsistencyError(
            f"{context} should be real but has imaginary part {value.imag:.3e} "
            f"(value {value!r})"
        )
    return float(value.real)


def quad_moment(
    source: MomentSource, x_pow: int, p_pow: int, phi: float = 0.0
) -> float:
    """Normally ordered quadrature moment ``<:x_phi^x_pow p_phi^p_pow:>``."""
    poly = NormalPolynomial.quadrature(phi) ** x_pow
    poly = poly * NormalPolynomial.momentum(phi) ** p_pow
    return as_real(
        poly.expectation(source),
        f"<:x^{x_pow} p^{p_pow}:> at phi={phi:.6g}",
    )


def xn_moment(
    source: MomentSource, x_pow: int, n_pow: int, phi: float = 0.0
) -> float:
    """Normally ordered mixed moment ``<:x_phi^x_pow n^n_pow:>``."""
    poly = NormalPolynomial.quadrature(phi) ** x_pow
    poly = poly * NormalPolynomial.number() ** n_pow
    return as_real(
        poly.expectation(source),
        f"<:x^{x_pow} n^{n_pow}:> at phi={phi:.6g}",
    )


def char_function(state: State, beta: complex) -> complex:
    """Normally ordered characteristic function ``e^{|beta|^2/2} <D(beta)>``.

    Warns when ``|beta|^2`` approaches the truncation dimension: the
    displaced state then leaks past the cutoff and ``<D(beta)>`` degrades.
    """
    dim = state.dim
    if abs(beta) ** 2 >= dim / 4.0:
        warnings.warn(
            f"displacement |beta|^2 = {abs(beta) ** 2:.3g} is large for "
            f"dim {dim}; characteristic-function values may be inaccurate",
            OrderAccuracyWarning,
            stacklevel=2,
        )
    disp = displacement_matrix(beta, dim)
    if isinstance(state, FockState):
        mean = complex(np.vdot(state.amplitudes, disp @ state.amplitudes))
    else:
        mean = complex(np.trace(state.matrix @ disp))
    return math.exp(abs(beta) ** 2 / 2.0) * mean
