"""Nonclassicality criteria from moment matrices and witnesses.

A state is classical when its Glauber-Sudarshan distribution is a true
probability density; every criterion here is a quantity that is nonnegative
for all classical states, so a verified negative value certifies
nonclassicality.

Four determinant hierarchies are provided, differing in the monomials that
index the underlying matrix of normally ordered moments:

* ``aa``  — monomials in ``a^dag`` and ``a``; entry
  ``M[i, j] = <a^dag^{q_i + p_j} a^{p_i + q_j}>`` for monomial exponent
  pairs ``(p, q) = (creation, annihilation)``.
* ``quad`` — monomials in the quadratures ``x_phi`` and ``p_phi``; entries
  are normally ordered quadrature moments.
* ``xn``  — mixed monomials in ``x_phi`` and the photon number ``n``.
* ``d2``  — the ``xn`` family contracted against ``p_phi^2``: entry
  ``4 <:x^kappa n^{sigma+1}:> - <:x^{kappa+2} n^sigma:>``, which for the
  trivial basis reduces to ``<:p_phi^2:>``.

``d_N`` denotes the determinant of the leading ``N x N`` block in the graded
monomial order.  The first orders that can certify anything differ by kind:
the ``aa`` determinant at ``N = 2`` is ``<n> - |<a>|^2 >= 0`` for *every*
state, so it is reported but never classified.

Witnesses: ``s3`` (a 3x3 determinant over ``{1, a^dag^2, a^2}``), the pair
``s2A``/``s2B`` of 2x2 quadrature determinants, the amplitude-squared
quadrature variances, and the Bochner determinants of the normally ordered
characteristic function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DuplicatePointError, ValidationError
from .moments import (
    MomentSource,
    MomentTable,
    as_real,
    char_function,
    quad_moment,
    resolve_table,
    xn_moment,
)
from .operators import Array
from .states import State

DEFAULT_TOLERANCE = 1e-9
_WITNESS_ORDER = 4


class BasisKind(str, Enum):
    """Monomial families indexing the moment matrices."""

    AA = "aa"
    QUAD = "quad"
    XN = "xn"
    XN_WEIGHTED = "d2"


def graded_pairs(count: int) -> tuple[tuple[int, int], ...]:
    """First ``count`` exponent pairs in graded order.

    Enumerates total degree ``d = 0, 1, 2, ...`` and within each degree
    ``(0, d), (1, d-1), ..., (d, 0)``.
    """
    if count < 1:
        raise ValidationError("a basis needs at least one monomial")
    pairs: list[tuple[int, int]] = []
    d = 0
    while len(pairs) < count:
        for i in range(d + 1):
            pairs.append((i, d - i))
            if len(pairs) == count:
                break
        d += 1
    return tuple(pairs)


@dataclass(frozen=True)
class MonomialBasis:
    """An ordered set of monomials indexing a moment matrix.

    The meaning of an exponent pair ``(p, q)`` depends on ``kind``:
    ``AA`` reads it as ``a^dag^p a^q``, ``QUAD`` as ``p_phi^p x_phi^q``,
    ``XN`` and ``XN_WEIGHTED`` as ``n^p x_phi^q``.  In graded order the
    first six monomials are, respectively, ``1, a, a^dag, a^2, a^dag a,
    a^dag^2`` and ``1, x, p, x^2, x p, p^2`` and ``1, x, n, x^2, n x, n^2``.
    """

    kind: BasisKind
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        kind = BasisKind(self.kind)
        pairs = tuple((int(p), int(q)) for p, q in self.pairs)
        if not pairs:
            raise ValidationError("a basis needs at least one monomial")
        if any(p < 0 or q < 0 for p, q in pairs):
            raise ValidationError("monomial exponents must be nonnegative")
        if len(set(pairs)) != len(pairs):
            raise ValidationError("basis contains a repeated monomial")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def graded(cls, kind: Union[BasisKind, str], size: int) -> MonomialBasis:
        return cls(BasisKind(kind), graded_pairs(size))

    @classmethod
    def number_chain(cls, size: int) -> MonomialBasis:
        """``1, n, n^2, ...`` — the default basis of the ``d2`` hierarchy."""
        if size < 1:
            raise ValidationError("a basis needs at least one monomial")
        return cls(BasisKind.XN_WEIGHTED, tuple((i, 0) for i in range(size)))

    @property
    def size(self) -> int:
        return len(self.pairs)

    def required_order(self) -> int:
        """Smallest moment-table ``max_order`` that covers this basis."""
        top = max(p + q for p, q in self.pairs)
        if self.kind is BasisKind.XN_WEIGHTED:
            return 2 * (top + 1)
        return 2 * top


@dataclass(frozen=True)
class MomentMatrix:
    """A Hermitian matrix of normally ordered moments over a monomial basis."""

    basis: MonomialBasis
    phi: float
    values: Array

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=complex)
        n = self.basis.size
        if vals.shape != (n, n):
            raise ValidationError(
                f"matrix shape {vals.shape} does not match basis size {n}"
            )
        scale = float(np.max(np.abs(vals))) if vals.size else 0.0
        residue = float(np.max(np.abs(vals - vals.conj().T)))
        if residue > 1e-10 * max(1.0, scale):
            raise ValidationError(
                f"moment matrix is not Hermitian (residue {residue:.3e})"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.basis.size

    def leading_determinant(self, n: int) -> float:
        """Determinant of the top-left ``n x n`` block (real by Hermiticity)."""
        if n < 1 or n > self.size:
            raise ValidationError(f"block size {n} outside 1..{self.size}")
        block = self.values[:n, :n]
        return as_real(complex(np.linalg.det(block)), f"leading {n}x{n} determinant")


def build_matrix(
    source: MomentSource,
    basis: MonomialBasis,
    phi: float = 0.0,
) -> MomentMatrix:
    """Moment matrix over an ``AA``, ``QUAD`` or ``XN`` monomial basis.

    For the weighted ``d2`` family use :func:`build_matrix_d2`.
    """
    if basis.kind is BasisKind.XN_WEIGHTED:
        raise ValidationError("use build_matrix_d2 for the d2 basis family")
    table = resolve_table(source, basis.required_order())
    n = basis.size
    vals = np.zeros((n, n), dtype=complex)
    for i, (pi, qi) in enumerate(basis.pairs):
        for j in range(i, n):
            pj, qj = basis.pairs[j]
            if basis.kind is BasisKind.AA:
                vals[i, j] = table.entry(qi + pj, pi + qj)
            elif basis.kind is BasisKind.QUAD:
                vals[i, j] = quad_moment(table, qi + qj, pi + pj, phi)
            else:
                vals[i, j] = xn_moment(table, qi + qj, pi + pj, phi)
            if j > i:
                vals[j, i] = np.conj(vals[i, j])
    return MomentMatrix(basis=basis, phi=phi, values=vals)


def build_matrix_d2(
    source: MomentSource,
    size: int = 0,
    phi: float = 0.0,
    basis: Optional[MonomialBasis] = None,
) -> MomentMatrix:
    """Weighted moment matrix ``4 <:x^k n^{s+1}:> - <:x^{k+2} n^s:>``.

    By default the basis is the photon-number chain ``1, n, ..., n^{size-1}``;
    an explicit ``XN_WEIGHTED`` basis overrides it.  The ``1 x 1`` case is
    the normally ordered variance proxy ``<:p_phi^2:>``.
    """
    if basis is None:
        if size < 1:
            raise ValidationError("size must be at least 1 when no basis is given")
        basis = MonomialBasis.number_chain(size)
    elif basis.kind is not BasisKind.XN_WEIGHTED:
        raise ValidationError("build_matrix_d2 requires an XN_WEIGHTED basis")
    table = resolve_table(source, basis.required_order())
    n = basis.size
    vals = np.zeros((n, n), dtype=complex)
    for i, (ni, xi) in enumerate(basis.pairs):
        for j in range(i, n):
            nj, xj = basis.pairs[j]
            kappa = xi + xj
            sigma = ni + nj
            vals[i, j] = 4.0 * xn_moment(table, kappa, sigma + 1, phi) - xn_moment(
                table, kappa + 2, sigma, phi
            )
            if j > i:
                vals[j, i] = np.conj(vals[i, j])
    return MomentMatrix(basis=basis, phi=phi, values=vals)


# -- scalar witnesses ----------------------------------------------------


def s3(source: MomentSource) -> float:
    """Determinant of the moment matrix over ``{1, a^dag^2, a^2}``.

    Negative values certify nonclassicality; equals one quarter of the
    product of the amplitude-squared variance extrema.
    """
    table = resolve_table(source, _WITNESS_ORDER)
    e02 = table.entry(0, 2)
    e20 = table.entry(2, 0)
    e22 = table.entry(2, 2)
    e04 = table.entry(0, 4)
    e40 = table.entry(4, 0)
    mat = np.array(
        [
            [1.0, e20, e02],
            [e02, e22, e04],
            [e20, e40, e22],
        ],
        dtype=complex,
    )
    return as_real(complex(np.linalg.det(mat)), "s3 witness")


def s2_witnesses(source: MomentSource, phi: float = 0.0) -> tuple[float, float]:
    """The pair of 2x2 quadrature determinants ``(s2A, s2B)``.

    ``s2A = <:x^2:><:x^2 p^2:> - <:x^2 p:>^2`` and
    ``s2B = <:x^2 p^2:> - <:x p:>^2`` at quadrature angle ``phi``.
    """
    table = resolve_table(source, _WITNESS_ORDER)
    q20 = quad_moment(table, 2, 0, phi)
    q22 = quad_moment(table, 2, 2, phi)
    q21 = quad_moment(table, 2, 1, phi)
    q11 = quad_moment(table, 1, 1, phi)
    return q20 * q22 - q21**2, q22 - q11**2


def _asq_pair(table: MomentTable) -> tuple[complex, float]:
    b = table.entry(0, 4) - table.entry(0, 2) ** 2
    c = as_real(
        table.entry(2, 2) - abs(table.entry(0, 2)) ** 2,
        "amplitude-squared covariance",
    )
    return b, c


def asq_variance(source: MomentSource, phi: float = 0.0) -> float:
    """Normally ordered variance of ``E_phi = e^{i phi} a^2 + e^{-i phi} a^dag^2``.

    ``E_0 = a^2 + a^dag^2`` and ``E_{pi/2}`` is (minus) the conjugate
    quadrature ``i (a^dag^2 - a^2)``; a negative value at any angle is the
    amplitude-squared squeezing signature.  The full variance of ``E_phi``
    exceeds this by ``4 <n> + 2``.
    """
    table = resolve_table(source, _WITNESS_ORDER)
    b, c = _asq_pair(table)
    return 2.0 * (np.exp(2j * phi) * b).real + 2.0 * c


def asq_min_max(source: MomentSource) -> tuple[float, float]:
    """Extrema of :func:`asq_variance` over the angle ``phi``."""
    table = resolve_table(source, _WITNESS_ORDER)
    b, c = _asq_pair(table)
    return 2.0 * (c - abs(b)), 2.0 * (c + abs(b))


def principal_minor(matrix: MomentMatrix, indices: Sequence[int]) -> float:
    """Determinant of the principal submatrix on the selected monomials."""
    idx = [int(i) for i in indices]
    if not idx:
        raise ValidationError("need at least one index")
    if len(set(idx)) != len(idx):
        raise ValidationError("indices must be distinct")
    if min(idx) < 0 or max(idx) >= matrix.size:
        raise ValidationError(
            f"indices out of range for a {matrix.size}-monomial basis"
        )
    sub = matrix.values[np.ix_(idx, idx)]
    return as_real(complex(np.linalg.det(sub)), "principal minor")


# -- hierarchy reports ----------------------------------------------------

_REPORT_START = {
    BasisKind.AA: 2,
    BasisKind.QUAD: 2,
    BasisKind.XN: 2,
    BasisKind.XN_WEIGHTED: 1,
}
_CLASSIFY_START = {
    BasisKind.AA: 3,
    BasisKind.QUAD: 2,
    BasisKind.XN: 2,
    BasisKind.XN_WEIGHTED: 1,
}


@dataclass(frozen=True)
class CriterionReport:
    """Outcome of one determinant hierarchy on one state.

    ``determinants`` holds ``(N, d_N)`` pairs; ``first_negative_order`` is
    the smallest classified ``N`` whose determinant falls below the scaled
    negativity threshold (``None`` when the hierarchy stays nonnegative).
    The scalar witnesses are evaluated on the same moment source at the
    same quadrature angle.
    """

    kind: BasisKind
    phi: float
    determinants: tuple[tuple[int, float], ...]
    witnesses: Mapping[str, float]
    first_negative_order: Optional[int]
    tolerance: float

    @property
    def nonclassical(self) -> bool:
        return self.first_negative_order is not None


def determinant_hierarchy(
    source: MomentSource,
    kind: Union[BasisKind, str],
    n_max: int,
    phi: float = 0.0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> CriterionReport:
    """Evaluate the determinant hierarchy ``d_N`` up to order ``n_max``.

    The negativity threshold is ``tolerance`` scaled by the largest matrix
    entry (floored at 1), so determinants of bright states are not
    misclassified on roundoff.  The ``aa`` hierarchy starts reporting at
    ``N = 2`` but classifying at ``N = 3`` because its ``2 x 2`` determinant
    is nonnegative for all states.
    """
    kind = BasisKind(kind)
    report_start = _REPORT_START[kind]
    if n_max < report_start:
        raise ValidationError(
            f"n_max={n_max} is below the first reportable order "
            f"{report_start} of kind {kind.value!r}"
        )
    if tolerance <= 0.0:
        raise ValidationError("tolerance must be positive")
    if kind is BasisKind.XN_WEIGHTED:
        basis = MonomialBasis.number_chain(n_max)
    else:
        basis = MonomialBasis.graded(kind, n_max)
    needed = max(basis.required_order(), _WITNESS_ORDER)
    table = resolve_table(source, needed)
    if kind is BasisKind.XN_WEIGHTED:
        matrix = build_matrix_d2(table, phi=phi, basis=basis)
    else:
        matrix = build_matrix(table, basis, phi=phi)
    scale = float(np.max(np.abs(matrix.values)))
    tol_eff = tolerance * max(1.0, scale)

    determinants = []
    first_negative: Optional[int] = None
    for n in range(report_start, n_max + 1):
        value = matrix.leading_determinant(n)
        determinants.append((n, value))
        if (
            first_negative is None
            and n >= _CLASSIFY_START[kind]
            and value < -tol_eff
        ):
            first_negative = n

    amin, amax = asq_min_max(table)
    s2a, s2b = s2_witnesses(table, phi)
    witnesses = {
        "s3": s3(table),
        "s2A": s2a,
        "s2B": s2b,
        "asq_min": amin,
        "asq_max": amax,
    }
    return CriterionReport(
        kind=kind,
        phi=phi,
        determinants=tuple(determinants),
        witnesses=witnesses,
        first_negative_order=first_negative,
        tolerance=tolerance,
    )


# -- Bochner determinants --------------------------------------------------


def bochner_det(
    state: State,
    betas: Sequence[complex],
    cache: Optional[dict[complex, complex]] = None,
) -> float:
    """Determinant of ``[Phi(beta_i - beta_j)]`` over the given points.

    ``Phi`` is the normally ordered characteristic function; for classical
    states it is positive-definite in the Bochner sense, so every such
    determinant is nonnegative.  Points must be pairwise distinct.
    """
    pts = [complex(b) for b in betas]
    k = len(pts)
    if k < 1:
        raise ValidationError("need at least one point")
    for i in range(k):
        for j in range(i + 1, k):
            if abs(pts[i] - pts[j]) < 1e-12:
                raise DuplicatePointError(
                    f"points {i} and {j} coincide at {pts[i]!r}"
                )
    if cache is None:
        cache = {}
    mat = np.zeros((k, k), dtype=complex)
    for i in range(k):
        mat[i, i] = 1.0
        for j in range(i + 1, k):
            diff = pts[i] - pts[j]
            val = cache.get(diff)
            if val is None:
                mirrored = cache.get(-diff)
                # Phi(-beta) = conj(Phi(beta)) saves half the evaluations.
                val = (
                    np.conj(mirrored)
                    if mirrored is not None
                    else char_function(state, diff)
                )
                cache[diff] = val
            mat[i, j] = val
            mat[j, i] = np.conj(val)
    return as_real(complex(np.linalg.det(mat)), "Bochner determinant")


@dataclass(frozen=True)
class BochnerResult:
    """Most negative Bochner determinant found and the points achieving it."""

    value: float
    points: tuple[complex, ...]
    evaluations: int


def bochner_search(
    state: State,
    k: int = 2,
    radius: float = 2.0,
    grid_n: int = 9,
    seed: int = 0,
    refine_iters: int = 120,
) -> BochnerResult:
    """Minimize the order-``k`` Bochner determinant over displacement points.

    The first point is pinned at the origin (determinants are invariant
    under a common shift).  A square lattice of side ``grid_n`` inside
    ``|beta| <= radius`` seeds the search — exhaustively for ``k <= 3``,
    by seeded random tuples beyond — followed by a Gaussian refinement
    walk with a shrinking step, rejecting moves that leave the disc.
    All characteristic-function values are cached per distinct argument.
    """
    if k < 2:
        raise ValidationError("Bochner search needs at least two points")
    if radius <= 0.0 or grid_n < 2:
        raise ValidationError("radius must be positive and grid_n at least 2")
    cache: dict[complex, complex] = {}
    axis = np.linspace(-radius, radius, grid_n)
    lattice = [
        complex(re, im)
        for re in axis
        for im in axis
        if 0.0 < abs(complex(re, im)) <= radius
    ]

    def det_of(points: list[complex]) -> float:
        return bochner_det(state, points, cache=cache)

    best_points: list[complex] = []
    best_value = math.inf
    if k == 2:
        for b in lattice:
            value = det_of([0.0 + 0.0j, b])
            if value < best_value:
                best_value, best_points = value, [0.0 + 0.0j, b]
    elif k == 3:
        for i, b2 in enumerate(lattice):
            for b3 in lattice[i + 1 :]:
                value = det_of([0.0 + 0.0j, b2, b3])
                if value < best_value:
                    best_value, best_points = value, [0.0 + 0.0j, b2, b3]
    else:
        rng_seed = np.random.default_rng(seed)
        draws = max(200, 20 * len(lattice) // k)
        for _ in range(draws):
            picks = rng_seed.choice(len(lattice), size=k - 1, replace=False)
            points = [0.0 + 0.0j] + [lattice[int(p)] for p in picks]
            try:
                value = det_of(points)
            except DuplicatePointError:
                continue
            if value < best_value:
                best_value, best_points = value, points

    rng = np.random.default_rng(seed + 1)
    step = 0.25 * radius
    for it in range(refine_iters):
        scale = step * 0.97**it
        proposal = [0.0 + 0.0j]
        for b in best_points[1:]:
            proposal.append(
                b + scale * complex(rng.standard_normal(), rng.standard_normal())
            )
        if any(abs(b) > radius for b in proposal):
            continue
        try:
            value = det_of(proposal)
        except DuplicatePointError:
            continue
        if value < best_value:
            best_value, best_points = value, proposal
    return BochnerResult(
        value=best_value,
        points=tuple(best_points),
        evaluations=len(cache),
    )
