"""Determinant hierarchies, scalar witnesses and Bochner determinants.

Key oracles:
  * a symbolic fake moment table that makes every index of the matrix
    builder visible in the entry values,
  * coherent states, whose normally ordered moment matrices factorize into
    rank-one outer products of classical monomial vectors,
  * closed forms for thermal and squeezed-vacuum witnesses.
"""

import math

import numpy as np
import pytest

from helpers import random_pure_state
from nclmoments import (
    BasisKind,
    BochnerResult,
    DuplicatePointError,
    InsufficientOrderError,
    MomentTable,
    MonomialBasis,
    ValidationError,
    apply_squeeze,
    asq_min_max,
    asq_variance,
    bochner_det,
    bochner_search,
    build_matrix,
    build_matrix_d2,
    determinant_hierarchy,
    graded_pairs,
    make_coherent,
    make_fock,
    make_thermal,
    moment_table,
    principal_minor,
    s2_witnesses,
    s3,
)
from nclmoments.criteria import MomentMatrix


def symbolic_table(max_order: int) -> MomentTable:
    """Fake table whose entries encode their own indices.

    entry(k, l) = 7 (min+1) + 13 (max+1) + 3i (k - l), except entry(0, 0) = 1
    to satisfy the unit-trace check.  Conjugate-symmetric by construction,
    so any index transposition in a matrix builder changes the result.
    """
    n = max_order + 1
    vals = np.zeros((n, n), dtype=complex)
    for k in range(n):
        for l in range(n):
            lo, hi = min(k, l), max(k, l)
            vals[k, l] = 7.0 * (lo + 1) + 13.0 * (hi + 1) + 3j * (k - l)
    vals[0, 0] = 1.0
    return MomentTable(max_order, vals)


def fake_entry(k: int, l: int) -> complex:
    if k == 0 and l == 0:
        return 1.0 + 0.0j
    return 7.0 * (min(k, l) + 1) + 13.0 * (max(k, l) + 1) + 3j * (k - l)


# ---------------------------------------------------------------------------
# bases and index maps


def test_graded_pairs_order():
    assert graded_pairs(10) == (
        (0, 0),
        (0, 1),
        (1, 0),
        (0, 2),
        (1, 1),
        (2, 0),
        (0, 3),
        (1, 2),
        (2, 1),
        (3, 0),
    )
    with pytest.raises(ValidationError):
        graded_pairs(0)


def test_basis_validation_and_required_order():
    assert MonomialBasis.graded(BasisKind.AA, 6).required_order() == 4
    assert MonomialBasis.graded("quad", 3).required_order() == 2
    assert MonomialBasis.number_chain(3).required_order() == 6
    with pytest.raises(ValidationError):
        MonomialBasis(BasisKind.AA, ((0, 0), (0, 0)))
    with pytest.raises(ValidationError):
        MonomialBasis(BasisKind.AA, ((0, -1),))


def test_aa_matrix_index_map_via_symbolic_table():
    """Pin the exact index arithmetic of the 6x6 aa moment matrix.

    Basis order 1, a, a^dag, a^2, a^dag a, a^dag^2 as exponent pairs
    (p, q) = (creation, annihilation); entry must be
    <a^dag^{q_i + p_j} a^{p_i + q_j}>.
    """
    table = symbolic_table(4)
    basis = MonomialBasis.graded(BasisKind.AA, 6)
    matrix = build_matrix(table, basis)
    pairs = basis.pairs
    for i, (pi, qi) in enumerate(pairs):
        for j, (pj, qj) in enumerate(pairs):
            assert matrix.values[i, j] == fake_entry(qi + pj, pi + qj), (i, j)


def test_aa_matrix_row_pattern_explicit():
    """Spell the six rows out long-hand as a second, independent statement."""
    table = symbolic_table(4)
    matrix = build_matrix(table, MonomialBasis.graded(BasisKind.AA, 6))
    pairs = ((0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0))
    rows = [
        [fake_entry(pj, qj) for pj, qj in pairs],
        [fake_entry(1 + pj, qj) for pj, qj in pairs],
        [fake_entry(pj, 1 + qj) for pj, qj in pairs],
        [fake_entry(2 + pj, qj) for pj, qj in pairs],
        [fake_entry(1 + pj, 1 + qj) for pj, qj in pairs],
        [fake_entry(pj, 2 + qj) for pj, qj in pairs],
    ]
    assert np.array_equal(matrix.values, np.array(rows))


def test_coherent_matrices_are_rank_one():
    """All four kinds factorize on a coherent state.

    Normally ordered expectations of |alpha> are the classical monomials,
    so M = conj(w) w^T with w the monomial vector — the strongest easy
    statement of entry-level correctness for quad/xn/d2 builders.
    """
    alpha = 0.6 - 0.3j
    phi = 0.35
    state = make_coherent(alpha, 64)
    table = moment_table(state, 8)
    x_c = 2.0 * (alpha * np.exp(-1j * phi)).real
    p_c = 2.0 * (alpha * np.exp(-1j * (phi + math.pi / 2))).real
    n_c = abs(alpha) ** 2

    aa = build_matrix(table, MonomialBasis.graded(BasisKind.AA, 6))
    w = np.array(
        [np.conj(alpha) ** p * alpha**q for p, q in aa.basis.pairs]
    )
    assert np.allclose(aa.values, np.outer(np.conj(w), w), atol=1e-10)

    quad = build_matrix(table, MonomialBasis.graded(BasisKind.QUAD, 6), phi)
    w = np.array([p_c**p * x_c**q for p, q in quad.basis.pairs])
    assert np.allclose(quad.values, np.outer(w, w), atol=1e-10)

    xn = build_matrix(table, MonomialBasis.graded(BasisKind.XN, 6), phi)
    w = np.array([n_c**p * x_c**q for p, q in xn.basis.pairs])
    assert np.allclose(xn.values, np.outer(w, w), atol=1e-10)

    d2 = build_matrix_d2(table, size=3, phi=phi)
    w = np.array([n_c**p * x_c**q for p, q in d2.basis.pairs])
    weight = 4.0 * n_c - x_c**2
    assert np.allclose(d2.values, weight * np.outer(w, w), atol=1e-9)


def test_build_matrix_kind_routing():
    table = symbolic_table(4)
    with pytest.raises(ValidationError):
        build_matrix(table, MonomialBasis.number_chain(2))
    with pytest.raises(ValidationError):
        build_matrix_d2(table, basis=MonomialBasis.graded(BasisKind.XN, 2))
    with pytest.raises(ValidationError):
        build_matrix_d2(table, size=0)


def test_build_matrix_insufficient_order():
    state = make_coherent(0.3, 32)
    small = moment_table(state, 2)
    with pytest.raises(InsufficientOrderError):
        build_matrix(small, MonomialBasis.graded(BasisKind.AA, 6))


def test_moment_matrix_rejects_non_hermitian():
    basis = MonomialBasis.graded(BasisKind.AA, 2)
    with pytest.raises(ValidationError):
        MomentMatrix(basis, 0.0, np.array([[1.0, 1j], [1j, 1.0]]))


# ---------------------------------------------------------------------------
# witnesses


def test_s3_thermal_closed_form():
    # diag(1, 2 nbar^2, 2 nbar^2) at nbar = 1 -> determinant 4
    state = make_thermal(1.0, 128)
    assert s3(state) == pytest.approx(4.0, rel=1e-8)


def test_s3_coherent_vanishes():
    assert abs(s3(make_coherent(0.8 + 0.2j, 64))) < 1e-10


def test_s2_witnesses_closed_forms():
    # coherent: both vanish identically; thermal: 8 nbar^3 and 4 nbar^2
    for phi in (0.0, 0.7):
        s2a, s2b = s2_witnesses(make_coherent(0.5 - 0.4j, 64), phi)
        assert abs(s2a) < 1e-10 and abs(s2b) < 1e-10
    nbar = 0.5
    s2a, s2b = s2_witnesses(make_thermal(nbar, 96), 0.3)
    assert s2a == pytest.approx(8 * nbar**3, rel=1e-8)
    assert s2b == pytest.approx(4 * nbar**2, rel=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_s3_equals_quarter_product_of_asq_extrema(seed):
    state = random_pure_state(32, seed + 40)
    amin, amax = asq_min_max(state)
    assert s3(state) == pytest.approx(0.25 * amin * amax, rel=1e-9)


def test_asq_variance_angle_sweep_respects_extrema():
    state = random_pure_state(32, 77)
    amin, amax = asq_min_max(state)
    sweep = [asq_variance(state, phi) for phi in np.linspace(0, math.pi, 64)]
    assert min(sweep) >= amin - 1e-12
    assert max(sweep) <= amax + 1e-12
    # the scan brackets the true extrema tightly at this resolution
    assert min(sweep) == pytest.approx(amin, abs=1e-2 * (1 + abs(amin)))


def test_squeezed_vacuum_quadrature_determinant_value():
    state = apply_squeeze(make_fock(0, 64), 0.5)
    report = determinant_hierarchy(state, "quad", 2)
    n, value = report.determinants[0]
    assert n == 2
    assert value == pytest.approx(math.exp(-1.0) - 1.0, abs=1e-10)
    assert report.first_negative_order == 2


def test_principal_minor_fock_number_direction():
    state = make_fock(1, 16)
    matrix = build_matrix(
        moment_table(state, 4), MonomialBasis.graded(BasisKind.AA, 6)
    )
    # {1, a^dag a} minor: <:n^2:> - <n>^2 = -n for a Fock state
    assert principal_minor(matrix, [0, 4]) == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(ValidationError):
        principal_minor(matrix, [])
    with pytest.raises(ValidationError):
        principal_minor(matrix, [0, 0])
    with pytest.raises(ValidationError):
        principal_minor(matrix, [0, 6])


# ---------------------------------------------------------------------------
# hierarchy reports


def test_hierarchy_thermal_all_kinds_stay_classical():
    state = make_thermal(0.8, 96)
    for kind in ("aa", "quad", "xn", "d2"):
        report = determinant_hierarchy(state, kind, 3)
        assert report.first_negative_order is None
        assert not report.nonclassical


def test_hierarchy_aa_reports_but_never_classifies_order_two():
    state = make_thermal(0.6, 96)
    report = determinant_hierarchy(state, "aa", 3)
    orders = [n for n, _ in report.determinants]
    assert orders == [2, 3]
    # d_2 = <n> - |<a>|^2, a variance that is nonnegative for every state
    assert report.determinants[0][1] == pytest.approx(0.6, rel=1e-9)


def test_hierarchy_validates_inputs():
    state = make_thermal(0.5, 64)
    with pytest.raises(ValidationError):
        determinant_hierarchy(state, "aa", 1)
    with pytest.raises(ValidationError):
        determinant_hierarchy(state, "quad", 2, tolerance=0.0)
    with pytest.raises(ValueError):
        determinant_hierarchy(state, "bogus", 2)


def test_hierarchy_report_carries_witnesses():
    state = apply_squeeze(make_fock(0, 64), 0.5)
    report = determinant_hierarchy(state, "quad", 3, phi=0.0)
    assert set(report.witnesses) == {"s3", "s2A", "s2B", "asq_min", "asq_max"}
    assert report.witnesses["asq_min"] <= report.witnesses["asq_max"]


def test_fock_state_number_hierarchy_flags():
    """Leading aa determinants flag |2> at N = 5; |1> needs the minor.

    For |1> the a^2 row of the moment matrix vanishes, so every leading
    determinant from N = 4 on is exactly zero even though the {1, a^dag a}
    principal minor is -1 — the leading hierarchy alone is not exhaustive.
    """
    one = determinant_hierarchy(make_fock(1, 32), "aa", 5)
    assert not one.nonclassical
    assert dict(one.determinants) == pytest.approx(
        {2: 1.0, 3: 1.0, 4: 0.0, 5: 0.0}, abs=1e-12
    )
    two = determinant_hierarchy(make_fock(2, 32), "aa", 5)
    assert two.nonclassical
    assert two.first_negative_order == 5
    assert dict(two.determinants)[5] == pytest.approx(-16.0, rel=1e-9)


# ---------------------------------------------------------------------------
# Bochner


def test_bochner_rejects_duplicates():
    state = make_fock(0, 8)
    with pytest.raises(DuplicatePointError):
        bochner_det(state, [0.0, 1e-13])


def test_bochner_fock_one_laguerre_sign():
    state = make_fock(1, 32)
    # Phi(beta) = 1 - |beta|^2; order-2 determinant 1 - (1 - |b|^2)^2
    for b in (0.5, 1.6, 2.0):
        want = 1.0 - (1.0 - b * b) ** 2
        assert bochner_det(state, [0.0, b]) == pytest.approx(want, abs=1e-9)
    assert bochner_det(state, [0.0, 1.8]) < -1.0


def test_bochner_thermal_nonnegative():
    state = make_thermal(1.0, 96)
    rng = np.random.default_rng(1)
    for _ in range(5):
        pts = rng.normal(size=3) + 1j * rng.normal(size=3)
        assert bochner_det(state, list(pts)) >= -1e-10


def test_bochner_cache_shares_mirror_values():
    state = make_fock(0, 16)
    cache = {}
    bochner_det(state, [0.0, 0.7, -0.4j], cache=cache)
    evals = len(cache)
    # re-running with the same cache adds nothing
    bochner_det(state, [0.0, 0.7, -0.4j], cache=cache)
    assert len(cache) == evals


def test_bochner_search_squeezed_vacuum_finds_violation():
    state = apply_squeeze(make_fock(0, 64), 0.5)
    result = bochner_search(state, k=2, radius=2.0, grid_n=9)
    assert isinstance(result, BochnerResult)
    assert result.value < -1.0
    assert result.points[0] == 0.0
    assert len(result.points) == 2
    assert result.evaluations > 0


def test_bochner_search_classical_states_stay_nonnegative():
    coherent = make_coherent(0.7, 48)
    assert bochner_search(coherent, k=2, radius=1.5, grid_n=5).value >= -1e-9
    assert bochner_search(coherent, k=3, radius=1.5, grid_n=5).value >= -1e-9
    vacuum = make_fock(0, 16)
    assert bochner_search(vacuum, k=4, radius=1.0, grid_n=4).value >= -1e-9


def test_bochner_search_validates():
    state = make_fock(0, 8)
    with pytest.raises(ValidationError):
        bochner_search(state, k=1)
    with pytest.raises(ValidationError):
        bochner_search(state, radius=-1.0)
