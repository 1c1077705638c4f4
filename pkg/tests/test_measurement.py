"""Measurement simulation and inversion: exact round trips and noise."""

import math
import warnings

import numpy as np
import pytest

from helpers import random_pure_state
from nclmoments import (
    DetectionRecord,
    FourierRecord,
    LOConfig,
    SingularInversionError,
    ValidationError,
    WeakOscillatorWarning,
    add_shot_noise,
    make_thermal,
    moment_aa,
    moment_table,
    quad_moment,
    scheme_a_forward,
    scheme_a_invert,
    scheme_a_phases,
    scheme_a_sample_and_fourier,
    scheme_b_extract,
    scheme_b_forward,
    scheme_c_extract,
    scheme_c_forward,
    xn_moment,
)
from nclmoments.operators import destroy


# ---------------------------------------------------------------------------
# configuration objects


def test_lo_config_default_reflectance():
    lo = LOConfig(alpha=2.0)
    assert lo.t0 == pytest.approx(math.sqrt(0.5))
    assert lo.r0 == pytest.approx(-1j * math.sqrt(0.5))
    blocked = lo.blocked()
    assert blocked.alpha == 0.0
    assert blocked.t0 == lo.t0 and blocked.r0 == lo.r0


def test_lo_config_validation():
    with pytest.raises(ValidationError):
        LOConfig(alpha=1.0, t0=0.0)
    with pytest.raises(ValidationError):
        LOConfig(alpha=1.0, t0=1.0)
    with pytest.raises(ValidationError):
        LOConfig(alpha=1.0, t0=0.6, r0=0.9)  # 0.36 + 0.81 != 1


def test_detection_record_validation():
    lo = LOConfig(alpha=1.0)
    gammas = {k: 0.0 for k in
              ("g1", "g2", "g3", "g4", "g12", "g13", "g14", "g23", "g24", "g34")}
    DetectionRecord(scheme="b", lo=lo, gammas=gammas)
    with pytest.raises(ValidationError):
        DetectionRecord(scheme="a", lo=lo, gammas=gammas)
    with pytest.raises(ValidationError):
        DetectionRecord(scheme="b", lo=lo, gammas={"g1": 0.0})


def test_fourier_record_detector_count_bound():
    state = random_pure_state(24, 0)
    with pytest.raises(ValidationError):
        scheme_a_sample_and_fourier(state, n_max=5, lo=LOConfig(3.0), depth=2)
    record = scheme_a_sample_and_fourier(state, n_max=4, lo=LOConfig(3.0), depth=2)
    assert record.n_max == 4
    with pytest.raises(ValidationError):
        FourierRecord(
            depth=2, lo=LOConfig(3.0), n_max=1,
            samples={(1, 0): 1.0},  # needs 2n+2 = 4 phases
            coefficients={(1, m): 0.0 for m in (-1, 0, 1)},
        )


def test_fourier_coefficients_conjugate_symmetric():
    state = random_pure_state(24, 1)
    record = scheme_a_sample_and_fourier(state, 3, LOConfig(2.0 + 1.0j), 2)
    for n in range(1, 4):
        for m in range(n + 1):
            assert record.coefficients[(n, -m)] == pytest.approx(
                np.conj(record.coefficients[(n, m)])
            )


# ---------------------------------------------------------------------------
# scheme A


def test_scheme_a_forward_validation():
    state = random_pure_state(16, 2)
    with pytest.raises(ValidationError):
        scheme_a_forward(state, 0, 0.0, LOConfig(1.0), 1)
    with pytest.raises(ValidationError):
        scheme_a_forward(state, 3, 0.0, LOConfig(1.0), 1)


@pytest.mark.parametrize("seed", range(3))
def test_scheme_a_forward_matches_operator_route(seed):
    """F_n from the moment expansion vs the single-detector-mode operator.

    Every detector sees M = (t0 a + r0 alpha e^{i phi}) / sqrt(2^d),
    so the n-fold coincidence sum is C(2^d, n) ||M^n psi||^2.
    """
    state = random_pure_state(24, seed + 10)
    dim = state.dim
    lo = LOConfig(alpha=1.5 - 0.5j, t0=0.75)
    depth = 2
    a = destroy(dim)
    for n in (1, 2, 3):
        for phi in (0.0, 0.9, 2.4):
            mode = (lo.t0 * a + lo.r0 * lo.alpha * np.exp(1j * phi) * np.eye(dim)) / (
                2.0 ** (depth / 2.0)
            )
            vec = state.amplitudes.copy()
            for _ in range(n):
                vec = mode @ vec
            want = math.comb(2**depth, n) * float(np.vdot(vec, vec).real)
            got = scheme_a_forward(state, n, phi, lo, depth)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("seed", [0, 7, 23])
def test_scheme_a_round_trip_exact(seed):
    state = random_pure_state(32, seed)
    lo = LOConfig(alpha=3.0)
    record = scheme_a_sample_and_fourier(state, 4, lo, depth=2)
    table = scheme_a_invert(record)
    truth = moment_table(state, 4)
    for k in range(5):
        for l in range(5):
            want = truth.entry(k, l)
            assert abs(table.entry(k, l) - want) < 1e-10 * (1.0 + abs(want))


def test_scheme_a_corner_coefficients_isolate_extreme_moments():
    """The m = +-n harmonics carry <a^dag^n> / <a^n> alone."""
    state = random_pure_state(32, 5)
    lo = LOConfig(alpha=2.5 + 1.0j)
    depth = 2
    record = scheme_a_sample_and_fourier(state, 4, lo, depth)
    amp = abs(lo.r0 * lo.alpha)
    for n in range(1, 5):
        pref = math.comb(2**depth, n) / 2.0 ** (n * depth)
        denom = pref * lo.t0**n * amp**n
        dag = record.coefficients[(n, n)] / denom
        ann = record.coefficients[(n, -n)] / denom
        assert abs(dag - moment_aa(state, n, 0)) < 1e-10
        assert abs(ann - moment_aa(state, 0, n)) < 1e-10


def test_scheme_a_invert_blocked_and_weak_oscillator():
    state = random_pure_state(16, 3)
    blocked = scheme_a_sample_and_fourier(state, 2, LOConfig(3.0).blocked(), 1)
    with pytest.raises(SingularInversionError):
        scheme_a_invert(blocked)
    weak = scheme_a_sample_and_fourier(state, 2, LOConfig(0.3), 1)
    with pytest.warns(WeakOscillatorWarning):
        table = scheme_a_invert(weak)
    # weak, but still exact without noise
    assert abs(table.entry(1, 1) - moment_aa(state, 1, 1)) < 1e-9


def test_scheme_a_phases_layout():
    phases = scheme_a_phases(2)
    assert len(phases) == 6
    assert phases[0] == 0.0
    assert phases[-1] == pytest.approx(2 * math.pi * 5 / 6)


# ---------------------------------------------------------------------------
# scheme B


@pytest.mark.parametrize("seed", range(4))
def test_scheme_b_round_trip(seed):
    state = random_pure_state(32, seed + 50)
    lo = LOConfig(alpha=2.0 * np.exp(0.4j))
    out = scheme_b_extract(scheme_b_forward(state, lo))
    theta = out["theta"]
    assert theta == pytest.approx(0.4)
    want = {
        "n": moment_aa(state, 1, 1).real,
        "x": quad_moment(state, 1, 0, theta),
        "p": quad_moment(state, 0, 1, theta),
        "xx": quad_moment(state, 2, 0, theta),
        "pp": quad_moment(state, 0, 2, theta),
        "xp": quad_moment(state, 1, 1, theta),
    }
    for key, value in want.items():
        assert out[key] == pytest.approx(value, abs=1e-10), key


def test_scheme_b_round_trip_density_state():
    nbar = 0.8
    state = make_thermal(nbar, 96)
    out = scheme_b_extract(scheme_b_forward(state, LOConfig(alpha=1.5)))
    assert out["n"] == pytest.approx(nbar, rel=1e-9)
    assert out["x"] == pytest.approx(0.0, abs=1e-10)
    assert out["xx"] == pytest.approx(2 * nbar, rel=1e-9)
    assert out["xp"] == pytest.approx(0.0, abs=1e-9)


def test_scheme_b_extract_validation():
    state = random_pure_state(16, 9)
    with pytest.raises(SingularInversionError):
        scheme_b_extract(scheme_b_forward(state, LOConfig(alpha=0.0)))
    with pytest.warns(WeakOscillatorWarning):
        scheme_b_extract(scheme_b_forward(state, LOConfig(alpha=0.2)))
    record = scheme_c_forward(state, LOConfig(alpha=2.0))
    with pytest.raises(ValidationError):
        scheme_b_extract(record)


# ---------------------------------------------------------------------------
# scheme C


@pytest.mark.parametrize("seed", range(4))
def test_scheme_c_round_trip(seed):
    state = random_pure_state(32, seed + 80)
    lo = LOConfig(alpha=2.0 + 1.0j, t0=0.8)
    out = scheme_c_extract(
        scheme_c_forward(state, lo), scheme_c_forward(state, lo.blocked())
    )
    theta = out["theta"]
    want = {
        "n": moment_aa(state, 1, 1).real,
        "x": xn_moment(state, 1, 0, theta),
        "nn": xn_moment(state, 0, 2, theta),
        "nx": xn_moment(state, 1, 1, theta),
        "xx": xn_moment(state, 2, 0, theta),
    }
    for key, value in want.items():
        assert out[key] == pytest.approx(value, abs=1e-10), key


def test_scheme_c_balanced_splitter_round_trip():
    state = random_pure_state(24, 99)
    lo = LOConfig(alpha=3.0)
    out = scheme_c_extract(
        scheme_c_forward(state, lo), scheme_c_forward(state, lo.blocked())
    )
    assert out["nn"] == pytest.approx(
        xn_moment(state, 0, 2), abs=1e-10
    )


def test_scheme_c_extract_validation():
    state = random_pure_state(16, 4)
    lo = LOConfig(alpha=2.0, t0=0.8)
    main = scheme_c_forward(state, lo)
    with pytest.raises(ValidationError):
        scheme_c_extract(main, main)  # blocked record must have alpha = 0
    other = scheme_c_forward(state, LOConfig(alpha=0.0, t0=0.6))
    with pytest.raises(ValidationError):
        scheme_c_extract(main, other)  # different splitters
    blocked_main = scheme_c_forward(state, lo.blocked())
    with pytest.raises(SingularInversionError):
        scheme_c_extract(blocked_main, blocked_main)
    weak = scheme_c_forward(state, LOConfig(alpha=0.3, t0=0.8))
    with pytest.warns(WeakOscillatorWarning):
        scheme_c_extract(weak, scheme_c_forward(state, lo.blocked()))


# ---------------------------------------------------------------------------
# shot noise


def test_add_shot_noise_validates_and_dispatches():
    state = random_pure_state(16, 6)
    record = scheme_b_forward(state, LOConfig(alpha=1.5))
    with pytest.raises(ValidationError):
        add_shot_noise(record, 0)
    with pytest.raises(ValidationError):
        add_shot_noise("not a record", 100)


def test_add_shot_noise_deterministic_and_seed_sensitive():
    state = random_pure_state(16, 7)
    record = scheme_b_forward(state, LOConfig(alpha=1.5))
    first = add_shot_noise(record, 1e6, seed=42)
    second = add_shot_noise(record, 1e6, seed=42)
    third = add_shot_noise(record, 1e6, seed=43)
    assert first.gammas == second.gammas
    assert first.gammas != third.gammas


def test_add_shot_noise_relative_scale():
    state = random_pure_state(16, 8)
    record = scheme_b_forward(state, LOConfig(alpha=1.5))
    for samples in (1e4, 1e8):
        noisy = add_shot_noise(record, samples, seed=0)
        rels = [
            abs(noisy.gammas[k] - v) / max(abs(v), 1e-6)
            for k, v in record.gammas.items()
        ]
        assert max(rels) < 5.0 / math.sqrt(samples)
        assert max(rels) > 0.01 / math.sqrt(samples)


def test_add_shot_noise_fourier_recomputes_coefficients():
    state = random_pure_state(16, 9)
    clean = scheme_a_sample_and_fourier(state, 2, LOConfig(3.0), 1)
    noisy = add_shot_noise(clean, 1e4, seed=5)
    assert noisy.samples != clean.samples
    assert noisy.coefficients[(2, 1)] != clean.coefficients[(2, 1)]
    # noisy record still inverts, with errors at the noise scale
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        table = scheme_a_invert(noisy)
    want = moment_aa(state, 1, 1)
    assert abs(table.entry(1, 1) - want) < 0.3
