"""Homodyne-correlation measurement models and their inversion.

Three detector layouts are simulated at the level of normally ordered
intensity correlations, which is exact for ideal photodetectors:

* **Scheme A** — the signal interferes with a local oscillator on a
  beam splitter (transmittance ``t0`` real, reflectance ``-i |r0|``) and
  the mixed beam is split by a balanced tree of depth ``d`` onto ``2^d``
  detectors.  The sum of all ``n``-detector coincidences is a trigonometric
  polynomial of degree ``n`` in the oscillator phase whose Fourier
  coefficients are triangular combinations of the moments
  ``<a^dag^k a^l>`` — so scanning the phase and inverting recovers the
  moments order by order.
* **Scheme B** — an eight-port layout with four detectors seeing
  ``(a + i alpha)/2``, ``(a - i alpha)/2``, ``(a + alpha)/2`` and
  ``(a - alpha)/2``.  Mean counts and pairwise coincidences reproduce the
  first and second normally ordered moments of the quadratures
  ``x_theta``/``p_theta`` at ``theta = arg(alpha)``.
* **Scheme C** — intensity cross-correlation between the two outputs of a
  single unbalanced beam splitter fed by signal and oscillator.  Each
  output intensity mixes the photon number with the quadrature
  ``x_theta`` at ``theta = arg(conj(t0) r0 alpha)``; the mean counts,
  within-arm and cross-arm correlations, together with one
  oscillator-blocked run, recover ``<n>``, ``<x>``, ``<:n^2:>``,
  ``<:n x:>`` and ``<:x^2:>``.

``add_shot_noise`` perturbs any record by a seeded Gaussian of relative
size ``1/sqrt(samples)``, emulating finite counting statistics.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .errors import (
    SingularInversionError,
    ValidationError,
    WeakOscillatorWarning,
)
from .moments import (
    MomentSource,
    MomentTable,
    NormalPolynomial,
    as_real,
    resolve_table,
)

_WEAK_LO = 0.5
_NOISE_FLOOR = 1e-6

GAMMA_KEYS = ("g1", "g2", "g3", "g4", "g12", "g13", "g14", "g23", "g24", "g34")


@dataclass(frozen=True)
class LOConfig:
    """Local-oscillator amplitude and beam-splitter coefficients.

    ``alpha`` is the coherent oscillator amplitude (``0`` models a blocked
    oscillator).  The splitter transmits the signal with real ``t0`` and
    reflects the oscillator with ``r0``; by default ``r0 = -i sqrt(1-t0^2)``,
    the standard lossless choice.  Scheme B uses only ``alpha``.
    """

    alpha: complex
    t0: float = math.sqrt(0.5)
    r0: Optional[complex] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.t0 < 1.0:
            raise ValidationError("t0 must lie strictly between 0 and 1")
        r0 = self.r0
        if r0 is None:
            r0 = -1j * math.sqrt(1.0 - self.t0**2)
        r0 = complex(r0)
        if abs(self.t0**2 + abs(r0) ** 2 - 1.0) > 1e-12:
            raise ValidationError("beam splitter must be lossless: t0^2 + |r0|^2 = 1")
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "r0", r0)

    def blocked(self) -> LOConfig:
        """The same splitter with the oscillator turned off."""
        return LOConfig(alpha=0.0, t0=self.t0, r0=self.r0)


@dataclass(frozen=True)
class DetectionRecord:
    """Mean counts and coincidences of a four-detector run.

    ``gammas`` holds the four mean intensities ``g1..g4`` and the six
    pairwise normally ordered coincidences ``g12..g34``.
    """

    scheme: str
    lo: LOConfig
    gammas: Mapping[str, float]

    def __post_init__(self) -> None:
        if self.scheme not in ("b", "c"):
            raise ValidationError(f"unknown detection scheme {self.scheme!r}")
        missing = set(GAMMA_KEYS) - set(self.gammas)
        extra = set(self.gammas) - set(GAMMA_KEYS)
        if missing or extra:
            raise ValidationError(
                f"gamma keys mismatch: missing {sorted(missing)}, "
                f"unexpected {sorted(extra)}"
            )
        object.__setattr__(
            self, "gammas", {k: float(self.gammas[k]) for k in GAMMA_KEYS}
        )


@dataclass(frozen=True)
class FourierRecord:
    """Phase-scanned coincidence sums of scheme A and their Fourier data.

    ``samples[(n, j)]`` is the sum over all ``n``-detector subsets of the
    coincidence rate at oscillator phase ``2 pi j / (2n + 2)``;
    ``coefficients[(n, m)]`` are the discrete Fourier coefficients in the
    kernel ``exp(i m (phi + arg(alpha) - pi/2))``, exact because each scan
    uses more phases than the trigonometric degree of the signal.
    """

    depth: int
    lo: LOConfig
    n_max: int
    samples: Mapping[tuple[int, int], float]
    coefficients: Mapping[tuple[int, int], complex]

    def __post_init__(self) -> None:
        if self.depth < 0:
            raise ValidationError("tree depth must be nonnegative")
        if self.n_max < 1:
            raise ValidationError("n_max must be at least 1")
        if self.n_max > 2**self.depth:
            raise ValidationError(
                f"cannot correlate {self.n_max} detectors with a depth-"
                f"{self.depth} tree ({2 ** self.depth} detectors)"
            )
        expected = {
            (n, j) for n in range(1, self.n_max + 1) for j in range(2 * n + 2)
        }
        if set(self.samples) != expected:
            raise ValidationError("phase samples are incomplete for n_max")
        exp_coeff = {
            (n, m) for n in range(1, self.n_max + 1) for m in range(-n, n + 1)
        }
        if set(self.coefficients) != exp_coeff:
            raise ValidationError("Fourier coefficients are incomplete for n_max")
        object.__setattr__(
            self,
            "samples",
            {key: float(self.samples[key]) for key in sorted(self.samples)},
        )
        object.__setattr__(
            self,
            "coefficients",
            {
                key: complex(self.coefficients[key])
                for key in sorted(self.coefficients)
            },
        )

    @classmethod
    def from_samples(
        cls,
        depth: int,
        lo: LOConfig,
        n_max: int,
        samples: Mapping[tuple[int, int], float],
    ) -> FourierRecord:
        """Build the record, computing the Fourier coefficients by DFT."""
        offset = cmath.phase(lo.alpha * lo.r0)
        coefficients: dict[tuple[int, int], complex] = {}
        for n in range(1, n_max + 1):
            count = 2 * n + 2
            phases = scheme_a_phases(n)
            values = np.array([samples[(n, j)] for j in range(count)], dtype=float)
            kernel_arg = phases + offset
            for m in range(n + 1):
                coeff = complex(
                    np.sum(values * np.exp(-1j * m * kernel_arg)) / count
                )
                coefficients[(n, m)] = coeff
                # Real phase scans force conjugate-symmetric coefficients.
                coefficients[(n, -m)] = np.conj(coeff)
        return cls(
            depth=depth, lo=lo, n_max=n_max, samples=dict(samples),
            coefficients=coefficients,
        )


def scheme_a_phases(n: int) -> np.ndarray:
    """The ``2n + 2`` equispaced oscillator phases scanned for order ``n``."""
    count = 2 * n + 2
    return 2.0 * math.pi * np.arange(count) / count


def scheme_a_forward(
    source: MomentSource,
    n: int,
    phi_lo: float,
    lo: LOConfig,
    depth: int,
) -> float:
    """Sum of all ``n``-detector coincidences at oscillator phase ``phi_lo``.

    Each detector behind the depth-``d`` tree sees the mode
    ``(t0 a + r0 alpha e^{i phi_lo}) / sqrt(2^d)``; summing the normally
    ordered coincidence over the ``C(2^d, n)`` detector subsets gives

        F_n = C(2^d, n) / 2^{n d} * sum_{k,l<=n} C(n,k) C(n,l) t0^{k+l}
              |r0 alpha|^{2n-k-l} e^{i (k-l) psi} <a^dag^k a^l>,

    with ``psi = phi_lo + arg(alpha) - pi/2`` for the default reflectance
    phase.  The result is real.
    """
    if n < 1:
        raise ValidationError("correlation order n must be at least 1")
    if depth < 0 or n > 2**depth:
        raise ValidationError(
            f"cannot correlate {n} detectors with a depth-{depth} tree"
        )
    table = resolve_table(source, n)
    psi = phi_lo + cmath.phase(lo.alpha * lo.r0)
    amp = abs(lo.r0 * lo.alpha)
    pref = math.comb(2**depth, n) / 2.0 ** (n * depth)
    total = 0.0 + 0.0j
    for k in range(n + 1):
        for l in range(n + 1):
            weight = (
                math.comb(n, k)
                * math.comb(n, l)
                * lo.t0 ** (k + l)
                * amp ** (2 * n - k - l)
            )
            total += weight * np.exp(1j * (k - l) * psi) * table.entry(k, l)
    return pref * as_real(total, f"scheme A coincidence F_{n}")


def scheme_a_sample_and_fourier(
    source: MomentSource,
    n_max: int,
    lo: LOConfig,
    depth: int,
) -> FourierRecord:
    """Scan the oscillator phase for every order and Fourier-transform.

    For each ``n`` up to ``n_max`` the coincidence sum is evaluated at the
    ``2n + 2`` phases of :func:`scheme_a_phases` and the scan is reduced to
    its Fourier coefficients.
    """
    table = resolve_table(source, n_max)
    samples: dict[tuple[int, int], float] = {}
    for n in range(1, n_max + 1):
        for j, phi in enumerate(scheme_a_phases(n)):
            samples[(n, j)] = scheme_a_forward(table, n, float(phi), lo, depth)
    return FourierRecord.from_samples(depth, lo, n_max, samples)


def scheme_a_invert(record: FourierRecord) -> MomentTable:
    """Recover the moment table from a phase-scanned coincidence record.

    Working upward in ``n``, the Fourier coefficient at harmonic ``m >= 0``
    contains exactly one moment not yet known — ``<a^dag^n a^{n-m}>``, whose
    weight involves only binomials and powers of ``t0`` and ``|r0 alpha|`` —
    so each order is peeled off by subtracting the reconstructed lower-order
    contributions.  Positivity validation of the resulting table is relaxed
    because shot noise can push small diagonal moments slightly negative.
    """
    lo = record.lo
    amp = abs(lo.r0 * lo.alpha)
    if amp < 1e-12:
        raise SingularInversionError(
            "phase scans carry no moment information with a blocked oscillator"
        )
    if amp < _WEAK_LO:
        warnings.warn(
            f"|r0 alpha| = {amp:.3g} is small; inversion amplifies noise by "
            f"~{1.0 / max(amp, 1e-300):.3g} per harmonic",
            WeakOscillatorWarning,
            stacklevel=2,
        )
    size = record.n_max + 1
    vals = np.zeros((size, size), dtype=complex)
    vals[0, 0] = 1.0
    for n in range(1, record.n_max + 1):
        pref = math.comb(2**record.depth, n) / 2.0 ** (n * record.depth)
        for m in range(n, -1, -1):
            acc = record.coefficients[(n, m)] / pref
            for k in range(m, n):
                weight = (
                    math.comb(n, k)
                    * math.comb(n, k - m)
                    * lo.t0 ** (2 * k - m)
                    * amp ** (2 * n - 2 * k + m)
                )
                acc -= weight * vals[k, k - m]
            new_weight = math.comb(n, n - m) * lo.t0 ** (2 * n - m) * amp**m
            vals[n, n - m] = acc / new_weight
            vals[n - m, n] = np.conj(vals[n, n - m])
    return MomentTable(max_order=record.n_max, values=vals, validate=False)


# -- scheme B: eight-port layout -------------------------------------------


def _gamma_record(scheme: str, lo: LOConfig, modes: list[NormalPolynomial],
                  source: MomentSource, order: int) -> DetectionRecord:
    """Mean counts and pairwise coincidences of four intensity observables."""
    table = resolve_table(source, order)
    intensities = [m.adjoint() * m for m in modes]
    gammas: dict[str, float] = {}
    for i in range(4):
        gammas[f"g{i + 1}"] = as_real(
            intensities[i].expectation(table), f"mean count g{i + 1}"
        )
    for i in range(4):
        for j in range(i + 1, 4):
            gammas[f"g{i + 1}{j + 1}"] = as_real(
                (intensities[i] * intensities[j]).expectation(table),
                f"coincidence g{i + 1}{j + 1}",
            )
    return DetectionRecord(scheme=scheme, lo=lo, gammas=gammas)


def scheme_b_forward(source: MomentSource, lo: LOConfig) -> DetectionRecord:
    """Counts and coincidences of the eight-port (four-detector) layout."""
    a = NormalPolynomial.annihilation()
    alpha = lo.alpha
    modes = [
        0.5 * (a + NormalPolynomial.constant(1j * alpha)),
        0.5 * (a - NormalPolynomial.constant(1j * alpha)),
        0.5 * (a + NormalPolynomial.constant(alpha)),
        0.5 * (a - NormalPolynomial.constant(alpha)),
    ]
    return _gamma_record("b", lo, modes, source, order=2)


def scheme_b_extract(record: DetectionRecord) -> dict[str, float]:
    """Quadrature moments at ``theta = arg(alpha)`` from an eight-port record.

    Returns ``n``, the means ``x``/``p``, and the normally ordered second
    moments ``xx``/``pp``/``xp`` of ``x_theta`` and ``p_theta``.
    """
    if record.scheme != "b":
        raise ValidationError(f"expected a scheme-b record, got {record.scheme!r}")
    alpha = record.lo.alpha
    mag = abs(alpha)
    if mag < 1e-12:
        raise SingularInversionError(
            "quadratures cannot be extracted with a blocked oscillator"
        )
    if mag < _WEAK_LO:
        warnings.warn(
            f"|alpha| = {mag:.3g} is small; extracted quadratures amplify "
            "noise strongly",
            WeakOscillatorWarning,
            stacklevel=2,
        )
    g = record.gammas
    n = g["g1"] + g["g2"] + g["g3"] + g["g4"] - mag**2
    x = 2.0 * (g["g3"] - g["g4"]) / mag
    p = 2.0 * (g["g1"] - g["g2"]) / mag
    xx = 8.0 * (g["g12"] - g["g34"]) / mag**2 + 2.0 * n
    pp = 8.0 * (g["g34"] - g["g12"]) / mag**2 + 2.0 * n
    xp = 8.0 * (g["g13"] + g["g24"] - g["g12"] - g["g34"]) / mag**2 - 2.0 * n
    return {
        "n": n, "x": x, "p": p, "xx": xx, "pp": pp, "xp": xp,
        "theta": cmath.phase(alpha),
    }


# -- scheme C: cross-correlation of one splitter ---------------------------


def _scheme_c_intensities(lo: LOConfig) -> tuple[NormalPolynomial, NormalPolynomial]:
    """The two output intensities of the unbalanced splitter.

    Output 1 carries ``t0^2 n + |G| x_theta + |r0 alpha|^2`` and output 2
    the complementary combination, where ``G = conj(t0) r0 alpha``.
    """
    t_sq = lo.t0**2
    r_sq = abs(lo.r0) ** 2
    g = np.conj(lo.t0) * lo.r0 * lo.alpha
    number = NormalPolynomial.number()
    cross = NormalPolynomial({(1, 0): g, (0, 1): np.conj(g)})
    q1 = (
        t_sq * number
        + cross
        + NormalPolynomial.constant(r_sq * abs(lo.alpha) ** 2)
    )
    q2 = (
        r_sq * number
        + (-1.0) * cross
        + NormalPolynomial.constant(t_sq * abs(lo.alpha) ** 2)
    )
    return q1, q2


def scheme_c_forward(source: MomentSource, lo: LOConfig) -> DetectionRecord:
    """Counts and coincidences of the two-output cross-correlation layout.

    Each splitter output is further halved onto two detectors, so detectors
    1/2 share the first output intensity and 3/4 the second; all pairwise
    coincidences are normally ordered products of the two intensities.
    """
    table = resolve_table(source, 2)
    q1, q2 = _scheme_c_intensities(lo)
    half = 0.5
    quarter = 0.25
    g1 = half * as_real(q1.expectation(table), "scheme C mean count")
    g3 = half * as_real(q2.expectation(table), "scheme C mean count")
    q11 = quarter * as_real((q1 * q1).expectation(table), "scheme C coincidence")
    q22 = quarter * as_real((q2 * q2).expectation(table), "scheme C coincidence")
    q12 = quarter * as_real((q1 * q2).expectation(table), "scheme C coincidence")
    gammas = {
        "g1": g1, "g2": g1, "g3": g3, "g4": g3,
        "g12": q11, "g34": q22,
        "g13": q12, "g14": q12, "g23": q12, "g24": q12,
    }
    return DetectionRecord(scheme="c", lo=lo, gammas=gammas)


def scheme_c_extract(
    record: DetectionRecord,
    blocked: DetectionRecord,
) -> dict[str, float]:
    """Photon-number and quadrature moments from a cross-correlation pair.

    ``record`` is a run with the oscillator on, ``blocked`` the same
    splitter with the oscillator off.  The blocked coincidences depend only
    on ``<:n^2:>``; with that in hand the phase-bearing differences of the
    main run yield ``<x_theta>``, ``<:n x_theta:>`` and ``<:x_theta^2:>``
    at ``theta = arg(conj(t0) r0 alpha)``.
    """
    if record.scheme != "c" or blocked.scheme != "c":
        raise ValidationError("both records must come from scheme c")
    lo = record.lo
    if blocked.lo.alpha != 0:
        raise ValidationError("the blocked record must have alpha = 0")
    if abs(blocked.lo.t0 - lo.t0) > 1e-12:
        raise ValidationError("records use different beam splitters")
    g_mag = abs(np.conj(lo.t0) * lo.r0 * lo.alpha)
    if g_mag < 1e-12:
        raise SingularInversionError(
            "quadratures cannot be extracted with a blocked oscillator"
        )
    if abs(lo.alpha) < _WEAK_LO:
        warnings.warn(
            f"|alpha| = {abs(lo.alpha):.3g} is small; extraction amplifies "
            "noise strongly",
            WeakOscillatorWarning,
            stacklevel=2,
        )
    t_sq = lo.t0**2
    r_sq = abs(lo.r0) ** 2
    mag_sq = abs(lo.alpha) ** 2
    g = record.gammas
    gb = blocked.gammas

    n = g["g1"] + g["g2"] + g["g3"] + g["g4"] - mag_sq
    blocked_pairs = sum(gb[key] for key in GAMMA_KEYS[4:])
    kappa = (t_sq**2 + r_sq**2 + 4.0 * t_sq * r_sq) / 4.0
    nn = blocked_pairs / kappa
    x = (
        g["g1"] + g["g2"] - g["g3"] - g["g4"] - (t_sq - r_sq) * (n - mag_sq)
    ) / (2.0 * g_mag)
    nx = (
        4.0 * (g["g12"] - g["g34"])
        - (t_sq**2 - r_sq**2) * (nn - mag_sq**2)
        - 2.0 * mag_sq * g_mag * x
    ) / (2.0 * g_mag)
    cross_sum = g["g13"] + g["g14"] + g["g23"] + g["g24"]
    xx = (
        t_sq * r_sq * nn
        + (r_sq - t_sq) * g_mag * nx
        + (t_sq**2 + r_sq**2) * mag_sq * n
        + (t_sq - r_sq) * mag_sq * g_mag * x
        + t_sq * r_sq * mag_sq**2
        - cross_sum
    ) / g_mag**2
    return {
        "n": n, "x": x, "nn": nn, "nx": nx, "xx": xx,
        "theta": cmath.phase(np.conj(lo.t0) * lo.r0 * lo.alpha),
    }


# -- shot noise -------------------------------------------------------------


def add_shot_noise(record, samples: float, seed: int = 0):
    """Perturb a record by seeded Gaussian noise of relative size ``1/sqrt(samples)``.

    Each stored value ``v`` becomes ``v + g * max(|v|, 1e-6) / sqrt(samples)``
    with independent standard normals ``g`` drawn in a fixed canonical order
    (sorted gamma keys, or phase samples sorted by ``(n, j)``), so equal
    seeds give reproducible noise.  Fourier coefficients of a phase-scan
    record are recomputed from the noisy samples.
    """
    if samples <= 0:
        raise ValidationError("samples must be positive")
    rng = np.random.default_rng(seed)
    scale = 1.0 / math.sqrt(samples)
    if isinstance(record, DetectionRecord):
        noisy = {}
        for key in sorted(record.gammas):
            v = record.gammas[key]
            noisy[key] = v + rng.standard_normal() * max(abs(v), _NOISE_FLOOR) * scale
        return DetectionRecord(scheme=record.scheme, lo=record.lo, gammas=noisy)
    if isinstance(record, FourierRecord):
        noisy_samples = {}
        for key in sorted(record.samples):
            v = record.samples[key]
            noisy_samples[key] = (
                v + rng.standard_normal() * max(abs(v), _NOISE_FLOOR) * scale
            )
        return FourierRecord.from_samples(
            record.depth, record.lo, record.n_max, noisy_samples
        )
    raise ValidationError(
        f"expected a DetectionRecord or FourierRecord, got {type(record).__name__}"
    )
