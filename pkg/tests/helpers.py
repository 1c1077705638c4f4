"""Shared fixtures-by-hand: random states and brute-force moment oracles."""

import numpy as np

from nclmoments import DensityState, FockState
from nclmoments.operators import create, destroy

Array = np.ndarray


def random_pure_state(dim: int, seed: int) -> FockState:
    """Random normalized ket with an exponentially decaying envelope.

    The decay keeps high-order moments finite-dimension friendly so that
    dim-32 truncation artifacts stay far below the test tolerances.
    """
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    raw *= np.exp(-0.35 * np.arange(dim))
    return FockState(raw / np.linalg.norm(raw))


def random_density_state(dim: int, seed: int, rank: int = 3) -> DensityState:
    """Random low-rank mixed state built from decaying random kets."""
    rng = np.random.default_rng(seed)
    weights = rng.random(rank)
    weights /= weights.sum()
    rho = np.zeros((dim, dim), dtype=complex)
    for i, w in enumerate(weights):
        ket = random_pure_state(dim, seed * 101 + 7 * i + 1).amplitudes
        rho += w * np.outer(ket, ket.conj())
    rho = 0.5 * (rho + rho.conj().T)
    return DensityState(rho / np.trace(rho).real)


def dense_moment(state, k: int, l: int) -> complex:
    """<a^dag^k a^l> by explicit dense matrix products (oracle)."""
    if isinstance(state, FockState):
        dim = state.dim
        a = destroy(dim)
        left = np.linalg.matrix_power(a, k) @ state.amplitudes
        right = np.linalg.matrix_power(a, l) @ state.amplitudes
        return complex(np.vdot(left, right))
    dim = state.dim
    op = np.linalg.matrix_power(create(dim), k) @ np.linalg.matrix_power(
        destroy(dim), l
    )
    return complex(np.trace(state.matrix @ op))
