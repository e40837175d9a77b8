"""Seeded random states and unitaries for property sweeps.

Every sample takes its own ``numpy`` generator built from an explicit seed
tuple, so a sweep gives the same samples in any order or in parallel.
"""

from __future__ import annotations

import numpy as np


def rng_for(*keys: int) -> np.random.Generator:
    return np.random.default_rng([int(k) for k in keys])


def haar_unitary(rng: np.random.Generator, n: int = 2) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure(rng: np.random.Generator) -> np.ndarray:
    """Haar-random two-qubit pure state."""
    z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return z / np.linalg.norm(z)


def random_chi(rng: np.random.Generator) -> np.ndarray:
    """Random state of the form alpha|HH> + beta|VV> with real alpha, beta >= 0."""
    alpha_sq = rng.random()
    return np.array([np.sqrt(alpha_sq), 0.0, 0.0, np.sqrt(1.0 - alpha_sq)], dtype=complex)


def random_mixed(rng: np.random.Generator, min_terms: int = 2, max_terms: int = 4) -> np.ndarray:
    """Random convex mixture of ``min_terms``..``max_terms`` Haar-random pure states."""
    k = int(rng.integers(min_terms, max_terms + 1))
    weights = rng.random(k)
    weights /= weights.sum()
    rho = np.zeros((4, 4), dtype=complex)
    for w in weights:
        psi = random_pure(rng)
        rho += w * np.outer(psi, psi.conj())
    return 0.5 * (rho + rho.conj().T)
