"""Seeded random instances for tests and acceptance suites."""

from __future__ import annotations

import numpy as np


def complex_gaussian(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = complex_gaussian(rng, dim, dim)
    return (g + g.conj().T) / 2


def random_psd(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    g = complex_gaussian(rng, dim, dim if rank is None else rank)
    return g @ g.conj().T


def random_pd(rng: np.random.Generator, dim: int, floor: float = 0.1) -> np.ndarray:
    return random_psd(rng, dim) + floor * np.eye(dim)


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    rho = random_psd(rng, dim, rank)
    return rho / np.trace(rho).real


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(complex_gaussian(rng, dim, dim))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_projection(rng: np.random.Generator, dim: int, rank: int) -> np.ndarray:
    u = random_unitary(rng, dim)[:, :rank]
    return u @ u.conj().T


def random_commuting_family(
    rng: np.random.Generator, dim: int, size: int, positive: bool = True
) -> list[np.ndarray]:
    u = random_unitary(rng, dim)
    low = 0.05 if positive else 0.0
    return [(u * rng.uniform(low, 1.0, dim)) @ u.conj().T for _ in range(size)]


def random_probability(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.dirichlet(np.ones(size))
