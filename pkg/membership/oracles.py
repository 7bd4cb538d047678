"""
Randomized weak-bound oracles. A failing check is a proof of violation; a
pass is only evidence, which ``OracleResult.method`` records.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from matcore.linalg import Operand, as_array, hermitian, kron_power
from matcore.sampling import complex_gaussian, random_unitary
from means.utils import ka_mean

from .verdicts import VerdictMethod

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class OracleResult:
    holds: bool
    worst_X: np.ndarray
    worst_margin: float
    trials: int

    @property
    def method(self) -> VerdictMethod:
        return VerdictMethod.ORACLE_EVIDENCE if self.holds else VerdictMethod.ORACLE_PROOF


def _tr(a: np.ndarray, x: np.ndarray) -> float:
    return float(np.real(np.vdot(a.conj().T, x)))


def _eigenprojectors(h: np.ndarray) -> Iterator[np.ndarray]:
    _lam, vecs = np.linalg.eigh(hermitian(h))
    for v in vecs.T:
        yield np.outer(v, v.conj())


def _positive_part_projector(h: np.ndarray) -> np.ndarray:
    lam, vecs = np.linalg.eigh(hermitian(h))
    keep = vecs[:, lam > 0]
    return keep @ keep.conj().T


def _wishart(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = complex_gaussian(rng, dim, int(rng.integers(1, dim + 1)))
    return g @ g.conj().T


def _run(candidates: Iterator[np.ndarray], margin) -> OracleResult:
    worst_x, worst, count = None, np.inf, 0
    for x in candidates:
        trace = np.trace(x).real
        if trace <= 0:
            continue
        x = x / trace
        value = margin(x)
        count += 1
        if value < worst:
            worst_x, worst = x, value
    return OracleResult(bool(worst >= -ORACLE_TOL), worst_x, float(worst), count)


def weak_geometric_oracle(
    c: Operand,
    a1: Operand,
    a2: Operand,
    t: float,
    n: int,
    trials: int = 200,
    rng: np.random.Generator | None = None,
) -> OracleResult:
    """Check Tr C^⊗n X ≤ (Tr A1^⊗n X)^t (Tr A2^⊗n X)^{1-t} over sampled PSD X."""
    rng = np.random.default_rng(0) if rng is None else rng
    cn, a1n, a2n = (kron_power(hermitian(as_array(m)), n) for m in (c, a1, a2))
    gap = cn - kron_power(ka_mean(a1, a2, t), n)
    dim = cn.shape[0]

    def candidates() -> Iterator[np.ndarray]:
        yield np.eye(dim)
        for h in (a1n, a2n, cn, gap):
            yield from _eigenprojectors(h)
        yield _positive_part_projector(gap)
        for _trial in range(trials):
            yield _wishart(rng, dim)

    def margin(x: np.ndarray) -> float:
        left, right = max(_tr(a1n, x), 0.0), max(_tr(a2n, x), 0.0)
        return left**t * right ** (1 - t) - _tr(cn, x)

    result = _run(candidates(), margin)
    logger.debug(f"weak geometric oracle t={t} n={n}: worst margin {result.worst_margin:.3e}")
    return result


def sup_bound_oracle(
    c: Operand,
    family: Sequence[Operand],
    n: int,
    trials: int = 200,
    rng: np.random.Generator | None = None,
) -> OracleResult:
    """Check Tr C^⊗n T ≤ max_y Tr A_y^⊗n T over sampled tests 0 ≤ T ≤ I."""
    rng = np.random.default_rng(0) if rng is None else rng
    cn = kron_power(hermitian(as_array(c)), n)
    powers = [kron_power(hermitian(as_array(a)), n) for a in family]
    dim = cn.shape[0]

    def candidates() -> Iterator[np.ndarray]:
        yield np.eye(dim)
        for an in powers:
            yield _positive_part_projector(cn - an)
        yield _positive_part_projector(cn - sum(powers) / len(powers))
        for _trial in range(trials):
            u = random_unitary(rng, dim)
            yield (u * rng.uniform(0.0, 1.0, dim)) @ u.conj().T

    def margin(x: np.ndarray) -> float:
        return max(_tr(an, x) for an in powers) - _tr(cn, x)

    result = _run(candidates(), margin)
    logger.debug(f"sup bound oracle n={n}: worst margin {result.worst_margin:.3e}")
    return result
