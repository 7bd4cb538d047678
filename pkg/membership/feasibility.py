"""
Arithmetic-mean feasibility at a fixed copy number:
is C^⊗n ≤ Σ_y μ(y) A_y^⊗n for some probability vector μ?

The objective μ ↦ λ_min(Σ_y μ(y) A_y^⊗n − C^⊗n) is concave, being an
infimum of affine functions, so it is maximized directly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, minimize_scalar
from django.utils.translation import gettext_lazy as _

from matcore.exceptions import DomainError
from matcore.linalg import Operand, as_array, hermitian, kron_power

logger = logging.getLogger(__name__)

FEASIBLE_TOL = 1e-8
INTERVAL_TOL = 1e-10
ASCENT_ITERATIONS = 2000
_WITNESS_POOL = 64


@dataclass(frozen=True, eq=False)
class AmFeasibility:
    feasible: bool
    mu: np.ndarray | None
    max_lambda_min: float
    n: int
    p_interval: tuple[float, float] | None = None
    witness: np.ndarray | None = None

    def witness_gaps(self, c: Operand, family: Sequence[Operand]) -> np.ndarray | None:
        """Tr C^⊗n X − Tr A_y^⊗n X for each member; all positive for a valid witness."""
        if self.witness is None:
            return None
        cn = np.trace(kron_power(c, self.n) @ self.witness).real
        return np.array([cn - np.trace(kron_power(a, self.n) @ self.witness).real for a in family])


def unit_simplex_projection(c: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    a = -np.sort(-c)
    lambdas = (np.cumsum(a) - 1) / np.arange(1, c.size + 1)
    k = np.flatnonzero(a > lambdas)[-1]
    return np.maximum(c - lambdas[k], 0.0)


class AmObjective:
    """h(μ) = λ_min(Σ_y μ(y) D_y) with D_y = A_y^⊗n − C^⊗n."""

    def __init__(self, c: Operand, family: Sequence[Operand], n: int) -> None:
        if n < 1:
            raise DomainError(_("Copy number must be positive."), n=n)
        if not family:
            raise DomainError(_("The family must be nonempty."))
        cn = kron_power(hermitian(as_array(c)), n)
        self.n = n
        self.diffs = np.stack([hermitian(kron_power(hermitian(as_array(a)), n) - cn) for a in family])

    @property
    def size(self) -> int:
        return self.diffs.shape[0]

    def bottom(self, mu: np.ndarray) -> tuple[float, np.ndarray]:
        lam, vecs = np.linalg.eigh(np.tensordot(mu, self.diffs, axes=1))
        return float(lam[0]), vecs[:, 0]

    def __call__(self, mu: Sequence[float]) -> float:
        return self.bottom(np.asarray(mu, dtype=float))[0]

    def pairings(self, v: np.ndarray) -> np.ndarray:
        """v* D_y v for every y: a supergradient at any μ where v is bottom."""
        return np.einsum("i,yij,j->y", v.conj(), self.diffs, v).real

    def witness_from(self, vectors: Sequence[np.ndarray]) -> np.ndarray | None:
        """Mixture of rank-one states minimizing max_y Tr D_y X, when negative."""
        values = np.array([self.pairings(v) for v in vectors])
        k = len(vectors)
        result = linprog(
            c=np.r_[np.zeros(k), 1.0],
            A_ub=np.hstack([values.T, -np.ones((self.size, 1))]),
            b_ub=np.zeros(self.size),
            A_eq=np.r_[np.ones(k), 0.0][None, :],
            b_eq=[1.0],
            bounds=[(0, None)] * k + [(None, None)],
            method="highs",
        )
        if result.status != 0 or result.fun >= 0:
            return None
        weights = np.clip(result.x[:k], 0.0, None)
        weights /= weights.sum()
        witness = sum(w * np.outer(v, v.conj()) for w, v in zip(weights, vectors) if w > 0)
        return hermitian(witness)


def _pair(objective: AmObjective) -> AmFeasibility:
    def h(p: float) -> float:
        return objective(np.array([p, 1.0 - p]))

    refined = minimize_scalar(lambda p: -h(p), bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    best_p, best = max(((p, h(p)) for p in (1.0, 0.0, float(refined.x))), key=lambda item: item[1])
    mu = np.array([best_p, 1.0 - best_p])
    logger.debug(f"am feasibility pair n={objective.n}: p*={best_p:.6f} h*={best:.3e}")

    if best >= -FEASIBLE_TOL:
        def edge(inside: float, outside: float) -> float:
            if h(outside) >= -FEASIBLE_TOL:
                return outside
            while abs(outside - inside) > INTERVAL_TOL:
                mid = (inside + outside) / 2
                inside, outside = (mid, outside) if h(mid) >= -FEASIBLE_TOL else (inside, mid)
            return inside

        interval = (edge(best_p, 0.0), edge(best_p, 1.0))
        return AmFeasibility(True, mu, best, objective.n, p_interval=interval)

    delta = 1e-6
    probes = (max(best_p - delta, 0.0), best_p, min(best_p + delta, 1.0))
    vectors = [objective.bottom(np.array([p, 1.0 - p]))[1] for p in probes]
    return AmFeasibility(False, mu, best, objective.n, witness=objective.witness_from(vectors))


def _ascent(objective: AmObjective, iterations: int) -> AmFeasibility:
    mu = np.full(objective.size, 1.0 / objective.size)
    step0 = 1.0 / max(float(np.abs(np.linalg.eigvalsh(d)).max()) for d in objective.diffs)
    best, best_mu = -np.inf, mu
    pool: list[np.ndarray] = []
    for k in range(iterations):
        value, v = objective.bottom(mu)
        if value > best:
            best, best_mu = value, mu
        if k >= iterations - _WITNESS_POOL:
            pool.append(v)
        mu = unit_simplex_projection(mu + step0 / np.sqrt(k + 1) * objective.pairings(v))
    logger.debug(f"am feasibility ascent n={objective.n}: h*={best:.3e}")
    if best >= -FEASIBLE_TOL:
        return AmFeasibility(True, best_mu, best, objective.n)
    pool.append(objective.bottom(best_mu)[1])
    return AmFeasibility(False, best_mu, best, objective.n, witness=objective.witness_from(pool))


def am_feasibility_quantum(
    c: Operand, family: Sequence[Operand], n: int, iterations: int = ASCENT_ITERATIONS
) -> AmFeasibility:
    objective = AmObjective(c, family, n)
    if objective.size == 1:
        value, v = objective.bottom(np.ones(1))
        if value >= -FEASIBLE_TOL:
            return AmFeasibility(True, np.ones(1), value, n)
        return AmFeasibility(False, np.ones(1), value, n, witness=objective.witness_from([v]))
    if objective.size == 2:
        return _pair(objective)
    return _ascent(objective, iterations)
