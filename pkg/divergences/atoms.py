"""
Commuting pairs as weighted atoms (multiplicity, ρ(x), σ(x)).

k-copy quantities of product inputs only depend on the type of a sequence,
so tensor powers are represented by one atom per type class with the
multinomial count as multiplicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln, logsumexp
from django.utils.translation import gettext_lazy as _

from matcore.exceptions import DomainError
from matcore.extreal import ExtReal
from matcore.linalg import Operand, joint_diagonalize

from .results import DivergenceValue

TIE_TOL = 1e-9


class MaxRelativeEntropy(NamedTuple):
    value: DivergenceValue
    argmax: tuple[int, ...]
    r_inf: ExtReal


def _safe_log(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), -np.inf)


def compositions(k: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (k,)
        return
    for head in range(k, -1, -1):
        for tail in compositions(k - head, parts - 1):
            yield (head, *tail)


def _type_log_prob(counts: np.ndarray, log_p: np.ndarray) -> np.ndarray:
    # n·log p with 0·(-inf) = 0
    terms = np.where(counts > 0, counts * np.where(np.isfinite(log_p), log_p, 0.0), 0.0)
    dead = np.any((counts > 0) & ~np.isfinite(log_p), axis=-1)
    return np.where(dead, -np.inf, terms.sum(axis=-1))


@dataclass(frozen=True, eq=False)
class ClassicalPair:
    log_p: np.ndarray
    log_q: np.ndarray
    log_mult: np.ndarray

    def __post_init__(self) -> None:
        if not (self.log_p.shape == self.log_q.shape == self.log_mult.shape):
            raise DomainError(_("Atom arrays must have equal length."))
        if np.all(np.isneginf(self.log_p)) or np.all(np.isneginf(self.log_q)):
            raise DomainError(_("Divergence arguments must be nonzero."))

    @classmethod
    def from_vectors(cls, p: Sequence[float], q: Sequence[float]) -> ClassicalPair:
        p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
        if p.shape != q.shape or np.any(p < 0) or np.any(q < 0):
            raise DomainError(_("Expected two nonnegative vectors of equal length."))
        return cls(_safe_log(p), _safe_log(q), np.zeros(p.shape))

    @classmethod
    def from_commuting(cls, a: Operand, b: Operand) -> ClassicalPair:
        joint = joint_diagonalize([a, b])
        p, q = joint.diagonals
        scale = max(float(np.abs(joint.diagonals).max()), 1e-300)
        return cls.from_vectors(np.where(p > 1e-10 * scale, p, 0.0), np.where(q > 1e-10 * scale, q, 0.0))

    @classmethod
    def tensor_power(cls, p: Sequence[float], q: Sequence[float], k: int) -> ClassicalPair:
        return cls.tensor_mixture(p, [q], [1.0], k)

    @classmethod
    def tensor_mixture(
        cls, p: Sequence[float], qs: Sequence[Sequence[float]], weights: Sequence[float], k: int
    ) -> ClassicalPair:
        """ρ^⊗k against Σ_j w_j σ_j^⊗k, one atom per type class."""
        log_p = _safe_log(p)
        log_qs = np.array([_safe_log(q) for q in qs])
        counts = np.array(list(compositions(k, log_p.size)), dtype=float)
        log_mult = gammaln(k + 1) - gammaln(counts + 1).sum(axis=1)
        atom_p = _type_log_prob(counts, log_p)
        per_member = np.array([_type_log_prob(counts, lq) for lq in log_qs])
        atom_q = logsumexp(per_member + _safe_log(weights)[:, None], axis=0)
        return cls(atom_p, np.asarray(atom_q, dtype=float), log_mult)

    @property
    def _on_p(self) -> np.ndarray:
        return np.isfinite(self.log_p)

    @property
    def _on_q(self) -> np.ndarray:
        return np.isfinite(self.log_q)

    @property
    def supported(self) -> bool:
        return bool(np.all(self._on_q[self._on_p]))

    @property
    def orthogonal(self) -> bool:
        return not bool(np.any(self._on_p & self._on_q))

    def _log_sum(self, mask: np.ndarray, exponents: np.ndarray) -> float:
        if not mask.any():
            return -math.inf
        return float(logsumexp(exponents[mask] + self.log_mult[mask]))

    def log_q_alpha(self, alpha: float) -> float:
        """log Σ m ρ^α σ^{1-α} over the common support."""
        both = self._on_p & self._on_q
        exponents = np.zeros_like(self.log_p)
        exponents[both] = alpha * self.log_p[both] + (1 - alpha) * self.log_q[both]
        return self._log_sum(both, exponents)

    def petz_log_q(self, alpha: float) -> float:
        return self.log_q_alpha(alpha)

    def sandwiched_log_q(self, alpha: float) -> float:
        if not self.supported:
            return math.inf
        return self.log_q_alpha(alpha)

    def log_tr_a0_b(self) -> float:
        return self._log_sum(self._on_p & self._on_q, self.log_q)

    def log_tr_a_b0(self) -> float:
        return self._log_sum(self._on_p & self._on_q, self.log_p)

    def log_trace_a(self) -> float:
        return self._log_sum(self._on_p, self.log_p)

    def log_ratios(self) -> np.ndarray:
        ratios = np.full(self.log_p.shape, -np.inf)
        both = self._on_p & self._on_q
        ratios[both] = self.log_p[both] - self.log_q[both]
        ratios[self._on_p & ~self._on_q] = np.inf
        return ratios

    def d_max(self) -> float:
        return float(self.log_ratios()[self._on_p].max())

    def relative_entropy(self) -> DivergenceValue:
        if not self.supported:
            return DivergenceValue(ExtReal.inf())
        on = self._on_p
        weights = np.exp(self.log_mult[on] + self.log_p[on])
        return DivergenceValue(ExtReal(float(weights @ (self.log_p[on] - self.log_q[on]))))

    def max_relative_entropy(self) -> MaxRelativeEntropy:
        ratios = self.log_ratios()
        top = float(ratios[self._on_p].max())
        if math.isinf(top):
            argmax = np.flatnonzero(self._on_p & ~self._on_q)
            return MaxRelativeEntropy(DivergenceValue(ExtReal.inf()), tuple(int(i) for i in argmax), ExtReal.inf())
        argmax = np.flatnonzero(self._on_p & (ratios >= top + math.log1p(-TIE_TOL)))
        mass = float(logsumexp(self.log_mult[argmax] + self.log_q[argmax]))
        return MaxRelativeEntropy(
            DivergenceValue(ExtReal(top)),
            tuple(int(i) for i in argmax),
            ExtReal(-mass),
        )
