from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from django.db import models
from django.utils.translation import gettext_lazy as _

from matcore.exceptions import DomainError
from matcore.linalg import hermitian, lambda_max, lambda_min, support_proj

from .jordan import (
    JordanBlock,
    JordanDecomposition,
    Projection,
    ProjectionLike,
    as_projection,
    jordan_decompose,
    overlap,
)

# Slack on squared-overlap comparisons.
BOUND_TOL = 1e-9


class EpsMode(models.TextChoices):
    CLOSED_FORM = "closed-form", _("Closed form (t-1)/((r-1)(2t-1))")
    RECURSIVE = "recursive", _("Induction on the number of projections")


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 <= eps < 1.0:
        raise DomainError(_("eps must lie in [0, 1)."), eps=eps)
    return eps


def _compressed(p: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Spectrum of h compressed to the range of projection p."""
    basis = Projection(p).range_basis()
    if basis.shape[1] == 0:
        return np.empty(0)
    return np.linalg.eigvalsh(hermitian(basis.conj().T @ h @ basis))


def _pair(q: ProjectionLike, s: ProjectionLike) -> tuple[np.ndarray, np.ndarray]:
    q_arr, s_arr = as_projection(q).matrix, as_projection(s).matrix
    if q_arr.shape != s_arr.shape:
        raise DomainError(_("Projections must share a dimension."))
    return q_arr, s_arr


def eps_dominated(q: ProjectionLike, s: ProjectionLike, eps: float) -> bool:
    """(1 − ε²)‖Qv‖² ≤ ‖SQv‖² for every v."""
    eps = _check_eps(eps)
    q_arr, s_arr = _pair(q, s)
    spectrum = _compressed(q_arr, s_arr)
    return bool(spectrum.size == 0 or spectrum[0] >= 1.0 - eps**2 - BOUND_TOL)


def eps_orthogonal(q: ProjectionLike, s: ProjectionLike, eps: float) -> bool:
    """QSQ ≤ ε²Q."""
    eps = _check_eps(eps)
    q_arr, s_arr = _pair(q, s)
    return bool(lambda_max(q_arr @ s_arr @ q_arr) <= eps**2 + BOUND_TOL)


@dataclass(frozen=True)
class ConditionReport:
    """Each equivalent form of one relation, evaluated independently."""

    relation: str
    eps: float
    conditions: dict[str, bool] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(self.conditions.values())

    @property
    def agree(self) -> bool:
        return len(set(self.conditions.values())) <= 1


def eps_domination_conditions(q: ProjectionLike, s: ProjectionLike, eps: float) -> ConditionReport:
    eps = _check_eps(eps)
    q_arr, s_arr = _pair(q, s)
    dec = jordan_decompose(s_arr, q_arr)
    jordan = bool(np.all(dec.q_prime <= dec.s_prime)) and all(
        b.sin**2 <= eps**2 + BOUND_TOL for b in dec.blocks
    )
    return ConditionReport(
        relation="eps-dominated",
        eps=eps,
        conditions={
            "vector": eps_dominated(q_arr, s_arr, eps),
            "operator": lambda_min(q_arr @ s_arr @ q_arr - (1 - eps**2) * q_arr) >= -BOUND_TOL,
            "jordan": jordan,
        },
    )


def eps_orthogonality_conditions(q: ProjectionLike, s: ProjectionLike, eps: float) -> ConditionReport:
    eps = _check_eps(eps)
    q_arr, s_arr = _pair(q, s)
    dec = jordan_decompose(s_arr, q_arr)
    both = join([q_arr, s_arr]).matrix
    total = q_arr + s_arr
    q_side = _compressed(q_arr, s_arr)
    s_side = _compressed(s_arr, q_arr)
    jordan = not np.any(dec.q_prime * dec.s_prime > 0.5) and all(
        b.cos**2 <= eps**2 + BOUND_TOL for b in dec.blocks
    )
    return ConditionReport(
        relation="eps-orthogonal",
        eps=eps,
        conditions={
            "vector": q_side.size == 0 or q_side[-1] <= eps**2 + BOUND_TOL,
            "operator": lambda_min(eps**2 * q_arr - q_arr @ s_arr @ q_arr) >= -BOUND_TOL,
            "jordan": jordan,
            "overlap": overlap(s_arr, q_arr) ** 2 <= eps**2 + BOUND_TOL,
            "sandwich": (
                lambda_min(total - (1 - eps) * both) >= -BOUND_TOL
                and lambda_min((1 + eps) * both - total) >= -BOUND_TOL
            ),
            "operator_dual": lambda_min(eps**2 * s_arr - s_arr @ q_arr @ s_arr) >= -BOUND_TOL,
            "vector_dual": s_side.size == 0 or s_side[-1] <= eps**2 + BOUND_TOL,
        },
    )


def _assemble(dec: JordanDecomposition, keep: Callable[[JordanBlock], bool], flags: np.ndarray) -> Projection:
    kept = [np.outer(b.phi, b.phi.conj()) for b in dec.blocks if keep(b)]
    return Projection(hermitian(sum(kept, dec.commuting_part(flags))))


def eps_subtract(q: ProjectionLike, s: ProjectionLike, eps: float) -> Projection:
    """Q ⊖_ε S: the blocks of Q with cos θ ≤ ε, plus Q′(I − S′)."""
    eps = _check_eps(eps)
    q_arr, s_arr = _pair(q, s)
    dec = jordan_decompose(s_arr, q_arr)
    return _assemble(dec, lambda b: b.cos**2 <= eps**2 + BOUND_TOL, dec.q_prime * (1 - dec.s_prime))


def restrict(q: ProjectionLike, s: ProjectionLike, eps: float) -> Projection:
    """Q_{S,ε}: the blocks of Q with sin θ ≤ ε, plus Q′S′."""
    eps = _check_eps(eps)
    q_arr, s_arr = _pair(q, s)
    dec = jordan_decompose(s_arr, q_arr)
    return _assemble(dec, lambda b: b.sin**2 <= eps**2 + BOUND_TOL, dec.q_prime * dec.s_prime)


def _recursive_eps(r: int, t: float) -> float:
    if r == 2:
        return 1.0 - 1.0 / t
    n = r - 1
    shrunk = (1.0 + t) / 2.0
    return min(_recursive_eps(n, shrunk), (1.0 - shrunk / t) / math.sqrt(n * shrunk))


def eps_rt(r: int, t: float, mode: EpsMode | str = EpsMode.CLOSED_FORM) -> float:
    """Pairwise ε-orthogonality level under which ∨Q_j ≤ t ΣQ_j for r projections.

    The recursive constant shrinks t to (1 + t)/2 at each step.
    """
    mode = EpsMode(mode)
    if isinstance(r, bool) or int(r) != r or r < 2:
        raise DomainError(_("r must be an integer of at least 2."), r=r)
    if not (t > 1.0 and math.isfinite(t)):
        raise DomainError(_("t must be a finite number above 1."), t=t)
    if mode == EpsMode.CLOSED_FORM:
        return math.sqrt((t - 1.0) / ((r - 1) * (2.0 * t - 1.0)))
    return _recursive_eps(int(r), float(t))


def as_family(projections: Sequence[ProjectionLike]) -> list[np.ndarray]:
    mats = [as_projection(p).matrix for p in projections]
    if not mats:
        raise DomainError(_("At least one projection is required."))
    if len({m.shape for m in mats}) != 1:
        raise DomainError(_("Projections must share a dimension."))
    return mats


def join(projections: Sequence[ProjectionLike]) -> Projection:
    return Projection(support_proj(sum(as_family(projections))))


def meet(projections: Sequence[ProjectionLike]) -> Projection:
    mats = as_family(projections)
    identity = np.eye(mats[0].shape[0])
    return Projection(identity - join([identity - m for m in mats]).matrix)


def sum_domination_margin(projections: Sequence[ProjectionLike], t: float) -> float:
    """λ_min of t ΣQ_j − ∨Q_j on the range of the join; ≥ 0 iff ∨Q_j ≤ t ΣQ_j."""
    mats = as_family(projections)
    top = join(mats)
    basis = top.range_basis()
    if basis.shape[1] == 0:
        return math.inf
    gap = t * sum(mats) - top.matrix
    return float(np.linalg.eigvalsh(hermitian(basis.conj().T @ gap @ basis))[0])
