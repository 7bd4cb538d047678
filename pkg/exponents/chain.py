"""
Strict-inequality chain for the classical pair ρ = (1/2, 1/2) against
σ1 = (1/4, 3/4) and σ2 = (3/4, 1/4) at k copies.

All k-copy quantities are evaluated over type classes, so no 2^k vectors are
materialized.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from django.utils.translation import gettext_lazy as _

from divergences.atoms import ClassicalPair
from divergences.hoeffding import GRID_POINTS, hoeffding_star
from matcore.exceptions import DomainError, PreconditionError
from matcore.extreal import ExtReal, ext_max

logger = logging.getLogger(__name__)

RHO = (0.5, 0.5)
SIGMA_1 = (0.25, 0.75)
SIGMA_2 = (0.75, 0.25)
LOG_2_SQRT3 = math.log(2 / math.sqrt(3))
LOG_4_SQRT3 = math.log(4 / math.sqrt(3))
MAX_COPIES = 12
STRICT_MARGIN = 1e-7
EQUAL_TOL = 1e-9


@dataclass(frozen=True)
class ChainLink:
    left: str
    right: str
    relation: str  # "<", "=" or "<="
    asserted_strict: bool
    margin: float

    @property
    def holds(self) -> bool:
        if self.relation == "=":
            return abs(self.margin) <= EQUAL_TOL
        if self.asserted_strict:
            return self.margin > STRICT_MARGIN
        return self.margin >= -EQUAL_TOL


@dataclass(frozen=True)
class AppendixAReport:
    k: int
    r: float
    pairwise: ExtReal
    relative_entropy_gap: ExtReal
    closed_form: ExtReal
    geometric: ExtReal
    mixture: ExtReal
    mixture_d_max: ExtReal
    mixture_r_inf: ExtReal
    threshold: float | None
    t_grid: int
    links: tuple[ChainLink, ...]

    @property
    def chain(self) -> tuple[ExtReal, ...]:
        return (self.pairwise, self.relative_entropy_gap, self.closed_form, self.geometric, self.mixture)

    @property
    def holds(self) -> bool:
        return all(link.holds for link in self.links)

    @property
    def mixture_strict(self) -> bool:
        return self.links[-1].asserted_strict


def mixture_threshold(k: int) -> float | None:
    """k log(4/√3) − log C(k, k/2) for even k; odd k is always strict."""
    if k % 2:
        return None
    return k * LOG_4_SQRT3 - math.log(math.comb(k, k // 2))


def _geometric_alternative(t: float) -> np.ndarray:
    return np.power(SIGMA_1, t) * np.power(SIGMA_2, 1 - t)


def appendix_a_report(k: int, r: float, t_grid: int = 101, points: int = GRID_POINTS) -> AppendixAReport:
    if not 1 <= k <= MAX_COPIES:
        raise DomainError(_("Copy number must lie in 1..%(cap)s.") % {"cap": MAX_COPIES}, k=k)
    floor = k * LOG_2_SQRT3
    if r <= floor:
        raise PreconditionError(_("The rate must exceed k log(2/√3)."), r=r, floor=floor)

    pairwise = ext_max(
        *(hoeffding_star(r, ClassicalPair.tensor_power(RHO, s, k), points=points).value for s in (SIGMA_1, SIGMA_2))
    )
    relative_entropy = ClassicalPair.tensor_power(RHO, SIGMA_1, k).relative_entropy().value
    gap = ExtReal(r) - relative_entropy
    closed_form = ExtReal(r - floor)
    geometric = ext_max(
        *(
            hoeffding_star(r, ClassicalPair.tensor_power(RHO, _geometric_alternative(t), k), points=points).value
            for t in np.linspace(0.0, 1.0, t_grid)
        )
    )
    mixture_pair = ClassicalPair.tensor_mixture(RHO, [SIGMA_1, SIGMA_2], [0.5, 0.5], k)
    mixture = hoeffding_star(r, mixture_pair, points=points).value
    d_max = mixture_pair.max_relative_entropy()

    threshold = mixture_threshold(k)
    strict = threshold is None or r < threshold
    links = (
        ChainLink("pairwise", "relative_entropy_gap", "<", True, float(gap - pairwise)),
        ChainLink("relative_entropy_gap", "closed_form", "=", False, float(closed_form - gap)),
        ChainLink("closed_form", "geometric", "=", False, float(geometric - closed_form)),
        ChainLink("geometric", "mixture", "<" if strict else "<=", strict, float(mixture - geometric)),
    )
    report = AppendixAReport(
        k=k,
        r=r,
        pairwise=pairwise,
        relative_entropy_gap=gap,
        closed_form=closed_form,
        geometric=geometric,
        mixture=mixture,
        mixture_d_max=d_max.value.value,
        mixture_r_inf=d_max.r_inf,
        threshold=threshold,
        t_grid=t_grid,
        links=links,
    )
    for link in links:
        if not link.holds:
            logger.warning(f"chain link {link.left} {link.relation} {link.right} fails at k={k}, r={r}: {link.margin:.3e}")
    return report
