"""
Composite tests against (or for) several hypotheses with pairwise disjoint
supports: each single-hypothesis test is first restricted towards its own
support, then the restricted tests are joined.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from django.utils.translation import gettext_lazy as _

from matcore.conf import numerics
from matcore.exceptions import DomainError, PreconditionError
from matcore.linalg import as_array, lambda_min, support_proj

from .jordan import Projection, ProjectionLike
from .utils import BOUND_TOL, EpsMode, as_family, eps_rt, join, meet, restrict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ErrorCertificate:
    """Error probabilities of hypothesis ``index`` under its own state.

    ``miss`` is the error of the original test, ``restricted_miss`` the error
    of its restriction and ``composite_miss`` that of the joined test.
    """

    index: int
    miss: float
    restricted_miss: float
    composite_miss: float
    eps: float

    @property
    def bound(self) -> float:
        return self.miss / self.eps**2

    @property
    def holds(self) -> bool:
        return self.composite_miss <= self.bound + BOUND_TOL

    @property
    def two_sided(self) -> bool:
        return self.miss <= self.restricted_miss + BOUND_TOL and self.restricted_miss <= self.bound + BOUND_TOL


@dataclass(frozen=True, eq=False)
class CompositeTest:
    test: Projection
    restricted: tuple[Projection, ...]
    eps: float
    certificates: tuple[ErrorCertificate, ...]
    t: float | None = None
    domination_margin: float | None = None

    @property
    def dominated(self) -> bool | None:
        """Whether the joined test sits below t times the sum of the originals."""
        if self.domination_margin is None:
            return None
        return self.domination_margin >= -BOUND_TOL

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.certificates) and self.dominated is not False


def check_disjoint(supports: Sequence[np.ndarray]) -> None:
    for j, first in enumerate(supports):
        for k in range(j + 1, len(supports)):
            if meet([first, supports[k]]).rank > 0:
                raise PreconditionError(
                    _("Supports %(j)s and %(k)s intersect.") % {"j": j, "k": k},
                    pair=(j, k),
                )


def _states(supports: Sequence[np.ndarray], states: Sequence | None) -> list[np.ndarray]:
    if states is None:
        return [s / np.trace(s).real for s in supports]
    rhos = [as_array(rho) for rho in states]
    if len(rhos) != len(supports):
        raise DomainError(_("One state per support is required."))
    for j, (rho, s) in enumerate(zip(rhos, supports)):
        if np.linalg.norm(support_proj(rho) - s) > 1e-8:
            raise PreconditionError(_("State %(j)s does not have the given support.") % {"j": j}, index=j)
    return rhos


def _miss(rho: np.ndarray, p: np.ndarray) -> float:
    return float(np.trace(rho @ (np.eye(p.shape[0]) - p)).real)


def composite_test(
    tests: Sequence[ProjectionLike],
    state_supports: Sequence[ProjectionLike],
    eps: float,
    states: Sequence | None = None,
    t: float | None = None,
) -> CompositeTest:
    """T = ∨_j (T_j)_{S_j, ε} for hypotheses with pairwise disjoint supports S_j.

    Without ``states`` the normalized support projections stand in for them.
    """
    test_mats, supports = as_family(tests), as_family(state_supports)
    if len(test_mats) != len(supports) or test_mats[0].shape != supports[0].shape:
        raise DomainError(_("One test per support, all of one dimension, is required."))
    if not 0.0 < eps < 1.0:
        raise DomainError(_("eps must lie in (0, 1)."), eps=eps)
    check_disjoint(supports)
    rhos = _states(supports, states)

    restricted = tuple(restrict(tj, sj, eps) for tj, sj in zip(test_mats, supports))
    joined = join(restricted)
    certificates = tuple(
        ErrorCertificate(
            index=j,
            miss=_miss(rho, tj),
            restricted_miss=_miss(rho, rj.matrix),
            composite_miss=_miss(rho, joined.matrix),
            eps=eps,
        )
        for j, (rho, tj, rj) in enumerate(zip(rhos, test_mats, restricted))
    )
    margin = None if t is None else lambda_min(t * sum(test_mats) - joined.matrix)
    logger.debug(f"composite test: r={len(test_mats)} eps={eps} rank={joined.rank} margin={margin}")
    return CompositeTest(joined, restricted, eps, certificates, t, margin)


def composite_test_alternative(
    tests: Sequence[ProjectionLike],
    alt_supports: Sequence[ProjectionLike],
    eps: float,
    states: Sequence | None = None,
    t: float | None = None,
) -> CompositeTest:
    """T = I − ∨_j (I − T_j)_{S_j, ε} for alternatives with disjoint supports.

    Certificates then bound Tr σ_j T by Tr σ_j T_j / ε², and the domination
    margin refers to I − T ≤ t Σ (I − T_j).
    """
    complements = [Projection(np.eye(m.shape[0]) - m) for m in as_family(tests)]
    inner = composite_test(complements, alt_supports, eps, states=states, t=t)
    return replace(inner, test=inner.test.complement())


def domination_threshold(
    supports: Sequence[ProjectionLike],
    eps: float,
    t: float,
    mode: EpsMode | str = EpsMode.RECURSIVE,
) -> int:
    """Copy number from which the joined test of tensor-power hypotheses is
    dominated by t times the sum of the individual tests.

    λ is the largest ‖R_j R_k R_j‖ over the single-copy supports.
    """
    mats = as_family(supports)
    if len(mats) < 2:
        return 1
    check_disjoint(mats)
    level = eps_rt(len(mats), t, mode)
    if not 0.0 < eps < level / 2:
        raise DomainError(
            _("eps must lie in (0, %(half).6f) for r=%(r)s, t=%(t)s.") % {"half": level / 2, "r": len(mats), "t": t},
            eps=eps,
        )
    lam = max(
        float(np.linalg.norm(rj @ rk @ rj, 2))
        for j, rj in enumerate(mats)
        for k, rk in enumerate(mats)
        if j != k
    )
    if lam <= numerics().eig_zero_tol:
        return 1
    return max(1, math.ceil(2 * math.log(level - 2 * eps) / math.log(lam)))
