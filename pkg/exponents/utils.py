from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from django.utils.translation import gettext_lazy as _

from divergences.hoeffding import GRID_POINTS, hoeffding, hoeffding_star
from matcore.exceptions import DomainError, PreconditionError
from matcore.extreal import ExtReal, ext_max, ext_min
from matcore.linalg import Operand, as_array, hermitian
from matcore.parallel import thread_map
from means.utils import KaCurve

logger = logging.getLogger(__name__)

MEAN_GRID = 101
TRACE_TOL = 1e-9
ORDER_TOL = 1e-8


class TrivialBounds(NamedTuple):
    direct_upper: ExtReal
    sc_lower: ExtReal


class GridCell(NamedTuple):
    s: float
    t: float
    direct: ExtReal


@dataclass(frozen=True, eq=False)
class ExponentReport:
    """Pairwise and geometric-mean bounds at one rate r.

    The geometric direct bound is an infimum over a finite (s, t) grid and
    therefore an upper bound on the true infimum; the geometric sc bound is a
    supremum over the grid and therefore a lower bound on the true supremum.
    """

    r: float
    trivial_direct_upper: ExtReal
    geometric_direct_upper: ExtReal
    trivial_sc_lower: ExtReal
    geometric_sc_lower: ExtReal
    convex_hull_sc: ExtReal
    mean_grid: int
    alpha_points: int
    direct_argmin: tuple[float, float]
    sc_argmax: tuple[int, float]
    cells: tuple[GridCell, ...] = ()

    @property
    def ordering_ok(self) -> bool:
        return (
            self.geometric_direct_upper <= self.trivial_direct_upper + ORDER_TOL
            and self.geometric_sc_lower >= self.trivial_sc_lower - ORDER_TOL
        )


def _states(members: Sequence[Operand], role: str) -> list[np.ndarray]:
    states = [hermitian(as_array(m)) for m in members]
    if not states:
        raise DomainError(_("Hypothesis sets must be nonempty."), role=role)
    for i, state in enumerate(states):
        trace = float(np.trace(state).real)
        if abs(trace - 1.0) > TRACE_TOL:
            raise PreconditionError(_("Hypotheses must be density operators."), role=role, index=i, trace=trace)
    return states


def trivial_bounds(
    null_set: Sequence[Operand], alt_set: Sequence[Operand], r: float, points: int = GRID_POINTS
) -> TrivialBounds:
    """min over pairs of H_r and max over pairs of H*_r."""
    nulls, alts = _states(null_set, "null"), _states(alt_set, "alternative")
    pairs = [(rho, sigma) for rho in nulls for sigma in alts]
    direct = ext_min(*(hoeffding(r, rho, sigma, points).value for rho, sigma in pairs))
    sc = ext_max(*(hoeffding_star(r, rho, sigma, points).value for rho, sigma in pairs))
    return TrivialBounds(direct, sc)


def convex_hull_sc_lower(
    null_set: Sequence[Operand],
    alt_set: Sequence[Operand],
    r: float,
    points: int = 20,
    rng: np.random.Generator | None = None,
    alpha_points: int = GRID_POINTS,
) -> ExtReal:
    """Pairwise sc bound with the alternatives replaced by sampled hull points."""
    nulls, alts = _states(null_set, "null"), _states(alt_set, "alternative")
    if len(alts) == 2:
        weights = [np.array([w, 1 - w]) for w in np.linspace(0.0, 1.0, points)]
    else:
        rng = np.random.default_rng(0) if rng is None else rng
        weights = [np.eye(len(alts))[i] for i in range(len(alts))]
        weights += [rng.dirichlet(np.ones(len(alts))) for _ in range(points)]
    hull = [sum(w * sigma for w, sigma in zip(mix, alts)) for mix in weights]
    return ext_max(*(hoeffding_star(r, rho, sigma, alpha_points).value for rho in nulls for sigma in hull))


def geometric_bounds_two(
    null_pair: Sequence[Operand],
    alt_pair: Sequence[Operand],
    r: float,
    grid: int = MEAN_GRID,
    alpha_points: int = GRID_POINTS,
    hull_points: int = 20,
) -> ExponentReport:
    rho1, rho2 = _states(null_pair, "null")
    sigma1, sigma2 = _states(alt_pair, "alternative")
    ts = np.linspace(0.0, 1.0, grid)
    rho_curve, sigma_curve = KaCurve(rho1, rho2), KaCurve(sigma1, sigma2)
    rho_means, sigma_means = rho_curve.batch(ts), sigma_curve.batch(ts)

    def direct_cell(index: tuple[int, int]) -> GridCell:
        i, j = index
        value = hoeffding(r, rho_means[i], sigma_means[j], alpha_points).value
        return GridCell(float(ts[i]), float(ts[j]), value)

    cells = thread_map(direct_cell, [(i, j) for i in range(grid) for j in range(grid)])
    best_cell = min(cells, key=lambda cell: cell.direct)

    def sc_cell(index: tuple[int, int]) -> ExtReal:
        i, j = index
        return hoeffding_star(r, (rho1, rho2)[i], sigma_means[j], alpha_points).value

    sc_index = [(i, j) for i in range(2) for j in range(grid)]
    sc_values = thread_map(sc_cell, sc_index)
    best = max(range(len(sc_values)), key=lambda k: sc_values[k])
    trivial = trivial_bounds([rho1, rho2], [sigma1, sigma2], r, alpha_points)

    report = ExponentReport(
        r=r,
        trivial_direct_upper=trivial.direct_upper,
        geometric_direct_upper=best_cell.direct,
        trivial_sc_lower=trivial.sc_lower,
        geometric_sc_lower=sc_values[best],
        convex_hull_sc=convex_hull_sc_lower([rho1, rho2], [sigma1, sigma2], r, hull_points, alpha_points=alpha_points),
        mean_grid=grid,
        alpha_points=alpha_points,
        direct_argmin=(best_cell.s, best_cell.t),
        sc_argmax=(sc_index[best][0] + 1, float(ts[sc_index[best][1]])),
        cells=tuple(cells),
    )
    if not report.ordering_ok:
        logger.warning(f"geometric bounds out of order at r={r}")
    logger.debug(
        f"bounds r={r}: direct {report.trivial_direct_upper} -> {report.geometric_direct_upper}, "
        f"sc {report.trivial_sc_lower} -> {report.geometric_sc_lower}"
    )
    return report
