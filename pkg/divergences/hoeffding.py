"""
Hoeffding divergence (direct exponent) and anti-divergence (strong converse).

Both are Legendre-type suprema over a parameter in (0, 1): α itself for the
Petz-based direct quantity, u = (α−1)/α for the sandwiched one. A dense grid
is followed by a bounded scalar refinement around the best grid point; the
boundary limits are evaluated in closed form and win ties.
"""

from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from matcore.extreal import ExtReal

from .profiles import profile_for
from .results import HoeffdingResult

logger = logging.getLogger(__name__)

GRID_POINTS = 512
REFINE_TOL = 1e-8


def legendre_sup(
    objective: Callable[[float], float],
    low_limit: float,
    high_limit: float,
    points: int = GRID_POINTS,
    tol: float = REFINE_TOL,
) -> tuple[float, float, bool]:
    """Supremum over (0, 1); returns (value, parameter, attained at a boundary)."""
    params = (np.arange(points) + 1.0) / (points + 1.0)
    values = np.array([objective(float(p)) for p in params])
    i = int(np.argmax(values))
    best, arg = float(values[i]), float(params[i])

    boundary_value, boundary_arg = (high_limit, 1.0) if high_limit >= low_limit else (low_limit, 0.0)
    if boundary_value >= best:
        return boundary_value, boundary_arg, True
    if math.isinf(best):
        return best, arg, False

    lo = params[i - 1] if i > 0 else params[0] / 2
    hi = params[i + 1] if i < points - 1 else (1.0 + params[-1]) / 2
    refined = minimize_scalar(
        lambda p: -objective(p), bounds=(float(lo), float(hi)), method="bounded", options={"xatol": tol}
    )
    if refined.success and -refined.fun > best:
        best, arg = float(-refined.fun), float(refined.x)
    logger.debug(f"legendre sup {best:.12g} at parameter {arg:.8f}")
    return best, arg, False


def hoeffding(r: float, a, b=None, points: int = GRID_POINTS) -> HoeffdingResult:
    """sup_{α∈(0,1)} ((α−1)/α)(r − D_α(A‖B)) with the Petz family."""
    profile = profile_for(a, b)
    resolution = 1.0 / (points + 1)
    log_a0b = profile.log_tr_a0_b()
    if math.isinf(log_a0b) or r < -log_a0b:
        return HoeffdingResult(ExtReal.inf(), 0.0, resolution, at_boundary=True)

    def objective(alpha: float) -> float:
        return ((alpha - 1) / alpha) * r - profile.petz_log_q(alpha) / alpha

    value, alpha, boundary = legendre_sup(objective, -math.inf, -profile.log_tr_a_b0(), points)
    return HoeffdingResult(ExtReal(value), alpha, resolution, at_boundary=boundary)


def hoeffding_star(r: float, a, b=None, points: int = GRID_POINTS) -> HoeffdingResult:
    """sup_{α>1} ((α−1)/α)(r − D*_α(A‖B)), parametrized by u = (α−1)/α."""
    profile = profile_for(a, b)
    resolution = 1.0 / (points + 1)
    if math.isinf(profile.log_trace_a()):
        # A = 0: the α → 1 limit −log Tr A is already +inf.
        return HoeffdingResult(ExtReal.inf(), 1.0, resolution, at_boundary=True)
    if not profile.supported:
        return HoeffdingResult(ExtReal.neg_inf(), 1.0, resolution, at_boundary=True)

    def objective(u: float) -> float:
        return u * r - (1 - u) * profile.sandwiched_log_q(1.0 / (1.0 - u))

    value, u, boundary = legendre_sup(
        objective, -profile.log_trace_a(), r - profile.d_max(), points
    )
    alpha = math.inf if u >= 1.0 else 1.0 / (1.0 - u)
    return HoeffdingResult(ExtReal(value), alpha, resolution, at_boundary=boundary)
