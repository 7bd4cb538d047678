from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from django.utils.translation import gettext_lazy as _

from matcore.conf import numerics
from matcore.exceptions import ConvergenceError, DomainError, ResourceCapError
from matcore.linalg import Operand
from means.utils import WeightedFamily, commuting_gm

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ClassicalInstance:
    """f over X and the columns g(·, y) over X × Y."""

    f: np.ndarray
    g: np.ndarray

    def __post_init__(self) -> None:
        f = np.asarray(self.f, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if f.ndim != 1 or g.ndim != 2 or g.shape[0] != f.size or g.shape[1] == 0:
            raise DomainError(_("Expected f over X and g over X × Y."), f_shape=f.shape, g_shape=g.shape)
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))):
            raise DomainError(_("Instance entries must be finite."))
        if np.any(f < 0) or np.any(g < 0):
            raise DomainError(_("Instance entries must be nonnegative."))
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)

    @property
    def size_x(self) -> int:
        return self.f.size

    @property
    def size_y(self) -> int:
        return self.g.shape[1]


@dataclass(frozen=True, eq=False)
class FeasibilityCertificate:
    feasible: bool
    measure: np.ndarray | None = None
    violated_x: int | tuple[int, ...] | None = None
    dual_witness: np.ndarray | None = None
    slack: float = 0.0
    copies: int = 1


def _log(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(x)


def gm_slack(inst: ClassicalInstance, nu: Sequence[float]) -> float:
    """min_x Σ_y ν(y) log g(x,y) − log f(x) over supp f, with 0·(−∞) = 0."""
    nu = np.asarray(nu, dtype=float)
    rows = np.flatnonzero(inst.f > 0)
    if rows.size == 0:
        return np.inf
    used = nu > 0
    logs = _log(inst.g[np.ix_(rows, np.flatnonzero(used))])
    totals = np.where(np.any(np.isneginf(logs), axis=1), -np.inf, np.nan_to_num(logs, neginf=0.0) @ nu[used])
    return float(np.min(totals - np.log(inst.f[rows])))


def witness_margin(inst: ClassicalInstance, r: Sequence[float]) -> float:
    """max_y Σ_x r(x) log(g(x,y)/f(x)); negative certifies infeasibility."""
    r = np.asarray(r, dtype=float)
    rows = np.flatnonzero(r > 0)
    logs = _log(inst.g[rows]) - np.log(inst.f[rows])[:, None]
    per_column = np.where(
        np.any(np.isneginf(logs), axis=0), -np.inf, np.nan_to_num(logs, neginf=0.0).T @ r[rows]
    )
    return float(per_column.max())


def _solve(**kwargs):
    result = linprog(method="highs", **kwargs)
    if result.status != 0:
        raise ConvergenceError(_("Linear program did not solve."), status=result.status, message=result.message)
    return result


def gm_feasibility(inst: ClassicalInstance) -> FeasibilityCertificate:
    """Is there ν with log f(x) ≤ Σ_y ν(y) log g(x,y) for every x?"""
    tol = numerics().lp_tol
    rows = np.flatnonzero(inst.f > 0)
    if rows.size == 0:
        return FeasibilityCertificate(True, measure=np.full(inst.size_y, 1.0 / inst.size_y), slack=np.inf)

    zero = inst.g[rows] == 0
    alive = ~np.any(zero, axis=0)
    killers = rows[np.any(zero, axis=1)]

    if not alive.any():
        witness = np.zeros(inst.size_x)
        witness[killers] = 1.0 / killers.size
        return FeasibilityCertificate(False, violated_x=int(killers[0]), dual_witness=witness, slack=-np.inf)

    payoff = np.log(inst.g[np.ix_(rows, np.flatnonzero(alive))]) - np.log(inst.f[rows])[:, None]
    m, n = payoff.shape[1], rows.size

    primal = _solve(
        c=np.r_[np.zeros(m), -1.0],
        A_ub=np.hstack([-payoff, np.ones((n, 1))]),
        b_ub=np.zeros(n),
        A_eq=np.r_[np.ones(m), 0.0][None, :],
        b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
    )
    margin = -float(primal.fun)
    nu_alive = np.clip(primal.x[:m], 0.0, None)
    nu_alive /= nu_alive.sum()
    logger.debug(f"gm feasibility margin {margin:.3e}")

    if margin >= -tol:
        measure = np.zeros(inst.size_y)
        measure[alive] = nu_alive
        return FeasibilityCertificate(True, measure=measure, slack=margin)

    dual = _solve(
        c=np.r_[np.zeros(n), 1.0],
        A_ub=np.hstack([payoff.T, -np.ones((m, 1))]),
        b_ub=np.zeros(m),
        A_eq=np.r_[np.ones(n), 0.0][None, :],
        b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)],
    )
    r = np.clip(dual.x[:n], 0.0, None)
    r /= r.sum()
    value = float(dual.fun)
    if killers.size:
        # Put a little mass on rows that zero out dropped columns.
        eta = min(0.5, abs(value) / (2.0 * (np.abs(payoff).max() + abs(value))))
        r = (1 - eta) * r
        r[np.isin(rows, killers)] += eta / killers.size
    witness = np.zeros(inst.size_x)
    witness[rows] = r
    violated = int(rows[np.argmin(payoff @ nu_alive)])
    return FeasibilityCertificate(False, violated_x=violated, dual_witness=witness, slack=margin)


def _tensor_logs(inst: ClassicalInstance, n: int) -> tuple[np.ndarray, np.ndarray]:
    log_f, log_g = _log(inst.f), _log(inst.g)
    f_n, g_n = log_f, log_g
    for _copy in range(n - 1):
        f_n = (f_n[:, None] + log_f[None, :]).ravel()
        g_n = (g_n[:, None, :] + log_g[None, :, :]).reshape(-1, inst.size_y)
    return f_n, g_n


def _check_rows(inst: ClassicalInstance, n: int) -> None:
    if n < 1:
        raise DomainError(_("Copy number must be positive."), n=n)
    cap = numerics().dim_cap
    if inst.size_x**n > cap:
        raise ResourceCapError(_("|X|^n exceeds the cap."), rows=inst.size_x**n, cap=cap)


def check_am_measure(inst: ClassicalInstance, n: int, mu: Sequence[float]) -> float:
    """min over x⃗ of Σ_y μ(y) g_y^⊗n(x⃗)/f^⊗n(x⃗) − 1."""
    _check_rows(inst, n)
    f_n, g_n = _tensor_logs(inst, n)
    live = np.isfinite(f_n)
    if not live.any():
        return np.inf
    ratios = np.exp(g_n[live] - f_n[live, None])
    return float((ratios @ np.asarray(mu, dtype=float)).min() - 1.0)


def am_feasibility_single_n(inst: ClassicalInstance, n: int) -> FeasibilityCertificate:
    """Is there μ with f^⊗n ≤ Σ_y μ(y) g_y^⊗n on X^n?"""
    _check_rows(inst, n)
    tol = numerics().lp_tol
    f_n, g_n = _tensor_logs(inst, n)
    live = np.flatnonzero(np.isfinite(f_n))
    if live.size == 0:
        return FeasibilityCertificate(True, measure=np.full(inst.size_y, 1.0 / inst.size_y), slack=np.inf, copies=n)

    ratios = np.exp(g_n[live] - f_n[live, None])
    m, rows = inst.size_y, live.size
    result = _solve(
        c=np.r_[np.zeros(m), -1.0],
        A_ub=np.hstack([-ratios, np.ones((rows, 1))]),
        b_ub=-np.ones(rows),
        A_eq=np.r_[np.ones(m), 0.0][None, :],
        b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
    )
    margin = -float(result.fun)
    mu = np.clip(result.x[:m], 0.0, None)
    mu /= mu.sum()
    logger.debug(f"am feasibility n={n} margin {margin:.3e}")
    if margin >= -tol:
        return FeasibilityCertificate(True, measure=mu, slack=margin, copies=n)

    weights = np.abs(result.ineqlin.marginals)
    witness = np.zeros(inst.size_x**n)
    if weights.sum() > 0:
        witness[live] = weights / weights.sum()
    worst = int(live[np.argmin(ratios @ mu)])
    violated = tuple(int(i) for i in np.unravel_index(worst, (inst.size_x,) * n))
    return FeasibilityCertificate(False, violated_x=violated, dual_witness=witness, slack=margin, copies=n)


def max_cr_commuting(members: Sequence[Operand], samples: Sequence[Sequence[float]]) -> list[np.ndarray]:
    """Commuting geometric means for each sampled weight vector."""
    return [commuting_gm(WeightedFamily(tuple(members), np.asarray(nu, dtype=float))) for nu in samples]
