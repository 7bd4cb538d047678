from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from django.db import models
from django.utils.translation import gettext_lazy as _

from matcore.conf import numerics
from matcore.exceptions import ConvergenceError, DomainError
from matcore.linalg import (
    Operand,
    acc_part,
    as_array,
    eigh,
    hermitian,
    hermitian_fn,
    joint_diagonalize,
    mat_fn,
    operator_scale,
    projector_leq,
    psd_power,
    support_proj,
)

from .functions import ScalarFn

logger = logging.getLogger(__name__)

DEFAULT_EPS_PATH = tuple(10.0 ** (-k) for k in range(1, 13))


class SupportCondition(models.TextChoices):
    EQUAL_SUPPORTS = "S1", _("A and B have equal supports")
    FINITE_LIMITS = "S2", _("f(0+) and its transpose limit are finite")
    LEFT_CONTAINED = "S3", _("f(0+) finite and supp A within supp B")
    RIGHT_CONTAINED = "S4", _("transpose limit finite and supp B within supp A")


class AltMeanKind(models.TextChoices):
    G = "G", _("Outer power, A-sandwich")
    GTILDE = "Gtilde", _("Outer power, B-sandwich")
    GHAT = "Ghat", _("Power of the Kubo-Ando mean of powers")
    LOG_EUCLID = "LogEuclid", _("Log-Euclidean mean")


@dataclass(frozen=True, eq=False)
class WeightedFamily:
    members: tuple[np.ndarray, ...]
    weights: np.ndarray = field(default=None)

    def __post_init__(self) -> None:
        members = tuple(as_array(m) for m in self.members)
        if not members:
            raise DomainError(_("A weighted family needs at least one member."))
        if len({m.shape for m in members}) != 1:
            raise DomainError(_("Family members must share one dimension."))
        weights = (
            np.full(len(members), 1.0 / len(members))
            if self.weights is None
            else np.asarray(self.weights, dtype=float)
        )
        if weights.shape != (len(members),):
            raise DomainError(_("One weight per member is required."))
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise DomainError(_("Weights must form a probability vector."), weights=weights.tolist())
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return self.members[0].shape[0]


def _is_pd(a: np.ndarray) -> bool:
    lam = np.linalg.eigvalsh(hermitian(a))
    return bool(lam[0] > numerics().eig_zero_tol * max(abs(lam[-1]), 1e-300))


def support_conditions(f: ScalarFn, a: Operand, b: Operand) -> list[SupportCondition]:
    pa, pb = support_proj(a), support_proj(b)
    found = []
    if np.linalg.norm(pa - pb) <= 1e-8:
        found.append(SupportCondition.EQUAL_SUPPORTS)
    if f.limit_at_zero.is_finite and f.transpose_limit_at_zero.is_finite:
        found.append(SupportCondition.FINITE_LIMITS)
    if f.limit_at_zero.is_finite and projector_leq(pa, pb):
        found.append(SupportCondition.LEFT_CONTAINED)
    if f.transpose_limit_at_zero.is_finite and projector_leq(pb, pa):
        found.append(SupportCondition.RIGHT_CONTAINED)
    return found


def _perspective_pd(f: ScalarFn, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    decomposition = eigh(b)
    lam, vecs = decomposition.eigenvalues, decomposition.eigenvectors
    half = (vecs * np.sqrt(lam)) @ vecs.conj().T
    inv_half = (vecs / np.sqrt(lam)) @ vecs.conj().T
    inner = eigh(hermitian(inv_half @ a @ inv_half))
    with np.errstate(all="ignore"):
        values = np.asarray(f(np.clip(inner.eigenvalues, 0.0, None)), dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError(_("Function undefined on the regularized spectrum."), label=f.label)
    return hermitian(half @ inner.reconstruct(values) @ half)


def perspective(
    f: ScalarFn,
    a: Operand,
    b: Operand,
    eps_path: Sequence[float] | None = None,
    *,
    conditions: Iterable[SupportCondition] | None = None,
    shift: np.ndarray | None = None,
) -> np.ndarray:
    """Operator perspective B^{1/2} f(B^{-1/2} A B^{-1/2}) B^{1/2}.

    Singular arguments are handled as the limit of (A + εS, B + εS) along
    ``eps_path``; ``shift`` is S (identity by default).
    """
    a_arr, b_arr = hermitian(as_array(a)), hermitian(as_array(b))
    if a_arr.shape != b_arr.shape:
        raise DomainError(_("Perspective arguments must share a dimension."))
    if _is_pd(a_arr) and _is_pd(b_arr):
        return _perspective_pd(f, a_arr, b_arr)

    declared = list(conditions) if conditions is not None else support_conditions(f, a_arr, b_arr)
    if not declared:
        logger.warning(f"perspective of {f.label}: no support condition holds, limit may not exist")
    s = np.eye(a_arr.shape[0]) if shift is None else as_array(shift)
    path = DEFAULT_EPS_PATH if eps_path is None else tuple(eps_path)
    if not path:
        raise DomainError(_("Empty regularization path."))
    tol = numerics().persp_tol
    iterates: list[np.ndarray] = []
    for eps in path:
        iterates = [*iterates[-1:], _perspective_pd(f, a_arr + eps * s, b_arr + eps * s)]
        if len(iterates) == 2:
            gap = float(np.linalg.norm(iterates[1] - iterates[0]))
            logger.debug(f"perspective {f.label} eps={eps:.1e} gap={gap:.3e}")
            if gap < tol:
                return iterates[1]
    raise ConvergenceError(
        _("Perspective did not converge along the regularization path."),
        iterates=tuple(iterates),
    )


class KaCurve:
    """t ↦ B #_t A with the t-independent spectral data computed once."""

    def __init__(self, a: Operand, b: Operand) -> None:
        self.a = hermitian(as_array(a))
        self.b = hermitian(as_array(b))
        if self.a.shape != self.b.shape:
            raise DomainError(_("Mean arguments must share a dimension."))
        b_part = acc_part(self.b, self.a)
        a_part = acc_part(self.a, self.b)
        b_scale = operator_scale(self.b)
        self._outer = psd_power(b_part, 0.5, b_scale)
        inv_half = psd_power(b_part, -0.5, b_scale)
        self._inner = eigh(hermitian(inv_half @ a_part @ inv_half))
        # inner <= ‖inv_half‖²‖a‖, so its support is judged on that scale.
        self._mask = self._inner.support_mask(operator_scale(self.a) * operator_scale(inv_half) ** 2)

    def __call__(self, t: float) -> np.ndarray:
        if not 0.0 <= t <= 1.0:
            raise DomainError(_("Mean weight must lie in [0, 1]."), t=t)
        if t == 0.0:
            return self.b.copy()
        if t == 1.0:
            return self.a.copy()
        values = np.zeros_like(self._inner.eigenvalues)
        values[self._mask] = self._inner.eigenvalues[self._mask] ** t
        return hermitian(self._outer @ self._inner.reconstruct(values) @ self._outer)

    def batch(self, ts: Sequence[float]) -> np.ndarray:
        """Stack of means for many weights; shape (len(ts), d, d)."""
        ts = np.asarray(ts, dtype=float)
        vecs = self._inner.eigenvectors
        lam = np.where(self._mask, self._inner.eigenvalues, 0.0)
        interior = np.clip(ts, 1e-300, 1.0)[:, None]
        powers = np.where(self._mask[None, :], np.power(lam[None, :], interior), 0.0)
        middle = np.einsum("ij,tj,kj->tik", vecs, powers, vecs.conj())
        stack = self._outer @ middle @ self._outer
        stack = (stack + np.conj(np.swapaxes(stack, 1, 2))) / 2
        stack[ts == 0.0] = self.b
        stack[ts == 1.0] = self.a
        return stack


def ka_mean(a: Operand, b: Operand, t: float) -> np.ndarray:
    """Weighted Kubo-Ando geometric mean B #_t A (weight t on A)."""
    if t == 0.0:
        return hermitian(as_array(b))
    if t == 1.0:
        return hermitian(as_array(a))
    return KaCurve(a, b)(t)


def log_euclid_support_limit(a: Operand, b: Operand, t: float) -> np.ndarray:
    """Limit of exp(t log(A+εI) + (1-t) log(B+εI)) as ε → 0.

    Equals P exp(t P log A P + (1-t) P log B P) P on P = A⁰ ∧ B⁰.
    """
    a_arr, b_arr = hermitian(as_array(a)), hermitian(as_array(b))
    dim = a_arr.shape[0]
    identity = np.eye(dim)
    # Sum of two projections: unit scale.
    outside = support_proj((identity - support_proj(a_arr)) + (identity - support_proj(b_arr)), scale=1.0)
    meet = eigh(identity - outside)
    basis = meet.eigenvectors[:, meet.eigenvalues > 0.5]
    if basis.shape[1] == 0:
        return np.zeros((dim, dim), dtype=complex)
    log_a, log_b = mat_fn(a_arr, np.log), mat_fn(b_arr, np.log)
    exponent = basis.conj().T @ (t * log_a + (1 - t) * log_b) @ basis
    return hermitian(basis @ hermitian_fn(exponent, np.exp) @ basis.conj().T)


def alt_mean(kind: AltMeanKind | str, a: Operand, b: Operand, t: float, z: float = 1.0) -> np.ndarray:
    kind = AltMeanKind(kind)
    if not 0.0 < t < 1.0:
        raise DomainError(_("Rival means take a weight in (0, 1)."), t=t)
    if not z > 0:
        raise DomainError(_("The power parameter z must be positive."), z=z)
    a_arr, b_arr = hermitian(as_array(a)), hermitian(as_array(b))

    if kind == AltMeanKind.LOG_EUCLID:
        if not (_is_pd(a_arr) and _is_pd(b_arr)):
            raise DomainError(_("The log-Euclidean mean needs positive definite arguments."))
        exponent = t * mat_fn(a_arr, np.log) + (1 - t) * mat_fn(b_arr, np.log)
        return hermitian_fn(exponent, np.exp)
    if kind == AltMeanKind.GHAT:
        if math.isinf(z):
            return log_euclid_support_limit(a_arr, b_arr, t)
        return psd_power(ka_mean(psd_power(a_arr, 1 / z), psd_power(b_arr, 1 / z), t), z)
    if math.isinf(z):
        raise DomainError(_("z = +inf is only defined for Ghat."), kind=kind)
    if kind == AltMeanKind.G:
        side = psd_power(a_arr, t / (2 * z))
        return psd_power(hermitian(side @ psd_power(b_arr, (1 - t) / z) @ side), z)
    side = psd_power(b_arr, (1 - t) / (2 * z))
    return psd_power(hermitian(side @ psd_power(a_arr, t / z) @ side), z)


def commuting_gm(family: WeightedFamily) -> np.ndarray:
    """exp(Σ_y ν(y) log A_y) for commuting members, with 0^0 = 1."""
    joint = joint_diagonalize(family.members)
    diagonals = joint.diagonals.copy()
    for row in diagonals:
        row[row <= numerics().eig_zero_tol * max(float(np.abs(row).max()), 1e-300)] = 0.0
    active = family.weights > 0
    used = diagonals[active]
    weights = family.weights[active]
    vanishing = np.any(used == 0.0, axis=0)
    with np.errstate(divide="ignore"):
        logs = np.where(used > 0, np.log(np.where(used > 0, used, 1.0)), 0.0)
    values = np.where(vanishing, 0.0, np.exp(weights @ logs))
    return hermitian((joint.basis * values) @ joint.basis.conj().T)
