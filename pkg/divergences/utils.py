from __future__ import annotations

import math

import numpy as np
from django.utils.translation import gettext_lazy as _

from matcore.exceptions import DomainError
from matcore.extreal import ExtReal
from matcore.linalg import Operand, as_array, hermitian, mat_fn

from .atoms import ClassicalPair, MaxRelativeEntropy
from .profiles import MatrixProfile
from .results import DivergenceValue


def _profile(a: Operand, b: Operand) -> MatrixProfile:
    profile = MatrixProfile(a, b)
    if profile.a_zero or profile.b_zero:
        raise DomainError(_("Divergence arguments must be nonzero."))
    return profile


def _from_log_q(log_q: float, alpha: float) -> DivergenceValue:
    if math.isinf(log_q):
        # log Q = -inf with α < 1, or +inf (support failure) with α > 1
        return DivergenceValue(ExtReal.inf())
    return DivergenceValue(ExtReal(log_q / (alpha - 1)))


def petz_renyi(alpha: float, a: Operand, b: Operand) -> DivergenceValue:
    if not 0.0 < alpha < 1.0:
        raise DomainError(_("Petz divergences are used for α in (0, 1)."), alpha=alpha)
    return _from_log_q(_profile(a, b).petz_log_q(alpha), alpha)


def sandwiched_renyi(alpha: float, a: Operand, b: Operand) -> DivergenceValue:
    if not alpha > 1.0 or math.isinf(alpha):
        raise DomainError(_("Sandwiched divergences are used for finite α > 1."), alpha=alpha)
    return _from_log_q(_profile(a, b).sandwiched_log_q(alpha), alpha)


def relative_entropy(a: Operand, b: Operand) -> DivergenceValue:
    """Tr A(log A − log B), or +inf unless supp A ⊆ supp B."""
    profile = _profile(a, b)
    if not profile.supported:
        return DivergenceValue(ExtReal.inf())
    a_arr, b_arr = hermitian(as_array(a)), hermitian(as_array(b))
    gap = mat_fn(a_arr, np.log) - mat_fn(b_arr, np.log)
    return DivergenceValue(ExtReal(float(np.trace(a_arr @ gap).real)))


def max_relative_entropy(a: Operand, b: Operand) -> MaxRelativeEntropy:
    """D_max, the maximizing atoms X_∞ and r_∞ = −log σ(X_∞) of a commuting pair.

    Atom indices refer to the joint eigenbasis (coordinates for diagonal input).
    """
    return ClassicalPair.from_commuting(a, b).max_relative_entropy()


def max_relative_entropy_quantum(a: Operand, b: Operand) -> DivergenceValue:
    return DivergenceValue(ExtReal(_profile(a, b).d_max()))
