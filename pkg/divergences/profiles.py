"""
Rényi profiles: everything the divergence and Hoeffding routines need from a
pair (A, B), precomputed once so that α-sweeps are cheap.

``MatrixProfile`` works on arbitrary PSD pairs; ``atoms.ClassicalPair`` is the
commuting counterpart stored as weighted atoms.
"""

from __future__ import annotations

import math
from typing import Protocol, runtime_checkable

import numpy as np
from scipy.special import logsumexp
from django.utils.translation import gettext_lazy as _

from matcore.conf import numerics
from matcore.exceptions import DomainError
from matcore.linalg import Operand, as_array, eigh, hermitian

# Overlaps below this are rounding noise between orthogonal eigenvectors.
_OVERLAP_FLOOR = 1e-20


def _subspace_tol() -> float:
    # Eigenvectors just above the zero cutoff are accurate to about eps / eig_zero_tol.
    return math.sqrt(numerics().eig_zero_tol)


@runtime_checkable
class RenyiProfile(Protocol):
    supported: bool
    orthogonal: bool

    def petz_log_q(self, alpha: float) -> float: ...

    def sandwiched_log_q(self, alpha: float) -> float: ...

    def log_tr_a0_b(self) -> float: ...

    def log_tr_a_b0(self) -> float: ...

    def log_trace_a(self) -> float: ...

    def d_max(self) -> float: ...


class MatrixProfile:
    def __init__(self, a: Operand, b: Operand) -> None:
        a_arr, b_arr = hermitian(as_array(a)), hermitian(as_array(b))
        if a_arr.shape != b_arr.shape:
            raise DomainError(_("Divergence arguments must share a dimension."))
        ea, eb = eigh(a_arr), eigh(b_arr)
        mask_a, mask_b = ea.support_mask(), eb.support_mask()
        # A zero argument is allowed; the quantities below take their limits.
        self.a_zero, self.b_zero = not mask_a.any(), not mask_b.any()
        self.a_vals = ea.eigenvalues[mask_a]
        self.b_vals = eb.eigenvalues[mask_b]
        ua, ub = ea.eigenvectors[:, mask_a], eb.eigenvectors[:, mask_b]
        overlaps = np.abs(ua.conj().T @ ub) ** 2
        overlaps[overlaps < _OVERLAP_FLOOR] = 0.0
        self.overlaps = overlaps

        pa, pb = ua @ ua.conj().T, ub @ ub.conj().T
        tol = _subspace_tol()
        self.supported = bool(np.linalg.norm(pa - pb @ pa) <= tol)
        self.orthogonal = bool(np.linalg.norm(pa @ pb) <= tol)
        # A compressed to supp B, in B's eigenbasis.
        self._a_in_b = hermitian(ub.conj().T @ a_arr @ ub)

    def petz_log_q(self, alpha: float) -> float:
        """log Tr A^α B^{1-α}."""
        if self.orthogonal:
            return -math.inf
        exponents = alpha * np.log(self.a_vals)[:, None] + (1 - alpha) * np.log(self.b_vals)[None, :]
        return float(logsumexp(exponents, b=self.overlaps))

    def sandwiched_log_q(self, alpha: float) -> float:
        """log Tr (B^{(1-α)/2α} A B^{(1-α)/2α})^α; +inf off support."""
        if not self.supported:
            return math.inf
        if self.a_zero:
            return -math.inf
        mu = self._scaled_eigenvalues((1 - alpha) / (2 * alpha))
        return float(logsumexp(alpha * np.log(mu)))

    def _scaled_eigenvalues(self, gamma: float) -> np.ndarray:
        d = self.b_vals**gamma
        mu = np.linalg.eigvalsh(d[:, None] * self._a_in_b * d[None, :])
        return mu[mu > numerics().eig_zero_tol * max(float(mu[-1]), 1e-300)]

    def log_tr_a0_b(self) -> float:
        if self.orthogonal:
            return -math.inf
        logs = np.broadcast_to(np.log(self.b_vals)[None, :], self.overlaps.shape)
        return float(logsumexp(logs, b=self.overlaps))

    def log_tr_a_b0(self) -> float:
        if self.orthogonal:
            return -math.inf
        logs = np.broadcast_to(np.log(self.a_vals)[:, None], self.overlaps.shape)
        return float(logsumexp(logs, b=self.overlaps))

    def log_trace_a(self) -> float:
        if self.a_zero:
            return -math.inf
        return float(np.log(self.a_vals.sum()))

    def d_max(self) -> float:
        """log λ_max(B^{-1/2} A B^{-1/2}) on supports; +inf off support."""
        if not self.supported:
            return math.inf
        if self.a_zero:
            return -math.inf
        return float(np.log(self._scaled_eigenvalues(-0.5)[-1]))


def profile_for(a, b=None) -> RenyiProfile:
    """Wrap a matrix pair, or pass an existing profile through."""
    if b is None:
        if isinstance(a, RenyiProfile):
            return a
        raise DomainError(_("A second argument is required for matrix inputs."))
    return MatrixProfile(a, b)
