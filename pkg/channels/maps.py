"""
Completely positive maps stored by their Choi matrix

    C = Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)

with the reference copy of the input first and the output second. A Kraus
operator K contributes vec(K) vec(K)* with column-stacking vec.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
from django.utils.translation import gettext_lazy as _

from matcore.exceptions import DomainError
from matcore.linalg import Operand, as_array, eigh, hermitian, is_psd, kron, partial_trace
from matcore.sampling import complex_gaussian

logger = logging.getLogger(__name__)

TP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausSet:
    operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        ops = tuple(as_array(k) for k in self.operators)
        if not ops or len({k.shape for k in ops}) != 1 or ops[0].ndim != 2:
            raise DomainError(_("Kraus operators must be matrices of one shape."))
        object.__setattr__(self, "operators", ops)

    @property
    def dim_in(self) -> int:
        return self.operators[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.operators[0].shape[0]

    def is_complete(self, tol: float = TP_TOL) -> bool:
        total = sum(k.conj().T @ k for k in self.operators)
        return bool(np.linalg.norm(total - np.eye(self.dim_in)) <= tol)


@dataclass(frozen=True, eq=False)
class CpMap:
    dim_in: int
    dim_out: int
    choi: np.ndarray

    def __post_init__(self) -> None:
        choi = hermitian(as_array(self.choi))
        size = self.dim_in * self.dim_out
        if self.dim_in < 1 or self.dim_out < 1 or choi.shape != (size, size):
            raise DomainError(
                _("Choi matrix must be (dim_in·dim_out)-square."),
                dim_in=self.dim_in,
                dim_out=self.dim_out,
                shape=choi.shape,
            )
        if not is_psd(choi):
            raise DomainError(_("Choi matrix is not positive semidefinite."))
        object.__setattr__(self, "choi", choi)

    @property
    def trace_preserving(self) -> bool:
        reduced = partial_trace(self.choi, [self.dim_in, self.dim_out], 2)
        return bool(np.abs(reduced - np.eye(self.dim_in)).max() <= TP_TOL)

    def scaled(self, c: float) -> CpMap:
        if c < 0:
            raise DomainError(_("CP maps scale by nonnegative factors."), factor=c)
        return CpMap(self.dim_in, self.dim_out, c * self.choi)

    def __call__(self, rho: Operand) -> np.ndarray:
        return apply(self, rho)


def choi_from_kraus(ks: KrausSet | Sequence[Operand]) -> CpMap:
    ks = ks if isinstance(ks, KrausSet) else KrausSet(tuple(ks))
    vecs = np.array([k.T.reshape(-1) for k in ks.operators])
    return CpMap(ks.dim_in, ks.dim_out, vecs.T @ vecs.conj())


def kraus_from_choi(cp: CpMap, tol: float = 1e-12) -> KrausSet:
    decomposition = eigh(cp.choi)
    cutoff = tol * max(float(decomposition.eigenvalues[-1]), 1.0)
    ops = [
        np.sqrt(lam) * w.reshape(cp.dim_in, cp.dim_out).T
        for lam, w in zip(decomposition.eigenvalues, decomposition.eigenvectors.T)
        if lam > cutoff
    ]
    if not ops:
        ops = [np.zeros((cp.dim_out, cp.dim_in), dtype=complex)]
    return KrausSet(tuple(ops))


def apply(cp: CpMap, rho: Operand) -> np.ndarray:
    """Tr_ref[(ρ^T ⊗ I) C]."""
    rho = as_array(rho)
    if rho.shape != (cp.dim_in, cp.dim_in):
        raise DomainError(_("Input state has the wrong dimension."), expected=cp.dim_in, shape=rho.shape)
    product = np.kron(rho.T, np.eye(cp.dim_out)) @ cp.choi
    return hermitian(partial_trace(product, [cp.dim_in, cp.dim_out], 1))


def _apply_to_output(choi: np.ndarray, dim_ref: int, ks: KrausSet) -> np.ndarray:
    lifted = [np.kron(np.eye(dim_ref), k) for k in ks.operators]
    return sum(k @ choi @ k.conj().T for k in lifted)


def compose(f: CpMap, e: CpMap) -> CpMap:
    """F ∘ E."""
    if f.dim_in != e.dim_out:
        raise DomainError(_("Cannot compose maps with mismatched dimensions."), inner=e.dim_out, outer=f.dim_in)
    return CpMap(e.dim_in, f.dim_out, _apply_to_output(e.choi, e.dim_in, kraus_from_choi(f)))


def tensor(e: CpMap, f: CpMap) -> CpMap:
    """E ⊗ F with the Choi reordered to (ref_E ⊗ ref_F) ⊗ (out_E ⊗ out_F)."""
    product = kron(e.choi, f.choi)
    dims = (e.dim_in, e.dim_out, f.dim_in, f.dim_out)
    reordered = product.reshape(dims + dims).transpose(0, 2, 1, 3, 4, 6, 5, 7)
    size = e.dim_in * e.dim_out * f.dim_in * f.dim_out
    return CpMap(e.dim_in * f.dim_in, e.dim_out * f.dim_out, reordered.reshape(size, size))


def tensor_power(cp: CpMap, n: int) -> CpMap:
    if n < 1:
        raise DomainError(_("Tensor power must be positive."), n=n)
    return reduce(tensor, [cp] * n)


def choi_in_basis(cp: CpMap, u: Operand) -> np.ndarray:
    """Choi matrix with respect to the rotated reference vector (U ⊗ I)|Ψ⟩."""
    lift = np.kron(as_array(u), np.eye(cp.dim_out))
    return hermitian(lift @ cp.choi @ lift.conj().T)


def from_choi_in_basis(dim_in: int, dim_out: int, choi: Operand, u: Operand) -> CpMap:
    lift = np.kron(as_array(u), np.eye(dim_out))
    return CpMap(dim_in, dim_out, lift.conj().T @ as_array(choi) @ lift)


def identity_channel(d: int) -> CpMap:
    return choi_from_kraus([np.eye(d)])


def unitary_channel(u: Operand) -> CpMap:
    return choi_from_kraus([as_array(u)])


def completely_depolarizing(dim_in: int, dim_out: int | None = None) -> CpMap:
    dim_out = dim_in if dim_out is None else dim_out
    return CpMap(dim_in, dim_out, np.eye(dim_in * dim_out) / dim_out)


def depolarizing(d: int, p: float) -> CpMap:
    """ρ ↦ (1 − p)ρ + p Tr(ρ) I/d."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(_("Depolarizing parameter must lie in [0, 1]."), p=p)
    return CpMap(d, d, (1 - p) * identity_channel(d).choi + p * completely_depolarizing(d).choi)


def replacer(a: Operand, dim_in: int) -> CpMap:
    """ρ ↦ Tr(ρ) A."""
    a = as_array(a)
    return CpMap(dim_in, a.shape[0], np.kron(np.eye(dim_in), a))


def random_channel(rng: np.random.Generator, dim_in: int, dim_out: int, kraus_rank: int | None = None) -> CpMap:
    """Trace-preserving map from a random isometry split into Kraus blocks."""
    rank = dim_in * dim_out if kraus_rank is None else kraus_rank
    if dim_out * rank < dim_in:
        raise DomainError(_("Kraus rank too small for a trace-preserving map."), rank=rank)
    isometry, _r = np.linalg.qr(complex_gaussian(rng, dim_out * rank, dim_in))
    return choi_from_kraus([isometry[k * dim_out:(k + 1) * dim_out] for k in range(rank)])
