from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Iterable, Sequence, Union

import numpy as np
from scipy.linalg import block_diag

from django.utils.translation import gettext_lazy as _

from .conf import numerics
from .exceptions import ConvergenceError, DomainError, PreconditionError, ResourceCapError

logger = logging.getLogger(__name__)

ScalarMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class PsdMatrix:
    """Validated positive semi-definite matrix (symmetrized on construction)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DomainError(_("A PSD matrix must be square and non-empty."), shape=arr.shape)
        arr = hermitian(arr)
        eigenvalues = np.linalg.eigvalsh(arr)
        scale = max(1.0, float(np.abs(eigenvalues).max()))
        if eigenvalues[0] < -numerics().psd_tol * scale:
            raise DomainError(
                _("Matrix is not positive semi-definite."),
                lambda_min=float(eigenvalues[0]),
            )
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @classmethod
    def from_entries(cls, dim: int, re: Sequence[float], im: Sequence[float] | None = None) -> PsdMatrix:
        real = np.asarray(re, dtype=float).reshape(dim, dim)
        imag = np.zeros_like(real) if im is None else np.asarray(im, dtype=float).reshape(dim, dim)
        return cls(real + 1j * imag)

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return self.data if dtype is None else self.data.astype(dtype)


Operand = Union[PsdMatrix, np.ndarray]


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values: np.ndarray | None = None) -> np.ndarray:
        lam = self.eigenvalues if values is None else values
        return (self.eigenvectors * lam) @ self.eigenvectors.conj().T

    def cutoff(self, scale: float | None = None) -> float:
        """Eigenvalues at or below this count as zero.

        ``scale`` is the size of the operands the matrix was derived from; a
        product that is rounding noise relative to them has no support.
        """
        top = float(np.abs(self.eigenvalues).max()) if self.eigenvalues.size else 0.0
        return numerics().eig_zero_tol * max(top, scale or 0.0)

    def support_mask(self, scale: float | None = None) -> np.ndarray:
        return self.eigenvalues > self.cutoff(scale)


def as_array(x: Operand | Sequence) -> np.ndarray:
    return np.asarray(x.data if isinstance(x, PsdMatrix) else x, dtype=complex)


def hermitian(x: np.ndarray) -> np.ndarray:
    return (x + x.conj().T) / 2


def eigh(a: Operand) -> SpectralDecomposition:
    arr = hermitian(as_array(a))
    try:
        lam, vecs = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(_("Hermitian eigensolver failed."), reason=str(exc)) from exc
    decomposition = SpectralDecomposition(lam, vecs)
    residual = float(np.linalg.norm(decomposition.reconstruct() - arr))
    bound = 1e-10 * max(1.0, float(np.linalg.norm(arr)))
    if residual > bound:
        raise ConvergenceError(
            _("Eigendecomposition residual above bound."),
            residual=residual,
            bound=bound,
        )
    return decomposition


def mat_fn(a: Operand, f: ScalarMap, zero_value: float = 0.0, scale: float | None = None) -> np.ndarray:
    """Apply ``f`` on the support of a PSD matrix and ``zero_value`` elsewhere."""
    decomposition = eigh(a)
    mask = decomposition.support_mask(scale)
    values = np.full(decomposition.eigenvalues.shape, float(zero_value))
    if mask.any():
        with np.errstate(all="ignore"):
            mapped = np.asarray(f(decomposition.eigenvalues[mask]), dtype=float)
        if not np.all(np.isfinite(mapped)):
            raise DomainError(
                _("Function undefined at a positive eigenvalue."),
                eigenvalues=decomposition.eigenvalues[mask][~np.isfinite(mapped)].tolist(),
            )
        values[mask] = mapped
    return hermitian(decomposition.reconstruct(values))


def hermitian_fn(h: Operand, f: ScalarMap) -> np.ndarray:
    """Functional calculus on every eigenvalue of a Hermitian matrix."""
    decomposition = eigh(h)
    with np.errstate(all="ignore"):
        values = np.asarray(f(decomposition.eigenvalues), dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError(_("Function undefined on the spectrum."))
    return hermitian(decomposition.reconstruct(values))


def support_proj(a: Operand, scale: float | None = None) -> np.ndarray:
    decomposition = eigh(a)
    vecs = decomposition.eigenvectors[:, decomposition.support_mask(scale)]
    return vecs @ vecs.conj().T


def rank(a: Operand) -> int:
    return int(eigh(a).support_mask().sum())


def psd_power(a: Operand, p: float, scale: float | None = None) -> np.ndarray:
    # 0^p = 0 for every p; p = 0 yields the support projection.
    if p == 0:
        return support_proj(a, scale)
    return mat_fn(a, lambda x: np.power(x, p), scale=scale)


def pinv_psd(a: Operand, scale: float | None = None) -> np.ndarray:
    return psd_power(a, -1.0, scale)


def operator_scale(*operands: Operand) -> float:
    """Largest spectral norm among the operands."""
    return max((float(np.linalg.norm(as_array(x), 2)) for x in operands), default=0.0)


def acc_part(a: Operand, b: Operand) -> np.ndarray:
    """Absolutely continuous part of ``a`` with respect to ``b``.

    Largest X <= a whose support lies in supp(b).
    """
    a_arr = hermitian(as_array(a))
    p = support_proj(b)
    if round(float(np.trace(p).real)) == p.shape[0]:
        return a_arr
    pc = np.eye(p.shape[0]) - p
    # The compression inherits the rounding noise of a, so judge it on a's scale.
    inner = pinv_psd(pc @ a_arr @ pc, scale=operator_scale(a_arr))
    result = p @ a_arr @ p - p @ a_arr @ inner @ a_arr @ p
    return hermitian(result)


def lambda_min(h: Operand) -> float:
    return float(np.linalg.eigvalsh(hermitian(as_array(h)))[0])


def lambda_max(h: Operand) -> float:
    return float(np.linalg.eigvalsh(hermitian(as_array(h)))[-1])


def loewner_margin(a: Operand, b: Operand) -> float:
    """λ_min(b − a); nonnegative iff a <= b."""
    return lambda_min(as_array(b) - as_array(a))


def is_psd(a: Operand, tol: float | None = None) -> bool:
    arr = as_array(a)
    lam = np.linalg.eigvalsh(hermitian(arr))
    tol = numerics().psd_tol if tol is None else tol
    return bool(lam[0] >= -tol * max(1.0, float(np.abs(lam).max())))


def projector_leq(p: np.ndarray, q: np.ndarray, tol: float = 1e-8) -> bool:
    """Range inclusion of projection ``p`` in projection ``q``."""
    residual = np.linalg.norm(p - q @ p)
    return bool(residual <= tol)


def commutator_norm(a: Operand, b: Operand) -> float:
    x, y = as_array(a), as_array(b)
    return float(np.linalg.norm(x @ y - y @ x))


def _check_cap(dim: int) -> None:
    cap = numerics().dim_cap
    if dim > cap:
        raise ResourceCapError(
            _("Dimension %(dim)s exceeds the cap %(cap)s.") % {"dim": dim, "cap": cap},
            dim=dim,
            cap=cap,
        )


def kron(a: Operand, b: Operand) -> np.ndarray:
    x, y = as_array(a), as_array(b)
    _check_cap(x.shape[0] * y.shape[0])
    return np.kron(x, y)


def kron_power(a: Operand, n: int) -> np.ndarray:
    arr = as_array(a)
    if n < 0:
        raise DomainError(_("Tensor power must be nonnegative."), n=n)
    _check_cap(arr.shape[0] ** n)
    if n == 0:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, [arr] * n)


def direct_sum(blocks: Iterable[Operand]) -> np.ndarray:
    return block_diag(*[as_array(b) for b in blocks])


def partial_trace(m: Operand, dims: Sequence[int], which: int | Iterable[int]) -> np.ndarray:
    """Trace out the 1-based tensor factor(s) ``which`` of ``m``."""
    arr = as_array(m)
    dims = list(dims)
    if int(np.prod(dims)) != arr.shape[0]:
        raise DomainError(_("Factor dimensions do not match the matrix."), dims=dims, shape=arr.shape)
    traced = sorted({which} if isinstance(which, int) else set(which), reverse=True)
    if any(k < 1 or k > len(dims) for k in traced):
        raise DomainError(_("Factor index out of range."), which=traced)
    n = len(dims)
    tensor = arr.reshape(dims + dims)
    for k in traced:
        tensor = np.trace(tensor, axis1=k - 1, axis2=k - 1 + n)
        n -= 1
        dims.pop(k - 1)
    d = int(np.prod(dims)) if dims else 1
    return tensor.reshape(d, d)


@dataclass(frozen=True)
class JointDiagonalization:
    basis: np.ndarray
    diagonals: np.ndarray  # shape (members, dim), real

    def member(self, i: int) -> np.ndarray:
        return (self.basis * self.diagonals[i]) @ self.basis.conj().T


def _offdiag_norm(x: np.ndarray) -> float:
    return float(np.linalg.norm(x - np.diag(np.diag(x))))


def joint_diagonalize(members: Sequence[Operand], attempts: int = 5) -> JointDiagonalization:
    arrays = [hermitian(as_array(m)) for m in members]
    if not arrays:
        raise DomainError(_("Empty family."))
    tol = numerics().commute_tol
    worst = max(
        (commutator_norm(x, y) for i, x in enumerate(arrays) for y in arrays[i + 1:]),
        default=0.0,
    )
    if worst > tol:
        raise PreconditionError(
            _("Family does not commute (worst commutator norm %(norm).3e).") % {"norm": worst},
            worst_commutator=worst,
        )
    dim = arrays[0].shape[0]
    if all(_offdiag_norm(x) <= tol for x in arrays):
        diagonals = np.array([np.real(np.diag(x)) for x in arrays])
        return JointDiagonalization(np.eye(dim, dtype=complex), diagonals)

    rng = np.random.default_rng(0)
    residual = np.inf
    for attempt in range(attempts):
        weights = rng.standard_normal(len(arrays))
        basis = eigh(sum(w * x for w, x in zip(weights, arrays))).eigenvectors
        rotated = [basis.conj().T @ x @ basis for x in arrays]
        residual = max(
            _offdiag_norm(r) / max(1.0, float(np.linalg.norm(x)))
            for r, x in zip(rotated, arrays)
        )
        if residual <= 1e-8:
            diagonals = np.array([np.real(np.diag(r)) for r in rotated])
            return JointDiagonalization(basis, diagonals)
        logger.debug(f"joint diagonalization attempt {attempt} residual {residual:.3e}")
    raise ConvergenceError(_("Joint diagonalization failed."), residual=residual)
