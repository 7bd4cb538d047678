"""
Two-projection normal form.

Any pair of projections (S, Q) splits the space into two-dimensional blocks,
on which S = e e* and Q = φ φ* with φ = cos θ e + sin θ e⊥, and a remainder
H′ on which both act diagonally. The angles are read off the spectrum of
S + Q, whose eigenvalues strictly between 0 and 2 come in pairs 1 ± cos θ.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from django.utils.translation import gettext_lazy as _

from matcore.conf import numerics
from matcore.exceptions import DegeneracyError, DomainError
from matcore.linalg import as_array, eigh, hermitian

logger = logging.getLogger(__name__)

IDEMPOTENT_TOL = 1e-9
SPECTRUM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Projection:
    """Validated orthogonal projection (Hermitian and idempotent)."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        arr = as_array(self.matrix)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DomainError(_("A projection must be square and non-empty."), shape=arr.shape)
        if np.linalg.norm(arr - arr.conj().T) > IDEMPOTENT_TOL:
            raise DomainError(_("A projection must be Hermitian."))
        arr = hermitian(arr)
        defect = float(np.linalg.norm(arr @ arr - arr))
        if defect > IDEMPOTENT_TOL:
            raise DomainError(_("Matrix is not idempotent."), defect=defect)
        eigenvalues = np.linalg.eigvalsh(arr)
        if np.any(np.minimum(np.abs(eigenvalues), np.abs(eigenvalues - 1.0)) > SPECTRUM_TOL):
            raise DomainError(_("Projection eigenvalues must be 0 or 1."))
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @classmethod
    def onto(cls, vectors: np.ndarray) -> Projection:
        """Projection onto the span of the columns of ``vectors``."""
        q, r = np.linalg.qr(as_array(vectors))
        keep = np.abs(np.diag(r)) > 1e-12 * max(1.0, float(np.abs(r).max(initial=0.0)))
        basis = q[:, keep]
        return cls(basis @ basis.conj().T)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return int(round(float(np.trace(self.matrix).real)))

    def range_basis(self) -> np.ndarray:
        decomposition = eigh(self.matrix)
        return decomposition.eigenvectors[:, decomposition.eigenvalues > 0.5]

    def complement(self) -> Projection:
        return Projection(np.eye(self.dim) - self.matrix)

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return self.matrix if dtype is None else self.matrix.astype(dtype)


ProjectionLike = Union[Projection, np.ndarray]


def as_projection(p: ProjectionLike) -> Projection:
    return p if isinstance(p, Projection) else Projection(p)


@dataclass(frozen=True, eq=False)
class JordanBlock:
    theta: float
    e: np.ndarray
    e_perp: np.ndarray

    @property
    def cos(self) -> float:
        return math.cos(self.theta)

    @property
    def sin(self) -> float:
        return math.sin(self.theta)

    @property
    def phi(self) -> np.ndarray:
        return self.cos * self.e + self.sin * self.e_perp

    @property
    def phi_perp(self) -> np.ndarray:
        return self.sin * self.e - self.cos * self.e_perp


@dataclass(frozen=True, eq=False)
class JordanDecomposition:
    blocks: tuple[JordanBlock, ...]
    commuting_basis: np.ndarray
    s_prime: np.ndarray
    q_prime: np.ndarray

    @property
    def dim(self) -> int:
        return self.commuting_basis.shape[0]

    @property
    def angles(self) -> np.ndarray:
        return np.array([block.theta for block in self.blocks])

    def commuting_part(self, flags: np.ndarray) -> np.ndarray:
        """Diagonal operator on H′ with the given 0/1 entries, in the ambient space."""
        return (self.commuting_basis * flags) @ self.commuting_basis.conj().T

    def s_matrix(self) -> np.ndarray:
        blocks = sum((np.outer(b.e, b.e.conj()) for b in self.blocks), np.zeros((self.dim, self.dim)))
        return blocks + self.commuting_part(self.s_prime)

    def q_matrix(self) -> np.ndarray:
        blocks = sum((np.outer(b.phi, b.phi.conj()) for b in self.blocks), np.zeros((self.dim, self.dim)))
        return blocks + self.commuting_part(self.q_prime)

    def residual(self, s: ProjectionLike, q: ProjectionLike) -> float:
        return max(
            float(np.linalg.norm(self.s_matrix() - as_array(s))),
            float(np.linalg.norm(self.q_matrix() - as_array(q))),
        )

    @property
    def overlap(self) -> float:
        commuting = 1.0 if np.any(self.s_prime * self.q_prime > 0.5) else 0.0
        return max([commuting, *(block.cos for block in self.blocks)])


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # First non-negligible entry made real and positive.
    magnitudes = np.abs(v)
    lead = int(np.argmax(magnitudes > 1e-10 * magnitudes.max()))
    return v * (np.conj(v[lead]) / magnitudes[lead])


def _check_pairing(values: np.ndarray, tol: float) -> None:
    lower = np.sort(1.0 - values[values < 1.0])
    upper = np.sort(values[values > 1.0] - 1.0)
    if lower.size != upper.size:
        raise DegeneracyError(
            _("Eigenvalues of S + Q do not pair up; try a smaller angle tolerance."),
            lower=lower.tolist(),
            upper=upper.tolist(),
        )
    mismatch = float(np.abs(lower - upper).max(initial=0.0))
    if mismatch > 2 * tol:
        raise DegeneracyError(
            _("Paired eigenvalues of S + Q disagree by %(gap).3e; try a smaller angle tolerance.")
            % {"gap": mismatch},
            mismatch=mismatch,
        )


def _blocks(s: np.ndarray, q: np.ndarray, span: np.ndarray) -> tuple[JordanBlock, ...]:
    m = span.shape[1] // 2
    if m == 0:
        return ()
    in_span = eigh(span.conj().T @ s @ span)
    e_coords = in_span.eigenvectors[:, in_span.eigenvalues > 0.5]
    if e_coords.shape[1] != m:
        raise DegeneracyError(
            _("S does not split the paired subspace in half; try a smaller angle tolerance."),
            rank=e_coords.shape[1],
            expected=m,
        )
    e_basis = span @ e_coords
    # On the S-range of the paired subspace, SQS has eigenvalues cos²θ.
    overlaps = eigh(e_basis.conj().T @ q @ e_basis)
    cos_sq = np.clip(overlaps.eigenvalues, 0.0, 1.0)
    vectors = e_basis @ overlaps.eigenvectors
    blocks = []
    for idx in np.argsort(-cos_sq, kind="stable"):
        c = math.sqrt(cos_sq[idx])
        e = _fix_phase(vectors[:, idx])
        rest = q @ e / c - c * e
        blocks.append(JordanBlock(math.acos(c), e, rest / np.linalg.norm(rest)))
    return tuple(blocks)


def jordan_decompose(s: ProjectionLike, q: ProjectionLike) -> JordanDecomposition:
    s_arr, q_arr = as_projection(s).matrix, as_projection(q).matrix
    if s_arr.shape != q_arr.shape:
        raise DomainError(_("Projections must share a dimension."))
    tol = numerics().theta_tol
    spectrum = eigh(s_arr + q_arr)
    lam, vecs = spectrum.eigenvalues, spectrum.eigenvectors
    zero, one, two = (np.abs(lam - level) <= tol for level in (0.0, 1.0, 2.0))
    paired = ~(zero | one | two)
    _check_pairing(lam[paired], tol)
    blocks = _blocks(s_arr, q_arr, vecs[:, paired])

    # H′: both vanish on the 0-space, both act as 1 on the 2-space, and the
    # 1-space splits into S-only and Q-only parts.
    bases = [vecs[:, zero], vecs[:, two]]
    s_flags = [np.zeros(zero.sum()), np.ones(two.sum())]
    q_flags = list(s_flags)
    middle = vecs[:, one]
    if middle.shape[1]:
        split = eigh(middle.conj().T @ s_arr @ middle)
        on_s = (split.eigenvalues > 0.5).astype(float)
        bases.append(middle @ split.eigenvectors)
        s_flags.append(on_s)
        q_flags.append(1.0 - on_s)
    basis = np.hstack(bases)
    basis = np.column_stack([_fix_phase(col) for col in basis.T]) if basis.shape[1] else basis
    decomposition = JordanDecomposition(
        blocks=blocks,
        commuting_basis=basis,
        s_prime=np.concatenate(s_flags),
        q_prime=np.concatenate(q_flags),
    )
    logger.debug(
        f"jordan: {len(blocks)} blocks, commuting dim {basis.shape[1]}, "
        f"residual {decomposition.residual(s_arr, q_arr):.2e}"
    )
    return decomposition


def overlap(s: ProjectionLike, q: ProjectionLike) -> float:
    """Operator norm of SQ: the largest |⟨v, w⟩| over unit v ∈ ran S, w ∈ ran Q."""
    s_arr, q_arr = as_projection(s).matrix, as_projection(q).matrix
    return float(np.linalg.norm(s_arr @ q_arr, 2))
