from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from django.utils.translation import gettext_lazy as _

from matcore.conf import numerics
from matcore.exceptions import DomainError, ResourceCapError
from matcore.linalg import hermitian, loewner_margin
from matcore.sampling import complex_gaussian, random_unitary
from means.functions import ScalarFn
from means.utils import ka_mean, perspective
from membership.feasibility import am_feasibility_quantum
from membership.utils import ka_membership

from .maps import CpMap, tensor_power

logger = logging.getLogger(__name__)

CP_TOL = 1e-9
STRATEGY_TOL = 1e-9


def _check_dims(n: CpMap, m: CpMap) -> None:
    if (n.dim_in, n.dim_out) != (m.dim_in, m.dim_out):
        raise DomainError(
            _("Maps must share input and output dimensions."),
            left=(n.dim_in, n.dim_out),
            right=(m.dim_in, m.dim_out),
        )


def cp_leq(n: CpMap, m: CpMap) -> tuple[bool, float]:
    """N ≤_CP M, with margin λ_min(C_M − C_N)."""
    _check_dims(n, m)
    margin = loewner_margin(n.choi, m.choi)
    return margin >= -CP_TOL, margin


def channel_ka_mean(n: CpMap, m: CpMap, t: float) -> CpMap:
    """M #_t N, weight t on N."""
    _check_dims(n, m)
    return CpMap(n.dim_in, n.dim_out, ka_mean(n.choi, m.choi, t))


def superop_perspective(f: ScalarFn, n: CpMap, m: CpMap, eps_path=None) -> CpMap:
    """Operator perspective of the Choi matrices, regularized as N + εℐ, M + εℐ."""
    _check_dims(n, m)
    shift = np.eye(n.dim_in * n.dim_out) / n.dim_out
    return CpMap(n.dim_in, n.dim_out, perspective(f, n.choi, m.choi, eps_path, shift=shift))


@dataclass(frozen=True, eq=False)
class DiscriminationReport:
    n: int
    mean_member: bool
    t_intervals: tuple[tuple[float, float], ...]
    am_feasible: bool
    am_mu: np.ndarray | None
    strategies_pass: bool
    worst_margin: float
    trials: int

    @property
    def consistent(self) -> bool:
        # A mean bound forces every strategy to pass; a failing strategy refutes all t.
        return self.strategies_pass or not self.mean_member


def _positive_part_projector(h: np.ndarray) -> np.ndarray:
    lam, vecs = np.linalg.eigh(hermitian(h))
    keep = vecs[:, lam > 0]
    return keep @ keep.conj().T


def discrimination_equivalence_check(
    e: CpMap,
    n1: CpMap,
    n2: CpMap,
    n: int = 1,
    trials: int = 100,
    rng: np.random.Generator | None = None,
) -> DiscriminationReport:
    """Compare the channel mean criterion with sampled n-copy parallel strategies.

    A pure input |φ⟩ = (W ⊗ I)|Ψ⟩ on reference ⊗ input^n yields the output
    (W ⊗ I) C (W ⊗ I)* for the Choi matrix C of the n-fold tensor power.
    """
    _check_dims(e, n1)
    _check_dims(e, n2)
    size = (e.dim_in * e.dim_out) ** n
    cap = numerics().dim_cap
    if size > cap:
        raise ResourceCapError(_("Strategy dimension exceeds the cap."), dim=size, cap=cap)
    rng = np.random.default_rng(0) if rng is None else rng

    verdict = ka_membership(e.choi, n1.choi, n2.choi, max_n=0)
    am = am_feasibility_quantum(e.choi, [n1.choi, n2.choi], n)

    chois = [tensor_power(cp, n).choi for cp in (e, n1, n2)]
    ref = e.dim_in**n
    out = e.dim_out**n

    def outputs_for(w: np.ndarray) -> list[np.ndarray]:
        lift = np.kron(w, np.eye(out))
        return [lift @ c @ lift.conj().T for c in chois]

    def strategies() -> Iterator[tuple[list[np.ndarray], np.ndarray]]:
        outputs = outputs_for(np.eye(ref) / np.sqrt(ref))
        yield outputs, np.eye(size)
        for _trial in range(trials):
            w = complex_gaussian(rng, ref, ref)
            outputs = outputs_for(w / np.linalg.norm(w))
            for alternative in outputs[1:]:
                yield outputs, _positive_part_projector(outputs[0] - alternative)
            u = random_unitary(rng, size)
            yield outputs, (u * rng.uniform(0.0, 1.0, size)) @ u.conj().T

    worst, count = np.inf, 0
    for outputs, test in strategies():
        produced, *alternatives = (np.trace(test @ o).real for o in outputs)
        margin = max(alternatives) - produced
        worst = min(worst, margin)
        count += 1
    report = DiscriminationReport(
        n=n,
        mean_member=verdict.member,
        t_intervals=verdict.t_intervals,
        am_feasible=am.feasible,
        am_mu=am.mu,
        strategies_pass=bool(worst >= -STRATEGY_TOL),
        worst_margin=float(worst),
        trials=count,
    )
    if not report.consistent:
        logger.warning(f"channel discrimination check inconsistent at n={n}: worst margin {worst:.3e}")
    return report
