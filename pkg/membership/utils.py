from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import minimize_scalar
from django.utils.translation import gettext_lazy as _

from matcore.conf import numerics
from matcore.exceptions import DomainError, ResourceCapError
from matcore.linalg import Operand, as_array, hermitian, kron_power
from means.utils import KaCurve

from .feasibility import am_feasibility_quantum
from .verdicts import MembershipVerdict, VerdictMethod

logger = logging.getLogger(__name__)

SCAN_POINTS = 2001
MEMBER_TOL = 1e-9
ENDPOINT_TOL = 1e-6
WITNESS_MARGIN = 1e-8
_REFINED_PEAKS = 5


class _Scan:
    """φ(t) = λ_min(A2 #_t A1 − C) along the Kubo-Ando curve."""

    def __init__(self, c: np.ndarray, a1: np.ndarray, a2: np.ndarray) -> None:
        self.c = c
        self.curve = KaCurve(a1, a2)

    def __call__(self, t: float) -> float:
        return float(np.linalg.eigvalsh(self.curve(t) - self.c)[0])

    def grid(self, points: int) -> tuple[np.ndarray, np.ndarray]:
        ts = np.linspace(0.0, 1.0, points)
        return ts, np.linalg.eigvalsh(self.curve.batch(ts) - self.c)[:, 0]

    def edge(self, inside: float, outside: float) -> float:
        while abs(outside - inside) > ENDPOINT_TOL:
            mid = (inside + outside) / 2
            inside, outside = (mid, outside) if self(mid) >= -MEMBER_TOL else (inside, mid)
        return inside


def _refine(scan: _Scan, ts: np.ndarray, phi: np.ndarray) -> list[tuple[float, float]]:
    """Bounded maximization of φ around the best interior grid peaks."""
    interior = np.arange(1, ts.size - 1)
    peaks = interior[(phi[interior] >= phi[interior - 1]) & (phi[interior] >= phi[interior + 1])]
    found = []
    for i in peaks[np.argsort(phi[peaks])[::-1][:_REFINED_PEAKS]]:
        result = minimize_scalar(
            lambda t: -scan(t), bounds=(ts[i - 1], ts[i + 1]), method="bounded", options={"xatol": 1e-12}
        )
        if -result.fun > phi[i]:
            found.append((float(result.x), float(-result.fun)))
    return found


def _intervals(scan: _Scan, ts: np.ndarray, phi: np.ndarray) -> tuple[tuple[float, float], ...]:
    feasible = phi >= -MEMBER_TOL
    runs = []
    start = None
    for i, ok in enumerate(feasible):
        if ok and start is None:
            start = i
        if start is not None and (not ok or i == ts.size - 1):
            stop = i if ok else i - 1
            lo = ts[start] if start == 0 else scan.edge(ts[start], ts[start - 1])
            hi = ts[stop] if stop == ts.size - 1 else scan.edge(ts[stop], ts[stop + 1])
            runs.append((float(lo), float(hi)))
            start = None
    return tuple(runs)


def _witness(c: np.ndarray, a1: np.ndarray, a2: np.ndarray, max_n: int) -> tuple[int, np.ndarray] | None:
    """Search small n for X with Tr C^⊗n X > max_y Tr A_y^⊗n X."""
    for n in range(1, max_n + 1):
        if c.shape[0] ** n > numerics().dim_cap:
            break
        try:
            result = am_feasibility_quantum(c, [a1, a2], n)
        except ResourceCapError:
            break
        gaps = result.witness_gaps(c, [a1, a2])
        if gaps is not None and gaps.min() > WITNESS_MARGIN:
            logger.debug(f"membership witness at n={n}, gap {gaps.min():.3e}")
            return n, result.witness
    return None


def ka_membership(
    c: Operand, a1: Operand, a2: Operand, points: int = SCAN_POINTS, max_n: int = 3
) -> MembershipVerdict:
    """Is C ≤ A2 #_t A1 for some t in [0, 1]?"""
    c_arr, a1_arr, a2_arr = (hermitian(as_array(m)) for m in (c, a1, a2))
    if not c_arr.shape == a1_arr.shape == a2_arr.shape:
        raise DomainError(_("Membership arguments must share a dimension."))
    scan = _Scan(c_arr, a1_arr, a2_arr)
    ts, phi = scan.grid(points)
    refined = _refine(scan, ts, phi)
    if refined:
        extra_t, extra_phi = zip(*refined)
        order = np.argsort(np.r_[ts, extra_t], kind="stable")
        ts, phi = np.r_[ts, extra_t][order], np.r_[phi, extra_phi][order]

    best = int(np.argmax(phi))
    intervals = _intervals(scan, ts, phi)
    logger.debug(f"ka membership: best t={ts[best]:.6f} margin={phi[best]:.3e} intervals={intervals}")
    if intervals:
        return MembershipVerdict(True, VerdictMethod.KA_SCAN, intervals, float(ts[best]), float(phi[best]))

    found = _witness(c_arr, a1_arr, a2_arr, max_n)
    if found is None:
        return MembershipVerdict(False, VerdictMethod.KA_SCAN, (), float(ts[best]), float(phi[best]))
    n, witness = found
    return MembershipVerdict(
        False,
        VerdictMethod.KA_SCAN_WITNESSED,
        (),
        float(ts[best]),
        float(phi[best]),
        witness_n=n,
        witness_X=witness,
    )


def weak_violation(c: Operand, a1: Operand, a2: Operand, n: int, x: np.ndarray, points: int = 1001) -> float:
    """min over a t-grid of Tr C^⊗n X − (Tr A1^⊗n X)^t (Tr A2^⊗n X)^{1-t}."""
    cn = np.trace(kron_power(c, n) @ x).real
    left = max(np.trace(kron_power(a1, n) @ x).real, 0.0)
    right = max(np.trace(kron_power(a2, n) @ x).real, 0.0)
    ts = np.linspace(0.0, 1.0, points)
    return float(np.min(cn - left**ts * right ** (1 - ts)))
