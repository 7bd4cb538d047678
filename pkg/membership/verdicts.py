from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from django.db import models
from django.utils.translation import gettext_lazy as _


class VerdictMethod(models.TextChoices):
    KA_SCAN = "ka-scan", _("Exact two-point Kubo-Ando scan")
    KA_SCAN_WITNESSED = "ka-scan+am-witness", _("Kubo-Ando scan with an arithmetic-mean witness")
    ORACLE_EVIDENCE = "oracle-evidence", _("Randomized oracle passed (evidence only)")
    ORACLE_PROOF = "oracle-proof", _("Randomized oracle found a violation")


@dataclass(frozen=True, eq=False)
class MembershipVerdict:
    member: bool
    method: VerdictMethod
    t_intervals: tuple[tuple[float, float], ...] = ()
    best_t: float | None = None
    best_margin: float = float("nan")
    witness_n: int | None = None
    witness_X: np.ndarray | None = None

    def contains(self, t: float, tol: float = 1e-6) -> bool:
        return any(lo - tol <= t <= hi + tol for lo, hi in self.t_intervals)
