from __future__ import annotations

import math
from dataclasses import dataclass

from matcore.extreal import ExtReal


@dataclass(frozen=True)
class DivergenceValue:
    """A divergence in nats; +inf when the support condition fails."""

    value: ExtReal

    @property
    def is_infinite(self) -> bool:
        return not self.value.is_finite

    def __float__(self) -> float:
        return self.value.value


@dataclass(frozen=True)
class HoeffdingResult:
    value: ExtReal
    maximizer_alpha: float  # math.inf for the α → ∞ limit
    grid_resolution: float
    at_boundary: bool = False

    def __float__(self) -> float:
        return self.value.value

    @property
    def maximizer_is_infinite(self) -> bool:
        return math.isinf(self.maximizer_alpha)
