from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from django.utils.translation import gettext_lazy as _

from matcore.exceptions import DomainError
from matcore.extreal import ExtReal

logger = logging.getLogger(__name__)

_GRID = np.logspace(-6, 6, 49)


@dataclass(frozen=True)
class ScalarFn:
    """Scalar function on (0, ∞) plus its two boundary limits.

    ``limit_at_zero`` is f(0+); ``transpose_limit_at_zero`` is
    lim_{x→∞} f(x)/x, the value at 0+ of the transpose x·f(1/x).
    """

    eval: Callable[[np.ndarray], np.ndarray]
    limit_at_zero: ExtReal
    transpose_limit_at_zero: ExtReal
    label: str

    def __call__(self, x: np.ndarray | float) -> np.ndarray:
        return self.eval(np.asarray(x, dtype=float))

    def negated(self) -> ScalarFn:
        return ScalarFn(
            eval=lambda x: -self.eval(x),
            limit_at_zero=-self.limit_at_zero,
            transpose_limit_at_zero=-self.transpose_limit_at_zero,
            label=f"-{self.label}",
        )

    def transpose(self) -> ScalarFn:
        return ScalarFn(
            eval=lambda x: x * self.eval(1.0 / x),
            limit_at_zero=self.transpose_limit_at_zero,
            transpose_limit_at_zero=self.limit_at_zero,
            label=f"~{self.label}",
        )

    def validate(self) -> ScalarFn:
        with np.errstate(all="ignore"):
            values = self(_GRID)
        if not np.all(np.isfinite(values)):
            raise DomainError(_("Function is not finite on (0, ∞)."), label=self.label)
        self._warn_on_limit(self.limit_at_zero, float(self(1e-6)), "f(0+)")
        self._warn_on_limit(self.transpose_limit_at_zero, float(self(1e6)) / 1e6, "f~(0+)")
        return self

    def _warn_on_limit(self, declared: ExtReal, sampled: float, name: str) -> None:
        if not declared.is_finite:
            return
        if abs(sampled - declared.value) > 0.05 * max(1.0, abs(declared.value)):
            logger.warning(
                f"{self.label}: declared {name}={declared} but sampled value is {sampled:.4g}"
            )


def _power_limits(t: float) -> tuple[ExtReal, ExtReal]:
    at_zero = ExtReal(0.0) if t > 0 else (ExtReal(1.0) if t == 0 else ExtReal.inf())
    at_inf = ExtReal(0.0) if t < 1 else (ExtReal(1.0) if t == 1 else ExtReal.inf())
    return at_zero, at_inf


def power(t: float) -> ScalarFn:
    at_zero, at_inf = _power_limits(t)
    return ScalarFn(lambda x: np.power(x, t), at_zero, at_inf, f"pow:{t:g}")


def log_fn() -> ScalarFn:
    return ScalarFn(np.log, ExtReal.neg_inf(), ExtReal(0.0), "log")


def xlogx() -> ScalarFn:
    return ScalarFn(lambda x: x * np.log(x), ExtReal(0.0), ExtReal.inf(), "xlogx")


def parse_scalar_fn(name: str) -> ScalarFn:
    """Resolve CLI preset names: ``pow:t``, ``log``, ``xlogx``, ``sqrt``."""
    key = name.strip()
    if key == "sqrt":
        return power(0.5)
    if key == "log":
        return log_fn()
    if key == "xlogx":
        return xlogx()
    if key.startswith("pow:"):
        try:
            t = float(key.split(":", 1)[1])
        except ValueError as exc:
            raise DomainError(_("Invalid power exponent in %(name)s.") % {"name": name}) from exc
        if not math.isfinite(t):
            raise DomainError(_("Power exponent must be finite."))
        return power(t)
    raise DomainError(_("Unknown scalar function preset %(name)s.") % {"name": name})
