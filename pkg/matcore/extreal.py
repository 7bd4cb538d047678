"""
Extended reals with the conventions used throughout the package:
0·(±∞) = 0, e^{-∞} = 0, e^{+∞} = +∞, log 0 = -∞ and 0^0 = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Union

from django.utils.translation import gettext_lazy as _

from .exceptions import DomainError

Number = Union[int, float, "ExtReal"]


def _raw(x: Number) -> float:
    return x.value if isinstance(x, ExtReal) else float(x)


@total_ordering
@dataclass(frozen=True, eq=False)
class ExtReal:
    value: float

    def __post_init__(self) -> None:
        value = float(self.value)
        if math.isnan(value):
            raise DomainError(_("ExtReal does not admit NaN."))
        object.__setattr__(self, "value", value)

    @classmethod
    def inf(cls) -> ExtReal:
        return cls(math.inf)

    @classmethod
    def neg_inf(cls) -> ExtReal:
        return cls(-math.inf)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @property
    def is_pos_inf(self) -> bool:
        return self.value == math.inf

    @property
    def is_neg_inf(self) -> bool:
        return self.value == -math.inf

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"ExtReal({self})"

    def __str__(self) -> str:
        if self.is_pos_inf:
            return "+inf"
        if self.is_neg_inf:
            return "-inf"
        return repr(self.value)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (ExtReal, int, float)):
            return self.value == _raw(other)
        return NotImplemented

    def __lt__(self, other: Number) -> bool:
        return self.value < _raw(other)

    def __hash__(self) -> int:
        return hash(self.value)

    def __neg__(self) -> ExtReal:
        return ExtReal(-self.value)

    def __add__(self, other: Number) -> ExtReal:
        a, b = self.value, _raw(other)
        if math.isinf(a) and math.isinf(b) and a != b:
            raise DomainError(_("+inf + -inf is undefined."))
        return ExtReal(a + b)

    __radd__ = __add__

    def __sub__(self, other: Number) -> ExtReal:
        return self + (-ExtReal(_raw(other)))

    def __rsub__(self, other: Number) -> ExtReal:
        return ExtReal(_raw(other)) - self

    def __mul__(self, other: Number) -> ExtReal:
        a, b = self.value, _raw(other)
        if a == 0.0 or b == 0.0:
            return ExtReal(0.0)
        return ExtReal(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> ExtReal:
        b = _raw(other)
        if b == 0.0 or math.isinf(b):
            raise DomainError(_("Division by zero or by an infinite value."))
        return ExtReal(self.value / b)

    def exp(self) -> ExtReal:
        if self.is_neg_inf:
            return ExtReal(0.0)
        if self.is_pos_inf:
            return ExtReal.inf()
        return ExtReal(math.exp(self.value))

    @staticmethod
    def log(x: Number) -> ExtReal:
        v = _raw(x)
        if v < 0:
            raise DomainError(_("log of a negative number."), value=v)
        if v == 0.0:
            return ExtReal.neg_inf()
        return ExtReal(math.log(v))

    @staticmethod
    def pow(base: Number, exponent: Number) -> ExtReal:
        b, e = _raw(base), _raw(exponent)
        if e == 0.0:
            return ExtReal(1.0)
        if b < 0:
            raise DomainError(_("Real power of a negative base."), base=b)
        if b == 0.0:
            return ExtReal(0.0) if e > 0 else ExtReal.inf()
        return ExtReal(b ** e)

    def to_json(self) -> float | str:
        return str(self) if not self.is_finite else self.value


def ext(x: Number) -> ExtReal:
    return x if isinstance(x, ExtReal) else ExtReal(x)


def ext_max(*values: Number) -> ExtReal:
    return max(ext(v) for v in values)


def ext_min(*values: Number) -> ExtReal:
    return min(ext(v) for v in values)
