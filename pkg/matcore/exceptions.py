from __future__ import annotations

from typing import Any

from django.utils.translation import gettext_lazy as _


class NumericsError(ValueError):
    """Base class for every error raised by the numerical apps."""

    default_message = _("Numerical operation failed.")

    def __init__(self, message: Any = None, **details: Any) -> None:
        self.details = details
        super().__init__(str(message if message is not None else self.default_message))


class DomainError(NumericsError):
    default_message = _("Argument outside the domain of the operation.")


class ConvergenceError(NumericsError):
    """Carries ``residual`` or ``iterates`` in ``details``."""

    default_message = _("Iteration did not converge.")


class ResourceCapError(NumericsError):
    default_message = _("Dimension cap exceeded.")


class PreconditionError(NumericsError):
    default_message = _("Precondition of the operation does not hold.")


class DegeneracyError(NumericsError):
    default_message = _("Numerically degenerate input; try a smaller tolerance.")
