from __future__ import annotations

import contextvars
from contextlib import contextmanager
from dataclasses import dataclass, fields, replace
from typing import Iterator


@dataclass(frozen=True)
class Numerics:
    eig_zero_tol: float = 1e-10
    psd_tol: float = 1e-10
    dim_cap: int = 4096
    persp_tol: float = 1e-9
    theta_tol: float = 1e-7
    commute_tol: float = 1e-8
    lp_tol: float = 1e-9
    threads: int = 1


_override: contextvars.ContextVar[Numerics | None] = contextvars.ContextVar(
    "opmean_numerics", default=None
)
_snapshot: Numerics | None = None


def _from_settings() -> Numerics:
    from django.conf import settings

    if not settings.configured:
        return Numerics()
    raw = getattr(settings, "NUMERICS", {}) or {}
    known = {f.name for f in fields(Numerics)}
    values = {key.lower(): value for key, value in raw.items() if key.lower() in known}
    return Numerics(**values)


def numerics() -> Numerics:
    """Active tolerance snapshot: a ``use_numerics`` override, else settings."""
    global _snapshot
    active = _override.get()
    if active is not None:
        return active
    if _snapshot is None:
        _snapshot = _from_settings()
    return _snapshot


@contextmanager
def use_numerics(**overrides) -> Iterator[Numerics]:
    """Temporarily replace tolerances for the current context."""
    active = replace(numerics(), **{k: v for k, v in overrides.items() if v is not None})
    token = _override.set(active)
    try:
        yield active
    finally:
        _override.reset(token)
