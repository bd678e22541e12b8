"""Truncation budgets, in the spirit of :mod:`decimal` contexts."""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class TruncationContext:
    """Budgets for finite approximation.

    ``max_terms`` caps the length of a product, ``taylor_order`` is the
    highest power kept in every power-series evaluation and
    ``const_precision`` is the number of bits to which constant enclosures
    are refined before a comparison is declared undecided.
    """

    max_terms: int = 64
    taylor_order: int = 8
    const_precision: int = 64

    def __post_init__(self):
        for name in ("max_terms", "taylor_order", "const_precision"):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")

    def replace(self, **changes) -> "TruncationContext":
        return replace(self, **changes)


DEFAULT_CONTEXT = TruncationContext()

_current = contextvars.ContextVar("hahnfield_context", default=DEFAULT_CONTEXT)


def getcontext() -> TruncationContext:
    return _current.get()


def setcontext(ctx: TruncationContext) -> None:
    _current.set(ctx)


@contextlib.contextmanager
def localcontext(ctx: TruncationContext | None = None, **changes):
    """Temporarily install ``ctx`` (or the current context with ``changes``)."""
    base = ctx if ctx is not None else getcontext()
    if changes:
        base = base.replace(**changes)
    token = _current.set(base)
    try:
        yield base
    finally:
        _current.reset(token)


def resolve(ctx: TruncationContext | None) -> TruncationContext:
    return getcontext() if ctx is None else ctx
