"""Truncation windows for bivariate series arithmetic.

Every series value in this package lives in a fixed window: powers of x up
to ``x_order`` and powers of q inside ``[q_min, q_max]``.  Arithmetic
silently discards anything outside the window, so two values may only be
compared (or combined) when they share a context.
"""

from __future__ import annotations

from dataclasses import dataclass


class ContextMismatchError(ValueError):
    """Raised when two series built under different windows are combined."""


class InversionError(ArithmeticError):
    """Raised when a series has no inverse inside its window."""


@dataclass(frozen=True)
class TruncationContext:
    """Bounds of the retained monomials: x^0..x^N, q^E..q^Q with E <= 0 <= Q."""

    x_order: int
    q_max: int
    q_min: int = 0

    def __post_init__(self):
        if self.x_order < 0:
            raise ValueError("x_order must be >= 0")
        if not (self.q_min <= 0 <= self.q_max):
            raise ValueError("need q_min <= 0 <= q_max")

    @property
    def q_width(self) -> int:
        return self.q_max - self.q_min + 1

    def contains_q(self, e: int) -> bool:
        return self.q_min <= e <= self.q_max

    def covers(self, other: "TruncationContext") -> bool:
        """True if every monomial retained by ``other`` is retained here."""
        return (
            self.x_order >= other.x_order
            and self.q_max >= other.q_max
            and self.q_min <= other.q_min
        )


def default_context(x_order: int, q_max: int) -> TruncationContext:
    """Window for a report at the given orders.

    The q floor leaves room for the deepest negative exponent any catalog
    coefficient can carry at x-degree n, which is binomial(n+1, 2), plus
    headroom for products against factors with positive exponents.
    """
    q_min = -((x_order + 1) * (x_order + 2)) // 2 - q_max
    return TruncationContext(x_order, q_max, q_min)


def padded_context(ctx: TruncationContext) -> TruncationContext:
    """Internal working window guaranteeing exact results on ``ctx``.

    One extra x-degree absorbs the loss of formal differentiation.  The
    q-padding exceeds the total negative-exponent depth reachable by any
    multiplication tree at these x-degrees, plus one full x-order of shift
    headroom, so restricting a value computed here back to ``ctx`` yields
    the true truncation.
    """
    pad = (ctx.x_order + 2) * (ctx.x_order + 3) // 2
    return TruncationContext(
        ctx.x_order + 1,
        ctx.q_max + pad,
        min(ctx.q_min, -pad),
    )
