"""Truncated Laurent series in q with exact rational coefficients.

A value is a finite list of integer numerators over one positive common
denominator, anchored at its lowest exponent.  Exponents outside the
context window [q_min, q_max] are discarded on construction, which makes
every arithmetic operation exact "to truncation".  Zero coefficients are
never stored at the ends, so structural equality is canonical equality.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

from .truncation import ContextMismatchError, InversionError, TruncationContext

# Bound under which an int64 convolution cannot overflow.
_INT64_SAFE = 2**62


def _conv_python(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _conv(a, b):
    """Exact integer convolution; int64 fast path with big-int fallback."""
    ma = max(abs(c) for c in a)
    mb = max(abs(c) for c in b)
    if ma and mb and ma * mb * min(len(a), len(b)) < _INT64_SAFE:
        return np.convolve(
            np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        ).tolist()
    return _conv_python(a, b)


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class QLaurent:
    """One coefficient of the bivariate series: a Laurent polynomial slice in q."""

    __slots__ = ("ctx", "off", "num", "den")

    def __init__(self, ctx: TruncationContext, off: int, num, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        lo, hi = ctx.q_min, ctx.q_max
        num = list(num)
        # window clip
        if off < lo:
            num = num[lo - off:]
            off = lo
        if off + len(num) - 1 > hi:
            num = num[: hi - off + 1]
        # trim zero ends
        i = 0
        while i < len(num) and num[i] == 0:
            i += 1
        j = len(num)
        while j > i and num[j - 1] == 0:
            j -= 1
        num = num[i:j]
        off += i
        if not num:
            off, den = 0, 1
        else:
            if den < 0:
                den = -den
                num = [-c for c in num]
            g = den
            for c in num:
                g = gcd(g, c)
                if g == 1:
                    break
            if g > 1:
                den //= g
                num = [c // g for c in num]
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "off", off)
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("QLaurent is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(ctx: TruncationContext) -> "QLaurent":
        return QLaurent(ctx, 0, ())

    @staticmethod
    def one(ctx: TruncationContext) -> "QLaurent":
        return QLaurent(ctx, 0, (1,))

    @staticmethod
    def monomial(ctx: TruncationContext, exp: int, coeff=1) -> "QLaurent":
        coeff = Fraction(coeff)
        return QLaurent(ctx, exp, (coeff.numerator,), coeff.denominator)

    @staticmethod
    def from_pairs(ctx: TruncationContext, pairs) -> "QLaurent":
        """Build from an iterable of (exponent, rational) pairs."""
        vals = {}
        for e, c in dict(pairs).items():
            c = Fraction(c)
            if c:
                vals[e] = vals.get(e, Fraction(0)) + c
        if not vals:
            return QLaurent.zero(ctx)
        den = 1
        for c in vals.values():
            den = _lcm(den, c.denominator)
        lo = min(vals)
        num = [0] * (max(vals) - lo + 1)
        for e, c in vals.items():
            num[e - lo] = int(c * den)
        return QLaurent(ctx, lo, num, den)

    # -- inspection --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.num

    def coeff(self, e: int) -> Fraction:
        i = e - self.off
        if 0 <= i < len(self.num):
            return Fraction(self.num[i], self.den)
        return Fraction(0)

    def support_min(self):
        return self.off if self.num else None

    def support_max(self):
        return self.off + len(self.num) - 1 if self.num else None

    def items(self):
        for i, c in enumerate(self.num):
            if c:
                yield self.off + i, Fraction(c, self.den)

    def eval_q1(self) -> Fraction:
        """Value at q = 1; only meaningful when the support is complete."""
        return Fraction(sum(self.num), self.den)

    def is_integral(self) -> bool:
        return self.den == 1

    def to_json_map(self) -> dict:
        out = {}
        for e, c in self.items():
            out[str(e)] = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
        return out

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "QLaurent"):
        if self.ctx != other.ctx:
            raise ContextMismatchError("operands built under different truncation windows")

    def __add__(self, other: "QLaurent") -> "QLaurent":
        self._check(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        den = _lcm(self.den, other.den)
        fa, fb = den // self.den, den // other.den
        lo = min(self.off, other.off)
        hi = max(self.off + len(self.num), other.off + len(other.num))
        num = [0] * (hi - lo)
        for i, c in enumerate(self.num):
            num[self.off - lo + i] = c * fa
        for i, c in enumerate(other.num):
            num[other.off - lo + i] += c * fb
        return QLaurent(self.ctx, lo, num, den)

    def __neg__(self) -> "QLaurent":
        return QLaurent(self.ctx, self.off, [-c for c in self.num], self.den)

    def __sub__(self, other: "QLaurent") -> "QLaurent":
        return self + (-other)

    def __mul__(self, other: "QLaurent") -> "QLaurent":
        self._check(other)
        if self.is_zero or other.is_zero:
            return QLaurent.zero(self.ctx)
        return QLaurent(
            self.ctx,
            self.off + other.off,
            _conv(list(self.num), list(other.num)),
            self.den * other.den,
        )

    def scale(self, c) -> "QLaurent":
        c = Fraction(c)
        if not c:
            return QLaurent.zero(self.ctx)
        return QLaurent(
            self.ctx,
            self.off,
            [x * c.numerator for x in self.num],
            self.den * c.denominator,
        )

    def shift(self, k: int) -> "QLaurent":
        """Multiply by q^k, re-truncating to the window."""
        return QLaurent(self.ctx, self.off + k, self.num, self.den)

    def invert(self) -> "QLaurent":
        """Inverse inside the window; the lowest retained term must be nonzero."""
        if self.is_zero:
            raise InversionError("cannot invert the zero coefficient")
        v = self.off
        if not self.ctx.contains_q(-v):
            raise InversionError(
                f"inverse starts at q^{-v}, outside window "
                f"[{self.ctx.q_min}, {self.ctx.q_max}]"
            )
        a = [Fraction(c, self.den) for c in self.num]
        width = self.ctx.q_max - (-v) + 1
        b = [Fraction(0)] * width
        b[0] = 1 / a[0]
        for k in range(1, width):
            s = Fraction(0)
            for j in range(1, min(k, len(a) - 1) + 1):
                if a[j]:
                    s += a[j] * b[k - j]
            if s:
                b[k] = -s / a[0]
        return QLaurent.from_pairs(self.ctx, {-v + k: c for k, c in enumerate(b)})

    def restrict(self, ctx: TruncationContext) -> "QLaurent":
        """Project onto a smaller window."""
        if not self.ctx.covers(ctx):
            raise ContextMismatchError("target window is not contained in the source window")
        return QLaurent(ctx, self.off, self.num, self.den)

    # -- comparison / display ---------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, QLaurent):
            return NotImplemented
        if self.ctx != other.ctx:
            raise ContextMismatchError("comparing coefficients from different windows")
        return self.off == other.off and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.ctx, self.off, self.num, self.den))

    def __repr__(self):
        if self.is_zero:
            return "QLaurent(0)"
        parts = []
        for e, c in self.items():
            parts.append(f"{c}*q^{e}" if e else str(c))
        return "QLaurent(" + " + ".join(parts) + ")"
