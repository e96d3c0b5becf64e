"""Truncated power series in x whose coefficients are Laurent slices in q.

This is the arithmetic every generating function in the package is built
from: ring operations, inversion, the q-shift x -> s*x*q^k, the formal
x-derivative, even/odd parts, and the q-Pochhammer / q-binomial / geometric
primitives.
"""

from __future__ import annotations

from fractions import Fraction

from .qlaurent import QLaurent, _conv
from .truncation import ContextMismatchError, InversionError, TruncationContext


class XSeries:
    """Power series in x, coefficients indexed 0..ctx.x_order."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: TruncationContext, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != ctx.x_order + 1:
            raise ValueError("need exactly x_order + 1 coefficients")
        for c in coeffs:
            if c.ctx != ctx:
                raise ContextMismatchError("coefficient built under a different window")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("XSeries is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(ctx: TruncationContext) -> "XSeries":
        z = QLaurent.zero(ctx)
        return XSeries(ctx, [z] * (ctx.x_order + 1))

    @staticmethod
    def one(ctx: TruncationContext) -> "XSeries":
        z = QLaurent.zero(ctx)
        return XSeries(ctx, [QLaurent.one(ctx)] + [z] * ctx.x_order)

    @staticmethod
    def monomial(ctx: TruncationContext, x_deg: int, q_exp: int = 0, coeff=1) -> "XSeries":
        if x_deg > ctx.x_order:
            return XSeries.zero(ctx)
        cs = [QLaurent.zero(ctx)] * (ctx.x_order + 1)
        cs[x_deg] = QLaurent.monomial(ctx, q_exp, coeff)
        return XSeries(ctx, cs)

    @staticmethod
    def from_terms(ctx: TruncationContext, terms) -> "XSeries":
        """Build from {(x_degree, q_exponent): rational} entries."""
        buckets = {}
        for (i, e), c in dict(terms).items():
            if i <= ctx.x_order:
                buckets.setdefault(i, {})
                buckets[i][e] = buckets[i].get(e, 0) + Fraction(c)
        cs = []
        for i in range(ctx.x_order + 1):
            cs.append(QLaurent.from_pairs(ctx, buckets.get(i, {})))
        return XSeries(ctx, cs)

    @staticmethod
    def from_coeffs(ctx: TruncationContext, coeffs) -> "XSeries":
        """Build from a sequence of QLaurent, padded with zeros up to x_order."""
        cs = list(coeffs)
        z = QLaurent.zero(ctx)
        cs += [z] * (ctx.x_order + 1 - len(cs))
        return XSeries(ctx, cs)

    # -- inspection --------------------------------------------------------

    def coeff(self, n: int) -> QLaurent:
        return self.coeffs[n]

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, XSeries):
            return NotImplemented
        if self.ctx != other.ctx:
            raise ContextMismatchError("comparing series from different windows")
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, self.coeffs))

    def __repr__(self):
        return f"XSeries(x_order={self.ctx.x_order}, coeffs={list(self.coeffs)!r})"

    def first_difference(self, other: "XSeries"):
        """Location and values of the first differing monomial, or None."""
        if self.ctx != other.ctx:
            raise ContextMismatchError("comparing series from different windows")
        for n in range(self.ctx.x_order + 1):
            a, b = self.coeffs[n], other.coeffs[n]
            if a == b:
                continue
            for e in range(self.ctx.q_min, self.ctx.q_max + 1):
                if a.coeff(e) != b.coeff(e):
                    return n, e, a.coeff(e), b.coeff(e)
        return None

    def to_json(self) -> dict:
        return {
            "x_order": self.ctx.x_order,
            "q_min": self.ctx.q_min,
            "q_max": self.ctx.q_max,
            "coeffs": [c.to_json_map() for c in self.coeffs],
        }

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "XSeries"):
        if self.ctx != other.ctx:
            raise ContextMismatchError("operands built under different truncation windows")

    def __add__(self, other: "XSeries") -> "XSeries":
        self._check(other)
        return XSeries(self.ctx, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "XSeries") -> "XSeries":
        self._check(other)
        return XSeries(self.ctx, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "XSeries":
        return XSeries(self.ctx, [-a for a in self.coeffs])

    def __mul__(self, other: "XSeries") -> "XSeries":
        self._check(other)
        n = self.ctx.x_order
        zero = QLaurent.zero(self.ctx)
        out = [zero] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if not b.is_zero:
                    out[i + j] = out[i + j] + a * b
        return XSeries(self.ctx, out)

    def scale(self, c) -> "XSeries":
        return XSeries(self.ctx, [a.scale(c) for a in self.coeffs])

    def scale_q(self, q: QLaurent) -> "XSeries":
        """Multiply every coefficient by a fixed Laurent slice."""
        if q.ctx != self.ctx:
            raise ContextMismatchError("operands built under different truncation windows")
        return XSeries(self.ctx, [a * q for a in self.coeffs])

    def invert(self) -> "XSeries":
        """Multiplicative inverse to truncation; x^0 coefficient must be a unit."""
        f0 = self.coeffs[0]
        try:
            g0 = f0.invert()
        except InversionError as exc:
            raise InversionError(f"x^0 coefficient is not invertible: {exc}") from exc
        n = self.ctx.x_order
        out = [g0]
        for k in range(1, n + 1):
            s = QLaurent.zero(self.ctx)
            for j in range(1, k + 1):
                fj = self.coeffs[j]
                if not fj.is_zero:
                    s = s + fj * out[k - j]
            out.append((-s) * g0)
        return XSeries(self.ctx, out)

    # -- structural operations ----------------------------------------------

    def subst_x(self, sign: int, k: int) -> "XSeries":
        """f(x) -> f(sign * x * q^k); k may be negative."""
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        out = []
        for n, c in enumerate(self.coeffs):
            c = c.shift(n * k)
            if sign == -1 and n % 2 == 1:
                c = -c
            out.append(c)
        return XSeries(self.ctx, out)

    def deriv_x(self) -> "XSeries":
        """Formal d/dx; the top x-degree of the result is not trustworthy."""
        n = self.ctx.x_order
        out = [self.coeffs[j + 1].scale(j + 1) for j in range(n)]
        out.append(QLaurent.zero(self.ctx))
        return XSeries(self.ctx, out)

    def even_part(self) -> "XSeries":
        return XSeries(
            self.ctx,
            [c if n % 2 == 0 else QLaurent.zero(self.ctx) for n, c in enumerate(self.coeffs)],
        )

    def odd_part(self) -> "XSeries":
        return XSeries(
            self.ctx,
            [c if n % 2 == 1 else QLaurent.zero(self.ctx) for n, c in enumerate(self.coeffs)],
        )

    def shift_x_down(self, k: int = 1) -> "XSeries":
        """Divide by x^k; the dropped low coefficients must vanish.

        The top k coefficients of the result are filled with zeros and are
        not trustworthy (same caveat as deriv_x).
        """
        for j in range(k):
            if not self.coeffs[j].is_zero:
                raise ValueError(f"x^{j} coefficient is nonzero; cannot divide by x^{k}")
        n = self.ctx.x_order
        out = list(self.coeffs[k:]) + [QLaurent.zero(self.ctx)] * k
        return XSeries(self.ctx, out)

    def restrict(self, ctx: TruncationContext) -> "XSeries":
        """Project onto a smaller window."""
        if not self.ctx.covers(ctx):
            raise ContextMismatchError("target window is not contained in the source window")
        return XSeries(ctx, [c.restrict(ctx) for c in self.coeffs[: ctx.x_order + 1]])


# -- q-series primitives -----------------------------------------------------


def geom_factor(ctx: TruncationContext, k: int) -> QLaurent:
    """Truncated expansion of 1/(1 - q^k), i.e. sum of q^{jk}."""
    if k <= 0:
        raise ValueError("geom_factor needs k >= 1")
    return QLaurent.from_pairs(ctx, {j * k: 1 for j in range(ctx.q_max // k + 1)})


def geom_factor_signed(ctx: TruncationContext, k: int, sign: int) -> QLaurent:
    """Truncated expansion of 1/(1 - sign*q^k)."""
    if k <= 0:
        raise ValueError("geom_factor_signed needs k >= 1")
    return QLaurent.from_pairs(
        ctx, {j * k: sign**j for j in range(ctx.q_max // k + 1)}
    )


def q_pochhammer(ctx: TruncationContext, sign: int, a: int, t: int, n: int) -> QLaurent:
    """Product of (1 - sign*q^{a + t*j}) for j = 0..n-1, as a coefficient."""
    out = QLaurent.one(ctx)
    for j in range(n):
        out = out * QLaurent.from_pairs(ctx, {0: 1, a + t * j: -sign})
    return out


def pochhammer(
    ctx: TruncationContext, prefix_sign: int, x_power: int, q_offset: int, step: int, n: int
) -> XSeries:
    """Product of (1 - prefix_sign * x^{x_power} * q^{q_offset + step*j}), j = 0..n-1."""
    if step < 1:
        raise ValueError("step must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    out = XSeries.one(ctx)
    for j in range(n):
        factor = XSeries.from_terms(
            ctx, {(0, 0): 1, (x_power, q_offset + step * j): -prefix_sign}
        )
        out = out * factor
    return out


def geometric_x(ctx: TruncationContext, sign: int, k: int) -> XSeries:
    """Truncated expansion of 1/(1 - sign*x*q^k): sum of sign^n x^n q^{nk}."""
    return XSeries.from_terms(
        ctx, {(n, n * k): sign**n for n in range(ctx.x_order + 1)}
    )


# Raw integer polynomial helpers backing the exact q-binomial division.
# These operate outside any truncation window so the division is genuinely
# exact; the result is embedded into a window afterwards.


def _poly_mul(a, b):
    return _conv(a, b)


def _poly_divexact(a, b):
    """Quotient of integer polynomial lists with b[0] == 1; zero remainder required."""
    if not b or b[0] != 1:
        raise ValueError("divisor must have constant term 1")
    rem = list(a)
    out_len = len(a) - len(b) + 1
    if out_len <= 0:
        raise ValueError("division does not terminate")
    q = [0] * out_len
    for i in range(out_len):
        c = rem[i]
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                rem[i + j] -= c * bj
    if any(rem):
        raise ValueError("nonzero remainder in exact division")
    return q


def _poch_poly(step: int, n: int):
    """(q^step; q^step)_n as an integer coefficient list."""
    out = [1]
    for j in range(1, n + 1):
        factor = [0] * (step * j + 1)
        factor[0] = 1
        factor[step * j] = -1
        out = _poly_mul(out, factor)
    return out


def q_binomial(ctx: TruncationContext, k: int, i: int, step: int = 1) -> QLaurent:
    """Gaussian binomial coefficient in q^step, by exact polynomial division."""
    if step not in (1, 2):
        raise ValueError("step must be 1 or 2")
    if i < 0 or i > k:
        return QLaurent.zero(ctx)
    num = _poch_poly(step, k)
    den = _poly_mul(_poch_poly(step, i), _poch_poly(step, k - i))
    quot = _poly_divexact(num, den)
    return QLaurent(ctx, 0, quot)
