"""Truncated series in ``u^-1`` (and bivariate ``u^-1, v^-1``) over an arbitrary ring.

Coefficients only need ``+``, ``-`` and ``*``; nothing assumes commutativity,
so the same classes carry both rational-function and difference-operator
coefficients.  ``coeffs[s]`` is the coefficient of ``u^-s``.
"""

from __future__ import annotations

from math import comb
from typing import Callable, Sequence


class TruncSeries:
    """``c_0 + c_1 u^-1 + ... + c_N u^-N`` with a fixed truncation order ``N``."""

    __slots__ = ("coeffs", "zero")

    def __init__(self, coeffs: Sequence, zero, order: int | None = None):
        coeffs = list(coeffs)
        if order is not None:
            if len(coeffs) > order + 1:
                coeffs = coeffs[: order + 1]
            else:
                coeffs += [zero] * (order + 1 - len(coeffs))
        if not coeffs:
            raise ValueError("a truncated series needs at least the constant term")
        self.coeffs = coeffs
        self.zero = zero

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value, zero, order: int) -> "TruncSeries":
        return cls([value], zero, order)

    def coeff(self, s: int):
        if s < 0:
            raise IndexError("negative index")
        if s > self.order:
            raise IndexError(f"coefficient u^-{s} is beyond the truncation order {self.order}")
        return self.coeffs[s]

    def __getitem__(self, s: int):
        return self.coeff(s)

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise ValueError("cannot raise the truncation order")
        return TruncSeries(self.coeffs[: order + 1], self.zero)

    def map(self, fn: Callable) -> "TruncSeries":
        return TruncSeries([fn(x) for x in self.coeffs], self.zero)

    def map_ring(self, fn: Callable, zero) -> "TruncSeries":
        """Apply a ring map coefficientwise, landing in a ring with ``zero``."""
        return TruncSeries([fn(x) for x in self.coeffs], zero)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        n = min(self.order, other.order)
        return TruncSeries([self.coeffs[i] + other.coeffs[i] for i in range(n + 1)], self.zero)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        n = min(self.order, other.order)
        return TruncSeries([self.coeffs[i] - other.coeffs[i] for i in range(n + 1)], self.zero)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries([-x for x in self.coeffs], self.zero)

    def scale(self, x) -> "TruncSeries":
        """Multiply every coefficient on the left by ``x``."""
        return TruncSeries([x * c for c in self.coeffs], self.zero)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n + 1):
            acc = self.zero
            for i in range(k + 1):
                x, y = a[i], b[k - i]
                if x and y:
                    acc = acc + x * y
            out.append(acc)
        return TruncSeries(out, self.zero)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        return "TruncSeries(" + ", ".join(str(c) for c in self.coeffs) + ")"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def invert(self) -> "TruncSeries":
        """Two-sided inverse; the constant term must be the ring unit."""
        c0 = self.coeffs[0]
        one = c0 * c0
        if c0 != one or not c0:
            raise ZeroDivisionError("constant term of the series is not the unit")
        out = [c0]
        for k in range(1, self.order + 1):
            acc = self.zero
            for i in range(1, k + 1):
                if self.coeffs[i] and out[k - i]:
                    acc = acc + self.coeffs[i] * out[k - i]
            out.append(-acc)
        return TruncSeries(out, self.zero)

    def shift_arg(self, a) -> "TruncSeries":
        """The series of ``f(u - a)``; ``a`` must commute with every coefficient."""
        n = self.order
        powers = [None] * (n + 1)
        out = [self.coeffs[0]]
        for k in range(1, n + 1):
            acc = self.zero
            for s in range(1, k + 1):
                cs = self.coeffs[s]
                if not cs:
                    continue
                e = k - s
                if e == 0:
                    acc = acc + cs
                    continue
                if powers[e] is None:
                    powers[e] = a if e == 1 else powers[e - 1] * a
                acc = acc + cs * powers[e] * comb(k - 1, e)
            out.append(acc)
        return TruncSeries(out, self.zero)

    def power(self, e: int) -> "TruncSeries":
        if e < 0:
            return self.invert().power(-e)
        one = self.coeffs[0] * self.coeffs[0] if self.coeffs[0] else None
        if one is None:
            raise ZeroDivisionError("power of a series without unit constant term")
        result = TruncSeries.constant(one, self.zero, self.order)
        for _ in range(e):
            result = result * self
        return result

    def mul_u_inverse(self, k: int = 1) -> "TruncSeries":
        """Multiply by ``u^-k`` (keeping the same truncation order)."""
        return TruncSeries([self.zero] * k + self.coeffs[: self.order + 1 - k], self.zero)


def pole_expand(x, one, zero, order: int) -> TruncSeries:
    """``1/(u - x) = sum_{s>=1} x^(s-1) u^-s``."""
    coeffs = [zero]
    p = one
    for s in range(1, order + 1):
        coeffs.append(p)
        if s < order:
            p = p * x
    return TruncSeries(coeffs, zero)


def linear_factor(x, one, zero, order: int) -> TruncSeries:
    """The series ``1 - x u^-1``."""
    return TruncSeries([one, -x], zero, order)


class BiSeries:
    """Rectangular table ``c[r][s]`` of coefficients of ``u^-r v^-s``."""

    __slots__ = ("table", "zero")

    def __init__(self, table: Sequence[Sequence], zero):
        self.table = [list(row) for row in table]
        self.zero = zero
        if not self.table or len({len(r) for r in self.table}) != 1:
            raise ValueError("bivariate series table must be rectangular and non-empty")

    @property
    def orders(self) -> tuple[int, int]:
        return len(self.table) - 1, len(self.table[0]) - 1

    @classmethod
    def zeros(cls, nu: int, nv: int, zero) -> "BiSeries":
        return cls([[zero] * (nv + 1) for _ in range(nu + 1)], zero)

    def coeff(self, r: int, s: int):
        return self.table[r][s]

    @classmethod
    def outer(cls, f: TruncSeries, g: TruncSeries, *, reverse: bool = False) -> "BiSeries":
        """``f(u) g(v)`` (or ``g(v) f(u)`` with ``reverse``) coefficientwise."""
        zero = f.zero
        rows = []
        for a in f.coeffs:
            row = []
            for b in g.coeffs:
                if not a or not b:
                    row.append(zero)
                else:
                    row.append(b * a if reverse else a * b)
            rows.append(row)
        return cls(rows, zero)

    @classmethod
    def commutator(cls, f: TruncSeries, g: TruncSeries, bracket: Callable | None = None) -> "BiSeries":
        """``[f(u), g(v)]`` computed entrywise."""
        zero = f.zero
        if bracket is None:
            def bracket(a, b):
                return a * b - b * a
        return cls([[bracket(a, b) if a and b else zero for b in g.coeffs] for a in f.coeffs], zero)

    def _zip(self, other: "BiSeries", op) -> "BiSeries":
        nu = min(self.orders[0], other.orders[0])
        nv = min(self.orders[1], other.orders[1])
        return BiSeries(
            [[op(self.table[r][s], other.table[r][s]) for s in range(nv + 1)] for r in range(nu + 1)],
            self.zero,
        )

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return BiSeries([[-x for x in row] for row in self.table], self.zero)

    def scale(self, x) -> "BiSeries":
        return BiSeries([[x * c for c in row] for row in self.table], self.zero)

    def nonzero_entries(self) -> list[tuple[int, int, object]]:
        return [(r, s, c) for r, row in enumerate(self.table) for s, c in enumerate(row) if c]

    def is_zero(self) -> bool:
        return not self.nonzero_entries()

    def __eq__(self, other):
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self.table == other.table

    def times_u_minus_v(self) -> "BiSeries":
        """Multiply by ``(u - v)``; keeps entries whose inputs are all tracked.

        Entry ``(r, s)`` of the result needs ``(r+1, s)`` and ``(r, s+1)``, so
        the result has orders one less in each direction.
        """
        nu, nv = self.orders
        t = self.table
        return BiSeries(
            [[t[r + 1][s] - t[r][s + 1] for s in range(nv)] for r in range(nu)],
            self.zero,
        )


def divided_difference(f: TruncSeries, nu: int, nv: int) -> BiSeries:
    """``(f(u) - f(v)) / (u - v)`` as a series in ``u^-1, v^-1``.

    Uses ``(u^-r - v^-r)/(u - v) = -sum_{a+b=r+1, a,b>=1} u^-a v^-b``.
    """
    if f.order < nu + nv - 1:
        raise ValueError(
            f"series of order {f.order} cannot fill a ({nu}, {nv}) divided difference"
        )
    zero = f.zero
    table = [[zero] * (nv + 1) for _ in range(nu + 1)]
    for a in range(1, nu + 1):
        for b in range(1, nv + 1):
            c = f.coeffs[a + b - 1]
            table[a][b] = -c if c else zero
    return BiSeries(table, zero)
