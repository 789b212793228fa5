"""Difference operators in the variables ``z_{i,k}`` and shifts ``beta_{i,k}``.

An element is stored in normal form ``sum f_m(z) * beta^m`` with rational
coefficients on the left.  Moving ``beta_{i,k}^e`` past a coefficient
replaces ``z_{i,k}`` by ``z_{i,k} + e*d_i*h``.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping

from .poly import H, Poly, RatFunc, Var, z

BetaMono = tuple  # sorted tuple of ((i, k), exponent), exponents nonzero


def _beta_mul(a: BetaMono, b: BetaMono) -> BetaMono:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for key, e in b:
        v = acc.get(key, 0) + e
        if v:
            acc[key] = v
        else:
            acc.pop(key, None)
    return tuple(sorted(acc.items()))


def _beta_neg(a: BetaMono) -> BetaMono:
    return tuple((key, -e) for key, e in a)


class DiffAlgebra:
    """The ambient algebra: fixes the shift step ``d_i`` for every node."""

    __slots__ = ("d",)

    def __init__(self, d: Mapping[int, int]):
        self.d = dict(d)

    def __eq__(self, other):
        return isinstance(other, DiffAlgebra) and self.d == other.d

    def __hash__(self):
        return hash(tuple(sorted(self.d.items())))

    def __repr__(self):
        return f"DiffAlgebra(d={self.d})"

    def zero(self) -> "DiffOp":
        return DiffOp(self, {})

    def one(self) -> "DiffOp":
        return DiffOp(self, {(): RatFunc.const(1)})

    def scalar(self, f) -> "DiffOp":
        if not isinstance(f, RatFunc):
            f = RatFunc.from_poly(f) if isinstance(f, Poly) else RatFunc.const(f)
        return DiffOp(self, {(): f} if f else {})

    def h(self) -> "DiffOp":
        return self.scalar(Poly.var(H))

    def z(self, i: int, k: int) -> "DiffOp":
        return self.scalar(Poly.var(z(i, k)))

    def beta(self, i: int, k: int, e: int = 1) -> "DiffOp":
        if e == 0:
            return self.one()
        return DiffOp(self, {(((i, k), e),): RatFunc.const(1)})

    def shift_coefficient(self, f: RatFunc, mono: BetaMono) -> RatFunc:
        """Conjugate ``f`` by ``beta^mono``: ``beta^m f beta^-m``."""
        for (i, k), e in mono:
            f = f.shift(z(i, k), e * self.d[i])
        return f


class DiffOp:
    """Finite sum ``sum_m f_m * beta^m`` with nonzero :class:`RatFunc` coefficients."""

    __slots__ = ("alg", "terms", "_hash")

    def __init__(self, alg: DiffAlgebra, terms: Mapping[BetaMono, RatFunc]):
        self.alg = alg
        self.terms = {m: f for m, f in terms.items() if f}
        self._hash = None

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, DiffOp):
            return self.terms == other.terms
        try:
            return self.terms == self.alg.scalar(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"DiffOp({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, f in sorted(self.terms.items()):
            beta = "*".join(
                f"b{i}_{k}" if e == 1 else f"b{i}_{k}^{e}" for (i, k), e in m
            )
            parts.append(f"[{f}]" + (f"*{beta}" if beta else ""))
        return " + ".join(parts)

    def _coerce(self, other) -> "DiffOp":
        if isinstance(other, DiffOp):
            return other
        return self.alg.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        res = dict(self.terms)
        for m, f in other.terms.items():
            g = res.get(m)
            res[m] = f if g is None else g + f
        return DiffOp(self.alg, res)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp(self.alg, {m: -f for m, f in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, q) -> "DiffOp":
        return DiffOp(self.alg, {m: f.scale(q) for m, f in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, (DiffOp, RatFunc, Poly)):
            return self.scale(other)
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return DiffOp(self.alg, {})
        res: dict = {}
        shift = self.alg.shift_coefficient
        for m1, f in self.terms.items():
            for m2, g in other.terms.items():
                prod = f * (shift(g, m1) if m1 else g)
                if not prod:
                    continue
                m = _beta_mul(m1, m2)
                acc = res.get(m)
                res[m] = prod if acc is None else acc + prod
        return DiffOp(self.alg, res)

    def __rmul__(self, other):
        if isinstance(other, (RatFunc, Poly)):
            return self.alg.scalar(other) * self
        return self.scale(other)

    def __pow__(self, n: int):
        out = self.alg.one()
        for _ in range(n):
            out = out * self
        return out

    # coefficientwise maps -------------------------------------------------
    def map_coefficients(self, fn: Callable[[RatFunc], RatFunc]) -> "DiffOp":
        return DiffOp(self.alg, {m: fn(f) for m, f in self.terms.items()})

    def set_h_zero(self) -> "DiffOp":
        return self.map_coefficients(RatFunc.set_h_zero)

    def div_exact_h(self) -> "DiffOp":
        return self.map_coefficients(RatFunc.div_exact_h)

    def evaluate(self, values) -> "DiffOp":
        return self.map_coefficients(lambda f: f.evaluate(values))

    def is_scalar(self) -> bool:
        return not self.terms or list(self.terms) == [()]

    def scalar_part(self) -> RatFunc:
        return self.terms.get((), RatFunc.const(0))

    def is_h_free(self) -> bool:
        return all(H not in f.variables() for f in self.terms.values())

    def variables(self) -> set:
        vs: set = set()
        for f in self.terms.values():
            vs |= f.variables()
        return vs


def commutator(x: DiffOp, y: DiffOp) -> DiffOp:
    if not x.terms or not y.terms:
        return DiffOp(x.alg, {})
    return x * y - y * x


def anticommutator(x: DiffOp, y: DiffOp) -> DiffOp:
    return x * y + y * x


def poisson_bracket(x: DiffOp, y: DiffOp) -> DiffOp:
    """Bracket on the commutative ``h = 0`` quotient, from the derivation formula.

    ``{f beta^m, g beta^n} = sum_(i,k) d_i (m_ik f dg/dz_ik - n_ik g df/dz_ik) beta^(m+n)``,
    i.e. ``{z_ik, beta_ik} = -d_i beta_ik``.  This does not go through the
    commutator, so comparing it with ``h^-1 [x, y]`` is a genuine check.
    """
    if not x.is_h_free() or not y.is_h_free():
        raise ValueError("poisson_bracket expects h-free operands")
    alg = x.alg
    res: dict = {}
    for m1, f in x.terms.items():
        e1 = dict(m1)
        for m2, g in y.terms.items():
            e2 = dict(m2)
            acc = RatFunc.const(0)
            for key in set(e1) | set(e2):
                i, k = key
                v = z(i, k)
                term = RatFunc.const(0)
                if e1.get(key):
                    term = term + (f * g.derivative(v)).scale(e1[key])
                if e2.get(key):
                    term = term - (g * f.derivative(v)).scale(e2[key])
                acc = acc + term.scale(alg.d[i])
            if acc:
                m = _beta_mul(m1, m2)
                res[m] = res[m] + acc if m in res else acc
    return DiffOp(alg, res)


def quantum_to_classical_bracket(x: DiffOp, y: DiffOp) -> DiffOp:
    """``h^-1 [x, y]`` reduced modulo ``h`` for arbitrary (h-dependent) lifts."""
    return commutator(x, y).div_exact_h().set_h_zero()


class Grading:
    """Weights on ``h``, ``z``, ``c`` and on each ``beta_{i,k}`` (by node)."""

    def __init__(self, beta: Mapping[int, int], var_weight: Callable[[Var], int] | None = None):
        self.beta = dict(beta)
        self.var_weight = var_weight or default_var_weight

    def degree(self, x: DiffOp) -> int | None:
        """Common degree of all terms, ``None`` when inhomogeneous (or zero)."""
        degs = set()
        for m, f in x.terms.items():
            d = f.weighted_degree(self.var_weight)
            if d is None:
                return None
            degs.add(d + sum(self.beta[i] * e for (i, _), e in m))
            if len(degs) > 1:
                return None
        return degs.pop() if degs else None


def default_var_weight(v: Var) -> int:
    """``deg h = deg z = 1`` and ``deg c_i^(r) = r``."""
    kind = v[0]
    if kind in (0, 1):
        return 1
    if kind == 2:
        return v[2]
    raise ValueError(f"no default weight for auxiliary variable {v}")


def grading_degree(x: DiffOp, grading: Grading) -> int | None:
    return grading.degree(x)


def diffop_sum(items: Iterable[DiffOp], alg: DiffAlgebra) -> DiffOp:
    total = alg.zero()
    for it in items:
        total = total + it
    return total
