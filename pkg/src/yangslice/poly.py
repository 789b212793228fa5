"""Exact sparse polynomials and rational functions with linear-form denominators.

Variables are small tuples whose natural ordering is the global variable order:
``h`` first, then ``z(i, k)``, then ``c(i, r)``, then auxiliary variables.
A monomial is a sorted tuple of ``(var, exponent)`` pairs.  Coefficients are
exact rationals (``gmpy2.mpq`` when available).

Denominators of :class:`RatFunc` are restricted to products of linear forms
``x - y - q*h``; cancellation is trial division by each stored form.
"""

from __future__ import annotations

from math import comb
from typing import Callable, Iterable, Mapping, NamedTuple

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    from fractions import Fraction as QQ

Var = tuple
Monomial = tuple

H: Var = (0,)


def z(i: int, k: int) -> Var:
    return (1, i, k)


def c(i: int, r: int) -> Var:
    return (2, i, r)


def aux(*name) -> Var:
    return (3,) + tuple(name)


def var_name(v: Var) -> str:
    kind = v[0]
    if kind == 0:
        return "h"
    if kind == 1:
        return f"z{v[1]}_{v[2]}"
    if kind == 2:
        return f"c{v[1]}^({v[2]})"
    if v[1] == "g" and len(v) == 5:
        return f"g{v[2]}{v[3]}^({v[4]})"
    return "_".join(str(p) for p in v[1:])


def to_q(x) -> "QQ":
    if isinstance(x, str):
        return QQ(x) if "/" not in x else QQ(*map(int, x.split("/")))
    return QQ(x)


class NotDivisible(ArithmeticError):
    """Raised when an exact division by ``h`` is impossible."""


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            e = ea + eb
            if e:
                out.append((va, e))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


def _split(m: Monomial, v: Var) -> tuple[int, Monomial]:
    for idx, (w, e) in enumerate(m):
        if w == v:
            return e, m[:idx] + m[idx + 1:]
    return 0, m


class Poly:
    """Sparse multivariate (Laurent) polynomial over the rationals."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        self.terms: dict = dict(terms) if terms else {}
        self._hash = None

    # construction -----------------------------------------------------------
    @classmethod
    def const(cls, value) -> "Poly":
        q = to_q(value)
        return cls({(): q}) if q else cls()

    @classmethod
    def var(cls, v: Var, exp: int = 1) -> "Poly":
        return cls({((v, exp),) if exp else (): QQ(1)})

    @classmethod
    def linear(cls, x: Var, y: Var, q=0) -> "Poly":
        """The polynomial ``x - y - q*h``."""
        terms = {((x, 1),): QQ(1), ((y, 1),): QQ(-1)}
        q = to_q(q)
        if q:
            terms[((H, 1),)] = -q
        return cls(terms)

    # basic protocol -----------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, type(QQ(0)))):
            return self.terms == (Poly.const(other).terms)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        return format_poly(self)

    def sorted_terms(self) -> list[tuple[Monomial, object]]:
        return sorted(self.terms.items())

    def constant_term(self):
        return self.terms.get((), QQ(0))

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    # arithmetic ---------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        res = dict(self.terms)
        for m, cf in other.terms.items():
            v = res.get(m)
            if v is None:
                res[m] = cf
            else:
                v = v + cf
                if v:
                    res[m] = v
                else:
                    del res[m]
        return Poly(res)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -cf for m, cf in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(other) - self

    def scale(self, q) -> "Poly":
        q = to_q(q)
        if not q:
            return Poly()
        if q == 1:
            return self
        return Poly({m: cf * q for m, cf in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        if not self.terms or not other.terms:
            return Poly()
        if len(other.terms) == 1 and () in other.terms:
            return self.scale(other.terms[()])
        if len(self.terms) == 1 and () in self.terms:
            return other.scale(self.terms[()])
        res: dict = {}
        get = res.get
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                v = get(m)
                res[m] = c1 * c2 if v is None else v + c1 * c2
        return Poly({m: cf for m, cf in res.items() if cf})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # structure --------------------------------------------------------------
    def degree_in(self, v: Var) -> int:
        return max((_split(m, v)[0] for m in self.terms), default=0)

    def coefficients_in(self, v: Var) -> dict[int, "Poly"]:
        """Group terms as ``sum_k P_k v^k``; returns ``{k: P_k}``."""
        out: dict[int, dict] = {}
        for m, cf in self.terms.items():
            e, rest = _split(m, v)
            out.setdefault(e, {})[rest] = cf
        return {e: Poly(t) for e, t in out.items()}

    def derivative(self, v: Var) -> "Poly":
        res: dict = {}
        for m, cf in self.terms.items():
            e, rest = _split(m, v)
            if e:
                nm = _mono_mul(rest, ((v, e - 1),)) if e != 1 else rest
                res[nm] = res.get(nm, 0) + cf * e
        return Poly({m: cf for m, cf in res.items() if cf})

    def substitute(self, v: Var, value: "Poly") -> "Poly":
        groups = self.coefficients_in(v)
        if list(groups) == [0]:
            return self
        out = Poly()
        powers: dict[int, Poly] = {}
        for e, coeff in groups.items():
            if e == 0:
                out = out + coeff
                continue
            if e < 0:
                raise ValueError("cannot substitute into a negative power")
            if e not in powers:
                powers[e] = value ** e
            out = out + coeff * powers[e]
        return out

    def substitute_many(self, values: Mapping[Var, "Poly"]) -> "Poly":
        out = self
        for v, val in values.items():
            out = out.substitute(v, val)
        return out

    def shift(self, v: Var, q) -> "Poly":
        """Replace ``v`` by ``v + q*h``."""
        q = to_q(q)
        if not q or not self.terms:
            return self
        res: dict = {}
        for m, cf in self.terms.items():
            e, rest = _split(m, v)
            if e == 0:
                res[m] = res.get(m, 0) + cf
                continue
            he, rest2 = _split(rest, H)
            for k in range(e + 1):
                coeff = cf * comb(e, k) * q ** k
                parts = []
                if he + k:
                    parts.append((H, he + k))
                nm = tuple(parts) + rest2
                if e - k:
                    nm = _mono_mul(nm, ((v, e - k),))
                res[nm] = res.get(nm, 0) + coeff
        return Poly({m: cf for m, cf in res.items() if cf})

    def set_zero(self, v: Var) -> "Poly":
        return Poly({m: cf for m, cf in self.terms.items() if _split(m, v)[0] == 0})

    def div_exact_h(self) -> "Poly":
        res = {}
        for m, cf in self.terms.items():
            e, rest = _split(m, H)
            if e < 1:
                raise NotDivisible(f"term {format_monomial(m)} has no factor h")
            res[_mono_mul(rest, ((H, e - 1),)) if e > 1 else rest] = cf
        return Poly(res)

    def evaluate(self, values: Mapping[Var, object]) -> "Poly":
        """Substitute rational numbers for some variables."""
        res: dict = {}
        for m, cf in self.terms.items():
            keep = []
            val = cf
            for v, e in m:
                if v in values:
                    val = val * to_q(values[v]) ** e
                else:
                    keep.append((v, e))
            if val:
                key = tuple(keep)
                res[key] = res.get(key, 0) + val
        return Poly({m: cf for m, cf in res.items() if cf})

    def weighted_degree(self, weights: Callable[[Var], int]) -> int | None:
        """Common weighted degree of all terms, or ``None`` if inhomogeneous."""
        degs = {sum(weights(v) * e for v, e in m) for m in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def divide_linear(self, x: Var, y: Var, q) -> "Poly | None":
        """Exact quotient by ``x - y - q*h`` or ``None`` if it does not divide."""
        groups = self.coefficients_in(x)
        top = max(groups)
        if top <= 0 or min(groups) < 0:
            return None
        root = Poly.var(y) + Poly.var(H).scale(q)  # x = y + q*h
        quot: dict[int, Poly] = {}
        carry = Poly()
        for k in range(top, 0, -1):
            carry = groups.get(k, Poly()) + carry
            quot[k - 1] = carry
            carry = carry * root
        remainder = groups.get(0, Poly()) + carry
        if remainder:
            return None
        xv = Poly.var(x)
        result = Poly()
        for k, p in quot.items():
            if p:
                result = result + (p * (xv ** k) if k else p)
        return result


def format_monomial(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(var_name(v) if e == 1 else f"{var_name(v)}^{e}" for v, e in m)


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for m, cf in p.sorted_terms():
        if m == ():
            parts.append(str(cf))
        elif cf == 1:
            parts.append(format_monomial(m))
        elif cf == -1:
            parts.append("-" + format_monomial(m))
        else:
            parts.append(f"{cf}*{format_monomial(m)}")
    return " + ".join(parts).replace("+ -", "- ")


class LinForm(NamedTuple):
    """The linear form ``a - b - q*h`` with ``a < b`` in variable order."""

    a: Var
    b: Var
    q: object

    def to_poly(self) -> Poly:
        return Poly.linear(self.a, self.b, self.q)

    def shift(self, v: Var, q) -> "LinForm":
        if v == self.a:
            return LinForm(self.a, self.b, self.q - q)
        if v == self.b:
            return LinForm(self.a, self.b, self.q + q)
        return self

    def __str__(self):
        s = f"{var_name(self.a)} - {var_name(self.b)}"
        if self.q:
            mag = abs(self.q)
            hq = "h" if mag == 1 else f"{mag}*h"
            s += f" - {hq}" if self.q > 0 else f" + {hq}"
        return s


def normalize_linear(x: Var, y: Var, q) -> tuple[LinForm, int]:
    """Normalise ``x - y - q*h`` into ``(form, sign)`` with ``form`` canonical."""
    q = to_q(q)
    if x == y:
        raise ValueError("degenerate linear form")
    if x < y:
        return LinForm(x, y, q), 1
    return LinForm(y, x, -q), -1


Denominator = tuple  # sorted tuple of (LinForm, exponent)


def _den_merge(d1: Denominator, d2: Denominator) -> Denominator:
    if not d1:
        return d2
    if not d2:
        return d1
    acc = dict(d1)
    for f, e in d2:
        acc[f] = acc.get(f, 0) + e
    return tuple(sorted(acc.items()))


class RatFunc:
    """Polynomial numerator over a product of :class:`LinForm` powers."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Denominator = (), *, reduced: bool = False):
        if not reduced:
            num, den = _cancel(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def const(cls, value) -> "RatFunc":
        return cls(Poly.const(value), reduced=True)

    @classmethod
    def var(cls, v: Var) -> "RatFunc":
        return cls(Poly.var(v), reduced=True)

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls(p, reduced=True)

    @classmethod
    def inverse_linear(cls, x: Var, y: Var, q=0) -> "RatFunc":
        """``1 / (x - y - q*h)``."""
        form, sign = normalize_linear(x, y, q)
        return cls(Poly.const(sign), ((form, 1),), reduced=True)

    def __bool__(self):
        return bool(self.num.terms)

    def is_zero(self) -> bool:
        return not self.num.terms

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.den == other.den and self.num == other.num
        if isinstance(other, Poly):
            return not self.den and self.num == other
        if isinstance(other, (int, type(QQ(0)))):
            return not self.den and self.num == Poly.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if not self.den:
            return str(self.num)
        den = "*".join(f"({f})" if e == 1 else f"({f})^{e}" for f, e in self.den)
        return f"({self.num}) / ({den})"

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduced=True)

    def scale(self, q) -> "RatFunc":
        q = to_q(q)
        if not q:
            return RatFunc(Poly(), (), reduced=True)
        return RatFunc(self.num.scale(q), self.den, reduced=True)

    def __add__(self, other):
        if not isinstance(other, RatFunc):
            other = _as_ratfunc(other)
        if not other.num.terms:
            return self
        if not self.num.terms:
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        d1 = dict(self.den)
        d2 = dict(other.den)
        n1, n2 = self.num, other.num
        lcm = dict(d1)
        for f, e in d2.items():
            if e > lcm.get(f, 0):
                lcm[f] = e
        for f, e in lcm.items():
            e1 = e - d1.get(f, 0)
            e2 = e - d2.get(f, 0)
            if e1:
                n1 = n1 * f.to_poly() ** e1
            if e2:
                n2 = n2 * f.to_poly() ** e2
        return RatFunc(n1 + n2, tuple(sorted(lcm.items())))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, RatFunc):
            other = _as_ratfunc(other)
        return self + (-other)

    def __rsub__(self, other):
        return _as_ratfunc(other) - self

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, Poly):
                other = RatFunc(other, reduced=True)
            else:
                return self.scale(other)
        if not self.num.terms or not other.num.terms:
            return RatFunc(Poly(), (), reduced=True)
        num = self.num * other.num
        if not other.den:
            return RatFunc(num, self.den, reduced=not self.den or other.num.is_constant())
        if not self.den:
            return RatFunc(num, other.den, reduced=self.num.is_constant())
        return RatFunc(num, _den_merge(self.den, other.den))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = RatFunc.const(1)
        for _ in range(n):
            out = out * self
        return out

    def shift(self, v: Var, q) -> "RatFunc":
        """Replace ``v`` by ``v + q*h`` in numerator and every linear form."""
        q = to_q(q)
        if not q:
            return self
        num = self.num.shift(v, q)
        if not self.den:
            return RatFunc(num, (), reduced=True)
        acc: dict = {}
        for f, e in self.den:
            g = f.shift(v, q)
            acc[g] = acc.get(g, 0) + e
        return RatFunc(num, tuple(sorted(acc.items())), reduced=True)

    def derivative(self, v: Var) -> "RatFunc":
        """Partial derivative; each ``L^e`` in the denominator gives ``-e L'/L``."""
        out = RatFunc(self.num.derivative(v), self.den, reduced=True)
        for f, e in self.den:
            sign = 1 if v == f.a else (-1 if v == f.b else 0)
            if sign:
                out = out + RatFunc(self.num.scale(-e * sign), _den_merge(self.den, ((f, 1),)))
        return out

    def set_h_zero(self) -> "RatFunc":
        num = self.num.set_zero(H)
        acc: dict = {}
        for f, e in self.den:
            g = LinForm(f.a, f.b, QQ(0))
            acc[g] = acc.get(g, 0) + e
        return RatFunc(num, tuple(sorted(acc.items())))

    def div_exact_h(self) -> "RatFunc":
        return RatFunc(self.num.div_exact_h(), self.den, reduced=True)

    def evaluate(self, values: Mapping[Var, object]) -> "RatFunc":
        if any(f.a in values or f.b in values for f, _ in self.den):
            raise ValueError("cannot evaluate a denominator variable")
        return RatFunc(self.num.evaluate(values), self.den)

    def weighted_degree(self, weights: Callable[[Var], int]) -> int | None:
        if not self.num.terms:
            return None
        nd = self.num.weighted_degree(weights)
        if nd is None:
            return None
        dd = 0
        for f, e in self.den:
            wa, wb = weights(f.a), weights(f.b)
            if wa != wb or (f.q and weights(H) != wa):
                return None
            dd += wa * e
        return nd - dd

    def variables(self) -> set:
        vs = self.num.variables()
        for f, _ in self.den:
            vs |= {f.a, f.b}
            if f.q:
                vs.add(H)
        return vs

    def is_polynomial(self) -> bool:
        return not self.den


def _as_ratfunc(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x, reduced=True)
    return RatFunc.const(x)


def _cancel(num: Poly, den: Denominator) -> tuple[Poly, Denominator]:
    if not num.terms:
        return Poly(), ()
    if not den:
        return num, den
    out = []
    for f, e in den:
        while e:
            q = num.divide_linear(f.a, f.b, f.q)
            if q is None:
                break
            num = q
            e -= 1
        if e:
            out.append((f, e))
    return num, tuple(out)


def ratfunc_sum(items: Iterable[RatFunc]) -> RatFunc:
    total = RatFunc(Poly(), (), reduced=True)
    for it in items:
        total = total + it
    return total
