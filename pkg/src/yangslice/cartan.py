"""Finite-type Cartan data, roots, the node involution and (co)weight arithmetic.

Conventions: ``a[i][j] = <alpha_i^vee, alpha_j>`` and the symmetrised form is
``(alpha_i, alpha_j) = d_i a_ij``.  Nodes are labelled ``1..rank`` in the public
API; matrices are stored 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, comb
from typing import Iterable, Sequence

MAX_RANK = 8


class CartanError(ValueError):
    pass


def _cartan_rows(letter: str, n: int) -> list[list[int]]:
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, aij=-1, aji=-1):
        a[i][j], a[j][i] = aij, aji

    if letter == "A":
        for i in range(n - 1):
            link(i, i + 1)
    elif letter in ("B", "C"):
        if n < 2:
            raise CartanError(f"{letter}{n} is not a valid type")
        for i in range(n - 2):
            link(i, i + 1)
        if letter == "B":
            link(n - 2, n - 1, -2, -1)
        else:
            link(n - 2, n - 1, -1, -2)
    elif letter == "D":
        if n < 4:
            raise CartanError(f"D{n} is not a valid type")
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif letter == "E":
        if n not in (6, 7, 8):
            raise CartanError(f"E{n} is not a valid type")
        # Bourbaki numbering: 1-3-4-5-..., with 2 attached to 4
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif letter == "F":
        if n != 4:
            raise CartanError(f"F{n} is not a valid type")
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif letter == "G":
        if n != 2:
            raise CartanError(f"G{n} is not a valid type")
        link(0, 1, -1, -3)
    else:
        raise CartanError(f"unknown Cartan type letter {letter!r}")
    return a


def _symmetrizers(a: list[list[int]]) -> tuple[int, ...]:
    n = len(a)
    d: list[Fraction | None] = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j != i and a[i][j] != 0 and d[j] is None:
                    d[j] = d[i] * a[i][j] / a[j][i]
                    stack.append(j)
    den = reduce(lambda x, y: x * y // gcd(x, y), (x.denominator for x in d), 1)
    ints = [int(x * den) for x in d]
    g = reduce(gcd, ints)
    return tuple(x // g for x in ints)


def solve_rational(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Solve ``matrix @ x = rhs`` exactly by Gauss-Jordan elimination."""
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [vr - f * vc for vr, vc in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


@dataclass(frozen=True)
class CartanDatum:
    letter: str
    rank: int
    matrix: tuple[tuple[int, ...], ...]
    d: tuple[int, ...]
    positive_roots: tuple[tuple[int, ...], ...]
    dual: tuple[int, ...]  # dual[i-1] = i*
    orientation: frozenset[tuple[int, int]] = field(default=frozenset())

    @property
    def label(self) -> str:
        return f"{self.letter}{self.rank}"

    @property
    def nodes(self) -> range:
        return range(1, self.rank + 1)

    def a(self, i: int, j: int) -> int:
        return self.matrix[i - 1][j - 1]

    def di(self, i: int) -> int:
        return self.d[i - 1]

    def form(self, i: int, j: int) -> int:
        """The symmetrised pairing ``(alpha_i, alpha_j) = d_i a_ij``."""
        return self.d[i - 1] * self.matrix[i - 1][j - 1]

    def star(self, i: int) -> int:
        return self.dual[i - 1]

    @property
    def edges(self) -> frozenset[frozenset[int]]:
        return frozenset(
            frozenset((i, j)) for i in self.nodes for j in self.nodes if i < j and self.a(i, j) != 0
        )

    def arrows_into(self, i: int) -> list[int]:
        return sorted(j for (j, k) in self.orientation if k == i)

    def arrows_out_of(self, i: int) -> list[int]:
        return sorted(k for (j, k) in self.orientation if j == i)

    def neighbours(self, i: int) -> list[int]:
        return [j for j in self.nodes if j != i and self.a(i, j) != 0]

    @property
    def dim(self) -> int:
        return self.rank + 2 * len(self.positive_roots)

    def all_roots(self) -> list[tuple[int, ...]]:
        return list(self.positive_roots) + [tuple(-c for c in r) for r in self.positive_roots]

    def simple_root(self, i: int) -> tuple[int, ...]:
        return tuple(int(k == i - 1) for k in range(self.rank))

    def is_root(self, vec: Sequence[int]) -> bool:
        v = tuple(vec)
        return v in self._root_set or tuple(-c for c in v) in self._root_set

    @property
    def _root_set(self) -> frozenset:
        return frozenset(self.positive_roots)

    def coroot_pairing(self, i: int, root: Sequence[int]) -> int:
        """``<alpha_i^vee, root>`` for a root in simple-root coordinates."""
        return sum(c * self.matrix[i - 1][j] for j, c in enumerate(root))

    def reflect(self, i: int, root: Sequence[int]) -> tuple[int, ...]:
        p = self.coroot_pairing(i, root)
        out = list(root)
        out[i - 1] -= p
        return tuple(out)

    def with_orientation(self, arrows: Iterable[tuple[int, int]]) -> "CartanDatum":
        arrows = frozenset((int(i), int(j)) for i, j in arrows)
        covered = [frozenset(e) for e in arrows]
        if len(covered) != len(set(covered)) or set(covered) != set(self.edges):
            raise CartanError("orientation must direct every Dynkin edge exactly once")
        return CartanDatum(self.letter, self.rank, self.matrix, self.d,
                           self.positive_roots, self.dual, arrows)

    def reversed(self) -> "CartanDatum":
        return self.with_orientation((j, i) for (i, j) in self.orientation)


def _positive_roots(a: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    n = len(a)
    simple = [tuple(int(k == i) for k in range(n)) for i in range(n)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for r in frontier:
            for i in range(n):
                p = sum(c * a[i][j] for j, c in enumerate(r))
                s = list(r)
                s[i] -= p
                s = tuple(s)
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    pos = [r for r in seen if all(c >= 0 for c in r)]
    return tuple(sorted(pos, key=lambda r: (sum(r), tuple(-c for c in r))))


def longest_element(a: list[list[int]]) -> list[list[int]]:
    """Matrix of w0 on simple-root coordinates (columns are images of alpha_j).

    Found greedily: right-multiply by s_i while w(alpha_i) is still positive.
    """
    n = len(a)

    def s_mat(i):
        m = [[int(r == c) for c in range(n)] for r in range(n)]
        for j in range(n):
            m[i][j] -= a[i][j]
        return m

    def matmul(x, y):
        return [[sum(x[r][k] * y[k][c] for k in range(n)) for c in range(n)] for r in range(n)]

    w = [[int(r == c) for c in range(n)] for r in range(n)]
    while True:
        for i in range(n):
            col = [w[r][i] for r in range(n)]
            if all(v >= 0 for v in col):
                w = matmul(w, s_mat(i))
                break
        else:
            return w


def build_cartan(letter: str, rank: int, orientation: Iterable[tuple[int, int]] | None = None) -> CartanDatum:
    letter = letter.upper()
    if not 1 <= rank <= MAX_RANK:
        raise CartanError(f"rank {rank} outside supported range 1..{MAX_RANK}")
    a = _cartan_rows(letter, rank)
    d = _symmetrizers(a)
    roots = _positive_roots(a)
    w0 = longest_element(a)
    dual = []
    for i in range(rank):
        img = tuple(-w0[r][i] for r in range(rank))
        j = img.index(1)
        dual.append(j + 1)
    base = CartanDatum(letter, rank, tuple(tuple(r) for r in a), d, roots, tuple(dual))
    if orientation is None:
        orientation = sorted(tuple(sorted(e)) for e in base.edges)
    return base.with_orientation(orientation)


def parse_type(label: str) -> tuple[str, int]:
    label = label.strip()
    if len(label) < 2 or not label[0].isalpha() or not label[1:].isdigit():
        raise CartanError(f"cannot parse root system type {label!r}")
    return label[0].upper(), int(label[1:])


_KNOWN_POSITIVE = {"A": lambda n: n * (n + 1) // 2, "B": lambda n: n * n, "C": lambda n: n * n,
                   "D": lambda n: n * (n - 1), "E": {6: 36, 7: 63, 8: 120}.get,
                   "F": lambda n: 24, "G": lambda n: 6}


def expected_positive_root_count(letter: str, rank: int) -> int:
    return _KNOWN_POSITIVE[letter](rank)


def root_decompose(
    cd: CartanDatum, root: Sequence[int], node_order: Sequence[int] | None = None
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split a non-simple positive root as ``alpha = alpha_hat + alpha_check``.

    ``alpha_check`` is the first simple root in ``node_order`` (index order
    by default) whose removal leaves a positive root.
    """
    root = tuple(root)
    if root not in cd._root_set:
        raise CartanError(f"{root} is not a positive root of {cd.label}")
    if sum(root) == 1:
        raise CartanError(f"{root} is simple")
    for i in (node_order or cd.nodes):
        rest = list(root)
        rest[i - 1] -= 1
        rest = tuple(rest)
        if rest in cd._root_set:
            return rest, cd.simple_root(i)
    raise CartanError(f"no decomposition found for {root}")  # pragma: no cover


@dataclass(frozen=True)
class Coweight:
    """A coweight stored in fundamental and simple-coroot coordinates."""

    fund: tuple[int, ...]
    coroot: tuple[Fraction, ...]

    @classmethod
    def from_fund(cls, cd: CartanDatum, fund: Sequence[int]) -> "Coweight":
        if len(fund) != cd.rank:
            raise CartanError("wrong number of fundamental coordinates")
        at = [[cd.matrix[j][i] for j in range(cd.rank)] for i in range(cd.rank)]
        n = solve_rational(at, fund)
        return cls(tuple(int(x) for x in fund), tuple(n))

    @classmethod
    def from_coroot(cls, cd: CartanDatum, coroot: Sequence) -> "Coweight":
        if len(coroot) != cd.rank:
            raise CartanError("wrong number of coroot coordinates")
        n = tuple(Fraction(x) for x in coroot)
        fund = [sum(n[j] * cd.matrix[j][i] for j in range(cd.rank)) for i in range(cd.rank)]
        if any(f.denominator != 1 for f in fund):
            raise CartanError("coroot coordinates do not give an integral coweight")
        return cls(tuple(int(f) for f in fund), n)

    @classmethod
    def zero(cls, cd: CartanDatum) -> "Coweight":
        return cls.from_fund(cd, [0] * cd.rank)

    @classmethod
    def fundamental(cls, cd: CartanDatum, i: int, times: int = 1) -> "Coweight":
        return cls.from_fund(cd, [times * int(k == i) for k in cd.nodes])

    @classmethod
    def simple_coroot(cls, cd: CartanDatum, i: int) -> "Coweight":
        return cls.from_coroot(cd, [int(k == i) for k in cd.nodes])

    def __add__(self, other: "Coweight") -> "Coweight":
        return Coweight(tuple(a + b for a, b in zip(self.fund, other.fund)),
                        tuple(a + b for a, b in zip(self.coroot, other.coroot)))

    def __sub__(self, other: "Coweight") -> "Coweight":
        return Coweight(tuple(a - b for a, b in zip(self.fund, other.fund)),
                        tuple(a - b for a, b in zip(self.coroot, other.coroot)))

    @property
    def dominant(self) -> bool:
        return all(x >= 0 for x in self.fund)

    def pair(self, root: Sequence[int]) -> int:
        """``<coweight, root>`` for a root in simple-root coordinates."""
        return sum(c * l for c, l in zip(root, self.fund))


@dataclass(frozen=True)
class ShiftData:
    m: tuple[int, ...]
    lam: tuple[int, ...]
    mu: tuple[int, ...]

    def mi(self, i: int) -> int:
        return self.m[i - 1]

    def lam_i(self, i: int) -> int:
        return self.lam[i - 1]

    def mu_i(self, i: int) -> int:
        return self.mu[i - 1]


def shift_data(cd: CartanDatum, lam: Coweight, mu: Coweight) -> ShiftData:
    if not lam.dominant or not mu.dominant:
        raise CartanError("lambda and mu must be dominant")
    diff = lam - mu
    if any(x.denominator != 1 or x < 0 for x in diff.coroot):
        raise CartanError("lambda - mu is not in the positive coroot cone")
    m = tuple(int(diff.coroot[cd.star(i) - 1]) for i in cd.nodes)
    lam_i = tuple(lam.fund[cd.star(i) - 1] for i in cd.nodes)
    mu_i = tuple(mu.fund[cd.star(i) - 1] for i in cd.nodes)
    for i in cd.nodes:
        rhs = mu_i[i - 1] + sum(cd.a(j, i) * m[j - 1] for j in cd.nodes)
        if lam_i[i - 1] != rhs:
            raise AssertionError(f"shift identity fails at node {i}")  # pragma: no cover
    if sum(m) != sum(diff.coroot):
        raise AssertionError("sum of m_i differs from <rho, lambda - mu>")  # pragma: no cover
    return ShiftData(m, lam_i, mu_i)


def _product_coefficients(exponents: Sequence[int], order: int) -> list[int]:
    """Coefficients of prod_{i>=1} (1-q^i)^(-exponents[i]) up to q^order."""
    series = [1] + [0] * order
    for i in range(1, order + 1):
        e = exponents[i]
        if e == 0:
            continue
        # (1 - q^i)^(-e) = sum_k C(e-1+k, k) q^{ik}
        factor = [0] * (order + 1)
        for k in range(0, order // i + 1):
            factor[i * k] = comb(e - 1 + k, k)
        series = [sum(series[a] * factor[n - a] for a in range(n + 1)) for n in range(order + 1)]
    return series


def missing_f_count(cd: CartanDatum, mu: Coweight, k: int) -> int:
    """Number of roots alpha with ``<w0 mu, alpha> >= k``."""
    w0mu_on_pos = [-mu.pair(_star_root(cd, r)) for r in cd.positive_roots]
    values = w0mu_on_pos + [-v for v in w0mu_on_pos]
    return sum(1 for v in values if v >= k)


def _star_root(cd: CartanDatum, root: Sequence[int]) -> tuple[int, ...]:
    out = [0] * cd.rank
    for i, c in enumerate(root):
        out[cd.dual[i] - 1] += c
    return tuple(out)


def hilbert_count_slice(cd: CartanDatum, mu: Coweight, order: int) -> list[int]:
    if not mu.dominant:
        raise CartanError("mu must be dominant")
    exps = [0] + [cd.dim - missing_f_count(cd, mu, i) for i in range(1, order + 1)]
    return _product_coefficients(exps, order)


def count_pbw_monomials(cd: CartanDatum, mu: Coweight, order: int) -> list[int]:
    """Count graded monomials in the shifted Yangian generators by enumeration."""
    if not mu.dominant:
        raise CartanError("mu must be dominant")
    degrees = []
    for s in range(1, order + 1):
        degrees += [s] * len(cd.positive_roots)  # E_alpha^(s)
        degrees += [s] * cd.rank  # H_i^(s)
        for root in cd.positive_roots:
            if s > mu.pair(_star_root(cd, root)):
                degrees.append(s)
    counts = [1] + [0] * order
    for deg in degrees:
        for total in range(deg, order + 1):
            counts[total] += counts[total - deg]
    return counts
