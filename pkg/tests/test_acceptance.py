"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary is repeated at
the end of the session.
"""

import random
import time
from dataclasses import replace

from yangslice import cartan, gklo, minors
from yangslice.cartan import Coweight, build_cartan
from yangslice.poly import H, Poly, QQ, RatFunc, aux, c, z
from yangslice.scenario import acceptance_matrix, build, bundled_scenarios, load_scenario, resolve, run_scenario
from yangslice.series import TruncSeries, linear_factor

RF0, RF1 = RatFunc.const(0), RatFunc.const(1)

# extra scenarios reaching m_i = 2 and 3: (type, rank, lambda - mu as coroot, mu as fundamental)
DEEP = [
    ("A", 1, [2], [0]), ("A", 1, [3], [0]), ("A", 1, [2], [1]), ("A", 1, [3], [2]),
    ("A", 2, [2, 1], [0, 0]), ("A", 2, [3, 3], [0, 1]), ("A", 3, [1, 2, 1], [0, 0, 0]),
    ("B", 2, [2, 2], [1, 0]), ("B", 2, [3, 3], [0, 0]),
    ("C", 2, [2, 2], [1, 0]), ("C", 2, [3, 3], [0, 0]),
    ("G", 2, [2, 1], [0, 0]), ("G", 2, [3, 2], [0, 0]),
]


def all_contexts():
    """Bundled scenarios, the relation matrix and the deeper scenarios above."""
    out = []
    for name in bundled_scenarios():
        sc = load_scenario(name)
        out.append((name, build(resolve(replace(sc, order=min(sc.order, 6))))))
    for sc in acceptance_matrix(6):
        out.append((sc.name, build(resolve(sc))))
    for letter, rank, nu, mu in DEEP:
        cd = build_cartan(letter, rank)
        m = Coweight.from_fund(cd, mu)
        # small slices need N = 6 to offer 100 distinct coefficient pairs
        order = 6 if sum(nu) <= 2 else 4
        ctx = gklo.build_context(cd, m + Coweight.from_coroot(cd, nu), m, None, order)
        out.append((f"{letter}{rank} nu={nu} mu={mu}", ctx))
    return out


_CONTEXTS = None


def contexts():
    global _CONTEXTS
    if _CONTEXTS is None:
        _CONTEXTS = all_contexts()
    return _CONTEXTS


def test_criterion_01_sl2_anchor(criterion):
    with criterion(1, "sl2 anchor images at N=8 and zero relation residuals"):
        sc = load_scenario("a1_fundamental")
        assert sc.order == 8 and sc.c == "symbolic"
        ctx = build(resolve(sc))
        alg = ctx.alg
        zz, h = Poly.var(z(1, 1)), Poly.var(H)
        c1, c2 = Poly.var(c(1, 1)), Poly.var(c(1, 2))
        # A(u) = 1 - z u^-1
        assert ctx.A[1].coeffs[:9] == [RF1, RatFunc.from_poly(-zz)] + [RF0] * 7
        assert ctx.E[1].coeff(1) == alg.beta(1, 1, -1)
        assert ctx.H[1].coeff(1) == RatFunc.from_poly(zz.scale(2))
        cx = (zz + h) * (zz + h) + c1 * (zz + h) + c2
        assert ctx.F[1].coeff(1) == alg.scalar(-cx) * alg.beta(1, 1, 1)
        # whole series: E(u) = (u - z)^-1 beta^-1, F(u) = -C(z + h) (u - z - h)^-1 beta,
        # H(u) = u (u - h) / ((u - z)(u - z - h)) and J = r H has numerator u^-2 C(u)
        for r in range(1, 9):
            assert ctx.E[1].coeff(r) == alg.scalar(zz ** (r - 1)) * alg.beta(1, 1, -1)
            assert ctx.F[1].coeff(r) == alg.scalar(-cx * (zz + h) ** (r - 1)) * alg.beta(1, 1, 1)
        zf = RatFunc.from_poly(zz)
        den = linear_factor(zf, RF1, RF0, 8) * linear_factor(zf + RatFunc.var(H), RF1, RF0, 8)
        assert (ctx.H[1] * den).coeffs[:9] == [RF1, RatFunc.from_poly(-h)] + [RF0] * 7
        assert (ctx.J[1] * den).coeffs[:9] == [RF1, RatFunc.from_poly(c1), RatFunc.from_poly(c2)] + [RF0] * 6
        rep = gklo.verify_relations(ctx)
        assert rep.passed and len(rep.entries) > 0
        assert all(e.residual.is_zero() for e in rep.entries)


def test_criterion_02_sl2_casimir(criterion):
    with criterion(2, "sl2 Casimir equals 2c2 - c1^2/2 + h^2/2 exactly"):
        ctx = build(resolve(load_scenario("a1_fundamental")))
        c1, c2, h = Poly.var(c(1, 1)), Poly.var(c(1, 2)), Poly.var(H)
        target = c2.scale(2) - (c1 * c1).scale(QQ(1, 2)) + (h * h).scale(QQ(1, 2))
        value = gklo.sl2_casimir(ctx)
        assert value == RatFunc.from_poly(target), f"computed Casimir image is {value}"


def test_criterion_03_relation_matrix(criterion):
    with criterion(3, "relation residuals zero on the A2/A3/B2/C2/G2 matrix, both orientations, N=6"):
        matrix = acceptance_matrix(6)
        assert {sc.type_label for sc in matrix} == {"A2", "A3", "B2", "C2", "G2"}
        assert {sc.orientation for sc in matrix} == {"default", "reversed"}
        assert all(sc.serre <= 3 and sc.order >= 6 for sc in matrix)
        t0 = time.perf_counter()
        failed = []
        for sc in matrix:
            report, _ = run_scenario(sc)
            suite = report["suites"]["relations"]
            assert suite["checks"] > 0
            if not report["passed"]:
                failed.append((sc.name, suite["failures"][:2]))
        elapsed = time.perf_counter() - t0
        assert not failed, failed
        assert elapsed < 600, f"{elapsed:.0f} s"


def _random_a(cd, order, rng):
    h = RatFunc.var(H)
    out = {}
    for i in cd.nodes:
        coeffs = [RF1]
        for _ in range(order):
            coeffs.append(RatFunc.const(QQ(rng.randint(-9, 9), rng.randint(1, 4)))
                          + h.scale(QQ(rng.randint(-3, 3), rng.randint(1, 3))))
        out[i] = TruncSeries(coeffs, RF0)
    return out


def test_criterion_04_a_from_h(criterion):
    with criterion(4, "A-from-H round trip to order N and sl2 closed forms"):
        rng = random.Random(4)
        for letter, rank in [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("C", 2), ("G", 2)]:
            cd = build_cartan(letter, rank)
            for _ in range(5):
                a = _random_a(cd, 6, rng)
                back = gklo.solve_a_from_h(gklo.h_from_a(a, cd), cd)
                assert all(back[i] == a[i] for i in cd.nodes)
        cd = build_cartan("A", 1)
        a = {1: TruncSeries([RF1, RatFunc.var(aux("a", 1, 1)), RatFunc.var(aux("a", 1, 2))], RF0)}
        hs = gklo.h_from_a(a, cd)[1]
        a1, a2, h = Poly.var(aux("a", 1, 1)), Poly.var(aux("a", 1, 2)), Poly.var(H)
        assert hs.coeff(1) == RatFunc.from_poly(a1.scale(-2))
        assert hs.coeff(2) == RatFunc.from_poly((a1 * a1).scale(3) - h * a1 - a2.scale(2))


def test_criterion_05_quotient_facts(criterion):
    with criterion(5, "A_i truncates at m_i with top coefficient (-1)^m_i z_i1...z_im, every scenario"):
        bad = []
        for name, ctx in contexts():
            bad += [(name, x.name) for x in gklo.quotient_facts(ctx) if not x.passed]
            # independent restatement of the top coefficient
            for i in ctx.cd.nodes:
                m = ctx.m(i)
                top = Poly.const(1)
                for k in range(1, m + 1):
                    top = top * Poly.var(z(i, k))
                assert ctx.A[i].coeff(m) == RatFunc.from_poly(top.scale((-1) ** m))
                assert all(not ctx.A[i].coeff(s) for s in range(m + 1, ctx.order + 1))
        assert not bad, bad[:5]


def test_criterion_06_grading(criterion):
    with criterion(6, "every image coefficient homogeneous, every scenario"):
        bad = []
        for name, ctx in contexts():
            for e in gklo.grading_check(ctx):
                if not (e.passed and e.quoted_homogeneous):
                    bad.append((name, e.series, e.node, e.index))
        assert not bad, bad[:5]


def test_criterion_07_classical(criterion):
    with criterion(7, "classical limit matches the Poisson bracket on >= 100 pairs per scenario"):
        bad = []
        for name, ctx in contexts():
            if not any(ctx.sd.m):
                # lambda = mu: the slice is a point and every image is a scalar
                assert gklo.classical_check(ctx, 100, seed=7) == []
                continue
            items = gklo.classical_check(ctx, 100, seed=7)
            assert len(items) >= 100, (name, len(items))
            bad += [(name, x.name) for x in items if not x.passed]
        assert not bad, bad[:5]


def _pgl2_sides(n, m):
    d = [[Poly.const(1), Poly()], [Poly(), Poly.var(minors.T, m)]]
    left = minors._mat_mul(minors._laurent_matrix(n, Poly.var(minors.V)), d)
    right = minors._mat_mul(minors._laurent_matrix(m, Poly.var(minors.V) * Poly.var(minors.W) ** (m - n)), d)
    return left, right


def test_criterion_08_kleinian(criterion):
    with criterion(8, "Kleinian determinant, PGL2 two-sided identity verbatim, Poisson table for n=0..3"):
        for n in range(4):
            items = minors.verify_kleinian(n)
            names = [x.name for x in items]
            assert any(s.startswith("det - 1") for s in names)
            assert any(s.startswith("PGL2") for s in names)
            assert {"{w,u} = u", "{w,v} = -v"} <= set(names)
            assert all(x.passed for x in items), [(x.name, x.detail) for x in items if not x.passed]
        # the identity as a literal equality of matrices over Q[u, v, w, t, t^-1];
        # the two sides agree only up to a right factor in PGL_2[t] (checked above)
        differing = []
        for n in range(4):
            for m in (n + 1, n + 2):
                left, right = _pgl2_sides(n, m)
                if left != right:
                    differing.append((n, m))
        assert not differing, (
            f"the two sides differ as matrices for (n, m) in {differing}; "
            "they agree as cosets modulo PGL_2[t]"
        )


def test_criterion_09_minor_brackets(criterion):
    with criterion(9, "minor brackets: r-matrix oracle, Jacobi, det ideal, phi brackets at N=4"):
        oracle = minors.oracle_suite(4)
        assert len(oracle) == 16 * 15 and all(x.passed for x in oracle)
        jac = minors.jacobi_suite(50, 4, seed=9)
        assert sum(1 for x in jac if x.name.startswith("jacobi")) >= 50
        assert all(x.passed for x in jac)
        assert all(x.passed for x in minors.det_ideal_check(3))
        phi = minors.phi_bracket_check(4)
        assert phi and all(x.passed for x in phi)


def test_criterion_10_hilbert(criterion):
    with criterion(10, "Hilbert counts equal PBW counts to q^8 for A1, A2, B2; mu = 0 product"):
        for letter, rank in [("A", 1), ("A", 2), ("B", 2)]:
            cd = build_cartan(letter, rank)
            mus = [Coweight.zero(cd)]
            for i in cd.nodes:
                mus += [Coweight.fundamental(cd, i), Coweight.fundamental(cd, i, 2)]
            for mu in mus:
                hs = cartan.hilbert_count_slice(cd, mu, 8)
                assert hs == cartan.count_pbw_monomials(cd, mu, 8), (cd.label, mu.fund)
            # prod_i (1 - q^i)^-dim, multiplied out by repeated geometric series
            series = [1] + [0] * 8
            for i in range(1, 9):
                for _ in range(cd.dim):
                    for k in range(i, 9):
                        series[k] += series[k - i]
            assert cartan.hilbert_count_slice(cd, Coweight.zero(cd), 8) == series


def test_criterion_11_proof_identities(criterion):
    with criterion(11, "partial-fraction and J-truncation identities for all scenarios with m_i <= 3"):
        seen = set()
        bad = []
        for name, ctx in contexts():
            if max(ctx.sd.m) > 3:
                continue
            seen.update(ctx.sd.m)
            bad += [(name, x.name, x.detail) for x in gklo.verify_proof_identities(ctx) if not x.passed]
        assert {1, 2, 3} <= seen
        assert not bad, bad[:5]
