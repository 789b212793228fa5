from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from yangslice import gklo
from yangslice.cartan import CartanError, Coweight, build_cartan
from yangslice.diffop import commutator
from yangslice.gklo import (
    beta_weights, build_context, classical_check, ef_series_residual, grading_check, h_from_a,
    quotient_facts, root_vector_image, sl2_casimir, solve_a_from_h, verify_proof_identities,
    verify_relations,
)
from yangslice.poly import H, Poly, QQ, RatFunc, aux, c, z
from yangslice.series import TruncSeries

RF0, RF1 = RatFunc.const(0), RatFunc.const(1)


def a1_context(n_alpha=1, mu=0, order=8, c_values=None):
    cd = build_cartan("A", 1)
    m = Coweight.fundamental(cd, 1, mu)
    lam = m + Coweight.from_coroot(cd, [n_alpha])
    return build_context(cd, lam, m, c_values, order)


@pytest.fixture(scope="module")
def sl2():
    return a1_context()


def test_sl2_images(sl2):
    alg = sl2.alg
    zz = Poly.var(z(1, 1))
    h = Poly.var(H)
    assert sl2.A[1].coeff(1) == RatFunc.from_poly(-zz)
    assert all(not sl2.A[1].coeff(s) for s in range(2, 9))
    assert sl2.H[1].coeff(1) == RatFunc.from_poly(zz.scale(2))
    assert sl2.E[1].coeff(1) == alg.beta(1, 1, -1)
    cx = (zz + h) * (zz + h) + Poly.var(c(1, 1)) * (zz + h) + Poly.var(c(1, 2))
    assert sl2.F[1].coeff(1) == alg.scalar(-cx) * alg.beta(1, 1, 1)
    # 1/(u - z) = sum z^(s-1) u^-s
    assert sl2.E[1].coeff(3) == alg.scalar(zz * zz) * alg.beta(1, 1, -1)


def test_sl2_relations_and_series_form(sl2):
    rep = verify_relations(sl2)
    assert rep.passed
    assert len(rep.entries) > 300
    assert ef_series_residual(sl2, 1, 4, 4).is_zero()


def test_casimir_value(sl2):
    # E = beta^-1, F = -C(z+h) beta, beta^-1 f(z) beta = f(z-h):
    # EF + FE = -C(z) - C(z+h), and adding (2z+c1+h)^2/2 leaves -2c2 + c1^2/2 - h^2/2
    c1, c2, h = Poly.var(c(1, 1)), Poly.var(c(1, 2)), Poly.var(H)
    expected = c2.scale(-2) + (c1 * c1).scale(QQ(1, 2)) - (h * h).scale(QQ(1, 2))
    assert sl2_casimir(sl2) == RatFunc.from_poly(expected)


def test_casimir_precondition():
    with pytest.raises(CartanError):
        sl2_casimir(a1_context(n_alpha=2, order=3))


def _generic_a(cd, order, tag="a"):
    return {i: TruncSeries([RF1] + [RatFunc.var(aux(tag, i, s)) for s in range(1, order + 1)], RF0)
            for i in cd.nodes}


def test_h_from_a_sl2_closed_forms():
    cd = build_cartan("A", 1)
    a = _generic_a(cd, 2)
    hs = h_from_a(a, cd)[1]
    a1, a2, h = Poly.var(aux("a", 1, 1)), Poly.var(aux("a", 1, 2)), Poly.var(H)
    assert hs.coeff(1) == RatFunc.from_poly(a1.scale(-2))
    assert hs.coeff(2) == RatFunc.from_poly((a1 * a1).scale(3) - h * a1 - a2.scale(2))


@pytest.mark.parametrize("t", [("A", 2), ("B", 2), ("G", 2)])
def test_solve_a_from_h_symbolic_round_trip(t):
    cd = build_cartan(*t)
    a = _generic_a(cd, 3)
    back = solve_a_from_h(h_from_a(a, cd), cd)
    for i in cd.nodes:
        assert back[i] == a[i]


rational = st.builds(lambda p, q: QQ(p, q), st.integers(-5, 5), st.integers(1, 3))


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([("A", 2), ("B", 2), ("C", 2), ("A", 3)]), st.data())
def test_solve_a_from_h_random_round_trip(t, data):
    cd = build_cartan(*t)
    h = RatFunc.var(H)
    a = {}
    for i in cd.nodes:
        coeffs = [RF1]
        for _ in range(4):
            coeffs.append(RatFunc.const(data.draw(rational)) + h.scale(data.draw(rational)))
        a[i] = TruncSeries(coeffs, RF0)
    hs = h_from_a(a, cd)
    back = solve_a_from_h(hs, cd)
    assert all(back[i] == a[i] for i in cd.nodes)
    assert h_from_a(back, cd) == hs


def test_solve_a_from_h_needs_unit():
    cd = build_cartan("A", 1)
    with pytest.raises(ZeroDivisionError):
        solve_a_from_h({1: TruncSeries([RatFunc.const(2), RF0], RF0)}, cd)


@pytest.mark.parametrize("n_alpha,mu", [(1, 0), (2, 0), (3, 0), (2, 1), (3, 2)])
def test_quotient_and_proof_identities_a1(n_alpha, mu):
    ctx = a1_context(n_alpha, mu, order=4)
    assert ctx.m(1) == n_alpha
    assert all(item.passed for item in quotient_facts(ctx))
    assert all(item.passed for item in verify_proof_identities(ctx))


def test_proof_identities_weighted_by_d():
    cd = build_cartan("B", 2)
    ctx = build_context(cd, Coweight.from_coroot(cd, [2, 2]), Coweight.zero(cd), None, 3)
    assert ctx.sd.m == (2, 2)
    items = {x.name: x.passed for x in verify_proof_identities(ctx)}
    assert all(items.values())
    # without the d_i factor only the short node (d = 1) survives
    plain = {x.name: x.passed for x in verify_proof_identities(ctx, weight_d=False)}
    assert plain["partial-fractions[1]"] and not plain["partial-fractions[2]"]


def test_numeric_c_context():
    cd = build_cartan("A", 2)
    mu = Coweight.zero(cd)
    lam = Coweight.from_coroot(cd, [1, 1])
    ctx = build_context(cd, lam, mu, {1: [QQ(1, 2)], 2: [QQ(-3)]}, order=4)
    assert not ctx.symbolic
    assert verify_relations(ctx).passed
    with pytest.raises(CartanError):
        build_context(cd, lam, mu, {1: [1, 2], 2: [0]}, order=3)


def test_reversed_orientation_relations():
    cd = build_cartan("C", 2).reversed()
    mu = Coweight.fundamental(cd, 2)
    ctx = build_context(cd, mu + Coweight.from_coroot(cd, [1, 1]), mu, None, 4)
    rep = verify_relations(ctx, gklo.RelationRanges(serre=2))
    assert rep.passed, [(e.family, e.index) for e in rep.failures()[:3]]


def test_grading_conventions():
    cd = build_cartan("A", 2)
    mu = Coweight.fundamental(cd, 1)
    ctx = build_context(cd, mu + Coweight.from_coroot(cd, [1, 1]), mu, None, 4)
    entries = grading_check(ctx)
    assert all(e.passed for e in entries)
    assert all(e.quoted_homogeneous for e in entries)
    quoted = beta_weights(ctx, "quoted")
    consistent = beta_weights(ctx, "consistent")
    assert quoted != consistent
    with pytest.raises(ValueError):
        beta_weights(ctx, "other")


def test_classical_limit_a2():
    cd = build_cartan("A", 2)
    ctx = build_context(cd, Coweight.from_coroot(cd, [1, 1]), Coweight.zero(cd), None, 4)
    items = classical_check(ctx, 100, seed=3)
    assert len(items) == 100
    assert all(x.passed for x in items)


def test_root_vectors_a2():
    cd = build_cartan("A", 2)
    ctx = build_context(cd, Coweight.from_coroot(cd, [1, 1]), Coweight.zero(cd), None, 4)
    e = root_vector_image(ctx, "E", (1, 1), 1)
    assert not e.set_h_zero().is_zero()
    assert commutator(ctx.E[2].coeff(1), ctx.E[1].coeff(1)) == e * ctx.alg.h()
    assert root_vector_image(ctx, "E", (1, 0), 2) == ctx.E[1].coeff(2)
    with pytest.raises(CartanError):
        root_vector_image(ctx, "E", (2, 1), 1)


def test_shifted_f_root_vector_range():
    cd = build_cartan("A", 2)
    mu = Coweight.fundamental(cd, 1)
    ctx = build_context(cd, mu + Coweight.from_coroot(cd, [1, 1]), mu, None, 4)
    shift = gklo.mu_star_pairing(ctx, (1, 1))
    assert shift == 1
    with pytest.raises(CartanError):
        root_vector_image(ctx, "F", (1, 1), shift)
    f = root_vector_image(ctx, "F", (1, 1), shift + 1)
    assert not f.is_zero()


def test_root_vectors_depend_on_node_order():
    cd = build_cartan("A", 2)
    ctx = build_context(cd, Coweight.from_coroot(cd, [1, 1]), Coweight.zero(cd), None, 4)
    rev = [2, 1]
    for r in (1, 2):
        a = root_vector_image(ctx, "E", (1, 1), r)
        b = root_vector_image(ctx, "E", (1, 1), r, node_order=rev)
        if r == 1:
            assert a == -b
        else:
            assert a != -b and a != b
    # the exact h-division itself holds for either choice
    root_vector_image(ctx, "F", (1, 1), 3, node_order=rev)


def test_r_series_without_shift(sl2):
    # m = 0 would need lambda = mu; here check the leading coefficients against C
    ctx = a1_context(n_alpha=1, mu=1, order=3, c_values={1: [QQ(1), QQ(2), QQ(3)]})
    assert ctx.lam_i(1) == 3
    assert ctx.r[1].coeff(0) == RF1


def test_lambda_equals_mu_gives_zero_images():
    cd = build_cartan("A", 2)
    mu = Coweight.fundamental(cd, 2)
    ctx = build_context(cd, mu, mu, None, 3)
    assert all(ctx.E[i].coeff(s).is_zero() and ctx.F[i].coeff(s).is_zero()
               for i in cd.nodes for s in range(1, 4))
    # r_i(u) = u^-lambda_i C_i(u)
    for i in cd.nodes:
        want = [RatFunc.from_poly(p) for p in ctx.c_coefficients(i)]
        assert ctx.r[i].coeffs[: len(want)] == want
        assert all(not x for x in ctx.r[i].coeffs[len(want):])


def test_shift_fraction_helper():
    cd = build_cartan("G", 2)
    shifts = gklo._neighbour_shifts(cd, 2)
    # q = d_2 a_21 / 2 + d_1 p with a_21 = -3, d = (3, 1), p = 1
    assert shifts == [(1, Fraction(-3, 2) + 3)]
