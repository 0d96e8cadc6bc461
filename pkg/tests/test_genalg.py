import random
from fractions import Fraction

import pytest

from gkcurv.errors import NotBivector, NotClosed
from gkcurv.genalg import (GenVec, PolyVec, ad_b, ad_beta, clifford_act,
                           courant, dorfman, exp_spin, gen_lie_J,
                           genvec_wedge, interior, lie_form, pair_tt)
from gkcurv.scalars import QQi

from conftest import chart_flat, random_form, random_scalar


def random_genvec(rng, chart, trig=True, mono=True):
    dim = chart.dim
    return GenVec(chart,
                  [random_scalar(rng, chart, trig, mono, 1) for _ in range(dim)],
                  [random_scalar(rng, chart, trig, mono, 1) for _ in range(dim)])


def test_pair_basics(chart2):
    d1 = GenVec.basis(chart2, 0)
    d2 = GenVec.basis(chart2, 1)
    dx1 = GenVec.basis(chart2, 2)
    e = d1 + dx1
    assert pair_tt(e, e) == chart2.one_s()
    assert pair_tt(d1, d2).is_zero()
    assert pair_tt(d1, dx1) == chart2.const(Fraction(1, 2))


def test_clifford_interior_and_wedge(chart2):
    vol = chart2.volume()
    d1 = GenVec.basis(chart2, 0)
    assert clifford_act(d1, vol) == chart2.dx(1)
    dx1 = GenVec.basis(chart2, 2)
    dx2 = GenVec.basis(chart2, 3)
    assert clifford_act(dx1, clifford_act(dx2, chart2.func(1))) == \
        chart2.form({(0, 1): 1})


def test_clifford_square(chart2):
    rng = random.Random(1)
    d1 = GenVec.basis(chart2, 0)
    dx1 = GenVec.basis(chart2, 2)
    e = d1 + dx1
    for _ in range(10):
        a = random_form(rng, chart2)
        assert clifford_act(e, clifford_act(e, a)) == a


@pytest.mark.parametrize("n", [1, 2, 3])
def test_clifford_relation_random(n):
    chart = chart_flat(n)
    rng = random.Random(100 + n)
    reps = 25 if n < 3 else 6
    for _ in range(reps):
        e1 = random_genvec(rng, chart)
        e2 = random_genvec(rng, chart)
        a = random_form(rng, chart, max_terms=1)
        lhs = clifford_act(e1, clifford_act(e2, a)) + \
            clifford_act(e2, clifford_act(e1, a))
        rhs = a.scale(pair_tt(e1, e2) * 2)
        assert lhs == rhs


@pytest.mark.parametrize("n", [1, 2])
def test_mukai_adjoint_exhaustive(n):
    """<e.a, b> + <a, e.b> = 0 over the whole coordinate basis."""
    chart = chart_flat(n)
    import itertools
    basis_forms = [chart.form({idx: 1}) for k in range(chart.dim + 1)
                   for idx in itertools.combinations(range(chart.dim), k)]
    for a_id in range(2 * chart.dim):
        e = GenVec.basis(chart, a_id)
        for alpha in basis_forms:
            for beta in basis_forms:
                lhs = clifford_act(e, alpha).mukai(beta) + \
                    alpha.mukai(clifford_act(e, beta))
                assert lhs.is_zero()


def test_polarization_calibrated_sign(chart4):
    """<e1.w1, e2.w2> + <e2.w1, e1.w2> = s * 2<e1,e2><w1,w2> with s = -1."""
    rng = random.Random(23)
    for _ in range(30):
        e1 = random_genvec(rng, chart4)
        e2 = random_genvec(rng, chart4)
        w1 = random_form(rng, chart4, max_terms=1)
        w2 = random_form(rng, chart4, max_terms=1)
        lhs = clifford_act(e1, w1).mukai(clifford_act(e2, w2)) + \
            clifford_act(e2, w1).mukai(clifford_act(e1, w2))
        rhs = w1.mukai(w2).scale(pair_tt(e1, e2) * (-2))
        assert lhs == rhs


def test_courant_examples(chart2):
    d1 = GenVec.basis(chart2, 0)
    d2 = GenVec.basis(chart2, 1)
    assert courant(d1, d2).is_zero()
    e2 = GenVec(chart2, [0, 0], [0, "x1"])
    got = courant(d1, e2)
    assert got.v == GenVec.zero(chart2).v
    assert got.covector_form() == chart2.dx(1)
    rng = random.Random(3)
    for _ in range(10):
        x = random_genvec(rng, chart2)
        assert courant(x, x).is_zero()


def test_courant_antisymmetric_dorfman_leibniz(chart4):
    rng = random.Random(5)
    for _ in range(8):
        a = random_genvec(rng, chart4, trig=False)
        b = random_genvec(rng, chart4, trig=False)
        c = random_genvec(rng, chart4, trig=False)
        ab = courant(a, b) + courant(b, a)
        assert ab.is_zero()
        lhs = dorfman(a, dorfman(b, c))
        rhs = dorfman(dorfman(a, b), c) + dorfman(b, dorfman(a, c))
        assert (lhs - rhs).is_zero()


def test_lie_form_examples(chart2):
    d1 = GenVec.basis(chart2, 0)
    a = chart2.form({(1,): "x1"})
    assert lie_form(d1, a) == chart2.dx(1)
    dx1 = GenVec.basis(chart2, 2)
    f = chart2.func("x2")
    assert lie_form(dx1, f).is_zero()


def test_lie_form_closed_case(chart4):
    rng = random.Random(7)
    for _ in range(10):
        e = random_genvec(rng, chart4)
        a = random_form(rng, chart4)
        closed = a.ext_d()
        assert lie_form(e, closed) == clifford_act(e, closed).ext_d()


def test_ad_b(chart4):
    rng = random.Random(9)
    b = chart4.form({(0, 1): "x3", (2, 3): 1}).ext_d()  # not closed: make one
    b = chart4.form({(0, 1): 2, (1, 2): "x1"})
    if not b.ext_d().is_zero():
        b = chart4.form({(0, 1): 2, (1, 2): 1})
    d1 = GenVec.basis(chart4, 0)
    got = ad_b(b, d1)
    ivb = interior(chart4, d1.v, b)
    assert got.covector_form() == -ivb
    x = random_genvec(rng, chart4)
    assert ad_b(chart4.zero_form(), x) == x
    for _ in range(10):
        e1 = random_genvec(rng, chart4)
        e2 = random_genvec(rng, chart4)
        assert pair_tt(ad_b(b, e1), ad_b(b, e2)) == pair_tt(e1, e2)


def test_ad_b_not_closed(chart4):
    b = chart4.form({(0, 1): "x3"})
    with pytest.raises(NotClosed):
        ad_b(b, GenVec.basis(chart4, 0))


def test_ad_b_composition(chart4):
    rng = random.Random(11)
    b1 = chart4.form({(0, 1): 1, (0, 2): -2})
    b2 = chart4.form({(1, 3): 3, (2, 3): 1})
    e = random_genvec(rng, chart4)
    assert ad_b(b1, ad_b(b2, e)) == ad_b(b1 + b2, e)
    a = random_form(rng, chart4)
    assert ad_b(b1, ad_b(b2, a)) == ad_b(b1 + b2, a)


def test_ad_b_spin_compatibility(chart4):
    """Ad_{e^b}(x) . (e^b ^ a) = e^b ^ (x . a)."""
    rng = random.Random(13)
    b = chart4.form({(0, 1): "x3", (2, 3): 2})
    b = b if b.ext_d().is_zero() else chart4.form({(0, 1): 1})
    for _ in range(10):
        x = random_genvec(rng, chart4)
        a = random_form(rng, chart4)
        lhs = clifford_act(ad_b(b, x), ad_b(b, a))
        rhs = ad_b(b, clifford_act(x, a))
        assert lhs == rhs


def test_ad_beta_basics(chart4):
    d1 = GenVec.basis(chart4, 0)
    d3 = GenVec.basis(chart4, 2)
    beta = genvec_wedge(d1, d3)
    dx1 = GenVec.basis(chart4, 4)
    got = ad_beta(beta, dx1)
    # [d1 ^ d3, dx1] = 2<d3, dx1>d1 - 2<d1, dx1>d3 = -d3
    assert got == dx1 - d3
    x = GenVec.basis(chart4, 5)
    assert ad_beta(PolyVec(chart4, 2), x) == x


def test_ad_beta_rejects_covectors(chart4):
    bad = genvec_wedge(GenVec.basis(chart4, 0), GenVec.basis(chart4, 4))
    with pytest.raises(NotBivector):
        ad_beta(bad, GenVec.basis(chart4, 0))


def test_ad_beta_spin_compatibility(chart4):
    rng = random.Random(17)
    d1 = GenVec.basis(chart4, 0)
    d3 = GenVec.basis(chart4, 2)
    beta = genvec_wedge(d1.scale(chart4.sc("x2")), d3)
    for _ in range(10):
        x = random_genvec(rng, chart4)
        a = random_form(rng, chart4)
        lhs = clifford_act(ad_beta(beta, x), ad_beta(beta, a))
        rhs = ad_beta(beta, clifford_act(x, a))
        assert lhs == rhs


def test_quantize_matches_clifford_product_isotropic(chart4):
    rng = random.Random(19)
    for _ in range(10):
        # two vectors: always isotropic, quantize = composed interior products
        u = GenVec.vector(chart4, [random_scalar(rng, chart4, max_terms=1)
                                   for _ in range(4)])
        w = GenVec.vector(chart4, [random_scalar(rng, chart4, max_terms=1)
                                   for _ in range(4)])
        h = genvec_wedge(u, w)
        a = random_form(rng, chart4)
        lhs = h.spin_act(a)
        rhs = clifford_act(u, clifford_act(w, a))
        assert lhs == rhs


def test_spin_rep_ad_compatibility(chart4):
    """[quantize(h), e.] = (ad_h e) . on forms, for mixed-index bivectors."""
    rng = random.Random(21)
    for _ in range(10):
        h = genvec_wedge(random_genvec(rng, chart4, trig=False),
                         random_genvec(rng, chart4, trig=False))
        e = random_genvec(rng, chart4, trig=False)
        a = random_form(rng, chart4, trig=False, max_terms=1)
        lhs = h.spin_act(clifford_act(e, a)) - clifford_act(e, h.spin_act(a))
        rhs = clifford_act(h.ad(e), a)
        assert lhs == rhs


def test_trivec_action_isotropic(chart4):
    rng = random.Random(23)
    u = GenVec.vector(chart4, ["x2", 0, 1, 0])
    w = GenVec.vector(chart4, [0, 1, 0, 0])
    z = GenVec.vector(chart4, [0, 0, "x1", 2])
    t = genvec_wedge(u, w, z)
    for _ in range(6):
        a = random_form(rng, chart4)
        lhs = t.spin_act(a)
        rhs = clifford_act(u, clifford_act(w, clifford_act(z, a)))
        assert lhs == rhs


def test_gen_lie_translation_invariance(chart2):
    # constant J (flat symplectic block form), constant e -> L_e J = 0
    z, o = chart2.zero_s(), chart2.one_s()
    jmat = [[z, z, z, o], [z, z, -o, z], [z, -o, z, z], [o, z, z, z]]
    # columns: J(d1) = dx2 etc.; exact block values are checked in spinor tests
    e = GenVec.basis(chart2, 0)
    out = gen_lie_J(e, jmat)
    assert all(x.is_zero() for row in out for x in row)
