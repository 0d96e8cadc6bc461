import itertools
import random
from fractions import Fraction

import pytest

from gkcurv.errors import DimensionMismatch, WrongBidegree
from gkcurv.genalg import GenVec, PolyVec, clifford_act, genvec_wedge, pair_tt
from gkcurv.gkpair import (GKPair, bidegree_split, compatibility_check,
                           ddbar_pm, epm_split, frame_bivector,
                           hamiltonian_element, jdot_matrix,
                           random_compat_bivector, trace_pairing, type00_check)
from gkcurv.linalg import mat_is_zero, mat_mul, mat_add, mat_identity
from gkcurv.scalars import Point, QQi
from gkcurv.spinor import GenericGCS, SymplecticGCS

from conftest import chart_flat
from test_spinor import flat_omega, flat_volume_struct


def flat_kahler_pair(n):
    chart = chart_flat(n)
    return GKPair(flat_volume_struct(chart), chart.zero_form(), flat_omega(chart))


def hk_t4_data():
    chart = chart_flat(2, periodic=True)
    w_i = chart.form({(0, 1): 1, (2, 3): 1})
    w_j = chart.form({(0, 2): 1, (1, 3): -1})
    w_k = chart.form({(0, 3): 1, (1, 2): 1})
    B = w_j
    w1 = (w_i + w_k).scale(Fraction(1, 2))
    w2 = (w_i - w_k).scale(Fraction(1, 2))
    return chart, B, w1, w2


def test_flat_kahler_compatibility():
    pair = flat_kahler_pair(2)
    pts = [Point([0, 0, 0, 0]), Point([1, 2, -1, 3])]
    rep = compatibility_check(pair, pts)
    assert rep["commute"] and rep["positive"]
    assert rep["min_eigenvalue"] > 0


def test_reversed_omega_not_positive():
    chart = chart_flat(1)
    w = flat_omega(chart)
    j1 = SymplecticGCS(chart, chart.zero_form(), w)
    pair = GKPair(j1, chart.zero_form(), -w)
    rep = compatibility_check(pair, [Point([0, 0])])
    assert rep["commute"] and not rep["positive"]


def test_ghat_squares_to_identity():
    pair = flat_kahler_pair(1)
    gh = pair.ghat()
    sq = mat_mul(gh, gh)
    chart = pair.chart
    for r in range(4):
        for c in range(4):
            assert sq[r][c] == (chart.one_s() if r == c else chart.zero_s())


def test_epm_split_flat():
    pair = flat_kahler_pair(2)
    fr = pair.epm_frame()
    assert len(fr.eplus) == 2 and len(fr.eminus) == 2
    # all frame elements annihilate either psi or conj(psi) appropriately
    j1 = pair.j1.j_matrix()
    from gkcurv.linalg import mat_vec
    for e in fr.es:
        got = GenVec.from_column(pair.chart, mat_vec(j1, e.column()))
        assert got == e.scale(QQi(0, -1))
    # duals are normalised within blocks
    for i, d in enumerate(fr.duals):
        for j, e in enumerate(fr.es):
            expect = pair.chart.one_s() if i == j else pair.chart.zero_s()
            assert pair_tt(d, e) * 2 == expect
    # G signs: <e+, conj e+> > 0, <e-, conj e-> < 0 at a point
    p = Point([0, 0, 0, 0])
    for e in fr.eplus:
        v = pair_tt(e, e.conj()).eval(p, float_fallback=False)
        assert v.im == 0 and v.re > 0
    for e in fr.eminus:
        v = pair_tt(e, e.conj()).eval(p, float_fallback=False)
        assert v.im == 0 and v.re < 0


def test_epm_failure_on_bad_pair():
    chart = chart_flat(1)
    w = flat_omega(chart)
    j1 = SymplecticGCS(chart, chart.zero_form(), w)
    pair = GKPair(j1, chart.zero_form(), -w)
    with pytest.raises(DimensionMismatch):
        epm_split(pair)


def test_type00_hyperkahler():
    chart, B, w1, w2 = hk_t4_data()
    pts = [Point([0, 0, 0, 0]), Point([1, 1, 2, 0])]
    rep = type00_check(chart, B, w1, w2, pts)
    assert rep["pass"]
    assert all(rep["four_dim_conditions"].values())
    # B = 0 fails the nondegeneracy condition
    rep2 = type00_check(chart, chart.zero_form(), w1, w2)
    assert not rep2["pass"]
    # w1 ^ w2 != 0 perturbation fails
    rep3 = type00_check(chart, B, w1 + w2.scale(Fraction(1, 3)), w2)
    assert not rep3["pass"]


def test_hyperkahler_pair_is_gk():
    chart, B, w1, w2 = hk_t4_data()
    j1 = GenericGCS(chart, (B + w1.scale(QQi(0, 1))).exp())
    pair = GKPair(j1, chart.zero_form(), w2)
    rep = compatibility_check(pair, [Point([0, 0, 0, 0])])
    assert rep["commute"] and rep["positive"]
    fr = pair.epm_frame()
    assert len(fr.eplus) == 2 and len(fr.eminus) == 2


def test_hamiltonian_element():
    pair = flat_kahler_pair(1)
    chart = pair.chart
    e = hamiltonian_element(pair, chart.sc("x1"))
    assert e == -GenVec.basis(chart, 1)
    assert hamiltonian_element(pair, chart.sc("5")).is_zero()


def test_hamiltonian_element_with_b():
    chart = chart_flat(2)
    b = chart.form({(0, 2): 1, (1, 3): -2})
    pair = GKPair(flat_volume_struct(chart), b, flat_omega(chart))
    f = chart.sc("x1*x3 + cos(x2)")
    e = hamiltonian_element(pair, f)  # defining identity asserted inside
    assert e.is_real()


def test_ddbar_pm_linear_vanishes():
    pair = flat_kahler_pair(2)
    out = ddbar_pm(pair, pair.chart.sc("x1 - 2*x3"))
    assert not out["mixed"]
    assert not out["pure_minus_residue"]


def test_ddbar_pm_quadratic():
    pair = flat_kahler_pair(2)
    out = ddbar_pm(pair, pair.chart.sc("x1*x2"))
    assert out["mixed"]
    assert not out["pure_minus_residue"]
    # oracle: full differential of the (0,1span) Hamiltonian section equals
    # a constant multiple (+-2i) of the mixed part, and has no pure parts
    n = pair.chart.n
    oracle = out["oracle_full"]
    for (i, j) in oracle:
        assert i < n <= j
    ratios = []
    for k, v in out["mixed"].items():
        ratios.append(oracle[k] / v)
    assert all(r == ratios[0] for r in ratios)
    r0 = ratios[0]
    assert (r0 * r0) == pair.chart.const(-4)


def test_trace_pairing_zero_and_bidegree():
    pair = flat_kahler_pair(2)
    zero_h = PolyVec(pair.chart, 2)
    assert trace_pairing(pair, zero_h, zero_h).is_zero()
    bad = genvec_wedge(GenVec.basis(pair.chart, 0), GenVec.basis(pair.chart, 4))
    with pytest.raises(WrongBidegree):
        trace_pairing(pair, bad, bad)


def test_random_compat_bivector_properties():
    pair = flat_kahler_pair(2)
    rng = random.Random(31)
    chart = pair.chart
    j = pair.j1.j_matrix()
    for _ in range(5):
        h = random_compat_bivector(pair, rng)
        assert h.is_real()
        h20, h02 = bidegree_split(pair, h)  # no (1,1) residue
        jd = jdot_matrix(pair, h)
        anti = mat_add(mat_mul(jd, j), mat_mul(j, jd))
        assert mat_is_zero(anti)


def test_trace_pairing_antisymmetric_imaginary_part():
    """tr(J Jdot1 Jdot2) has the symmetry used by the deformation 2-form."""
    pair = flat_kahler_pair(2)
    rng = random.Random(33)
    h1 = random_compat_bivector(pair, rng)
    h2 = random_compat_bivector(pair, rng)
    t12 = trace_pairing(pair, h1, h2, check_bidegree=False)
    t21 = trace_pairing(pair, h2, h1, check_bidegree=False)
    # real and exactly antisymmetric: the deformation 2-form integrand
    assert t12.is_real()
    assert (t12 + t21).is_zero()
