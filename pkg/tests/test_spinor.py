import random
from fractions import Fraction

import pytest

from gkcurv.errors import DecompositionFailed, ImpureSpinor
from gkcurv.forms import Form
from gkcurv.genalg import (GenVec, clifford_act, genvec_wedge, pair_tt)
from gkcurv.linalg import mat_mul, mat_vec
from gkcurv.scalars import Point, QQi
from gkcurv.spinor import (BetaDeformGCS, ComplexVolumeGCS, GenericGCS,
                           SymplecticGCS, eta_N_extract, integrability,
                           purity_nondeg, spinor_of, type_number)

from conftest import chart_flat, random_form


def flat_omega(chart):
    return chart.form({(2 * k, 2 * k + 1): 1 for k in range(chart.n)})


def flat_volume_struct(chart):
    """dz_1 ^ ... ^ dz_n with z_k = x_{2k-1} + i x_{2k}."""
    forms = []
    for k in range(chart.n):
        forms.append(chart.form({(2 * k,): 1, (2 * k + 1,): QQi(0, 1)}))
    return ComplexVolumeGCS(chart, forms)


def _jmat_apply(jmat, e):
    return GenVec.from_column(e.chart, mat_vec(jmat, e.column()))


def _check_j_squared(chart, jmat):
    sq = mat_mul(jmat, jmat)
    for r in range(2 * chart.dim):
        for c in range(2 * chart.dim):
            expect = chart.const(-1) if r == c else chart.zero_s()
            assert sq[r][c] == expect


def test_symplectic_spinor(chart2):
    J = SymplecticGCS(chart2, chart2.zero_form(), flat_omega(chart2))
    psi = spinor_of(J)
    assert psi == chart2.form({(): 1, (0, 1): QQi(0, 1)})


def test_complex_volume_spinor(chart4):
    J = flat_volume_struct(chart4)
    omega = spinor_of(J)
    # dz1^dz2 expanded
    expect = chart4.form({(0, 2): 1, (0, 3): QQi(0, 1),
                          (1, 2): QQi(0, 1), (1, 3): -1})
    assert omega == expect


def test_symplectic_jmat(chart2):
    J = SymplecticGCS(chart2, chart2.zero_form(), flat_omega(chart2))
    jm = J.j_matrix()
    _check_j_squared(chart2, jm)
    # annihilator convention: J e = -i e on ker(spinor)
    for e in J.annihilator():
        assert _jmat_apply(jm, e) == e.scale(QQi(0, -1))
    # the quoted block form lives on the pairing side of a pair
    from gkcurv.spinor import symplectic_block_matrix
    bm = symplectic_block_matrix(chart2, chart2.zero_form(), flat_omega(chart2))
    d1 = GenVec.basis(chart2, 0)
    assert _jmat_apply(bm, d1) == GenVec.basis(chart2, 3)       # J(d1) = dx2
    dx2 = GenVec.basis(chart2, 3)
    assert _jmat_apply(bm, dx2) == -GenVec.basis(chart2, 0)     # J(dx2) = -d1


def test_complex_volume_jmat(chart2):
    J = flat_volume_struct(chart2)
    jm = J.j_matrix()
    _check_j_squared(chart2, jm)
    dx, dy = GenVec.basis(chart2, 0), GenVec.basis(chart2, 1)
    assert _jmat_apply(jm, dx) == dy
    cdx, cdy = GenVec.basis(chart2, 2), GenVec.basis(chart2, 3)
    assert _jmat_apply(jm, cdx) == cdy


def test_jmat_orthogonal_pairing(chart4):
    rng = random.Random(3)
    b = chart4.form({(0, 1): "x3"}).ext_d()
    J = SymplecticGCS(chart4, chart4.form({(0, 2): 1}), flat_omega(chart4))
    jm = J.j_matrix()
    _check_j_squared(chart4, J.j_matrix())
    for _ in range(6):
        from test_genalg import random_genvec
        a = random_genvec(rng, chart4, trig=False)
        bb = random_genvec(rng, chart4, trig=False)
        assert pair_tt(_jmat_apply(jm, a), _jmat_apply(jm, bb)) == pair_tt(a, bb)


def test_annihilator_kills_spinor(chart4):
    structs = [
        SymplecticGCS(chart4, chart4.form({(0, 2): "x2"}), flat_omega(chart4)),
        flat_volume_struct(chart4),
    ]
    for J in structs:
        phi = spinor_of(J)
        for e in J.annihilator():
            assert clifford_act(e, phi).is_zero()


def test_jmat_eigen_annihilator(chart4):
    """J e = -i e for annihilator elements."""
    J = flat_volume_struct(chart4)
    jm = J.j_matrix()
    for e in J.annihilator():
        got = _jmat_apply(jm, e)
        assert got == e.scale(QQi(0, -1))


def test_beta_deform_spinor(chart4):
    base = flat_volume_struct(chart4)
    d1 = GenVec.basis(chart4, 0)
    d3 = GenVec.basis(chart4, 2)
    beta = genvec_wedge(d1, d3)
    J = BetaDeformGCS(chart4, beta, base)
    phi = spinor_of(J)
    assert phi.degree_part(2) == spinor_of(base)
    assert not phi.degree_part(0).is_zero()
    for e in J.annihilator():
        assert clifford_act(e, phi).is_zero()
    _check_j_squared(chart4, J.j_matrix())


def test_beta_zero_is_base(chart4):
    base = flat_volume_struct(chart4)
    from gkcurv.genalg import PolyVec
    J = BetaDeformGCS(chart4, PolyVec(chart4, 2), base)
    assert J.j_matrix() == base.j_matrix()


def test_purity_nondeg(chart2):
    J = SymplecticGCS(chart2, chart2.zero_form(), flat_omega(chart2))
    rep = purity_nondeg(spinor_of(J), Point([0, 0]))
    assert rep["pure"] and rep["nondegenerate"]
    dx1 = chart2.dx(0)
    rep2 = purity_nondeg(dx1, Point([0, 0]))
    assert rep2["pure"] and not rep2["nondegenerate"]


def test_not_pure(chart4):
    bad = chart4.form({(0, 1): 1, (2, 3): 1})  # no degree-0 part, not decomposable
    rep = purity_nondeg(bad, Point([0, 0, 0, 0]))
    assert not rep["pure"]


def test_generic_frame_matches(chart4):
    """Generic constructor recovers the annihilator of an exponential spinor."""
    z = chart4.form({(0, 1): 1, (2, 3): 1}).scale(QQi(0, 1)) + \
        chart4.form({(0, 2): "x4"})
    J = GenericGCS(chart4, z.exp())
    phi = spinor_of(J)
    frame = J.annihilator()
    assert len(frame) == 4
    for e in frame:
        assert clifford_act(e, phi).is_zero()


def test_type_numbers(chart4):
    Jw = SymplecticGCS(chart4, chart4.zero_form(), flat_omega(chart4))
    assert type_number(Jw, Point([1, 2, 3, 4])) == 0
    Jv = flat_volume_struct(chart4)
    assert type_number(Jv, Point([1, 2, 3, 4])) == 2
    # z1 z2 d1 ^ d2 deformation of C^2: jumping type
    d_z1 = GenVec(chart4, [Fraction(1, 2), QQi(0, Fraction(-1, 2)), 0, 0],
                  [0, 0, 0, 0])
    d_z2 = GenVec(chart4, [0, 0, Fraction(1, 2), QQi(0, Fraction(-1, 2))],
                  [0, 0, 0, 0])
    z1z2 = chart4.sc("(x1+i*x2)*(x3+i*x4)")
    beta_h = genvec_wedge(d_z1.scale(z1z2), d_z2)
    beta_r = beta_h + beta_h.conj()
    J = BetaDeformGCS(chart4, beta_r, Jv)
    assert type_number(J, Point([1, 0, 1, 0])) == 0
    assert type_number(J, Point([0, 0, 1, 0])) == 2


def test_eta_n_closed_spinor(chart4):
    J = flat_volume_struct(chart4)
    res = eta_N_extract(J)
    assert res.eta.is_zero()
    assert res.n3.is_zero()
    assert integrability(J)


def test_eta_n_symplectic_closed(chart4):
    J = SymplecticGCS(chart4, chart4.zero_form(), flat_omega(chart4))
    res = eta_N_extract(J)
    assert res.eta.is_zero() and res.n3.is_zero()


def test_eta_n_nonintegrable(chart4):
    """Non-closed exponential: d(phi) has a Lambda^3 part, N != 0."""
    z = flat_omega(chart4).scale(QQi(0, 1)) + chart4.form({(0, 1): "x3"})
    J = GenericGCS(chart4, z.exp())
    res = eta_N_extract(J)
    phi = spinor_of(J)
    check = clifford_act(res.eta, phi) + res.n3.spin_act(phi)
    assert (check - phi.ext_d()).is_zero()
    assert res.eta.is_real()
    assert not res.n3.is_zero()
    assert not integrability(J)


def test_eta_n_beta_weights(chart4):
    """Rotation-action deformation of flat C^2: eta from the weight formula."""
    Jv = flat_volume_struct(chart4)
    # rotation fields V_k = -y_k d/dx_k + x_k d/dy_k, weights 1
    v1 = GenVec.vector(chart4, ["-x2", "x1", 0, 0])
    v2 = GenVec.vector(chart4, [0, 0, "-x4", "x3"])
    lam = Fraction(1, 1)
    beta = genvec_wedge(v1, v2).scale(lam)
    J = BetaDeformGCS(chart4, beta, Jv)
    res = eta_N_extract(J)
    assert res.n3.is_zero()
    # engine value cross-checked against J(V) fields: eta = n2 J V1 - n1 J V2
    jm = Jv.j_matrix()
    jv1 = _jmat_apply(jm, v1)
    jv2 = _jmat_apply(jm, v2)
    assert res.eta == (jv1 - jv2).scale(lam) or res.eta == (jv2 - jv1).scale(lam)
