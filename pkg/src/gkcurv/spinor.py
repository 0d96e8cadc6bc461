"""Almost generalized complex structures from pure-spinor data.

Each structure is built from one of four kinds of defining data (symplectic
exponential, complex volume form, bivector deformation, explicit polyform)
and exposes the induced spinor line, a closed-form annihilator frame, the
endomorphism matrix on T + T*, and the unique real (eta, N) splitting of
d(phi), whose Lambda^3 part is the integrability obstruction.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .errors import (DecompositionFailed, DegenerateOmega, ImpureSpinor,
                     ZeroSpinor)
from .forms import Chart, Form
from .genalg import (GenVec, PolyVec, clifford_act, genvec_wedge, interior)
from .linalg import (kernel_basis, mat_det, mat_identity, mat_inverse,
                     mat_mul, mat_vec, solve_exact)
from .scalars import QQI_ONE, QQI_ZERO, QQi, Point, ScalarExpr


class GCStruct:
    """Base: almost generalized complex structure on a chart."""

    def __init__(self, chart: Chart):
        self.chart = chart
        self._spinor = None
        self._frame = None
        self._jmat = None

    # subclasses fill these -------------------------------------------------

    def _build_spinor(self) -> Form:
        raise NotImplementedError

    def _build_frame(self):
        raise NotImplementedError

    def _build_jmat(self):
        return _jmat_from_frame(self.chart, self.annihilator())

    # cached API -------------------------------------------------------------

    def spinor(self) -> Form:
        if self._spinor is None:
            self._spinor = self._build_spinor()
        return self._spinor

    def annihilator(self):
        """Closed-form frame of the -i eigenbundle (annihilator of the spinor)."""
        if self._frame is None:
            self._frame = self._build_frame()
        return self._frame

    def conj_annihilator(self):
        return [e.conj() for e in self.annihilator()]

    def j_matrix(self):
        if self._jmat is None:
            self._jmat = self._build_jmat()
        return self._jmat


def spinor_of(J: GCStruct) -> Form:
    return J.spinor()


class SymplecticGCS(GCStruct):
    """phi = exp(b + i omega) for a real 2-form b and real symplectic omega.

    The endomorphism follows the annihilator convention shared by every
    constructor: J = -i exactly on ker(phi).  The quoted block matrix
    (0, -w^{-1}; w, 0) is its negative and belongs to the pairing side of a
    Kahler-type pair, where it is the structure induced by conj(phi); see
    GKPair.jpsi_matrix.
    """

    def __init__(self, chart, b: Form, omega: Form):
        super().__init__(chart)
        if not (b.is_real() and omega.is_real()):
            raise ValueError("symplectic data must be real 2-forms")
        self.b = b
        self.omega = omega
        self.z = b + omega.scale(QQi(0, 1))

    def _build_spinor(self):
        return self.z.exp()

    def _build_frame(self):
        return _exp_frame(self.chart, self.z)

    def _build_jmat(self):
        block = symplectic_block_matrix(self.chart, self.b, self.omega)
        return [[-x for x in row] for row in block]


def symplectic_block_matrix(chart: Chart, b: Form, omega: Form):
    """Ad_{e^b} (0, -w^{-1}; w, 0) Ad_{e^{-b}}: +i on ker exp(b + i omega)."""
    dim = chart.dim
    zero, one = chart.zero_s(), chart.one_s()
    W = _hat_matrix(chart, omega)
    Winv = mat_inverse(W, one, zero)
    if Winv is None:
        raise DegenerateOmega("omega is not symplectic")
    B = _hat_matrix(chart, b)
    j0 = [[zero] * (2 * dim) for _ in range(2 * dim)]
    for r in range(dim):
        for c in range(dim):
            j0[r][dim + c] = -Winv[r][c]
            j0[dim + r][c] = W[r][c]
    mb = mat_identity(2 * dim, one, zero)
    mbi = mat_identity(2 * dim, one, zero)
    for r in range(dim):
        for c in range(dim):
            mb[dim + r][c] = -B[r][c]
            mbi[dim + r][c] = B[r][c]
    return mat_mul(mat_mul(mb, j0), mbi)


class ComplexVolumeGCS(GCStruct):
    """phi = theta_1 ^ ... ^ theta_n for closed complex 1-forms theta_k."""

    def __init__(self, chart, one_forms):
        super().__init__(chart)
        self.one_forms = [f if isinstance(f, Form) else chart.form(f)
                          for f in one_forms]
        if len(self.one_forms) != chart.n:
            raise ValueError("need n one-forms")

    def _build_spinor(self):
        out = self.chart.func(1)
        for f in self.one_forms:
            out = out.wedge(f)
        if out.is_zero():
            raise ZeroSpinor("one-forms are linearly dependent")
        return out

    def _build_frame(self):
        chart = self.chart
        dim = chart.dim
        amat = [[f.coefficient((j,)) for j in range(dim)] for f in self.one_forms]
        kers = kernel_basis(amat, chart.one_s(), chart.zero_s())
        if len(kers) != dim - chart.n:
            raise ImpureSpinor("volume form is degenerate")
        frame = [GenVec.vector(chart, k) for k in kers]
        frame += [GenVec.covector(chart, [f.coefficient((j,)) for j in range(dim)])
                  for f in self.one_forms]
        return frame


class BetaDeformGCS(GCStruct):
    """Bivector deformation exp(beta) of a base structure."""

    def __init__(self, chart, beta: PolyVec, base: GCStruct):
        super().__init__(chart)
        if beta.grade != 2 or not beta.vector_only():
            raise ValueError("beta must be a bivector with vector components")
        self.beta = beta
        self.base = base

    def _build_spinor(self):
        from .genalg import exp_spin
        return exp_spin(self.beta, self.base.spinor())

    def _build_frame(self):
        return [e + self.beta.ad(e) for e in self.base.annihilator()]

    def _build_jmat(self):
        chart = self.chart
        dim4 = 2 * chart.dim
        ad = self.beta.ad_matrix()
        one, zero = chart.one_s(), chart.zero_s()
        m = mat_identity(dim4, one, zero)
        mi = mat_identity(dim4, one, zero)
        for r in range(dim4):
            for c in range(dim4):
                m[r][c] = m[r][c] + ad[r][c]
                mi[r][c] = mi[r][c] - ad[r][c]
        return mat_mul(mat_mul(m, self.base.j_matrix()), mi)


class GenericGCS(GCStruct):
    """Structure defined by an explicit pure-spinor polyform."""

    def __init__(self, chart, phi: Form):
        super().__init__(chart)
        self.phi = phi

    def _build_spinor(self):
        return self.phi

    def _build_frame(self):
        chart = self.chart
        cols = [clifford_act(GenVec.basis(chart, a), self.phi)
                for a in range(2 * chart.dim)]
        idxs = sorted({i for c in cols for i in c.terms},
                      key=lambda i: (len(i), i))
        mat = [[c.coefficient(i) for c in cols] for i in idxs]
        kers = kernel_basis(mat, chart.one_s(), chart.zero_s())
        if len(kers) != chart.dim:
            raise ImpureSpinor(
                f"annihilator has rank {len(kers)}, expected {chart.dim}")
        return [GenVec.from_column(chart, k) for k in kers]


class FrameGCS(GCStruct):
    """Structure given by explicit spinor, annihilator frame and matrix."""

    def __init__(self, chart, phi: Form, frame, jmat=None):
        super().__init__(chart)
        self.phi = phi
        self._frame = list(frame)
        self._jmat = jmat

    def _build_spinor(self):
        return self.phi

    def _build_frame(self):
        return self._frame


def _exp_frame(chart: Chart, z: Form):
    """Annihilator of exp(Z): sections v - i_v Z over the coordinate fields."""
    frame = []
    for k in range(chart.dim):
        comps = [chart.one_s() if j == k else chart.zero_s()
                 for j in range(chart.dim)]
        ivz = interior(chart, comps, z)
        frame.append(GenVec(chart, comps,
                            [-ivz.coefficient((j,)) for j in range(chart.dim)]))
    return frame


def _hat_matrix(chart: Chart, two_form: Form):
    """Matrix sending vector components to (i_v w) covector components."""
    dim = chart.dim
    m = [[chart.zero_s() for _ in range(dim)] for _ in range(dim)]
    for (i, j), c in two_form.terms.items():
        m[i][j] = m[i][j] + c
        m[j][i] = m[j][i] - c
    # (i_v w)_j = sum_i v_i w(d_i, d_j); matrix rows index i, so transpose
    return [[m[i][j] for i in range(dim)] for j in range(dim)]


def _jmat_from_frame(chart: Chart, frame):
    dim4 = 2 * chart.dim
    cols = [e.column() for e in frame] + [e.conj().column() for e in frame]
    smat = [[cols[c][r] for c in range(dim4)] for r in range(dim4)]
    sinv = mat_inverse(smat, chart.one_s(), chart.zero_s())
    if sinv is None:
        raise ImpureSpinor("frame and its conjugate do not span")
    mi = chart.const(QQi(0, -1))
    pi = chart.const(QQi(0, 1))
    d = [[(mi if r < dim4 // 2 else pi) if r == c else chart.zero_s()
          for c in range(dim4)] for r in range(dim4)]
    return mat_mul(mat_mul(smat, d), sinv)


# ---------------------------------------------------------------------------
# Pointwise purity / nondegeneracy / type
# ---------------------------------------------------------------------------


def _eval_form(phi: Form, p: Point):
    out = {}
    for idx, c in phi.terms.items():
        v = c.eval(p, float_fallback=False)
        if not v.is_zero():
            out[idx] = v
    return out


def _point_clifford(dim, a, terms):
    """Coordinate basis element acting on a QQi-coefficient form dict."""
    out = {}
    if a < dim:
        for idx, c in terms.items():
            if a in idx:
                pos = idx.index(a)
                rest = idx[:pos] + idx[pos + 1:]
                add = c if pos % 2 == 0 else -c
                s = out.get(rest, QQI_ZERO) + add
                if s.is_zero():
                    out.pop(rest, None)
                else:
                    out[rest] = s
    else:
        k = a - dim
        for idx, c in terms.items():
            if k in idx:
                continue
            pos = sum(1 for i in idx if i < k)
            new = tuple(sorted(idx + (k,)))
            add = c if pos % 2 == 0 else -c
            s = out.get(new, QQI_ZERO) + add
            if s.is_zero():
                out.pop(new, None)
            else:
                out[new] = s
    return out


def purity_nondeg(phi: Form, p: Point) -> dict:
    """Pointwise purity and nondegeneracy of a spinor by exact rank counts."""
    dim = phi.chart.dim
    terms = _eval_form(phi, p)
    if not terms:
        raise ZeroSpinor("spinor vanishes at the point")
    cols = [_point_clifford(dim, a, terms) for a in range(2 * dim)]
    idxs = sorted({i for c in cols for i in c}, key=lambda i: (len(i), i))
    mat = [[c.get(i, QQI_ZERO) for c in cols] for i in idxs]
    kers = kernel_basis(mat, QQI_ONE, QQI_ZERO)
    pure = len(kers) == dim
    nondeg = False
    if pure:
        both = [list(k) for k in kers] + [[c.conj() for c in k] for k in kers]
        gram = [[b[c] for b in both] for c in range(2 * dim)]
        nondeg = len(kernel_basis(gram, QQI_ONE, QQI_ZERO)) == 0
    return {
        "pure": pure,
        "nondegenerate": nondeg,
        "annihilator": [GenVec.from_column(phi.chart, [phi.chart.const(x) for x in k])
                        for k in kers],
    }


def type_number(J: GCStruct, p: Point) -> int:
    """Minimal degree with nonvanishing coefficient of the spinor at p."""
    terms = _eval_form(J.spinor(), p)
    if not terms:
        raise ZeroSpinor("spinor vanishes at the point")
    return min(len(i) for i in terms)


# ---------------------------------------------------------------------------
# The (eta, N) decomposition of d(phi)
# ---------------------------------------------------------------------------


class EtaN:
    """Result of the unique real splitting d(phi) = eta.phi + N.phi."""

    __slots__ = ("eta", "eta01", "n3", "n03", "coeffs")

    def __init__(self, eta, eta01, n3, n03, coeffs):
        self.eta = eta
        self.eta01 = eta01
        self.n3 = n3
        self.n03 = n03
        self.coeffs = coeffs


def eta_N_extract(J: GCStruct) -> EtaN:
    """Solve d(phi) = (sum c_i ebar_i + sum c_ijk ebar_i ebar_j ebar_k) . phi."""
    chart = J.chart
    phi = J.spinor()
    dphi = phi.ext_d()
    ebar = J.conj_annihilator()
    m = len(ebar)
    cols = []
    for i in range(m):
        cols.append(clifford_act(ebar[i], phi))
    triples = list(itertools.combinations(range(m), 3))
    for (i, j, k) in triples:
        cols.append(clifford_act(ebar[i], clifford_act(ebar[j],
                    clifford_act(ebar[k], phi))))
    idxs = sorted({i for c in cols for i in c.terms} | set(dphi.terms),
                  key=lambda i: (len(i), i))
    if not idxs:
        zero_eta = GenVec.zero(chart)
        return EtaN(zero_eta, zero_eta, PolyVec(chart, 3), PolyVec(chart, 3), [])
    mat = [[c.coefficient(i) for c in cols] for i in idxs]
    rhs = [dphi.coefficient(i) for i in idxs]
    sol = solve_exact(mat, rhs)
    if sol is None:
        raise DecompositionFailed("d(phi) is not of the expected shape")
    eta01 = GenVec.zero(chart)
    for i in range(m):
        eta01 = eta01 + ebar[i].scale(sol[i])
    eta = eta01 + eta01.conj()
    n03 = PolyVec(chart, 3)
    for t, (i, j, k) in enumerate(triples):
        c = sol[m + t]
        if not c.is_zero():
            n03 = n03 + genvec_wedge(ebar[i], ebar[j], ebar[k]).scale(c)
    n3 = n03 + n03.conj()
    check = clifford_act(eta, phi) + n3.spin_act(phi)
    if not (check - dphi).is_zero():
        raise DecompositionFailed("residual in the (eta, N) splitting")
    if not eta.is_real() or not n3.is_real():
        raise DecompositionFailed("splitting is not real")
    return EtaN(eta, eta01, n3, n03, sol)


def integrability(J: GCStruct) -> bool:
    """True iff the Lambda^3 obstruction vanishes identically."""
    return eta_N_extract(J).n3.is_zero()
