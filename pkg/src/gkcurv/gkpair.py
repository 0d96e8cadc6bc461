"""Almost generalized Kahler pairs and their simultaneous eigenspace frames.

A pair couples an arbitrary almost structure J1 with the symplectic-type
structure of a d-closed spinor exp(b + i omega).  The module provides the
commutation/positivity report, the C+/C- simultaneous frames with
G-normalised dual frames, type-(0,0) diagnostics, generalized Hamiltonian
elements, the mixed second algebroid differential on functions, and the
pointwise trace pairing used by the deformation symplectic form.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .errors import (ChartMismatch, DegenerateOmega, DimensionMismatch,
                     NotClosed, WrongBidegree)
from .forms import Chart, Form
from .genalg import (GenVec, PolyVec, clifford_act, dorfman, genvec_wedge,
                     interior, pair_tt)
from .linalg import (kernel_basis, mat_commutator, mat_identity, mat_inverse,
                     mat_is_zero, mat_mul, mat_sub, mat_trace, mat_vec)
from .scalars import QQi, Point, ScalarExpr
from .spinor import (GCStruct, SymplecticGCS, _hat_matrix,
                     symplectic_block_matrix)


class GKPair:
    """Candidate almost generalized Kahler pair (J1, J_psi).

    The pairing side carries the quoted block matrix (+i on ker psi, i.e.
    the structure trivialised by conj(psi)); with the annihilator-convention
    J1 this is the sign arrangement that makes -J1 J2 positive on Kahler
    pairs.
    """

    def __init__(self, j1: GCStruct, b: Form, omega: Form, check_closed=True):
        self.chart = j1.chart
        if b.chart != self.chart or omega.chart != self.chart:
            raise ChartMismatch("spinor data on a different chart")
        if check_closed and not (b.ext_d().is_zero() and omega.ext_d().is_zero()):
            raise NotClosed("the symplectic-type spinor must be d-closed")
        self.j1 = j1
        self.b = b
        self.omega = omega
        self.jpsi = SymplecticGCS(self.chart, b, omega)
        self._jpsi_mat = None
        self._ghat = None
        self._frame = None

    def psi(self) -> Form:
        return self.jpsi.spinor()

    def psibar(self) -> Form:
        return self.psi().conj()

    def jpsi_matrix(self):
        if self._jpsi_mat is None:
            self._jpsi_mat = symplectic_block_matrix(self.chart, self.b,
                                                     self.omega)
        return self._jpsi_mat

    def ghat(self):
        if self._ghat is None:
            prod = mat_mul(self.j1.j_matrix(), self.jpsi_matrix())
            self._ghat = [[-x for x in row] for row in prod]
        return self._ghat

    def metric_gram(self):
        """Matrix of G(a, b) = <Ghat a, b> over the coordinate basis."""
        chart = self.chart
        gh = self.ghat()
        dim4 = 2 * chart.dim
        cols = [GenVec.from_column(chart, [gh[r][c] for r in range(dim4)])
                for c in range(dim4)]
        return [[pair_tt(cols[a], GenVec.basis(chart, bb))
                 for bb in range(dim4)] for a in range(dim4)]

    def epm_frame(self) -> "EpmFrame":
        if self._frame is None:
            self._frame = epm_split(self)
        return self._frame


def compatibility_check(pair: GKPair, points) -> dict:
    """Exact commutator test plus exact positivity minors at rational points."""
    j1 = pair.j1.j_matrix()
    j2 = pair.jpsi_matrix()
    commute = mat_is_zero(mat_commutator(j1, j2))
    gram = pair.metric_gram()
    positive = True
    min_eig = None
    for p in points:
        vals = [[_real_fraction(x.eval(p, float_fallback=False)) for x in row]
                for row in gram]
        if not _sylvester_positive(vals):
            positive = False
        eig = _jacobi_min_eigenvalue([[float(v) for v in row] for row in vals])
        min_eig = eig if min_eig is None else min(min_eig, eig)
    return {"commute": commute, "positive": positive, "min_eigenvalue": min_eig}


def _real_fraction(q: QQi) -> Fraction:
    if q.im != 0:
        raise ValueError("metric entry is not real")
    return q.re


def _sylvester_positive(m) -> bool:
    n = len(m)
    rows = [list(r) for r in m]
    for c in range(n):
        piv = rows[c][c]
        if piv <= 0:
            return False
        for r in range(c + 1, n):
            if rows[r][c]:
                f = rows[r][c] / piv
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return True


def _jacobi_min_eigenvalue(a, sweeps=12):
    n = len(a)
    a = [row[:] for row in a]
    for _ in range(sweeps):
        off = max((abs(a[i][j]), i, j) for i in range(n) for j in range(n) if i != j)
        if off[0] < 1e-13:
            break
        _, p, q = off
        import math
        theta = 0.5 * math.atan2(2 * a[p][q], a[q][q] - a[p][p])
        c, s = math.cos(theta), math.sin(theta)
        for k in range(n):
            apk, aqk = a[p][k], a[q][k]
            a[p][k] = c * apk - s * aqk
            a[q][k] = s * apk + c * aqk
        for k in range(n):
            akp, akq = a[k][p], a[k][q]
            a[k][p] = c * akp - s * akq
            a[k][q] = s * akp + c * akq
    return min(a[i][i] for i in range(n))


class EpmFrame:
    """Simultaneous eigenframes: E+ = E1 n E2, E- = E1 n conj(E2)."""

    __slots__ = ("chart", "eplus", "eminus", "dplus", "dminus")

    def __init__(self, chart, eplus, eminus, dplus, dminus):
        self.chart = chart
        self.eplus = eplus
        self.eminus = eminus
        self.dplus = dplus    # dual frames in conj(E+), conj(E-):
        self.dminus = dminus  # 2<d_i, e_j> = delta_ij within each block

    @property
    def es(self):
        return self.eplus + self.eminus

    @property
    def duals(self):
        return self.dplus + self.dminus

    def conj_frame(self):
        return [e.conj() for e in self.es]


def _intersect_eigen(chart, j1, j2, s1: QQi, s2: QQi):
    """Kernel of (J1 - s1) stacked with (J2 - s2)."""
    dim4 = 2 * chart.dim
    rows = []
    for block, s in ((j1, s1), (j2, s2)):
        for r in range(dim4):
            row = [block[r][c] - (chart.const(s) if r == c else chart.zero_s())
                   for c in range(dim4)]
            rows.append(row)
    return [GenVec.from_column(chart, k)
            for k in kernel_basis(rows, chart.one_s(), chart.zero_s())]


def epm_split(pair: GKPair) -> EpmFrame:
    """Symbolic simultaneous eigenframe; fails if dimensions are not (n, n)."""
    chart = pair.chart
    j1 = pair.j1.j_matrix()
    j2 = pair.jpsi_matrix()
    mi = QQi(0, -1)
    pi = QQi(0, 1)
    eplus = _intersect_eigen(chart, j1, j2, mi, mi)
    eminus = _intersect_eigen(chart, j1, j2, mi, pi)
    if len(eplus) != chart.n or len(eminus) != chart.n:
        raise DimensionMismatch(
            f"eigenspace dims ({len(eplus)}, {len(eminus)}), expected "
            f"({chart.n}, {chart.n})")
    dplus = _dual_frame(chart, eplus)
    dminus = _dual_frame(chart, eminus)
    return EpmFrame(chart, eplus, eminus, dplus, dminus)


def _dual_frame(chart, es):
    """Frame of conj(span) normalised so 2<d_i, e_j> = delta_ij."""
    ebars = [e.conj() for e in es]
    n = len(es)
    p = [[pair_tt(ebars[i], es[j]) * 2 for j in range(n)] for i in range(n)]
    pinv = mat_inverse(p, chart.one_s(), chart.zero_s())
    if pinv is None:
        raise DimensionMismatch("degenerate pairing between frame and conjugate")
    duals = []
    for i in range(n):
        d = GenVec.zero(chart)
        for k in range(n):
            d = d + ebars[k].scale(pinv[i][k])
        duals.append(d)
    return duals


# ---------------------------------------------------------------------------
# Type-(0,0) diagnostics
# ---------------------------------------------------------------------------


def type00_check(chart: Chart, B: Form, w1: Form, w2: Form, points=()) -> dict:
    """Pointwise/4d conditions for (exp(B+i w1), exp(i w2)) to be a GK pair."""
    report = {}
    if chart.dim == 4:
        vol = chart.volume()
        conds = {
            "B^w1=0": B.wedge(w1).is_zero(),
            "B^w2=0": B.wedge(w2).is_zero(),
            "w1^w2=0": w1.wedge(w2).is_zero(),
            "B^B=w1^2+w2^2": B.wedge(B) == w1.wedge(w1) + w2.wedge(w2),
            "B^B!=0": not B.wedge(B).is_zero(),
        }
        report["four_dim_conditions"] = conds
        report["pass"] = all(conds.values())
    kernel_ok = True
    tame_ok = True
    for p in points:
        for sign in (1, -1):
            wc = B + (w1 + w2.scale(-sign)).scale(QQi(0, 1))
            mat = _eval_two_form_matrix(chart, wc, p)
            ker = kernel_basis(mat, QQi(1), QQi(0))
            if len(ker) != chart.n:
                kernel_ok = False
                continue
            if not _tame_at(chart, w2, ker, p):
                tame_ok = False
    if points:
        report["kernel_dims_ok"] = kernel_ok
        report["tame"] = tame_ok
        report["pass"] = report.get("pass", True) and kernel_ok and tame_ok
    return report


def _eval_two_form_matrix(chart, w: Form, p: Point):
    dim = chart.dim
    m = [[QQi(0) for _ in range(dim)] for _ in range(dim)]
    for (i, j), c in w.terms.items():
        v = c.eval(p, float_fallback=False)
        m[i][j] = m[i][j] + v
        m[j][i] = m[j][i] - v
    return m


def _tame_at(chart, w2, ker, p):
    """w2(x, I x) > 0 for sample real directions x = u + conj(u), I x = i u - i conj(u)."""
    dim = chart.dim
    w = _eval_two_form_matrix(chart, w2, p)
    for u in ker:  # u spans T^{0,1}; I u = -i u
        x = [u[k] + u[k].conj() for k in range(dim)]
        ix = [QQi(0, -1) * u[k] + (QQi(0, -1) * u[k]).conj() for k in range(dim)]
        val = QQi(0)
        for a in range(dim):
            for bb in range(dim):
                val = val + x[a] * ix[bb] * w[a][bb]
        if not val.is_zero():
            if val.im != 0 or val.re <= 0:
                return False
    return True


# ---------------------------------------------------------------------------
# Generalized Hamiltonian elements
# ---------------------------------------------------------------------------


def hamiltonian_element(pair: GKPair, f: ScalarExpr) -> GenVec:
    """e = v - i_v b with i_v omega = df; satisfies e.psi = i df.psi exactly."""
    chart = pair.chart
    df = [f.partial(k) for k in range(chart.dim)]
    W = _hat_matrix(chart, pair.omega)
    winv = mat_inverse(W, chart.one_s(), chart.zero_s())
    if winv is None:
        raise DegenerateOmega("omega is not symplectic")
    v = mat_vec(winv, df)
    ivb = interior(chart, v, pair.b)
    e = GenVec(chart, v, [-ivb.coefficient((k,)) for k in range(chart.dim)])
    psi = pair.psi()
    df_form = Form(chart, {(k,): c for k, c in enumerate(df) if not c.is_zero()})
    check = clifford_act(e, psi) - df_form.wedge(psi).scale(QQi(0, 1))
    if not check.is_zero():
        raise DegenerateOmega("hamiltonian element failed its defining identity")
    return e


# ---------------------------------------------------------------------------
# Algebroid differential and the mixed second derivative
# ---------------------------------------------------------------------------


def _anchor_derivative(chart, e: GenVec, f: ScalarExpr) -> ScalarExpr:
    s = chart.zero_s()
    for k in range(chart.dim):
        s = s + e.v[k] * f.partial(k)
    return s


def dbar_function(pair: GKPair, f: ScalarExpr):
    """Coefficients of dbar f = sum_j (pi(e_j) f) d_j over the dual frame."""
    fr = pair.epm_frame()
    return [_anchor_derivative(pair.chart, e, f) for e in fr.es]


def dbar_section(pair: GKPair, coeffs):
    """Algebroid differential of s = sum_j coeffs[j] d_j into Lambda^2."""
    fr = pair.epm_frame()
    chart = pair.chart
    es = fr.es
    duals = fr.duals
    m = len(es)

    def s_eval(x: GenVec) -> ScalarExpr:
        total = chart.zero_s()
        for k in range(m):
            total = total + coeffs[k] * (pair_tt(duals[k], x) * 2)
        return total

    out = {}
    for i, j in itertools.combinations(range(m), 2):
        w = _anchor_derivative(chart, es[i], s_eval(es[j])) \
            - _anchor_derivative(chart, es[j], s_eval(es[i])) \
            - s_eval(dorfman(es[i], es[j]))
        if not w.is_zero():
            out[(i, j)] = w
    return out


def ddbar_pm(pair: GKPair, f: ScalarExpr) -> dict:
    """Mixed second algebroid derivative of a function.

    Returns the Lambda^2 coefficients over the dual frame, the mixed-part
    PolyVec in coordinates, and the independently computed full differential
    of the (0,1) part of the Hamiltonian element for cross-checking.
    """
    chart = pair.chart
    fr = pair.epm_frame()
    n = chart.n
    u = dbar_function(pair, f)
    sminus = [chart.zero_s()] * n + u[n:]
    w = dbar_section(pair, sminus)
    mixed = {k: v for k, v in w.items() if k[0] < n <= k[1]}
    pure_minus = {k: v for k, v in w.items() if k[0] >= n}
    poly = PolyVec(chart, 2)
    for (i, j), c in mixed.items():
        poly = poly + genvec_wedge(fr.duals[i], fr.duals[j]).scale(c)
    e = hamiltonian_element(pair, f)
    e01 = [pair_tt(e, x) * 2 for x in fr.es]
    oracle = dbar_section(pair, e01)
    return {
        "mixed": mixed,
        "poly": poly,
        "pure_minus_residue": pure_minus,
        "oracle_full": oracle,
    }


# ---------------------------------------------------------------------------
# Deformation directions and the trace pairing
# ---------------------------------------------------------------------------


def frame_bivector(pair: GKPair, coeff_pairs) -> PolyVec:
    """Real h = sum c * x ^ y + conj over frame sections given as triples."""
    chart = pair.chart
    h = PolyVec(chart, 2)
    for c, x, y in coeff_pairs:
        h = h + genvec_wedge(x, y).scale(c)
    return h + h.conj()


def random_compat_bivector(pair: GKPair, rng, trig=False) -> PolyVec:
    """Random real direction in Lambda^2 E + Lambda^2 conj(E) of J1."""
    fr = pair.epm_frame()
    es = fr.es
    pieces = []
    for i, j in itertools.combinations(range(len(es)), 2):
        c = QQi(Fraction(rng.randint(-2, 2), rng.randint(1, 2)),
                Fraction(rng.randint(-2, 2), 2))
        if not c.is_zero():
            pieces.append((pair.chart.const(c), es[i], es[j]))
    return frame_bivector(pair, pieces)


def bidegree_split(pair: GKPair, h: PolyVec):
    """Coefficients of h over Lambda^2(E + conj E); raises on (1,1) residue."""
    chart = pair.chart
    fr = pair.epm_frame()
    frame = fr.es + fr.conj_frame()
    cols = [e.column() for e in frame]
    smat = [[cols[c][r] for c in range(len(cols))] for r in range(2 * chart.dim)]
    sinv = mat_inverse(smat, chart.one_s(), chart.zero_s())
    m = 2 * chart.dim
    hmat = [[chart.zero_s() for _ in range(m)] for _ in range(m)]
    for (a, b), c in h.coef.items():
        hmat[a][b] = c
        hmat[b][a] = -c
    tr = mat_mul(mat_mul(sinv, hmat), [list(r) for r in zip(*sinv)])
    half = len(frame) // 2
    out20, out02 = {}, {}
    for i in range(m):
        for j in range(i + 1, m):
            c = tr[i][j]
            if c.is_zero():
                continue
            if i < half and j < half:
                out20[(i, j)] = c
            elif i >= half and j >= half:
                out02[(i - half, j - half)] = c
            else:
                raise WrongBidegree("direction has a (1,1) component")
    return out20, out02


def jdot_matrix(pair: GKPair, h: PolyVec):
    """Infinitesimal deformation [h, J1] as a matrix field."""
    ad = h.ad_matrix()
    j = pair.j1.j_matrix()
    return mat_sub(mat_mul(ad, j), mat_mul(j, ad))


def trace_pairing(pair: GKPair, h1: PolyVec, h2: PolyVec,
                  check_bidegree=True) -> ScalarExpr:
    """tr(J [h1,J] [h2,J]) as an exact function on the chart."""
    if check_bidegree:
        bidegree_split(pair, h1)
        bidegree_split(pair, h2)
    j = pair.j1.j_matrix()
    return mat_trace(mat_mul(j, mat_mul(jdot_matrix(pair, h1),
                                        jdot_matrix(pair, h2))))
