"""Algebra of the generalized tangent bundle T + T*.

Sections are pairs (vector, covector) over a chart; the split pairing is
<v+xi, u+eta> = (xi(u) + eta(v))/2 and sections act on forms through the
spin representation (interior product plus wedge).  Bi- and tri-vectors are
antisymmetric coefficient arrays over the 4n coordinate basis
(d/dx1..d/dx2n, dx1..dx2n); their spin action uses the canonical
antisymmetrized embedding into the Clifford algebra, so mixed-index arrays
are handled consistently.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .errors import ChartMismatch, NotBivector, NotClosed
from .forms import Chart, Form, _merge_sign
from .linalg import mat_vec
from .scalars import QQi, ScalarExpr


class GenVec:
    """Section of (T + T*) x C with exact component functions."""

    __slots__ = ("chart", "v", "xi")

    def __init__(self, chart: Chart, v, xi):
        self.chart = chart
        self.v = tuple(chart._as_scalar(c) for c in v)
        self.xi = tuple(chart._as_scalar(c) for c in xi)
        if len(self.v) != chart.dim or len(self.xi) != chart.dim:
            raise ValueError("component count must match chart dimension")

    @staticmethod
    def zero(chart):
        z = [0] * chart.dim
        return GenVec(chart, z, z)

    @staticmethod
    def basis(chart, a: int) -> "GenVec":
        """Coordinate basis: a < 2n gives d/dx_{a+1}, else dx_{a-2n+1}."""
        dim = chart.dim
        v = [0] * dim
        xi = [0] * dim
        if a < dim:
            v[a] = 1
        else:
            xi[a - dim] = 1
        return GenVec(chart, v, xi)

    @staticmethod
    def vector(chart, comps) -> "GenVec":
        return GenVec(chart, comps, [0] * chart.dim)

    @staticmethod
    def covector(chart, comps) -> "GenVec":
        return GenVec(chart, [0] * chart.dim, comps)

    @staticmethod
    def from_column(chart, col) -> "GenVec":
        dim = chart.dim
        return GenVec(chart, col[:dim], col[dim:])

    def column(self):
        return list(self.v) + list(self.xi)

    def __add__(self, other):
        self._check(other)
        return GenVec(self.chart, [a + b for a, b in zip(self.v, other.v)],
                      [a + b for a, b in zip(self.xi, other.xi)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return GenVec(self.chart, [-a for a in self.v], [-a for a in self.xi])

    def scale(self, c) -> "GenVec":
        c = self.chart._as_scalar(c)
        return GenVec(self.chart, [a * c for a in self.v], [a * c for a in self.xi])

    def conj(self):
        return GenVec(self.chart, [a.conj() for a in self.v],
                      [a.conj() for a in self.xi])

    def is_real(self):
        return all(a.is_real() for a in self.v) and all(a.is_real() for a in self.xi)

    def is_zero(self):
        return all(a.is_zero() for a in self.v) and all(a.is_zero() for a in self.xi)

    def covector_form(self) -> Form:
        return Form(self.chart, {(k,): c for k, c in enumerate(self.xi)
                                 if not c.is_zero()})

    def _check(self, other):
        if self.chart != other.chart:
            raise ChartMismatch("sections on different charts")

    def __eq__(self, other):
        if not isinstance(other, GenVec):
            return NotImplemented
        return self.chart == other.chart and self.v == other.v and self.xi == other.xi

    def __repr__(self):
        names = self.chart.coords
        parts = []
        for k, c in enumerate(self.v):
            if not c.is_zero():
                parts.append(f"({c.to_string(names)})*d/d{names[k]}")
        for k, c in enumerate(self.xi):
            if not c.is_zero():
                parts.append(f"({c.to_string(names)})*d{names[k]}")
        return "<GenVec " + (" + ".join(parts) if parts else "0") + ">"


def pair_tt(e1: GenVec, e2: GenVec) -> ScalarExpr:
    """Split-signature pairing: (xi1(v2) + xi2(v1)) / 2."""
    e1._check(e2)
    chart = e1.chart
    s = chart.zero_s()
    for a, b in zip(e1.xi, e2.v):
        s = s + a * b
    for a, b in zip(e2.xi, e1.v):
        s = s + a * b
    return s * chart.const(Fraction(1, 2))


def interior(chart: Chart, v_comps, form: Form) -> Form:
    """Interior product with the vector field given by components."""
    acc = {}
    for idx, c in form.terms.items():
        for pos, k in enumerate(idx):
            vk = v_comps[k]
            if vk.is_zero():
                continue
            rest = idx[:pos] + idx[pos + 1:]
            add = vk * c if pos % 2 == 0 else -(vk * c)
            s = acc.get(rest)
            s = add if s is None else s + add
            if s.is_zero():
                acc.pop(rest, None)
            else:
                acc[rest] = s
    return Form(chart, acc)


def clifford_act(e: GenVec, form: Form) -> Form:
    """(v + xi) . a = i_v a + xi ^ a."""
    if e.chart != form.chart:
        raise ChartMismatch("section and form on different charts")
    return interior(e.chart, e.v, form) + e.covector_form().wedge(form)


# ---------------------------------------------------------------------------
# Bi- and tri-vectors over the 4n coordinate basis
# ---------------------------------------------------------------------------


def _basis_pair(chart, a, b) -> ScalarExpr:
    dim = chart.dim
    if a < dim <= b and b - dim == a:
        return chart.const(Fraction(1, 2))
    if b < dim <= a and a - dim == b:
        return chart.const(Fraction(1, 2))
    return chart.zero_s()


def _basis_act(chart, a, form: Form) -> Form:
    dim = chart.dim
    if a < dim:
        comps = [chart.one_s() if k == a else chart.zero_s() for k in range(dim)]
        return interior(chart, comps, form)
    return Form(chart, {(a - dim,): chart.one_s()}).wedge(form)


class PolyVec:
    """Antisymmetric grade-k array over the 4n basis; k = 2 or 3."""

    __slots__ = ("chart", "grade", "coef")

    def __init__(self, chart: Chart, grade: int, coef: dict | None = None):
        self.chart = chart
        self.grade = grade
        self.coef = {}
        if coef:
            for idx, c in coef.items():
                self._accum(tuple(idx), chart._as_scalar(c))

    def _accum(self, idx, c):
        if c.is_zero():
            return
        order = tuple(sorted(idx))
        if len(set(idx)) != len(idx):
            return
        sign = _perm_sign(idx)
        c = c if sign > 0 else -c
        s = self.coef.get(order)
        s = c if s is None else s + c
        if s.is_zero():
            self.coef.pop(order, None)
        else:
            self.coef[order] = s

    def __add__(self, other):
        out = PolyVec(self.chart, self.grade, dict(self.coef))
        for idx, c in other.coef.items():
            out._accum(idx, c)
        return out

    def __neg__(self):
        return PolyVec(self.chart, self.grade, {i: -c for i, c in self.coef.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.chart._as_scalar(c)
        return PolyVec(self.chart, self.grade,
                       {i: v * c for i, v in self.coef.items()})

    def conj(self):
        return PolyVec(self.chart, self.grade,
                       {i: c.conj() for i, c in self.coef.items()})

    def is_real(self):
        return all(c.is_real() for c in self.coef.values())

    def is_zero(self):
        return not self.coef

    def vector_only(self):
        dim = self.chart.dim
        return all(all(a < dim for a in idx) for idx in self.coef)

    def spin_act(self, form: Form) -> Form:
        """Canonical antisymmetrized Clifford action on a form."""
        chart = self.chart
        out = chart.zero_form()
        if self.grade == 2:
            # E_a ^ E_b acts as E_a E_b - <E_a, E_b>
            for (a, b), c in self.coef.items():
                piece = _basis_act(chart, a, _basis_act(chart, b, form))
                p = _basis_pair(chart, a, b)
                if not p.is_zero():
                    piece = piece - form.scale(p)
                out = out + piece.scale(c)
            return out
        for idx, c in self.coef.items():
            acc = chart.zero_form()
            for perm in itertools.permutations(idx):
                piece = form
                for a in reversed(perm):
                    piece = _basis_act(chart, a, piece)
                acc = acc + (piece if _perm_sign(perm) > 0 else -piece)
            out = out + acc.scale(c * Fraction(1, _factorial(self.grade)))
        return out

    def ad(self, e: GenVec) -> GenVec:
        """Adjoint action [self, e] for grade 2 (so(T+T*) element)."""
        if self.grade != 2:
            raise ValueError("adjoint action implemented for bivectors only")
        chart = self.chart
        out = GenVec.zero(chart)
        for (a, b), c in self.coef.items():
            pb = pair_tt(GenVec.basis(chart, b), e)
            pa = pair_tt(GenVec.basis(chart, a), e)
            term = GenVec.basis(chart, a).scale(pb * c * 2) - \
                GenVec.basis(chart, b).scale(pa * c * 2)
            out = out + term
        return out

    def ad_matrix(self):
        """4n x 4n matrix of the adjoint action on coordinate columns.

        <E_b, E_c> = 1/2 exactly when c is the index pair partner of b, so
        each coefficient lands in two entries.
        """
        chart = self.chart
        dim = chart.dim
        dim4 = 2 * dim
        zero = chart.zero_s()
        m = [[zero for _ in range(dim4)] for _ in range(dim4)]

        def partner(x):
            return x + dim if x < dim else x - dim

        for (a, b), c in self.coef.items():
            col = partner(b)
            m[a][col] = m[a][col] + c
            col = partner(a)
            m[b][col] = m[b][col] - c
        return m

    def __eq__(self, other):
        if not isinstance(other, PolyVec):
            return NotImplemented
        return (self.chart == other.chart and self.grade == other.grade
                and self.coef == other.coef)

    def __repr__(self):
        return f"<PolyVec grade {self.grade}, {len(self.coef)} terms>"


def _perm_sign(idx):
    sign = 1
    idx = list(idx)
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign


def _factorial(k):
    out = 1
    for j in range(2, k + 1):
        out *= j
    return out


def genvec_wedge(*vecs) -> PolyVec:
    """Wedge of 2 or 3 sections into a coordinate PolyVec."""
    chart = vecs[0].chart
    k = len(vecs)
    cols = [e.column() for e in vecs]
    out = PolyVec(chart, k)
    for idx in itertools.combinations(range(2 * chart.dim), k):
        c = _minor_det([[cols[r][a] for a in idx] for r in range(k)], chart)
        out._accum(idx, c)
    return out


def _minor_det(rows, chart):
    k = len(rows)
    if k == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    s = chart.zero_s()
    for perm in itertools.permutations(range(k)):
        term = rows[0][perm[0]]
        for r in range(1, k):
            term = term * rows[r][perm[r]]
        s = s + (term if _perm_sign(perm) > 0 else -term)
    return s


# ---------------------------------------------------------------------------
# Brackets and derivatives
# ---------------------------------------------------------------------------


def vector_bracket(chart: Chart, u, v):
    """Lie bracket of vector fields given as component tuples."""
    dim = chart.dim
    out = []
    for k in range(dim):
        s = chart.zero_s()
        for j in range(dim):
            s = s + u[j] * v[k].partial(j) - v[j] * u[k].partial(j)
        out.append(s)
    return out


def lie_vector_form(chart: Chart, u, form: Form) -> Form:
    """Classical Lie derivative along a vector field (Cartan formula)."""
    return interior(chart, u, form.ext_d()) + interior(chart, u, form).ext_d()


def courant(e1: GenVec, e2: GenVec) -> GenVec:
    """Courant bracket [u+xi, v+eta] = [u,v] + L_u eta - L_v xi - d(i_u eta - i_v xi)/2."""
    e1._check(e2)
    chart = e1.chart
    v = vector_bracket(chart, e1.v, e2.v)
    eta, xi = e2.covector_form(), e1.covector_form()
    cov = lie_vector_form(chart, e1.v, eta) - lie_vector_form(chart, e2.v, xi)
    iu_eta = interior(chart, e1.v, eta)
    iv_xi = interior(chart, e2.v, xi)
    cov = cov - (iu_eta - iv_xi).ext_d().scale(Fraction(1, 2))
    return GenVec(chart, v, [cov.coefficient((k,)) for k in range(chart.dim)])


def dorfman(e1: GenVec, e2: GenVec) -> GenVec:
    """Dorfman bracket: Courant plus d<e1, e2>."""
    out = courant(e1, e2)
    dpair = chart_func_d(e1.chart, pair_tt(e1, e2))
    return GenVec(out.chart, out.v, [a + b for a, b in zip(out.xi, dpair)])


def chart_func_d(chart: Chart, f: ScalarExpr):
    return [f.partial(k) for k in range(chart.dim)]


def lie_form(e: GenVec, form: Form) -> Form:
    """Spinor Lie derivative d(e.a) + e.(da)."""
    return clifford_act(e, form).ext_d() + clifford_act(e, form.ext_d())


# ---------------------------------------------------------------------------
# b-field and beta-field actions
# ---------------------------------------------------------------------------


def ad_b(b: Form, x, check_closed=True):
    """Closed-2-form action: sections get v - i_v b, forms get e^b ^ x."""
    if check_closed and not b.ext_d().is_zero():
        raise NotClosed("b-field must be d-closed")
    if isinstance(x, GenVec):
        ivb = interior(x.chart, x.v, b)
        return GenVec(x.chart, x.v,
                      [xi - ivb.coefficient((k,)) for k, xi in enumerate(x.xi)])
    if isinstance(x, Form):
        return b.exp().wedge(x)
    raise TypeError("ad_b acts on sections and forms")


def ad_beta(beta: PolyVec, x):
    """Bivector (vectors-only) action by the spin group element exp(beta)."""
    if beta.grade != 2 or not beta.vector_only():
        raise NotBivector("beta must be a bivector with vector components only")
    if isinstance(x, GenVec):
        return x + beta.ad(x)
    if isinstance(x, Form):
        return exp_spin(beta, x)
    raise TypeError("ad_beta acts on sections and forms")


def exp_spin(h: PolyVec, form: Form, max_steps=64) -> Form:
    """exp(h) . form as a terminating Clifford series; raises if divergent."""
    out = form
    term = form
    k = 1
    while True:
        term = h.spin_act(term).scale(Fraction(1, k))
        if term.is_zero():
            return out
        out = out + term
        k += 1
        if k > max_steps:
            raise ValueError("spin exponential did not terminate")


# ---------------------------------------------------------------------------
# Lie derivative of an endomorphism field along a section
# ---------------------------------------------------------------------------


def gen_lie_J(e: GenVec, jmat) -> list:
    """Matrix field of L_e J, via Dorfman brackets on the coordinate basis."""
    chart = e.chart
    dim4 = 2 * chart.dim
    cols = []
    for c in range(dim4):
        basis = GenVec.basis(chart, c)
        j_basis = GenVec.from_column(chart, mat_vec(jmat, basis.column()))
        col = dorfman(e, j_basis) - GenVec.from_column(
            chart, mat_vec(jmat, dorfman(e, basis).column()))
        cols.append(col.column())
    return [[cols[c][r] for c in range(dim4)] for r in range(dim4)]
