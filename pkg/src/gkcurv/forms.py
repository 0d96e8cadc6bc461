"""Graded exterior algebra of complex differential forms on a chart.

Forms are sparse maps from strictly increasing coordinate multi-indices to
exact scalars; mixed-degree polyforms are first class because spinors
exp(b + i*omega) are.  The chart fixes the coordinate volume form
dx1^...^dx2n used as reference for top-form ratios.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ChartMismatch, FieldClosureError, SingularMap
from .scalars import (QQi, ScalarExpr, TrigPoly, parse_scalar)


@dataclass(frozen=True)
class Chart:
    """Coordinate chart of real dimension 2n."""

    n: int
    coords: tuple
    periodic: tuple

    def __post_init__(self):
        if len(self.coords) != 2 * self.n or len(self.periodic) != 2 * self.n:
            raise ValueError("chart needs 2n coordinate names and periodic flags")

    @property
    def dim(self):
        return 2 * self.n

    # scalar helpers ---------------------------------------------------------

    def sc(self, text: str) -> ScalarExpr:
        return parse_scalar(text, self.coords)

    def const(self, c) -> ScalarExpr:
        return ScalarExpr.from_qqi(self.dim, c)

    def zero_s(self) -> ScalarExpr:
        return ScalarExpr.zero(self.dim)

    def one_s(self) -> ScalarExpr:
        return ScalarExpr.one(self.dim)

    def i_s(self) -> ScalarExpr:
        return ScalarExpr.i(self.dim)

    def coord_s(self, k) -> ScalarExpr:
        return ScalarExpr.coord(self.dim, k)

    # form helpers -----------------------------------------------------------

    def zero_form(self) -> "Form":
        return Form(self, {})

    def func(self, f) -> "Form":
        f = self._as_scalar(f)
        return Form(self, {(): f} if not f.is_zero() else {})

    def dx(self, k) -> "Form":
        return Form(self, {(k,): self.one_s()})

    def form(self, terms) -> "Form":
        """Build from {multi-index tuple: scalar-or-text} entries."""
        out = {}
        for idx, c in terms.items():
            c = self._as_scalar(c)
            if c.is_zero():
                continue
            idx, sign = _sort_index(tuple(idx))
            if idx is None:
                continue
            c = c if sign > 0 else -c
            prev = out.get(idx)
            c = c if prev is None else prev + c
            if c.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = c
        return Form(self, out)

    def two_form(self, entries) -> "Form":
        """Build a 2-form from [(i, j, coeff), ...] with 0-based indices."""
        return self.form({(i, j): c for i, j, c in entries})

    def volume(self) -> "Form":
        return Form(self, {tuple(range(self.dim)): self.one_s()})

    def _as_scalar(self, c) -> ScalarExpr:
        if isinstance(c, ScalarExpr):
            if c.nvars != self.dim:
                raise ChartMismatch("scalar built on a different chart")
            return c
        if isinstance(c, str):
            return self.sc(c)
        if isinstance(c, (int, Fraction, QQi)):
            return self.const(c)
        raise TypeError(f"cannot coerce {type(c).__name__} to scalar")


def _sort_index(idx):
    """Sort a multi-index, returning (sorted tuple, sign) or (None, 0)."""
    if len(set(idx)) != len(idx):
        return None, 0
    perm = sorted(range(len(idx)), key=lambda t: idx[t])
    sign = 1
    seen = [False] * len(idx)
    for s in range(len(idx)):
        if seen[s]:
            continue
        cycle = 0
        t = s
        while not seen[t]:
            seen[t] = True
            t = perm[t]
            cycle += 1
        if cycle % 2 == 0:
            sign = -sign
    return tuple(sorted(idx)), sign


def _merge_sign(a, b):
    """Merge disjoint increasing tuples; returns (merged, sign)."""
    inv = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        inv += j
    merged = tuple(sorted(a + b))
    return merged, (-1) ** (inv % 2)


class Form:
    """Sparse mixed-degree complex differential form."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: dict):
        self.chart = chart
        self.terms = terms

    # -- structure -----------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def degrees(self):
        return sorted({len(i) for i in self.terms})

    def degree_part(self, k: int) -> "Form":
        return Form(self.chart, {i: c for i, c in self.terms.items() if len(i) == k})

    def is_homogeneous(self):
        return len(self.degrees()) <= 1

    def coefficient(self, idx) -> ScalarExpr:
        idx, sign = _sort_index(tuple(idx))
        if idx is None:
            return self.chart.zero_s()
        c = self.terms.get(idx)
        if c is None:
            return self.chart.zero_s()
        return c if sign > 0 else -c

    def _check(self, other):
        if self.chart is not other.chart and self.chart != other.chart:
            raise ChartMismatch("forms on different charts")

    # -- linear operations ---------------------------------------------------

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for i, c in other.terms.items():
            s = out.get(i)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(i, None)
            else:
                out[i] = s
        return Form(self.chart, out)

    def __neg__(self):
        return Form(self.chart, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Form":
        c = self.chart._as_scalar(c)
        if c.is_zero():
            return self.chart.zero_form()
        return Form(self.chart, {i: v * c for i, v in self.terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def conj(self) -> "Form":
        return Form(self.chart, {i: c.conj() for i, c in self.terms.items()})

    def is_real(self):
        return self.conj() == self

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        self._check(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- graded operations ---------------------------------------------------

    def wedge(self, other: "Form") -> "Form":
        self._check(other)
        out = {}
        for i1, c1 in self.terms.items():
            for i2, c2 in other.terms.items():
                if set(i1) & set(i2):
                    continue
                idx, sign = _merge_sign(i1, i2)
                c = c1 * c2
                if sign < 0:
                    c = -c
                s = out.get(idx)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(idx, None)
                else:
                    out[idx] = s
        return Form(self.chart, out)

    def __xor__(self, other):
        return self.wedge(other)

    def ext_d(self) -> "Form":
        out = Form(self.chart, {})
        acc = {}
        dim = self.chart.dim
        for idx, c in self.terms.items():
            used = set(idx)
            for k in range(dim):
                if k in used:
                    continue
                dc = c.partial(k)
                if dc.is_zero():
                    continue
                new, sign = _merge_sign((k,), idx)
                add = dc if sign > 0 else -dc
                s = acc.get(new)
                s = add if s is None else s + add
                if s.is_zero():
                    acc.pop(new, None)
                else:
                    acc[new] = s
        out.terms = acc
        return out

    def sigma(self) -> "Form":
        """Clifford involution: sign + on degrees 0,1 mod 4, - on 2,3 mod 4."""
        out = {}
        for idx, c in self.terms.items():
            out[idx] = c if len(idx) % 4 in (0, 1) else -c
        return Form(self.chart, out)

    def mukai(self, other: "Form") -> "Form":
        """Spin-representation pairing: degree-2n part of self ^ sigma(other)."""
        self._check(other)
        return self.wedge(other.sigma()).degree_part(self.chart.dim)

    def mukai_scalar(self, other: "Form") -> ScalarExpr:
        """Mukai pairing reported against the coordinate volume form."""
        top = self.mukai(other)
        return top.coefficient(tuple(range(self.chart.dim)))

    def exp(self) -> "Form":
        """Exponential of an even form with no degree-0 part (finite sum)."""
        if any(len(i) % 2 or not i for i in self.terms):
            raise ValueError("exp needs an even form of positive degree")
        out = self.chart.func(1)
        power = self.chart.func(1)
        k = 1
        fact = 1
        while True:
            power = power.wedge(self)
            if power.is_zero():
                break
            fact *= k
            out = out + power.scale(Fraction(1, fact))
            k += 1
        return out

    # -- pullback ------------------------------------------------------------

    def pullback_affine(self, A, t=None) -> "Form":
        """Pullback along F(x) = A x + t for rational A and pi-lattice t."""
        chart = self.chart
        dim = chart.dim
        A = [[Fraction(x) for x in row] for row in A]
        if t is None:
            t = [(Fraction(0), Fraction(0))] * dim
        t = [p if isinstance(p, tuple) else (p, 0) for p in t]
        t = [(Fraction(a), Fraction(b)) for (a, b) in t]
        det = _rational_det(A)
        if det == 0:
            raise SingularMap("affine map matrix is singular")
        # pullbacks of coordinate differentials: F*(dx_i) = sum_j A[i][j] dx_j
        dxs = []
        for i in range(dim):
            dxs.append(Form(chart, {(j,): chart.const(A[i][j])
                                    for j in range(dim) if A[i][j] != 0}))
        out = chart.zero_form()
        for idx, c in self.terms.items():
            pc = _scalar_affine_sub(c, A, t)
            piece = chart.func(pc)
            for i in idx:
                piece = piece.wedge(dxs[i])
            out = out + piece
        return out

    # -- printing ------------------------------------------------------------

    def __repr__(self):
        return f"<Form {self}>"

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.chart.coords
        parts = []
        for idx in sorted(self.terms, key=lambda i: (len(i), i)):
            c = self.terms[idx]
            cs = c.to_string(names)
            basis = "^".join(f"d{names[k]}" for k in idx)
            if not basis:
                parts.append(f"({cs})")
            else:
                parts.append(f"({cs})*{basis}")
        return " + ".join(parts)


def _rational_det(A):
    n = len(A)
    rows = [list(r) for r in A]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            det = -det
        det *= rows[c][c]
        for q in range(c + 1, n):
            if rows[q][c]:
                f = rows[q][c] / rows[c][c]
                rows[q] = [x - f * y for x, y in zip(rows[q], rows[c])]
    return det


def _scalar_affine_sub(e: ScalarExpr, A, t) -> ScalarExpr:
    num = _trig_affine_sub(e.num, A, t)
    den = _trig_affine_sub(e.den, A, t)
    return num / den


def _trig_affine_sub(p: TrigPoly, A, t) -> ScalarExpr:
    m = p.nvars
    out = ScalarExpr.zero(m)
    lin = []
    for j in range(m):
        lj = ScalarExpr.from_qqi(m, QQi(t[j][0]))
        for k in range(m):
            if A[j][k]:
                lj = lj + ScalarExpr.coord(m, k) * QQi(A[j][k])
        lin.append(lj)
    for (mono, freq), c in p.terms.items():
        term = ScalarExpr.from_qqi(m, c)
        for j, ex in enumerate(mono):
            if ex:
                if t[j][1] != 0:
                    raise FieldClosureError(
                        "pi-translation hits a polynomial coordinate")
                term = term * lin[j] ** ex
        if any(freq):
            newf = []
            for k in range(m):
                fk = sum(Fraction(freq[j]) * A[j][k] for j in range(m))
                if fk.denominator != 1:
                    raise FieldClosureError(
                        "affine map does not preserve the frequency lattice")
                newf.append(int(fk))
            ka = sum(Fraction(freq[j]) * t[j][0] for j in range(m))
            kb = sum(Fraction(freq[j]) * t[j][1] for j in range(m))
            if ka != 0 or (2 * kb).denominator != 1:
                raise FieldClosureError(
                    "translation phase leaves the exact field")
            quarter = {0: QQi(1), 1: QQi(0, 1), 2: QQi(-1), 3: QQi(0, -1)}[int(2 * kb) % 4]
            phase = ScalarExpr.from_qqi(m, quarter)
            term = term * phase * ScalarExpr(m, TrigPoly.expi(m, tuple(newf)),
                                             TrigPoly.const(m, 1))
        out = out + term
    return out
