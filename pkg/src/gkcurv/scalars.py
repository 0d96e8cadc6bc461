"""Exact scalar field of complex-rational trigonometric rational functions.

A scalar is a fraction N/D of "trig-polynomials": finite sums

    c * x^a * exp(i k.x),   c a Gaussian rational, a >= 0, k integer,

stored sparsely over the chart coordinates.  sin and cos enter through
their exponential combinations, which keeps the product-to-sum rewriting
implicit and the canonical form unique: fractions are reduced by a true
multivariate gcd and the denominator is normalised (leading coefficient 1,
no overall exp factor), so two scalars are equal iff their stored forms
are identical.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

from .errors import DivisionByZero, EvaluationPole, FieldClosureError

# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------


class QQi:
    """Gaussian rational a + b*i with exact Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __add__(self, other):
        other = as_qqi(other)
        return _mk(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return _mk(-self.re, -self.im)

    def __sub__(self, other):
        other = as_qqi(other)
        return _mk(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_qqi(other) - self

    def __mul__(self, other):
        other = as_qqi(other)
        b, d = self.im, other.im
        if not b and not d:
            return _mk(self.re * other.re, b)
        return _mk(self.re * other.re - b * d,
                   self.re * d + b * other.re)

    __rmul__ = __mul__

    def inverse(self):
        if not self.im:
            if not self.re:
                raise DivisionByZero("inverse of 0")
            return _mk(1 / self.re, self.im)
        d = self.re * self.re + self.im * self.im
        return _mk(self.re / d, -self.im / d)

    def __truediv__(self, other):
        return self * as_qqi(other).inverse()

    def __rtruediv__(self, other):
        return as_qqi(other) * self.inverse()

    def conj(self):
        return _mk(self.re, -self.im)

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def is_real(self):
        return self.im == 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if not isinstance(other, QQi):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def to_complex(self):
        return complex(self.re, self.im)

    def __repr__(self):
        return f"QQi({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_qqi(self)


def _mk(re, im) -> QQi:
    q = QQi.__new__(QQi)
    q.re = re
    q.im = im
    return q


QQI_ZERO = QQi(0)
QQI_ONE = QQi(1)
QQI_I = QQi(0, 1)


def as_qqi(x) -> QQi:
    if isinstance(x, QQi):
        return x
    if isinstance(x, (int, Fraction)):
        return QQi(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to QQi")


def format_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_qqi(c: QQi) -> str:
    if c.im == 0:
        return format_fraction(c.re)
    if c.re == 0:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{format_fraction(c.im)}*i"
    im = c.im
    sign = "+" if im > 0 else "-"
    im_abs = -im if im < 0 else im
    im_str = "i" if im_abs == 1 else f"{format_fraction(im_abs)}*i"
    return f"({format_fraction(c.re)}{sign}{im_str})"


# ---------------------------------------------------------------------------
# Trig-polynomials: dict[(mono, freq)] -> QQi
# ---------------------------------------------------------------------------

Key = tuple  # ((int,)*m, (int,)*m)


class TrigPoly:
    """Sparse Laurent-trig polynomial: sum of c * x^mono * exp(i freq.x)."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = terms if terms is not None else {}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(nvars):
        return TrigPoly(nvars)

    @staticmethod
    def const(nvars, c) -> "TrigPoly":
        c = as_qqi(c)
        if c.is_zero():
            return TrigPoly(nvars)
        z = (0,) * nvars
        return TrigPoly(nvars, {(z, z): c})

    @staticmethod
    def coord(nvars, k) -> "TrigPoly":
        z = (0,) * nvars
        mono = tuple(1 if j == k else 0 for j in range(nvars))
        return TrigPoly(nvars, {(mono, z): QQI_ONE})

    @staticmethod
    def expi(nvars, freq) -> "TrigPoly":
        """exp(i * freq.x) for an integer frequency vector."""
        z = (0,) * nvars
        return TrigPoly(nvars, {(z, tuple(freq)): QQI_ONE})

    # -- basic predicates ----------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_const(self):
        if not self.terms:
            return True
        if len(self.terms) != 1:
            return False
        (mono, freq), _ = next(iter(self.terms.items()))
        return not any(mono) and not any(freq)

    def const_value(self) -> QQi:
        if not self.terms:
            return QQI_ZERO
        return next(iter(self.terms.values()))

    def has_trig(self):
        return any(any(freq) for (_, freq) in self.terms)

    def has_mono(self):
        return any(any(mono) for (mono, _) in self.terms)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if self.nvars != other.nvars:
            raise ValueError("mixed variable counts")
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return TrigPoly(self.nvars, out)

    def __neg__(self):
        return TrigPoly(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, QQi):
            return self.scale(other)
        if self.nvars != other.nvars:
            raise ValueError("mixed variable counts")
        if not self.terms or not other.terms:
            return TrigPoly(self.nvars)
        out = {}
        for (m1, f1), c1 in self.terms.items():
            for (m2, f2), c2 in other.terms.items():
                key = (tuple(a + b for a, b in zip(m1, m2)),
                       tuple(a + b for a, b in zip(f1, f2)))
                c = c1 * c2
                s = out.get(key)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return TrigPoly(self.nvars, out)

    def scale(self, c: QQi):
        c = as_qqi(c)
        if c.is_zero():
            return TrigPoly(self.nvars)
        return TrigPoly(self.nvars, {k: v * c for k, v in self.terms.items()})

    def conj(self):
        out = {}
        for (mono, freq), c in self.terms.items():
            out[(mono, tuple(-f for f in freq))] = c.conj()
        return TrigPoly(self.nvars, out)

    def partial(self, k: int):
        out = TrigPoly(self.nvars)
        acc = {}
        for (mono, freq), c in self.terms.items():
            if mono[k]:
                m2 = list(mono)
                m2[k] -= 1
                key = (tuple(m2), freq)
                add = c * QQi(mono[k])
                s = acc.get(key)
                s = add if s is None else s + add
                if s.is_zero():
                    acc.pop(key, None)
                else:
                    acc[key] = s
            if freq[k]:
                key = (mono, freq)
                add = c * QQi(0, freq[k])
                s = acc.get(key)
                s = add if s is None else s + add
                if s.is_zero():
                    acc.pop(key, None)
                else:
                    acc[key] = s
        out.terms = acc
        return out

    def __eq__(self, other):
        return (isinstance(other, TrigPoly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: _term_sort_key(kv[0]), reverse=True)


def _term_sort_key(key):
    mono, freq = key
    return (sum(mono) + sum(abs(f) for f in freq), mono, freq)


# ---------------------------------------------------------------------------
# Plain polynomial world for gcd: exponent tuple (len 2m, all >= 0) -> QQi
# ---------------------------------------------------------------------------


def _to_poly(p: TrigPoly, shift):
    """Map Laurent freq exponents into plain exponents via per-variable shift."""
    m = p.nvars
    out = {}
    for (mono, freq), c in p.terms.items():
        out[mono + tuple(freq[j] - shift[j] for j in range(m))] = c
    return out


def _freq_min(polys, m):
    shift = [0] * m
    for p in polys:
        for (_, freq) in p.terms:
            for j in range(m):
                if freq[j] < shift[j]:
                    shift[j] = freq[j]
    return tuple(shift)


def _from_poly(d, m, shift):
    out = {}
    for exp, c in d.items():
        out[(exp[:m], tuple(exp[m + j] + shift[j] for j in range(m)))] = c
    return out


def _plex_key(exp):
    return (sum(exp), exp)


def _leading(d):
    return max(d, key=_plex_key)


def _p_scale(d, c: QQi):
    if c.is_zero():
        return {}
    return {k: v * c for k, v in d.items()}


def _p_add_scaled(a, b, c: QQi):
    out = dict(a)
    for k, v in b.items():
        s = out.get(k)
        s = v * c if s is None else s + v * c
        if s.is_zero():
            out.pop(k, None)
        else:
            out[k] = s
    return out


def _p_mul(a, b):
    out = {}
    for k1, c1 in a.items():
        for k2, c2 in b.items():
            key = tuple(x + y for x, y in zip(k1, k2))
            c = c1 * c2
            s = out.get(key)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
    return out


def _p_div_exact(a, b):
    """Exact division a/b in the polynomial ring, or None."""
    if not b:
        raise DivisionByZero("polynomial division by zero")
    if not a:
        return {}
    lb = _leading(b)
    cb = b[lb]
    q = {}
    r = dict(a)
    while r:
        lr = _leading(r)
        exp = tuple(x - y for x, y in zip(lr, lb))
        if any(e < 0 for e in exp):
            return None
        c = r[lr] / cb
        q[exp] = c
        for k, v in b.items():
            key = tuple(x + y for x, y in zip(k, exp))
            s = r.get(key)
            s = -(v * c) if s is None else s - v * c
            if s.is_zero():
                r.pop(key, None)
            else:
                r[key] = s
    return q


def _mono_content(d):
    it = iter(d)
    first = next(it)
    mins = list(first)
    for k in it:
        for j, e in enumerate(k):
            if e < mins[j]:
                mins[j] = e
    return tuple(mins)


def _shift_down(d, mins):
    if not any(mins):
        return d
    return {tuple(x - y for x, y in zip(k, mins)): v for k, v in d.items()}


def _monic(d):
    if not d:
        return d
    c = d[_leading(d)]
    if c == QQI_ONE:
        return d
    return _p_scale(d, c.inverse())


def _deg_in(d, v):
    return max(k[v] for k in d)


def _uni_view(d, v):
    """Split by degree in variable v: {deg: poly-in-rest (v-exponent zeroed)}."""
    out = {}
    for k, c in d.items():
        e = k[v]
        rest = k[:v] + (0,) + k[v + 1:]
        slot = out.setdefault(e, {})
        s = slot.get(rest)
        s = c if s is None else s + c
        if s.is_zero():
            slot.pop(rest, None)
        else:
            slot[rest] = s
    return {e: p for e, p in out.items() if p}


def _uni_assemble(coeffs, v):
    out = {}
    for e, p in coeffs.items():
        for k, c in p.items():
            key = k[:v] + (e,) + k[v + 1:]
            out[key] = c
    return out


def _uni_mul_shift(coeffs, mult, shift):
    """coeffs * mult * var^shift in the uni view."""
    out = {}
    for e, p in coeffs.items():
        out[e + shift] = _p_mul(p, mult)
    return {e: p for e, p in out.items() if p}


def _uni_sub(a, b):
    out = {e: dict(p) for e, p in a.items()}
    for e, p in b.items():
        slot = out.setdefault(e, {})
        for k, c in p.items():
            s = slot.get(k)
            s = -c if s is None else s - c
            if s.is_zero():
                slot.pop(k, None)
            else:
                slot[k] = s
        if not slot:
            out.pop(e, None)
    return out


def _pseudo_rem(a, b, v):
    """Pseudo-remainder lb^k * a mod b w.r.t. variable v (uni views)."""
    db = max(b)
    lb = b[db]
    r = a
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        # r := lb*r - lr*v^(dr-db)*b
        r = _uni_sub(_uni_mul_shift(r, lb, 0), _uni_mul_shift(b, lr, dr - db))
        r = {e: p for e, p in r.items() if p}
    return r


def _content_list(polys):
    g = {}
    for p in polys:
        g = poly_gcd(g, p)
        if g and sum(_leading(g)) == 0:  # constant gcd
            return _monic(g)
    return g


# -- evaluation-based coprimality fast path ---------------------------------
#
# Substituting integers for all variables but one can only enlarge a gcd, so
# a degree-0 univariate gcd at a degree-preserving point proves the full gcd
# has degree 0 in that variable.

_EVAL_POINTS = ((2, 3, 5, 7, 11, 13, 17, 19), (3, 7, 2, 13, 5, 19, 11, 17),
                (5, 2, 13, 3, 17, 7, 19, 11))

# F_p[i] with p = 2^31 - 1 (p = 3 mod 4, so x^2 + 1 stays irreducible);
# specializing coefficients mod p can only enlarge a gcd, so a degree-0
# univariate image still certifies coprimality.
_P = (1 << 31) - 1


def _modp(fr: Fraction):
    d = fr.denominator % _P
    if d == 0:
        return None
    return fr.numerator % _P * pow(d, _P - 2, _P) % _P


def _eval_uni_modp(d, v, point):
    out = {}
    for exp, c in d.items():
        re = _modp(c.re)
        im = _modp(c.im)
        if re is None or im is None:
            return None
        w = 1
        for j, e in enumerate(exp):
            if j != v and e:
                w = w * pow(point[j % len(point)], e, _P) % _P
        re, im = re * w % _P, im * w % _P
        cur = out.get(exp[v])
        if cur is None:
            cur = (re, im)
        else:
            cur = ((cur[0] + re) % _P, (cur[1] + im) % _P)
        if cur == (0, 0):
            out.pop(exp[v], None)
        else:
            out[exp[v]] = cur
    return out


def _inv_modp(z):
    a, b = z
    n = (a * a + b * b) % _P
    ninv = pow(n, _P - 2, _P)
    return (a * ninv % _P, -b * ninv % _P)


def _uni_gcd_modp(a, b):
    """Euclidean gcd degree of univariate dicts deg -> F_p[i] pair."""
    while b:
        db = max(b)
        linv = _inv_modp(b[db])
        r = dict(a)
        while r and max(r) >= db:
            dr = max(r)
            ra, rb = r[dr]
            fa = (ra * linv[0] - rb * linv[1]) % _P
            fb = (ra * linv[1] + rb * linv[0]) % _P
            for e, (ca, cb) in b.items():
                k = e + dr - db
                da = (ca * fa - cb * fb) % _P
                dbb = (ca * fb + cb * fa) % _P
                cur = r.get(k, (0, 0))
                cur = ((cur[0] - da) % _P, (cur[1] - dbb) % _P)
                if cur == (0, 0):
                    r.pop(k, None)
                else:
                    r[k] = cur
        a, b = b, r
    return max(a) if a else -1


def _gcd_known_trivial(a, b, shared):
    """True if mod-p evaluation proves gcd(a, b) is constant."""
    for v in shared:
        da, db = _deg_in(a, v), _deg_in(b, v)
        proved = False
        for point in _EVAL_POINTS:
            ua = _eval_uni_modp(a, v, point)
            ub = _eval_uni_modp(b, v, point)
            if ua is None or ub is None:
                continue  # a denominator vanished mod p; try another point
            if not ua or not ub or max(ua) != da or max(ub) != db:
                continue  # degree dropped; point invalid for this argument
            if _uni_gcd_modp(ua, ub) == 0:
                proved = True
            break
        if not proved:
            return False
    return True


class _FactorRegistry:
    """Nontrivial gcd factors seen so far, peeled by exact division later."""

    def __init__(self, cap=128):
        self.cap = cap
        self.by_nvars = {}

    def add(self, p):
        if not p or len(p) == 1:
            return
        p = _monic(_shift_down(p, _mono_content(p)))
        if len(p) == 1:
            return
        nv = len(next(iter(p)))
        bucket = self.by_nvars.setdefault(nv, {})
        key = frozenset(p.items())
        if key not in bucket and len(bucket) < self.cap:
            bucket[key] = p

    def candidates(self, nv):
        return list(self.by_nvars.get(nv, {}).values())


_REGISTRY = _FactorRegistry()


def poly_gcd(a, b):
    """Monic gcd in QQi[vars]: registry peeling, evaluation bounds, then
    primitive pseudo-remainder sequences."""
    if not a:
        return _monic(dict(b))
    if not b:
        return _monic(dict(a))
    ma, mb = _mono_content(a), _mono_content(b)
    common = tuple(min(x, y) for x, y in zip(ma, mb))
    a = _shift_down(a, ma)
    b = _shift_down(b, mb)
    # quick exits
    g_mono = {common: QQI_ONE}
    if len(a) == 1 or len(b) == 1:
        return g_mono
    qa = _p_div_exact(a, b)
    if qa is not None:
        return _p_mul(_monic(b), g_mono)
    qb = _p_div_exact(b, a)
    if qb is not None:
        return _p_mul(_monic(a), g_mono)
    nv = len(next(iter(a)))
    deg_cap = min(max(sum(k) for k in a), max(sum(k) for k in b))
    g_peel = None
    for f in _REGISTRY.candidates(nv):
        if max(sum(k) for k in f) > deg_cap:
            continue
        while True:
            qa = _p_div_exact(a, f)
            if qa is None:
                break
            qb = _p_div_exact(b, f)
            if qb is None:
                break
            a, b = qa, qb
            g_peel = f if g_peel is None else _p_mul(g_peel, f)
            if len(a) == 1 or len(b) == 1:
                break
        if len(a) == 1 or len(b) == 1:
            break
    if g_peel is not None:
        inner = poly_gcd(a, b)
        return _monic(_p_mul(_p_mul(g_peel, inner), g_mono))
    shared = [v for v in range(nv) if _deg_in(a, v) > 0 and _deg_in(b, v) > 0]
    if not shared:
        return g_mono
    if _gcd_known_trivial(a, b, shared):
        return g_mono
    v = min(shared, key=lambda w: min(_deg_in(a, w), _deg_in(b, w)))
    ua, ub = _uni_view(a, v), _uni_view(b, v)
    ca = _content_list(list(ua.values()))
    cb = _content_list(list(ub.values()))
    cont = poly_gcd(ca, cb)
    pa = {e: _p_div_exact(p, ca) for e, p in ua.items()}
    pb = {e: _p_div_exact(p, cb) for e, p in ub.items()}
    if max(pa) < max(pb):
        pa, pb = pb, pa
    while True:
        if not pb:
            g = pa
            break
        if max(pb) == 0:
            g = {0: {(0,) * nv: QQI_ONE}}
            break
        r = _pseudo_rem(pa, pb, v)
        if not r:
            g = pb
            break
        rc = _content_list(list(r.values()))
        r = {e: _p_div_exact(p, rc) for e, p in r.items()}
        pa, pb = pb, r
    gg = _uni_assemble(g, v)
    gg = _shift_down(gg, _mono_content(gg))
    out = _p_mul(_p_mul(_monic(gg), _monic(cont) if cont else {(0,) * nv: QQI_ONE}), g_mono)
    out = _monic(out)
    _REGISTRY.add(out)
    _REGISTRY.add(gg)
    return out


# ---------------------------------------------------------------------------
# ScalarExpr: canonical fraction of trig-polynomials
# ---------------------------------------------------------------------------


class ScalarExpr:
    """Canonical fraction num/den of TrigPolys over a fixed variable count."""

    __slots__ = ("nvars", "num", "den")

    def __init__(self, nvars, num: TrigPoly, den: TrigPoly, _normalized=False,
                 _coprime=False):
        self.nvars = nvars
        if _normalized:
            self.num = num
            self.den = den
        else:
            self.num, self.den = _normalize(num, den, coprime=_coprime)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def from_qqi(nvars, c) -> "ScalarExpr":
        return ScalarExpr(nvars, TrigPoly.const(nvars, c), TrigPoly.const(nvars, 1),
                          _normalized=True)

    @staticmethod
    def zero(nvars):
        return ScalarExpr.from_qqi(nvars, 0)

    @staticmethod
    def one(nvars):
        return ScalarExpr.from_qqi(nvars, 1)

    @staticmethod
    def i(nvars):
        return ScalarExpr.from_qqi(nvars, QQI_I)

    @staticmethod
    def coord(nvars, k):
        return ScalarExpr(nvars, TrigPoly.coord(nvars, k), TrigPoly.const(nvars, 1),
                          _normalized=True)

    @staticmethod
    def sin(nvars, freq):
        """sin(freq.x) for an integer frequency vector."""
        e = TrigPoly.expi(nvars, freq)
        em = TrigPoly.expi(nvars, tuple(-f for f in freq))
        half_over_i = QQi(0, Fraction(-1, 2))  # 1/(2i)
        return ScalarExpr(nvars, (e - em).scale(half_over_i), TrigPoly.const(nvars, 1))

    @staticmethod
    def cos(nvars, freq):
        e = TrigPoly.expi(nvars, freq)
        em = TrigPoly.expi(nvars, tuple(-f for f in freq))
        return ScalarExpr(nvars, (e + em).scale(QQi(Fraction(1, 2))), TrigPoly.const(nvars, 1))

    # -- predicates ----------------------------------------------------------

    def is_zero(self):
        return self.num.is_zero()

    def is_const(self):
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> QQi:
        if not self.is_const():
            raise ValueError("not a constant")
        if self.num.is_zero():
            return QQI_ZERO
        return self.num.const_value() / self.den.const_value()

    def is_real(self):
        return self.conj() == self

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ScalarExpr):
            if other.nvars != self.nvars:
                raise ValueError("mixed variable counts")
            return other
        if isinstance(other, (int, Fraction, QQi)):
            return ScalarExpr.from_qqi(self.nvars, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        if self.den == o.den:
            return ScalarExpr(self.nvars, self.num + o.num, self.den)
        return ScalarExpr(self.nvars, self.num * o.den + o.num * self.den,
                          self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return ScalarExpr(self.nvars, -self.num, self.den, _normalized=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return ScalarExpr.zero(self.nvars)
        # scaling by a constant keeps the fraction canonical as-is
        if o.is_const():
            return ScalarExpr(self.nvars, self.num.scale(o.const_value()),
                              self.den, _normalized=True)
        if self.is_const():
            return ScalarExpr(self.nvars, o.num.scale(self.const_value()),
                              o.den, _normalized=True)
        n1, d2 = _cross_reduce(self.num, o.den)
        n2, d1 = _cross_reduce(o.num, self.den)
        return ScalarExpr(self.nvars, n1 * n2, d1 * d2, _coprime=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DivisionByZero("division by zero scalar")
        if self.is_zero():
            return ScalarExpr.zero(self.nvars)
        if o.is_const():
            inv = o.const_value().inverse()
            return ScalarExpr(self.nvars, self.num.scale(inv), self.den,
                              _normalized=True)
        n1, n2 = _cross_reduce(self.num, o.num)
        d1, d2 = _cross_reduce(self.den, o.den)
        return ScalarExpr(self.nvars, n1 * d2, d1 * n2, _coprime=True)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("integer powers only")
        if k == 0:
            return ScalarExpr.one(self.nvars)
        base = self if k > 0 else ScalarExpr.one(self.nvars) / self
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    def conj(self):
        return ScalarExpr(self.nvars, self.num.conj(), self.den.conj())

    def partial(self, k: int):
        if not 0 <= k < self.nvars:
            raise ValueError("coordinate index out of range")
        if self.den.is_const():
            return ScalarExpr(self.nvars, self.num.partial(k), self.den)
        dden = self.den.partial(k)
        if dden.is_zero():
            return ScalarExpr(self.nvars, self.num.partial(k), self.den)
        # f' = (N'(D/g) - N(D'/g)) / (D (D/g)) with g = gcd(D, D')
        v, w = _cross_reduce(self.den, dden)
        num = self.num.partial(k) * v - self.num * w
        return ScalarExpr(self.nvars, num, self.den * v)

    def real(self):
        half = ScalarExpr.from_qqi(self.nvars, QQi(Fraction(1, 2)))
        return (self + self.conj()) * half

    def imag(self):
        c = ScalarExpr.from_qqi(self.nvars, QQi(0, Fraction(-1, 2)))
        return (self - self.conj()) * c

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, ScalarExpr) else other
        if o is None or not isinstance(o, ScalarExpr):
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- evaluation ----------------------------------------------------------

    def eval(self, point, float_fallback=True):
        """Evaluate at a Point; exact QQi where possible, complex otherwise."""
        den = _eval_trigpoly(self.den, point, float_fallback)
        num = _eval_trigpoly(self.num, point, float_fallback)
        if isinstance(den, QQi):
            if den.is_zero():
                raise EvaluationPole("denominator vanishes at point")
            if isinstance(num, QQi):
                return num / den
            return num / den.to_complex()
        if den == 0:
            raise EvaluationPole("denominator vanishes at point")
        if isinstance(num, QQi):
            num = num.to_complex()
        return num / den

    def __repr__(self):
        return f"<ScalarExpr {self}>"

    def __str__(self):
        num = format_trigpoly(self.num, _default_names(self.nvars))
        if self.den.is_const() and self.den.const_value() == QQI_ONE:
            return num
        den = format_trigpoly(self.den, _default_names(self.nvars))
        return f"({num})/({den})"

    def to_string(self, names):
        num = format_trigpoly(self.num, names)
        if self.den.is_const() and self.den.const_value() == QQI_ONE:
            return num
        return f"({num})/({format_trigpoly(self.den, names)})"


def _default_names(nvars):
    return tuple(f"x{j+1}" for j in range(nvars))


def _normalize(num: TrigPoly, den: TrigPoly, coprime=False):
    if den.is_zero():
        raise DivisionByZero("zero denominator")
    m = num.nvars
    if num.is_zero():
        return TrigPoly.zero(m), TrigPoly.const(m, 1)
    if den.is_const():
        c = den.const_value()
        if c == QQI_ONE:
            return num, den
        return num.scale(c.inverse()), TrigPoly.const(m, 1)
    shift = _freq_min([num, den], m)
    pn = _to_poly(num, shift)
    pd = _to_poly(den, shift)
    if not coprime:
        g = poly_gcd(pn, pd)
        if g and (len(g) > 1 or any(_leading(g))):
            pn = _p_div_exact(pn, g)
            pd = _p_div_exact(pd, g)
    return _unit_normalize(pn, pd, m)


def trig_div_exact(a: TrigPoly, b: TrigPoly):
    """Exact quotient a/b of trig-polynomials, or None if it does not divide.

    The exp-frequency shifts are independent per argument: a Laurent
    quotient exists exactly when the min-exponent-zero representatives
    divide in the plain ring, with the shift difference restored after.
    """
    if b.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    if a.is_zero():
        return TrigPoly.zero(a.nvars)
    if b.is_const():
        return a.scale(b.const_value().inverse())
    m = a.nvars
    sa = _freq_min([a], m)
    sb = _freq_min([b], m)
    q = _p_div_exact(_to_poly(a, sa), _to_poly(b, sb))
    if q is None:
        return None
    back = tuple(sa[j] - sb[j] for j in range(m))
    return TrigPoly(m, _from_poly(q, m, back))


def _cross_reduce(a: TrigPoly, b: TrigPoly):
    """Divide out the gcd of two trig-polynomials (pairwise reduction)."""
    if a.is_const() or b.is_const():
        return a, b
    m = a.nvars
    shift = _freq_min([a, b], m)
    pa = _to_poly(a, shift)
    pb = _to_poly(b, shift)
    g = poly_gcd(pa, pb)
    if not g or (len(g) == 1 and not any(_leading(g))):
        return a, b
    pa = _p_div_exact(pa, g)
    pb = _p_div_exact(pb, g)
    return (TrigPoly(m, _from_poly(pa, m, shift)),
            TrigPoly(m, _from_poly(pb, m, shift)))


def _unit_normalize(pn, pd, m):
    """Fix the fraction's unit: den has exp-exponent 0 per variable and is monic."""
    # exp-part of den minimal exponents -> shift both
    mins = [min(k[m + j] for k in pd) for j in range(m)]
    lead = _leading(pd)
    c = pd[lead]
    inv = c.inverse()
    den_terms = {}
    for k, v in pd.items():
        den_terms[(k[:m], tuple(k[m + j] - mins[j] for j in range(m)))] = v * inv
    num_terms = {}
    for k, v in pn.items():
        num_terms[(k[:m], tuple(k[m + j] - mins[j] for j in range(m)))] = v * inv
    return TrigPoly(m, num_terms), TrigPoly(m, den_terms)


# ---------------------------------------------------------------------------
# Evaluation points
# ---------------------------------------------------------------------------


class Point:
    """Chart point with coordinates a + b*pi (a, b rational)."""

    __slots__ = ("a", "b")

    def __init__(self, coords):
        a, b = [], []
        for c in coords:
            if isinstance(c, tuple):
                a.append(Fraction(c[0]))
                b.append(Fraction(c[1]))
            else:
                a.append(Fraction(c))
                b.append(Fraction(0))
        self.a = tuple(a)
        self.b = tuple(b)

    def floats(self):
        return tuple(float(x) + float(y) * math.pi for x, y in zip(self.a, self.b))

    def __repr__(self):
        return f"Point({list(zip(self.a, self.b))})"


_QUARTER = {0: QQI_ONE, 1: QQI_I, 2: -QQI_ONE, 3: -QQI_I}


def _eval_trigpoly(p: TrigPoly, point: Point, float_fallback):
    total_q = QQI_ZERO
    total_f = 0j
    exact = True
    for (mono, freq), c in p.terms.items():
        mono_exact = all(e == 0 or point.b[j] == 0 for j, e in enumerate(mono))
        ka = sum((point.a[j] * f for j, f in enumerate(freq)), Fraction(0))
        kb = sum((point.b[j] * f for j, f in enumerate(freq)), Fraction(0))
        trig_exact = (ka == 0) and (2 * kb).denominator == 1
        if mono_exact and trig_exact:
            v = QQI_ONE
            for j, e in enumerate(mono):
                if e:
                    v = v * QQi(point.a[j] ** e)
            v = v * _QUARTER[int(2 * kb) % 4]
            total_q = total_q + c * v
        else:
            exact = False
            if not float_fallback:
                raise FieldClosureError("point does not admit exact evaluation")
            xs = point.floats()
            v = complex(1.0)
            for j, e in enumerate(mono):
                if e:
                    v *= xs[j] ** e
            arg = sum(f * xs[j] for j, f in enumerate(freq))
            v *= cmath.exp(1j * arg)
            total_f += c.to_complex() * v
    if exact:
        return total_q
    return total_q.to_complex() + total_f


# ---------------------------------------------------------------------------
# Printing in the sin/cos basis
# ---------------------------------------------------------------------------


def _freq_canonical(freq):
    for f in freq:
        if f > 0:
            return True
        if f < 0:
            return False
    return True  # zero vector


def _lin_arg_str(freq, names):
    parts = []
    for j, f in enumerate(freq):
        if f == 0:
            continue
        if f == 1:
            term = names[j]
        elif f == -1:
            term = f"-{names[j]}"
        else:
            term = f"{f}*{names[j]}"
        if parts and not term.startswith("-"):
            parts.append("+" + term)
        else:
            parts.append(term)
    return "".join(parts)


def format_trigpoly(p: TrigPoly, names) -> str:
    """Deterministic print: graded-lex terms, exp pairs folded to cos/sin."""
    if p.is_zero():
        return "0"
    pieces = {}
    for (mono, freq), c in p.terms.items():
        if not any(freq):
            pieces.setdefault((mono, freq, ""), QQI_ZERO)
            pieces[(mono, freq, "")] = pieces[(mono, freq, "")] + c
            continue
        pos = freq if _freq_canonical(freq) else tuple(-f for f in freq)
        cpos = p.terms.get((mono, pos), QQI_ZERO)
        cneg = p.terms.get((mono, tuple(-f for f in pos)), QQI_ZERO)
        if freq != pos:
            continue  # handled when visiting the canonical key
        ccos = cpos + cneg
        csin = QQI_I * (cpos - cneg)
        if not ccos.is_zero():
            pieces[(mono, pos, "cos")] = ccos
        if not csin.is_zero():
            pieces[(mono, pos, "sin")] = csin
    # negative-frequency-only terms whose positive partner is absent
    for (mono, freq), c in p.terms.items():
        if any(freq) and not _freq_canonical(freq):
            pos = tuple(-f for f in freq)
            if (mono, pos) not in p.terms:
                ccos = c
                csin = QQI_I * (-c)
                key_c = (mono, pos, "cos")
                key_s = (mono, pos, "sin")
                pieces[key_c] = pieces.get(key_c, QQI_ZERO) + ccos
                pieces[key_s] = pieces.get(key_s, QQI_ZERO) + csin
    out = []
    for (mono, freq, kind) in sorted(pieces, key=lambda t: (_term_sort_key((t[0], t[1])), t[2]), reverse=True):
        c = pieces[(mono, freq, kind)]
        if c.is_zero():
            continue
        factors = []
        cs = format_qqi(c)
        for j, e in enumerate(mono):
            if e == 1:
                factors.append(names[j])
            elif e > 1:
                factors.append(f"{names[j]}^{e}")
        if kind:
            factors.append(f"{kind}({_lin_arg_str(freq, names)})")
        if not factors:
            body = cs
        elif cs == "1":
            body = "*".join(factors)
        elif cs == "-1":
            body = "-" + "*".join(factors)
        else:
            body = cs + "*" + "*".join(factors)
        out.append(body)
    if not out:
        return "0"
    text = out[0]
    for t in out[1:]:
        text += (" - " + t[1:]) if t.startswith("-") else (" + " + t)
    return text


# ---------------------------------------------------------------------------
# Expression parser (scene input grammar)
# ---------------------------------------------------------------------------


class _Tok:
    __slots__ = ("kind", "val")

    def __init__(self, kind, val=None):
        self.kind = kind
        self.val = val


def _tokenize(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Tok("num", int(text[i:j])))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Tok("name", text[i:j]))
            i = j
            continue
        if ch in "+-*/^()":
            toks.append(_Tok(ch))
            i += 1
            continue
        raise ValueError(f"unexpected character {ch!r} in expression")
    toks.append(_Tok("end"))
    return toks


class _Parser:
    """Recursive-descent parser for the infix scalar grammar."""

    def __init__(self, text, names):
        self.toks = _tokenize(text)
        self.pos = 0
        self.names = list(names)
        self.nvars = len(self.names)

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None):
        t = self.toks[self.pos]
        if kind and t.kind != kind:
            raise ValueError(f"expected {kind}, found {t.kind}")
        self.pos += 1
        return t

    def parse(self) -> ScalarExpr:
        e = self.expr()
        if self.peek().kind != "end":
            raise ValueError("trailing input in expression")
        return e

    def expr(self):
        t = self.peek()
        if t.kind in "+-":
            self.take()
            e = self.term()
            if t.kind == "-":
                e = -e
        else:
            e = self.term()
        while self.peek().kind in "+-":
            op = self.take().kind
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.power()
        while self.peek().kind in "*/":
            op = self.take().kind
            rhs = self.power()
            e = e * rhs if op == "*" else e / rhs
        return e

    def power(self):
        base = self.atom()
        if self.peek().kind == "^":
            self.take()
            neg = False
            if self.peek().kind == "-":
                self.take()
                neg = True
            t = self.take("num")
            return base ** (-t.val if neg else t.val)
        return base

    def atom(self):
        t = self.take()
        if t.kind == "num":
            return ScalarExpr.from_qqi(self.nvars, t.val)
        if t.kind == "(":
            e = self.expr()
            self.take(")")
            return e
        if t.kind == "-":
            return -self.atom()
        if t.kind == "name":
            if t.val == "i":
                return ScalarExpr.i(self.nvars)
            if t.val in ("sin", "cos"):
                self.take("(")
                arg = self.expr()
                self.take(")")
                freq = _integer_linear(arg, self.nvars)
                if t.val == "sin":
                    return ScalarExpr.sin(self.nvars, freq)
                return ScalarExpr.cos(self.nvars, freq)
            if t.val in self.names:
                return ScalarExpr.coord(self.nvars, self.names.index(t.val))
            raise ValueError(f"unknown symbol {t.val!r}")
        raise ValueError(f"unexpected token {t.kind!r}")


def _integer_linear(e: ScalarExpr, nvars):
    """Extract integer frequency vector from a linear polynomial argument."""
    if not (e.den.is_const() and e.den.const_value() == QQI_ONE):
        raise ValueError("trig argument must be an integer-linear combination of coordinates")
    freq = [0] * nvars
    for (mono, fr), c in e.num.terms.items():
        if any(fr) or sum(mono) != 1:
            raise ValueError("trig argument must be an integer-linear combination of coordinates")
        j = mono.index(1)
        if not (c.is_real() and c.re.denominator == 1):
            raise ValueError("trig argument coefficients must be integers")
        freq[j] = int(c.re)
    return tuple(freq)


def parse_scalar(text: str, names) -> ScalarExpr:
    """Parse the scene expression grammar into a canonical scalar."""
    return _Parser(text, names).parse()
