"""Ready-made scenes: every worked example, plus internal test fixtures.

Each constructor returns an ExampleScene holding the chart, the defining
structure, the symplectic-type spinor data, a CLI task list, and notes on
the machine-checkable expectations the test suite enforces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import SceneError
from .forms import Chart, Form
from .genalg import GenVec, PolyVec, genvec_wedge, interior
from .gkpair import GKPair
from .scalars import QQi, ScalarExpr
from .spinor import (BetaDeformGCS, ComplexVolumeGCS, GCStruct, GenericGCS,
                     SymplecticGCS)


@dataclass
class ExampleScene:
    name: str
    chart: Chart
    j1: GCStruct
    b: Form
    omega: Form
    tasks: list = field(default_factory=list)
    expected: dict = field(default_factory=dict)
    seed: int = 7

    def pair(self) -> GKPair:
        return GKPair(self.j1, self.b, self.omega)


def _chart(n, periodic=False):
    return Chart(n, tuple(f"x{j+1}" for j in range(2 * n)),
                 (bool(periodic),) * (2 * n))


def flat_volume_forms(chart):
    return [chart.form({(2 * k,): 1, (2 * k + 1,): QQi(0, 1)})
            for k in range(chart.n)]


def flat_omega_form(chart):
    return chart.form({(2 * k, 2 * k + 1): 1 for k in range(chart.n)})


def flat_kahler(n: int, periodic=False) -> ExampleScene:
    """Flat Kahler chart: volume-form structure paired with exp(i w0)."""
    if n > 3:
        raise SceneError("flat_kahler supports n <= 3")
    chart = _chart(n, periodic)
    j1 = ComplexVolumeGCS(chart, flat_volume_forms(chart))
    return ExampleScene(
        name=f"flat_kahler_c{n}",
        chart=chart,
        j1=j1,
        b=chart.zero_form(),
        omega=flat_omega_form(chart),
        tasks=[
            {"op": "compatibility", "points": [[0] * 2 * n, [1] * 2 * n]},
            {"op": "integrability", "expect": True},
            {"op": "gric_gr", "expect": {"gric_zero": True, "gr_zero": True}},
            {"op": "type_number", "point": [0] * 2 * n, "expect": n},
        ],
        expected={"rho": "1" if n % 2 == 0 else "-1",
                  "gric": "0", "gr": "0", "type": n},
    )


def fubini_study_omega(chart) -> Form:
    """i ddbar log(1 + |z|^2) on the affine chart, in real coordinates."""
    n = chart.n
    s = chart.one_s()
    for k in range(chart.dim):
        s = s + chart.coord_s(k) * chart.coord_s(k)
    dz = [chart.form({(2 * k,): 1, (2 * k + 1,): QQi(0, 1)}) for k in range(n)]
    z = [chart.coord_s(2 * k) + chart.i_s() * chart.coord_s(2 * k + 1)
         for k in range(n)]
    out = chart.zero_form()
    for j in range(n):
        for k in range(n):
            g = (s if j == k else chart.zero_s()) - z[j].conj() * z[k]
            out = out + dz[j].wedge(dz[k].conj()).scale(g / (s * s) * QQi(0, 1))
    return out


def fubini_study_chart(n: int) -> ExampleScene:
    """Affine chart of complex projective space with its standard metric."""
    if n not in (1, 2):
        raise SceneError("fubini_study_chart supports n in {1, 2}")
    chart = _chart(n)
    j1 = ComplexVolumeGCS(chart, flat_volume_forms(chart))
    return ExampleScene(
        name=f"fubini_study_cp{n}",
        chart=chart,
        j1=j1,
        b=chart.zero_form(),
        omega=fubini_study_omega(chart),
        tasks=[
            {"op": "compatibility", "points": [[0] * 2 * n,
                                               [1] + [0] * (2 * n - 1)]},
            {"op": "gric_gr", "expect": {"einstein": True, "gric_closed": True,
                                         "gr_constant": True}},
        ],
        expected={"einstein": True, "gr_constant": True},
    )


def hyperkahler_forms(chart):
    w_i = chart.form({(0, 1): 1, (2, 3): 1})
    w_j = chart.form({(0, 2): 1, (1, 3): -1})
    w_k = chart.form({(0, 3): 1, (1, 2): 1})
    return w_i, w_j, w_k


def hyperkahler_t4() -> ExampleScene:
    """Flat 4-torus with the quaternionic triple arranged as a type-(0,0) pair."""
    chart = _chart(2, periodic=True)
    w_i, w_j, w_k = hyperkahler_forms(chart)
    B = w_j
    w1 = (w_i + w_k).scale(Fraction(1, 2))
    w2 = (w_i - w_k).scale(Fraction(1, 2))
    j1 = GenericGCS(chart, (B + w1.scale(QQi(0, 1))).exp())
    scene = ExampleScene(
        name="hyperkahler_t4",
        chart=chart,
        j1=j1,
        b=chart.zero_form(),
        omega=w2,
        tasks=[
            {"op": "compatibility", "points": [[0, 0, 0, 0]]},
            {"op": "type00_check", "B": _form_spec(B), "w1": _form_spec(w1),
             "points": [[0, 0, 0, 0]]},
            {"op": "gric_gr", "expect": {"gric_zero": True, "gr_zero": True}},
            {"op": "gr_complex_zero"},
        ],
        expected={"rho": "1", "gric": "0", "gr": "0", "type00": True},
    )
    scene.expected["type00_data"] = (B, w1, w2)
    return scene


def _form_spec(f: Form):
    names = f.chart.coords
    return [{"indices": [k + 1 for k in idx], "coeff": c.to_string(names)}
            for idx, c in sorted(f.terms.items())]


def torus_poisson_deform(base: ExampleScene, fields, moments, lam) -> ExampleScene:
    """Bivector deformation from a torus action preserving the Kahler data.

    fields: commuting real vector fields V_i with i_{V_i} omega = d mu_i and
    omega(V_i, V_j) = 0; lam: antisymmetric rational matrix (upper triangle
    used).  Both the structure and the symplectic-type spinor move.
    """
    chart = base.chart
    m = len(fields)
    beta = PolyVec(chart, 2)
    bshift = chart.zero_form()
    for i in range(m):
        iv = interior(chart, fields[i].v, base.omega)
        dmu = chart.form({(k,): moments[i].partial(k) for k in range(chart.dim)})
        if iv != dmu:
            raise SceneError(f"i_V omega != d mu for field {i}")
        for j in range(i + 1, m):
            pairing = interior(chart, fields[j].v,
                               interior(chart, fields[i].v, base.omega))
            if not pairing.is_zero():
                raise SceneError("omega(V_i, V_j) must vanish")
            lij = Fraction(lam[i][j])
            if lij == 0:
                continue
            beta = beta + genvec_wedge(fields[i], fields[j]).scale(lij)
            dmu_i = chart.form({(k,): moments[i].partial(k)
                                for k in range(chart.dim)})
            dmu_j = chart.form({(k,): moments[j].partial(k)
                                for k in range(chart.dim)})
            bshift = bshift - dmu_i.wedge(dmu_j).scale(lij)
    j1 = BetaDeformGCS(chart, beta, base.j1)
    scene = ExampleScene(
        name=base.name + "_poisson",
        chart=chart,
        j1=j1,
        b=base.b + bshift,
        omega=base.omega,
        tasks=[
            {"op": "compatibility", "points": base.tasks[0]["points"]
             if base.tasks else [[0] * chart.dim]},
            {"op": "integrability", "expect": True},
        ],
        expected=dict(base.expected),
    )
    scene.expected["beta"] = beta
    scene.expected["b_shift"] = bshift
    scene.expected["fields"] = fields
    scene.expected["moments"] = moments
    scene.expected["lam"] = lam
    return scene


def t4_translation_deform(lam=Fraction(1, 2)) -> ExampleScene:
    """Flat 4-torus deformed along commuting translation fields."""
    base = flat_kahler(2, periodic=True)
    chart = base.chart
    v1 = GenVec.vector(chart, [1, 0, 0, 0])
    v2 = GenVec.vector(chart, [0, 0, 1, 0])
    mu1 = chart.coord_s(1)
    mu2 = chart.coord_s(3)
    scene = torus_poisson_deform(base, [v1, v2], [mu1, mu2],
                                 [[0, lam], [-lam, 0]])
    scene.name = "t4_translation_poisson"
    return scene


def rotation_fields(chart):
    out = []
    for k in range(chart.n):
        comps = [chart.zero_s()] * chart.dim
        comps[2 * k] = -chart.coord_s(2 * k + 1)
        comps[2 * k + 1] = chart.coord_s(2 * k)
        out.append(GenVec.vector(chart, comps))
    return out


def cp2_three_lines(lam=Fraction(1, 1)) -> ExampleScene:
    """Projective-plane chart deformed by the torus action vanishing on the
    three coordinate lines; the structure stays Einstein."""
    base = fubini_study_chart(2)
    chart = base.chart
    fields = rotation_fields(chart)
    s = chart.one_s()
    for k in range(chart.dim):
        s = s + chart.coord_s(k) * chart.coord_s(k)
    moments = [-(chart.coord_s(2 * k) ** 2 + chart.coord_s(2 * k + 1) ** 2) / s
               for k in range(2)]
    scene = torus_poisson_deform(base, fields, moments,
                                 [[0, lam], [-lam, 0]])
    scene.name = "cp2_three_lines"
    scene.tasks.append({"op": "type_number", "point": [1, 0, 1, 0], "expect": 0})
    scene.tasks.append({"op": "type_number", "point": [0, 0, 1, 0], "expect": 2})
    scene.tasks.append({"op": "gric_gr", "expect": {"einstein": True}})
    scene.expected["weights"] = (1, 1)
    return scene


# ---------------------------------------------------------------------------
# Internal fixtures (not part of the published catalogue, used by tests)
# ---------------------------------------------------------------------------


def t4_nonintegrable(amp=Fraction(1, 4)) -> ExampleScene:
    """Almost GK pair on the 4-torus whose first structure has N != 0.

    The self-dual triple is perturbed by a periodic function along two
    anti-self-dual directions; the pointwise pair conditions survive while
    d(phi) acquires a Lambda^3 component.
    """
    chart = _chart(2, periodic=True)
    w_i, w_j, w_k = hyperkahler_forms(chart)
    asd1 = chart.form({(0, 1): 1, (2, 3): -1})
    asd2 = chart.form({(0, 2): 1, (1, 3): 1})
    f = ScalarExpr.cos(chart.dim, (1, 0, 0, 0)) * QQi(amp)
    B = w_j + asd1.scale(f)
    w1 = (w_i + w_k).scale(Fraction(1, 2)) + asd2.scale(f)
    w2 = (w_i - w_k).scale(Fraction(1, 2))
    j1 = GenericGCS(chart, (B + w1.scale(QQi(0, 1))).exp())
    return ExampleScene(
        name="t4_nonintegrable",
        chart=chart,
        j1=j1,
        b=chart.zero_form(),
        omega=w2,
        tasks=[{"op": "compatibility", "points": [[0, 0, 0, 0]]},
               {"op": "integrability", "expect": False}],
        expected={"n_nonzero": True, "type00_data": (B, w1, w2)},
    )


def type00_perturbed() -> ExampleScene:
    """Type-(0,0) pair with nonconstant volume ratio (nonzero curvature)."""
    chart = _chart(2)
    dz1 = chart.form({(0,): 1, (1,): QQi(0, 1)})
    dz2 = chart.form({(2,): 1, (3,): QQi(0, 1)})
    z1 = chart.sc("x1 + i*x2")
    wplus = dz1.wedge(dz2) + dz1.wedge(dz2.conj()).scale(z1)
    wminus = dz1.wedge(dz2) + dz1.conj().wedge(dz2).scale(z1.conj())
    B = (wplus + wplus.conj()).scale(Fraction(1, 2))
    im_plus = (wplus - wplus.conj()).scale(QQi(0, Fraction(-1, 2)))
    im_minus = (wminus - wminus.conj()).scale(QQi(0, Fraction(-1, 2)))
    w1 = (im_plus + im_minus).scale(Fraction(1, 2))
    w2 = (im_minus - im_plus).scale(Fraction(1, 2))
    j1 = GenericGCS(chart, (B + w1.scale(QQi(0, 1))).exp())
    return ExampleScene(
        name="type00_perturbed",
        chart=chart,
        j1=j1,
        b=chart.zero_form(),
        omega=w2,
        tasks=[{"op": "gric_gr", "expect": {"gric_closed": True}}],
        expected={"type00_data": (B, w1, w2), "gric_nonzero": True},
    )


def generalized_cy() -> ExampleScene:
    """Pair with equal spinor volumes: the complex invariant vanishes."""
    scene = hyperkahler_t4()
    scene.name = "generalized_cy_t4"
    scene.tasks = [{"op": "gr_complex_zero"}]
    scene.expected = {"rho": "1", "gr_complex": "0"}
    return scene


CATALOG = {
    "flat_kahler_c1": lambda: flat_kahler(1),
    "flat_kahler_c2": lambda: flat_kahler(2),
    "fubini_study_cp1": lambda: fubini_study_chart(1),
    "fubini_study_cp2": lambda: fubini_study_chart(2),
    "hyperkahler_t4": hyperkahler_t4,
    "t4_translation_poisson": t4_translation_deform,
    "cp2_three_lines": cp2_three_lines,
    "t4_nonintegrable": t4_nonintegrable,
    "type00_perturbed": type00_perturbed,
    "generalized_cy_t4": generalized_cy,
}
