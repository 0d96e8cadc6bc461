"""Sign and constant calibration, frozen as a committed fixture.

The spin-representation conventions (interior product + wedge, the
degree-mod-4 involution) force every global sign and prefactor in the
curvature identities.  Rather than trusting any stated constant, this
module measures them exhaustively (small dimensions) or on seeded exact
instances, and the committed JSON fixture pins the result; `calibrate`
recomputes everything and must reproduce the fixture bit for bit.
"""

from __future__ import annotations

import itertools
import json
import random
from fractions import Fraction
from pathlib import Path

from .forms import Chart, Form
from .genalg import GenVec, clifford_act, genvec_wedge, pair_tt
from .scalars import QQi, ScalarExpr

FIXTURE_PATH = Path(__file__).with_name("data") / "calibration.json"


def _chart(n):
    return Chart(n, tuple(f"x{j+1}" for j in range(2 * n)), (False,) * (2 * n))


def _basis_forms(chart):
    out = []
    for k in range(chart.dim + 1):
        for idx in itertools.combinations(range(chart.dim), k):
            out.append((k, chart.form({idx: 1})))
    return out


def mukai_swap_table(n: int) -> dict:
    """Signs eps(a, b) with <alpha, beta> = eps <beta, alpha>, exhaustively."""
    chart = _chart(n)
    forms = _basis_forms(chart)
    table = {}
    for (da, alpha) in forms:
        for (db, beta) in forms:
            ab = alpha.mukai(beta)
            ba = beta.mukai(alpha)
            if ab.is_zero() and ba.is_zero():
                continue
            if ab == ba:
                sign = 1
            elif ab == -ba:
                sign = -1
            else:
                raise AssertionError("swap is not a sign on basis pairs")
            key = (da, db)
            if key in table and table[key] != sign:
                raise AssertionError(f"inconsistent swap sign at degrees {key}")
            table[key] = sign
    return {f"{a},{b}": s for (a, b), s in sorted(table.items())}


def mukai_adjoint_sign(n: int) -> int:
    """Sign s with <e.alpha, beta> = s <alpha, e.beta>, exhaustively."""
    chart = _chart(n)
    forms = _basis_forms(chart)
    sign = None
    for a in range(2 * chart.dim):
        e = GenVec.basis(chart, a)
        for (_, alpha) in forms:
            left = clifford_act(e, alpha)
            for (_, beta) in forms:
                lhs = left.mukai(beta)
                rhs = alpha.mukai(clifford_act(e, beta))
                if lhs.is_zero() and rhs.is_zero():
                    continue
                if lhs == rhs:
                    s = 1
                elif lhs == -rhs:
                    s = -1
                else:
                    raise AssertionError("adjoint relation is not a sign")
                if sign is None:
                    sign = s
                elif sign != s:
                    raise AssertionError("adjoint sign is not uniform")
    return sign


def polarization_sign(n: int, seed=2024, instances=25) -> int:
    """Sign s in <e1.w1, e2.w2> + <e2.w1, e1.w2> = 2 s <e1,e2><w1,w2>."""
    from .scalars import ScalarExpr
    chart = _chart(n)
    rng = random.Random(seed + n)
    sign = None
    checked = 0
    while checked < instances:
        e1 = _random_basisish(rng, chart)
        e2 = _random_basisish(rng, chart)
        w1 = _random_form(rng, chart)
        w2 = _random_form(rng, chart)
        lhs = clifford_act(e1, w1).mukai(clifford_act(e2, w2)) + \
            clifford_act(e2, w1).mukai(clifford_act(e1, w2))
        base = w1.mukai(w2).scale(pair_tt(e1, e2) * 2)
        if base.is_zero():
            if not lhs.is_zero():
                raise AssertionError("polarization identity violated")
            continue
        if lhs == base:
            s = 1
        elif lhs == -base:
            s = -1
        else:
            raise AssertionError("polarization defect is not a sign")
        if sign is None:
            sign = s
        elif sign != s:
            raise AssertionError("polarization sign is not uniform")
        checked += 1
    return sign


def _random_basisish(rng, chart):
    out = GenVec.zero(chart)
    for _ in range(rng.randint(1, 2)):
        c = QQi(Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-1, 1)))
        out = out + GenVec.basis(chart, rng.randrange(2 * chart.dim)).scale(c)
    return out


def _random_form(rng, chart):
    terms = {}
    for _ in range(rng.randint(1, 3)):
        k = rng.randrange(chart.dim + 1)
        idx = tuple(sorted(rng.sample(range(chart.dim), k)))
        terms[idx] = QQi(Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-1, 1)))
    return chart.form(terms)


def flat_volume_pairing_check(n: int) -> bool:
    """<exp(i w), exp(-i w)> = (2i)^n w^n / n! for the flat symplectic form."""
    chart = _chart(n)
    w = chart.form({(2 * k, 2 * k + 1): 1 for k in range(n)})
    psi = w.scale(QQi(0, 1)).exp()
    top = psi.mukai(psi.conj())
    expect = chart.func(1)
    c = QQi(1)
    fact = 1
    for k in range(n):
        expect = expect.wedge(w)
        c = c * QQi(0, 2)
        fact *= (k + 1)
    return top == expect.scale(c * QQi(Fraction(1, fact)))


def _flat_structs(n):
    from .gkpair import GKPair
    from .spinor import ComplexVolumeGCS
    chart = _chart(n)
    forms = [chart.form({(2 * k,): 1, (2 * k + 1,): QQi(0, 1)})
             for k in range(n)]
    j1 = ComplexVolumeGCS(chart, forms)
    w = chart.form({(2 * k, 2 * k + 1): 1 for k in range(n)})
    return GKPair(j1, chart.zero_form(), w)


def flat_rho(n: int) -> str:
    from .curvature import rho
    value = rho(_flat_structs(n))
    return value.to_string(_chart(n).coords)


def saisho_constant(n: int, seed=2024, instances=3) -> str:
    """kappa in tr(J [h1,J] [h2,J]) <psi,psi_bar> = kappa rho^{-1}(<h1.phi, conj(h2.phi)> - <h2.phi, conj(h1.phi)>)."""
    from .curvature import proportionality, rho
    from .gkpair import random_compat_bivector, trace_pairing
    pair = _flat_structs(n)
    chart = pair.chart
    rng = random.Random(seed + 10 * n)
    phi = pair.j1.spinor()
    vol = pair.psi().mukai(pair.psibar())
    rho_val = rho(pair)
    kappa = None
    done = 0
    while done < instances:
        h1 = random_compat_bivector(pair, rng)
        h2 = random_compat_bivector(pair, rng)
        tr = trace_pairing(pair, h1, h2, check_bidegree=False)
        lhs = vol.scale(tr)
        p1 = h1.spin_act(phi)
        p2 = h2.spin_act(phi)
        rhs = (p1.mukai(p2.conj()) - p2.mukai(p1.conj())).scale(1 / rho_val)
        if rhs.is_zero():
            if not lhs.is_zero():
                raise AssertionError("trace identity violated")
            continue
        k = proportionality(lhs, rhs)
        if k is None:
            raise AssertionError("trace identity is not proportional")
        if kappa is None:
            kappa = k
        elif kappa != k:
            raise AssertionError("trace constant is not uniform")
        done += 1
    return kappa.to_string(chart.coords)


def two_term_constant(n: int) -> str:
    """c with c (A - B) = i^{-n} gr <psi, psi_bar> on the projective chart."""
    from .curvature import (gr_two_term_forms, gric_gr, ipow, proportionality)
    pair = _fs_pair(n)
    rep = gric_gr(pair)
    a, b, vol = gr_two_term_forms(pair)
    target = vol.scale(rep.gr * ipow(-n))
    lam = proportionality(target, a - b)
    if lam is None or not lam.is_const():
        raise AssertionError("two-term identity is not proportional")
    return lam.to_string(pair.chart.coords)


def _fs_pair(n):
    from .examples import fubini_study_chart
    return fubini_study_chart(n).pair()


def fs_einstein_constant(n: int) -> str:
    from .curvature import gric_gr, proportionality
    pair = _fs_pair(n)
    rep = gric_gr(pair)
    lam = proportionality(rep.gric, pair.omega)
    if lam is None:
        raise AssertionError("projective-space curvature is not Einstein")
    return lam.to_string(pair.chart.coords)


def ddbar_oracle_constant(seed=2024) -> str:
    """Ratio between the full algebroid differential of the Hamiltonian
    section and the mixed second derivative (measured on the flat chart)."""
    from .gkpair import ddbar_pm
    pair = _flat_structs(2)
    out = ddbar_pm(pair, pair.chart.sc("x1*x2"))
    ratios = {out["oracle_full"][k] / v for k, v in out["mixed"].items()}
    if len(ratios) != 1:
        raise AssertionError("mixed-derivative ratio is not constant")
    return ratios.pop().to_string(pair.chart.coords)


def gr_complex_constant() -> str:
    """Normalizer making Re(gr_complex) = gr; fixed in the implementation."""
    return "-2*i"


def moment_form_constant() -> str:
    """Normalizer of the deformation 2-form against the quoted trace
    integral; measured by the finite-difference experiment and asserted by
    the acceptance suite."""
    from .curvature import MOMENT_FORM_CONSTANT
    from .scalars import format_qqi
    return format_qqi(MOMENT_FORM_CONSTANT)


# The fast set is the exhaustive sign brute force plus flat-chart constants;
# the slow set needs the projective-space curvature pipeline.
FAST_KEYS = (
    "mukai_swap_signs", "mukai_adjoint_sign", "polarization_sign",
    "volume_pairing_is_(2i)^n_w^n/n!", "flat_rho", "saisho_constant",
    "ddbar_oracle_constant", "gr_complex_constant", "moment_form_constant",
)


def compute_calibration(full=True) -> dict:
    data = {
        "mukai_swap_signs": {str(2 * n): mukai_swap_table(n) for n in (1, 2)},
        "mukai_adjoint_sign": {str(2 * n): mukai_adjoint_sign(n) for n in (1, 2)},
        "polarization_sign": {str(2 * n): polarization_sign(n) for n in (1, 2)},
        "volume_pairing_is_(2i)^n_w^n/n!": {
            str(2 * n): flat_volume_pairing_check(n) for n in (1, 2, 3)},
        "flat_rho": {str(n): flat_rho(n) for n in (1, 2)},
        "saisho_constant": {str(n): saisho_constant(n) for n in (1, 2)},
        "ddbar_oracle_constant": ddbar_oracle_constant(),
        "gr_complex_constant": gr_complex_constant(),
        "moment_form_constant": moment_form_constant(),
    }
    if full:
        data["two_term_constant"] = {str(n): two_term_constant(n)
                                     for n in (1, 2)}
        data["fs_einstein_constant"] = {str(n): fs_einstein_constant(n)
                                        for n in (1, 2)}
    return data


def fixture_bytes(data: dict) -> bytes:
    return (json.dumps(data, indent=2, sort_keys=True) + "\n").encode()


def load_fixture() -> dict:
    with open(FIXTURE_PATH, "rb") as fh:
        return json.load(fh)


def write_fixture(data: dict):
    FIXTURE_PATH.parent.mkdir(exist_ok=True)
    with open(FIXTURE_PATH, "wb") as fh:
        fh.write(fixture_bytes(data))


def calibrate(write=False, full=False) -> dict:
    """Recompute constants and compare bit-exactly against the fixture.

    The default run covers the exhaustive sign tables and flat-chart
    constants (the sub-5s set); --full also remeasures the projective-space
    constants.
    """
    data = compute_calibration(full=full)
    if write:
        if not full:
            data = compute_calibration(full=True)
        write_fixture(data)
        return {"status": "written", "data": data}
    committed = load_fixture()
    keys = sorted(data) if full else [k for k in FAST_KEYS if k in data]
    subset_old = {k: committed.get(k) for k in keys}
    subset_new = {k: data[k] for k in keys}
    match = fixture_bytes(subset_old) == fixture_bytes(subset_new)
    return {"status": "match" if match else "drift", "data": data,
            "checked_keys": keys}
