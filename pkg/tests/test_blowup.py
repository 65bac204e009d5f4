from __future__ import annotations

import random

import pytest
import sympy as sp
from hypothesis import given, settings

from helpers import polynomials, symbols, to_sympy
from leviflat.algebra.numbers import GaussianRational
from leviflat.algebra.poly import ConjPolynomial
from leviflat.blowup import (
    BlowupChart,
    BlowupError,
    beta_decomposition,
    beta_tilde,
    blowup_analysis,
    chart_pullback,
    exceptional_singularities,
    holonomy_linear_part,
    linear_residue,
    strict_transform,
)
from leviflat.forms import PolyForm, partial_split, pullback
from leviflat.levi import complexify, standard_quadric

QUADRIC = complexify(standard_quadric(4, 2))
QUARTIC = complexify(standard_quadric(4, 2) + ConjPolynomial.z(4, 1) * ConjPolynomial.zbar(4, 1)
                     * ConjPolynomial.z(4, 2) * ConjPolynomial.zbar(4, 2))


def slot(n, s):
    return ConjPolynomial.slot(n, s, kind="w")


def test_chart_map_and_names():
    chart = BlowupChart(1, 4)
    assert chart.names() == ["u", "t2", "t3", "t4", "s1", "s2", "s3", "s4"]
    assert chart.formula()[:2] == ["z1 = u", "z2 = u*t2"]
    assert chart.formula()[4:6] == ["w1 = u*s1", "w2 = u*s2"]
    with pytest.raises(BlowupError):
        BlowupChart(5, 4)


@settings(max_examples=60)
@given(polynomials(nvars=2, max_degree=3, kind="w"), polynomials(nvars=2, max_degree=3, kind="w"))
def test_pullback_is_a_ring_homomorphism(P, Q):
    chart = BlowupChart(3, 2)
    assert chart_pullback(P * Q, chart) == chart_pullback(P, chart) * chart_pullback(Q, chart)
    assert chart_pullback(P + Q, chart) == chart_pullback(P, chart) + chart_pullback(Q, chart)


def test_pullback_agrees_with_sympy_substitution():
    rng = random.Random(5)
    from helpers import random_polynomial

    P = random_polynomial(rng, 3, 4, 6, kind="w")
    chart = BlowupChart(2, 3)
    zs, ws = symbols(3)
    u = zs[1]
    subs = {zs[0]: u * zs[0], ws[0]: u * ws[0], ws[1]: u * ws[1]}
    expected = sp.expand(to_sympy(P).subs(subs, simultaneous=True))
    assert sp.expand(to_sympy(chart_pullback(P, chart)) - expected) == 0


@pytest.mark.parametrize("index", [1, 2, 3, 4])
def test_strict_transform_factorization(index):
    chart = BlowupChart(index, 4)
    st = strict_transform(QUARTIC, chart)
    assert st.multiplicity == 2
    u = chart.u()
    assert (u ** 2) * st.raw == chart_pullback(QUARTIC, chart)
    assert st.transform.constant_term() == 1


def test_quadric_strict_transform_and_beta():
    chart = BlowupChart(1, 4)
    st = strict_transform(QUADRIC, chart)
    names = chart.names()
    assert st.multiplicity == 2
    assert st.transform.format(names) == "t2^2 + s1^2 + s2^2 + 1"
    assert st.H1 == 0
    beta = beta_tilde(QUADRIC, chart)
    u, s1, s2 = slot(4, 0), slot(4, 4), slot(4, 5)
    expected = PolyForm(4, 1, {(0,): s1 ** 2 + s2 ** 2, (4,): u * s1, (5,): u * s2}, "w")
    assert beta == expected
    assert beta.format(names) == "(s1^2 + s2^2)*du + (u*s1)*ds1 + (u*s2)*ds2"


def test_quartic_transform_restricts_to_quadric_model_on_the_divisor():
    chart = BlowupChart(1, 4)
    st = strict_transform(QUARTIC, chart)
    names = chart.names()
    assert st.H1.format(names) == "2*u*t2*s1*s2"
    on_E = st.transform.filter_terms(lambda md: md.mu[0] == 0)
    assert on_E == strict_transform(QUADRIC, chart).transform


def test_theta_relation():
    chart = BlowupChart(1, 4)
    dec = beta_decomposition(QUARTIC, chart)
    u = chart.u()
    assert dec.beta == dec.beta0 + dec.theta.map_coefficients(lambda c: u * c)
    # theta~ is the pullback of the higher-order part of sum dF/dw_j dw_j, divided by u^2
    _, beta_full = partial_split(QUARTIC)
    _, beta_quad = partial_split(QUADRIC)
    pulled = pullback(beta_full - beta_quad, chart.images())
    assert pulled == dec.theta.map_coefficients(lambda c: u * u * c)


def test_quadric_has_four_exceptional_components():
    chart = BlowupChart(1, 4)
    comps = exceptional_singularities(chart, QUADRIC)
    eqs = [tuple(c.equations) for c in comps]
    assert eqs == [
        ("u = 0", "s1 + i*s2 = 0", "t2 - i = 0"),
        ("u = 0", "s1 - i*s2 = 0", "t2 - i = 0"),
        ("u = 0", "s1 + i*s2 = 0", "t2 + i = 0"),
        ("u = 0", "s1 - i*s2 = 0", "t2 + i = 0"),
    ]
    # each component lies in the zero set of the strict transform and of beta~
    st = strict_transform(QUADRIC, chart).transform
    beta = beta_tilde(QUADRIC, chart)
    s2 = GaussianRational(3, 1)
    for c in comps:
        t = c.root
        s1 = -c.factor.coefficient((0, 0, 0, 0), (0, 1, 0, 0)) * s2
        point = [GaussianRational(0), t, GaussianRational(0), GaussianRational(0),
                 s1, s2, GaussianRational(0), GaussianRational(0)]
        assert st.evaluate_slots(point) == 0
        assert all(coef.evaluate_slots(point) == 0 for coef in beta.terms.values())


def test_model_form_residue():
    n = 2
    u, v = slot(n, 0), slot(n, 1)
    form = PolyForm(n, 1, {(0,): v, (1,): u}, "w")
    lam, _, _ = linear_residue(form, 0, 1)
    assert lam == -1
    form = PolyForm(n, 1, {(0,): v.scale(2), (1,): u}, "w")
    assert linear_residue(form, 0, 1)[0] == GaussianRational(-1, 0) / 2


@pytest.mark.parametrize("chart_index", [1, 2])
def test_quadric_holonomy(chart_index):
    res = blowup_analysis(QUADRIC, chart_index)
    assert len(res.holonomy) == 4
    for h in res.holonomy:
        assert h.residue == GaussianRational(-1) / 2
        assert h.multiplier_value == -1 and h.order == 2
        assert h.reference_mismatch
        frag = h.to_fragment()
        assert frag["nontrivial_root_of_unity"] and frag["reference_multiplier"] == "exp(-2*pi*i)"


def test_multipliers_are_scale_invariant():
    chart = BlowupChart(1, 4)
    base = [h.residue for h in blowup_analysis(QUADRIC).holonomy]
    scaled = QUADRIC.scale(GaussianRational(3, 2))
    beta = beta_tilde(scaled, chart)
    comps = exceptional_singularities(chart, scaled)
    assert [holonomy_linear_part(c, beta).residue for c in comps] == base


def test_quartic_holonomy_matches_quadric():
    res = blowup_analysis(QUARTIC, 1)
    assert [h.residue for h in res.holonomy] == [GaussianRational(-1) / 2] * 4


def test_components_come_in_conjugate_pairs():
    comps = exceptional_singularities(BlowupChart(1, 4), QUADRIC)
    roots = [c.root for c in comps]
    assert sorted(roots, key=str) == sorted((r.conj() for r in roots), key=str)


def test_w_slot_charts_are_rejected_for_components():
    with pytest.raises(BlowupError):
        exceptional_singularities(BlowupChart(3, 4), QUADRIC)
