"""Shared strategies and an independent sympy oracle for the test-suite."""
from __future__ import annotations

import random
from fractions import Fraction

import sympy as sp
from hypothesis import strategies as st

from leviflat.algebra.numbers import GaussianRational
from leviflat.algebra.poly import ConjPolynomial

I = sp.I


def symbols(n: int):
    zs = sp.symbols(f"z1:{n + 1}")
    ws = sp.symbols(f"w1:{n + 1}")
    return list(zs), list(ws)


def to_sympy(P: ConjPolynomial):
    """Polynomial in z_i and w_i (w standing for conj z or the complexified variable)."""
    zs, ws = symbols(P.nvars)
    gens = zs + ws
    expr = sp.Integer(0)
    for md, c in P.items():
        coef = sp.Rational(int(c.re.numerator), int(c.re.denominator)) + I * sp.Rational(
            int(c.im.numerator), int(c.im.denominator)
        )
        term = coef
        for g, e in zip(gens, md.mu + md.nu):
            term *= g**e
        expr += term
    return sp.expand(expr)


def from_sympy(expr, n: int, kind: str = "zbar") -> ConjPolynomial:
    zs, ws = symbols(n)
    poly = sp.Poly(sp.expand(expr), *(zs + ws))
    terms = {}
    for exps, c in poly.terms():
        re, im = sp.re(c), sp.im(c)
        terms[(tuple(exps[:n]), tuple(exps[n:]))] = GaussianRational(
            Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q))
        )
    return ConjPolynomial(n, terms, kind=kind)


def truncate_sympy(expr, n: int, degree: int):
    zs, ws = symbols(n)
    poly = sp.Poly(sp.expand(expr), *(zs + ws))
    out = sp.Integer(0)
    for exps, c in poly.terms():
        if sum(exps) <= degree:
            term = c
            for g, e in zip(zs + ws, exps):
                term *= g**e
            out += term
    return sp.expand(out)


# -- hypothesis strategies --------------------------------------------------------

small_rationals = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))
gaussians = st.builds(GaussianRational, small_rationals, small_rationals)


@st.composite
def polynomials(draw, nvars: int = 2, max_degree: int = 3, max_terms: int = 5, holomorphic: bool = False,
                min_degree: int = 0, degree=None, kind: str = "zbar"):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        d = draw(st.integers(min_degree, max_degree))
        exps = [0] * (2 * nvars)
        slots = nvars if holomorphic else 2 * nvars
        for _ in range(d):
            exps[draw(st.integers(0, slots - 1))] += 1
        terms[(tuple(exps[:nvars]), tuple(exps[nvars:]))] = draw(gaussians)
    return ConjPolynomial(nvars, terms, degree, kind)


# -- seeded generators (fixed instance counts for the acceptance suite) ------------------


def random_gaussian(rng: random.Random, bound: int = 3) -> GaussianRational:
    return GaussianRational(Fraction(rng.randint(-bound, bound), rng.randint(1, 3)),
                            Fraction(rng.randint(-bound, bound), rng.randint(1, 3)))


def random_polynomial(rng: random.Random, nvars: int, max_degree: int, terms: int, holomorphic=False,
                      min_degree: int = 0, degree=None, kind="zbar") -> ConjPolynomial:
    out = {}
    slots = nvars if holomorphic else 2 * nvars
    for _ in range(terms):
        exps = [0] * (2 * nvars)
        for _ in range(rng.randint(min_degree, max_degree)):
            exps[rng.randrange(slots)] += 1
        out[(tuple(exps[:nvars]), tuple(exps[nvars:]))] = random_gaussian(rng)
    return ConjPolynomial(nvars, out, degree, kind)
