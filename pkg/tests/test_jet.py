from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import polynomials
from leviflat.algebra.jet import JetMap, compose, determinant, kernel_basis, matrix_inverse, matrix_rank
from leviflat.algebra.numbers import GaussianRational
from leviflat.algebra.poly import ConjPolynomial

N = 6
z = ConjPolynomial.z


def binomial_half(k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= (Fraction(1, 2) - j) / (j + 1)
    return out


def test_inverse_of_square_map_is_binomial_series():
    # y -> (1+y)^2 - 1 has inverse x -> sqrt(1+x) - 1
    y = z(1, 1, 10)
    inv = JetMap([2 * y + y * y], 10).inverse()
    for k in range(1, 11):
        assert inv[0].coefficient((k,)) == binomial_half(k)


def test_compose_with_binomial_series_gives_identity():
    x = z(1, 1, 10)
    root = ConjPolynomial(1, {((k,), (0,)): binomial_half(k) for k in range(1, 11)}, 10)
    f = 2 * x + x * x
    assert compose(f, JetMap([root], 10)) == x


def test_compose_conjugates_antiholomorphic_slots():
    phi = JetMap([z(1, 1, 4) + GaussianRational(0, 1) * z(1, 1, 4) ** 2], 4)
    P = z(1, 1) * ConjPolynomial.zbar(1, 1)
    got = compose(P, phi)
    assert got.coefficient((2,), (1,)) == GaussianRational(0, 1)
    assert got.coefficient((1,), (2,)) == GaussianRational(0, -1)
    assert got.is_real()


def test_block_shape():
    n = 3
    ok = JetMap([z(n, 1) + z(n, 3), z(n, 2), z(n, 3) + z(n, 1) ** 2], 4)
    assert ok.has_block_shape(2)
    bad = JetMap([z(n, 1), z(n, 2), z(n, 3) + z(n, 1)], 4)
    assert not bad.has_block_shape(2)


def test_singular_linear_part_rejected():
    with pytest.raises(ValueError):
        JetMap([z(2, 1), z(2, 1)], 3)


def test_matrix_helpers():
    M = [[1, 2], [2, 4]]
    assert matrix_rank(M) == 1
    (v,) = kernel_basis(M)
    assert v[0] + 2 * v[1] == 0
    A = [[GaussianRational(0, 1), 1], [1, 1]]
    Ainv = matrix_inverse(A)
    assert determinant(A) == GaussianRational(-1, 1)
    assert [[sum((A[i][k] * Ainv[k][j] for k in range(2)), GaussianRational(0)) for j in range(2)]
            for i in range(2)] == [[1, 0], [0, 1]]


@st.composite
def jet_maps(draw, n=2):
    comps = []
    for i in range(n):
        nonlin = draw(polynomials(nvars=n, max_degree=3, min_degree=2, max_terms=3, holomorphic=True))
        comps.append(z(n, i + 1, N) + nonlin.with_degree(N))
    return JetMap(comps, N)


@settings(max_examples=200)
@given(polynomials(nvars=2, max_degree=3, degree=N), jet_maps(), jet_maps())
def test_composition_is_associative(f, phi, psi):
    assert compose(compose(f, phi), psi) == compose(f, phi.compose(psi))


@settings(max_examples=50)
@given(jet_maps())
def test_inverse_composes_to_identity(phi):
    assert phi.compose(phi.inverse()) == JetMap.identity(2, N)
    assert phi.inverse().compose(phi) == JetMap.identity(2, N)
