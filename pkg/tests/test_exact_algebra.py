import math

import pytest
from hypothesis import given, strategies as st

from surfdist.exact_algebra import (
    GoldenInt,
    HeisElt,
    Mat2,
    NotUnimodular,
    ProjMat2,
    QuadInt,
    golden_mul,
    heis_inv,
    heis_mul,
    mat2_inv,
    proj_canonicalize,
    quad_mul,
)

ints = st.integers(-10**6, 10**6)
quads = st.builds(QuadInt, ints, ints)
goldens = st.builds(GoldenInt, ints, ints)
heis = st.builds(HeisElt, ints, ints, ints)


def test_quad_mul_examples():
    assert quad_mul(QuadInt(3, 2), QuadInt(3, -2)) == QuadInt(1, 0)
    assert quad_mul(QuadInt(1, 0), QuadInt(7, -4)) == QuadInt(7, -4)
    assert quad_mul(QuadInt(1, 1), QuadInt(1, 1)) == QuadInt(3, 2)


def test_golden_mul_examples():
    phi = GoldenInt(0, 1)
    assert golden_mul(phi, phi) == GoldenInt(1, 1)
    phi_inv = GoldenInt(-1, 1)  # phi - 1
    assert phi * phi_inv == GoldenInt(1)
    assert golden_mul(phi * phi, phi_inv * phi_inv) == GoldenInt(1)
    assert golden_mul(GoldenInt(0, 0), GoldenInt(5, -3)) == GoldenInt(0, 0)


def test_big_coefficients_stay_exact():
    lam = QuadInt(1, 1)
    x = lam ** 200
    assert x * lam ** -200 == QuadInt(1)
    assert x.norm() == 1


@given(quads, quads, quads)
def test_quad_ring_axioms(u, v, w):
    assert u * v == v * u
    assert (u * v) * w == u * (v * w)
    assert u * (v + w) == u * v + u * w


@given(quads)
def test_quad_norm_is_rational(u):
    assert (u.conj() * u).b == 0


@given(goldens, goldens, goldens)
def test_golden_ring_axioms(u, v, w):
    assert u * v == v * u
    assert (u * v) * w == u * (v * w)
    assert u * (v + w) == u * v + u * w


@given(goldens)
def test_golden_unit_iff_norm_pm1(u):
    if u.is_unit():
        assert u * u.inverse() == GoldenInt(1)
    else:
        with pytest.raises(ZeroDivisionError):
            u.inverse()
    assert abs(u.a * u.a + u.a * u.b - u.b * u.b) == abs(u.norm())


def test_golden_embedding_injective_on_box():
    values = {}
    for a in range(-40, 41):
        for b in range(-40, 41):
            v = float(GoldenInt(a, b))
            assert round(v, 9) not in values
            values[round(v, 9)] = (a, b)


@given(st.integers(-10**9, 10**9), st.integers(-10**9, 10**9))
def test_quad_sign_matches_float_away_from_zero(a, b):
    x = QuadInt(a, b)
    f = a + b * math.sqrt(2)
    if abs(f) > 1e-3 * (abs(a) + abs(b) + 1):
        assert x.sign() == (1 if f > 0 else -1)
    assert (-x).sign() == -x.sign()


def test_mat2_examples():
    A = Mat2(2, 1, 1, 1)
    assert A @ A == Mat2(5, 3, 3, 2)
    assert A @ mat2_inv(A) == Mat2.identity()
    B = Mat2(1, 1, 0, 1)
    assert proj_canonicalize(-B) == proj_canonicalize(B) == B
    with pytest.raises(NotUnimodular):
        mat2_inv(Mat2(2, 0, 0, 1))


unimodular = st.sampled_from(
    [Mat2(2, 1, 1, 1), Mat2(1, 1, 0, 1), Mat2(0, -1, 1, 0), Mat2(1, 0, 3, 1), Mat2(0, 1, 1, 0), Mat2(-1, 2, 0, 1)]
)


@given(st.lists(unimodular, min_size=1, max_size=6), st.lists(unimodular, min_size=1, max_size=6))
def test_det_multiplicative(ms, ns):
    M = Mat2.identity()
    for m in ms:
        M = M @ m
    N = Mat2.identity()
    for n in ns:
        N = N @ n
    assert (M @ N).det() == M.det() * N.det()
    assert abs(M.det()) == 1
    assert M @ mat2_inv(M) == Mat2.identity()


@given(quads, quads, quads, quads)
def test_proj_canonical_form_identifies_sign(a, b, c, d):
    M = Mat2(a, b, c, d)
    assert proj_canonicalize(M) == proj_canonicalize(-M)


def test_projmat_over_quadint():
    A = Mat2(QuadInt(-1, 1), QuadInt(0), QuadInt(0), QuadInt(1, 1))
    P = ProjMat2.of(A)
    assert (P @ P.inverse()).mat == Mat2.identity(QuadInt(1))
    assert ProjMat2.of(-A) == P
    with pytest.raises(ValueError):
        ProjMat2(-A)


def test_heis_examples():
    g, h = HeisElt(1, 0, 0), HeisElt(0, 1, 0)
    comm = heis_mul(heis_mul(heis_mul(g, h), heis_inv(g)), heis_inv(h))
    assert comm == HeisElt(0, 0, 1)
    n = 3
    gn, hn = HeisElt(n, 0, 0), HeisElt(0, n, 0)
    assert gn * hn * HeisElt(-n, 0, 0) * HeisElt(0, -n, 0) == HeisElt(0, 0, 9)


@given(heis, heis, heis)
def test_heis_group_laws(u, v, w):
    assert (u * v) * w == u * (v * w)
    assert u * heis_inv(u) == HeisElt(0, 0, 0)
    assert heis_inv(u) * u == HeisElt(0, 0, 0)
    z = HeisElt(0, 0, 1)
    assert z * u == u * z


@given(heis)
def test_heis_center_is_z_axis(u):
    g, h = HeisElt(1, 0, 0), HeisElt(0, 1, 0)
    commutes = u * g == g * u and u * h == h * u
    assert commutes == (u.x == 0 and u.y == 0)
