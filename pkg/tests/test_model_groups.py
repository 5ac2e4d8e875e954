import math
import random
from fractions import Fraction

import pytest

from surfdist.exact_algebra import GoldenInt, HeisElt, Mat2, ProjMat2, QuadInt
from surfdist.model_groups import (
    LAMBDA_PSL,
    PSL_A,
    PSL_B,
    AlphaForm,
    MessElt,
    Psl2Pair,
    calegari_action,
    heis_center_oracle,
    heis_generators,
    heisenberg_certificate,
    mess_certificate,
    mess_generators,
    psl2_certificate,
    psl2_exponent,
    psl2_generators,
    psl2_product_embedding,
    trace_power,
    trace_power_matrix,
)
from surfdist.word_metrics import Word, cayley_ball, eval_word, verify_certificate

A_TOK, T_TOK = (0, 1), (1, 1)


def _rand_mess(rng):
    return MessElt(rng.randint(-4, 4), GoldenInt(rng.randint(-9, 9), rng.randint(-9, 9)))


def test_mess_group_law():
    rng = random.Random(3)
    ident = MessElt(0, GoldenInt(0))
    for _ in range(200):
        a, b, c = _rand_mess(rng), _rand_mess(rng), _rand_mess(rng)
        assert (a * b) * c == a * (b * c)
        assert a * a.inverse() == ident == a.inverse() * a


def test_mess_generators_examples():
    oracle = mess_generators()
    A = Word(((0, 1),))
    T = Word(((1, 1),))
    assert eval_word(oracle, A + T + A.inverse()) == MessElt(0, GoldenInt(1, 1))  # phi^2
    assert eval_word(oracle, A + A.inverse()) == oracle.identity
    assert eval_word(oracle, Word.power(1, 6)) == MessElt(0, GoldenInt(6))


def test_mess_model_matches_torus_maps():
    """Evaluate words both in the exact model and as affine maps x -> A^k x + t w in floats."""
    phi = (1 + math.sqrt(5)) / 2
    w = (1.0, phi - 1.0)
    A = ((2.0, 1.0), (1.0, 1.0))
    Ainv = ((1.0, -1.0), (-1.0, 2.0))
    rng = random.Random(5)
    oracle = mess_generators()
    for _ in range(30):
        word = Word(tuple((rng.randrange(2), rng.choice((1, -1))) for _ in range(rng.randrange(1, 8))))
        x = (0.3, 0.7)
        # apply rightmost letter first
        for g, s in reversed(word.tokens):
            if g == 0:
                M = A if s == 1 else Ainv
                x = (M[0][0] * x[0] + M[0][1] * x[1], M[1][0] * x[0] + M[1][1] * x[1])
            else:
                x = (x[0] + s * w[0], x[1] + s * w[1])
        e = eval_word(oracle, word)
        Mk = Mat2(2, 1, 1, 1).power(e.k)
        tv = e.translation_vector()
        expect = (Mk.m11 * 0.3 + Mk.m12 * 0.7 + tv[0], Mk.m21 * 0.3 + Mk.m22 * 0.7 + tv[1])
        assert x == pytest.approx(expect, abs=1e-9)


def test_mess_faithfulness_distinct_translations():
    """t w is never in Z^2 for nonzero t in a box, so distinct keys are distinct torus maps."""
    phi = (1 + math.sqrt(5)) / 2
    for a in range(-30, 31):
        for b in range(-30, 31):
            if (a, b) == (0, 0):
                continue
            t = a + b * phi
            v = (t, t * (phi - 1))
            assert not (abs(v[0] - round(v[0])) < 1e-9 and abs(v[1] - round(v[1])) < 1e-9)


@pytest.mark.parametrize("n,expected", [(0, 2), (1, 3), (2, 7), (3, 18), (6, 322)])
def test_trace_power(n, expected):
    assert trace_power(n) == expected == trace_power_matrix(n)


def test_trace_power_matches_matrix_to_50():
    for n in range(51):
        assert trace_power(n) == trace_power_matrix(n)


@pytest.mark.parametrize("n,tokens,power", [(1, 6, 3), (2, 10, 7), (3, 14, 18)])
def test_mess_certificate(n, tokens, power):
    c = mess_certificate(n)
    assert c.tokens == tokens == 4 * n + 2
    assert c.power == power
    assert c.target == MessElt(0, GoldenInt(power))
    assert verify_certificate(mess_generators(), c)


def test_mess_certificate_target_is_lambda_sum():
    for n in range(1, 20):
        lam = GoldenInt(1, 1)
        assert lam ** n + lam ** -n == GoldenInt(trace_power(n))


@pytest.mark.parametrize("n", [1, 7])
def test_heisenberg_certificate(n):
    c = heisenberg_certificate(n)
    assert c.tokens == 4 * n
    assert eval_word(heis_generators(), c.word) == HeisElt(0, 0, n * n)
    assert verify_certificate(heis_generators(), c)


def test_center_undistorted_in_cyclic_subgroup():
    ball = cayley_ball(heis_center_oracle(), 12)
    for n in range(-12, 13):
        assert ball.table[(0, 0, n)] == abs(n)


@pytest.mark.parametrize("n,m", [(1, 6), (2, 34), (3, 198)])
def test_psl2_certificate(n, m):
    c = psl2_certificate(n)
    assert c.power == m
    assert c.tokens == 4 * n + 2
    assert verify_certificate(psl2_generators(), c)


def test_psl2_exponent_is_trace_of_diagonal_power():
    for n in range(1, 11):
        D = Mat2(LAMBDA_PSL, QuadInt(0), QuadInt(0), LAMBDA_PSL.inverse())
        tr = D.power(2 * n).trace()
        assert tr.b == 0
        assert tr.a == psl2_exponent(n)


def test_psl2_conjugation_identities():
    """A^-n B A^n and A^n B A^-n are the unipotents with entries lam^2n and lam^-2n."""
    for n in range(1, 5):
        left = PSL_A.power(-n) @ PSL_B @ PSL_A.power(n)
        right = PSL_A.power(n) @ PSL_B @ PSL_A.power(-n)
        assert left == Mat2(QuadInt(1), LAMBDA_PSL ** (2 * n), QuadInt(0), QuadInt(1))
        assert right == Mat2(QuadInt(1), LAMBDA_PSL ** (-2 * n), QuadInt(0), QuadInt(1))


def test_psl2_product_embedding():
    A, B = ProjMat2.of(PSL_A), ProjMat2.of(PSL_B)
    pb = psl2_product_embedding(B)
    assert pb == Psl2Pair(B, B)
    ident = ProjMat2.of(Mat2.identity(QuadInt(1)))
    assert psl2_product_embedding(A) @ psl2_product_embedding(A.inverse()) == Psl2Pair(ident, ident)
    assert psl2_product_embedding(A @ B) == psl2_product_embedding(A) @ psl2_product_embedding(B)
    # A conjugates to its inverse up to sign
    assert psl2_product_embedding(A).gbar == A.inverse()


def test_psl2_embedding_homomorphism_on_random_words():
    oracle = psl2_generators()
    rng = random.Random(11)
    for _ in range(40):
        w1 = Word(tuple((rng.randrange(2), rng.choice((1, -1))) for _ in range(rng.randrange(1, 6))))
        w2 = Word(tuple((rng.randrange(2), rng.choice((1, -1))) for _ in range(rng.randrange(1, 6))))
        g, h = eval_word(oracle, w1), eval_word(oracle, w2)
        assert psl2_product_embedding(g @ h) == psl2_product_embedding(g) @ psl2_product_embedding(h)


def test_calegari_action():
    act = calegari_action(math.sqrt(2))
    assert act.commutator_is_F()
    assert act.quotient_compatible()
    assert act.F(0, 0) == (AlphaForm(Fraction(1)), AlphaForm())
    # G commutes with (x + alpha, y)
    g_shift = act.G(Fraction(3, 7), Fraction(2, 5))
    assert g_shift[0].c0 == Fraction(3, 7) + Fraction(2, 5)
    rho = act.fiber_rotation_number(10_000)
    assert abs(rho - (1 / math.sqrt(2)) % 1) < 2 / 10_000


def test_calegari_quotient_check_detects_failure():
    act = calegari_action(math.sqrt(2))
    from surfdist.model_groups import AffineMap, PlaneAction

    bad = AffineMap.make(((1, 0), (1, 1)), (0, 0))  # (x, y + x) does not commute with x-shifts
    assert not PlaneAction(bad, act.H, act.F, act.alpha).quotient_compatible()
