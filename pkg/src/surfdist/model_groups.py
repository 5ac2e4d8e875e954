"""Exact models of the three example actions and their distortion certificates.

Mess group
    The group generated by A = (2 1; 1 1) and the translation T(x) = x + w on
    the torus, with w = (1, phi - 1) the unstable eigenvector of A.  Since
    A w = lam w with lam = phi^2, every element is x -> A^k x + t w for some
    k in Z, t in Z[phi], and composition reads

        (k1, t1) . (k2, t2) = (k1 + k2, t1 + lam^k1 t2).

    The model is faithful: t w lies in Z^2 only for t = 0, because the second
    coordinate t(phi - 1) is irrational whenever t is a nonzero integer.

Heisenberg group
    Triples (x, y, z) with generators g = (1,0,0), h = (0,1,0); the center is
    generated by f = [g, h] = (0,0,1).

PSL(2, Z[sqrt2])
    Generated by A = diag(sqrt2 - 1, sqrt2 + 1) and B = (1 1; 0 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple

from .exact_algebra import (
    HEIS_IDENTITY,
    GoldenInt,
    HeisElt,
    Mat2,
    ProjMat2,
    QuadInt,
    heis_inv,
    heis_mul,
)
from .word_metrics import Certificate, GroupOracle, Word, commutator

LAMBDA_MESS = GoldenInt(1, 1)  # phi^2
LAMBDA_MESS_INV = GoldenInt(2, -1)  # phi^-2
LAMBDA_PSL = QuadInt(1, 1)  # 1 + sqrt2
MESS_A = Mat2(2, 1, 1, 1)


class NonIntegerExponent(ArithmeticError):
    pass


# ---------------------------------------------------------------- Mess group


@lru_cache(maxsize=None)
def mess_lambda_power(k: int) -> GoldenInt:
    if k >= 0:
        return LAMBDA_MESS ** k
    return LAMBDA_MESS_INV ** (-k)


@dataclass(frozen=True)
class MessElt:
    k: int
    t: GoldenInt

    def __mul__(self, other: "MessElt") -> "MessElt":
        return MessElt(self.k + other.k, self.t + mess_lambda_power(self.k) * other.t)

    def inverse(self) -> "MessElt":
        return MessElt(-self.k, -(mess_lambda_power(-self.k) * self.t))

    def key(self) -> Tuple[int, int, int]:
        return (self.k, self.t.a, self.t.b)

    def translation_vector(self) -> Tuple[float, float]:
        """t*w as a float vector in the plane."""
        t = float(self.t)
        return (t, t * (float(GoldenInt(0, 1)) - 1.0))


MESS_IDENTITY = MessElt(0, GoldenInt(0))


def mess_generators() -> GroupOracle:
    return GroupOracle(
        name="mess",
        generators=(MessElt(1, GoldenInt(0)), MessElt(0, GoldenInt(1))),
        multiply=MessElt.__mul__,
        invert=MessElt.inverse,
        key=MessElt.key,
        identity=MESS_IDENTITY,
        gen_names=("A", "T"),
    )


def trace_power(n: int) -> int:
    """tr A^n via t0 = 2, t1 = 3, t_{k+1} = 3 t_k - t_{k-1}."""
    if n < 0:
        raise ValueError("n must be >= 0")
    prev, cur = 2, 3
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 3 * cur - prev
    return cur


def trace_power_matrix(n: int) -> int:
    return MESS_A.power(n).trace()


def mess_certificate(n: int) -> Certificate:
    """The word A^-n T A^n . A^n T A^-n, which spells T^(tr A^n) in 4n + 2 letters."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, t = 0, 1
    g_n = Word.power(a, -n) + Word.power(t, 1) + Word.power(a, n)
    h_n = Word.power(a, n) + Word.power(t, 1) + Word.power(a, -n)
    power = trace_power(n)
    return Certificate(group="mess", n=n, power=power, target=MessElt(0, GoldenInt(power)), word=g_n + h_n)


# ---------------------------------------------------------------- Heisenberg


def heis_generators(with_center: bool = False) -> GroupOracle:
    gens = [HeisElt(1, 0, 0), HeisElt(0, 1, 0)]
    names = ["g", "h"]
    if with_center:
        gens.append(HeisElt(0, 0, 1))
        names.append("f")
    return GroupOracle(
        name="heis",
        generators=tuple(gens),
        multiply=heis_mul,
        invert=heis_inv,
        key=lambda e: (e.x, e.y, e.z),
        identity=HEIS_IDENTITY,
        gen_names=tuple(names),
    )


def heis_center_oracle() -> GroupOracle:
    """The cyclic subgroup generated by the central element f alone."""
    return GroupOracle(
        name="heis-center",
        generators=(HeisElt(0, 0, 1),),
        multiply=heis_mul,
        invert=heis_inv,
        key=lambda e: (e.x, e.y, e.z),
        identity=HEIS_IDENTITY,
        gen_names=("f",),
    )


def heisenberg_certificate(n: int) -> Certificate:
    """[g^n, h^n] = f^(n^2) in 4n letters."""
    if n < 1:
        raise ValueError("n must be >= 1")
    word = commutator(Word.power(0, n), Word.power(1, n))
    return Certificate(group="heis", n=n, power=n * n, target=HeisElt(0, 0, n * n), word=word)


# ---------------------------------------------------------------- PSL(2, Z[sqrt2])

PSL_A = Mat2(QuadInt(-1, 1), QuadInt(0), QuadInt(0), QuadInt(1, 1))
PSL_B = Mat2(QuadInt(1), QuadInt(1), QuadInt(0), QuadInt(1))


def psl2_generators() -> GroupOracle:
    return GroupOracle(
        name="psl2sqrt2",
        generators=(ProjMat2.of(PSL_A), ProjMat2.of(PSL_B)),
        multiply=ProjMat2.__matmul__,
        invert=ProjMat2.inverse,
        key=ProjMat2.key,
        identity=ProjMat2.of(Mat2.identity(QuadInt(1))),
        gen_names=("A", "B"),
    )


def psl2_exponent(n: int) -> int:
    """m = lam^2n + lam^-2n with lam = 1 + sqrt2, computed in Z[sqrt2]."""
    m = LAMBDA_PSL ** (2 * n) + LAMBDA_PSL ** (-2 * n)
    if m.b != 0:
        raise NonIntegerExponent(f"lam^2n + lam^-2n = {m} has nonzero sqrt2 part")
    return m.a


def psl2_certificate(n: int) -> Certificate:
    """(A^-n B A^n)(A^n B A^-n) = B^m, spelled with 4n + 2 letters and no cancellation."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b = 0, 1
    word = (
        Word.power(a, -n) + Word.power(b, 1) + Word.power(a, n)
        + Word.power(a, n) + Word.power(b, 1) + Word.power(a, -n)
    )
    m = psl2_exponent(n)
    target = ProjMat2.of(Mat2(QuadInt(1), QuadInt(m), QuadInt(0), QuadInt(1)))
    return Certificate(group="psl2sqrt2", n=n, power=m, target=target, word=word)


@dataclass(frozen=True)
class Psl2Pair:
    g: ProjMat2
    gbar: ProjMat2

    def __matmul__(self, other: "Psl2Pair") -> "Psl2Pair":
        return Psl2Pair(self.g @ other.g, self.gbar @ other.gbar)

    def inverse(self) -> "Psl2Pair":
        return Psl2Pair(self.g.inverse(), self.gbar.inverse())


def psl2_product_embedding(g: ProjMat2) -> Psl2Pair:
    # conjugation can flip the sign of the leading entry, so recanonicalize
    return Psl2Pair(g, ProjMat2.of(g.mat.conj()))


# ---------------------------------------------------------------- Calegari action


@dataclass(frozen=True)
class AlphaForm:
    """c0 + c1*alpha with alpha a formal transcendental; exact over Q."""

    c0: Fraction = Fraction(0)
    c1: Fraction = Fraction(0)

    def __add__(self, other: "AlphaForm") -> "AlphaForm":
        return AlphaForm(self.c0 + other.c0, self.c1 + other.c1)

    def scale(self, r: Fraction) -> "AlphaForm":
        return AlphaForm(self.c0 * r, self.c1 * r)

    def evaluate(self, alpha: float) -> float:
        return float(self.c0) + float(self.c1) * alpha


@dataclass(frozen=True)
class AffineMap:
    """p -> L p + c with L rational and c in Q + Q*alpha."""

    lin: Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]
    shift: Tuple[AlphaForm, AlphaForm]

    @classmethod
    def make(cls, lin, shift) -> "AffineMap":
        lin = tuple(tuple(Fraction(v) for v in row) for row in lin)
        shift = tuple(s if isinstance(s, AlphaForm) else AlphaForm(Fraction(s)) for s in shift)
        return cls(lin, shift)

    def _apply_lin(self, v):
        (a, b), (c, d) = self.lin
        return (v[0].scale(a) + v[1].scale(b), v[0].scale(c) + v[1].scale(d))

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self o other."""
        (a, b), (c, d) = self.lin
        (e, f), (g, h) = other.lin
        lin = ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
        s = self._apply_lin(other.shift)
        return AffineMap(lin, (s[0] + self.shift[0], s[1] + self.shift[1]))

    def inverse(self) -> "AffineMap":
        (a, b), (c, d) = self.lin
        det = a * d - b * c
        inv = ((d / det, -b / det), (-c / det, a / det))
        m = AffineMap(inv, (AlphaForm(), AlphaForm()))
        s = m._apply_lin(self.shift)
        return AffineMap(inv, (s[0].scale(Fraction(-1)), s[1].scale(Fraction(-1))))

    def __call__(self, x, y):
        p = self._apply_lin((AlphaForm(Fraction(x)), AlphaForm(Fraction(y))))
        return (p[0] + self.shift[0], p[1] + self.shift[1])


def affine_commutator(g: AffineMap, h: AffineMap) -> AffineMap:
    """g h g^-1 h^-1 as maps (rightmost applied first)."""
    return g.compose(h).compose(g.inverse()).compose(h.inverse())


@dataclass(frozen=True)
class PlaneAction:
    G: AffineMap
    H: AffineMap
    F: AffineMap
    alpha: float

    def commutator_is_F(self) -> bool:
        return affine_commutator(self.G, self.H) == self.F

    def quotient_compatible(self) -> bool:
        """Each map commutes with (x, y) -> (x + alpha, y), checked symbolically in alpha."""
        t_alpha = AffineMap.make(((1, 0), (0, 1)), (AlphaForm(Fraction(0), Fraction(1)), 0))
        return all(m.compose(t_alpha) == t_alpha.compose(m) for m in (self.G, self.H, self.F))

    def fiber_rotation_number(self, n: int = 10_000) -> float:
        """Rotation number of F on the circle y = 0 of circumference alpha, normalized to [0, 1)."""
        from .rotation_dynamics import rotation_number_circle, translation_lift

        step = float(self.F(0, 0)[0].evaluate(self.alpha)) / self.alpha
        return rotation_number_circle(translation_lift((step,), kind="circle"), 0.0, n) % 1.0


def calegari_action(alpha: float) -> PlaneAction:
    """G(x,y) = (x+y, y), H(x,y) = (x, y+1), F = [G, H] = (x+1, y).

    alpha should be irrational for the quotient action to be the one of
    interest; that cannot be checked from a float and is left to the caller.
    """
    G = AffineMap.make(((1, 1), (0, 1)), (0, 0))
    H = AffineMap.make(((1, 0), (0, 1)), (0, 1))
    F = AffineMap.make(((1, 0), (0, 1)), (1, 0))
    return PlaneAction(G=G, H=H, F=F, alpha=float(alpha))


GROUPS: Dict[str, tuple] = {
    "mess": (mess_generators, mess_certificate),
    "heis": (heis_generators, heisenberg_certificate),
    "psl2sqrt2": (psl2_generators, psl2_certificate),
}


def element_str(e) -> str:
    """Canonical string for an element of one of the model groups."""
    if isinstance(e, MessElt):
        return f"({e.k},{e.t})"
    if isinstance(e, HeisElt):
        return f"({e.x},{e.y},{e.z})"
    if isinstance(e, ProjMat2):
        return str(e.mat)
    raise TypeError(f"no string form for {type(e).__name__}")
