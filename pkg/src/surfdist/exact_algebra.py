"""Exact arithmetic in Z, Z[sqrt 2], Z[phi] and the small matrix groups built on them.

Coefficients are Python ints, so nothing here can overflow; products of
traces such as tr A^50 (~1e20) stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union


class NotUnimodular(ArithmeticError):
    """Raised when inverting a matrix whose determinant is not a unit."""


@dataclass(frozen=True)
class QuadInt:
    """a + b*sqrt(2)."""

    a: int
    b: int = 0

    @classmethod
    def coerce(cls, x: Union[int, "QuadInt"]) -> "QuadInt":
        if isinstance(x, QuadInt):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        raise TypeError(f"cannot coerce {type(x).__name__} to QuadInt")

    def __add__(self, other):
        if not isinstance(other, (int, QuadInt)):
            return NotImplemented
        o = QuadInt.coerce(other)
        return QuadInt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> "QuadInt":
        return QuadInt(-self.a, -self.b)

    def __sub__(self, other):
        if not isinstance(other, (int, QuadInt)):
            return NotImplemented
        return self + (-QuadInt.coerce(other))

    def __rsub__(self, other):
        return QuadInt.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (int, QuadInt)):
            return NotImplemented
        return quad_mul(self, QuadInt.coerce(other))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QuadInt":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QuadInt(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadInt):
            return self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def conj(self) -> "QuadInt":
        return QuadInt(self.a, -self.b)

    def norm(self) -> int:
        return self.a * self.a - 2 * self.b * self.b

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def inverse(self) -> "QuadInt":
        n = self.norm()
        if abs(n) != 1:
            raise ZeroDivisionError(f"{self} is not a unit of Z[sqrt2]")
        return self.conj() * n

    def sign(self) -> int:
        """Exact sign of the real number a + b*sqrt(2)."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with 2 b^2
        return sa if self.a * self.a > 2 * self.b * self.b else sb

    def __float__(self) -> float:
        return self.a + self.b * math.sqrt(2.0)

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a}{self.b:+d}r2"


@dataclass(frozen=True)
class GoldenInt:
    """a + b*phi with phi = (1 + sqrt 5)/2, phi^2 = phi + 1."""

    a: int
    b: int = 0

    @classmethod
    def coerce(cls, x: Union[int, "GoldenInt"]) -> "GoldenInt":
        if isinstance(x, GoldenInt):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        raise TypeError(f"cannot coerce {type(x).__name__} to GoldenInt")

    def __add__(self, other):
        if not isinstance(other, (int, GoldenInt)):
            return NotImplemented
        o = GoldenInt.coerce(other)
        return GoldenInt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> "GoldenInt":
        return GoldenInt(-self.a, -self.b)

    def __sub__(self, other):
        if not isinstance(other, (int, GoldenInt)):
            return NotImplemented
        return self + (-GoldenInt.coerce(other))

    def __rsub__(self, other):
        return GoldenInt.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (int, GoldenInt)):
            return NotImplemented
        return golden_mul(self, GoldenInt.coerce(other))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "GoldenInt":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = GoldenInt(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.b == 0 and self.a == other
        if isinstance(other, GoldenInt):
            return self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def conj(self) -> "GoldenInt":
        # phi -> 1 - phi
        return GoldenInt(self.a + self.b, -self.b)

    def norm(self) -> int:
        return self.a * self.a + self.a * self.b - self.b * self.b

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def inverse(self) -> "GoldenInt":
        n = self.norm()
        if abs(n) != 1:
            raise ZeroDivisionError(f"{self} is not a unit of Z[phi]")
        return self.conj() * n

    def __float__(self) -> float:
        return self.a + self.b * (1.0 + math.sqrt(5.0)) / 2.0

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a}{self.b:+d}phi"


PHI = GoldenInt(0, 1)
SQRT2 = QuadInt(0, 1)


def quad_mul(u: QuadInt, v: QuadInt) -> QuadInt:
    return QuadInt(u.a * v.a + 2 * u.b * v.b, u.a * v.b + u.b * v.a)


def golden_mul(u: GoldenInt, v: GoldenInt) -> GoldenInt:
    bd = u.b * v.b
    return GoldenInt(u.a * v.a + bd, u.a * v.b + u.b * v.a + bd)


def ring_sign(x) -> int:
    if isinstance(x, QuadInt):
        return x.sign()
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Mat2:
    """2x2 matrix over int or QuadInt, row-major."""

    m11: object
    m12: object
    m21: object
    m22: object

    @classmethod
    def identity(cls, one=1) -> "Mat2":
        zero = one - one
        return cls(one, zero, zero, one)

    @property
    def entries(self) -> tuple:
        return (self.m11, self.m12, self.m21, self.m22)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return mat2_mul(self, other)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.m11, -self.m12, -self.m21, -self.m22)

    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21

    def trace(self):
        return self.m11 + self.m22

    def inverse(self) -> "Mat2":
        return mat2_inv(self)

    def power(self, n: int) -> "Mat2":
        base = self if n >= 0 else mat2_inv(self)
        n = abs(n)
        result = Mat2.identity(self.m11 - self.m11 + 1)
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def conj(self) -> "Mat2":
        """Apply a + b*sqrt2 -> a - b*sqrt2 entrywise (identity on int entries)."""
        return Mat2(*(e.conj() if isinstance(e, QuadInt) else e for e in self.entries))

    def to_float(self):
        return [[float(self.m11), float(self.m12)], [float(self.m21), float(self.m22)]]

    def __str__(self) -> str:
        return f"({self.m11},{self.m12};{self.m21},{self.m22})"


def mat2_mul(m: Mat2, n: Mat2) -> Mat2:
    return Mat2(
        m.m11 * n.m11 + m.m12 * n.m21,
        m.m11 * n.m12 + m.m12 * n.m22,
        m.m21 * n.m11 + m.m22 * n.m21,
        m.m21 * n.m12 + m.m22 * n.m22,
    )


def mat2_inv(m: Mat2) -> Mat2:
    d = m.det()
    if d == 1:
        s = 1
    elif d == -1:
        s = -1
    else:
        raise NotUnimodular(f"det {d} is not +-1")
    return Mat2(s * m.m22, -s * m.m12, -s * m.m21, s * m.m11)


@dataclass(frozen=True)
class ProjMat2:
    """A Mat2 modulo +-I, stored with its first nonzero entry positive."""

    mat: Mat2

    def __post_init__(self):
        if self.mat != proj_canonicalize(self.mat):
            raise ValueError("ProjMat2 must wrap a canonical matrix; use ProjMat2.of")

    @classmethod
    def of(cls, m: Mat2) -> "ProjMat2":
        return cls(proj_canonicalize(m))

    def __matmul__(self, other: "ProjMat2") -> "ProjMat2":
        return ProjMat2.of(self.mat @ other.mat)

    def inverse(self) -> "ProjMat2":
        return ProjMat2.of(mat2_inv(self.mat))

    def key(self) -> tuple:
        return tuple((e.a, e.b) if isinstance(e, QuadInt) else (e, 0) for e in self.mat.entries)


def proj_canonicalize(m: Mat2) -> Mat2:
    for e in m.entries:
        s = ring_sign(e)
        if s > 0:
            return m
        if s < 0:
            return -m
    return m


@dataclass(frozen=True)
class HeisElt:
    """(x, y, z) with (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y')."""

    x: int
    y: int
    z: int

    def __mul__(self, other: "HeisElt") -> "HeisElt":
        return heis_mul(self, other)

    def inverse(self) -> "HeisElt":
        return heis_inv(self)


HEIS_IDENTITY = HeisElt(0, 0, 0)


def heis_mul(u: HeisElt, v: HeisElt) -> HeisElt:
    return HeisElt(u.x + v.x, u.y + v.y, u.z + v.z + u.x * v.y)


def heis_inv(u: HeisElt) -> HeisElt:
    return HeisElt(-u.x, -u.y, -u.z + u.x * u.y)
