"""Lifts to covering spaces and the rotation-theoretic quantities computed from them.

Points are numpy arrays whose last axis is the coordinate axis: length 1 on
the circle cover R, length 2 on the annulus cover R x [0, 1] and on the torus
cover R^2.  The first coordinate is periodic in every case, the second only on
the torus.

A lift F carries an integer matrix `linear_part` L with F(p + m) = F(p) + L m
for deck vectors m.  L is the identity for lifts of maps isotopic to the
identity, which is the case every rotation quantity below is about; the skew
and hyperbolic toral lifts have L != I.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

DIMS = {"circle": 1, "annulus": 2, "torus": 2}
DECK = {
    "circle": np.array([[1.0]]),
    "annulus": np.array([[1.0, 0.0]]),
    "torus": np.array([[1.0, 0.0], [0.0, 1.0]]),
}


class EquivarianceViolation(ValueError):
    pass


class MonotonicityViolation(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


class NonConvergentSample(RuntimeError):
    def __init__(self, points):
        super().__init__(f"{len(points)} sample point(s) did not converge: {points[:5]}")
        self.points = points


class NoReturn(RuntimeError):
    def __init__(self, max_steps: int, index: Optional[int] = None):
        where = "" if index is None else f" at orbit index {index}"
        super().__init__(f"no return within {max_steps} steps{where}")
        self.max_steps = max_steps
        self.index = index


class UnknownLift(KeyError):
    pass


@dataclass(frozen=True)
class Lift:
    name: str
    kind: str
    func: Callable[[np.ndarray], np.ndarray]
    linear_part: Optional[np.ndarray] = None
    inverse: Optional[Callable[[np.ndarray], np.ndarray]] = None
    affine: bool = False

    def __post_init__(self):
        if self.kind not in DIMS:
            raise ValueError(f"unknown lift kind {self.kind!r}")
        if self.linear_part is None:
            object.__setattr__(self, "linear_part", np.eye(self.dim))

    @property
    def dim(self) -> int:
        return DIMS[self.kind]

    def __call__(self, p) -> np.ndarray:
        return self.func(np.asarray(p, dtype=float))

    def inv(self, p) -> np.ndarray:
        if self.inverse is None:
            raise NotImplementedError(f"lift {self.name} has no inverse")
        return self.inverse(np.asarray(p, dtype=float))

    def project(self, p) -> np.ndarray:
        """Reduce the periodic coordinates into [0, 1)."""
        q = np.array(p, dtype=float)
        if self.kind == "torus":
            return q - np.floor(q)
        q[..., 0] -= np.floor(q[..., 0])
        return q

    def iterate(self, p, n: int) -> np.ndarray:
        q = np.asarray(p, dtype=float)
        for _ in range(n):
            q = self.func(q)
        return q


def sample_grid(kind: str, resolution: int = 32) -> np.ndarray:
    t = np.arange(resolution) / resolution
    if kind == "circle":
        return t[:, None]
    if kind == "annulus":
        s = np.linspace(0.0, 1.0, resolution)
        xx, yy = np.meshgrid(t, s, indexing="ij")
    else:
        xx, yy = np.meshgrid(t, t, indexing="ij")
    return np.stack([xx.ravel(), yy.ravel()], axis=-1)


def equivariance_residual(lift: Lift, resolution: int = 32) -> float:
    """max |F(p + m) - F(p) - L m| over a sample grid and the deck generators."""
    pts = sample_grid(lift.kind, resolution)
    base = lift(pts)
    worst = 0.0
    for m in DECK[lift.kind]:
        shifted = lift(pts + m)
        worst = max(worst, float(np.max(np.abs(shifted - base - lift.linear_part @ m))))
    if lift.kind == "annulus":
        for y in (0.0, 1.0):
            edge = pts[np.isclose(pts[:, 1], y)]
            worst = max(worst, float(np.max(np.abs(lift(edge)[:, 1] - y))))
    return worst


def check_equivariance(lift: Lift, tol: float = 1e-9, resolution: int = 32) -> float:
    r = equivariance_residual(lift, resolution)
    if not r < tol:
        raise EquivarianceViolation(f"lift {lift.name}: equivariance residual {r:.3g} exceeds {tol:g}")
    return r


# ---------------------------------------------------------------- rotation vectors


@dataclass
class RotationReport:
    estimate: np.ndarray
    window_variation: float
    n_used: int
    converged: bool


def _partial_average_window(lift: Lift, x: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Final averages (F^n x - x)/n and the max-min spread of (F^k x - x)/k over k >= 3n/4.

    x has shape (P, d); returns arrays of shape (P, d) and (P,).
    """
    start = x.copy()
    q = x.copy()
    k0 = max(1, (3 * n) // 4)
    lo = np.full_like(x, np.inf)
    hi = np.full_like(x, -np.inf)
    for k in range(1, n + 1):
        q = lift.func(q)
        if k >= k0:
            avg = (q - start) / k
            np.minimum(lo, avg, out=lo)
            np.maximum(hi, avg, out=hi)
    return (q - start) / n, np.max(hi - lo, axis=-1)


def rotation_vector(lift: Lift, x, n: int, tol: float = 1e-3) -> RotationReport:
    """(F^n x - x)/n together with the last-quarter Cauchy window test."""
    if n < 16:
        raise ValueError("n must be >= 16")
    check_equivariance(lift)
    x = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, lift.dim)
    est, var = _partial_average_window(lift, x, n)
    variation = float(var[0])
    return RotationReport(estimate=est[0], window_variation=variation, n_used=n, converged=variation < tol)


def _check_monotone(lift: Lift, samples: int = 1024) -> None:
    s = np.linspace(0.0, 1.0, samples + 1)[:, None]
    v = lift(s)[:, 0]
    if np.any(np.diff(v) < -1e-12):
        raise MonotonicityViolation(f"lift {lift.name} is decreasing somewhere on [0, 1]")


def rotation_number_circle(lift: Lift, x: float, n: int) -> float:
    """(F^n x - x)/n for a monotone circle lift; within 2/n of the true rotation number."""
    if lift.kind != "circle":
        raise ValueError("rotation_number_circle needs a circle lift")
    check_equivariance(lift)
    _check_monotone(lift)
    start = np.array([float(x)])
    return float((lift.iterate(start, n)[0] - start[0]) / n)


@dataclass
class EmpiricalMeasure:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (len(self.points),):
            raise ValueError("one weight per point required")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")

    @classmethod
    def uniform(cls, points) -> "EmpiricalMeasure":
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(points, np.full(len(points), 1.0 / len(points)))

    @classmethod
    def point_mass(cls, point) -> "EmpiricalMeasure":
        return cls(np.atleast_2d(np.asarray(point, dtype=float)), np.array([1.0]))


def mean_rotation_vector(lift: Lift, measure: EmpiricalMeasure, n: int, tol: float = 1e-3) -> np.ndarray:
    if n < 16:
        raise ValueError("n must be >= 16")
    check_equivariance(lift)
    est, var = _partial_average_window(lift, measure.points.reshape(-1, lift.dim), n)
    bad = [tuple(p) for p, v in zip(measure.points, var) if not v < tol]
    if bad:
        raise NonConvergentSample(bad)
    return measure.weights @ est


# ---------------------------------------------------------------- first return and Birkhoff sums


def first_return(lift: Lift, region: Callable[[np.ndarray], bool], x, max_steps: int = 100_000):
    """Smallest k >= 1 with F^k(x) in the region, returned as (lifted point, k).

    `region` sees points reduced to the fundamental domain and decides
    boundary ties itself.
    """
    q = np.asarray(x, dtype=float).reshape(lift.dim)
    for k in range(1, max_steps + 1):
        q = lift.func(q)
        if region(lift.project(q)):
            return q, k
    raise NoReturn(max_steps)


def birkhoff_sums(lift: Lift, region, x, n: int, max_steps: int = 100_000) -> np.ndarray:
    """S(1, x), ..., S(n, x) for the first-coordinate displacement of the first return map.

    Displacements are taken in the lifted coordinate and never reduced.
    """
    q = np.asarray(x, dtype=float).reshape(lift.dim)
    out = np.empty(n)
    psi = []
    for i in range(n):
        try:
            nxt, _ = first_return(lift, region, q, max_steps)
        except NoReturn as e:
            raise NoReturn(e.max_steps, index=i) from None
        psi.append(float(nxt[0] - q[0]))
        out[i] = math.fsum(psi)
        q = nxt
    return out


def birkhoff_displacement_sum(lift: Lift, region, x, n: int, max_steps: int = 100_000) -> float:
    if n == 0:
        return 0.0
    return float(birkhoff_sums(lift, region, x, n, max_steps)[-1])


def recurrence_witnesses(lift: Lift, region, x, N: int, bound: float = 1.0, max_steps: int = 100_000) -> List[int]:
    """All n <= N with |S(n, x)| < bound."""
    if not bound > 0:
        raise ValueError("bound must be positive")
    sums = birkhoff_sums(lift, region, x, N, max_steps)
    return [i + 1 for i, s in enumerate(sums) if abs(s) < bound]


def interior_fixed_point_search(lift: Lift, grid_resolution: int = 64, tol: Optional[float] = None) -> List[Tuple[float, float]]:
    """Grid cells of the annulus fundamental domain where the lift nearly fixes a point.

    Each cell is sampled at its center and, as one refinement pass, at the
    centers of its four half-size subcells; a cell is reported (by its best
    sample) when the smallest displacement |F(p) - p| is below `tol`
    (default: one cell width).
    """
    if lift.kind != "annulus":
        raise ValueError("interior_fixed_point_search needs an annulus lift")
    check_equivariance(lift)
    r = grid_resolution
    tol = 1.0 / r if tol is None else tol
    c = (np.arange(r) + 0.5) / r
    cx, cy = np.meshgrid(c, c, indexing="ij")
    centers = np.stack([cx.ravel(), cy.ravel()], axis=-1)
    q = 0.25 / r
    offsets = np.array([[0, 0], [-q, -q], [-q, q], [q, -q], [q, q]])
    samples = centers[:, None, :] + offsets[None, :, :]
    disp = np.linalg.norm(lift(samples) - samples, axis=-1)
    best = np.argmin(disp, axis=1)
    rows = np.arange(len(centers))
    hit = disp[rows, best] < tol
    return [tuple(map(float, samples[i, best[i]])) for i in rows[hit]]


def linear_displacement_detector(lift: Lift, x1, x2, n: int) -> List[Tuple[int, float, float]]:
    """Rows (k, |F^k x1 - F^k x2| / k, running minimum) for k = 1..n."""
    p = np.asarray(x1, dtype=float)
    q = np.asarray(x2, dtype=float)
    rows = []
    best = math.inf
    for k in range(1, n + 1):
        p = lift.func(p)
        q = lift.func(q)
        ratio = float(np.linalg.norm(p - q)) / k
        best = min(best, ratio)
        rows.append((k, ratio, best))
    return rows


# ---------------------------------------------------------------- lift constructors


def identity_lift(kind: str = "annulus") -> Lift:
    return Lift("identity", kind, lambda p: p.copy(), inverse=lambda p: p.copy(), affine=True)


def translation_lift(v: Sequence[float], kind: Optional[str] = None) -> Lift:
    v = np.asarray(v, dtype=float)
    if kind is None:
        kind = "circle" if v.size == 1 else "torus"
    if kind == "annulus" and v.size == 1:
        v = np.array([v[0], 0.0])
    if kind == "annulus" and v[1] != 0:
        raise ValueError("annulus translations must preserve the boundary lines")
    return Lift(f"translation{tuple(v)}", kind, lambda p: p + v, inverse=lambda p: p - v, affine=True)


def shear_lift(k: float = 1.0, offset: float = 0.0) -> Lift:
    """(x, y) -> (x + k*y + offset, y) on the annulus cover."""

    def f(p):
        out = p.copy()
        out[..., 0] = p[..., 0] + k * p[..., 1] + offset
        return out

    def finv(p):
        out = p.copy()
        out[..., 0] = p[..., 0] - k * p[..., 1] - offset
        return out

    return Lift(f"shear({k},{offset})", "annulus", f, inverse=finv, affine=True)


def mean_zero_shear() -> Lift:
    """(x, y) -> (x + y - 1/2, y): zero mean rotation, fixed circle y = 1/2."""
    lift = shear_lift(1.0, -0.5)
    return Lift("mean-zero-shear", lift.kind, lift.func, inverse=lift.inverse, affine=True)


def skew_lift(alpha: float) -> Lift:
    """(x, y) -> (x + alpha, y + x), a torus lift with linear part (1 0; 1 1)."""

    def f(p):
        out = np.empty_like(p)
        out[..., 0] = p[..., 0] + alpha
        out[..., 1] = p[..., 1] + p[..., 0]
        return out

    return Lift(f"skew({alpha})", "torus", f, linear_part=np.array([[1.0, 0.0], [1.0, 1.0]]), affine=True)


def linear_torus_lift(a: float, b: float, c: float, d: float) -> Lift:
    m = np.array([[a, b], [c, d]], dtype=float)
    if abs(round(np.linalg.det(m))) != 1 or not np.all(m == np.round(m)):
        raise ValueError("a toral automorphism needs an integer matrix with det +-1")
    minv = np.linalg.inv(m).round()
    return Lift(
        f"linear({a},{b};{c},{d})", "torus",
        lambda p: p @ m.T, linear_part=m, inverse=lambda p: p @ minv.T, affine=True,
    )


def pinned_shear() -> Lift:
    """(x, y) -> (x + sin^2(pi y), y): fixes y = 0 pointwise and moves y = 1/2 by 1."""

    def f(p):
        out = p.copy()
        out[..., 0] = p[..., 0] + np.sin(np.pi * p[..., 1]) ** 2
        return out

    def finv(p):
        out = p.copy()
        out[..., 0] = p[..., 0] - np.sin(np.pi * p[..., 1]) ** 2
        return out

    return Lift("pinned-shear", "torus", f, inverse=finv)


def rigid_rotation(rho: float) -> Lift:
    return Lift(f"rigid({rho})", "circle", lambda p: p + rho, inverse=lambda p: p - rho, affine=True)


def sine_circle_map(eps: float) -> Lift:
    """x -> x + eps*sin(2 pi x); a homeomorphism lift for |eps| < 1/(2 pi)."""
    return Lift(f"sine({eps})", "circle", lambda p: p + eps * np.sin(2 * np.pi * p))


def projectivized_circle_map(M) -> Lift:
    """Lift of the action of M (det > 0) on lines through the origin.

    A line at angle theta is parametrized by s = theta/pi, so RP^1 = R/Z.  M is
    split as R_phi N with N upper triangular with positive diagonal; N maps the
    half-turn [0, pi] onto itself and has an explicit continuous lift, R_phi
    adds phi.  The lift is then shifted by an integer so that F(0) lies in
    (-1/2, 1/2].
    """
    M = np.asarray(M, dtype=float)
    det = float(np.linalg.det(M))
    if abs(det) < 1e-300:
        raise SingularMatrix("matrix is singular")
    if det < 0:
        raise ValueError("projectivized_circle_map needs det > 0")
    a, c = M[0, 0], M[1, 0]
    r1 = math.hypot(a, c)
    phi = math.atan2(c, a)
    cs, sn = a / r1, c / r1
    n12 = cs * M[0, 1] + sn * M[1, 1]
    n22 = det / r1
    shift = math.ceil(phi / math.pi - 0.5)

    def f(p):
        s = p[..., 0]
        k = np.floor(s)
        theta = np.pi * (s - k)
        img = np.arctan2(n22 * np.sin(theta), r1 * np.cos(theta) + n12 * np.sin(theta))
        out = np.empty_like(p)
        out[..., 0] = (img + phi) / np.pi + k - shift
        return out

    return Lift(f"projective({M[0,0]},{M[0,1]};{M[1,0]},{M[1,1]})", "circle", f)


def rotation_matrix(theta: float) -> np.ndarray:
    return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])


def _floats(params: Sequence[str], count: Optional[int] = None, default=None) -> List[float]:
    if not params and default is not None:
        return list(default)
    vals = [float(p) for p in params]
    if count is not None and len(vals) != count:
        raise ValueError(f"expected {count} parameter(s), got {len(vals)}")
    return vals


LIFT_REGISTRY: Dict[str, Callable[[Sequence[str]], Lift]] = {
    "identity": lambda ps: identity_lift("annulus"),
    "identity-torus": lambda ps: identity_lift("torus"),
    "identity-circle": lambda ps: identity_lift("circle"),
    "translation": lambda ps: translation_lift(_floats(ps, default=(0.0, 0.0))),
    "annulus-translation": lambda ps: translation_lift(_floats(ps, 1), kind="annulus"),
    "shear": lambda ps: shear_lift(*_floats(ps, default=(1.0,))),
    "mean-zero-shear": lambda ps: mean_zero_shear(),
    "skew": lambda ps: skew_lift(*_floats(ps, 1)),
    "rigid": lambda ps: rigid_rotation(*_floats(ps, 1)),
    "sine": lambda ps: sine_circle_map(*_floats(ps, 1)),
    "projective": lambda ps: projectivized_circle_map(np.reshape(_floats(ps, 4), (2, 2))),
    "projective-rotation": lambda ps: projectivized_circle_map(rotation_matrix(*_floats(ps, 1))),
    "matA": lambda ps: linear_torus_lift(2, 1, 1, 1),
    "linear": lambda ps: linear_torus_lift(*_floats(ps, 4)),
    "pinned-shear": lambda ps: pinned_shear(),
}


def build_lift(spec: str) -> Lift:
    """Build a lift from 'name' or 'name:p1,p2,...' with decimal-string parameters."""
    name, _, rest = spec.partition(":")
    if name not in LIFT_REGISTRY:
        raise UnknownLift(name)
    params = [p for p in rest.split(",") if p.strip()] if rest else []
    return LIFT_REGISTRY[name](params)
