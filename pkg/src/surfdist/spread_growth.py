"""Curve growth, crossing counts and spread in the annulus cover, and hyperbolic-plane primitives.

Spread lives in the annulus model R x [0, 1] with deck translation
T(x, y) = (x + 1, y).  The reference transversal gamma is the segment
{0} x [0, 1] unless another bottom-to-top polyline is supplied; its
translates are gamma_i = gamma + (i, 0).  An arc meets gamma_i when the
closed sets intersect, so touching counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .rotation_dynamics import Lift, check_equivariance
from .word_metrics import Word


class DegenerateCurve(ValueError):
    pass


class LengthOverflow(OverflowError):
    def __init__(self, n_reached: int, length: float):
        super().__init__(f"curve length {length:.6g} exceeded the cap after {n_reached} iterations")
        self.n_reached = n_reached
        self.length = length


class WrongType(ValueError):
    pass


class CommutationViolation(ValueError):
    pass


class UnknownSpec(KeyError):
    pass


# ---------------------------------------------------------------- curves


@dataclass(frozen=True)
class PolyCurve:
    """Polyline in R^2; when closed, the last vertex is the first plus an integer vector."""

    vertices: np.ndarray
    closed: bool = True

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        object.__setattr__(self, "vertices", v)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 2:
            raise DegenerateCurve("need at least two planar vertices")
        if np.any(np.all(np.diff(v, axis=0) == 0, axis=1)):
            raise DegenerateCurve("consecutive vertices coincide")
        if self.closed:
            off = v[-1] - v[0]
            if not np.allclose(off, np.round(off), atol=1e-9):
                raise DegenerateCurve(f"closure offset {off} is not an integer vector")

    @property
    def offset(self) -> np.ndarray:
        return self.vertices[-1] - self.vertices[0]


def curve_length(c: PolyCurve) -> float:
    seg = np.linalg.norm(np.diff(c.vertices, axis=0), axis=1)
    total = float(np.sum(seg))
    if total == 0.0:
        raise DegenerateCurve("zero length")
    return total


def refine(vertices: np.ndarray, max_seg: float) -> np.ndarray:
    """Subdivide every segment into equal pieces of length <= max_seg."""
    if max_seg <= 0:
        raise ValueError("max_seg must be positive")
    v = np.asarray(vertices, dtype=float)
    d = np.diff(v, axis=0)
    pieces = np.maximum(1, np.ceil(np.linalg.norm(d, axis=1) / max_seg).astype(int))
    out = [v[:1]]
    for start, step, k in zip(v[:-1], d, pieces):
        t = np.arange(1, k + 1)[:, None] / k
        out.append(start + t * step)
    return np.concatenate(out)


def _apply(lift: Lift, vertices: np.ndarray, max_seg: Optional[float]) -> np.ndarray:
    # affine lifts map segments to segments, so refinement would only add vertices
    if max_seg is not None and not lift.affine:
        vertices = refine(vertices, max_seg)
    return lift(vertices)


def iterate_refine(map_lift: Lift, c: PolyCurve, max_seg: float = 1e-2) -> PolyCurve:
    return PolyCurve(_apply(map_lift, c.vertices, max_seg), closed=c.closed)


def _envelope(values: Sequence[float], start: int) -> List[float]:
    """Running minimum of values[start:], padded with nan before `start`."""
    out = []
    best = math.inf
    for i, v in enumerate(values):
        if i >= start:
            best = min(best, v)
            out.append(best)
        else:
            out.append(math.nan)
    return out


def egr(
    map_lift: Lift, c: PolyCurve, n_max: int, max_seg: float = 1e-2, length_cap: float = 1e15
) -> List[Tuple[int, float, float, float]]:
    """Rows (n, length, log(length)/n, envelope) for n = 1..n_max.

    The envelope is the running minimum taken from n = n_max // 2 on.
    """
    if n_max < 4:
        raise ValueError("n_max must be >= 4")
    verts = c.vertices
    lengths = []
    for n in range(1, n_max + 1):
        verts = _apply(map_lift, verts, max_seg)
        length = float(np.sum(np.linalg.norm(np.diff(verts, axis=0), axis=1)))
        if not length <= length_cap:
            raise LengthOverflow(n, length)
        lengths.append(length)
    rates = [math.log(l) / n for n, l in enumerate(lengths, start=1)]
    env = _envelope(rates, n_max // 2 - 1)
    return [(n, lengths[n - 1], rates[n - 1], env[n - 1]) for n in range(1, n_max + 1)]


# ---------------------------------------------------------------- arcs and crossing counts


@dataclass(frozen=True)
class Arc:
    """Polyline in the strip R x [0, 1] of the annulus cover."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        object.__setattr__(self, "vertices", v)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 2:
            raise DegenerateCurve("an arc needs at least two planar vertices")
        if np.any(v[:, 1] < -1e-12) or np.any(v[:, 1] > 1 + 1e-12):
            raise ValueError("arc leaves the strip 0 <= y <= 1")

    def translate(self, dx: float) -> "Arc":
        return Arc(self.vertices + np.array([dx, 0.0]))


VERTICAL_ARC = Arc(np.array([[0.0, 0.0], [0.0, 1.0]]))


def _met_indices_vertical(v: np.ndarray) -> Tuple[int, int]:
    lo = math.ceil(float(np.min(v[:, 0])))
    hi = math.floor(float(np.max(v[:, 0])))
    return lo, hi


def _met_indices_general(arc: np.ndarray, gamma: np.ndarray) -> Tuple[int, int]:
    """Smallest and largest i with arc meeting gamma + (i, 0).

    For a pair of segments s and g, the shifts t with s meeting g + (t, 0) form
    the slice {y = 0} of the convex set s - g, the hull of the four vertex
    differences.  The slice's endpoints lie on segments joining pairs of those
    differences, so it suffices to intersect all six pairs with y = 0.
    """
    s0, s1 = arc[:-1], arc[1:]
    g0, g1 = gamma[:-1], gamma[1:]
    corners = np.stack(
        [s0[:, None] - g0[None], s0[:, None] - g1[None], s1[:, None] - g0[None], s1[:, None] - g1[None]], axis=2
    )  # (S, G, 4, 2)
    tmin = np.full(corners.shape[:2], np.inf)
    tmax = np.full(corners.shape[:2], -np.inf)
    for i in range(4):
        for j in range(i, 4):
            p, q = corners[:, :, i], corners[:, :, j]
            yp, yq = p[..., 1], q[..., 1]
            crosses = (yp * yq <= 0)
            denom = yp - yq
            with np.errstate(divide="ignore", invalid="ignore"):
                lam = np.where(denom != 0, yp / denom, 0.0)
            x = p[..., 0] + lam * (q[..., 0] - p[..., 0])
            # a pair lying on y = 0 contributes both endpoints
            flat = (yp == 0) & (yq == 0)
            xa = np.where(flat, np.minimum(p[..., 0], q[..., 0]), x)
            xb = np.where(flat, np.maximum(p[..., 0], q[..., 0]), x)
            tmin = np.where(crosses, np.minimum(tmin, xa), tmin)
            tmax = np.where(crosses, np.maximum(tmax, xb), tmax)
    ok = tmin <= tmax
    if not np.any(ok):
        return 1, 0
    lo = np.ceil(tmin[ok] - 1e-12).astype(int)
    hi = np.floor(tmax[ok] + 1e-12).astype(int)
    has = lo <= hi
    if not np.any(has):
        return 1, 0
    return int(np.min(lo[has])), int(np.max(hi[has]))


def met_translates(arc: Arc, gamma: Optional[np.ndarray] = None) -> Tuple[int, int]:
    """(first, last) index i of the translates gamma_i met by the arc; first > last if none."""
    if gamma is None:
        return _met_indices_vertical(arc.vertices)
    return _met_indices_general(arc.vertices, np.asarray(gamma, dtype=float))


def crossing_count_L(arc: Arc, gamma: Optional[np.ndarray] = None) -> int:
    """max{0, b - a - 2} where gamma_i meets the arc exactly for a < i < b.

    With first/last the extreme met indices, a = first - 1 and b = last + 1.
    An arc meeting no translate sits between two consecutive ones and gets 0.
    Every lift of the arc is a deck translate, and translates have equal
    counts, so one lift suffices.
    """
    first, last = met_translates(arc, gamma)
    if first > last:
        return 0
    return max(0, last - first)


def spread(
    map_lift: Lift, arc: Arc, n_max: int, max_seg: float = 1e-2, gamma: Optional[np.ndarray] = None
) -> List[Tuple[int, int, float, float]]:
    """Rows (n, L(f^n alpha), L/n, running minimum) for n = 1..n_max."""
    if map_lift.kind != "annulus":
        raise ValueError("spread needs an annulus lift")
    check_equivariance(map_lift)
    verts = arc.vertices
    rows = []
    best = math.inf
    for n in range(1, n_max + 1):
        verts = _apply(map_lift, verts, max_seg)
        L = crossing_count_L(Arc(verts), gamma)
        best = min(best, L / n)
        rows.append((n, L, L / n, best))
    return rows


def strip_span(gamma: np.ndarray) -> Tuple[int, int]:
    """(j, J): gamma lies between the vertical lines x = j and x = j + J."""
    g = np.asarray(gamma, dtype=float)
    j = math.floor(float(np.min(g[:, 0])))
    return j, math.ceil(float(np.max(g[:, 0]))) - j


def gamma_independence_check(arcs: Iterable[Arc], gamma_prime: np.ndarray, J: Optional[int] = None) -> bool:
    """|L_gamma'(alpha) - L_gamma(alpha)| <= 2J for every arc, gamma the vertical segment."""
    if J is None:
        _, J = strip_span(gamma_prime)
    gp = np.asarray(gamma_prime, dtype=float)
    return all(abs(crossing_count_L(a, gp) - crossing_count_L(a)) <= 2 * J for a in arcs)


def random_arc(rng: np.random.Generator, max_vertices: int = 12, width: float = 6.0) -> Arc:
    """A random polyline arc from the bottom line to the top line of the strip."""
    k = int(rng.integers(2, max_vertices + 1))
    xs = np.cumsum(rng.normal(0.0, width / 3, size=k)) + rng.uniform(-width, width)
    ys = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, size=k - 2)), [1.0]])
    if rng.random() < 0.5:
        ys[1:-1] = rng.uniform(0, 1, size=k - 2)
    return Arc(np.stack([xs, ys], axis=1))


def random_transversal(rng: np.random.Generator, J: int, j: int = 0, vertices: int = 8) -> np.ndarray:
    """A wiggly bottom-to-top polyline inside the strip j <= x <= j + J."""
    if J == 0:
        return np.array([[j, 0.0], [j, 1.0]], dtype=float)
    ys = np.linspace(0.0, 1.0, vertices)
    xs = rng.uniform(j, j + J, size=vertices)
    xs[0], xs[-1] = j, j + J  # touch both walls so the span is exactly J
    return np.stack([xs, ys], axis=1)


def apply_word(lifts: Sequence[Lift], w: Word, vertices: np.ndarray, max_seg: Optional[float] = 1e-2) -> np.ndarray:
    """Image of a polyline under w = s1 s2 ... sk acting as s1 o s2 o ... o sk."""
    v = vertices
    for g, s in reversed(w.tokens):
        lift = lifts[g]
        if s == 1:
            v = _apply(lift, v, max_seg)
        else:
            if max_seg is not None and not lift.affine:
                v = refine(v, max_seg)
            v = lift.inv(v)
    return v


def all_words(n_gens: int, max_len: int) -> List[Word]:
    """Every word of length 1..max_len over the symmetric generating set."""
    letters = [(g, s) for g in range(n_gens) for s in (1, -1)]
    words = []
    layer = [()]
    for _ in range(max_len):
        layer = [t + (l,) for t in layer for l in letters]
        words.extend(Word(t) for t in layer)
    return words


def fixes_gamma_endpoints(lift: Lift, gamma: np.ndarray, tol: float = 1e-9) -> bool:
    """Each endpoint of gamma is sent to a deck translate of itself."""
    ends = np.asarray(gamma, dtype=float)[[0, -1]]
    d = lift(ends) - ends
    return bool(np.all(np.abs(d[:, 1]) < tol) and np.all(np.abs(d[:, 0] - np.round(d[:, 0])) < tol))


@dataclass
class GrowthCheck:
    c_hat: float
    c_single: float
    passed: bool
    worst_excess: float


def tlen_growth_check(
    generator_lifts: Sequence[Lift],
    arc: Arc,
    words: Iterable[Word],
    gamma: Optional[np.ndarray] = None,
    max_seg: float = 1e-2,
) -> GrowthCheck:
    """Empirical constant C in L(w alpha) <= L(alpha) + C |w|.

    c_hat is the largest increment per letter over all sampled words and
    c_single the largest increment of a single letter.  The check passes when
    no sampled word gains more than c_single per letter, i.e. increments are
    subadditive along words.
    """
    g = VERTICAL_ARC.vertices if gamma is None else np.asarray(gamma, dtype=float)
    for lift in generator_lifts:
        check_equivariance(lift)
        if not fixes_gamma_endpoints(lift, g):
            raise ValueError(f"generator {lift.name} does not fix the endpoints of gamma")
    base = crossing_count_L(arc, gamma)
    c_single = 0.0
    for i in range(len(generator_lifts)):
        for s in (1, -1):
            w = Word(((i, s),))
            c_single = max(c_single, crossing_count_L(Arc(apply_word(generator_lifts, w, arc.vertices, max_seg)), gamma) - base)
    c_hat = 0.0
    worst = -math.inf
    for w in words:
        if len(w) == 0:
            continue
        inc = crossing_count_L(Arc(apply_word(generator_lifts, w, arc.vertices, max_seg)), gamma) - base
        c_hat = max(c_hat, inc / len(w))
        worst = max(worst, inc - c_single * len(w))
    return GrowthCheck(c_hat=c_hat, c_single=c_single, passed=worst <= 0, worst_excess=worst)


# ---------------------------------------------------------------- hyperbolic plane


@dataclass(frozen=True)
class Mobius:
    """z -> (az + b)/(cz + d) on the upper half-plane, normalized to det 1."""

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def of(cls, M) -> "Mobius":
        M = np.asarray(M, dtype=float)
        det = float(np.linalg.det(M))
        if det <= 0:
            raise ValueError("need det > 0")
        s = math.sqrt(det)
        return cls(M[0, 0] / s, M[0, 1] / s, M[1, 0] / s, M[1, 1] / s)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def trace(self) -> float:
        return self.a + self.d

    def __matmul__(self, other: "Mobius") -> "Mobius":
        return Mobius.of(self.matrix @ other.matrix)

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def boundary_map(self, x: float) -> float:
        if math.isinf(x):
            return math.inf if self.c == 0 else self.a / self.c
        den = self.c * x + self.d
        if den == 0:
            return math.inf
        return (self.a * x + self.b) / den


def mobius_classify(M: Mobius, tol: float = 1e-12) -> str:
    t = abs(M.trace())
    if abs(t - 2.0) <= tol:
        return "parabolic"
    return "elliptic" if t < 2.0 else "hyperbolic"


def boundary_fixed_points(M: Mobius) -> List[float]:
    """Fixed points on R u {inf} (inf stands for the point at infinity)."""
    a, b, c, d = M.a, M.b, M.c, M.d
    kind = mobius_classify(M)
    if kind == "elliptic":
        return []
    if c == 0:
        pts = [math.inf]
        if abs(a - d) > 1e-12:
            pts.append(b / (d - a) + 0.0)
        return pts
    disc = (a - d) ** 2 + 4 * b * c
    if kind == "parabolic":
        return [(a - d) / (2 * c)]
    r = math.sqrt(disc)
    return [((a - d) - r) / (2 * c) + 0.0, ((a - d) + r) / (2 * c) + 0.0]


def _multiplier(M: Mobius, x: float) -> float:
    """|derivative| of the boundary action at the fixed point x."""
    if math.isinf(x):
        # in the chart u = 1/x, u -> d u / (a + b u)
        return abs(M.d / M.a)
    return 1.0 / abs(M.c * x + M.d) ** 2


def axis_endpoints(M: Mobius) -> Tuple[float, float]:
    """(source, sink) of a hyperbolic element on the boundary of the upper half-plane."""
    if mobius_classify(M) != "hyperbolic":
        raise WrongType(f"{mobius_classify(M)} element has no axis")
    p, q = boundary_fixed_points(M)
    return (p, q) if _multiplier(M, p) > 1.0 else (q, p)


def translation_length_hyp(M: Mobius) -> float:
    return 2.0 * math.acosh(max(1.0, abs(M.trace()) / 2.0))


def _to_axis_frame(axis: Tuple[float, float], z):
    """Send source -> 0 and sink -> inf (an isometry up to orientation)."""
    src, snk = axis
    z = np.asarray(z, dtype=complex)
    if math.isinf(snk):
        return z - src
    if math.isinf(src):
        return -1.0 / (z - snk)
    return (z - src) / (z - snk)


def equivariant_projection(axis: Tuple[float, float], z, T: Mobius):
    """Orthogonal projection of z onto the axis, in units where T moves the axis by +1."""
    ell = translation_length_hyp(T)
    w = _to_axis_frame(axis, z)
    return np.log(np.abs(w)) / ell


def linear_tracing_estimate(
    h: Callable[[np.ndarray], np.ndarray], T: Mobius, z, n_max: int, samples: Optional[np.ndarray] = None
) -> List[Tuple[int, float, float]]:
    """Rows (n, |p(h^n z) - p(z)|/n, running minimum) for a map h commuting with T."""
    axis = axis_endpoints(T)
    if samples is None:
        rng = np.random.default_rng(0)
        samples = rng.uniform(-2, 2, 32) + 1j * rng.uniform(0.2, 3, 32)
    resid = np.max(np.abs(h(T(samples)) - T(h(samples))))
    if not resid < 1e-9:
        raise CommutationViolation(f"h and T fail to commute (residual {resid:.3g})")
    p0 = float(equivariant_projection(axis, z, T))
    w = np.asarray(z, dtype=complex)
    rows = []
    best = math.inf
    for n in range(1, n_max + 1):
        w = h(w)
        ratio = abs(float(equivariant_projection(axis, w, T)) - p0) / n
        best = min(best, ratio)
        rows.append((n, ratio, best))
    return rows


def axis_creep(T: Mobius, amplitude: float = 0.3) -> Callable[[np.ndarray], np.ndarray]:
    """A homeomorphism commuting with T that nudges points along the axis by a periodic amount.

    In the frame where the axis is the imaginary axis it is
    w -> w * exp(a * sin(2 pi log|w| / ell)); orbits converge to fixed
    level sets, so projected displacement stays bounded.
    """
    src, snk = axis_endpoints(T)
    ell = translation_length_hyp(T)
    if not (src == 0.0 and math.isinf(snk)):
        raise ValueError("axis_creep is defined for the axis from 0 to infinity")

    def h(z):
        z = np.asarray(z, dtype=complex)
        u = np.log(np.abs(z))
        return z * np.exp(amplitude * np.sin(2 * np.pi * u / ell))

    return h


# ---------------------------------------------------------------- named curves and arcs

CURVE_REGISTRY: Dict[str, Callable[[Sequence[float]], PolyCurve]] = {
    "e1": lambda ps: PolyCurve(np.array([[0.0, 0.0], [1.0, 0.0]])),
    "e2": lambda ps: PolyCurve(np.array([[0.0, 0.0], [0.0, 1.0]])),
    "diag": lambda ps: PolyCurve(np.array([[0.0, 0.0], [1.0, 1.0]])),
    "poly": lambda ps: PolyCurve(np.reshape(ps, (-1, 2))),
}

ARC_REGISTRY: Dict[str, Callable[[Sequence[float]], Arc]] = {
    "vertical": lambda ps: VERTICAL_ARC.translate(ps[0] if ps else 0.0),
    "poly": lambda ps: Arc(np.reshape(ps, (-1, 2))),
}


def _parse(spec: str, registry):
    name, _, rest = spec.partition(":")
    if name not in registry:
        raise UnknownSpec(name)
    params = [float(p) for p in rest.split(",") if p.strip()] if rest else []
    return registry[name](params)


def build_curve(spec: str) -> PolyCurve:
    return _parse(spec, CURVE_REGISTRY)


def build_arc(spec: str) -> Arc:
    return _parse(spec, ARC_REGISTRY)
