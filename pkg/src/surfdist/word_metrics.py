"""Words, Cayley-ball BFS, certificates and distortion ratio series.

Word length counts every token as 1, inverses included: the generating set
is always the symmetric closure of the listed generators.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

Token = Tuple[int, int]


class BallTooLarge(RuntimeError):
    def __init__(self, radius_reached: int, nodes: int, sphere_sizes: List[int]):
        super().__init__(f"node cap exceeded at radius {radius_reached} with {nodes} nodes stored")
        self.radius_reached = radius_reached
        self.nodes = nodes
        self.sphere_sizes = sphere_sizes


class UnverifiedCertificate(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    tokens: Tuple[Token, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple((int(g), int(s)) for g, s in self.tokens))
        for g, s in self.tokens:
            if s not in (1, -1) or g < 0:
                raise ValueError(f"bad token {(g, s)}")

    @classmethod
    def power(cls, gen: int, k: int) -> "Word":
        s = 1 if k >= 0 else -1
        return cls(((gen, s),) * abs(k))

    def __add__(self, other: "Word") -> "Word":
        return Word(self.tokens + other.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def inverse(self) -> "Word":
        return Word(tuple((g, -s) for g, s in reversed(self.tokens)))

    @property
    def token_count(self) -> int:
        return len(self.tokens)

    def to_list(self) -> List[List[int]]:
        return [[g, s] for g, s in self.tokens]


def commutator(u: Word, v: Word) -> Word:
    """u v u^-1 v^-1."""
    return u + v + u.inverse() + v.inverse()


@dataclass(frozen=True)
class GroupOracle:
    """Black-box access to a finitely generated group with exact equality via `key`."""

    name: str
    generators: Tuple[Any, ...]
    multiply: Callable[[Any, Any], Any]
    invert: Callable[[Any], Any]
    key: Callable[[Any], Hashable]
    identity: Any
    gen_names: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.gen_names:
            object.__setattr__(self, "gen_names", tuple(f"g{i}" for i in range(len(self.generators))))

    def letters(self) -> List[Tuple[Token, Any]]:
        """Symmetric generating set as (token, element), in a fixed order."""
        out = []
        for i, g in enumerate(self.generators):
            out.append(((i, 1), g))
            out.append(((i, -1), self.invert(g)))
        return out

    def equal(self, g, h) -> bool:
        return self.key(g) == self.key(h)


def eval_word(oracle: GroupOracle, w: Word):
    result = oracle.identity
    n = len(oracle.generators)
    inverses = {}
    for g, s in w.tokens:
        if g >= n:
            raise IndexError(f"generator index {g} out of range for {oracle.name} ({n} generators)")
        if s == 1:
            elt = oracle.generators[g]
        else:
            if g not in inverses:
                inverses[g] = oracle.invert(oracle.generators[g])
            elt = inverses[g]
        result = oracle.multiply(result, elt)
    return result


@dataclass
class CayleyBall:
    radius: int
    table: Dict[Hashable, int]
    sphere_sizes: List[int] = field(default_factory=list)

    def length(self, key: Hashable) -> Optional[int]:
        return self.table.get(key)

    def __len__(self) -> int:
        return len(self.table)


def _expand(oracle: GroupOracle, letters, chunk) -> List[Tuple[Hashable, Any]]:
    out = []
    for elt in chunk:
        for _, gen in letters:
            nxt = oracle.multiply(elt, gen)
            out.append((oracle.key(nxt), nxt))
    return out


def cayley_ball(
    oracle: GroupOracle,
    radius: int,
    node_cap: int = 10**6,
    threads: int = 1,
    frontier_order: Optional[Callable[[List[Any]], List[Any]]] = None,
) -> CayleyBall:
    """Exact word lengths of every element within `radius` of the identity.

    The frontier is expanded level by level. Every element discovered at a
    given level gets the same length no matter who finds it first, so the
    table does not depend on `threads` or `frontier_order` (the latter exists
    to let tests shuffle the frontier).
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if node_cap <= 0:
        raise ValueError("node_cap must be positive")
    letters = oracle.letters()
    table: Dict[Hashable, int] = {oracle.key(oracle.identity): 0}
    frontier = [oracle.identity]
    sizes = [1]
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for r in range(1, radius + 1):
            if frontier_order is not None:
                frontier = frontier_order(list(frontier))
            if pool is None:
                found = _expand(oracle, letters, frontier)
            else:
                step = max(1, -(-len(frontier) // (4 * threads)))
                chunks = [frontier[i:i + step] for i in range(0, len(frontier), step)]
                found = [p for part in pool.map(lambda c: _expand(oracle, letters, c), chunks) for p in part]
            nxt = []
            for k, elt in found:
                if k not in table:
                    table[k] = r
                    nxt.append(elt)
                    if len(table) > node_cap:
                        raise BallTooLarge(r, len(table), sizes + [len(nxt)])
            frontier = nxt
            sizes.append(len(nxt))
            if not frontier:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return CayleyBall(radius=radius, table=table, sphere_sizes=sizes)


def word_length_exact(oracle: GroupOracle, target, radius: int, node_cap: int = 10**6) -> Optional[int]:
    """Distance from the identity to `target`, or None if it exceeds `radius`."""
    ball = cayley_ball(oracle, radius, node_cap)
    return ball.length(oracle.key(target))


def translation_length_estimate(
    oracle: GroupOracle, g, n_max: int, radius: int, node_cap: int = 10**6
) -> Optional[List[Tuple[int, int, float, float]]]:
    """Rows (n, |g^n|, |g^n|/n, running minimum) for every n <= n_max resolved in the ball.

    The running minimum bounds the translation length from above.
    Returns None when no power is resolved.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ball = cayley_ball(oracle, radius, node_cap)
    rows = []
    best = float("inf")
    power = oracle.identity
    for n in range(1, n_max + 1):
        power = oracle.multiply(power, g)
        d = ball.length(oracle.key(power))
        if d is None:
            continue
        ratio = d / n
        best = min(best, ratio)
        rows.append((n, d, ratio, best))
    return rows or None


@dataclass
class Certificate:
    """A word claimed to spell the element g^power.

    `n` is the construction parameter (e.g. the A-exponent of the Mess word);
    `power` is the exponent of the distorted element that the word realizes.
    """

    group: str
    n: int
    power: int
    target: Any
    word: Word
    verified: bool = False

    @property
    def tokens(self) -> int:
        return self.word.token_count

    def to_dict(self, target_key: str) -> Dict[str, Any]:
        return {
            "group": self.group,
            "n": self.n,
            "power": self.power,
            "target": target_key,
            "word": self.word.to_list(),
            "tokens": self.tokens,
            "verified": self.verified,
        }


def verify_certificate(oracle: GroupOracle, cert: Certificate) -> bool:
    try:
        value = eval_word(oracle, cert.word)
    except IndexError:
        return False
    return oracle.equal(value, cert.target)


def distortion_series(
    oracle: GroupOracle, cert_gen: Callable[[int], Certificate], ns: Iterable[int]
) -> List[Tuple[int, int, float, float]]:
    """Rows (power, tokens, tokens/power, running minimum) for certificates cert_gen(n).

    Every certificate is re-verified; the running minimum is the computed
    liminf envelope and is never extrapolated.
    """
    rows = []
    best = float("inf")
    for n in ns:
        cert = cert_gen(n)
        if not verify_certificate(oracle, cert):
            raise UnverifiedCertificate(f"{cert.group} certificate n={n} does not evaluate to its target")
        cert.verified = True
        ratio = cert.tokens / cert.power
        best = min(best, ratio)
        rows.append((cert.power, cert.tokens, ratio, best))
    return rows


def format_number(x) -> str:
    if isinstance(x, int):
        return str(x)
    return f"{x:.12g}"


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v for v in row])
    return buf.getvalue()


def series_csv(rows) -> str:
    return write_csv(["power", "tokens", "ratio", "envelope"], rows)


def certificates_json(certs: Sequence[Certificate], key_str: Callable[[Any], str]) -> str:
    return json.dumps([c.to_dict(key_str(c.target)) for c in certs], sort_keys=True, indent=1)
