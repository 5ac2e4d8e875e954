"""Batch command line: every experiment writes JSON or CSV to stdout or --out.

Exit codes: 0 ok, 2 certificate verification failed, 3 overflow,
4 Cayley ball too large, 5 unknown registry name.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from . import model_groups as mg
from .rotation_dynamics import UnknownLift, build_lift, rotation_vector
from .spread_growth import LengthOverflow, UnknownSpec, build_arc, build_curve, egr, spread
from .word_metrics import BallTooLarge, Word, cayley_ball, distortion_series, eval_word, verify_certificate, write_csv

EXIT_VERIFY, EXIT_OVERFLOW, EXIT_BALL, EXIT_REGISTRY = 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, name: str, message: str, code: int):
        super().__init__(message)
        self.name = name
        self.code = code


class PartialOutput(Exception):
    """Carries output that must still be written before failing."""

    def __init__(self, text: str, error: CliError):
        self.text = text
        self.error = error


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _floats(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _lift(spec: str):
    try:
        return build_lift(spec)
    except UnknownLift as e:
        raise CliError("UnknownLift", f"no lift named {e.args[0]!r}", EXIT_REGISTRY)


def _group(name: str):
    if name not in mg.GROUPS:
        raise CliError("UnknownGroup", f"no group named {name!r}", EXIT_REGISTRY)
    return mg.GROUPS[name]


def cmd_distortion(args) -> str:
    make_oracle, make_cert = _group(args.group)
    oracle = make_oracle()
    ns = range(1, args.n_max + 1)
    certs = [make_cert(n) for n in ns]
    for c in certs:
        c.verified = verify_certificate(oracle, c)
    bad = [c.n for c in certs if not c.verified]
    if bad:
        raise CliError("UnverifiedCertificate", f"certificates failed for n={bad}", EXIT_VERIFY)
    rows = distortion_series(oracle, make_cert, ns)
    if args.format == "csv":
        return write_csv(["power", "tokens", "ratio", "envelope"], rows)
    return _dump({
        "group": args.group,
        "certificates": [c.to_dict(mg.element_str(c.target)) for c in certs],
        "series": [dict(zip(("power", "tokens", "ratio", "envelope"), r)) for r in rows],
    })


def _parse_key(group: str, text: str):
    vals = [int(t) for t in text.split(",")]
    if group == "psl2sqrt2":
        if len(vals) != 8:
            raise ValueError("psl2sqrt2 keys are 8 integers a11,b11,a12,b12,a21,b21,a22,b22")
        return tuple(zip(vals[0::2], vals[1::2]))
    if len(vals) != 3:
        raise ValueError(f"{group} keys are 3 integers")
    return tuple(vals)


def cmd_cayley(args) -> str:
    make_oracle, _ = _group(args.group)
    oracle = make_oracle()
    try:
        ball = cayley_ball(oracle, args.radius, args.node_cap, threads=args.threads)
        sizes, status = ball.sphere_sizes, "complete"
    except BallTooLarge as e:
        sizes, status = e.sphere_sizes, "node_cap_exceeded"
        ball = None
    out = {
        "group": args.group,
        "radius": args.radius,
        "status": status,
        "sphere_sizes": sizes,
        "ball_sizes": [int(x) for x in np.cumsum(sizes)],
    }
    if args.target is not None:
        out["target"] = args.target
        out["length"] = None if ball is None else ball.length(_parse_key(args.group, args.target))
    text = _dump(out)
    if ball is None:
        raise PartialOutput(text, CliError("BallTooLarge", f"node cap {args.node_cap} exceeded", EXIT_BALL))
    return text


def cmd_rotation(args) -> str:
    lift = _lift(args.lift)
    x = _floats(args.x)
    report = rotation_vector(lift, x, args.n, args.tol)
    if args.format == "json":
        return _dump({
            "lift": args.lift,
            "x": x,
            "estimate": [float(v) for v in report.estimate],
            "window_variation": report.window_variation,
            "n_used": report.n_used,
            "converged": report.converged,
        })
    checkpoints = sorted({k for k in (16 * 2 ** j for j in range(64)) if k < args.n} | {args.n})
    rows = []
    for k in checkpoints:
        est = (lift.iterate(np.asarray(x), k) - np.asarray(x)) / k
        rows.append([k, *[float(v) for v in est]])
    return write_csv(["n"] + [f"value_{i}" for i in range(lift.dim)], rows)


def cmd_egr(args) -> str:
    lift = _lift(args.map)
    try:
        curve = build_curve(args.curve)
    except UnknownSpec as e:
        raise CliError("UnknownCurve", f"no curve named {e.args[0]!r}", EXIT_REGISTRY)
    try:
        rows = egr(lift, curve, args.n_max, args.max_seg)
    except LengthOverflow as e:
        raise CliError("LengthOverflow", str(e), EXIT_OVERFLOW)
    return write_csv(["n", "length", "ratio", "envelope"], rows)


def cmd_spread(args) -> str:
    lift = _lift(args.map)
    try:
        arc = build_arc(args.arc)
    except UnknownSpec as e:
        raise CliError("UnknownArc", f"no arc named {e.args[0]!r}", EXIT_REGISTRY)
    rows = spread(lift, arc, args.n_max, args.max_seg)
    return write_csv(["n", "L", "ratio", "envelope"], rows)


def cmd_calegari(args) -> str:
    action = mg.calegari_action(float(args.alpha))
    return _dump({
        "alpha": float(args.alpha),
        "commutator_is_translation": action.commutator_is_F(),
        "quotient_compatible": action.quotient_compatible(),
        "F_at_origin": [str(action.F(0, 0)[i].c0) for i in range(2)],
        "fiber_rotation_number": action.fiber_rotation_number(args.n),
        "n": args.n,
    })


def _parse_psl_word(text: str) -> Word:
    letters = {"A": (0, 1), "a": (0, -1), "B": (1, 1), "b": (1, -1)}
    try:
        return Word(tuple(letters[c] for c in text.replace(",", "").replace(" ", "")))
    except KeyError as e:
        raise CliError("UnknownLetter", f"letter {e.args[0]!r} is not one of A, a, B, b", EXIT_REGISTRY)


def cmd_psl2_embed(args) -> str:
    oracle = mg.psl2_generators()
    w = _parse_psl_word(args.word)
    g = eval_word(oracle, w)
    pair = mg.psl2_product_embedding(g)
    # psi as a homomorphism: the letterwise product of psi(generator) must agree
    prod = mg.Psl2Pair(oracle.identity, oracle.identity)
    for gen, s in w.tokens:
        gen_elt = oracle.generators[gen] if s == 1 else oracle.generators[gen].inverse()
        prod = prod @ mg.psl2_product_embedding(gen_elt)
    return _dump({
        "word": args.word,
        "g": str(pair.g.mat),
        "gbar": str(pair.gbar.mat),
        "homomorphism_check": prod == pair,
    })


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="surfdist", description=__doc__.splitlines()[0])
    p.add_argument("--out", help="write output here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("distortion", help="verified distortion certificates and ratio envelope")
    d.add_argument("group")
    d.add_argument("--n-max", type=int, default=6)
    d.add_argument("--format", choices=("json", "csv"), default="json")
    d.set_defaults(func=cmd_distortion)

    c = sub.add_parser("cayley", help="Cayley ball sizes and exact word length")
    c.add_argument("group")
    c.add_argument("--radius", type=int, required=True)
    c.add_argument("--target", help="comma-separated canonical key")
    c.add_argument("--node-cap", type=int, default=10**6)
    c.add_argument("--threads", type=int, default=1)
    c.set_defaults(func=cmd_cayley)

    r = sub.add_parser("rotation", help="rotation vector of a point under a named lift")
    r.add_argument("--lift", required=True)
    r.add_argument("--x", required=True, help="comma-separated coordinates")
    r.add_argument("--n", type=int, default=1000)
    r.add_argument("--tol", type=float, default=1e-3)
    r.add_argument("--format", choices=("json", "csv"), default="csv")
    r.set_defaults(func=cmd_rotation)

    e = sub.add_parser("egr", help="exponential growth rate of a closed curve")
    e.add_argument("--map", required=True)
    e.add_argument("--curve", required=True)
    e.add_argument("--n-max", type=int, default=12)
    e.add_argument("--max-seg", type=float, default=1e-2)
    e.set_defaults(func=cmd_egr)

    s = sub.add_parser("spread", help="spread of an arc in the annulus cover")
    s.add_argument("--map", required=True)
    s.add_argument("--arc", required=True)
    s.add_argument("--n-max", type=int, default=40)
    s.add_argument("--max-seg", type=float, default=1e-2)
    s.set_defaults(func=cmd_spread)

    k = sub.add_parser("calegari", help="checks on the Heisenberg action on the plane")
    k.add_argument("--alpha", default="1.4142135623730951")
    k.add_argument("--n", type=int, default=10_000)
    k.set_defaults(func=cmd_calegari)

    m = sub.add_parser("psl2-embed", help="image of a word under g -> (g, conjugate g)")
    m.add_argument("--word", required=True, help="letters A, B and inverses a, b")
    m.set_defaults(func=cmd_psl2_embed)
    return p


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
    except PartialOutput as p:
        _emit(p.text, args.out)
        print(f"error: {p.error.name}: {p.error}", file=sys.stderr)
        return p.error.code
    except CliError as e:
        print(f"error: {e.name}: {e}", file=sys.stderr)
        return e.code
    _emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
