"""Command-line front end.

Subcommands: gen (seeded instance generation), mul (verified product),
interp (black-box interpolation), verify (probabilistic product check),
bench (scaling measurements as CSV).  stdout carries only the output
artifact path or the accept/reject verdict; measurements go to a JSON or
CSV file named by the caller.  Exit codes: 0 success or accept, 1
verification reject, 2 usage or parse errors.

All randomness flows from one --seed value, expanded per call site by
hashing a site label, so outputs are reproducible and adding a
subcommand does not shift the streams of the others.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import modring
from .blackbox import EvalStats, SlpError, explicit_mdbb, mbb_to_mdbb, parse_slp, slp_mbb
from .interp import uinterpolate
from .mul import unbalanced_prod, verif_prod
from .polycore import (
    SparsePoly,
    SpolyError,
    bitlen_int,
    bitlen_nat,
    bitlen_poly,
    dump_spoly,
    kronecker_mul,
    parse_spoly,
    schoolbook_mul,
)


@dataclass
class GenProfile:
    """Shape of a generated instance.

    uniform: all coefficients near log2(s_target) bits.
    geometric: coefficient bit-lengths halving from s_target/4 down to 1.
    extreme: about s/(2 log2 s) tiny coefficients plus two of s/4 + 1
    bits, the shape that separates bit-length-sensitive algorithms from
    term-count-sensitive ones.
    """

    kind: str
    s_target: int
    d_max: int

    def __post_init__(self):
        if self.kind not in ("uniform", "geometric", "extreme"):
            raise ValueError("unknown profile kind %r" % self.kind)
        if self.d_max < 1:
            raise ValueError("d_max must be positive")
        floor = 48 if self.kind == "extreme" else 8
        if self.s_target < floor:
            raise ValueError(
                "%s profile needs s_target >= %d" % (self.kind, floor)
            )


def derive_rng(seed: int, label: str) -> random.Random:
    """Independent deterministic stream for one call site."""
    digest = hashlib.sha256(("%d:%s" % (seed, label)).encode()).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))


def _rand_coeff(rng: random.Random, bits: int) -> int:
    """Uniform signed coefficient of exactly the given magnitude bits."""
    c = 1 if bits <= 1 else rng.getrandbits(bits - 1) | (1 << (bits - 1))
    return -c if rng.randrange(2) else c


def gen_poly(profile: GenProfile, rng: random.Random) -> SparsePoly:
    """Seeded instance with bitlen_poly <= s_target and degree <= d_max.

    Terms are drawn in priority order (the extreme profile's two huge
    terms first) and greedily kept while they fit the bit budget, so the
    large structure survives trimming.
    """
    s, d = profile.s_target, profile.d_max
    pairs = []
    used = set()

    def draw_exp(cap):
        for _ in range(64):
            e = rng.randrange(cap + 1)
            if e not in used:
                used.add(e)
                return e
        return None

    if profile.kind == "extreme":
        # two huge terms: at s/4 + 1 magnitude bits their squares clear
        # any height bound up to 2**ceil(s/2); low exponents keep the
        # pair inside the budget for every s_target >= 48
        for _ in range(2):
            e = draw_exp(min(d, 255))
            if e is not None:
                pairs.append((_rand_coeff(rng, s // 4 + 1), e))
        n_small = math.ceil(s / (2 * math.log2(s)))
        small_bits = math.ceil(math.log2(s))
        for _ in range(n_small):
            e = draw_exp(d)
            if e is None:
                break
            pairs.append((_rand_coeff(rng, rng.randrange(1, small_bits + 1)), e))
    elif profile.kind == "uniform":
        bits = max(2, math.ceil(math.log2(s)))
        for _ in range(4 * s):
            e = draw_exp(d)
            if e is None:
                break
            pairs.append((_rand_coeff(rng, bits), e))
    else:
        bits = max(2, s // 4)
        while True:
            e = draw_exp(d)
            if e is None:
                break
            pairs.append((_rand_coeff(rng, bits), e))
            if bits == 1 and len(pairs) > 2 * math.ceil(math.log2(s)):
                break
            bits = max(1, bits // 2)

    kept = []
    budget = s
    for c, e in pairs:
        cost = bitlen_int(c) + bitlen_nat(e)
        if cost <= budget:
            kept.append((c, e))
            budget -= cost
    return SparsePoly(kept)


def _die(message: str):
    print("upoly: %s" % message, file=sys.stderr)
    sys.exit(2)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        _die("cannot read %s: %s" % (path, exc.strerror or exc))


def _read_poly(path: str) -> SparsePoly:
    try:
        return parse_spoly(_read_text(path))
    except SpolyError as exc:
        _die("%s: %s" % (path, exc))


def _write_stats(path, payload: dict):
    if path:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def _apply_dft_threshold(value):
    if value is not None:
        if value < 1:
            _die("--dft-threshold must be positive")
        modring.DFT_NAIVE_THRESHOLD = value


def cmd_gen(args) -> int:
    try:
        profile = GenProfile(args.profile, args.s, args.d)
    except ValueError as exc:
        _die(str(exc))
    f = gen_poly(profile, derive_rng(args.seed, "gen"))
    Path(args.out).write_text(dump_spoly(f))
    print(args.out)
    return 0


def cmd_mul(args) -> int:
    _apply_dft_threshold(args.dft_threshold)
    f = _read_poly(args.f)
    g = _read_poly(args.g)
    rng = derive_rng(args.seed, "mul")
    stats = EvalStats()
    trace = []
    t0 = time.perf_counter_ns()
    if args.algo == "schoolbook":
        h = schoolbook_mul(f, g)
    elif args.algo == "kronecker":
        h = kronecker_mul(f, g)
    else:
        h = unbalanced_prod(
            f,
            g,
            rng,
            fallback=args.fallback,
            majority_reps=args.majority_reps,
            trace=trace,
            stats=stats,
        )
    wall = time.perf_counter_ns() - t0
    Path(args.out).write_text(dump_spoly(h))
    _write_stats(
        args.stats,
        {
            "command": "mul",
            "algo": args.algo,
            "seed": args.seed,
            "wall_ns": wall,
            "ladder": trace,
            "mdbb": stats.as_dict(),
            "output_bitlen": bitlen_poly(h),
        },
    )
    print(args.out)
    return 0


def cmd_interp(args) -> int:
    _apply_dft_threshold(args.dft_threshold)
    if args.s < 2 or args.d < 0:
        _die("need --s >= 2 and --d >= 0")
    text = _read_text(args.source)
    header = text.splitlines()[0] if text.splitlines() else ""
    stats = EvalStats()
    source_poly = None
    if header == "spoly 1":
        try:
            source_poly = parse_spoly(text)
        except SpolyError as exc:
            _die("%s: %s" % (args.source, exc))
        pi = explicit_mdbb(source_poly, stats=stats)
    elif header == "slp 1":
        try:
            program = parse_slp(text)
        except SlpError as exc:
            _die("%s: %s" % (args.source, exc))
        pi = mbb_to_mdbb(slp_mbb(program), stats=stats)
    else:
        _die("%s: bad header: expected 'spoly 1' or 'slp 1'" % args.source)
    rng = derive_rng(args.seed, "interp")
    trace = []
    t0 = time.perf_counter_ns()
    out = uinterpolate(
        pi, args.s, args.d, rng, reps_override=args.majority_reps, trace=trace
    )
    wall = time.perf_counter_ns() - t0
    Path(args.out).write_text(dump_spoly(out))
    slices = [
        {
            "h_bits": row["h_bits"],
            "p": row["max_p"],
            "m_bits": row["max_m_bits"],
            "t_support": row["t_support"],
            "recovered": row["recovered"],
        }
        for row in trace
        if row["stage"] == "slice"
    ]
    base = next((row for row in trace if row["stage"] == "base"), None)
    if base is not None:
        base = {k: base[k] for k in ("h_bits", "reps", "majority")}
    warning = None if source_poly is None else out != source_poly
    _write_stats(
        args.stats,
        {
            "command": "interp",
            "s": args.s,
            "d": args.d,
            "seed": args.seed,
            "wall_ns": wall,
            "slices": slices,
            "base": base,
            "mdbb": stats.as_dict(),
            "output_bitlen": bitlen_poly(out),
            "warning": warning,
        },
    )
    print(args.out)
    return 0


def cmd_verify(args) -> int:
    if not 0 < args.eps < 1:
        _die("--eps must lie in (0, 1)")
    f = _read_poly(args.f)
    g = _read_poly(args.g)
    h = _read_poly(args.h)
    rng = derive_rng(args.seed, "verify")
    details = {}
    ok = verif_prod(f, g, h, args.eps, rng, details=details)
    print(
        "%s p=%d q=%d alpha=%d"
        % ("accept" if ok else "reject", details["p"], details["q"], details["alpha"])
    )
    _write_stats(
        args.stats,
        {"command": "verify", "accept": ok, "seed": args.seed, **details},
    )
    return 0 if ok else 1


_BENCH_ALGOS = ("unbalanced", "schoolbook", "kronecker")


def _bench_pair(family: str, s: int, d_max: int, seed: int, cofactor=None):
    f = gen_poly(
        GenProfile(family, s, d_max), derive_rng(seed, "bench:f:%s:%d" % (family, s))
    )
    if family == "extreme":
        # a small balanced cofactor: squaring two extreme operands would
        # make the product dense in huge terms and swamp every algorithm;
        # the cofactor term count multiplies the output bit-length, so the
        # default stays lean to keep the ladder measuring input size
        kind, cs, cd = cofactor or ("uniform", 8, 8)
        g = gen_poly(
            GenProfile(kind, cs, cd),
            derive_rng(seed, "bench:g:%s:%d" % (family, s)),
        )
    else:
        g = gen_poly(
            GenProfile(family, s, d_max),
            derive_rng(seed, "bench:g:%s:%d" % (family, s)),
        )
    return f, g


def _bench_row(task) -> dict:
    (family, s, d_max, algo, seed, majority_reps, fallback, dft_threshold,
     cofactor) = task
    if dft_threshold is not None:
        modring.DFT_NAIVE_THRESHOLD = dft_threshold
    f, g = _bench_pair(family, s, d_max, seed, cofactor)
    rng = derive_rng(seed, "bench:%s:%d:%s" % (family, s, algo))
    stats = EvalStats()
    t0 = time.perf_counter_ns()
    if algo == "schoolbook":
        h = schoolbook_mul(f, g)
    elif algo == "kronecker":
        h = kronecker_mul(f, g)
    else:
        h = unbalanced_prod(
            f, g, rng, fallback=fallback, majority_reps=majority_reps, stats=stats
        )
    wall = time.perf_counter_ns() - t0
    return {
        "algo": algo,
        "s": s,
        "D": max(f.degree(), g.degree()) + 1,
        "wall_ns": wall,
        "mdbb_calls": stats.calls,
        "sum_k": stats.sum_k,
        "max_p": stats.max_p,
        "max_logm": stats.max_logm,
        "output_bitlen": bitlen_poly(h),
    }


_BENCH_COLUMNS = (
    "algo",
    "s",
    "D",
    "wall_ns",
    "mdbb_calls",
    "sum_k",
    "max_p",
    "max_logm",
    "output_bitlen",
)


def bench_rows(family, ladder, algos, seed, d_scale=64, majority_reps=1,
               fallback=True, dft_threshold=None, jobs=1, cofactor=None):
    """One measurement row per (s, algo), in ladder-then-algo order.

    d_max grows as d_scale*s so the dense degree range outpaces the bit
    budget, the regime the unbalanced algorithm is built for.  cofactor
    optionally overrides the (kind, s_target, d_max) of the extreme
    family's second operand; the default is a 1-2 term uniform operand
    so the product bit-length, and with it the adaptive ladder's top
    rung, stays near s.
    """
    if list(ladder) != sorted(set(ladder)):
        raise ValueError("ladder must be strictly increasing")
    tasks = [
        (family, s, d_scale * s, algo, seed, majority_reps, fallback,
         dft_threshold, cofactor)
        for s in ladder
        for algo in algos
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_bench_row, tasks))
    return [_bench_row(t) for t in tasks]


def cmd_bench(args) -> int:
    try:
        ladder = [int(x) for x in args.ladder.split(",") if x]
    except ValueError:
        _die("--ladder takes comma-separated integers")
    algos = [a for a in args.algo.split(",") if a]
    for a in algos:
        if a not in _BENCH_ALGOS:
            _die("unknown algorithm %r" % a)
    try:
        rows = bench_rows(
            family=args.family,
            ladder=ladder,
            algos=algos,
            seed=args.seed,
            d_scale=args.d_scale,
            majority_reps=args.majority_reps,
            fallback=args.fallback,
            dft_threshold=args.dft_threshold,
            jobs=args.jobs,
        )
    except ValueError as exc:
        _die(str(exc))
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    print(args.out)
    return 0


def _add_common(sp, stats=True):
    sp.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    if stats:
        sp.add_argument("--stats", metavar="PATH", help="write stats JSON here")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="upoly",
        description="sparse integer polynomials with unbalanced coefficients",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="write a seeded random instance")
    sp.add_argument("--profile", choices=("uniform", "geometric", "extreme"),
                    default="uniform")
    sp.add_argument("--s", type=int, required=True, help="total bit budget")
    sp.add_argument("--d", type=int, required=True, help="max exponent")
    sp.add_argument("-o", "--out", default="gen.spoly")
    _add_common(sp, stats=False)
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("mul", help="multiply two spoly files")
    sp.add_argument("f")
    sp.add_argument("g")
    sp.add_argument("--algo", choices=_BENCH_ALGOS, default="unbalanced")
    sp.add_argument("--fallback", action=argparse.BooleanOptionalAction,
                    default=True,
                    help="exact fallback if verification keeps failing")
    sp.add_argument("--majority-reps", type=int, default=None,
                    help="override the interpolation majority vote count")
    sp.add_argument("--dft-threshold", type=int, default=None,
                    help="max transform length evaluated naively")
    sp.add_argument("-o", "--out", default="prod.spoly")
    _add_common(sp)
    sp.set_defaults(fn=cmd_mul)

    sp = sub.add_parser("interp", help="interpolate a black box (spoly or slp)")
    sp.add_argument("source")
    sp.add_argument("--s", type=int, required=True, help="output bit budget")
    sp.add_argument("--d", type=int, required=True, help="degree bound")
    sp.add_argument("--majority-reps", type=int, default=None)
    sp.add_argument("--dft-threshold", type=int, default=None)
    sp.add_argument("-o", "--out", default="interp.spoly")
    _add_common(sp)
    sp.set_defaults(fn=cmd_interp)

    sp = sub.add_parser("verify", help="probabilistic check of f*g == h")
    sp.add_argument("f")
    sp.add_argument("g")
    sp.add_argument("h")
    sp.add_argument("--eps", type=float, default=0.05,
                    help="false-accept probability bound")
    _add_common(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("bench", help="scaling measurements to CSV")
    sp.add_argument("--family", choices=("uniform", "geometric", "extreme"),
                    default="extreme")
    sp.add_argument("--ladder", default="64,128,256",
                    help="comma-separated increasing s values")
    sp.add_argument("--algo", default=",".join(_BENCH_ALGOS),
                    help="comma-separated algorithms")
    sp.add_argument("--d-scale", type=int, default=64,
                    help="degree bound per unit of s")
    sp.add_argument("--majority-reps", type=int, default=1,
                    help="interpolation majority votes per budget")
    sp.add_argument("--fallback", action=argparse.BooleanOptionalAction,
                    default=True)
    sp.add_argument("--dft-threshold", type=int, default=None)
    sp.add_argument("--jobs", type=int, default=1,
                    help="parallel workers for independent rows")
    sp.add_argument("-o", "--out", default="bench.csv")
    _add_common(sp, stats=False)
    sp.set_defaults(fn=cmd_bench)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
