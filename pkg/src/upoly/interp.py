"""Interpolation of integer polynomials with unbalanced coefficients.

The driver recovers an unknown polynomial from a derivative black box in
slices ordered by coefficient size: find a small superset of the
exponents carrying the very largest coefficients, read those
coefficients off modular images, subtract, square-root the height bound,
and repeat until the leftovers are small enough for a guess-and-verify
base interpolator.  Every routine takes explicit size bounds (s, D, H)
and an explicit rng; randomness never comes from global state.

All coefficient-magnitude thresholds are exact integer comparisons.
Fractional powers of H never go through floats: a >= H^(num/den) is
decided by cross-powering both sides.  Only iteration counts and prime
window sizes, which are machine-sized, use double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .blackbox import MDBB, explicit_mdbb, mdbb_image, sum_mdbb
from .modring import build_pru, integer_root_floor, random_prime
from .polycore import (
    SparsePoly,
    bitlen_int,
    bitlen_nat,
    bitlen_poly,
    signed_lift,
    sparsity_bound,
)

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = None


def _pow_exact(a: int, j: int) -> int:
    if _mpz is not None and a.bit_length() * j > 4096:
        return int(_mpz(a) ** j)
    return a ** j


def _cross_ge(a: int, ja: int, b: int, jb: int) -> bool:
    """Exact test a**ja >= b**jb for nonnegative a, b.

    Bit-length bounds decide almost every instance without computing the
    powers; only the narrow ambiguous band pays for exact powering.
    """
    if b == 0:
        return True
    if a == 0:
        return False
    lo_a = ja * (a.bit_length() - 1) + 1
    hi_a = ja * a.bit_length()
    lo_b = jb * (b.bit_length() - 1) + 1
    hi_b = jb * b.bit_length()
    if lo_a > hi_b:
        return True
    if hi_a < lo_b:
        return False
    return _pow_exact(a, ja) >= _pow_exact(b, jb)


@dataclass(frozen=True)
class CoeffClass:
    """Size class flags of one coefficient against a height bound H.

    small:  |c|**6 < H          medium: |c|**6 >= H
    large:  (2|c|)**30 >= H**13  huge:   c**2 >= H
    For the H ranges the interpolation routines accept, huge implies
    large implies medium.
    """

    small: bool
    medium: bool
    large: bool
    huge: bool
    H: int


def coeff_class(c: int, H: int) -> CoeffClass:
    if c == 0:
        raise ValueError("coefficient classes are defined for nonzero c")
    if H < 2:
        raise ValueError("height bound must be at least 2")
    ac = abs(c)
    medium = _cross_ge(ac, 6, H, 1)
    return CoeffClass(
        small=not medium,
        medium=medium,
        large=_cross_ge(2 * ac, 30, H, 13),
        huge=_cross_ge(ac, 2, H, 1),
        H=H,
    )


def _is_large(c: int, H: int) -> bool:
    return c != 0 and _cross_ge(2 * abs(c), 30, H, 13)


def _is_half_huge(c: int, H: int) -> bool:
    # |c| >= H**(1/2) / 2, exactly
    return c != 0 and _cross_ge(2 * abs(c), 2, H, 1)


def round_div_away(b: int, a: int) -> int:
    """Nearest integer to b/a, ties rounded away from zero."""
    if a == 0:
        raise ZeroDivisionError("round_div_away by zero")
    q = (2 * abs(b) + abs(a)) // (2 * abs(a))
    return q if (a < 0) == (b < 0) else -q


def _lg(x) -> float:
    return math.log2(x) if x >= 2 else 0.0


def _check_slice_bounds(s: int, D: int, H: int):
    # exact forms of log2(H) >= max(61, 15 log2 s, 6 log2 D)
    if s < 2 or D < 0:
        raise ValueError("need s >= 2 and D >= 0")
    if H < (1 << 61) or H < s ** 15 or H < D ** 6:
        raise ValueError("height bound too small for these s, D")


@dataclass(frozen=True)
class SliceParams:
    """Derived parameters of one support/slice pass."""

    lam: int
    iters: int
    m_min: int
    t_cap: int


def slice_params(s: int, D: int, H: int) -> SliceParams:
    _check_slice_bounds(s, D, H)
    log_h = math.log2(H)
    return SliceParams(
        lam=max(21, math.ceil(18 * s * _lg(D) / log_h)),
        iters=math.ceil(2 * math.log2(s)) + 3,
        m_min=4 * (integer_root_floor(H ** 7, 6) + 1),
        t_cap=math.floor(60 * s * (math.log2(s) + 2) / (13 * log_h)),
    )


def support_superset(pi: MDBB, s: int, D: int, H: int, rng, trace=None) -> set:
    """Exponent set containing, with high probability, every exponent
    whose residual coefficient is large.

    Each round folds the polynomial at a random prime length and divides
    the shifted-derivative image by the function image in every slot that
    looks large: a collision-free slot yields coefficient c and c*e, and
    the carry tolerance of the rounded division survives the small terms
    that may share the slot.  Returns the empty set if more candidates
    accumulate than the size cap allows, which signals a bad run rather
    than a usable superset.
    """
    params = slice_params(s, D, H)
    found: set = set()
    for _ in range(params.iters):
        p = random_prime(params.lam, rng)
        ctx = build_pru(p, params.m_min, rng)
        if trace is not None:
            trace.append(
                {"stage": "support_prime", "p": p, "m_bits": ctx.m.bit_length()}
            )
        g, h = mdbb_image(pi, ctx)
        hd = {e: c for c, e in h.terms}
        for c, e in g.terms:
            a = signed_lift(c, ctx.m)
            if not _is_large(a, H):
                continue
            b = signed_lift(hd.get(e, 0), ctx.m)
            cand = round_div_away(b, a)
            if 0 <= cand <= D and cand not in found:
                if len(found) >= params.t_cap:
                    return set()
                found.add(cand)
    return found


def uinterpolate_slice(pi: MDBB, s: int, D: int, H: int, rng, trace=None) -> SparsePoly:
    """Approximation f* of the residual f containing its huge terms.

    After this returns, height(f - f*) < sqrt(H) unless the run hit a bad
    random event (a large exponent missed by the superset, or colliding
    in every recovery round).  The output never exceeds s total bits; a
    run that would exceed it returns 0 instead.
    """
    n0 = len(trace) if trace is not None else 0
    T = support_superset(pi, s, D, H, rng, trace)
    fd: dict = {}
    if T:
        lam = max(21, math.ceil(3 * len(T) * _lg(D)))
        iters = math.ceil(2 * math.log2(s)) + 3
        total_bits = 0
        t_sorted = sorted(T)
        for _ in range(iters):
            p = random_prime(lam, rng)
            ctx = build_pru(p, 4 * H, rng)
            if trace is not None:
                trace.append(
                    {"stage": "recovery_prime", "p": p, "m_bits": ctx.m.bit_length()}
                )
            f_star = SparsePoly()
            f_star.terms = tuple((-fd[e], e) for e in sorted(fd))
            resid = sum_mdbb(pi, explicit_mdbb(f_star))
            g, _ = mdbb_image(resid, ctx, want_h=False)
            gd = {e: c for c, e in g.terms}
            buckets: dict = {}
            for e in t_sorted:
                buckets.setdefault(e % p, []).append(e)
            for r in sorted(buckets):
                es = buckets[r]
                if len(es) != 1 or es[0] in fd:
                    continue
                c = signed_lift(gd.get(r, 0), ctx.m)
                if not _is_half_huge(c, H):
                    continue
                e = es[0]
                total_bits += bitlen_int(c) + bitlen_nat(e)
                if total_bits > s:
                    if trace is not None:
                        trace.append({"stage": "slice_overflow"})
                    return SparsePoly.zero()
                fd[e] = c
    out = SparsePoly()
    out.terms = tuple((fd[e], e) for e in sorted(fd))
    if trace is not None:
        primes = [t["p"] for t in trace[n0:] if "p" in t]
        trace.append(
            {
                "stage": "slice",
                "h_bits": H.bit_length() - 1,
                "support": tuple(sorted(T)),
                "t_support": len(T),
                "recovered": len(out.terms),
                "max_p": max(primes, default=0),
                "max_m_bits": max(
                    (t["m_bits"] for t in trace[n0:] if "m_bits" in t), default=0
                ),
            }
        )
    return out


def zero_test(pi: MDBB, f_star: SparsePoly, eps, rng, *, d_bound=None, s_bound=None) -> bool:
    """Probabilistic test of whether pi's hidden polynomial equals f_star.

    Always true when they are equal.  When they differ, each repetition
    catches the difference delta with probability at least 1/2: a prime
    p > 3*d_bound makes the exponents of delta collision-free mod p, a
    random omega of order p modulo a random prime q is a root of the
    nonzero folded delta with probability below 1/3, and q dividing every
    coefficient of delta is pushed below 1/6 by drawing q from a window
    larger than the count of primes that can divide a given coefficient.
    ceil(log2(1/eps)) repetitions bring the false-pass rate under eps.

    d_bound and s_bound must bound the degree and the bit-length of the
    hidden difference for the eps guarantee to hold; the defaults only
    extrapolate from f_star and are for exploratory use.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if d_bound is None:
        d_bound = 2 * (f_star.degree() + 1) + 64
    if s_bound is None:
        s_bound = 2 * bitlen_poly(f_star) + 256
    reps = max(1, math.ceil(math.log2(1 / float(eps))))
    resid = sum_mdbb(pi, explicit_mdbb(-f_star))
    lam = max(21, 3 * (d_bound + 1))
    window = 32 * max(64, s_bound)
    for _ in range(reps):
        p = random_prime(lam, rng)
        ctx = build_pru(p, 2, rng, q_window=window)
        alphas, gammas = resid.eval(p, ctx.omega, ctx.m, 2)
        if any(alphas) or any(gammas):
            return False
    return True


def balanced_interpolate(pi: MDBB, T: int, D: int, H: int, eps, rng):
    """Guess-and-verify interpolation under balanced bounds.

    Recovers the hidden f with at most T terms, degree at most D and
    height at most H, with success probability at least 1 - eps when the
    bounds hold.  Each round reads candidate (coefficient, exponent)
    pairs off a modular image, keeps the exact fits, and asks zero_test
    whether the accumulated guess already matches.  Returns None if no
    round verifies (the explicit failure marker).
    """
    if T < 1 or D < 0 or H < 1:
        raise ValueError("need T >= 1, D >= 0, H >= 1")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    rounds = math.ceil(math.log2(T + 1)) * math.ceil(math.log2(3 / float(eps))) + 4
    lam = max(21, math.ceil(6 * T * math.log2(D + 2)))
    m_min = 2 * max(1, D) * H + 1
    eps_z = eps / (3 * rounds)
    # bound on the bit-length of f - f*: at most 3T terms, each of height
    # at most H and exponent at most D
    s_bound = 3 * T * (1 + bitlen_nat(H) + bitlen_nat(D))
    fd: dict = {}
    for _ in range(rounds):
        p = random_prime(lam, rng)
        ctx = build_pru(p, m_min, rng)
        f_star = SparsePoly()
        f_star.terms = tuple((-fd[e], e) for e in sorted(fd))
        g, h = mdbb_image(sum_mdbb(pi, explicit_mdbb(f_star)), ctx)
        hd = {e: c for c, e in h.terms}
        for c, e_r in g.terms:
            a = signed_lift(c, ctx.m)
            b = signed_lift(hd.get(e_r, 0), ctx.m)
            e = round_div_away(b, a)
            if 0 <= e <= D and b == a * e:
                merged = fd.get(e, 0) + a
                if merged:
                    fd[e] = merged
                elif e in fd:
                    del fd[e]
        for e in [e for e, c in fd.items() if abs(c) > H]:
            del fd[e]
        if len(fd) > 2 * T:
            keep = sorted(fd.items(), key=lambda ec: (-abs(ec[1]), ec[0]))[: 2 * T]
            fd = dict(keep)
        guess = SparsePoly(((c, e) for e, c in fd.items()))
        if zero_test(pi, guess, eps_z, rng, d_bound=D, s_bound=s_bound):
            return guess
    return None


def uinterpolate(pi: MDBB, s: int, D: int, rng, reps_override=None, trace=None) -> SparsePoly:
    """Full interpolation of an unbalanced polynomial from its MDBB.

    Slices off the hugest coefficients while the height bound 2**e_H
    stays above the slice preconditions, halving e_H each pass, then
    finishes with majority-voted runs of the balanced interpolator on the
    residue.  The returned polynomial always satisfies
    bitlen_poly <= s and degree <= D; when the true polynomial meets the
    bounds, the result equals it with high probability.

    reps_override replaces the default majority-vote count, which is
    sized for a strong failure bound and is slow at small scales.
    """
    if s < 2 or D < 0:
        raise ValueError("need s >= 2 and D >= 0")
    f_star = SparsePoly.zero()
    e_h = s
    if s >= 4 and D >= 1:
        threshold = max(
            61,
            math.ceil(15 * math.log2(s)),
            math.ceil(6 * math.log2(D + 2)),
        )
        while e_h >= threshold:
            resid = sum_mdbb(pi, explicit_mdbb(-f_star))
            delta = uinterpolate_slice(resid, s, D, 1 << e_h, rng, trace)
            f_star = f_star + delta
            if bitlen_poly(f_star) > s:
                return SparsePoly.zero()
            e_h = (e_h + 1) // 2
    T = sparsity_bound(s)
    reps = reps_override if reps_override else math.ceil(48 * math.log(2 * s))
    resid = sum_mdbb(pi, explicit_mdbb(-f_star))
    base_h = 1 << e_h
    counts: dict = {}
    for _ in range(reps):
        result = balanced_interpolate(resid, T, D, base_h, 1 / 3, rng)
        if result is not None:
            counts[result] = counts.get(result, 0) + 1
    winner = None
    for poly, n in counts.items():
        if 2 * n > reps:
            winner = poly
            break
    if trace is not None:
        trace.append(
            {
                "stage": "base",
                "h_bits": e_h,
                "reps": reps,
                "majority": max(counts.values(), default=0),
            }
        )
    if winner is None:
        return SparsePoly.zero()
    out = f_star + winner
    if bitlen_poly(out) > s or out.degree() > D:
        return SparsePoly.zero()
    return out
