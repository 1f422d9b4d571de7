"""Verified multiplication of sparse integer polynomials.

unbalanced_prod multiplies through the interpolation machinery: build a
product black box from the two inputs, guess an output size budget,
interpolate, and check the guess with a cheap probabilistic identity
test, doubling the budget on failure.  The verifier is one-sided: a
correct product always passes, a wrong one slips through with
probability below the caller's eps.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .blackbox import explicit_mdbb, prod_mdbb, sum_mdbb
from .interp import uinterpolate
from .modring import random_prime
from .polycore import SparsePoly, bitlen_poly, schoolbook_mul


def prod_bitlen_bound(ell: int) -> int:
    """Bit-length bound for a product of two ell-bit polynomials."""
    if ell < 2:
        raise ValueError("bound is defined for ell >= 2")
    return 2 * ell + math.ceil(4 * ell * ell / math.log2(ell))


def verif_prod(f: SparsePoly, g: SparsePoly, h: SparsePoly, eps, rng, details=None) -> bool:
    """Probabilistic check of f * g == h.

    Never rejects a true product.  A false h passes with probability
    below eps: the exponents fold along a random prime p large enough
    that a nonzero difference keeps a nonzero coefficient, and the folded
    difference is evaluated at a random point modulo a larger random
    prime q.  Runs in time near the total bit-length of the operands; in
    particular it never builds f * g.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    s = bitlen_poly(f) + bitlen_poly(g) + bitlen_poly(h)
    if f and g:
        d = max(f.degree() + g.degree(), h.degree())
    else:
        d = h.degree()
    inv_eps = Fraction(3, 1) / Fraction(eps)
    lam_p = max(21, math.ceil(inv_eps * max(s, d + 1)))
    p = random_prime(lam_p, rng)
    lam_q = max(21, math.ceil(inv_eps * max(2 * lam_p, s)))
    q = random_prime(lam_q, rng)
    alpha = rng.randrange(q)

    def fold_eval(poly: SparsePoly) -> int:
        folded: dict = {}
        for c, e in poly.terms:
            r = e % p
            folded[r] = (folded.get(r, 0) + c) % q
        return sum(c * pow(alpha, e, q) for e, c in folded.items()) % q

    if details is not None:
        details.update({"p": p, "q": q, "alpha": alpha})
    return (fold_eval(h) - fold_eval(f) * fold_eval(g)) % q == 0


def unbalanced_prod(
    f: SparsePoly,
    g: SparsePoly,
    rng,
    fallback: bool = True,
    majority_reps=None,
    trace=None,
    stats=None,
) -> SparsePoly:
    """Product f * g, adaptive in the bit-length of the output.

    Interpolates the product from a derivative black box under a doubling
    size budget, accepting the first candidate the verifier passes.  The
    error probability per verification is far below one over the number
    of budgets tried.  With fallback enabled (the default) a final failed
    verification is replaced by an exact schoolbook product, so the
    result is then unconditionally correct.
    """
    ell = max(bitlen_poly(f), bitlen_poly(g), 2)
    s_max = prod_bitlen_bound(ell)
    eps = Fraction(1, s_max * (8 * ell + 4))
    d = max(f.degree(), g.degree()) + 1
    pi = prod_mdbb(explicit_mdbb(f), explicit_mdbb(g), stats=stats)
    h = SparsePoly.zero()
    s = ell
    while s < 2 * s_max and not verif_prod(f, g, h, eps, rng):
        h = uinterpolate(pi, s, 2 * d, rng, reps_override=majority_reps)
        if trace is not None:
            trace.append({"stage": "ladder", "s": s, "h_terms": len(h.terms)})
        s *= 2
    if fallback and not verif_prod(f, g, h, eps, rng):
        h = schoolbook_mul(f, g)
        if trace is not None:
            trace.append({"stage": "fallback"})
    return h
