"""Exact sparse polynomials over the integers, with bit-size accounting.

A polynomial is kept as a tuple of (coefficient, exponent) terms in a
normal form: exponents strictly increasing, no zero coefficients.
Coefficients are arbitrary-precision signed integers; exponents must fit
below 2**63.  Sizes are measured in bits.  A natural number a costs
ceil(log2(a + 1)) bits, a signed integer one more for the sign, and a
polynomial the sum over its terms of coefficient plus exponent cost.
That total is the size parameter the interpolation and multiplication
routines are output-sensitive in.
"""

from __future__ import annotations

import math

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - plain ints are correct, just slower
    _mpz = None

MAX_EXPONENT = (1 << 63) - 1

# A dense Kronecker buffer must stay inside the address space; beyond this
# the caller gets CapacityError rather than a MemoryError mid-multiply.
PACK_CAP_BYTES = 1 << 31

# Below this many total bits plain int multiply beats the conversion cost.
_GMP_CUTOVER_BITS = 1 << 14


class CapacityError(ValueError):
    """A dense packing would exceed the supported address space."""


class SpolyError(ValueError):
    """Malformed spoly text; .line holds the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__("line %d: %s" % (line, message))
        self.line = line


def bitlen_nat(a: int) -> int:
    """Bit length of a natural number, ceil(log2(a + 1))."""
    if a < 0:
        raise ValueError("bitlen_nat needs a nonnegative integer")
    return a.bit_length()


def bitlen_int(a: int) -> int:
    """Bit length of a signed integer: one sign bit plus bitlen_nat(|a|)."""
    return 1 + abs(a).bit_length()


class SparsePoly:
    """Normalized sparse integer polynomial.

    Construct from any iterable of (coefficient, exponent) pairs; like
    terms are merged, zero terms dropped, and the result is sorted by
    exponent.  Instances are treated as immutable and hash by content.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        acc = {}
        for c, e in terms:
            if e < 0 or e > MAX_EXPONENT:
                raise ValueError("exponent out of range: %r" % (e,))
            acc[e] = acc.get(e, 0) + c
        self.terms = tuple((acc[e], e) for e in sorted(acc) if acc[e])

    @classmethod
    def zero(cls) -> "SparsePoly":
        return cls(())

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, SparsePoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __repr__(self) -> str:
        return "SparsePoly(%r)" % (list(self.terms),)

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return SparsePoly(self.terms + other.terms)

    def __neg__(self) -> "SparsePoly":
        f = SparsePoly()
        f.terms = tuple((-c, e) for c, e in self.terms)
        return f

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: "SparsePoly") -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return schoolbook_mul(self, other)

    def degree(self) -> int:
        """Largest exponent; 0 for the zero polynomial by convention."""
        return self.terms[-1][1] if self.terms else 0

    def height(self) -> int:
        """Largest coefficient magnitude; 0 for the zero polynomial."""
        return max((abs(c) for c, _ in self.terms), default=0)

    def eval_mod(self, a: int, m: int) -> int:
        """Value of the polynomial at a, reduced mod m."""
        if m < 2:
            raise ValueError("modulus must be at least 2")
        return sum(c * pow(a, e, m) for c, e in self.terms) % m


def bitlen_poly(f: SparsePoly) -> int:
    """Total bit size of f: sum of signed-coefficient and exponent costs."""
    return sum(bitlen_int(c) + bitlen_nat(e) for c, e in f.terms)


def sparsity_bound(s: int) -> int:
    """Upper bound ceil(2s / log2 s) on the term count of any f with
    bitlen_poly(f) <= s.  Requires s >= 2."""
    if s < 2:
        raise ValueError("sparsity_bound needs s >= 2")
    return math.ceil(2 * s / math.log2(s))


def reduce_mod(f: SparsePoly, p: int, m: int) -> list:
    """Dense image of f modulo <x**p - 1, m>.

    Returns a length-p list v with v[j] the sum of all coefficients whose
    exponent is congruent to j mod p, reduced into [0, m).
    """
    if p < 1:
        raise ValueError("p must be positive")
    if m < 2:
        raise ValueError("modulus must be at least 2")
    if p > m:
        raise ValueError("p must not exceed the modulus")
    v = [0] * p
    for c, e in f.terms:
        v[e % p] += c
    return [x % m for x in v]


def shifted_derivative(f: SparsePoly) -> SparsePoly:
    """x times the derivative of f: maps c*x**e to (c*e)*x**e."""
    g = SparsePoly()
    g.terms = tuple((c * e, e) for c, e in f.terms if e)
    return g


def signed_lift(r: int, m: int) -> int:
    """The representative of r mod m lying in (-m/2, m/2]."""
    if m < 2:
        raise ValueError("modulus must be at least 2")
    r %= m
    return r - m if 2 * r > m else r


def schoolbook_mul(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    """Exact product by direct term-pair accumulation."""
    acc = {}
    for cf, ef in f.terms:
        for cg, eg in g.terms:
            e = ef + eg
            acc[e] = acc.get(e, 0) + cf * cg
    h = SparsePoly()
    h.terms = tuple((acc[e], e) for e in sorted(acc) if acc[e])
    return h


def mul_big(a: int, b: int) -> int:
    """Product of two nonnegative ints, through GMP once they are large."""
    if _mpz is not None and a.bit_length() + b.bit_length() > _GMP_CUTOVER_BITS:
        return int(_mpz(a) * _mpz(b))
    return a * b


def pack_ints(values, width_bytes: int) -> int:
    """Pack nonnegative ints, each below 256**width_bytes, into one integer
    with fixed little-endian slots."""
    buf = bytearray(len(values) * width_bytes)
    w = width_bytes
    pos = 0
    for v in values:
        buf[pos:pos + w] = v.to_bytes(w, "little")
        pos += w
    return int.from_bytes(bytes(buf), "little")


def unpack_ints(n: int, width_bytes: int, count: int) -> list:
    """Inverse of pack_ints: split n into count fixed-width slots."""
    w = width_bytes
    data = n.to_bytes(count * w, "little")
    return [int.from_bytes(data[i * w:(i + 1) * w], "little") for i in range(count)]


def _pack_terms(terms, width_bytes: int, positions: int) -> int:
    # terms carry nonnegative coefficients at distinct exponents < positions
    buf = bytearray(positions * width_bytes)
    w = width_bytes
    for c, e in terms:
        buf[e * w:(e + 1) * w] = c.to_bytes(w, "little")
    return int.from_bytes(bytes(buf), "little")


def kronecker_mul(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    """Exact product by packed integer multiplication.

    Both inputs are split into positive and negative parts so each of the
    four partial products packs nonnegative slots.  The slot width is the
    bit length of the largest possible product coefficient, so unpacking
    never sees carries across slots.
    """
    if not f.terms or not g.terms:
        return SparsePoly()
    bound = f.height() * g.height() * min(len(f.terms), len(g.terms))
    width_bytes = (bound.bit_length() + 7) // 8
    positions = f.degree() + g.degree() + 1
    if positions * width_bytes > PACK_CAP_BYTES:
        raise CapacityError(
            "packed product needs %d bytes" % (positions * width_bytes))

    def split(h):
        pos = [(c, e) for c, e in h.terms if c > 0]
        neg = [(-c, e) for c, e in h.terms if c < 0]
        return pos, neg

    fp, fn = split(f)
    gp, gn = split(g)
    pf = f.degree() + 1
    pg = g.degree() + 1
    packed = {}
    for name, part, deg in (("fp", fp, pf), ("fn", fn, pf),
                            ("gp", gp, pg), ("gn", gn, pg)):
        packed[name] = _pack_terms(part, width_bytes, deg) if part else 0

    prods = []
    for a, b in (("fp", "gp"), ("fn", "gn"), ("fp", "gn"), ("fn", "gp")):
        n = mul_big(packed[a], packed[b])
        prods.append(n.to_bytes(positions * width_bytes, "little"))
    plus_a, plus_b, minus_a, minus_b = prods

    w = width_bytes
    out = []
    for i in range(positions):
        lo, hi = i * w, (i + 1) * w
        c = (int.from_bytes(plus_a[lo:hi], "little")
             + int.from_bytes(plus_b[lo:hi], "little")
             - int.from_bytes(minus_a[lo:hi], "little")
             - int.from_bytes(minus_b[lo:hi], "little"))
        if c:
            out.append((c, i))
    h = SparsePoly()
    h.terms = tuple(out)
    return h


def dump_spoly(f: SparsePoly) -> str:
    """Canonical spoly v1 text for f (header plus one term per line)."""
    lines = ["spoly 1"]
    lines.extend("%d %d" % (c, e) for c, e in f.terms)
    return "\n".join(lines) + "\n"


def _parse_decimal(token: str, line: int, allow_negative: bool) -> int:
    body = token
    if allow_negative and token.startswith("-"):
        body = token[1:]
    if not body.isdigit():
        raise SpolyError(line, "not a decimal integer: %r" % token)
    if len(body) > 1 and body[0] == "0":
        raise SpolyError(line, "leading zeros are not canonical: %r" % token)
    return int(token)


def parse_spoly(text: str) -> SparsePoly:
    """Parse spoly v1 text, rejecting anything outside the canonical form."""
    lines = text.splitlines()
    if not lines or lines[0] != "spoly 1":
        raise SpolyError(1, "bad header: expected 'spoly 1'")
    terms = []
    prev = -1
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = raw.split(" ")
        if len(parts) != 2 or "" in parts:
            raise SpolyError(lineno, "expected '<coeff> <exp>'")
        c = _parse_decimal(parts[0], lineno, allow_negative=True)
        e = _parse_decimal(parts[1], lineno, allow_negative=False)
        if c == 0:
            raise SpolyError(lineno, "zero coefficient")
        if e <= prev:
            raise SpolyError(lineno, "exponents must be strictly increasing")
        if e > MAX_EXPONENT:
            raise SpolyError(lineno, "exponent out of range")
        terms.append((c, e))
        prev = e
    f = SparsePoly()
    f.terms = tuple(terms)
    return f
