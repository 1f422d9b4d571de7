"""Prime-power modular domains carrying p-th roots of unity.

A domain is m = q**k for a prime q with q = 1 (mod p), q > p, together
with an element omega of multiplicative order exactly p mod m.  Such a
domain supports an invertible discrete Fourier transform of length p
because p is a unit mod m.  Transforms come in two flavors: the direct
O(p**2) sum for short lengths and a Bluestein reduction to one cyclic
convolution, done exactly over the integers by fixed-width byte packing,
for long ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .polycore import SparsePoly, mul_big, pack_ints

try:
    from gmpy2 import invert as _gmp_invert, mpz as _mpz, powmod as _gmp_powmod
except ImportError:  # pragma: no cover - plain pow() is correct, just slower
    _mpz = None


def _powmod(a: int, e: int, m: int) -> int:
    if _mpz is not None and m.bit_length() > 256:
        return int(_gmp_powmod(a, e, m))
    return pow(a, e, m)


def _invmod(a: int, m: int) -> int:
    if _mpz is not None and m.bit_length() > 256:
        return int(_gmp_invert(a, m))
    return pow(a, -1, m)


def _sieve(limit: int) -> tuple:
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i::i] = bytearray(len(flags[i * i::i]))
    return tuple(i for i in range(limit) if flags[i])


_SMALL_PRIMES = _sieve(1000)
_SMALL_PRIME_SET = frozenset(_SMALL_PRIMES)


def is_probable_prime(n: int, rng, rounds: int = 40) -> bool:
    """Miller-Rabin with rng-chosen bases; a composite survives each
    round with probability at most 1/4."""
    if n < 2:
        return False
    if n < 1000:
        return n in _SMALL_PRIME_SET
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(lam: int, rng) -> int:
    """Uniformly random prime in the open interval (lam, 2*lam)."""
    if lam < 2:
        raise ValueError("random_prime needs lam >= 2")
    while True:
        c = rng.randrange(lam + 1, 2 * lam)
        if is_probable_prime(c, rng):
            return c


def integer_root_floor(n: int, r: int) -> int:
    """floor(n ** (1/r)) computed exactly by Newton iteration."""
    if n < 0 or r < 1:
        raise ValueError("integer_root_floor needs n >= 0 and r >= 1")
    if r == 1 or n < 2:
        return n
    x = 1 << -(-n.bit_length() // r)  # power of two at or above the root
    while True:
        y = ((r - 1) * x + n // x ** (r - 1)) // r
        if y >= x:
            break
        x = y
    while x ** r > n:
        x -= 1
    return x


@dataclass(frozen=True)
class PruContext:
    """Modulus m = q**k with omega of multiplicative order exactly p."""

    p: int
    q: int
    k: int
    m: int
    omega: int

    def __post_init__(self):
        if self.q % self.p != 1 or self.q <= self.p:
            raise ValueError("q must be a prime exceeding p with q = 1 mod p")
        if self.q ** self.k != self.m:
            raise ValueError("m must equal q**k")
        if _powmod(self.omega, self.p, self.m) != 1:
            raise ValueError("omega**p != 1 mod m")
        if self.omega % self.q == 1:
            raise ValueError("omega must not be 1 mod q")


def build_pru(p: int, m_min: int, rng, q_window: int = 0) -> PruContext:
    """Construct a PruContext with modulus at least m_min.

    q is sought among 1 + 2*i*p for random i; the window doubles whenever
    a batch of 64*log2(p) candidates yields no prime, so the search
    cannot stall.  q_window widens the initial i range beyond that
    default; identity tests use it to draw q from a pool so large that an
    adversary cannot have planted divisors of specific integers in it.
    omega starts as a (q-1)/p power of a random base mod q and is lifted
    to q**k by Newton steps of quadratically growing precision.
    """
    if p < 2 or m_min < 2:
        raise ValueError("build_pru needs p >= 2 and m_min >= 2")
    batch = 64 * max(1, (p + 2).bit_length())
    window = max(batch, q_window)
    q = 0
    while not q:
        for _ in range(batch):
            i = rng.randrange(1, window + 1)
            cand = 1 + 2 * i * p
            if is_probable_prime(cand, rng):
                q = cand
                break
        else:
            window *= 2
    while True:
        g = rng.randrange(2, q)
        omega = pow(g, (q - 1) // p, q)
        if omega != 1:
            break
    k = 1
    m = q
    while m < m_min:
        m *= q
        k += 1
    # lift omega from q to q**k; each step doubles the exact precision
    prec = 1
    while prec < k:
        prec = min(2 * prec, k)
        mod = q ** prec
        t = _powmod(omega, p - 1, mod)
        val = (t * omega - 1) % mod
        omega = (omega - val * _invmod(p * t % mod, mod)) % mod
    return PruContext(p=p, q=q, k=k, m=m, omega=omega)


# Transform lengths at or below this use the direct O(p**2) sum.
DFT_NAIVE_THRESHOLD = 64


class _PowerTable:
    """Baby-step giant-step table for powers of a fixed unit mod m."""

    def __init__(self, base: int, p: int, m: int):
        g = math.isqrt(p) + 1
        small = [1] * g
        for i in range(1, g):
            small[i] = small[i - 1] * base % m
        giant_step = small[g - 1] * base % m
        giant = [1] * (p // g + 1)
        for i in range(1, len(giant)):
            giant[i] = giant[i - 1] * giant_step % m
        self.g = g
        self.small = small
        self.giant = giant
        self.m = m

    def pow(self, e: int) -> int:
        return self.giant[e // self.g] * self.small[e % self.g] % self.m


@lru_cache(maxsize=8)
def _bluestein_plan(p: int, omega: int, m: int):
    # chirp exponents j*j/2 mod p; p is an odd prime here, so 2 is a unit
    inv2 = pow(2, -1, p)
    table = _PowerTable(omega, p, m)
    chirp = [0] * p
    chirp_inv = [0] * p
    for j in range(p):
        e = j * j * inv2 % p
        chirp[j] = table.pow(e)
        chirp_inv[j] = table.pow((p - e) % p)
    n = 1 << (2 * p - 1).bit_length()
    width = ((n * m * m).bit_length() + 7) // 8
    b = [0] * n
    b[0] = chirp_inv[0]
    for j in range(1, p):
        b[j] = chirp_inv[j]
        b[n - j] = chirp_inv[j]
    b_packed = pack_ints(b, width)
    return n, width, chirp, b_packed


def _dft_naive(values, omega: int, m: int) -> list:
    p = len(values)
    pows = [1] * p
    for i in range(1, p):
        pows[i] = pows[i - 1] * omega % m
    out = [0] * p
    for i in range(p):
        acc = 0
        for j, v in enumerate(values):
            acc += v * pows[i * j % p]
        out[i] = acc % m
    return out


def _dft_bluestein(values, omega: int, m: int) -> list:
    # f_hat(i) = chirp(i) * sum_j (v_j chirp(j)) chirp_inv(i - j), with
    # the inner sum a cyclic convolution of power-of-two size n >= 2p-1
    p = len(values)
    n, width, chirp, b_packed = _bluestein_plan(p, omega, m)
    a = [0] * n
    for j, v in enumerate(values):
        a[j] = v * chirp[j] % m
    prod = mul_big(pack_ints(a, width), b_packed)
    data = prod.to_bytes(2 * n * width, "little")
    out = [0] * p
    for i in range(p):
        lo = i * width
        y = int.from_bytes(data[lo:lo + width], "little")
        lo += n * width
        y += int.from_bytes(data[lo:lo + width], "little")
        out[i] = y % m * chirp[i] % m
    return out


def _dft(values, omega: int, m: int, naive_threshold: int = None) -> list:
    p = len(values)
    if p < 1:
        raise ValueError("empty transform")
    if m < 2:
        raise ValueError("modulus must be at least 2")
    values = [v % m for v in values]
    limit = DFT_NAIVE_THRESHOLD if naive_threshold is None else naive_threshold
    if p <= max(limit, 2):
        return _dft_naive(values, omega, m)
    return _dft_bluestein(values, omega, m)


def _idft(values, omega: int, m: int, naive_threshold: int = None) -> list:
    p = len(values)
    inv = _invmod(omega, m) if p > 1 else 1
    out = _dft(values, inv, m, naive_threshold)
    pinv = _invmod(p, m)
    return [x * pinv % m for x in out]


def dft(values, ctx: PruContext, naive_threshold: int = None) -> list:
    """Length-p transform (f(omega**i))_i of a dense coefficient vector.

    values must have length ctx.p; entries may be any ints and the result
    is reduced into [0, m).
    """
    if len(values) != ctx.p:
        raise ValueError("expected %d values, got %d" % (ctx.p, len(values)))
    return _dft(values, ctx.omega, ctx.m, naive_threshold)


def idft(values, ctx: PruContext, naive_threshold: int = None) -> list:
    """Exact inverse of dft: transform at omega**-1, scaled by p**-1."""
    if len(values) != ctx.p:
        raise ValueError("expected %d values, got %d" % (ctx.p, len(values)))
    return _idft(values, ctx.omega, ctx.m, naive_threshold)


def _geometric_eval(items, omega: int, m: int, k: int, p: int) -> list:
    # items: (coeff, exponent) pairs with exponents already below p
    out = [0] * k
    for c, e in items:
        if e >= p:
            raise ValueError("exponent %d not reduced below p" % e)
        r = _powmod(omega, e, m)
        cur = c % m
        for i in range(k):
            out[i] += cur
            cur = cur * r % m
    return [x % m for x in out]


def geometric_eval(f, ctx: PruContext, k: int) -> list:
    """Evaluations (f(omega**i))_{0<=i<k} along the geometric sequence.

    f may be a SparsePoly, a dict mapping exponent to coefficient, or a
    dense coefficient sequence.  Exponents fold mod p on the fly (omega
    has order p, so the value is unchanged).  Costs O(#f * k) modular
    multiplications, which beats a transform whenever f is short or k is
    small.
    """
    if not 1 <= k <= ctx.p:
        raise ValueError("need 1 <= k <= p")
    if isinstance(f, SparsePoly):
        items = f.terms
    elif isinstance(f, dict):
        items = [(c, e) for e, c in f.items() if c]
    else:
        if len(f) > ctx.p:
            raise ValueError("dense input longer than p")
        items = [(c, e) for e, c in enumerate(f) if c]
    items = [(c, e % ctx.p) for c, e in items]
    return _geometric_eval(items, ctx.omega, ctx.m, k, ctx.p)
