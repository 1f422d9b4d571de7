import random

import pytest

from upoly.modring import (
    PruContext,
    _dft,
    _idft,
    build_pru,
    dft,
    geometric_eval,
    idft,
    integer_root_floor,
    is_probable_prime,
    random_prime,
)
from upoly.polycore import SparsePoly


SMALL_PRIMES = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}


class TestPrimes:
    def test_is_probable_prime_small(self):
        rng = random.Random(0)
        for n in range(2, 40):
            assert is_probable_prime(n, rng) == (n in SMALL_PRIMES)

    def test_is_probable_prime_carmichael(self):
        rng = random.Random(0)
        for n in (561, 1105, 1729, 2465, 6601):
            assert not is_probable_prime(n, rng)

    def test_random_prime_window(self):
        rng = random.Random(1)
        for lam in (2, 5, 21, 100, 1000):
            for _ in range(5):
                p = random_prime(lam, rng)
                assert lam < p < 2 * lam or (lam == 2 and p == 3)
                assert is_probable_prime(p, rng)

    def test_random_prime_two(self):
        rng = random.Random(2)
        assert random_prime(2, rng) == 3


class TestIntegerRoot:
    def test_exact_powers(self):
        for base in (2, 3, 10, 12345):
            for r in (2, 3, 5, 7):
                n = base ** r
                assert integer_root_floor(n, r) == base
                assert integer_root_floor(n - 1, r) == base - 1
                assert integer_root_floor(n + 1, r) == base
            assert integer_root_floor(base, 1) == base

    def test_random_floor_property(self):
        rng = random.Random(3)
        for _ in range(60):
            n = rng.getrandbits(rng.randrange(2, 400)) + 1
            r = rng.randrange(1, 9)
            v = integer_root_floor(n, r)
            assert v ** r <= n < (v + 1) ** r

    def test_edges(self):
        assert integer_root_floor(0, 3) == 0
        assert integer_root_floor(1, 7) == 1


class TestBuildPru:
    def test_context_invariants(self):
        rng = random.Random(4)
        for p in (3, 5, 13, 31, 101, 257):
            for m_min in (2, 10 ** 6, 1 << 80):
                ctx = build_pru(p, m_min, rng)
                assert ctx.p == p
                assert ctx.q % p == 1 and ctx.q > p
                assert ctx.m == ctx.q ** ctx.k
                assert ctx.m >= m_min
                assert pow(ctx.omega, p, ctx.m) == 1
                assert ctx.omega % ctx.q != 1
                # exact order p: p prime, so order divides p and is not 1
                assert ctx.omega != 1

    def test_validation_rejects_bad_context(self):
        with pytest.raises(ValueError):
            PruContext(p=3, q=11, k=1, m=11, omega=2)  # 11 % 3 != 1
        with pytest.raises(ValueError):
            PruContext(p=3, q=7, k=1, m=7, omega=3)  # 3^3 = 27 = 6 mod 7
        PruContext(p=3, q=7, k=1, m=7, omega=2)

    def test_q_window_widens_pool(self):
        rng = random.Random(5)
        seen = {build_pru(11, 2, rng, q_window=50000).q for _ in range(40)}
        assert len(seen) > 10
        assert max(seen) > 11 * 64 * 4 * 2  # beyond the default window

    def test_prime_power_lift(self):
        rng = random.Random(6)
        ctx = build_pru(5, 1 << 200, rng)
        assert ctx.k > 1
        assert ctx.m >= 1 << 200
        assert pow(ctx.omega, 5, ctx.m) == 1


class TestDft:
    def test_worked_example(self):
        # p=3, q=7, omega=2: hat(v)_i = sum_j v_j omega^(i*j)
        assert _dft([0, 3, 0], 2, 7) == [3, 6, 5]
        assert _idft([3, 6, 5], 2, 7) == [0, 3, 0]

    def test_inverse_round_trip_small(self):
        rng = random.Random(7)
        for _ in range(30):
            ctx = build_pru(rng.choice([3, 5, 7, 11, 13]), 10 ** 6, rng)
            v = [rng.randrange(ctx.m) for _ in range(ctx.p)]
            assert idft(dft(v, ctx), ctx) == v

    def test_naive_and_bluestein_agree(self):
        rng = random.Random(8)
        for p in (17, 67, 101, 127):
            ctx = build_pru(p, 1 << 40, rng)
            v = [rng.randrange(ctx.m) for _ in range(p)]
            fast = dft(v, ctx, naive_threshold=1)
            slow = dft(v, ctx, naive_threshold=10 ** 6)
            assert fast == slow
            assert idft(fast, ctx, naive_threshold=1) == v

    def test_length_checked(self):
        rng = random.Random(9)
        ctx = build_pru(5, 100, rng)
        with pytest.raises(ValueError):
            dft([1, 2, 3], ctx)
        with pytest.raises(ValueError):
            idft([1], ctx)

    def test_linearity(self):
        rng = random.Random(10)
        ctx = build_pru(13, 10 ** 9, rng)
        u = [rng.randrange(ctx.m) for _ in range(13)]
        v = [rng.randrange(ctx.m) for _ in range(13)]
        uv = [(a + b) % ctx.m for a, b in zip(u, v)]
        du, dv, duv = dft(u, ctx), dft(v, ctx), dft(uv, ctx)
        assert duv == [(a + b) % ctx.m for a, b in zip(du, dv)]


class TestGeometricEval:
    def test_matches_direct_powers(self):
        rng = random.Random(11)
        for _ in range(20):
            p = rng.choice([5, 7, 11, 13])
            ctx = build_pru(p, 10 ** 8, rng)
            f = SparsePoly(
                [(rng.randrange(1, 50), rng.randrange(0, 100)) for _ in range(4)]
            )
            k = rng.randrange(1, p + 1)
            out = geometric_eval(f, ctx, k)
            expect = [
                f.eval_mod(pow(ctx.omega, i, ctx.m), ctx.m) for i in range(k)
            ]
            assert out == expect

    def test_accepts_dict_and_dense(self):
        rng = random.Random(12)
        ctx = build_pru(5, 100, rng)
        f = SparsePoly([(2, 0), (3, 3)])
        as_dict = {0: 2, 3: 3}
        as_dense = [2, 0, 0, 3]
        want = geometric_eval(f, ctx, 5)
        assert geometric_eval(as_dict, ctx, 5) == want
        assert geometric_eval(as_dense, ctx, 5) == want

    def test_k_validation(self):
        rng = random.Random(13)
        ctx = build_pru(5, 100, rng)
        f = SparsePoly([(1, 0)])
        with pytest.raises(ValueError):
            geometric_eval(f, ctx, 0)
        with pytest.raises(ValueError):
            geometric_eval(f, ctx, 6)


class TestDeterminism:
    def test_same_seed_same_context(self):
        a = build_pru(31, 1 << 64, random.Random(99))
        b = build_pru(31, 1 << 64, random.Random(99))
        assert a == b
