import random

import pytest

from upoly.blackbox import (
    MBB,
    BlackBoxContractError,
    EvalStats,
    SlpError,
    dump_slp,
    explicit_mbb,
    explicit_mdbb,
    mbb_to_mdbb,
    mdbb_image,
    parse_slp,
    prod_mdbb,
    slp_mbb,
    sum_mdbb,
)
from upoly.modring import build_pru
from upoly.polycore import SparsePoly, reduce_mod, schoolbook_mul, shifted_derivative


def rand_poly(rng, max_terms=8, max_exp=100, max_coeff=1000):
    return SparsePoly(
        [
            (rng.randrange(1, max_coeff) * rng.choice([1, -1]), rng.randrange(max_exp))
            for _ in range(rng.randrange(max_terms + 1))
        ]
    )


class TestEvalStats:
    def test_record_and_reset(self):
        st = EvalStats()
        st.record(5, 3, 100)
        st.record(11, 2, 10)
        assert st.calls == 2
        assert st.sum_k == 5
        assert st.max_p == 11
        assert st.max_logm == 7
        st.reset()
        assert st.as_dict() == {"calls": 0, "sum_k": 0, "max_p": 0, "max_logm": 0}

    def test_boxes_count_queries(self):
        f = SparsePoly([(3, 2)])
        box = explicit_mbb(f)
        box.eval(1, 10)
        box.eval(2, 10)
        assert box.stats.calls == 2 and box.stats.sum_k == 2
        md = explicit_mdbb(f)
        md.eval(5, build_pru(5, 100, random.Random(0)).omega, 101, 3)
        assert md.stats.calls == 1 and md.stats.sum_k == 3 and md.stats.max_p == 5


class TestMbb:
    def test_worked_example(self):
        # f = 3x^2 at a=3 mod 8: 27 mod 8
        assert explicit_mbb(SparsePoly([(3, 2)])).eval(3, 8) == 3

    def test_modulus_validated(self):
        with pytest.raises(ValueError):
            explicit_mbb(SparsePoly([(1, 0)])).eval(0, 1)


class TestMdbb:
    def test_worked_example(self):
        # f = 2x^4 + x folds to 3x mod (x^3 - 1, 7); x f' = 8x^4 + x
        # folds to 2x; values at powers of omega = 2
        md = explicit_mdbb(SparsePoly([(1, 1), (2, 4)]))
        alphas, gammas = md.eval(3, 2, 7, 3)
        assert alphas == [3, 6, 5]
        assert gammas == [2, 4, 1]

    def test_k_validation(self):
        md = explicit_mdbb(SparsePoly([(1, 0)]))
        with pytest.raises(ValueError):
            md.eval(3, 2, 7, 0)
        with pytest.raises(ValueError):
            md.eval(3, 2, 7, 4)

    def test_dense_and_sparse_paths_agree(self):
        rng = random.Random(1)
        dense_poly = SparsePoly([(1 + i, i) for i in range(40)])
        for p in (5, 13, 41):
            ctx = build_pru(p, 10 ** 6, rng)
            full = explicit_mdbb(dense_poly).eval(p, ctx.omega, ctx.m, p)
            probe = explicit_mdbb(dense_poly).eval(p, ctx.omega, ctx.m, 2)
            assert full[0][:2] == probe[0]
            assert full[1][:2] == probe[1]

    def test_matches_reduce_mod_directly(self):
        rng = random.Random(2)
        for _ in range(20):
            f = rand_poly(rng)
            p = rng.choice([3, 5, 7, 11])
            ctx = build_pru(p, 10 ** 7, rng)
            alphas, gammas = explicit_mdbb(f).eval(p, ctx.omega, ctx.m, p)
            vf = reduce_mod(f, p, ctx.m)
            vg = reduce_mod(shifted_derivative(f), p, ctx.m)
            for i in range(p):
                w = pow(ctx.omega, i, ctx.m)
                assert alphas[i] == sum(
                    c * pow(w, e, ctx.m) for e, c in enumerate(vf)
                ) % ctx.m
                assert gammas[i] == sum(
                    c * pow(w, e, ctx.m) for e, c in enumerate(vg)
                ) % ctx.m


class TestPromotion:
    def test_mbb_to_mdbb_matches_explicit(self):
        rng = random.Random(3)
        for _ in range(25):
            f = rand_poly(rng)
            p = rng.choice([3, 5, 7, 11, 13])
            ctx = build_pru(p, 10 ** 6, rng)
            k = rng.randrange(1, p + 1)
            promoted = mbb_to_mdbb(explicit_mbb(f)).eval(p, ctx.omega, ctx.m, k)
            direct = explicit_mdbb(f).eval(p, ctx.omega, ctx.m, k)
            assert promoted == direct

    def test_query_cost_is_two_per_point(self):
        f = SparsePoly([(5, 3)])
        inner = explicit_mbb(f)
        outer = mbb_to_mdbb(inner)
        ctx = build_pru(7, 1000, random.Random(4))
        outer.eval(7, ctx.omega, ctx.m, 4)
        assert inner.stats.calls == 8

    def test_contract_violation_detected(self):
        # an oracle that is not a polynomial mod m**2: finite differences
        # are then not divisible by m
        liar = MBB(lambda a, m: (a * a + a // 3) % m)
        ctx = build_pru(5, 10 ** 6, random.Random(5))
        with pytest.raises(BlackBoxContractError):
            mbb_to_mdbb(liar).eval(5, ctx.omega, ctx.m, 5)


class TestCombinators:
    def test_sum_rule(self):
        rng = random.Random(6)
        for _ in range(15):
            f, g = rand_poly(rng), rand_poly(rng)
            p = rng.choice([5, 7, 11])
            ctx = build_pru(p, 10 ** 6, rng)
            combo = sum_mdbb(explicit_mdbb(f), explicit_mdbb(g))
            want = explicit_mdbb(f + g)
            assert combo.eval(p, ctx.omega, ctx.m, p) == want.eval(
                p, ctx.omega, ctx.m, p
            )

    def test_product_rule(self):
        rng = random.Random(7)
        for _ in range(15):
            f, g = rand_poly(rng, max_terms=5), rand_poly(rng, max_terms=5)
            p = rng.choice([5, 7, 11])
            ctx = build_pru(p, 10 ** 8, rng)
            combo = prod_mdbb(explicit_mdbb(f), explicit_mdbb(g))
            want = explicit_mdbb(schoolbook_mul(f, g))
            assert combo.eval(p, ctx.omega, ctx.m, p) == want.eval(
                p, ctx.omega, ctx.m, p
            )

    def test_stats_attach_to_outer_only(self):
        st = EvalStats()
        f = SparsePoly([(1, 1)])
        box = prod_mdbb(explicit_mdbb(f), explicit_mdbb(f), stats=st)
        ctx = build_pru(3, 100, random.Random(8))
        box.eval(3, ctx.omega, ctx.m, 2)
        assert st.calls == 1


class TestImage:
    def test_image_is_folded_residue(self):
        rng = random.Random(9)
        for _ in range(15):
            f = rand_poly(rng)
            p = rng.choice([3, 5, 7, 13])
            ctx = build_pru(p, 10 ** 7, rng)
            g, h = mdbb_image(explicit_mdbb(f), ctx)
            vf = reduce_mod(f, p, ctx.m)
            vg = reduce_mod(shifted_derivative(f), p, ctx.m)
            assert g == SparsePoly([(c, e) for e, c in enumerate(vf)])
            assert h == SparsePoly([(c, e) for e, c in enumerate(vg)])

    def test_want_h_skips_derivative(self):
        ctx = build_pru(5, 1000, random.Random(10))
        g, h = mdbb_image(explicit_mdbb(SparsePoly([(4, 7)])), ctx, want_h=False)
        assert h is None
        assert g == SparsePoly([(4, 7 % 5)])


SLP_POW8 = "slp 1\ninput\nconst 1\nadd 0 1\npow 2 8\n"


class TestSlp:
    def test_parse_dump_round_trip(self):
        prog = parse_slp(SLP_POW8)
        assert dump_slp(prog) == SLP_POW8
        assert parse_slp(dump_slp(prog)) == prog

    def test_worked_example(self):
        # (x+1)^8 at x=1 mod 1000
        box = slp_mbb(parse_slp(SLP_POW8))
        assert box.eval(1, 1000) == 256

    def test_negative_const(self):
        prog = parse_slp("slp 1\ninput\nconst -3\nmul 0 1\n")
        assert slp_mbb(prog).eval(5, 1000) == (-15) % 1000

    def test_matches_explicit_poly(self):
        rng = random.Random(11)
        # (x+1)^8 expanded
        f = SparsePoly([(1, 0), (1, 1)])
        for _ in range(3):
            f = schoolbook_mul(f, f)
        box = slp_mbb(parse_slp(SLP_POW8))
        for _ in range(20):
            a = rng.randrange(10 ** 6)
            m = rng.randrange(2, 10 ** 9)
            assert box.eval(a, m) == f.eval_mod(a, m)

    @pytest.mark.parametrize(
        "text,line",
        [
            ("slp 2\ninput\n", 1),
            ("", 1),
            ("slp 1\nfrobnicate 1 2\n", 2),
            ("slp 1\ninput\nadd 0\n", 3),
            ("slp 1\ninput\nadd 0 1\n", 3),
            ("slp 1\ninput extra\n", 2),
            ("slp 1\npow 0 2\n", 2),
            ("slp 1\ninput\npow 0 %d\n" % (2 ** 63 + 1), 3),
            ("slp 1\nconst 01\n", 2),
            ("slp 1\ninput\nadd  0 0\n", 3),
            ("slp 1\n", 2),
        ],
    )
    def test_rejects_malformed(self, text, line):
        with pytest.raises(SlpError) as info:
            parse_slp(text)
        assert info.value.line == line

    def test_pow_limit_inclusive(self):
        prog = parse_slp("slp 1\ninput\npow 0 %d\n" % 2 ** 63)
        assert slp_mbb(prog).eval(1, 17) == 1

    def test_header_error_message(self):
        with pytest.raises(SlpError) as info:
            parse_slp("bogus\n")
        assert "bad header" in str(info.value)
