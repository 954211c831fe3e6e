import os
import random
from fractions import Fraction

import pytest

from padicbsd.curves import CurveFixture
from padicbsd.msymbols import ModularSymbolEngine, RationalRecognitionError
from padicbsd.lfunction import (
    level_sum, signed_from_level, lp_alpha, lp_beta, signed_decompose,
    omega_moduli, ghat_products, LevelError, SignedPair,
)
from padicbsd.padics import PadicElement, QuadExt, PrecisionError
from padicbsd.series import TruncatedSeries, LogMatrix

FIXDIR = os.path.join(os.path.dirname(__file__), "..", "fixtures")
CACHE = os.path.join(FIXDIR, "cache")


def engine_of(name, digits=28):
    fx = CurveFixture.load(os.path.join(FIXDIR, f"{name}.json"))
    return ModularSymbolEngine(fx, digits=digits, cache_dir=CACHE,
                               use_cache=True)

ENG27 = engine_of("27a1_p5")
ENG53 = engine_of("53a1_p5")


class TestModularSymbols:
    def test_zero_symbol_rank0_is_l_over_omega(self):
        # 27a1: L(E,1)/Omega+ = 1/3 in this normalization
        assert ENG27.symbol(0, 1) == Fraction(1, 3)

    def test_zero_symbol_rank1_vanishes(self):
        assert ENG53.symbol(0, 1) == 0

    def test_evenness_random(self):
        rng = random.Random(51)
        for _ in range(12):
            m = 5 ** rng.choice([1, 2])
            a = rng.randrange(1, m)
            if a % 5 == 0:
                continue
            assert ENG53.check_evenness(a, m)

    def test_hecke_relation_oracle(self):
        # exact T_ell relations on the snapped table: the strongest
        # independent check available without a CAS
        for ell in (2, 3):
            assert ENG53.check_hecke(ell, 1, 25)
        for ell in (2, 7):  # good primes for 27a1
            assert ENG27.check_hecke(ell, 2, 25)

    def test_distribution_relation_exact(self):
        for a in (1, 3, 7, 11):
            assert ENG53.check_distribution(5, 2, a)
            assert ENG53.check_distribution(5, 3, a)

    def test_denominators_within_bound(self):
        for (a, m), val in ENG53.table.items():
            assert val.denominator <= ENG53.denominator_bound(max(m, 1))

    def test_recognition_failure_reported(self):
        # an artificially tiny denominator bound must refuse, not guess
        eng = engine_of("53a1_p5")
        eng.use_cache = False
        eng.table = {}
        eng.denominator_bound = lambda m: 1
        with pytest.raises(RationalRecognitionError):
            eng.symbol(1, 5)

    def test_cache_round_trip_byte_identical(self, tmp_path):
        fx = CurveFixture.load(os.path.join(FIXDIR, "27a1_p5.json"))
        e1 = ModularSymbolEngine(fx, digits=28, cache_dir=str(tmp_path))
        e1.symbol(0, 1)
        e1.symbol(1, 5)
        e1.save_cache()
        blob1 = open(e1._cache_path(), "rb").read()
        e2 = ModularSymbolEngine(fx, digits=28, cache_dir=str(tmp_path))
        e2.load_cache()
        assert e2.table == e1.table
        e2.save_cache()
        assert open(e2._cache_path(), "rb").read() == blob1


class TestLevelSum:
    def test_interpolation_equals_zero_symbol_combination(self):
        ld = level_sum(ENG27, 2)
        s0 = QuadExt.of(5, ld.A[0], ld.B[0])
        pred = (QuadExt.of(5, 1) - 1 / QuadExt.alpha(5)) ** 2 \
            * Fraction(ENG27.symbol(0, 1))
        assert (s0 - pred).is_zero()

    def test_constant_term_level_independent(self):
        ld2 = level_sum(ENG27, 2)
        ld3 = level_sum(ENG27, 3)
        assert ld2.A[0] == ld3.A[0] and ld2.B[0] == ld3.B[0]

    def test_rank1_constant_vanishes_exactly(self):
        ld = level_sum(ENG53, 3)
        assert ld.A[0] == 0 and ld.B[0] == 0


class TestLpAlpha:
    def test_conjugate_symmetry(self):
        la, _, _ = lp_alpha(ENG53, 2, 4, 20)
        lb = lp_beta(la)
        for ca, cb in zip(la.coeffs, lb.coeffs):
            assert cb.agrees_with(ca.conjugate())

    def test_refusal_when_level_insufficient(self):
        with pytest.raises(LevelError):
            lp_alpha(ENG53, 2, 10, 20)

    def test_refinement_stability(self):
        # increasing n changes no certified digit (coefficients carrying no
        # certified digits are exempt: they may drift below the cap)
        la2, _, _ = lp_alpha(ENG53, 2, 5, 20)
        la3, _, _ = lp_alpha(ENG53, 3, 5, 20)
        for c2, c3 in zip(la2.coeffs, la3.coeffs):
            joint = min(c2.prec2, c3.prec2)
            if joint <= 0:
                continue
            diff = c3 - c2
            v = diff.valuation()
            assert (not v.decided) or v.v2 >= joint

    def test_constant_coefficient_precision_full(self):
        la, _, _ = lp_alpha(ENG27, 2, 3, 22)
        assert la.coeffs[0].prec2 == 22


class TestSignedExtraction:
    def test_integrality_all_fixtures(self):
        for eng, n in ((ENG27, 2), (ENG53, 3)):
            sp, _ = signed_from_level(eng, n, 22)
            assert sp.provenance["integral_plus"]
            assert sp.provenance["integral_minus"]
            for series in (sp.plus, sp.minus):
                for c in series.coeffs:
                    v = c.valuation()
                    assert (not v.decided) or v.v2 >= 0

    def test_minus_rep_exactly_stable_in_level(self):
        # L^- mod X Phi_1 must come out identical at levels 2 and 3
        _, r2 = signed_from_level(ENG53, 2, 22)
        _, r3 = signed_from_level(ENG53, 3, 22)
        assert r2["-"] == r3["-"]

    def test_round_trip_against_lp_alpha(self):
        sp, _ = signed_from_level(ENG53, 3, 22)
        la, _, _ = lp_alpha(ENG53, 3, 5, 22)
        mlog = LogMatrix.build(5, 5, 26)
        assert sp.round_trip_ok(mlog, la, lp_beta(la))

    def test_division_route_agrees(self):
        sp, _ = signed_from_level(ENG53, 3, 22)
        la, _, _ = lp_alpha(ENG53, 3, 5, 22)
        mlog = LogMatrix.build(5, 5, 26)
        sd = signed_decompose(la, lp_beta(la), mlog)
        for j in range(3):
            assert sd.minus.coeffs[j].agrees_with(sp.minus.coeffs[j])
            assert sd.plus.coeffs[j].agrees_with(sp.plus.coeffs[j])


class TestSignedDecompose:
    def mlog(self, p=5, M=10, prec2=30):
        return LogMatrix.build(p, M, prec2)

    def series_int(self, p, vals, M, prec2=36):
        cs = [PadicElement.from_rational(p, v, prec2, ext=True) for v in vals]
        cs += [PadicElement.from_rational(p, 0, prec2, ext=True)] * (M - len(vals))
        return TruncatedSeries.make(cs, M, "Qp(s)")

    def test_zero_maps_to_zero(self):
        p, M = 5, 6
        mlog = self.mlog(p, M)
        z = self.series_int(p, [0], M)
        pair = signed_decompose(z, z, mlog)
        for c in list(pair.minus.coeffs) + list(pair.plus.coeffs):
            assert c.agrees_with(0)

    def test_synthetic_round_trip(self):
        # random integral pair -> multiply by M_log -> decompose -> recover
        rng = random.Random(53)
        p, M = 5, 10
        N = 20
        mlog = self.mlog(p, M, 2 * N + 10)
        for _ in range(5):
            f_minus = self.series_int(
                p, [rng.randrange(-200, 200) for _ in range(M)], M, 2 * N + 20)
            f_plus = self.series_int(
                p, [rng.randrange(-200, 200) for _ in range(M)], M, 2 * N + 20)
            g_alpha, g_beta = mlog.row_times(f_minus, f_plus)
            pair = signed_decompose(g_alpha, g_beta, mlog)
            for got, want in ((pair.minus, f_minus), (pair.plus, f_plus)):
                for j in range(M):
                    diff = got.coeffs[j] - want.coeffs[j]
                    v = diff.valuation()
                    # recovery mod p^(N-2), X^10
                    assert (not v.decided) or v.v2 >= 2 * (N - 2), (j, diff)

    def test_swap_alpha_beta_symmetry(self):
        # swapping the inputs fixes the minus series (symmetric combination)
        # and negates the plus series (alternating), per the closed forms
        p, M = 5, 6
        mlog = self.mlog(p, M, 40)
        f_minus = self.series_int(p, [3, 1, 4, 1, 5, 9], M, 60)
        f_plus = self.series_int(p, [2, 7, 1, 8, 2, 8], M, 60)
        ga, gb = mlog.row_times(f_minus, f_plus)
        pair1 = signed_decompose(ga, gb, mlog)
        pair2 = signed_decompose(gb, ga, mlog)
        for a, b in zip(pair1.minus.coeffs, pair2.minus.coeffs):
            assert a.agrees_with(b)
        for a, b in zip(pair1.plus.coeffs, pair2.plus.coeffs):
            assert a.agrees_with(-b)

    def test_inconsistent_inputs_rejected(self):
        p, M = 5, 4
        mlog = self.mlog(p, M)
        f = self.series_int(p, [1, 2, 3, 4], M)
        g = self.series_int(p, [1, 2, 3, 5], M)
        with pytest.raises(PrecisionError):
            signed_decompose(f, g, mlog)


class TestModuli:
    def test_omega_moduli_shapes(self):
        qp, qm = omega_moduli(5, 3)
        # Q+ = X Phi_2(1+X): degree 21; Q- = X Phi_1(1+X): degree 5
        assert len(qp) - 1 == 21 and len(qm) - 1 == 5
        assert qp[0] == 0 and qm[0] == 0
        assert qp[1] == 5 and qm[1] == 5  # Phi(1) = p

    def test_ghat_constant_terms(self):
        gp, gm = ghat_products(5, 3)
        # ghat = truncation of log^{pm}: constant term 1/p
        assert gp[0] == Fraction(1, 5) and gm[0] == Fraction(1, 5)


class TestEvennessBulk:
    def test_evenness_100_draws(self):
        rng = random.Random(59)
        count = 0
        while count < 100:
            m = 5 ** rng.choice([1, 2, 2])
            a = rng.randrange(1, m)
            if a % 5 == 0:
                continue
            count += 1
            assert ENG53.check_evenness(a, m)
