import random
from fractions import Fraction

import pytest

from padicbsd.padics import PadicElement, PrecisionError
from padicbsd.series import (
    TruncatedSeries, cyclotomic, half_log, half_log_exact, LogMatrix,
    OrderUndecidableError,
)


class TestCyclotomic:
    def test_value_at_zero_is_p(self):
        for p in (3, 5, 7):
            for n in range(1, 7):
                assert cyclotomic(p, n, 3).at_zero() == p

    def test_p3_n1_polynomial(self):
        # 1 + (1+X) + (1+X)^2 = 3 + 3X + X^2
        f = cyclotomic(3, 1, 3)
        assert list(f.coeffs) == [3, 3, 1]

    def test_p5_n2_low_coefficients_binomial_oracle(self):
        from math import comb
        f = cyclotomic(5, 2, 4)
        assert f.coeffs[0] == 5
        assert f.coeffs[1] == 5 + 10 + 15 + 20  # sum of C(5i, 1)
        assert f.coeffs[2] == sum(comb(5 * i, 2) for i in range(5))


class TestHalfLog:
    def test_constant_term(self):
        for p in (3, 5):
            for sign in "+-":
                f = half_log(p, sign, 6, 20)
                assert f.at_zero().agrees_with(Fraction(1, p))

    def test_order_zero(self):
        f = half_log(5, "+", 6, 20)
        rho, lead = f.ord_and_leading()
        assert rho == 0
        assert lead.agrees_with(Fraction(1, 5))

    def test_p3_minus_low_terms_big_rational_oracle(self):
        # first factor of log^- at p=3 is Phi_1(1+X)/3 = 1 + X + X^2/3; an
        # independently assembled big-rational product must agree
        f = half_log_exact(3, "-", 3, 1)
        assert list(f.coeffs) == [Fraction(1, 3), Fraction(1, 3), Fraction(1, 9)]
        g = half_log(3, "-", 3, 14)
        oracle = half_log_exact(3, "-", 3, 9)
        for j in range(3):
            assert g.coeffs[j].agrees_with(oracle.coeffs[j])

    def test_cutoff_stability(self):
        # beyond the certified minimum, increasing K changes no reported digit
        p, M, prec2 = 5, 8, 24
        base = half_log(p, "+", M, prec2)
        k_needed = 2
        while True:
            try:
                pinned = half_log(p, "+", M, prec2, K=k_needed)
                break
            except PrecisionError:
                k_needed += 1
        bigger = half_log(p, "+", M, prec2, K=k_needed + 3)
        for a, b in zip(pinned.coeffs, bigger.coeffs):
            assert a.agrees_with(b)

    def test_certification_failure_reported(self):
        with pytest.raises(PrecisionError):
            half_log(5, "+", 8, 40, K=2)

    def test_p_times_half_log_denominator_growth(self):
        # p * log^{sign} is integral below the first factor top (index p^k - p^{k-1}
        # for the first factor); beyond that the denominator grows by one power
        # of p per factor whose top has been passed.  Check the certified bound.
        p = 5
        for sign in "+-":
            f = half_log(p, sign, 12, 28)
            for j, c in enumerate(f.coeffs):
                v = (c * p).valuation()
                if not v.decided:
                    continue
                tops = 0
                k = 1 if sign == "-" else 2
                while p ** (k - 1) <= j:
                    tops += 1
                    k += 2
                assert v.v2 >= -2 * tops

    def test_p_times_half_log_integral_below_first_top(self):
        p = 5
        for sign in "+-":
            f = half_log(p, sign, p - 1, 20)
            for c in f.coeffs:
                v = (c * p).valuation()
                assert (not v.decided) or v.v2 >= 0


class TestDivide:
    def test_identity(self):
        f = half_log(5, "-", 6, 20)
        one = f.divide(f)
        assert one.coeffs[0].agrees_with(1)
        for c in one.coeffs[1:]:
            assert c.agrees_with(0)

    def test_round_trip_random(self):
        rng = random.Random(7)
        p, M = 5, 8
        for _ in range(15):
            f = TruncatedSeries.make(
                [PadicElement.from_rational(p, rng.randrange(-50, 50), 30)
                 for _ in range(M)], M, "Qp")
            g = TruncatedSeries.make(
                [PadicElement.from_rational(p, 1 + (rng.randrange(0, 5) if j else 0), 30)
                 for j in range(M)], M, "Qp")
            h = f.divide(g)
            back = h * g
            for a, b in zip(back.coeffs, f.coeffs):
                assert a.agrees_with(b)

    def test_divide_by_one_plus_x(self):
        f = TruncatedSeries.from_rationals([1, 0, 0, 0], 4)
        g = TruncatedSeries.from_rationals([1, 1, 0, 0], 4)
        h = f.divide(g)
        assert list(h.coeffs) == [1, -1, 1, -1]

    def test_cyclotomic_minus_p_over_x_binomial_series(self):
        from math import comb
        p, M = 5, 6
        f = cyclotomic(p, 1, M + 2) - TruncatedSeries.from_rationals(
            [p] + [0] * (M + 1), M + 2)
        # Phi_1(1+X) - p = ((1+X)^p - 1 - pX)/X, so dividing by X twice gives
        # the pure binomial tail
        quotient = TruncatedSeries.make(f.coeffs[1:], M + 1, "Q")
        for j in range(M):
            expected = comb(p, j + 2) if j + 2 <= p else 0
            assert quotient.coeffs[j] == expected

    def test_divide_rejects_undecided_constant(self):
        p = 5
        z = PadicElement.zero(p, 10)
        g = TruncatedSeries.make([z, PadicElement.one(p, 10)], 2, "Qp")
        f = TruncatedSeries.make([PadicElement.one(p, 10)] * 2, 2, "Qp")
        with pytest.raises(PrecisionError):
            f.divide(g)


class TestOrdAndLeading:
    def test_simple_inspection(self):
        f = TruncatedSeries.from_rationals([0, 0, 1, 5], 4)
        rho, lead = f.ord_and_leading()
        assert (rho, lead) == (2, 1)

    def test_zero_series_undecidable(self):
        p = 5
        f = TruncatedSeries.make([PadicElement.zero(p, 10)] * 4, 4, "Qp")
        with pytest.raises(OrderUndecidableError):
            f.ord_and_leading()

    def test_padic_certified(self):
        p = 5
        f = TruncatedSeries.make(
            [PadicElement.zero(p, 10), PadicElement.from_rational(p, 25, 10)], 2, "Qp")
        rho, lead = f.ord_and_leading()
        assert rho == 1
        assert lead.valuation().half == 2


class TestLogMatrix:
    def test_z_log_entries(self):
        p = 5
        m = LogMatrix.build(p, 6, 20)
        (a, b), (c, d) = m.at_zero()
        assert a.agrees_with(Fraction(1, p))
        assert b.agrees_with(Fraction(1, p))
        alpha = PadicElement.sqrt_minus_p(p, 30)
        assert c.agrees_with(alpha / p)
        assert d.agrees_with(-alpha / p)

    def test_row_times_at_zero(self):
        p = 5
        m = LogMatrix.build(p, 4, 16)
        one = TruncatedSeries.make([PadicElement.one(p, 24, True)] +
                                   [PadicElement.zero(p, 24, True)] * 3, 4, "Qp(s)")
        g_alpha, g_beta = m.row_times(one, one)
        # (1,1) * M_log at X=0 = ((1+alpha)/p, (1+beta)/p)
        alpha = PadicElement.sqrt_minus_p(p, 30)
        assert g_alpha.at_zero().agrees_with((1 + alpha) / p)
        assert g_beta.at_zero().agrees_with((1 - alpha) / p)


class TestSerialization:
    def test_json_round_trip(self):
        f = half_log(5, "+", 5, 16)
        g = TruncatedSeries.from_json(f.to_json())
        assert g.trunc == f.trunc
        for a, b in zip(f.coeffs, g.coeffs):
            assert a == b
