import pytest
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc, pi, gamma

from resurlab.precision import working_precision, digits_agree
from resurlab.series import (
    FormalSeries,
    StokesTower,
    SeriesError,
    borel_transform,
    gevrey1_fit,
    coefficients_from_stokes,
)

I = mpc(0, 1)


class TestBorelTransform:
    def test_zero_series(self):
        s = FormalSeries([0] * 12)
        b = borel_transform(s)
        assert all(c == 0 for c in b.coeffs)

    def test_gamma_coefficients_give_geometric_germ(self):
        # c_n = Gamma(n) for n >= 1 maps to the geometric germ 1/(1-zeta)
        with working_precision():
            s = FormalSeries([mpc(0)] + [gamma(n) for n in range(1, 20)])
        b = borel_transform(s)
        for c in b.coeffs:
            assert digits_agree(c, 1) > 70

    def test_factorial_coefficients_give_squared_germ(self):
        # c_n = n! maps to sum (n) zeta^(n-1) = 1/(1-zeta)^2
        with working_precision():
            s = FormalSeries([mpc(0)] + [gamma(n + 1) for n in range(1, 20)])
        b = borel_transform(s)
        for k, c in enumerate(b.coeffs):
            assert digits_agree(c, k + 1) > 70

    def test_delta_part_recorded(self):
        s = FormalSeries([mpc(7)] + [mpc(1)] * 10)
        b = borel_transform(s)
        assert b.metadata["delta_coefficient"] == mpc(7)

    def test_positive_integer_exponent_rejected(self):
        s = FormalSeries([1] * 10, lead_exponent=Fraction(2))
        with pytest.raises(SeriesError, match="2"):
            borel_transform(s)

    def test_linearity(self):
        with working_precision():
            a = FormalSeries([mpc(n, -n) for n in range(15)])
            b = FormalSeries([mpc(2 * n + 1) for n in range(15)])
            lam, mu = mpc("0.3", "1.7"), mpc(-2, "0.25")
            lhs = borel_transform(a.scaled(lam).plus(b.scaled(mu)))
            rhs = borel_transform(a).scaled(lam).plus(borel_transform(b).scaled(mu))
            for x, y in zip(lhs.coeffs, rhs.coeffs):
                assert abs(x - y) <= mpf(2) ** (-200) * (1 + abs(x))

    def test_half_integer_exponent(self):
        with working_precision():
            s = FormalSeries([mpc(1)] * 10, lead_exponent=Fraction(1, 2))
            b = borel_transform(s)
            assert b.lead_exponent == Fraction(3, 2)
            for k in range(10):
                assert digits_agree(b.coeffs[k], 1 / gamma(k - mpf("0.5"))) > 70

    def test_partial_fraction_roundtrip(self):
        # tower with E = 2 pi i, A_1 = A_-1 = 1: Borel coefficients must match
        # the geometric expansion of -(1/2 pi i) sum_m A_m/(zeta - E m).
        with working_precision():
            t = StokesTower(2 * pi * I, {1: mpc(1), -1: mpc(1)})
            s = coefficients_from_stokes(t, 40)
            b = borel_transform(s)
            for k in range(len(b.coeffs)):
                # oracle: direct geometric expansion of the partial fractions
                expected = sum(
                    mpc(1) / (2 * pi * I) * a / (2 * pi * I * m) ** (k + 1)
                    for m, a in t.constants.items()
                ) * (2 * pi * I)
                expected = sum(
                    a / (2 * pi * I * m) ** (k + 1) for m, a in t.constants.items()
                ) / (2 * pi * I)
                if expected == 0:
                    assert abs(b.coeffs[k]) < mpf(2) ** (-220)
                else:
                    assert digits_agree(b.coeffs[k], expected) > 65


class TestGevrey1Fit:
    def test_convergent_series_not_gevrey(self):
        with working_precision():
            s = FormalSeries([mpf(2) ** (-n) for n in range(40)])
        fit = gevrey1_fit(s)
        assert not fit.ok

    def test_symmetric_tower_radius(self):
        with working_precision():
            t = StokesTower(2 * pi * I, {1: mpc(1), -1: mpc(1)})
            s = coefficients_from_stokes(t, 48)
        fit = gevrey1_fit(s)
        assert fit.ok
        assert abs(fit.radius_estimate - 2 * pi) / (2 * pi) < 0.01

    def test_imaginary_spacing_tower_radius(self):
        with working_precision():
            E = (4 * pi ** 2 / 3) * I
            t = StokesTower(
                E, {1: mpc("1.3"), -1: mpc("1.3"), 2: mpc("0.4"), -2: mpc("0.4")}
            )
            s = coefficients_from_stokes(t, 48)
        fit = gevrey1_fit(s)
        assert fit.ok
        target = 4 * pi ** 2 / 3
        assert abs(fit.radius_estimate - target) / target < 0.01

    def test_radius_within_five_percent_generic(self):
        with working_precision():
            E = mpc("1.1", "-0.7")
            t = StokesTower(E, {1: mpc(1, 2), -1: mpc("0.5"), 2: mpc(3), -2: mpc(0, 1), 3: mpc(1)})
            s = coefficients_from_stokes(t, 40)
        fit = gevrey1_fit(s)
        assert fit.ok
        assert abs(fit.radius_estimate - abs(E)) / abs(E) < 0.05


class TestCoefficientsFromStokes:
    def test_two_term_closed_form(self):
        # A_1 = 2 pi i, A_-1 = -2 pi i, E = 1: c_n = Gamma(n) (1 - (-1)^n)
        with working_precision():
            t = StokesTower(1, {1: 2 * pi * I, -1: -2 * pi * I})
            s = coefficients_from_stokes(t, 20)
            for n in range(1, 21):
                expected = gamma(n) * (1 - (-1) ** n)
                if expected == 0:
                    assert abs(s.coeffs[n]) < mpf(2) ** (-220)
                else:
                    assert digits_agree(s.coeffs[n], expected) > 70

    def test_even_constants_parity(self):
        # even constants A_m = A_-m kill odd-n coefficients of the series
        with working_precision():
            t = StokesTower(2 * pi * I, {1: mpc(2), -1: mpc(2), 3: mpc(1), -3: mpc(1)})
            s = coefficients_from_stokes(t, 30)
        for n in range(1, 31):
            if n % 2 == 1:
                assert abs(s.coeffs[n]) < mpf(2) ** (-200) * abs(s.coeffs[n - 1] + 1)

    def test_divisor_sequence_brute_force(self):
        # support |m| <= 200 against a naive double loop at working precision
        def d(n):
            return sum(1 for k in range(1, n + 1) if n % k == 0)

        with working_precision():
            consts = {}
            for m in range(1, 201):
                consts[m] = mpc(d(m))
                consts[-m] = mpc(d(m))
            t = StokesTower(2 * pi * I, consts)
            s = coefficients_from_stokes(t, 30)
            for n in (1, 2, 7, 30):
                brute = mpc(0)
                for m, a in consts.items():
                    brute += a / (2 * pi * I * m) ** n
                brute *= gamma(n) / (2 * pi * I)
                if brute == 0:
                    assert abs(s.coeffs[n]) < mpf(10) ** -30
                else:
                    assert abs(s.coeffs[n] - brute) < mpf(10) ** -30 * abs(brute)

    def test_rejects_empty_map(self):
        with pytest.raises(SeriesError, match="empty"):
            coefficients_from_stokes(StokesTower(1, {1: 1}).__class__(1, {}), 5)

    def test_c0_is_zero(self):
        t = StokesTower(2 * pi * I, {1: mpc(1)})
        s = coefficients_from_stokes(t, 5)
        assert s.coeffs[0] == 0


class TestStokesTower:
    def test_parity_detection(self):
        even = StokesTower(1, {1: mpc(2), -1: mpc(2)})
        odd = StokesTower(1, {1: mpc(2), -1: mpc(-2)})
        neither = StokesTower(1, {1: mpc(2), -1: mpc(3)})
        assert even.parity() == "even"
        assert odd.parity() == "odd"
        assert neither.parity() is None

    def test_zero_spacing_rejected(self):
        with pytest.raises(SeriesError):
            StokesTower(0, {1: 1})

    def test_index_zero_rejected(self):
        with pytest.raises(SeriesError):
            StokesTower(1, {0: 1})
