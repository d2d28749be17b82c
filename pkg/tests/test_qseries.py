import pytest

import mpmath
from mpmath import mp, mpf, mpc, pi, exp, gamma

from resurlab.precision import working_precision, digits_agree
from resurlab.series import PrefixTerm
from resurlab.lfunctions import DirichletL
from resurlab.qseries import (
    GeneratingQSeries,
    CocycleRecord,
    QSeriesError,
    cocycle,
    compose,
    coboundary_residual,
    cocycle_extension_probe,
    extract_asymptotics,
    eval_f_by_inverse_mellin,
)

I = mpc(0, 1)

S_GEN = (0, -1, 1, 0)
T_GEN = (1, 1, 0, 1)


def divisor(n):
    n = abs(n)
    return sum(1 for k in range(1, n + 1) if n % k == 0)


class TestEvalF:
    def test_zero_sequence(self):
        g = GeneratingQSeries(coeff=lambda m: mpc(0))
        assert g.eval(mpc(0, 1)) == 0

    def test_divisor_lambert_oracle(self):
        # sum d(m) q^m = sum_k q^k/(1-q^k)
        g = GeneratingQSeries(coeff=lambda m: mpc(divisor(m)), tail_sigma=1.1)
        with working_precision():
            y = mpc(0, 1)
            q = exp(2 * pi * I * y)
            lamb = mpc(0)
            k = 1
            while True:
                t = q ** k / (1 - q ** k)
                lamb += t
                if abs(t) < mpf(2) ** (-mp.prec - 10):
                    break
                k += 1
            assert digits_agree(g.eval(y), lamb) > 70

    def test_even_parity_relation(self):
        # even coefficients: f(-y) = -f(y)
        g = GeneratingQSeries(coeff=lambda m: mpc(divisor(m)), tail_sigma=1.1)
        with working_precision():
            y = mpc("0.3", "0.8")
            assert digits_agree(g.eval(-y), -g.eval(y)) > 70

    def test_odd_parity_relation(self):
        g = GeneratingQSeries(
            coeff=lambda m: mpc(divisor(m)) * (1 if m > 0 else -1), tail_sigma=1.1
        )
        with working_precision():
            y = mpc("-0.2", "0.55")
            assert digits_agree(g.eval(-y), g.eval(y)) > 70

    def test_real_axis_rejected(self):
        g = GeneratingQSeries(coeff=lambda m: mpc(1))
        with pytest.raises(QSeriesError):
            g.eval(mpc(1, 0))

    def test_im_floor_enforced(self):
        g = GeneratingQSeries(coeff=lambda m: mpc(1))
        with pytest.raises(QSeriesError, match="floor"):
            g.eval(mpc(0, "1e-5"))

    def test_tail_bound_recorded(self):
        g = GeneratingQSeries(coeff=lambda m: mpc(divisor(m)), tail_sigma=1.1)
        with working_precision():
            g.eval(mpc(0, 1))
            assert g.last_tail_bound < mpf(2) ** (-mp.prec + 9)


class TestInverseMellinEval:
    def test_single_term(self):
        with working_precision():
            l = DirichletL(
                coeff=lambda m: mpf(1 if m == 1 else 0), abscissa=mpf(0), max_index=1
            )
            v = eval_f_by_inverse_mellin(l, mpf(1), C=mpf(2), maxdegree=8)
            assert digits_agree(v, exp(-2 * pi)) > 40


class TestCocycles:
    def f_qseries(self, y):
        # 1-periodic test function: finite q-series
        q = exp(2 * pi * I * y)
        return q + mpf(3) * q ** 2 - mpf("0.5") * q ** 5

    def test_identity_cocycle_vanishes(self):
        rec = CocycleRecord((1, 0, 0, 1), 2, self.f_qseries)
        with working_precision():
            assert abs(cocycle(rec, mpc("0.3", "1.2"))) < mpf(10) ** -70

    def test_T_cocycle_vanishes_for_periodic(self):
        rec = CocycleRecord(T_GEN, 2, self.f_qseries)
        with working_precision():
            for y in [mpc(0, 1), mpc("0.7", "0.4"), mpc("-2.3", "0.9")]:
                assert abs(cocycle(rec, y)) < mpf(10) ** -70

    def test_determinant_checked(self):
        with pytest.raises(QSeriesError):
            CocycleRecord((2, 0, 0, 1), 1, self.f_qseries)

    def test_coboundary_identity(self):
        with working_precision():
            for g1, g2 in [
                (S_GEN, T_GEN),
                (T_GEN, S_GEN),
                (compose(T_GEN, S_GEN), T_GEN),
            ]:
                r = coboundary_residual(
                    self.f_qseries, 2, g1, g2, mpc("0.21", "1.7")
                )
                assert r < mpf(10) ** -65

    def test_coboundary_identity_fractional_weight(self):
        with working_precision():
            from fractions import Fraction

            r = coboundary_residual(
                self.f_qseries, Fraction(3, 2), T_GEN, T_GEN, mpc("0.4", "2.0")
            )
            assert r < mpf(10) ** -65


class TestExtensionProbe:
    def test_zero_function(self):
        rep = cocycle_extension_probe(
            lambda y: mpc(0), [mpc(k, 1) / 7 for k in range(1, 20)]
        )
        assert all(v == 0 for v in rep.path_values)
        assert rep.max_divided_difference == 0

    def test_polynomial_fit_recovers_polynomial(self):
        with working_precision():
            h = lambda y: 3 - y + mpc("0.25") * y ** 4
            path = [mpc("0.1") * k + mpc(0, "0.5") for k in range(1, 26)]
            rep = cocycle_extension_probe(h, path, fit_degree=4, holdout=5)
            assert rep.fit_residual < mpf(10) ** -60


class TestExtractAsymptotics:
    def test_single_exponential(self):
        with working_precision():
            f = lambda y: exp(2 * pi * I * y)
            fit = extract_asymptotics(f, 10)
            for n in range(11):
                expected = (2 * pi * I) ** n / mpmath.factorial(n)
                assert digits_agree(fit.series.coeffs[n], expected) > 10, n
                assert fit.confidences[n] > 10

    def test_prefix_subtraction(self):
        # f(y) = 1/(2y) + log(-2 pi i y) + e^{2 pi i y}: recover the
        # exponential's coefficients after declaring the prefix
        with working_precision():
            prefix = (
                PrefixTerm(multiplier=mpf("0.5"), power=-1),
                PrefixTerm(multiplier=mpf(1), log_power=1, log_scale=-2 * pi * I),
            )

            def f(y):
                return (
                    mpf("0.5") / y
                    + mpmath.log(-2 * pi * I * y)
                    + exp(2 * pi * I * y)
                )

            fit = extract_asymptotics(f, 8, prefix_model=prefix)
            for n in range(9):
                expected = (2 * pi * I) ** n / mpmath.factorial(n)
                assert digits_agree(fit.series.coeffs[n], expected) > 10, n
