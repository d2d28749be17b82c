import mpmath
from mpmath import mp, mpf, mpc, pi, exp, quad, inf, gammainc, factorial

import pytest

from resurlab.precision import working_precision, digits_agree
from resurlab.kernels import (
    e1,
    e1_principal_value,
    e1_continued_upper,
    e1_asymptotic_coefficient,
    e1_sum_regularized,
    KernelError,
)

I = mpc(0, 1)


def reference_e1(z):
    """Independent reference: (1/2 pi i) e^{2 pi i z} Gamma(0, 2 pi i z)."""
    w = 2 * pi * I * z
    return exp(w) * gammainc(0, w) / (2 * pi * I)


class TestE1Values:
    def test_against_incomplete_gamma_random(self):
        # 100 pseudo-random points in the cut plane, >= 30 digits
        with working_precision():
            rnd = mpmath.rand
            mp_seed_points = []
            for k in range(100):
                # deterministic scatter over magnitudes 0.05 .. 40
                r = mpf("0.05") * mpf("1.07") ** k + k * mpf("0.11")
                th = mpf(k) * mpf("0.37") - 3
                z = r * exp(I * th)
                if z.real == 0 and z.imag >= 0:
                    z += mpf("0.01")
                mp_seed_points.append(z)
            for z in mp_seed_points:
                assert digits_agree(e1(z), reference_e1(z)) > 30

    def test_against_defining_integral(self):
        # oracle: double-exponential quadrature of int_0^oo e^{-2 pi t}/(t+iz) dt
        with working_precision():
            for z in [mpc(2, 1), mpc(-3, "0.5"), mpc("0.3", "-0.8"), mpc(-1, -2), mpc(12, -7)]:
                val = quad(lambda t: exp(-2 * pi * t) / (t + I * z), [0, 1, 10, inf])
                val /= 2 * pi * I
                assert digits_agree(e1(z), val) > 30

    def test_series_cf_overlap_annulus(self):
        # both internal routes agree on an annulus |w| ~ prec*0.5
        with working_precision():
            from resurlab.kernels import _gamma0_series, _gamma0_cf_times_exp

            for k in range(12):
                th = mpf(k) * 2 * pi / 12
                if abs(th - pi) < mpf("0.8"):
                    continue  # CF sector excludes near-cut directions
                w = 110 * exp(I * th)
                bump = int(float(abs(w) + max(mpf(0), w.real)) * 1.45) + 24
                with working_precision(extra=bump):
                    a = exp(w) * _gamma0_series(w)
                b = _gamma0_cf_times_exp(w)
                assert digits_agree(a, b) > 60

    def test_leading_asymptotics_on_negative_imag_axis(self):
        # z = -i t, t large: e1 ~ (1/2 pi i) * 1/(2 pi t)
        with working_precision():
            t = mpf(4000)
            z = -I * t
            lead = 1 / (2 * pi * I * 2 * pi * t)
            assert digits_agree(e1(z), lead) > 3

    def test_asymptotic_expansion_at_radius_ten(self):
        # optimal truncation of (1/2 pi i) sum (-1)^k k!/(2 pi i z)^{k+1} at |z| = 10
        with working_precision():
            for z in [mpc(10, 0), mpc(0, -10), mpc(7, 7)]:
                acc = mpc(0)
                best = None
                term_prev = mpf("inf")
                for k in range(200):
                    term = e1_asymptotic_coefficient(k, 1) * z ** (-(k + 1))
                    if abs(term) > term_prev:
                        break
                    term_prev = abs(term)
                    acc += term
                    best = abs(term)
                # agreement limited by the optimally-truncated remainder
                assert abs(e1(z) - acc) < 10 * best

    def test_branch_jump_across_cut(self):
        # e1(z right of cut) - e1(z left of cut) = -e^{2 pi i z}
        with working_precision():
            s = mpf(2)
            dz = mpf(10) ** -30
            right = e1(I * s + dz)
            left = e1(I * s - dz)
            assert digits_agree(right - left, -exp(2 * pi * I * (I * s))) > 25

    def test_cut_default_is_upper_w_boundary(self):
        with working_precision():
            s = mpf("1.5")
            dz = mpf(10) ** -35
            boundary = e1(I * s + dz)
            assert digits_agree(e1(I * s), boundary) > 30

    def test_principal_value_is_average(self):
        with working_precision():
            s = mpf("0.8")
            dz = mpf(10) ** -35
            avg = (e1(I * s + dz) + e1(I * s - dz)) / 2
            assert digits_agree(e1_principal_value(I * s), avg) > 30

    def test_continued_upper_branch(self):
        with working_precision():
            z = mpc(-1, 2)  # arg z > pi/2
            assert digits_agree(
                e1_continued_upper(z), e1(z) - exp(2 * pi * I * z)
            ) > 60
            z2 = mpc(1, 1)  # arg z < pi/2: principal
            assert digits_agree(e1_continued_upper(z2), e1(z2)) > 75

    def test_origin_rejected(self):
        with pytest.raises(KernelError):
            e1(0)


class TestRegularizedSums:
    def test_matches_brute_force_for_decaying_coefficients(self):
        # A_m = 2^-m: the brute-force sum converges, so the regularized
        # head+tail evaluation must reproduce it
        with working_precision():
            u = mpc("0.4", "0.9")

            def a(m):
                return mpf(2) ** -m

            def lval(k):
                return mpmath.polylog(k, mpf("0.5"))

            reg = e1_sum_regularized(a, [(u, 1)], M=25, lvalues=lval, K=32)
            brute = sum(a(m) * e1(m * u) for m in range(1, 300))
            assert abs(reg - brute) < mpf(10) ** -40

    def test_pair_cancellation_skips_polar_order(self):
        # symmetric directions (+u, -u) cancel the k=0 kernel, so L(1) is
        # never requested even when it would be polar; different
        # truncations of the same sum must agree
        with working_precision():
            u = mpc(0, 1) / 3

            def a(m):
                return mpf(1)  # L(j) = zeta(j), polar at j = 1

            calls = []

            def lval(k):
                calls.append(k)
                if k == 1:
                    raise AssertionError("polar L(1) must not be requested")
                return mpmath.zeta(k)

            v1 = e1_sum_regularized(a, [(u, 1), (-u, 1)], M=100, lvalues=lval, K=17)
            v2 = e1_sum_regularized(a, [(u, 1), (-u, 1)], M=200, lvalues=lval, K=25)
            assert 1 not in calls
            assert abs(v1 - v2) < mpf(10) ** -25
