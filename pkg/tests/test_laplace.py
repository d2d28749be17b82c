import pytest

import mpmath
from mpmath import mp, mpf, mpc, pi, exp, quad, inf

from resurlab.precision import working_precision, digits_agree
from resurlab.series import StokesTower, borel_transform, coefficients_from_stokes
from resurlab.borel import build_approximant
from resurlab.kernels import e1_continued_upper
from resurlab.laplace import (
    lateral_sum,
    discontinuity,
    median_sum,
    default_eps,
    TowerTail,
    ConvergenceRegion,
    RayCollision,
    LaplaceError,
)

I = mpc(0, 1)


def make_tower(consts, E=None):
    return StokesTower(E if E is not None else 2 * pi * I, consts)


def pade_of(t, N=40, L=19, M=19):
    return build_approximant(borel_transform(coefficients_from_stokes(t, N)), L, M)


class TestLateralSum:
    def test_constant_borel_function(self):
        # b(zeta) = 1, theta = 0, z = 1: integral e^{-zeta} d zeta = 1
        r = lateral_sum(lambda zeta: mpc(1), 0, 1, method="quad")
        assert digits_agree(r.value, 1) > 40

    def test_single_pole_closed_form_matches_kernel(self):
        # b = -(1/2 pi i)/(zeta - 2 pi i): lateral sum at theta=0 equals
        # -e1(-1/z), no residue crossing for this direction pair
        with working_precision():
            from resurlab.kernels import e1

            t = make_tower({1: mpc(1)})
            z = mpc("0.7", "0.3")
            r = lateral_sum(None, 0, z, tower=t, method="poles")
            oracle = quad(
                lambda u: exp(-u / z) * (-1 / (2 * pi * I)) / (u - 2 * pi * I),
                [0, 7, 30, inf],
            )
            assert digits_agree(r.value, -e1(-1 / z)) > 70
            assert digits_agree(r.value, oracle) > 40

    def test_quadrature_vs_closed_form_many_angles(self):
        with working_precision():
            t = make_tower({1: mpc(1, "0.5"), -1: mpc("0.3"), 2: mpc("0.8")})
            b = pade_of(t)
            for theta, z in [
                (mpf(0), mpc("0.8", "0.9")),
                (pi / 2 - mpf("0.3"), mpc("0.8", "0.9")),
                (pi / 2 + mpf("0.3"), mpc("-0.5", "0.7")),
                (pi, mpc("-0.5", "0.7")),
                (-pi / 2 + mpf("0.2"), mpc("0.4", "-0.6")),
            ]:
                r = lateral_sum(
                    b, theta, z, tower=t, method="both", quad_maxdegree=10
                )
                assert r.error_estimate < mpf(10) ** -40, (theta, z, r.error_estimate)

    def test_convergence_precondition(self):
        t = make_tower({1: mpc(1)})
        with pytest.raises(ConvergenceRegion):
            lateral_sum(None, pi, mpc(1, "0.1"), tower=t, method="poles")

    def test_ray_collision(self):
        t = make_tower({1: mpc(1)})
        with pytest.raises(RayCollision):
            lateral_sum(None, pi / 2, mpc(1, 1), tower=t, method="poles")

    def test_growing_approximant_refused(self):
        from resurlab.borel import RationalApproximant

        bad = RationalApproximant((mpc(0), mpc(1), mpc(1)), (mpc(1), mpc(1)), (2, 1), 10)
        with pytest.raises(LaplaceError, match="grows"):
            lateral_sum(bad, 0, 1, method="quad")


class TestDiscontinuity:
    def test_empty_ray(self):
        t = make_tower({1: mpc(1)})
        d = discontinuity(t, 0, mpc(1, "0.2"))
        assert d.value == 0

    def test_exponential_sum_matches_lateral_difference(self):
        with working_precision():
            t = make_tower({1: mpc(1, "0.5"), -1: mpc("0.3"), 2: mpc("0.8"), -2: mpc(1)})
            b = pade_of(t, N=44, L=21, M=21)
            z = mpc("0.4", "0.8")
            d = discontinuity(t, pi / 2, z, b=b, cross_check=True, quad_maxdegree=10)
            assert d.delta < mpf(10) ** -35

    def test_upper_tower_disc_equals_generating_function(self):
        # disc_theta = sum_{m>0} S_m e^{-E m / z} = f(-E/(2 pi i z)) with f
        # the generating q-series of the ray constants
        with working_precision():
            consts = {1: mpc(2), 2: mpc(-1), 3: mpc("0.25")}
            t = make_tower(consts)
            z = mpc("0.2", "0.9")
            d = discontinuity(t, pi / 2, z)
            w = -t.spacing / (2 * pi * I * z)
            f = sum(a * exp(2 * pi * I * m * w) for m, a in consts.items())
            assert digits_agree(d.value, f) > 70


class TestMedianSum:
    def test_no_pole_ray_median_equals_lateral(self):
        # direction without singularities: median = ordinary sum
        with working_precision():
            t = make_tower({1: mpc(1), -1: mpc(1)})
            z = mpc("0.9", "0.35")
            med = median_sum(None, t, pi / 4, z, method="poles")
            s = lateral_sum(None, pi / 4, z, tower=t, method="poles")
            assert digits_agree(med.value, s.value) > 70

    def test_branch_identity_residuals(self):
        with working_precision():
            t = make_tower({1: mpc(1, 1), -1: mpc(2), 2: mpc("0.5")})
            z = mpc("0.3", "0.8")
            med = median_sum(None, t, pi / 2, z, method="poles")
            assert med.branch_residuals
            for r in med.branch_residuals:
                assert r < mpf(10) ** -70

    def test_median_reconstructs_cusp_form_style_target(self):
        # single-coefficient model of the cusp-form construction:
        # f(z) = g(-1/z)/2 + A e1c(-1/z), tower {2 pi i, -A}
        with working_precision():
            A = mpf(1)
            t = make_tower({1: -A})
            for z in [mpc("0.4", "0.8"), mpc("-0.4", "0.8"), mpc(0, 1), mpc(0, "0.5")]:
                med = median_sum(None, t, pi / 2, z, method="poles")
                target = exp(2 * pi * I * (-1 / z)) / 2 + A * e1_continued_upper(-1 / z)
                assert digits_agree(med.value, target) > 70, z

    def test_quadrature_median_matches_closed_form(self):
        with working_precision():
            t = make_tower({1: mpc(-24), 2: mpc(252)})
            b = pade_of(t, N=44, L=21, M=21)
            z = mpc("0.25", "0.6")
            mq = median_sum(b, t, pi / 2, z, method="quad", quad_maxdegree=10)
            mpoles = median_sum(None, t, pi / 2, z, method="poles")
            assert abs(mq.value - mpoles.value) < mpf(10) ** -34

    def test_default_eps_capped(self):
        t = make_tower({1: mpc(1), -1: mpc(1)})
        e = default_eps(t, pi / 2)
        assert e <= mpf("0.01") * pi + mpf(10) ** -30
