import pytest

import mpmath
from mpmath import mp, mpf, mpc, pi, gamma

from resurlab.precision import working_precision, digits_agree
from resurlab.series import FormalSeries, StokesTower, borel_transform, coefficients_from_stokes
from resurlab.borel import (
    build_approximant,
    extract_singularities,
    detect_tower,
    detect_tower_from_poles,
    leading_stokes_by_large_order,
    AmbiguousLattice,
    BorelAnalysisError,
)

I = mpc(0, 1)


def borel_of_tower(t, N):
    return borel_transform(coefficients_from_stokes(t, N))


class TestBuildApproximant:
    def test_geometric_reproduced_exactly(self):
        # truncation of 1/(1-zeta): (0,1) approximant puts the root at 1
        with working_precision():
            b = FormalSeries([mpc(1)] * 10, metadata={"borel_plane": True})
            r = build_approximant(b, 0, 1)
            roots = r.poles()
            assert len(roots) == 1
            assert digits_agree(roots[0], 1) > 70

    def test_four_pole_tower(self):
        with working_precision():
            t = StokesTower(
                2 * pi * I,
                {1: mpc(1), -1: mpc(1), 2: mpc("0.5"), -2: mpc("0.5")},
            )
            b = borel_of_tower(t, 40)
            r1 = build_approximant(b, 19, 19)
            r2 = build_approximant(b, 18, 18)
            rep = extract_singularities(r1, r2)
            stable = rep.stable_poles
            locs = sorted((p.location for p in stable), key=lambda z: (abs(z), z.imag))
            expected = sorted(
                [2 * pi * I, -2 * pi * I, 4 * pi * I, -4 * pi * I],
                key=lambda z: (abs(z), z.imag),
            )
            assert len(locs) >= 4
            for e in expected:
                assert any(digits_agree(z, e) > 25 for z in locs)

    def test_imaginary_axis_spacing(self):
        with working_precision():
            E = (4 * pi ** 2 / 3) * I
            t = StokesTower(E, {1: mpc(1), -1: mpc(1), 2: mpc("0.3"), -2: mpc("0.3")})
            b = borel_of_tower(t, 40)
            rep = extract_singularities(
                build_approximant(b, 19, 19), build_approximant(b, 18, 18)
            )
            for p in rep.stable_poles:
                assert abs(p.location.real) < mpf(10) ** -20
                ratio = p.location.imag / (4 * pi ** 2 / 3)
                assert abs(ratio - mpmath.nint(ratio)) < mpf(10) ** -20

    def test_too_few_coefficients_rejected(self):
        b = FormalSeries([mpc(1)] * 5)
        with pytest.raises(BorelAnalysisError):
            build_approximant(b, 10, 10)


class TestExtractSingularities:
    def test_polynomial_is_entire(self):
        with working_precision():
            b = FormalSeries([mpc(3), mpc(-1), mpc("0.5")] + [mpc(0)] * 20)
            r1 = build_approximant(b, 6, 3)
            r2 = build_approximant(b, 5, 4)
            rep = extract_singularities(r1, r2)
            assert rep.stable_poles == () or all(
                abs(p.residue) < mpf(10) ** -40 for p in rep.stable_poles
            )

    def test_stokes_constants_recovered_20_digits(self):
        # tower A_m = 1/m^2 for |m| <= 3: constants back to >= 20 digits
        with working_precision():
            consts = {}
            for m in range(1, 4):
                consts[m] = mpc(1) / m ** 2
                consts[-m] = mpc(1) / m ** 2
            t = StokesTower(2 * pi * I, consts)
            b = borel_of_tower(t, 60)
            rep = extract_singularities(
                build_approximant(b, 29, 29), build_approximant(b, 27, 27)
            )
            tower = rep.merged_tower
            assert tower is not None
            assert digits_agree(tower.spacing, 2 * pi * I) > 20
            for m, a in consts.items():
                assert digits_agree(tower.constant(m), a) > 20


class TestDetectTower:
    def test_exact_lattice(self):
        poles = [
            (2 * pi * I, mpc(1)),
            (-2 * pi * I, mpc(1)),
            (4 * pi * I, mpc(2)),
            (-4 * pi * I, mpc(2)),
        ]
        t = detect_tower_from_poles(poles)
        assert digits_agree(t.spacing, 2 * pi * I) > 70
        assert set(t.constants) == {1, -1, 2, -2}

    def test_perturbed_lattice(self):
        with working_precision():
            jit = mpf(10) ** -25
            poles = [
                (2 * pi * I + jit, mpc(1)),
                (-2 * pi * I + jit * I, mpc(1)),
                (4 * pi * I - jit, mpc(2)),
            ]
            t = detect_tower_from_poles(poles)
            assert digits_agree(t.spacing, 2 * pi * I) > 24
            assert all(r < mpf(10) ** -23 for r in t.fit_residuals)

    def test_incompatible_pair_is_ambiguous(self):
        with pytest.raises(AmbiguousLattice):
            detect_tower_from_poles([(2 * pi * I, mpc(1)), (3 * pi * I, mpc(1))])


class TestLeadingStokes:
    def test_single_constant_exact(self):
        with working_precision():
            t = StokesTower(2 * pi * I, {1: mpc(5)})
            s = coefficients_from_stokes(t, 40)
            est = leading_stokes_by_large_order(s, 2 * pi * I)
            assert est.converged
            assert digits_agree(est.a_plus, 5) > 15

    def test_symmetric_pair(self):
        with working_precision():
            t = StokesTower(2 * pi * I, {1: mpc(1), -1: mpc(1)})
            s = coefficients_from_stokes(t, 40)
            est = leading_stokes_by_large_order(s, 2 * pi * I)
            assert digits_agree(est.a_plus, 1) > 15
            assert digits_agree(est.a_minus, 1) > 15

    def test_contaminated_tower(self):
        with working_precision():
            t = StokesTower(
                2 * pi * I, {1: mpc(2, 1), -1: mpc("0.3"), 2: mpc(4), -2: mpc(1, 1)}
            )
            s = coefficients_from_stokes(t, 60)
            est = leading_stokes_by_large_order(s, 2 * pi * I)
            assert digits_agree(est.a_plus, mpc(2, 1)) > 12
            assert digits_agree(est.a_minus, mpc("0.3")) > 12

    def test_zero_series(self):
        s = FormalSeries([mpc(0)] * 30)
        est = leading_stokes_by_large_order(s, 1)
        assert est.a_plus == 0 and est.a_minus == 0
        assert est.error_estimate == 0
        assert est.converged


class TestPipelineOracle:
    def test_random_towers_recover_constants(self):
        # synthetic towers, support <= 5: E to >= 20 digits, A_m to >= 18
        import random

        rng = random.Random(12345)
        with working_precision():
            for trial in range(3):
                E = mpc(rng.uniform(0.5, 2), rng.uniform(-2, 2))
                support = rng.sample([1, -1, 2, -2, 3, -3, 4, 5], k=4)
                if 1 not in support and -1 not in support:
                    support.append(1)
                consts = {
                    m: mpc(rng.uniform(-3, 3), rng.uniform(-3, 3)) for m in support
                }
                t = StokesTower(E, consts)
                b = borel_of_tower(t, 60)
                rep = extract_singularities(
                    build_approximant(b, 29, 29), build_approximant(b, 27, 27)
                )
                tower = rep.merged_tower
                assert tower is not None, f"trial {trial}: no tower detected"
                expected = StokesTower(E, consts).canonical()
                assert digits_agree(tower.spacing, expected.spacing) > 20
                for m, a in expected.constants.items():
                    assert digits_agree(tower.constant(m), a) > 18
