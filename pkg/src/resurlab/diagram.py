"""Round trips through the tower / L-function / generating-function cycle.

Starting from Stokes data, every vertex of the cycle
    constants -> Dirichlet series -> (inverse Mellin) generating function
    -> (expansion at 0, through the functional equation) divergent series
    -> (rational continuation of the Borel germ) recovered constants
is computed and the residual of each edge is reported.  Self-dual data
must close the cycle onto itself; a dual pair maps each member onto its
partner through the duality of their completions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf, mpc, pi, factorial

from .precision import working_precision, digits_agree
from .series import FormalSeries, StokesTower, coefficients_from_stokes
from .borel import build_approximant, extract_singularities
from .lfunctions import CompletedL, asymptotic_from_L, PolarPoint
from .qseries import eval_f_by_inverse_mellin

I = mpc(0, 1)


@dataclass
class DiagramReport:
    edges: dict = field(default_factory=dict)
    closes: bool = False
    detail: dict = field(default_factory=dict)


def roundtrip_diagram(
    spec,
    *,
    n_series: int = 50,
    mellin_points=("0.25", "0.5", "1"),
    support_check: int = 3,
    tolerance_digits: float = 18,
) -> DiagramReport:
    """Execute the full cycle for an exemplar (or ingested data) and report
    per-edge residuals.  Closure means the Borel-plane scan of the
    functional-equation asymptotics recovers the input constants."""
    rep = DiagramReport()
    tower = spec.tower
    completed = spec.completed
    if completed is None:
        raise ValueError("round trip needs functional-equation data")
    if completed.fe.dual:
        return dual_pair_report(spec, n_max=10)
    with working_precision():
        # edge 1: generating function vs inverse Mellin of the L-series
        if spec.generating is not None:
            worst = mpf(0)
            for t in mellin_points:
                t = mpf(t)
                direct = spec.generating.eval(I * t)
                via_line = eval_f_by_inverse_mellin(
                    completed, t, C=completed.base.abscissa + 2,
                    digits=28, maxdegree=7,
                )
                worst = max(worst, abs(direct - via_line))
            rep.edges["inverse_mellin_vs_generating"] = worst

        # edge 2: expansion at the origin through the functional equation
        asym = asymptotic_from_L(completed, n_series)
        rep.detail["series"] = asym

        # edge 3: Borel continuation of the (shifted) series and recovery.
        # For two-sided data the resurgent object is y * f(y): prepend the
        # zeroth coefficient as a shift.
        shifted = FormalSeries((mpc(0),) + asym.coeffs)
        from .series import borel_transform

        germ = borel_transform(shifted)
        L = (n_series - 2) // 2
        r1 = build_approximant(germ, L, L)
        r2 = build_approximant(germ, L - 2, L - 2)
        scan = extract_singularities(r1, r2)
        recovered = scan.merged_tower
        if recovered is None:
            rep.closes = False
            rep.edges["borel_recovery"] = mpf("inf")
            return rep
        rep.detail["recovered_tower"] = recovered

        # expected tower of y*f: spacing E, constants 2*A_m for even data
        # (A_m - A_-m cancellation doubles the one-sided constants)
        expected = expected_series_tower(spec)
        worst_digits = float("inf")
        d = digits_agree(recovered.spacing, expected.spacing)
        worst_digits = min(worst_digits, d)
        for m in range(1, support_check + 1):
            for sgn in (1, -1):
                want = expected.constant(sgn * m)
                if want == 0:
                    continue
                got = recovered.constant(sgn * m)
                worst_digits = min(worst_digits, digits_agree(got, want))
        rep.edges["borel_recovery_digits"] = worst_digits
        rep.closes = bool(worst_digits >= tolerance_digits)
        return rep


def expected_series_tower(spec) -> StokesTower:
    """Tower of the median-resummed series attached to an exemplar."""
    if "doubled_tower" in spec.extras:
        return spec.extras["doubled_tower"]
    return spec.tower


@dataclass
class DualPairReport:
    max_residual_weak: mpf
    max_residual_strong: mpf
    parity_zero_ok: bool
    per_order: tuple


def dual_pair_identities(weak, strong, n_max: int = 10) -> DualPairReport:
    """Cross identities of an ingested dual pair of towers.

    With the weak-side completion continued through the duality
    Lambda_weak(s) = Lambda_strong(-s), the odd coefficients of the
    weak-side expansion are fixed by the strong tower and vice versa:

        c^0_{2n+1} = -2 b_{2n+2},   c^0_{2n}   = 0,
        c^oo_{2n}  = 2 (2 pi)^{2n} a_{2n},   c^oo_{2n+1} = 0,

    where a, b are the exact large-order coefficients of the weak and
    strong towers.  The residuals are pure algebra on the ingested data:
    they quantify how faithfully the continuation machinery implements
    the duality, for any data satisfying the declared parities.
    """
    cw = weak.completed
    cs = strong.completed
    if cw is None or cs is None or cw.partner is None:
        raise ValueError("dual identities need paired completions")
    with working_precision(extra=32):
        a_series = coefficients_from_stokes(weak.tower, 2 * n_max + 3)
        b_series = coefficients_from_stokes(strong.tower, 2 * n_max + 3)
        rows = []
        worst_w = mpf(0)
        worst_s = mpf(0)
        parity_ok = True
        for n in range(0, n_max + 1):
            # weak side, odd orders against the strong tower; the strong
            # series in its own variable carries coefficient b_{k+1} at
            # power k, so the exact large-order value sits at index k
            k = 2 * n + 1
            c0 = cw.continue_via_functional_equation(mpc(-k)) * (
                (2 * pi * I) ** k / factorial(k)
            )
            target = -2 * b_series.coeffs[k]
            resid = abs(c0 - target) / (1 + abs(target))
            worst_w = max(worst_w, resid)
            rows.append(("weak_odd", k, resid))
            if n >= 1:
                z = cw.continue_via_functional_equation(mpc(-2 * n))
                parity_ok = parity_ok and z == 0
            # strong side, even orders against the weak tower
            k2 = 2 * n + 2
            cinf = cs.continue_via_functional_equation(mpc(-k2)) * (
                (2 * pi * I) ** k2 / factorial(k2)
            )
            target2 = 2 * (2 * pi) ** k2 * a_series.coeffs[k2]
            resid2 = abs(cinf - target2) / (1 + abs(target2))
            worst_s = max(worst_s, resid2)
            rows.append(("strong_even", k2, resid2))
            z2 = cs.continue_via_functional_equation(mpc(-(2 * n + 1)))
            parity_ok = parity_ok and z2 == 0
        return DualPairReport(+worst_w, +worst_s, parity_ok, tuple(rows))


def dual_pair_report(spec, n_max: int = 10) -> DiagramReport:
    rep = DiagramReport()
    partner = spec.extras.get("partner")
    if partner is None:
        raise ValueError("dual-pair mode needs a partner file")
    dual = dual_pair_identities(spec, partner, n_max=n_max)
    rep.edges["dual_weak_odd"] = dual.max_residual_weak
    rep.edges["dual_strong_even"] = dual.max_residual_strong
    rep.edges["parity_zeros"] = mpf(0) if dual.parity_zero_ok else mpf(1)
    rep.closes = bool(
        dual.parity_zero_ok
        and dual.max_residual_weak < mpf(10) ** -20
        and dual.max_residual_strong < mpf(10) ** -20
    )
    rep.detail["per_order"] = dual.per_order
    return rep
