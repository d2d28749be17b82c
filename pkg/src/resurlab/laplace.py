"""Lateral Borel-Laplace sums, discontinuities, and median resummation.

A lateral sum along direction theta is the Laplace integral of the
continued Borel transform over the rotated half-line.  Two independent
evaluation paths are provided:

* ``quadrature``: adaptive double-exponential integration of a rational
  approximant, split at the pole radii, with a pole-sum tail model beyond
  the last tower member;
* ``pole_closed_form``: for simple-pole towers, the exact kernel formula
    s_theta(z) = -sum_m S_m [ e1(i zeta_m / (2 pi z)) - sigma_m e^{-zeta_m/z} ]
  where sigma_m marks poles swept when the integration ray is rotated to
  the real axis, and on-ray poles take the boundary value of e1 matching
  the side of the ray.  Infinite towers are truncated with an L-value
  regularized tail.

The discontinuity across a Stokes ray is the exponential sum
sum S_m exp(-zeta_m/z) over the ray members; the median resummation is
the average of the two lateral sums at theta +- eps.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf, mpc, pi, exp

from .precision import working_precision
from .series import StokesTower, SIMPLE_POLE
from .borel import RationalApproximant
from .kernels import e1, e1_asymptotic_coefficient

I = mpc(0, 1)

QUADRATURE = "quadrature"
POLE_CLOSED_FORM = "pole_closed_form"

ANGULAR_GUARD = mpf(10) ** -9


class LaplaceError(ValueError):
    pass


class RayCollision(LaplaceError):
    """The integration ray passes through a detected singularity."""


class ConvergenceRegion(LaplaceError):
    """Re(e^{-i theta} z) <= 0: the Laplace integral diverges."""


def _wrap(a):
    a = mpmath.fmod(a, 2 * pi)
    if a > pi:
        a -= 2 * pi
    if a <= -pi:
        a += 2 * pi
    return a


@dataclass(frozen=True)
class TowerTail:
    """Analytic continuation data for the truncation tail of a tower.

    lvalue_pos(j) = sum_{m>0} S_m / m^j, lvalue_neg(j) = sum_{m>0} S_-m / m^j,
    both continued beyond the convergence abscissa.  order is the number of
    asymptotic orders used when replacing the truncated tail.
    """

    lvalue_pos: object
    lvalue_neg: object = None
    order: int = 24


@dataclass(frozen=True)
class RaySum:
    theta: mpf
    z: mpc
    value: mpc
    method: str
    error_estimate: mpf
    metadata: dict = field(default_factory=dict, compare=False)


def _require_convergence(theta, z):
    if mpmath.re(exp(-I * theta) * z) <= 0:
        raise ConvergenceRegion(
            f"Re(e^-i{float(theta):.3f} z) <= 0 for z = {z}: outside the "
            "Laplace convergence half-plane"
        )


def _check_ray_clear(tower, theta):
    if tower is None:
        return
    for ang in tower.ray_angles():
        if abs(_wrap(theta - ang)) < ANGULAR_GUARD:
            raise RayCollision(
                f"integration direction {float(theta):.6f} hits the tower "
                f"ray at {float(ang):.6f}; offset theta by +-eps"
            )


def _crossing(beta, tstar_arg):
    """Pole sweep indicator when rotating the ray from beta to 0."""
    if beta > 0 and 0 < tstar_arg < beta:
        return 1
    if beta < 0 and beta < tstar_arg < 0:
        return -1
    return 0


def _closed_form(tower: StokesTower, theta, z, tail: TowerTail | None):
    """Exact lateral sum for a simple-pole tower via the e1 kernel."""
    if tower.kind != SIMPLE_POLE:
        raise LaplaceError("closed form requires a simple-pole tower")
    with working_precision(extra=32):
        beta = _wrap(theta - mpmath.arg(z))
        total = mpc(0)
        up = I * tower.spacing / (2 * pi * z)  # e1 direction for m > 0
        arg_up = _wrap(mpmath.arg(tower.spacing) - mpmath.arg(z))
        arg_dn = _wrap(arg_up + pi)
        on_ray_tol = ANGULAR_GUARD

        def side_for(tstar_arg):
            # pole exactly on the rotated contour: boundary value selection
            if abs(tstar_arg) <= on_ray_tol:
                return 1 if beta > 0 else -1
            return 0

        for m, S in sorted(tower.constants.items()):
            if S == 0:
                continue
            rho = tower.spacing * m
            tstar_arg = arg_up if m > 0 else arg_dn
            sig = _crossing(beta, tstar_arg)
            val = e1(m * up, side=side_for(tstar_arg))
            if sig:
                val -= sig * exp(-rho / z)
            total -= S * val
        tail_bound = mpf(0)
        if tail is not None:
            total -= _tail_correction(tower, up, tail)
            tail_bound = _tail_remainder_bound(tower, up, tail)
        return +total, tail_bound


def _tail_correction(tower, up, tail: TowerTail):
    """Replace sum_{|m|>M} S_m e1(...) by asymptotic orders tied to L-values."""
    K = tail.order
    with working_precision(extra=32):
        have_neg = any(m < 0 for m in tower.constants)
        # head partial sums of S_m m^-j for the stored support
        partial_pos = [mpc(0)] * (K + 2)
        partial_neg = [mpc(0)] * (K + 2)
        for m, S in tower.constants.items():
            am = abs(m)
            p = mpc(S)
            for j in range(1, K + 2):
                p /= am
                if m > 0:
                    partial_pos[j] += p
                else:
                    partial_neg[j] += p
        total = mpc(0)
        zero_tol = mpf(2) ** (-mp.prec + 8)
        for k in range(0, K + 1):
            a_up = e1_asymptotic_coefficient(k, up)
            a_dn = e1_asymptotic_coefficient(k, -up)
            terms = []
            if tail.lvalue_pos is not None:
                terms.append((a_up, tail.lvalue_pos, partial_pos[k + 1], False))
            if have_neg and tail.lvalue_neg is not None:
                terms.append((a_dn, tail.lvalue_neg, partial_neg[k + 1], False))
            if have_neg and tail.lvalue_neg is not None and tail.lvalue_pos is not None:
                # combined-kernel cancellation check for symmetric data:
                # if the two asymptotic coefficients cancel against equal
                # L-data, skip the order entirely (polar L at j=1 case)
                if (
                    abs(a_up + a_dn) <= zero_tol * abs(a_up)
                    and _same_lvalues(tower, k + 1)
                ):
                    continue
            for a_coef, lfun, partial, _ in terms:
                total += a_coef * (mpc(lfun(k + 1)) - partial)
        return total


def _same_lvalues(tower, j):
    """True when S_m = S_-m on the support (even data, shared L-values)."""
    return tower.parity() == "even"


def _tail_remainder_bound(tower, up, tail: TowerTail):
    M = tower.max_index()
    K = tail.order
    with working_precision(extra=16):
        sigma = mpf(tower.tail_sigma if tower.tail_sigma is not None else 0)
        kfac = mpmath.factorial(K + 1)
        base = abs(2 * pi * up) * (M + 1)
        if base <= 1:
            return mpf("inf")
        # sum_{m>M} m^sigma * (K+1)! / |2 pi up m|^{K+2} estimated by integral
        expo = K + 2 - sigma
        if expo <= 1:
            return mpf("inf")
        return (
            kfac
            / abs(2 * pi * up) ** (K + 2)
            / (2 * pi)
            * (M + 1) ** (1 - expo)
            / (expo - 1)
            * 2
        )


def _quadrature(b, theta, z, tower, quad_maxdegree):
    """DE quadrature along the rotated half-line, split at pole radii."""
    if isinstance(b, RationalApproximant):
        L, M = b.order
        nd = len(b.numerator_coeffs) - 1
        dd = len(b.denominator_coeffs) - 1
        if nd > dd:
            raise LaplaceError(
                "approximant grows at infinity (numerator degree exceeds "
                "denominator); refuse Laplace integration"
            )
    ph = exp(I * theta)
    radii = []
    r_cut = None
    if tower is not None:
        radii = sorted({abs(tower.spacing) * abs(m) for m in tower.constants})
        # split the contour where the approximant stops resolving the tower
        r_cut = radii[min(len(radii) - 1, 12)] * mpf("1.5") if radii else None
        radii = [r for r in radii if r <= r_cut] if r_cut else radii

    members = []
    if tower is not None:
        members = [
            (tower.spacing * m, S) for m, S in sorted(tower.constants.items())
        ]

    def integrand_approx(u):
        zeta = ph * u
        return ph * exp(-zeta / z) * b(zeta)

    def integrand_poles(u):
        zeta = ph * u
        acc = mpc(0)
        for rho, S in members:
            acc += S / (zeta - rho)
        return ph * exp(-zeta / z) * acc / (-2 * pi * I)

    with working_precision(extra=16):
        pts = [mpf(0)] + [mpf(r) for r in radii]
        if r_cut is None:
            pts.append(pts[-1] * 3 + 10)
            val, err = mp.quad(
                integrand_approx,
                pts + [mpmath.inf],
                maxdegree=quad_maxdegree,
                error=True,
            )
        else:
            val, err = mp.quad(
                integrand_approx, pts + [r_cut], maxdegree=quad_maxdegree, error=True
            )
            tail_pts = [r_cut] + [
                abs(tower.spacing) * abs(m)
                for m in sorted({abs(m) for m in tower.constants})
                if abs(tower.spacing) * abs(m) > r_cut
            ]
            val2, err2 = mp.quad(
                integrand_poles,
                tail_pts + [mpmath.inf],
                maxdegree=quad_maxdegree,
                error=True,
            )
            val += val2
            err += err2
    return val, err, r_cut


def lateral_sum(
    b,
    theta,
    z,
    *,
    tower: StokesTower | None = None,
    tail: TowerTail | None = None,
    method: str = "auto",
    quad_maxdegree: int = 10,
) -> RaySum:
    """Borel-Laplace sum along direction theta, evaluated at z.

    b is the continued Borel transform (rational approximant or callable)
    used by the quadrature path; the closed-form path needs only the tower.
    method: 'quad', 'poles', 'both' (cross-checked), or 'auto'.
    """
    theta = mpf(theta)
    z = mpc(z)
    _require_convergence(theta, z)
    _check_ray_clear(tower, theta)

    if method == "auto":
        method = POLE_CLOSED_FORM if tower is not None else QUADRATURE
    meta = {}
    if method in (QUADRATURE, "quad"):
        if b is None:
            raise LaplaceError("quadrature needs the continued Borel transform")
        val, err, r_cut = _quadrature(b, theta, z, tower, quad_maxdegree)
        meta["r_cut"] = r_cut
        return RaySum(theta, z, +val, QUADRATURE, +mpf(err), meta)
    if method in (POLE_CLOSED_FORM, "poles"):
        if tower is None:
            raise LaplaceError("closed form needs a tower")
        val, tail_bound = _closed_form(tower, theta, z, tail)
        meta["tail_bound"] = tail_bound
        return RaySum(theta, z, +val, POLE_CLOSED_FORM, +tail_bound, meta)
    if method == "both":
        q = lateral_sum(
            b, theta, z, tower=tower, tail=tail, method="quad",
            quad_maxdegree=quad_maxdegree,
        )
        p = lateral_sum(b, theta, z, tower=tower, tail=tail, method="poles")
        delta = abs(q.value - p.value)
        meta = {"cross_check_delta": +delta, "quad_error": q.error_estimate,
                "tail_bound": p.error_estimate}
        return RaySum(theta, z, p.value, "both", +delta, meta)
    raise LaplaceError(f"unknown method {method!r}")


@dataclass(frozen=True)
class Discontinuity:
    value: mpc
    lateral_difference: mpc | None
    delta: mpf | None


def discontinuity(
    t: StokesTower,
    theta,
    z,
    *,
    b=None,
    eps=None,
    tail: TowerTail | None = None,
    cross_check: bool = False,
    quad_maxdegree: int = 10,
) -> Discontinuity:
    """disc_theta = sum over ray members of S_m exp(-zeta_m / z).

    With cross_check=True the same quantity is recomputed as the lateral
    difference s_{theta+eps} - s_{theta-eps} by quadrature and the
    discrepancy is reported.
    """
    theta = mpf(theta)
    z = mpc(z)
    _require_convergence(theta, z)
    with working_precision(extra=16):
        total = mpc(0)
        for m, S in sorted(t.constants.items()):
            rho = t.spacing * m
            if abs(_wrap(mpmath.arg(rho) - theta)) < ANGULAR_GUARD:
                total += S * exp(-rho / z)
        if not cross_check:
            return Discontinuity(+total, None, None)
        e = eps if eps is not None else default_eps(t, theta)
        sp = lateral_sum(
            b, theta + e, z, tower=t, tail=tail,
            method="quad" if b is not None else "poles",
            quad_maxdegree=quad_maxdegree,
        )
        sm = lateral_sum(
            b, theta - e, z, tower=t, tail=tail,
            method="quad" if b is not None else "poles",
            quad_maxdegree=quad_maxdegree,
        )
        diff = sp.value - sm.value
        return Discontinuity(+total, +diff, +abs(diff - total))


def default_eps(t: StokesTower | None, theta) -> mpf:
    """Lateral offset: half the gap to the nearest other ray, capped."""
    cap = mpf("0.01") * pi
    if t is None:
        return cap
    gaps = [
        abs(_wrap(theta - ang))
        for ang in t.ray_angles()
        if abs(_wrap(theta - ang)) > ANGULAR_GUARD
    ]
    if not gaps:
        return cap
    return min(cap, min(gaps) / 2)


@dataclass(frozen=True)
class MedianSum:
    value: mpc
    laterals: tuple
    eps: mpf
    branch_residuals: tuple
    error_estimate: mpf


def median_sum(
    b,
    t: StokesTower,
    theta,
    z,
    *,
    eps=None,
    tail: TowerTail | None = None,
    method: str = "auto",
    verify_branches: bool = True,
    quad_maxdegree: int = 10,
) -> MedianSum:
    """Average of the two lateral sums at theta +- eps.

    When verify_branches is set, the one-sided rewritings
    s_{theta-} + disc/2 and s_{theta+} - disc/2 are evaluated with the
    discontinuity computed independently as the exponential Stokes sum,
    and their residuals against the average are reported.
    """
    theta = mpf(theta)
    z = mpc(z)
    e = eps if eps is not None else default_eps(t, theta)
    sp = lateral_sum(
        b, theta + e, z, tower=t, tail=tail, method=method,
        quad_maxdegree=quad_maxdegree,
    )
    sm = lateral_sum(
        b, theta - e, z, tower=t, tail=tail, method=method,
        quad_maxdegree=quad_maxdegree,
    )
    with working_precision(extra=16):
        med = (sp.value + sm.value) / 2
        residuals = ()
        if verify_branches:
            disc = discontinuity(t, theta, z).value
            res = []
            if mpmath.re(exp(-I * (theta - e)) * z) > 0:
                res.append(abs(sm.value + disc / 2 - med))
            if mpmath.re(exp(-I * (theta + e)) * z) > 0:
                res.append(abs(sp.value - disc / 2 - med))
            residuals = tuple(+r for r in res)
        err = sp.error_estimate + sm.error_estimate
        return MedianSum(+med, (sp, sm), +mpf(e), residuals, +err)
