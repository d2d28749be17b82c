"""The exponential kernel e1 and regularized sums of it over towers.

e1(z) = (1/2 pi i) * exp(2 pi i z) * Gamma(0, 2 pi i z), analytic on the
cut plane C minus i*R>=0.  It is the building block of every closed-form
lateral Laplace sum for simple-pole towers: a pole at rho contributes
e1(i rho / (2 pi z)) to the sum, up to residue corrections.

Implementation: regularized power series in w = 2 pi i z for moderate |w|
(with guard bits against cancellation) and a Lentz continued fraction for
large |w| away from the cut; near the cut at large |w| the optimally
truncated asymptotic expansion is used, where the branch term exp(w) is
below working precision.  The cut value follows the principal logarithm,
i.e. the boundary value from Im(w) > 0; ``side`` selects the other
boundary value, and helpers expose the principal-value average and the
branch continued from arg z < pi/2 (the one entering median-resummation
targets).
"""
from __future__ import annotations

import mpmath
from mpmath import mp, mpf, mpc, pi, exp, log, euler, factorial

from .precision import working_precision

I = mpc(0, 1)


class KernelError(ValueError):
    """Invalid kernel evaluation (e.g. argument exactly at the origin)."""


def _gamma0_series(w) -> mpc:
    """Gamma(0, w) = -euler - Log w + sum_{k>=1} (-w)^k * (-1)/(k*k!)."""
    # converges everywhere; cancellation costs ~|w|*log2(e) bits
    tot = mpc(0)
    term = mpc(1)
    k = 0
    tiny = mpf(2) ** (-mp.prec - 8)
    while True:
        k += 1
        term *= -w / k
        inc = term / k
        tot -= inc
        if abs(inc) < tiny * (1 + abs(tot)) and k > abs(w):
            break
        if k > 4 * mp.prec + int(8 * abs(w)) + 64:
            raise KernelError("series for Gamma(0,w) failed to converge")
    return -euler - log(w) + tot


def _gamma0_cf_times_exp(w) -> mpc:
    """exp(w)*Gamma(0, w) by modified Lentz continued fraction."""
    tiny = mpf(2) ** (-mp.prec * 2)
    b = w + 1
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, 40 * int(mp.prec / max(1, abs(w)) + 1) + mp.prec):
        an = -(mpf(i) ** 2)
        b += 2
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        delta = c * d
        h *= delta
        if abs(delta - 1) < mpf(2) ** (-mp.prec - 4):
            return h
    raise KernelError("continued fraction for Gamma(0,w) failed to converge")


def _gamma0_asymptotic_times_exp(w) -> mpc:
    """exp(w)*Gamma(0,w) ~ (1/w) sum_k k! (-1/w)^k, optimally truncated.

    Truncation error ~ exp(-|w|); only used when that is below working
    precision, which makes the branch term exp(w) negligible as well.
    """
    tot = mpc(0)
    term = 1 / w
    k = 0
    best = abs(term)
    while True:
        tot += term
        k += 1
        nxt = term * (-k / w)
        if abs(nxt) > best:
            break
        best = abs(nxt)
        term = nxt
        if k > 4 * mp.prec:
            break
    return tot


def e1(z, side: int = 0) -> mpc:
    """The kernel (1/2 pi i) e^{2 pi i z} Gamma(0, 2 pi i z) on the cut plane.

    side selects the boundary value when z lies exactly on the cut
    i*R>=0: side >= 0 gives the principal-log value (the limit from
    arg z < pi/2, identical to the continuation used by lateral sums
    approaching the Stokes ray from above); side < 0 gives the other
    boundary value, which differs by exp(2 pi i z).
    """
    z = mpc(z)
    if z == 0:
        raise KernelError("e1 is singular at z = 0")
    with working_precision(extra=32):
        w = 2 * pi * I * z
        aw = abs(w)
        on_cut = z.real == 0 and z.imag > 0
        near_cut = abs(mpmath.arg(w)) > 3 * pi / 4 if aw > 0 else False
        # cancellation in exp(w) * series(w) costs |w| bits, plus Re(w)
        # more when the product is exponentially small
        bump = int(float(aw + max(mpf(0), w.real)) * 1.45) + 24
        if aw <= 32 or (near_cut and aw <= mpf("0.72") * mp.prec):
            with working_precision(extra=32 + bump):
                val = exp(w) * _gamma0_series(w) / (2 * pi * I)
            val = +val
        elif not near_cut:
            val = _gamma0_cf_times_exp(w) / (2 * pi * I)
        else:
            val = _gamma0_asymptotic_times_exp(w) / (2 * pi * I)
        if on_cut and side < 0:
            val += exp(w)
        return +val


def e1_principal_value(z) -> mpc:
    """Average of the two boundary values; equals e1 off the cut."""
    z = mpc(z)
    if z.real == 0 and z.imag > 0:
        with working_precision(extra=16):
            return e1(z, side=+1) + exp(2 * pi * I * z) / 2
    return e1(z)


def e1_continued_upper(z) -> mpc:
    """e1 analytically continued across the cut from arg z < pi/2.

    Equals e1 for arg z in (-pi, pi/2]; for arg z in (pi/2, pi] it is
    e1(z) - exp(2 pi i z).  This is the branch for which median
    resummation of a tower on the positive imaginary axis reproduces the
    generating function on the whole upper half-plane.
    """
    z = mpc(z)
    with working_precision(extra=16):
        val = e1(z)
        if mpmath.arg(z) > pi / 2:
            val -= exp(2 * pi * I * z)
        return +val


def e1_asymptotic_coefficient(k: int, u) -> mpc:
    """Coefficient a_k(u) in e1(m u) ~ sum_k a_k(u) / m^{k+1} as m -> oo."""
    u = mpc(u)
    return ((-1) ** k) * factorial(k) / ((2 * pi * I * u) ** (k + 1) * (2 * pi * I))


def e1_sum_regularized(
    coefficients,
    directions,
    M: int,
    lvalues=None,
    K: int = 0,
    side: int = 0,
) -> mpc:
    """sum_{m=1}^{oo} A_m * sum_j w_j e1(m u_j), truncated with an L-value tail.

    coefficients: callable m -> A_m for m >= 1.
    directions: sequence of (u_j, w_j); the combined kernel is
        sum_j w_j e1(m u_j).
    The head m <= M is summed directly.  When K > 0 the tail is replaced
    order by order using the asymptotic expansion of e1, which converts
    sum_{m>M} A_m / m^{k+1} into L(k+1) minus the head partial sum; the
    L(k+1) values must be supplied by ``lvalues`` (analytic continuations
    where the raw sum diverges).  Orders whose combined kernel coefficient
    vanishes are skipped, which is what makes symmetric (+u, -u) pairs of
    a two-sided tower summable even when L(1) is polar.
    """
    with working_precision(extra=32):
        dirs = [(mpc(u), mpc(w)) for u, w in directions]
        total = mpc(0)
        # partials[k] = sum_{m<=M} A_m / m^k
        partials = [mpc(0) for _ in range(K + 2)]
        for m in range(1, M + 1):
            a = mpc(coefficients(m))
            if a != 0:
                for u, wgt in dirs:
                    total += a * wgt * e1(m * u, side=side)
            if K:
                im = mpf(1) / m
                p = mpc(a)
                for k in range(1, K + 2):
                    p *= im
                    partials[k] += p
        if K:
            if lvalues is None:
                raise KernelError("tail regularization requires lvalues")
            zero_tol = mpf(2) ** (-mp.prec + 8)
            scale = max(abs(w) for _, w in dirs)
            for k in range(0, K + 1):
                combo = sum(wgt * e1_asymptotic_coefficient(k, u) for u, wgt in dirs)
                if abs(combo) <= zero_tol * scale * abs(
                    e1_asymptotic_coefficient(k, dirs[0][0])
                ):
                    continue
                total += combo * (mpc(lvalues(k + 1)) - partials[k + 1])
        return +total
