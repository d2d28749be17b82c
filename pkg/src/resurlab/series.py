"""Truncated formal power series and Stokes-tower data.

A ``FormalSeries`` stores the coefficients of a (generally divergent)
series sum_n c_n y^(n - alpha) at working precision, together with an
optional prefix of non-power terms (constants, 1/y, and logarithms) that
sit outside the power expansion.  A ``StokesTower`` records an equally
spaced family of Borel-plane singularities zeta_m = E*m with one complex
constant per index.

Operations:

* ``borel_transform``      -- coefficient-wise division by gamma factors,
* ``gevrey1_fit``          -- growth diagnostics / radius estimation,
* ``coefficients_from_stokes`` -- exact large-order coefficients of the
  series whose Borel transform has simple poles E*m with residues set by
  the tower constants.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath
from mpmath import mp, mpf, mpc, pi, gamma

from .precision import working_precision

I = mpc(0, 1)

SIMPLE_POLE = "simple_pole"
LOG_BRANCH = "log_branch"


class SeriesError(ValueError):
    """Invalid series construction or operation."""


def _finite(z: mpc) -> bool:
    return mpmath.isfinite(z.real) and mpmath.isfinite(z.imag)


@dataclass(frozen=True)
class PrefixTerm:
    """One non-power term: multiplier * y^power * log(log_scale*y)^log_power.

    power is 0 or -1; log_power 0 or 1.  These cover every prefix shape
    used by the bundled exemplars (constants, residues of order-one Mellin
    poles, and the logarithmic pieces of order-two poles).
    """

    multiplier: mpc
    power: int = 0
    log_power: int = 0
    log_scale: mpc = mpc(1)

    def __post_init__(self):
        if self.power not in (0, -1):
            raise SeriesError("prefix power must be 0 or -1")
        if self.log_power not in (0, 1):
            raise SeriesError("prefix log power must be 0 or 1")

    def eval(self, y) -> mpc:
        y = mpc(y)
        val = mpc(self.multiplier)
        if self.power == -1:
            val = val / y
        if self.log_power:
            val = val * mpmath.log(mpc(self.log_scale) * y)
        return val


def eval_prefix(terms: Sequence[PrefixTerm], y) -> mpc:
    return sum((t.eval(y) for t in terms), mpc(0))


@dataclass(frozen=True)
class FormalSeries:
    """Truncated series sum_{n>=0} coeffs[n] * y^(n - lead_exponent).

    lead_exponent is rational; 0 for a plain power series.  The prefix
    holds terms that are not pure powers y^n with integer n >= 0.
    """

    coeffs: tuple
    lead_exponent: Fraction = Fraction(0)
    prefix: tuple = ()
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(mpc(c) for c in self.coeffs))
        object.__setattr__(self, "prefix", tuple(self.prefix))
        for n, c in enumerate(self.coeffs):
            if not _finite(c):
                raise SeriesError(f"coefficient {n} is not finite")
        if not isinstance(self.lead_exponent, Fraction):
            object.__setattr__(self, "lead_exponent", Fraction(self.lead_exponent))

    @property
    def truncation_order(self) -> int:
        return len(self.coeffs)

    def coefficient(self, n: int) -> mpc:
        return self.coeffs[n]

    def scaled(self, scalar) -> "FormalSeries":
        s = mpc(scalar)
        return FormalSeries(
            tuple(c * s for c in self.coeffs), self.lead_exponent, self.prefix
        )

    def plus(self, other: "FormalSeries") -> "FormalSeries":
        if self.lead_exponent != other.lead_exponent:
            raise SeriesError("cannot add series with different lead exponents")
        n = min(len(self.coeffs), len(other.coeffs))
        return FormalSeries(
            tuple(self.coeffs[k] + other.coeffs[k] for k in range(n)),
            self.lead_exponent,
            self.prefix + other.prefix,
        )

    def eval_poly(self, y) -> mpc:
        """Evaluate the truncated power part (Horner), plus prefix terms."""
        y = mpc(y)
        acc = mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * y + c
        if self.lead_exponent != 0:
            acc = acc * y ** (-mpf(self.lead_exponent.numerator) / self.lead_exponent.denominator)
        return acc + eval_prefix(self.prefix, y)


@dataclass(frozen=True)
class StokesTower:
    """Equally spaced singularities zeta_m = spacing*m with constants A_m.

    constants maps nonzero integers to complex numbers (finite support).
    tail_sigma optionally records a polynomial growth bound
    |A_m| <= C * |m|^sigma used for truncation-tail certificates.
    """

    spacing: mpc
    constants: Mapping[int, mpc]
    kind: str = SIMPLE_POLE
    tail_sigma: float | None = None

    def __post_init__(self):
        sp = mpc(self.spacing)
        if sp == 0:
            raise SeriesError("tower spacing must be nonzero")
        object.__setattr__(self, "spacing", sp)
        cleaned = {}
        for m, a in dict(self.constants).items():
            if int(m) == 0:
                raise SeriesError("tower index 0 is not allowed")
            cleaned[int(m)] = mpc(a)
        object.__setattr__(self, "constants", cleaned)
        if self.kind not in (SIMPLE_POLE, LOG_BRANCH):
            raise SeriesError(f"unknown singularity kind {self.kind!r}")

    @property
    def support(self) -> tuple:
        return tuple(sorted(self.constants))

    def location(self, m: int) -> mpc:
        return self.spacing * m

    def constant(self, m: int) -> mpc:
        return self.constants.get(int(m), mpc(0))

    def max_index(self) -> int:
        return max(abs(m) for m in self.constants)

    def parity(self) -> str | None:
        """'even' if A_m = A_-m on the support, 'odd' if A_m = -A_-m."""
        even = odd = True
        for m, a in self.constants.items():
            b = self.constants.get(-m)
            if b is None:
                return None
            if a != b:
                even = False
            if a != -b:
                odd = False
        if even:
            return "even"
        if odd:
            return "odd"
        return None

    def ray_angles(self) -> tuple:
        """Arguments of the rays occupied by the tower singularities."""
        angles = set()
        up = mpmath.arg(self.spacing)
        for m in self.constants:
            angles.add(up if m > 0 else _wrap(up + pi))
        return tuple(sorted(angles))

    def canonical(self) -> "StokesTower":
        """Equivalent tower with arg(spacing) in [0, pi)."""
        if 0 <= mpmath.arg(self.spacing) < pi:
            return self
        return StokesTower(
            -self.spacing,
            {-m: a for m, a in self.constants.items()},
            self.kind,
            self.tail_sigma,
        )


def _wrap(a):
    a = mpmath.fmod(a, 2 * pi)
    if a > pi:
        a -= 2 * pi
    if a <= -pi:
        a += 2 * pi
    return a


def borel_transform(s: FormalSeries) -> FormalSeries:
    """Divide coefficients by gamma factors, turning n! growth into a germ.

    For a plain series (lead exponent 0) the order-zero term has no image
    among power series; it is dropped and recorded under
    metadata['delta_coefficient'].  Positive integer lead exponents are
    rejected: the gamma factor has a pole there.
    """
    alpha = s.lead_exponent
    if alpha != 0 and alpha.denominator == 1 and alpha > 0:
        raise SeriesError(
            f"lead exponent {alpha} hits a gamma pole at index {int(alpha)}"
        )
    with working_precision():
        if alpha == 0:
            delta = s.coeffs[0] if s.coeffs else mpc(0)
            out = tuple(
                s.coeffs[k] / gamma(k) for k in range(1, len(s.coeffs))
            )
            return FormalSeries(
                out,
                Fraction(0),
                (),
                metadata={"delta_coefficient": delta, "borel_plane": True},
            )
        a = mpf(alpha.numerator) / alpha.denominator
        out = tuple(s.coeffs[k] / gamma(k - a) for k in range(len(s.coeffs)))
        return FormalSeries(
            out, alpha + 1, (), metadata={"borel_plane": True}
        )


@dataclass(frozen=True)
class GevreyFit:
    radius_estimate: mpf
    ok: bool
    residual: mpf
    points_used: int


def gevrey1_fit(s: FormalSeries, residual_threshold: float = 0.05) -> GevreyFit:
    """Estimate the exponential scale A in |c_n| ~ A^(-n) n!.

    Fits log|c_n| - log n! against [1, n, log n] over the last half of the
    available coefficients; the log n regressor absorbs the Gamma(n)/n!
    mismatch so the slope estimates -log A without bias.  Near-zero
    coefficients (parity gaps) are excluded.  ok is False when the
    residual exceeds the threshold, e.g. for convergent input.
    """
    n_tot = len(s.coeffs)
    if n_tot < 8:
        raise SeriesError("gevrey1_fit needs at least 8 coefficients")
    with working_precision():
        lo = n_tot // 2
        pts = []
        scale = max(abs(c) for c in s.coeffs[lo:]) or mpf(1)
        for n in range(lo, n_tot):
            c = abs(s.coeffs[n])
            if c > scale * mpf(2) ** (-mp.prec // 2):
                pts.append((n, mpmath.log(c) - mpmath.loggamma(n + 1).real))
        if len(pts) < 4:
            return GevreyFit(mpf("inf"), False, mpf("inf"), len(pts))

        def fit(sub):
            A = mp.matrix(len(sub), 3)
            b = mp.matrix(len(sub), 1)
            for i, (n, v) in enumerate(sub):
                A[i, 0] = 1
                A[i, 1] = n
                A[i, 2] = mpmath.log(n)
                b[i] = v
            x = mp.lu_solve(A.T * A, A.T * b)
            resid = max(
                abs(x[0] + x[1] * n + x[2] * mpmath.log(n) - v) for n, v in sub
            )
            return x[1], resid

        def plain_slope(sub):
            A = mp.matrix(len(sub), 2)
            b = mp.matrix(len(sub), 1)
            for i, (n, v) in enumerate(sub):
                A[i, 0] = 1
                A[i, 1] = n
                b[i] = v
            x = mp.lu_solve(A.T * A, A.T * b)
            return x[1]

        # fit parity classes separately: interference between +m and -m tower
        # members makes log|c_n| oscillate with the parity of n
        classes = [
            [p for p in pts if p[0] % 2 == 0],
            [p for p in pts if p[0] % 2 == 1],
        ]
        slopes, resids, used = [], [], 0
        drift = mpf(0)
        for sub in classes:
            if len(sub) >= 4:
                sl, rs = fit(sub)
                slopes.append((sl, len(sub)))
                resids.append(rs)
                used += len(sub)
                # super-exponential decay shows up as slope drift between
                # window halves; a genuine geometric scale stays put
                half = len(sub) // 2
                if half >= 2:
                    drift = max(
                        drift, abs(plain_slope(sub[half:]) - plain_slope(sub[:half]))
                    )
        if not slopes:
            return GevreyFit(mpf("inf"), False, mpf("inf"), 0)
        slope = sum(sl * w for sl, w in slopes) / sum(w for _, w in slopes)
        resid = max(resids, default=mpf("inf"))
        resid = max(resid, drift)
        ok = bool(resid < residual_threshold and slope < 0 and mpmath.isfinite(slope))
        radius = mpmath.exp(-slope) if mpmath.isfinite(slope) else mpf("inf")
        return GevreyFit(radius, ok, resid, used)


def coefficients_from_stokes(t: StokesTower, N: int) -> FormalSeries:
    """Exact large-order coefficients of the series attached to a tower.

    c_n = Gamma(n)/(2 pi i) * sum_m A_m / (E m)^n for n = 1..N; c_0 = 0.
    Requires the simple-pole kind and a nonempty constants map.
    """
    if t.kind != SIMPLE_POLE:
        raise SeriesError("coefficients_from_stokes requires a simple-pole tower")
    if not t.constants:
        raise SeriesError("empty constants map")
    with working_precision(extra=32):
        E = t.spacing
        coeffs = [mpc(0)]
        # accumulate powers (E m)^-n incrementally per index
        inv = {m: 1 / (E * m) for m in t.constants}
        powers = {m: mpc(1) for m in t.constants}
        for n in range(1, N + 1):
            g = gamma(n)
            tot = mpc(0)
            for m, a in t.constants.items():
                powers[m] *= inv[m]
                tot += a * powers[m]
            coeffs.append(g * tot / (2 * pi * I))
        return FormalSeries(
            tuple(coeffs),
            Fraction(0),
            (),
            metadata={"source": "stokes_tower", "tower_support": t.support},
        )
