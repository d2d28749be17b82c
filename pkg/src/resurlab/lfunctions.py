"""Dirichlet series of Stokes constants, completions, and continuations.

A tower's constants define four Dirichlet series (the two one-sided
series, their sum, and their signed sum).  Multiplying by a gamma-factor
descriptor completes them so that a reflection functional equation
Lambda(kappa - s) = sign * Lambda(s) can hold (or, for dual pairs, a
duality Lambda_self(s) = Lambda_partner(-s)).  Values at negative
integers, defined through the functional equation, reproduce the
perturbative coefficients via c_n = L(-n) (2 pi i)^n / n!.

Evaluation strategies, in order of preference: an exemplar-supplied
analytic continuation hook, exact finite-support sums, Euler-Maclaurin
tail acceleration for eventually constant or periodic coefficients, and
plain partial sums with a growth-bound error estimate.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf, mpc, pi, exp, gamma, factorial

from .precision import working_precision, eps as unit_eps
from .series import FormalSeries, PrefixTerm, StokesTower
from fractions import Fraction

I = mpc(0, 1)

LPLUS, LMINUS, L0, L1 = "Lplus", "Lminus", "L0", "L1"


class LFunctionError(ValueError):
    pass


def _to_mp(x):
    """mpf/mpc conversion that also accepts Fractions."""
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return x


def tanh_sinh_nodes(a, b, level: int = 8):
    """Fixed tanh-sinh rule on [a, b]: list of (x, w), sum(w*f(x)) ~ integral.

    Step h = 2^-level in the double-exponential variable; the node range is
    clipped where the weights drop below working precision.
    """
    with working_precision(extra=16):
        a, b = mpf(a), mpf(b)
        half = (b - a) / 2
        mid = (b + a) / 2
        h = mpf(2) ** (-level)
        nodes = []
        tiny = mpf(2) ** (-mp.prec - 16)
        k = 0
        while True:
            t = k * h
            sh = mpmath.sinh(t)
            ch = mpmath.cosh(t)
            u = mpmath.tanh(pi / 2 * sh)
            w = (pi / 2) * ch / mpmath.cosh(pi / 2 * sh) ** 2 * h * half
            if abs(w) < tiny or 1 - abs(u) < tiny:
                break
            nodes.append((mid + half * u, w))
            if k > 0:
                nodes.append((mid - half * u, w))
            k += 1
        return nodes


class PolarPoint(LFunctionError):
    """Evaluation requested at a pole; carries location and Laurent data."""

    def __init__(self, location, laurent=None):
        self.location = location
        self.laurent = laurent
        super().__init__(f"polar point at s = {location}")


class UndefinedValue(LFunctionError):
    """L(-n) not determined by the functional equation; no guessing."""


# ---------------------------------------------------------------------------
# gamma factors


@dataclass(frozen=True)
class GammaFactor:
    """gamma(s) = const * base^s * pi^(pi_power*s) * prod Gamma(scale_i s + shift_i)."""

    terms: tuple
    pi_power: int = 0
    base: mpc = mpc(1)
    const: mpc = mpc(1)

    def _prefactor(self, s):
        out = mpc(_to_mp(self.const))
        if self.pi_power:
            out *= pi ** (_to_mp(self.pi_power) * s)
        base = mpc(_to_mp(self.base))
        if base != 1:
            out *= base ** s
        return out

    def pole_order(self, s) -> int:
        order = 0
        for scale, shift in self.terms:
            x = mpc(_to_mp(scale)) * s + mpc(_to_mp(shift))
            if abs(x.imag) < mpf(2) ** (-mp.prec + 16):
                xr = x.real
                n = mpmath.nint(xr)
                if n <= 0 and abs(xr - n) < mpf(2) ** (-mp.prec + 16):
                    order += 1
        return order

    def value(self, s) -> mpc:
        s = mpc(s)
        if self.pole_order(s):
            raise PolarPoint(s)
        out = self._prefactor(s)
        for scale, shift in self.terms:
            out *= gamma(mpc(_to_mp(scale)) * s + mpc(_to_mp(shift)))
        return out

    def regularized(self, s) -> tuple:
        """(pole_order, leading coefficient of (s-s0)^order * gamma(s))."""
        s = mpc(s)
        order = 0
        lead = self._prefactor(s)
        for scale, shift in self.terms:
            sc = mpc(_to_mp(scale))
            x = sc * s + mpc(_to_mp(shift))
            n = mpmath.nint(x.real)
            if (
                abs(x.imag) < mpf(2) ** (-mp.prec + 16)
                and n <= 0
                and abs(x.real - n) < mpf(2) ** (-mp.prec + 16)
            ):
                k = int(-n)
                order += 1
                # (s - s0) Gamma(scale*s + shift) -> (-1)^k / (k! * scale)
                lead *= (-1) ** k / (factorial(k) * sc)
            else:
                lead *= gamma(x)
        return order, lead


def mellin_gamma() -> GammaFactor:
    """(2 pi)^-s Gamma(s): the completion matching the q-series Mellin pair."""
    return GammaFactor(terms=((1, 0),), pi_power=-1, base=mpf(1) / 2)


def maass_gamma() -> GammaFactor:
    """Gamma(s/2)^2 / (4 pi^s)."""
    return GammaFactor(terms=((Fraction(1, 2), 0), (Fraction(1, 2), 0)),
                       pi_power=-1, const=mpf(1) / 4)


@dataclass(frozen=True)
class FunctionalEquation:
    """Reflection data: Lambda(kappa - s) = sign * Lambda(s) for self-dual
    completions, or Lambda_self(s) = sign * Lambda_partner(kappa - s) for
    dual pairs."""

    kappa: mpf
    sign: int
    epsilon: int = 0
    dual: bool = False


# ---------------------------------------------------------------------------
# Dirichlet series


def zeta_tail(s, M: int, terms: int = 28) -> mpc:
    """sum_{m>M} m^-s by Euler-Maclaurin; M should exceed ~|s| + terms."""
    with working_precision(extra=32):
        s = mpc(s)
        M = mpf(M)
        total = M ** (1 - s) / (s - 1) - M ** (-s) / 2
        poch = mpc(s)
        Mp = M ** (-s - 1)
        for j in range(1, terms + 1):
            total += mpmath.bernoulli(2 * j) / factorial(2 * j) * poch * Mp
            poch *= (s + 2 * j - 1) * (s + 2 * j)
            Mp /= M * M
        return total


@dataclass
class DirichletL:
    """One Dirichlet series sum_{m>=1} coeff(m) / m^s.

    variant records which of the four tower combinations this is.
    analytic_hook, when present, evaluates the continued function anywhere
    and takes priority.  tail describes the coefficients beyond max_index:
    None (finite support), ("constant", c), or ("periodic", (v_1..v_P)).
    """

    coeff: object
    abscissa: mpf
    variant: str = LPLUS
    max_index: int = 0
    tail: tuple | None = None
    analytic_hook: object = None
    growth_sigma: mpf | None = None

    def evaluate(self, s, margin: float = 0.5) -> mpc:
        s = mpc(s)
        with working_precision(extra=32):
            if self.analytic_hook is not None:
                return mpc(self.analytic_hook(s))
            if self.tail is None:
                return self._finite_sum(s)
            if s.real <= self.abscissa + margin:
                raise LFunctionError(
                    f"s = {s} is inside/near the critical strip and no "
                    "continuation data is attached"
                )
            return self._accelerated(s)

    __call__ = evaluate

    def _finite_sum(self, s) -> mpc:
        total = mpc(0)
        for m in range(1, self.max_index + 1):
            a = mpc(self.coeff(m))
            if a != 0:
                total += a * mpf(m) ** (-s)
        return total

    def _accelerated(self, s) -> mpc:
        kind = self.tail[0]
        M0 = self.max_index
        head = mpc(0)
        for m in range(1, M0 + 1):
            a = mpc(self.coeff(m))
            if a != 0:
                head += a * mpf(m) ** (-s)
        if kind == "constant":
            c = mpc(self.tail[1])
            M = max(M0, int(abs(s)) + mp.prec // 2)
            mid = sum(c * mpf(m) ** (-s) for m in range(M0 + 1, M + 1))
            return head + mid + c * zeta_tail(s, M)
        if kind == "periodic":
            values = self.tail[1]
            P = len(values)
            out = mpc(head)
            for a0, v in enumerate(values, start=1):
                v = mpc(v)
                if v == 0:
                    continue
                # sum over m = a0 mod P with m > M0 via Hurwitz zeta
                full = mpf(P) ** (-s) * mpmath.zeta(s, mpf(a0) / P)
                drop = sum(
                    mpf(m) ** (-s)
                    for m in range(a0, M0 + 1, P)
                )
                out += v * (full - drop)
            return out
        raise LFunctionError(f"unknown tail kind {kind!r}")


def series_from_tower(tower: StokesTower, variant: str = LPLUS, **kw) -> DirichletL:
    """Finite-support Dirichlet series of a tower's constants."""

    def pick(m):
        a_pos = tower.constant(m)
        a_neg = tower.constant(-m)
        if variant == LPLUS:
            return a_pos
        if variant == LMINUS:
            return -a_neg
        if variant == L0:
            return a_pos + a_neg
        if variant == L1:
            return a_pos - a_neg
        raise LFunctionError(f"unknown variant {variant!r}")

    return DirichletL(
        coeff=pick,
        abscissa=mpf(kw.pop("abscissa", 0)),
        variant=variant,
        max_index=tower.max_index(),
        tail=None,
        **kw,
    )


# ---------------------------------------------------------------------------
# completed L-functions


@dataclass
class CompletedL:
    """Completion Lambda(s) = gamma(s + epsilon) * L(s) with reflection data.

    pole_list: tuple of (location, laurent) for poles of L itself, where
    laurent maps negative orders to coefficients, e.g. {-2: b2, -1: b1}.
    independent_lambda: optional continuation of Lambda that does not use
    the functional equation (used to check it rather than assume it).
    partner: the dual CompletedL for non-self-dual functional equations.
    """

    base: DirichletL
    gamma_factor: GammaFactor
    fe: FunctionalEquation
    pole_list: tuple = ()
    independent_lambda: object = None
    partner: object = None

    def _pole_at(self, s):
        for loc, laurent in self.pole_list:
            if abs(mpc(s) - mpc(loc)) < mpf(2) ** (-mp.prec // 2):
                return loc, laurent
        return None

    def lambda_value(self, s) -> mpc:
        s = mpc(s)
        with working_precision(extra=32):
            if self.independent_lambda is not None:
                return mpc(self.independent_lambda(s))
            return self.gamma_factor.value(s + self.fe.epsilon) * self.base.evaluate(s)

    def continue_via_functional_equation(self, s) -> mpc:
        """L(s) through the reflection, with the gamma-pole zero convention.

        Values that vanish because the denominator gamma factor diverges
        are returned as exact zeros; requests at a listed pole of L raise
        PolarPoint with the Laurent data.
        """
        s = mpc(s)
        with working_precision(extra=32):
            hit = self._pole_at(s)
            if hit is not None:
                raise PolarPoint(hit[0], hit[1])
            other = self.partner if self.fe.dual else self
            sref = mpc(self.fe.kappa) - s
            num_order, num_lead = other.gamma_factor.regularized(
                sref + other.fe.epsilon
            )
            den_order, den_lead = self.gamma_factor.regularized(s + self.fe.epsilon)
            if den_order > num_order:
                return mpc(0)
            if num_order > den_order:
                raise PolarPoint(s)
            ratio = num_lead / den_lead
            lref = other.base.evaluate(sref)
            return self.fe.sign * ratio * lref


def asymptotic_from_L(c: CompletedL, N: int) -> FormalSeries:
    """Series with c_n = L(-n) (2 pi i)^n / n!, L(-n) via the reflection.

    Indices where the reflection leaves L(-n) undefined are recorded in
    metadata['undefined_indices'] with coefficient zero; polar indices
    raise PolarPoint (they belong in prefix data, not in the series).
    """
    coeffs = []
    undefined = []
    with working_precision(extra=32):
        for n in range(N + 1):
            try:
                ln = c.continue_via_functional_equation(mpc(-n))
            except UndefinedValue:
                undefined.append(n)
                ln = mpc(0)
            coeffs.append(ln * (2 * pi * I) ** n / factorial(n))
    return FormalSeries(
        tuple(coeffs),
        metadata={"undefined_indices": tuple(undefined), "source": "lfunction"},
    )


@dataclass(frozen=True)
class ResidualReport:
    max_residual: mpf
    per_point: tuple


def check_functional_equation(c: CompletedL, samples) -> ResidualReport:
    """max_s |Lambda(kappa - s) - sign * Lambda(s)| over the samples.

    Both sides are evaluated through continuation paths that do not use
    the reflection being tested (analytic hooks or theta-split integrals),
    so the residual is a genuine check.  Samples must keep a guard
    distance from the listed poles.
    """
    rows = []
    with working_precision(extra=16):
        for s in samples:
            s = mpc(s)
            for loc, _ in c.pole_list:
                if abs(s - mpc(loc)) < mpf("1e-3") or abs(
                    mpc(c.fe.kappa) - s - mpc(loc)
                ) < mpf("1e-3"):
                    raise LFunctionError(f"sample {s} too close to pole {loc}")
            lhs = c.lambda_value(mpc(c.fe.kappa) - s)
            rhs = c.fe.sign * c.lambda_value(s)
            rows.append((s, abs(lhs - rhs)))
        return ResidualReport(max(r for _, r in rows), tuple(rows))


# ---------------------------------------------------------------------------
# theta-split completion: a functional-equation-free continuation


class ThetaSplitLambda:
    """Lambda(s) = integral_0^oo f(it) t^{s-1} dt for f(y) = sum A_m q^{lam_m}.

    Split at t = 1: the upper part is the rapidly convergent incomplete
    gamma sum; the lower part is numerically integrated against cached
    values of f on fixed quadrature nodes, so repeated evaluations at
    different s cost one dot product.  Defined for q-series that decay at
    both ends of the positive imaginary axis (cuspidal data).
    """

    def __init__(self, coeff, frequencies, f_eval, head_terms=80,
                 t_floor="0.004", quad_level=8):
        self.coeff = coeff
        self.frequencies = frequencies
        self.f_eval = f_eval
        self.head_terms = head_terms
        self.t_floor = mpf(t_floor)
        self.quad_level = quad_level
        self._nodes = None

    def _build_nodes(self):
        with working_precision(extra=16):
            pieces = []
            breaks = [self.t_floor, mpf("0.08"), mpf("0.3"), mpf(1)]
            for a, b in zip(breaks, breaks[1:]):
                for x, w in tanh_sinh_nodes(a, b, level=self.quad_level):
                    pieces.append((x, w, self.f_eval(I * x)))
            self._nodes = pieces

    def __call__(self, s) -> mpc:
        s = mpc(s)
        with working_precision(extra=16):
            if self._nodes is None:
                self._build_nodes()
            head = mpc(0)
            for m in range(1, self.head_terms + 1):
                a = mpc(self.coeff(m))
                if a == 0:
                    continue
                lam = 2 * pi * mpf(self.frequencies(m))
                head += a * lam ** (-s) * mpmath.gammainc(s, lam)
            low = mpc(0)
            for x, w, fval in self._nodes:
                low += w * fval * x ** (s - 1)
            return head + low


# ---------------------------------------------------------------------------
# Mellin transform consistency


def prefix_mellin_lower(prefix, s) -> mpc:
    """Closed form of integral_0^1 t^{s-1} * prefix(it) dt.

    Prefix terms are mult * y^p * log(scale*y)^q with p in {0,-1}, q in
    {0,1}; at y = it the integral is elementary.
    """
    s = mpc(s)
    total = mpc(0)
    with working_precision(extra=16):
        for term in prefix:
            p = term.power
            mult = mpc(term.multiplier) * I ** p
            a = s + p
            if a == 0 or (term.log_power == 0 and a == 0):
                raise LFunctionError("prefix Mellin moment diverges at this s")
            if term.log_power == 0:
                total += mult / a
            else:
                lg = mpmath.log(mpc(term.log_scale) * I)
                total += mult * (lg / a - 1 / a ** 2)
        return total


def mellin_forward_quadrature(
    f_eval, s, *, prefix=(), t_floor=0, maxdegree=8
) -> mpc:
    """integral_0^oo t^{s-1} f(it) dt by double-exponential quadrature.

    When ``prefix`` terms are given, f - prefix is integrated numerically
    on (t_floor, 1] and the prefix part is added in closed form; this is
    how the polar, non-decaying part of a generating function is handled
    at the origin.  A positive t_floor truncates below evaluability of f
    (q-series floors); the caller is responsible for the smallness of the
    omitted mass.
    """
    s = mpc(s)
    from .series import eval_prefix  # local import to avoid cycle at load

    with working_precision(extra=16):
        if prefix:
            low = mp.quad(
                lambda t: (f_eval(I * t) - eval_prefix(prefix, I * t))
                * t ** (s - 1),
                [mpf(t_floor), mpf("0.1"), mpf(1)],
                maxdegree=maxdegree,
            )
            low += prefix_mellin_lower(prefix, s)
            high = mp.quad(
                lambda t: f_eval(I * t) * t ** (s - 1),
                [mpf(1), mpf(6), mpmath.inf],
                maxdegree=maxdegree,
            )
            return low + high
        val = mp.quad(
            lambda t: f_eval(I * t) * t ** (s - 1),
            [mpf(t_floor), mpf("0.1"), mpf(1), mpf(6), mpmath.inf],
            maxdegree=maxdegree,
        )
        return val


def mellin_lside(l: DirichletL, s, frequency_scale=1) -> mpc:
    """(2 pi * frequency_scale)^-s Gamma(s) L(s): the Mellin image of the
    generating q-series with frequencies frequency_scale * m."""
    s = mpc(s)
    with working_precision(extra=16):
        return (2 * pi * mpf(frequency_scale)) ** (-s) * gamma(s) * l.evaluate(s)


def mellin_forward_split(
    f_eval, s, series: FormalSeries, *, delta="0.05", maxdegree=8
) -> tuple:
    """integral_0^oo t^{s-1} f(it) dt with an asymptotic lower part.

    On (0, delta) the integrand is replaced by the asymptotic expansion of
    f at the origin (prefix terms in closed form plus the optimally
    truncated power part), which is how evaluators that cannot reach
    arbitrarily small Im(y) still produce full-precision moments.  Returns
    (value, remainder_bound) where the bound covers the truncated Gevrey
    tail of the lower part.
    """
    s = mpc(s)
    delta = mpf(delta)
    with working_precision(extra=16):
        upper = mp.quad(
            lambda t: f_eval(I * t) * t ** (s - 1),
            [delta, mpf(1), mpf(6), mpmath.inf],
            maxdegree=maxdegree,
        )
        # prefix part on (0, delta): rescale the unit-interval closed form
        # integral_0^delta t^{s-1} P(it) dt at y = it
        low = mpc(0)
        for term in series.prefix:
            p = term.power
            mult = mpc(term.multiplier) * I ** p
            a = s + p
            if term.log_power == 0:
                low += mult * delta ** a / a
            else:
                lg = mpmath.log(mpc(term.log_scale) * I)
                # int_0^d t^{a-1}(lg + log t)dt = d^a (lg/a + (log d)/a - 1/a^2)
                low += mult * delta ** a * (
                    lg / a + mpmath.log(delta) / a - 1 / a ** 2
                )
        # power part, truncated where the terms stop decreasing
        best = mpf("inf")
        bound = mpf(0)
        for n, c in enumerate(series.coeffs):
            term = c * I ** n * delta ** (s + n) / (s + n)
            mag = abs(term)
            if mag > best and n > 4:
                bound = mag
                break
            best = min(best, mag)
            low += term
        else:
            bound = best
        return upper + low, +bound


def mellin_consistency(f_eval, l: DirichletL, s, *, frequency_scale=1,
                       series: FormalSeries | None = None, delta="0.05",
                       prefix=(), t_floor=0, maxdegree=8) -> mpf:
    """|forward quadrature - gamma-weighted L value| at s."""
    with working_precision(extra=16):
        if series is not None:
            quad_side, _ = mellin_forward_split(
                f_eval, s, series, delta=delta, maxdegree=maxdegree
            )
        else:
            quad_side = mellin_forward_quadrature(
                f_eval, s, prefix=prefix, t_floor=t_floor, maxdegree=maxdegree
            )
        lside = mellin_lside(l, s, frequency_scale)
        return abs(quad_side - lside)


def inverse_mellin_line(lfun_on_line, t, C, *, digits=None, maxdegree=8,
                        frequency_scale=1) -> mpc:
    """f(it) = (1/2 pi i) int_{C-ioo}^{C+ioo} (2 pi t)^-s Gamma(s) L(s) ds.

    lfun_on_line(s) must be valid on the vertical line Re s = C, which has
    to lie right of the convergence abscissa (no poles are crossed).  The
    gamma decay exp(-pi |Im s| / 2) certifies the truncation height.
    Passing ``digits`` trades precision for speed: the truncation height,
    the quadrature depth, and the evaluation precision all follow it.
    """
    t = mpf(t)
    if t == 0:
        raise LFunctionError("inverse Mellin transform needs t != 0")
    C = mpf(C)
    target_digits = digits or int(mp.prec * 0.302) + 6
    work_bits = min(
        max(mp.prec, 96), int(target_digits * 3.33) + 64
    ) if digits else mp.prec + 16
    with working_precision(bits=work_bits):
        # solve pi T / 2 ~ digits*ln10 + (C-1/2) ln T + margin
        T = mpf(2)
        for _ in range(40):
            T = (
                2
                / pi
                * (
                    mpf(target_digits) * mpmath.ln(10)
                    + (C - mpf("0.5")) * mpmath.ln(2 + T)
                    + 6
                )
            )
        scale = 2 * pi * abs(t) * mpf(frequency_scale)
        cache = {}

        def integrand(tau):
            key = mpf(tau)
            hit = cache.get(key)
            if hit is None:
                s = C + I * tau
                hit = scale ** (-s) * gamma(s) * mpc(lfun_on_line(s))
                cache[key] = hit
            return hit

        val = mp.quad(integrand, [-T, -T / 4, 0, T / 4, T], maxdegree=maxdegree)
        return val / (2 * pi)


# ---------------------------------------------------------------------------
# Mellin-pole prefixes


def prefix_from_mellin_poles(poles) -> tuple:
    """Prefix terms of f(y) from poles of G(s) = Gamma(s) L(s) in Re s >= 0.

    Each entry of ``poles`` is (s0, laurent) with laurent = {-1: b1} or
    {-2: b2, -1: b1}; the contribution of an order-r pole at s0 to f(y) is
        sum_{j=1..r} b_{-j} (-log(-2 pi i y))^{j-1} / (j-1)! * (-2 pi i y)^{-s0},
    which is representable as prefix terms for s0 in {0, 1}.
    """
    terms = []
    with working_precision(extra=16):
        for s0, laurent in poles:
            s0i = int(mpmath.nint(mpc(s0).real))
            if abs(mpc(s0) - s0i) > mpf(2) ** (-mp.prec // 2) or s0i not in (0, 1):
                raise LFunctionError(
                    f"prefix synthesis supports poles at 0 and 1 only, got {s0}"
                )
            b1 = mpc(laurent.get(-1, 0))
            b2 = mpc(laurent.get(-2, 0))
            scale = -2 * pi * I
            if s0i == 0:
                if b1 != 0:
                    terms.append(PrefixTerm(multiplier=+b1))
                if b2 != 0:
                    terms.append(
                        PrefixTerm(multiplier=-b2, log_power=1, log_scale=scale)
                    )
            else:  # s0 == 1: factor (-2 pi i y)^-1
                inv = 1 / scale
                if b1 != 0:
                    terms.append(PrefixTerm(multiplier=+b1 * inv, power=-1))
                if b2 != 0:
                    terms.append(
                        PrefixTerm(
                            multiplier=-b2 * inv,
                            power=-1,
                            log_power=1,
                            log_scale=scale,
                        )
                    )
    return tuple(terms)
