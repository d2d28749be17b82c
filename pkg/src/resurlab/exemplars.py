"""Bundled data providers wiring concrete sequences into the engine.

Each exemplar packages: a coefficient sequence, its Stokes tower, the
functional-equation descriptor of the associated Dirichlet series, the
generating-function evaluator, the median-reconstruction target, prefix
terms for the polar part of the expansion at the origin, and analytic
continuations used by truncation-tail regularization.

Registry names: ``delta`` (weight-12 cusp-form construction),
``eichler_delta`` (its weight -10 companion integral), ``kz``
(Kontsevich-Zagier finite sums and their radial expansion), ``divisor_d``
(even divisor-count data with a polar completion), plus ``file:<path>``
ingestion of external Stokes data.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc, pi, exp, gamma, zeta

from .precision import working_precision
from .series import FormalSeries, PrefixTerm, StokesTower, SIMPLE_POLE
from .kernels import e1
from .laplace import TowerTail
from .lfunctions import (
    CompletedL,
    DirichletL,
    FunctionalEquation,
    GammaFactor,
    ThetaSplitLambda,
    maass_gamma,
    mellin_gamma,
    prefix_from_mellin_poles,
)
from .qseries import GeneratingQSeries
from . import jsonio

I = mpc(0, 1)


class ExemplarError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer sequences


_division_cache: dict = {}


def divisor_count_table(N: int) -> list:
    """d(1..N) by the sieve; cached, extended on demand."""
    tab = _division_cache.get("d")
    if tab is None or len(tab) <= N:
        size = max(N + 1, 2 * len(tab) if tab else 512)
        tab = [0] * size
        for a in range(1, size):
            for b in range(a, size, a):
                tab[b] += 1
        _division_cache["d"] = tab
    return tab


_tau_cache: dict = {}


def ramanujan_tau_table(N: int) -> list:
    """tau(1..N) from the 24th power of the pentagonal-number series.

    Exact integer arithmetic; extending the table never changes earlier
    entries.
    """
    tab = _tau_cache.get("tau")
    if tab is None or len(tab) <= N:
        size = max(N + 1, 2 * len(tab) if tab else 512)
        pent = [0] * size
        pent[0] = 1
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            g2 = k * (3 * k + 1) // 2
            if g1 >= size and g2 >= size:
                break
            s = -1 if k % 2 else 1
            if g1 < size:
                pent[g1] += s
            if g2 < size:
                pent[g2] += s
            k += 1

        def pmul(a, b):
            out = [0] * size
            for i, ai in enumerate(a):
                if ai:
                    lim = size - i
                    for j, bj in enumerate(b[:lim]):
                        if bj:
                            out[i + j] += ai * bj
            return out

        result = [1] + [0] * (size - 1)
        base = pent
        e = 24
        while e:
            if e & 1:
                result = pmul(result, base)
            e >>= 1
            if e:
                base = pmul(base, base)
        tab = [0] * (size + 1)
        for n in range(1, size + 1):
            if n - 1 < size:
                tab[n] = result[n - 1]
        _tau_cache["tau"] = tab
    return tab


CHI12_VALUES = {1: 1, 5: -1, 7: -1, 11: 1}


def chi12(k: int) -> int:
    """Character modulo 12 with chi(+-1) = 1 and chi(+-5) = -1."""
    return CHI12_VALUES.get(abs(k) % 12, 0)


# ---------------------------------------------------------------------------
# exemplar container


@dataclass
class ExemplarSpec:
    """Everything the pipelines need to run one concrete construction."""

    name: str
    coefficient: object  # m != 0 -> A_m
    parity: str | None
    weight: object | None
    notes: str
    truncation: int = 200
    tower: StokesTower | None = None  # singularities of the series under study
    tower_tail: TowerTail | None = None
    completed: CompletedL | None = None
    generating: GeneratingQSeries | None = None
    prefix: tuple = ()
    target_function: object = None  # median-reconstruction target
    series_coefficients: object = None  # N -> FormalSeries of the Gevrey part
    lvalue_pos: object = None  # j -> sum_{m>0} A_m m^-j, continued
    lvalue_neg: object = None
    frequency_scale: object = 1
    extras: dict = field(default_factory=dict)


_REGISTRY: dict = {}


def register(name):
    def deco(fn):
        _REGISTRY[name] = fn
        return fn

    return deco


def exemplar(name: str, **kw) -> ExemplarSpec:
    """Look up an exemplar by registry name or 'file:<path>'."""
    if name.startswith("file:"):
        return ingest_external(name[5:], **kw)
    if name not in _REGISTRY:
        raise ExemplarError(
            f"unknown exemplar {name!r}; available: {sorted(_REGISTRY)} or file:<path>"
        )
    return _REGISTRY[name](**kw)


def registry_names() -> tuple:
    return tuple(sorted(_REGISTRY))


# ---------------------------------------------------------------------------
# weight-12 cusp form construction


def _delta_q(y, terms=None) -> mpc:
    """Delta(y) = q prod (1-q^n)^24 as a q-series with certified cutoff."""
    with working_precision(extra=16):
        y = mpc(y)
        qa = exp(-2 * pi * y.imag)
        if qa >= 1:
            raise ExemplarError("cusp form evaluated off the upper half-plane")
        # |tau(m)| <= d(m) m^{11/2} <= m^{6.6}; bound the q-tail geometrically
        need = 20
        while mpf(need) ** mpf("6.6") * qa ** need / (1 - qa) > mpf(2) ** (-mp.prec - 8):
            need = int(need * 1.4) + 1
        tab = ramanujan_tau_table(need)
        q = exp(2 * pi * I * y)
        total = mpc(0)
        qm = mpc(1)
        for m in range(1, need + 1):
            qm *= q
            if tab[m]:
                total += tab[m] * qm
        return total


@register("delta")
def delta_cusp_form(M: int = 200) -> ExemplarSpec:
    """Weight-12 cusp form data: A_m = tau(m), tower at 2 pi i m (m > 0)
    with Stokes constants -tau(m), self-dual weight-12 completion, and the
    kernel-built target function reconstructed by median resummation."""
    tab = ramanujan_tau_table(max(M, 600))

    def a(m):
        if m <= 0:
            return mpc(0)
        t = ramanujan_tau_table(m)
        return mpc(t[m])

    tower = StokesTower(
        2 * pi * I,
        {m: mpc(-tab[m]) for m in range(1, M + 1)},
        SIMPLE_POLE,
        tail_sigma=6.6,
    )

    # the t-floor is certified by cusp decay: |D(it)| < 1e-100 below 0.02
    split = ThetaSplitLambda(
        coeff=lambda m: a(m),
        frequencies=lambda m: mpf(m),
        f_eval=_delta_q,
        head_terms=70,
        t_floor="0.02",
        quad_level=7,
    )
    lcache: dict = {}

    def lvalue(j):
        j = mpc(j)
        key = (j.real, j.imag)
        if key not in lcache:
            lcache[key] = split(j) * (2 * pi) ** j / gamma(j)
        return lcache[key]

    base = DirichletL(
        coeff=lambda m: a(m),
        abscissa=mpf("6.6"),
        analytic_hook=lvalue,
    )
    fe = FunctionalEquation(kappa=mpf(12), sign=1, epsilon=0)
    completed = CompletedL(
        base, mellin_gamma(), fe, pole_list=(), independent_lambda=split
    )

    def series_coefficients(N):
        # c_n = -Gamma(n)/(2 pi i) (2 pi i)^-n L(n), L continued by the
        # theta-split representation
        with working_precision(extra=32):
            coeffs = [mpc(0)]
            for n in range(1, N + 1):
                coeffs.append(
                    -gamma(n) / (2 * pi * I) * (2 * pi * I) ** (-n) * lvalue(mpc(n))
                )
            return FormalSeries(tuple(coeffs), metadata={"source": "delta"})

    def target(y):
        # (1/2) g(-1/y) + sum_m tau(m) e1c(-m/y) with the kernel branch
        # continued across the cut from arg z < pi/2 and an L-regularized
        # truncation tail
        with working_precision(extra=32):
            y = mpc(y)
            w = -1 / y
            val = _delta_q(w) / 2
            u = w
            head = mpc(0)
            for m in range(1, M + 1):
                head += tab[m] * e1(m * u)
            # asymptotic tail via continued L-values
            K = 26
            part = [mpc(0)] * (K + 2)
            for m in range(1, M + 1):
                p = mpc(tab[m])
                for j in range(1, K + 2):
                    p /= m
                    part[j] += p
            from .kernels import e1_asymptotic_coefficient

            for k in range(K + 1):
                head += e1_asymptotic_coefficient(k, u) * (
                    lvalue(mpc(k + 1)) - part[k + 1]
                )
            if mpmath.arg(u) > pi / 2:
                head -= _delta_q(u)  # kernel branch continuation
            return val + head

    generating = GeneratingQSeries(
        coeff=lambda m: tower.constant(m), half_plane="upper", tail_sigma=6.6
    )

    spec = ExemplarSpec(
        name="delta",
        coefficient=a,
        parity=None,
        weight=12,
        notes="Fourier data of the discriminant cusp form; half tower",
        truncation=M,
        tower=tower,
        tower_tail=TowerTail(
            lvalue_pos=lambda j: -lvalue(mpc(j)), lvalue_neg=None, order=26
        ),
        completed=completed,
        generating=generating,
        prefix=(),
        target_function=target,
        series_coefficients=series_coefficients,
        lvalue_pos=lambda j: lvalue(mpc(j)),
        extras={"cusp_form": _delta_q, "tau_table": tab},
    )
    return spec


# ---------------------------------------------------------------------------
# companion integral of the cusp form


@register("eichler_delta")
def eichler_delta(M: int = 400) -> ExemplarSpec:
    """Convergent companion series sum tau(m) m^-11 q^m: a weight -10
    holomorphic quantum modular form whose cocycles are polynomials of
    degree at most 10; its expansion at 0 converges (trivial tower)."""
    tab = ramanujan_tau_table(max(M, 600))

    def a(m):
        if m <= 0:
            return mpc(0)
        t = ramanujan_tau_table(m)
        return mpc(t[m]) / mpf(m) ** 11

    def evaluator(y):
        with working_precision(extra=16):
            y = mpc(y)
            q = exp(2 * pi * I * y)
            if abs(q) >= 1:
                raise ExemplarError("companion integral needs Im(y) > 0")
            total = mpc(0)
            qm = mpc(1)
            m = 0
            while True:
                m += 1
                qm *= q
                term = a(m) * qm
                total += term
                if m > 10 and abs(qm) * mpf(m + 1) ** mpf("-4") < mpf(2) ** (
                    -mp.prec - 8
                ):
                    break
            return total

    def quadrature_normalization(y, U=40, maxdegree=8):
        """Direct integral -(2 pi i)^11/10! int_y^{i inf} D(t)(y-t)^10 dt."""
        with working_precision(extra=16):
            y = mpc(y)

            def g(u):
                t = y + I * u
                return _delta_q(t) * (-I * u) ** 10 * I

            val = mp.quad(g, [0, 1, 5, U], maxdegree=maxdegree)
            return -((2 * pi * I) ** 11) / mpmath.factorial(10) * val

    base = DirichletL(
        coeff=lambda m: a(m), abscissa=mpf(0), max_index=0, tail=None,
        analytic_hook=lambda s: _eichler_lhook(tab, s),
    )

    spec = ExemplarSpec(
        name="eichler_delta",
        coefficient=a,
        parity=None,
        weight=-10,
        notes="companion integral of the discriminant; trivial resurgent structure",
        truncation=M,
        tower=None,
        completed=CompletedL(
            base, mellin_gamma(), FunctionalEquation(mpf(12), 1, 0)
        ),
        generating=GeneratingQSeries(coeff=a, half_plane="upper", tail_sigma=0),
        target_function=evaluator,
        extras={
            "evaluator": evaluator,
            "quadrature_normalization": quadrature_normalization,
        },
    )
    return spec


def _eichler_lhook(tab, s):
    # sum tau(m) m^-11-s converges quickly for Re s > -3.5 or so
    with working_precision(extra=16):
        s = mpc(s)
        total = mpc(0)
        for m in range(1, len(tab)):
            total += tab[m] * mpf(m) ** (-s - 11)
        return total


# ---------------------------------------------------------------------------
# finite quantum sums at rationals and their radial companion


@register("kz")
def kontsevich_zagier() -> ExemplarSpec:
    """Finite sums g(p/q) at rationals and the radial companion series
    -1/2 sum_k k chi(k) q^{k^2/24}, whose expansions agree to all orders."""

    def g_at_rational(y) -> mpc:
        """q^{1/24} (1 + sum_n (q;q)_n) at y = p/q, where the products
        vanish once n reaches the order of the root of unity."""
        y = Fraction(y)
        with working_precision(extra=16):
            order = y.denominator
            q = exp(2 * pi * I * mpf(y.numerator) / y.denominator)
            total = mpc(1)
            prod = mpc(1)
            for n in range(1, order):
                prod *= 1 - q ** n
                total += prod
            return exp(2 * pi * I * mpf(y.numerator) / (24 * y.denominator)) * total

    def radial_coefficient(k):
        return mpf(-chi12(k) * k) / 2 if k > 0 else mpf(0)

    def eichler_side(y) -> mpc:
        """-1/2 sum_{k>=1} k chi(k) e^{2 pi i k^2 y / 24}; the quadratic
        exponents keep this summable arbitrarily close to the reals."""
        with working_precision(extra=16):
            y = mpc(y)
            if y.imag <= 0:
                raise ExemplarError("radial companion needs Im(y) > 0")
            total = mpc(0)
            k = 0
            decay = 2 * pi * y.imag / 24
            while True:
                k += 1
                c = chi12(k)
                if c:
                    total += mpf(-c * k) / 2 * exp(2 * pi * I * k * k * y / 24)
                if k * k * decay > mp.prec * mpf("0.70") + 40 + 2 * mpmath.log(k + 1):
                    break
            return total

    def twisted_lvalue(r, n: int) -> mpc:
        """Abel value sum_{k>=1} k^n chi(k) e^{2 pi i k^2 r / 24} via the
        Bernoulli-polynomial formula for periodic coefficients."""
        r = Fraction(r)
        with working_precision(extra=32):
            P = 12
            # period of chi(k) exp(2 pi i k^2 r / 24) in k
            while True:
                ok = (P * P * r) % 24 == 0 and all(
                    (2 * k * P * r) % 24 == 0 for k in range(1, 25)
                )
                if ok:
                    break
                P += 12
            total = mpc(0)
            for a0 in range(1, P + 1):
                c = chi12(a0)
                if not c:
                    continue
                phase = exp(2 * pi * I * mpf(a0 * a0 * r.numerator)
                            / (24 * r.denominator))
                bpoly = mpmath.bernpoly(n + 1, mpf(a0) / P)
                total += c * phase * bpoly
            return -mpf(P) ** n / (n + 1) * total

    def radial_orders(r, count: int) -> tuple:
        """First asymptotic orders of the companion series at rational r:
        coefficient of x^j in E(r + x) expanded at x = 0."""
        r = Fraction(r)
        with working_precision(extra=32):
            out = []
            for j in range(count):
                lval = twisted_lvalue(r, 2 * j + 1)
                out.append(
                    -(mpf(1) / 2)
                    * (pi * I / 12) ** j
                    / mpmath.factorial(j)
                    * lval
                )
            return tuple(out)

    def g_radial(y) -> mpc:
        """Optimally truncated partial sums of q^{1/24}(1 + sum (q;q)_n)
        just inside the unit circle.

        At q = root-of-unity * e^{-2 pi t} the partial products collapse
        whenever the index passes a multiple of the root's order, so the
        terms decay below working precision long before the factorial
        regrowth of the asymptotic tail; the truncation ambiguity is
        exponentially small in 1/t and invisible at any polynomial order.
        """
        with working_precision(extra=32):
            y = mpc(y)
            if y.imag <= 0:
                raise ExemplarError("radial evaluation needs Im(y) > 0")
            q = exp(2 * pi * I * y)
            total = mpc(1)
            prod = mpc(1)
            qn = mpc(1)
            tiny = mpf(2) ** (-mp.prec - 24)
            n = 0
            cap = 400 + int(mpf(16) / y.imag)
            window, shrink = 64, mpf(2) ** 8
            checkpoint = mpf(1)
            while n < cap:
                n += 1
                qn *= q
                prod *= 1 - qn
                total += prod
                mag = abs(prod)
                if mag < tiny:
                    break
                # terms settle onto the exponentially small plateau that
                # bounds the truncation ambiguity; stop once they stagnate
                if n % window == 0:
                    if mag * shrink > checkpoint and n > 2 * window:
                        break
                    checkpoint = mag
            else:
                raise ExemplarError("radial truncation did not collapse")
            return exp(2 * pi * I * y / 24) * total

    def g_orders(r, count: int, *, ladder_start="0.0005", ladder_ratio="0.88",
                 ladder_points=30, degree_buffer=10):
        """Radial expansion orders of the finite-sum side at rational r,
        extracted from a vertical ladder with the reported confidence."""
        from .qseries import extract_asymptotics

        r = Fraction(r)
        base = mpf(r.numerator) / r.denominator
        fit = extract_asymptotics(
            g_radial,
            count - 1,
            base_point=base,
            direction=I,
            ladder_start=ladder_start,
            ladder_ratio=ladder_ratio,
            ladder_points=ladder_points,
            degree_buffer=degree_buffer,
        )
        return tuple(fit.series.coeffs[:count]), fit.confidences[:count]

    base = DirichletL(
        coeff=lambda m: radial_coefficient(m),
        abscissa=mpf(0),
        max_index=0,
        tail=("periodic", tuple(radial_coefficient(k) for k in range(1, 13))),
    )

    def line_hook(s):
        # Mellin image of the companion series: with frequencies k^2/24,
        # Gamma(s) (pi/12)^-s * (-1/2) L(chi, 2s - 1)
        with working_precision(extra=16):
            s = mpc(s)
            return mpf(12) ** (-(2 * s - 1)) * (
                zeta(2 * s - 1, mpf(1) / 12)
                - zeta(2 * s - 1, mpf(5) / 12)
                - zeta(2 * s - 1, mpf(7) / 12)
                + zeta(2 * s - 1, mpf(11) / 12)
            )

    spec = ExemplarSpec(
        name="kz",
        coefficient=lambda m: radial_coefficient(m),
        parity=None,
        weight=Fraction(3, 2),
        notes="finite quantum sums at rationals; radial companion with "
        "quadratic exponents; no simple-pole tower",
        truncation=0,
        tower=None,
        generating=GeneratingQSeries(
            coeff=lambda m: radial_coefficient(m),
            half_plane="upper",
            tail_sigma=1,
            frequencies=lambda m: mpf(m) * m / 24,
        ),
        target_function=eichler_side,
        extras={
            "finite_sum": g_at_rational,
            "eichler_side": eichler_side,
            "radial_orders": radial_orders,
            "g_orders": g_orders,
            "g_radial": g_radial,
            "twisted_lvalue": twisted_lvalue,
            "chi_line_hook": line_hook,
        },
    )
    return spec


# ---------------------------------------------------------------------------
# even divisor data with a polar completion


@register("divisor_d")
def divisor_d(M: int = 400) -> ExemplarSpec:
    """Even data A_m = d(|m|): L0(s) = 2 zeta(s)^2, completed by the
    Gamma(s/2)^2/(4 pi^s) factor with kappa = 1 and poles at s in {0, 1};
    the polar part of the expansion at the origin lands in prefix terms."""
    tab = divisor_count_table(max(M, 600))

    def a(m):
        m = abs(int(m))
        if m == 0:
            return mpc(0)
        t = divisor_count_table(m)
        return mpc(t[m])

    tower = StokesTower(
        2 * pi * I,
        {m: a(m) for m in range(-M, M + 1) if m != 0},
        SIMPLE_POLE,
        tail_sigma=1.1,
    )
    # the median-resummed series carries doubled constants
    doubled = StokesTower(
        2 * pi * I,
        {m: 2 * a(m) for m in range(-M, M + 1) if m != 0},
        SIMPLE_POLE,
        tail_sigma=1.1,
    )

    def lplus_hook(s):
        return zeta(mpc(s)) ** 2

    # the one-sided series L+ = zeta(s)^2 drives the coefficient formula;
    # the headline two-sided completion 2 gamma(s) zeta(s)^2 sits in extras
    base = DirichletL(
        coeff=lambda m: a(m),
        abscissa=mpf(1),
        analytic_hook=lplus_hook,
        variant="Lplus",
    )
    fe = FunctionalEquation(kappa=mpf(1), sign=1, epsilon=0)

    def independent_lambda(s):
        s = mpc(s)
        return maass_gamma().value(s) * lplus_hook(s)

    completed = CompletedL(
        base,
        maass_gamma(),
        fe,
        pole_list=(
            (mpc(1), {-2: mpf(1), -1: 2 * mpmath.euler}),
        ),
        independent_lambda=independent_lambda,
    )

    prefix = prefix_from_mellin_poles(
        [
            (mpc(1), {-2: mpf(1), -1: mpmath.euler}),
            (mpc(0), {-1: mpf(1) / 4}),
        ]
    )

    def lambert(y):
        """sum d(m) q^m = sum_k q^k / (1 - q^k), the acceleration oracle."""
        with working_precision(extra=16):
            y = mpc(y)
            q = exp(2 * pi * I * y)
            if abs(q) >= 1:
                raise ExemplarError("Lambert form needs Im(y) > 0")
            total = mpc(0)
            k = 0
            qk = mpc(1)
            while True:
                k += 1
                qk *= q
                term = qk / (1 - qk)
                total += term
                if abs(term) < mpf(2) ** (-mp.prec - 8):
                    break
            return total

    def target(y):
        """y * (f(y) - prefix(y)): what median resummation reconstructs."""
        with working_precision(extra=16):
            y = mpc(y)
            p = sum(t.eval(y) for t in prefix)
            return y * (lambert(y) - p)

    def series_coefficients(N):
        # c_0 = 0 (gamma-pole convention), odd c_n = zeta(-n)^2 (2 pi i)^n/n!
        with working_precision(extra=32):
            coeffs = [mpc(0)]
            for n in range(1, N + 1):
                if n % 2 == 0:
                    coeffs.append(mpc(0))
                else:
                    coeffs.append(
                        zeta(-n) ** 2 * (2 * pi * I) ** n / mpmath.factorial(n)
                    )
            return FormalSeries(
                tuple(coeffs), prefix=prefix, metadata={"source": "divisor_d"}
            )

    spec = ExemplarSpec(
        name="divisor_d",
        coefficient=a,
        parity="even",
        weight=1,
        notes="divisor counts; polar completion handled by prefix terms",
        truncation=M,
        tower=tower,
        tower_tail=TowerTail(
            lvalue_pos=lambda j: 2 * zeta(mpc(j)) ** 2,
            lvalue_neg=lambda j: 2 * zeta(mpc(j)) ** 2,
            order=26,
        ),
        completed=completed,
        generating=GeneratingQSeries(coeff=a, half_plane="both", tail_sigma=1.1),
        prefix=prefix,
        target_function=target,
        series_coefficients=series_coefficients,
        lvalue_pos=lambda j: zeta(mpc(j)) ** 2,
        lvalue_neg=lambda j: zeta(mpc(j)) ** 2,
        extras={
            "lambert": lambert,
            "doubled_tower": doubled,
            "lplus_hook": lplus_hook,
            # headline two-sided completion 2 gamma(s) zeta(s)^2
            "lambda0": lambda s: 2 * maass_gamma().value(mpc(s)) * lplus_hook(s),
        },
    )
    return spec


# ---------------------------------------------------------------------------
# external data ingestion


def _parse_gamma(obj, where) -> GammaFactor:
    jsonio.require(isinstance(obj, dict), f"{where}: gamma must be an object")
    terms = []
    for k, t in enumerate(obj.get("gamma", [])):
        jsonio.require(
            isinstance(t, dict) and "shift" in t and "scale" in t,
            f"{where}.gamma[{k}]: need shift and scale",
        )
        terms.append((Fraction(str(t["scale"])), Fraction(str(t["shift"]))))
    base = (
        jsonio.complex_from_json(obj["base_factor"], f"{where}.base_factor")
        if "base_factor" in obj
        else mpc(1)
    )
    const = (
        jsonio.complex_from_json(obj["const"], f"{where}.const")
        if "const" in obj
        else mpc(1)
    )
    return GammaFactor(
        terms=tuple(terms),
        pi_power=int(obj.get("pi_power", 0)),
        base=base,
        const=const,
    )


def ingest_external(path, partner_path=None) -> ExemplarSpec:
    """Load a Stokes-data file (schema documented in data/README.md).

    Validates the lattice/parity declarations and wires the ingested
    constants into the same machinery as the bundled exemplars; a partner
    file (or the inline "partner" key) enables dual-pair mode.
    """
    raw = jsonio.load_path(path)
    jsonio.require(isinstance(raw, dict), "top level must be an object")
    for key in ("spacing", "kind", "constants"):
        jsonio.require(key in raw, f"missing required key {key!r}")
    spacing = jsonio.complex_from_json(raw["spacing"], "spacing")
    jsonio.require(raw["kind"] in ("simple_pole", "log_branch"),
                   "kind must be simple_pole or log_branch")
    constants = {}
    for k, entry in enumerate(raw["constants"]):
        jsonio.require(
            isinstance(entry, dict) and "m" in entry,
            f"constants[{k}]: need index m",
        )
        m = int(entry["m"])
        jsonio.require(m != 0, f"constants[{k}]: index 0 is not allowed")
        constants[m] = jsonio.complex_from_json(entry, f"constants[{k}]")
    parity = raw.get("parity")
    if parity is not None:
        jsonio.require(parity in ("even", "odd"), "parity must be even or odd")
        sign = 1 if parity == "even" else -1
        for k, m in enumerate(sorted(constants)):
            if m > 0:
                continue
            expect = sign * constants.get(-m, mpc(0))
            if abs(constants[m] - expect) > mpf(2) ** (-mp.prec // 2) * (
                1 + abs(expect)
            ):
                raise jsonio.SchemaError(
                    f"declared parity {parity!r} violated first at index {m}"
                )
    sigma = float(raw.get("tail_sigma", 0))
    tower = StokesTower(spacing, constants, raw["kind"], tail_sigma=sigma)

    fe_obj = raw.get("functional_equation")
    completed = None
    if fe_obj:
        gf = _parse_gamma(fe_obj, "functional_equation")
        fe = FunctionalEquation(
            kappa=mpf(str(fe_obj.get("kappa", 1))),
            sign=int(fe_obj.get("sign", 1)),
            epsilon=int(fe_obj.get("epsilon", 0)),
            dual=bool(fe_obj.get("dual", False)),
        )
        from .lfunctions import series_from_tower

        base = series_from_tower(tower, "Lplus", abscissa=mpf(str(raw.get("abscissa", 0))))
        completed = CompletedL(base, gf, fe)

    prefix = []
    for k, t in enumerate(raw.get("prefix", [])):
        prefix.append(
            PrefixTerm(
                multiplier=jsonio.complex_from_json(
                    t["multiplier"], f"prefix[{k}].multiplier"
                ),
                power=int(t.get("power", 0)),
                log_power=int(t.get("log_power", 0)),
                log_scale=jsonio.complex_from_json(
                    t["log_scale"], f"prefix[{k}].log_scale"
                )
                if "log_scale" in t
                else mpc(1),
            )
        )

    spec = ExemplarSpec(
        name=str(raw.get("name", os.path.basename(str(path)))),
        coefficient=lambda m: tower.constant(m),
        parity=parity,
        weight=raw.get("weight"),
        notes=str(raw.get("notes", "ingested data")),
        truncation=tower.max_index(),
        tower=tower,
        completed=completed,
        generating=GeneratingQSeries(
            coeff=lambda m: tower.constant(m), half_plane="both", tail_sigma=sigma
        ),
        prefix=tuple(prefix),
        extras={"raw": raw},
    )

    inline_partner = raw.get("partner")
    partner_src = partner_path or (
        os.path.join(os.path.dirname(str(path)), inline_partner)
        if inline_partner
        else None
    )
    if partner_src:
        partner = ingest_external(partner_src)
        spec.extras["partner"] = partner
        if completed is not None and partner.completed is not None:
            completed.partner = partner.completed
            partner.completed.partner = completed
    return spec
