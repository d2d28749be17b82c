"""Generating q-series of tower constants and quantum-modular cocycles.

The generating function of a two-sided sequence A_m is
    f(y) = sum_{m>0} A_m e^{2 pi i lam_m y}   (upper half-plane)
         = -sum_{m<0} A_m e^{2 pi i lam_m y}  (lower half-plane),
with frequencies lam_m = m by default (general frequencies cover radial
q-series with square exponents).  Cocycles h_gamma[f](y) =
(cy+d)^{-w} f(gamma y) - f(y) measure the failure of weight-w modularity;
for holomorphic quantum modular forms they extend across the reals.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf, mpc, pi, exp

from .precision import working_precision
from .series import FormalSeries, PrefixTerm, StokesTower, eval_prefix
from .lfunctions import (
    CompletedL,
    DirichletL,
    LFunctionError,
    inverse_mellin_line,
)

I = mpc(0, 1)

UPPER, LOWER, BOTH = "upper", "lower", "both"


class QSeriesError(ValueError):
    pass


@dataclass
class GeneratingQSeries:
    """Evaluator for the generating function of a coefficient sequence.

    coeff(m) for m != 0 supplies A_m; frequencies(m) maps the index to the
    exponent multiplier (identity by default).  tail_sigma bounds
    |A_m| <= C |m|^sigma and drives the truncation with a certified tail.
    """

    coeff: object
    half_plane: str = BOTH
    tail_sigma: float = 0
    tail_const: float = 1
    frequencies: object = None
    im_floor: mpf = mpf("0.001")
    max_terms: int = 200000
    last_tail_bound: mpf = field(default=mpf(0), compare=False)

    def _freq(self, m):
        return mpf(self.frequencies(m)) if self.frequencies else mpf(m)

    def eval(self, y) -> mpc:
        """Truncated exponential sum with a certified geometric tail bound."""
        y = mpc(y)
        if y.imag == 0:
            raise QSeriesError("generating series undefined on the real axis")
        if abs(y.imag) < self.im_floor:
            raise QSeriesError(
                f"Im(y) = {float(y.imag):.2e} below the configured floor "
                f"{float(self.im_floor):.2e}"
            )
        upper = y.imag > 0
        if upper and self.half_plane == LOWER:
            raise QSeriesError("evaluator restricted to the lower half-plane")
        if not upper and self.half_plane == UPPER:
            raise QSeriesError("evaluator restricted to the upper half-plane")
        with working_precision(extra=32):
            total = mpc(0)
            sgn = 1 if upper else -1
            target = mpf(2) ** (-mp.prec + 8)
            qa = exp(-2 * pi * abs(y.imag))  # |q| for unit frequency
            m = 0
            while True:
                m += 1
                if m > self.max_terms:
                    raise QSeriesError(
                        "tail bound not achievable within the term budget"
                    )
                idx = m if upper else -m
                lam = self._freq(idx)
                a = mpc(self.coeff(idx))
                if a != 0:
                    total += sgn * a * exp(2 * pi * I * lam * y)
                # geometric tail certificate from the growth bound
                lam_next = abs(self._freq(idx + (1 if upper else -1)))
                bound = (
                    mpf(self.tail_const)
                    * mpf(m + 1) ** mpf(self.tail_sigma)
                    * qa ** lam_next
                    / (1 - qa)
                )
                if bound < target * (1 + abs(total)):
                    self.last_tail_bound = +bound
                    break
            return +total

    __call__ = eval


def eval_f(g: GeneratingQSeries, y) -> mpc:
    return g.eval(y)


def eval_f_by_inverse_mellin(l: CompletedL | DirichletL, t, C=None, **kw) -> mpc:
    """Generating function at y = it from the vertical-line contour.

    For t > 0 this inverts (2 pi t)^-s Gamma(s) L_+(s); for t < 0 the
    minus-series with (-2 pi t)^-s.  The line Re s = C must lie right of
    the convergence abscissa.
    """
    base = l.base if isinstance(l, CompletedL) else l
    t = mpf(t)
    if C is None:
        C = base.abscissa + mpf(2)
    return inverse_mellin_line(base.evaluate, abs(t), C, **kw)


@dataclass(frozen=True)
class CocycleRecord:
    """Group element (a, b; c, d), weight, and the function it acts on."""

    gamma: tuple
    weight: object
    f: object

    def __post_init__(self):
        a, b, c, d = self.gamma
        if a * d - b * c != 1:
            raise QSeriesError("gamma must have determinant 1")

    def mobius(self, y):
        a, b, c, d = self.gamma
        den = c * y + d
        if den == 0:
            raise QSeriesError("cy + d = 0: Mobius image at infinity")
        return (a * y + b) / den

    def automorphy(self, y):
        """(cy+d)^-weight with the principal branch for fractional weight."""
        a, b, c, d = self.gamma
        den = c * mpc(y) + d
        w = self.weight
        if isinstance(w, int) or (hasattr(w, "denominator") and w.denominator == 1):
            return den ** (-int(w))
        return mpmath.power(den, -mpf(_weight_to_mpf(w)))


def _weight_to_mpf(w):
    if hasattr(w, "numerator"):
        return mpf(w.numerator) / w.denominator
    return mpf(w)


def cocycle(rec: CocycleRecord, y) -> mpc:
    """h_gamma[f](y) = (cy+d)^-w f(gamma y) - f(y)."""
    with working_precision(extra=16):
        y = mpc(y)
        gy = rec.mobius(y)
        return +(rec.automorphy(y) * rec.f(gy) - rec.f(y))


def compose(g1, g2):
    a1, b1, c1, d1 = g1
    a2, b2, c2, d2 = g2
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
    )


def coboundary_residual(f, weight, g1, g2, y) -> mpf:
    """|h_{g1 g2}[f] - (h_{g1}[f]|_{g2} + h_{g2}[f])| at y.

    The slash action on cocycles is (h|_g)(y) = (cy+d)^-w h(g y).
    """
    with working_precision(extra=16):
        y = mpc(y)
        r12 = CocycleRecord(compose(g1, g2), weight, f)
        r1 = CocycleRecord(g1, weight, f)
        r2 = CocycleRecord(g2, weight, f)
        lhs = cocycle(r12, y)
        slashed = r2.automorphy(y) * cocycle(r1, r2.mobius(y))
        rhs = slashed + cocycle(r2, y)
        return abs(lhs - rhs)


@dataclass(frozen=True)
class SmoothnessReport:
    path_values: tuple
    max_jump: mpf | None
    max_divided_difference: mpf | None
    fit_residual: mpf | None
    fit_degree: int | None


def cocycle_extension_probe(
    rec_or_eval,
    path,
    *,
    jump_offset=None,
    fit_degree: int | None = None,
    holdout: int = 5,
) -> SmoothnessReport:
    """Evaluate a cocycle along a path that may approach or cross the reals.

    rec_or_eval is a CocycleRecord or a plain callable h(y) (analytic
    re-expressions such as kernel sums, valid on the cut plane).  Reported:
    the largest jump between mirror pairs y = x +- i*delta when
    jump_offset is given, the largest second divided difference along the
    path, and optionally a polynomial least-squares fit with the residual
    measured at held-out points.
    """
    h = rec_or_eval if callable(rec_or_eval) else (lambda y: cocycle(rec_or_eval, y))
    with working_precision(extra=16):
        pts = [mpc(p) for p in path]
        vals = [h(p) for p in pts]
        max_jump = None
        if jump_offset is not None:
            d = mpf(jump_offset)
            jumps = []
            for p in pts:
                if abs(p.imag) < d * 4:
                    x = p.real
                    jumps.append(abs(h(mpc(x, d)) - h(mpc(x, -d))))
            max_jump = max(jumps) if jumps else mpf(0)
        max_dd = None
        if len(pts) >= 3:
            dds = []
            for i in range(len(pts) - 2):
                h01 = (vals[i + 1] - vals[i]) / (pts[i + 1] - pts[i])
                h12 = (vals[i + 2] - vals[i + 1]) / (pts[i + 2] - pts[i + 1])
                dds.append(abs((h12 - h01) / (pts[i + 2] - pts[i])))
            max_dd = max(dds)
        fit_residual = None
        if fit_degree is not None:
            if len(pts) < fit_degree + 1 + holdout:
                raise QSeriesError("not enough path points for the requested fit")
            train_p, train_v, test_p, test_v = [], [], [], []
            for k, (p, v) in enumerate(zip(pts, vals)):
                if holdout and k % max(2, len(pts) // holdout) == 1 and len(test_p) < holdout:
                    test_p.append(p)
                    test_v.append(v)
                else:
                    train_p.append(p)
                    train_v.append(v)
            coeffs = _poly_lsq(train_p, train_v, fit_degree)
            fit_residual = max(
                abs(_poly_eval(coeffs, p) - v) for p, v in zip(test_p, test_v)
            )
        return SmoothnessReport(
            tuple(vals),
            +max_jump if max_jump is not None else None,
            +max_dd if max_dd is not None else None,
            +fit_residual if fit_residual is not None else None,
            fit_degree,
        )


def _poly_lsq(xs, ys, degree):
    A = mp.matrix(len(xs), degree + 1)
    b = mp.matrix(len(xs), 1)
    for i, (x, y) in enumerate(zip(xs, ys)):
        p = mpc(1)
        for j in range(degree + 1):
            A[i, j] = p
            p *= x
        b[i] = y
    At = A.transpose_conj()
    return mp.lu_solve(At * A, At * b)


def _poly_eval(coeffs, x):
    acc = mpc(0)
    for c in reversed([coeffs[i] for i in range(len(coeffs))]):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class AsymptoticsFit:
    series: FormalSeries
    confidences: tuple  # estimated correct decimal digits per coefficient
    condition_warning: bool


def extract_asymptotics(
    f_eval,
    N: int,
    prefix_model: tuple = (),
    *,
    base_point=mpc(0),
    direction=I,
    ladder_ratio="0.8",
    ladder_start="0.25",
    ladder_points=None,
    degree_buffer: int = 10,
    im_floor=None,
) -> AsymptoticsFit:
    """Fit c_0..c_N of f(y) ~ prefix(y) + sum c_n (y - y0)^n on a ladder.

    The ladder is y_k = y0 + direction * start * ratio^k; prefix terms are
    subtracted before the weighted least-squares fit.  The fit runs at
    degree N + degree_buffer so the neglected orders do not bias the
    reported coefficients.  Confidence per coefficient is the agreement
    between fits on the even-index and odd-index halves of the ladder;
    ill-conditioned coefficients are reported rather than trusted.
    """
    Nfit = N + degree_buffer
    with working_precision(extra=max(64, 3 * Nfit)):
        ratio = mpf(ladder_ratio)
        start = mpf(ladder_start)
        npts = ladder_points or (2 * (Nfit + 1) + 16)
        ys = []
        for k in range(npts):
            r = start * ratio ** k
            y = mpc(base_point) + mpc(direction) * r
            if im_floor is not None and abs(y.imag) < mpf(im_floor):
                break
            ys.append(y)
        if len(ys) < Nfit + 3:
            raise QSeriesError("ladder too short for the requested order")
        vals = []
        for y in ys:
            v = mpc(f_eval(y)) - eval_prefix(prefix_model, y - mpc(base_point))
            vals.append(v)

        def fit(indices):
            pts = [ys[i] - mpc(base_point) for i in indices]
            rhs = [vals[i] for i in indices]
            A = mp.matrix(len(pts), Nfit + 1)
            b = mp.matrix(len(pts), 1)
            for i, (x, v) in enumerate(zip(pts, rhs)):
                wgt = 1 / (abs(v) + mpf(2) ** (-mp.prec // 2))
                p = mpc(1)
                for j in range(Nfit + 1):
                    A[i, j] = p * wgt
                    p *= x
                b[i] = v * wgt
            At = A.transpose_conj()
            G = At * A
            try:
                return mp.lu_solve(G, At * b)
            except ZeroDivisionError:
                lam = mpf(2) ** (-mp.prec + mp.prec // 6)
                scale = max(abs(G[i, i]) for i in range(G.rows))
                for i in range(G.rows):
                    G[i, i] += lam * (scale or 1)
                return mp.lu_solve(G, At * b)

        all_fit = fit(range(len(ys)))
        fa = fit(range(0, len(ys), 2))
        fb = fit(range(1, len(ys), 2))
        coeffs = [all_fit[j] for j in range(N + 1)]
        confidences = []
        warn = False
        for j in range(N + 1):
            diff = abs(fa[j] - fb[j])
            scale = max(abs(coeffs[j]), mpf(2) ** (-mp.prec // 2))
            digits = float(-mpmath.log10(diff / scale)) if diff > 0 else mp.dps
            if digits < 1:
                warn = True
            confidences.append(max(0.0, digits))
        series = FormalSeries(
            tuple(+c for c in coeffs),
            prefix=tuple(prefix_model),
            metadata={"source": "ladder_fit", "ladder_points": len(ys)},
        )
        return AsymptoticsFit(series, tuple(confidences), warn)
