"""Analytic continuation of Borel germs by rational approximation.

The truncated Borel transform is continued by an (L, M) rational
interpolant of its Taylor data.  Denominator roots approximate the
singularities; cross-validating two interpolants of different orders
separates genuine poles (which stay put) from spurious doublets (which
move).  Residues convert to Stokes constants via S = -2 pi i * residue,
matching the local model  -S / (2 pi i (zeta - zeta_0)) + regular.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import numpy as np
from mpmath import mp, mpf, mpc, pi

from .precision import working_precision
from .series import FormalSeries, StokesTower, SIMPLE_POLE

I = mpc(0, 1)

STABILITY_THRESHOLD = 0.999


class BorelAnalysisError(ValueError):
    pass


class DegenerateSystem(BorelAnalysisError):
    """Rank-deficient interpolation system; carries the deficiency index."""

    def __init__(self, deficiency: int):
        self.deficiency = deficiency
        super().__init__(f"degenerate linear system (deficiency {deficiency})")


class AmbiguousLattice(BorelAnalysisError):
    """Two incompatible candidate spacings; not silently resolved."""


def _polyval(coeffs, z):
    acc = mpc(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _polyder(coeffs):
    return tuple(k * c for k, c in enumerate(coeffs) if k > 0)


@dataclass(frozen=True)
class RationalApproximant:
    """Rational interpolant numerator/denominator, ascending coefficients.

    The denominator is normalized to leading coefficient 1.
    """

    numerator_coeffs: tuple
    denominator_coeffs: tuple
    order: tuple
    source_truncation: int
    deficiency: int = 0

    def __call__(self, zeta) -> mpc:
        zeta = mpc(zeta)
        return _polyval(self.numerator_coeffs, zeta) / _polyval(
            self.denominator_coeffs, zeta
        )

    def poles(self) -> tuple:
        """Denominator roots at working precision."""
        with working_precision(extra=64):
            coeffs = list(self.denominator_coeffs)
            while coeffs and abs(coeffs[-1]) == 0:
                coeffs.pop()
            deg = len(coeffs) - 1
            if deg < 1:
                return ()
            # seed with double-precision roots, then Newton-polish
            try:
                seeds = np.roots(np.array([complex(c) for c in reversed(coeffs)]))
            except Exception:
                seeds = []
            der = _polyder(coeffs)
            roots = []
            for s in seeds:
                x = mpc(s)
                converged = False
                for _ in range(80):
                    fx = _polyval(coeffs, x)
                    dfx = _polyval(der, x)
                    if dfx == 0:
                        break
                    step = fx / dfx
                    x -= step
                    if abs(step) <= mpf(2) ** (-mp.prec + 16) * (1 + abs(x)):
                        converged = True
                        break
                if converged:
                    roots.append(x)
            if len(roots) < deg:
                # Newton missed some roots (clustered seeds); fall back
                try:
                    roots = mpmath.polyroots(
                        list(reversed(coeffs)), maxsteps=220, extraprec=mp.prec
                    )
                except mpmath.libmp.libhyper.NoConvergence:
                    pass
            return tuple(+r for r in roots)

    def residue_at(self, pole) -> mpc:
        """num(z0)/den'(z0) for a simple denominator root z0."""
        with working_precision(extra=32):
            num = _polyval(self.numerator_coeffs, pole)
            dden = _polyval(_polyder(self.denominator_coeffs), pole)
            if dden == 0:
                raise BorelAnalysisError("repeated denominator root")
            return num / dden


def build_approximant(b: FormalSeries, L: int, M: int) -> RationalApproximant:
    """(L, M) rational interpolant of the first L+M+1 Taylor coefficients.

    Solved at working precision; a rank-deficient system (input rational of
    lower degree than asked) is regularized by dropping trailing unknowns,
    and the deficiency index is recorded on the result.
    """
    if L + M + 1 > len(b.coeffs):
        raise BorelAnalysisError(
            f"need L+M+1 <= {len(b.coeffs)} coefficients, got L={L}, M={M}"
        )
    if b.lead_exponent != 0 and b.lead_exponent < -1:
        raise BorelAnalysisError("not a Borel-plane series (lead exponent < -1)")
    c = b.coeffs
    with working_precision(extra=mp.prec):
        # scale zeta to tame the geometric growth of the coefficients
        scale = mpf(1)
        tail = [abs(x) for x in c[max(1, L + M - 6) : L + M + 1] if abs(x) > 0]
        if tail:
            mean = sum(mpmath.log(x) for x in tail) / len(tail)
            k0 = L + M - len(tail) / 2
            if k0 > 0:
                scale = mpmath.exp(-mean / k0)
                if not mpmath.isfinite(scale) or scale <= 0:
                    scale = mpf(1)
        cs = [c[k] * scale ** k if k <= L + M else mpc(0) for k in range(L + M + 1)]

        # denominator: sum_{j=0..M} q_j c_{n-j} = 0 for n = L+1..L+M, q_0 = 1
        A = mp.matrix(M, M)
        rhs = mp.matrix(M, 1)
        for i in range(M):
            n = L + 1 + i
            rhs[i] = -cs[n]
            for j in range(1, M + 1):
                A[i, j - 1] = cs[n - j] if 0 <= n - j else mpc(0)
        deficiency = 0
        try:
            q = mp.lu_solve(A, rhs)
            # large solution norm signals near-degeneracy; re-solve regularized
            if mpmath.norm(q) > mpf(2) ** (mp.prec // 3):
                raise ZeroDivisionError
        except (ZeroDivisionError, ValueError):
            q, deficiency = _least_squares_min_norm(A, rhs)
        qs = [mpc(1)] + [q[j] for j in range(M)]

        # numerator by convolution: p_n = sum_{j<=min(n,M)} q_j c_{n-j}
        ps = []
        for n in range(L + 1):
            ps.append(sum(qs[j] * cs[n - j] for j in range(0, min(n, M) + 1)))

        # undo the variable scaling and normalize the denominator leader
        num = [p / scale ** k for k, p in enumerate(ps)]
        den = [q2 / scale ** k for k, q2 in enumerate(qs)]
        lead = den[-1]
        if abs(lead) < mpf(2) ** (-mp.prec // 2):
            # trailing coefficients vanished: effective degree is lower
            while len(den) > 1 and abs(den[-1]) < mpf(2) ** (-mp.prec // 2) * max(
                abs(d) for d in den
            ):
                den.pop()
            lead = den[-1]
        num = [x / lead for x in num]
        den = [x / lead for x in den]
        return RationalApproximant(
            tuple(+x for x in num),
            tuple(+x for x in den),
            (L, M),
            len(b.coeffs),
            deficiency,
        )


def _least_squares_min_norm(A, rhs):
    """Regularized normal-equation solve; returns (solution, deficiency)."""
    M = A.cols
    At = A.T
    G = At * A
    lam = mpf(2) ** (-mp.prec + mp.prec // 8)
    scale = max(abs(G[i, i]) for i in range(M))
    for i in range(M):
        G[i, i] += lam * (scale or 1)
    x = mp.lu_solve(G, At * rhs)
    # deficiency estimate: residual rank drop of A
    resid = A * x - rhs
    deficiency = 1 if mpmath.norm(resid) < mpf(2) ** (-mp.prec // 2) else 0
    return x, max(1, deficiency)


@dataclass(frozen=True)
class PoleReport:
    location: mpc
    residue: mpc
    stokes_constant: mpc
    stability: mpf


@dataclass(frozen=True)
class SingularityReport:
    poles: tuple
    merged_tower: StokesTower | None
    log_branch_suspects: tuple = ()
    threshold: float = STABILITY_THRESHOLD

    @property
    def stable_poles(self) -> tuple:
        return tuple(p for p in self.poles if p.stability >= self.threshold)


def extract_singularities(
    r: RationalApproximant,
    r2: RationalApproximant,
    threshold: float = STABILITY_THRESHOLD,
) -> SingularityReport:
    """Cross-validate denominator roots of two approximant orders.

    Poles are paired by nearest displacement; stability = 1 - normalized
    displacement.  Residues come from the first approximant (derivative
    formula); Stokes constants are S = -2 pi i * residue.  An empty report
    is valid output for entire functions.
    """
    if r.order == r2.order:
        raise BorelAnalysisError("cross-validation needs two different orders")
    with working_precision(extra=32):
        p1 = list(r.poles())
        p2 = list(r2.poles())
        reports = []
        for z in p1:
            if not p2:
                break
            dists = [abs(z - w) for w in p2]
            jmin = dists.index(min(dists))
            disp = dists[jmin] / (abs(z) + mpf(1) * 2 ** (-mp.prec))
            stability = max(mpf(0), 1 - disp)
            # spurious-pole guard: a tiny residue next to a numerator root
            try:
                res = r.residue_at(z)
            except BorelAnalysisError:
                continue
            reports.append(
                PoleReport(
                    location=+z,
                    residue=+res,
                    stokes_constant=+(-2 * pi * I * res),
                    stability=+stability,
                )
            )
        reports.sort(key=lambda p: (abs(p.location), mpmath.arg(p.location)))
        stable = [p for p in reports if p.stability >= threshold]
        # pole clusters among stable poles suggest a logarithmic branch cut
        suspects = []
        for i, a in enumerate(stable):
            for b in stable[i + 1 :]:
                gap = abs(a.location - b.location)
                if gap < mpf("0.05") * (abs(a.location) + abs(b.location)) / 2:
                    suspects.append((a.location, b.location))
        tower = None
        if len(stable) >= 2 and not suspects:
            try:
                tower = detect_tower_from_poles(
                    [(p.location, p.stokes_constant) for p in stable]
                )
            except BorelAnalysisError:
                tower = None
        return SingularityReport(
            tuple(reports), tower, tuple(suspects), threshold
        )


def detect_tower(rep: SingularityReport) -> StokesTower:
    """Fit a common spacing E over the stable poles of a report."""
    stable = rep.stable_poles
    if len(stable) < 2:
        raise BorelAnalysisError("need at least 2 stable poles")
    return detect_tower_from_poles(
        [(p.location, p.stokes_constant) for p in stable]
    )


def detect_tower_from_poles(poles, rel_tol=None) -> StokesTower:
    """Lattice fit: all locations must be integer multiples of a spacing E.

    The candidate spacing is the smallest-|zeta| pole refined by rational
    index search; least squares over all members refines E.  The lattice
    must contain index +-1 (otherwise a strictly smaller spacing would fit
    equally well, and the assignment is reported as ambiguous rather than
    resolved).
    """
    with working_precision(extra=32):
        rel_tol = mpf(rel_tol) if rel_tol is not None else mpf(10) ** -6
        locs = [(mpc(z), mpc(s)) for z, s in poles]
        locs.sort(key=lambda t: abs(t[0]))
        base = locs[0][0]
        if abs(base) == 0:
            raise BorelAnalysisError("pole at origin cannot seed a lattice")
        # find small rational indices m_k with z_k ~ (p/q) * base
        den_limit = 12
        best = None
        for q in range(1, den_limit + 1):
            E = base / q
            idx = []
            ok = True
            maxres = mpf(0)
            for z, _ in locs:
                ratio = z / E
                m = mpmath.nint(ratio.real)
                if abs(ratio.imag) > rel_tol * (1 + abs(ratio.real)) or m == 0:
                    ok = False
                    break
                res = abs(z - m * E) / abs(z)
                maxres = max(maxres, res)
                if res > rel_tol:
                    ok = False
                    break
                idx.append(int(m))
            if ok:
                best = (q, idx, maxres)
                break
        if best is None:
            raise AmbiguousLattice(
                "no common spacing with denominator <= 12 fits all stable poles"
            )
        q, idx, _ = best
        if 1 not in [abs(i) for i in idx]:
            raise AmbiguousLattice(
                f"lattice indices {sorted(idx)} do not reach +-1: spacing is "
                "ambiguous (missing first tower member)"
            )
        # least-squares spacing over all members: E = sum m_k z_k / sum m_k^2
        num = sum(m * z for m, (z, _) in zip(idx, locs))
        den = sum(m * m for m in idx)
        E = num / den
        # canonical orientation: arg(E) in [0, pi) -- E and -E describe the
        # same lattice with negated indices
        if not (0 <= mpmath.arg(E) < pi):
            E = -E
            idx = [-m for m in idx]
        residuals = [abs(z - m * E) for m, (z, _) in zip(idx, locs)]
        constants = {}
        for m, (z, s) in zip(idx, locs):
            if m in constants:
                raise AmbiguousLattice(f"two poles map to the same index {m}")
            constants[m] = s
        tower = StokesTower(+E, constants, SIMPLE_POLE)
        object.__setattr__(tower, "fit_residuals", tuple(+r for r in residuals))
        return tower


@dataclass(frozen=True)
class LargeOrderEstimate:
    a_plus: mpc
    a_minus: mpc
    error_estimate: mpf
    converged: bool
    iterates: tuple


def leading_stokes_by_large_order(s: FormalSeries, E) -> LargeOrderEstimate:
    """Estimate A_1 (and A_-1) from the large-order growth of coefficients.

    The normalized sequence x_n = 2 pi i c_n E^n / Gamma(n) tends to
    A_1 + (-1)^n A_{-1} up to O(2^-n); parity splitting plus iterated
    Shanks extrapolation removes the geometric contamination of the
    farther tower members.
    """
    E = mpc(E)
    with working_precision(extra=32):
        xs = []
        En = mpc(1)
        for n in range(1, len(s.coeffs)):
            En *= E
            xs.append(2 * pi * I * s.coeffs[n] * En / mpmath.gamma(n))
        if all(abs(x) == 0 for x in xs):
            return LargeOrderEstimate(mpc(0), mpc(0), mpf(0), True, ())
        even = xs[1::2]  # x_2, x_4, ...
        odd = xs[0::2]  # x_1, x_3, ...
        ev, ev_err, ev_its = _shanks_limit(even)
        od, od_err, od_its = _shanks_limit(odd)
        a_plus = (ev + od) / 2
        a_minus = (ev - od) / 2
        err = ev_err + od_err
        scale = max(abs(a_plus), abs(a_minus), mpf(1) * 2 ** -mp.prec)
        converged = bool(err < mpf("1e-10") * scale)
        return LargeOrderEstimate(
            +a_plus, +a_minus, +err, converged, tuple(ev_its[-3:] + od_its[-3:])
        )


def _shanks_limit(seq):
    """Iterated Shanks transform; returns (limit, error_estimate, iterates)."""
    cur = list(seq)
    its = [cur[-1]]
    guard = mpf(2) ** (-mp.prec + 24)
    while len(cur) >= 3:
        nxt = []
        for i in range(len(cur) - 2):
            denom = cur[i + 2] - 2 * cur[i + 1] + cur[i]
            if abs(denom) < guard * (abs(cur[i + 2]) + abs(cur[i]) + 1):
                nxt.append(cur[i + 2])
            else:
                nxt.append(cur[i + 2] - (cur[i + 2] - cur[i + 1]) ** 2 / denom)
        cur = nxt
        its.append(cur[-1])
        if len(its) >= 2 and abs(its[-1] - its[-2]) == 0:
            break
    err = abs(its[-1] - its[-2]) if len(its) >= 2 else mpf("inf")
    return its[-1], err, its
