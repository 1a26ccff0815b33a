"""Period matrices of explicit genus-2 curves y^2 = F(x) by direct integration.

This is independent of the modular machinery and serves as a round-trip
oracle: the periods of dx/y and x dx/y over a chain of loops around the
segments joining consecutive roots (sorted by angle about an interior point)
are integrated numerically, and a symplectic basis is read off from the
chain's intersection pattern.
"""

from __future__ import annotations

from itertools import product

import mpmath

from . import exact
from .exact import RationalPolynomial
from .periods import BigPeriodMatrix, _imag_pd, reduce_period_matrix, small_period_matrix


def _roots(f: RationalPolynomial, prec: int):
    with mpmath.workprec(prec + 64):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(f.coeffs)]
        return mpmath.polyroots(coeffs, maxsteps=400, extraprec=2 * prec + 64)


def _segment_integrals(lc, roots, k, prec):
    """Integrals of dx/y and x dx/y along [e_k, e_{k+1}] for one continuous branch of y."""
    e, e1 = roots[k], roots[k + 1]
    others = [r for j, r in enumerate(roots) if j not in (k, k + 1)]
    h = e1 - e
    cs = [h / (e - r) for r in others]
    base = mpmath.sqrt(-lc * h * h * mpmath.fprod(e - r for r in others))

    def integrand(th, j):
        t = (1 - mpmath.cos(th)) / 2
        x = e + h * t
        den = base * mpmath.fprod(mpmath.sqrt(1 + t * c) for c in cs)
        return x ** j * h / den

    with mpmath.workprec(prec + 32):
        return [2 * mpmath.quad(lambda th: integrand(th, j), [0, mpmath.pi / 2, mpmath.pi])
                for j in (0, 1)]


def curve_period_matrix(f: RationalPolynomial, precision: int = 128, reduce: bool = True) -> BigPeriodMatrix:
    """Big period matrix of y^2 = f(x) for the basis dx/y, x dx/y."""
    if f.degree not in (5, 6):
        raise ValueError("need degree 5 or 6")
    with mpmath.workprec(precision + 32):
        lc = mpmath.mpf(f.lc.numerator) / f.lc.denominator
        roots = list(_roots(f, precision))
        centre = sum(roots) / len(roots) + mpmath.mpc("1e-3", "1.7e-3")
        roots.sort(key=lambda r: float(mpmath.arg(r - centre)))
        chain = [_segment_integrals(lc, roots, k, precision) for k in range(4)]
        # chain loops c_k meet c_{k+1} once; signs of each integral are unknown
        e = [[0] * 4 for _ in range(4)]
        for k in range(3):
            e[k][k + 1], e[k + 1][k] = 1, -1
        t = exact.symplectic_reduce(e)
        best = None
        for signs in product((1, -1), repeat=3):
            s = (1,) + signs
            per = [[s[k] * chain[k][i] for i in range(2)] for k in range(4)]
            for orient in (1, -1):
                tt = [[r[0], r[1], orient * r[2], orient * r[3]] for r in t]
                cols = [[sum(tt[k][j] * per[k][i] for k in range(4)) for i in range(2)] for j in range(4)]
                o1 = mpmath.matrix([[cols[j][i] for j in range(2)] for i in range(2)])
                o2 = mpmath.matrix([[cols[j + 2][i] for j in range(2)] for i in range(2)])
                z = mpmath.inverse(o1) * o2
                if not _imag_pd(z):
                    continue
                defect = abs(z[0, 1] - z[1, 0])
                if best is None or defect < best[0]:
                    best = (defect, o1, o2, tt)
        if best is None:
            raise ArithmeticError("no sign pattern gives a Riemann matrix")
        big = BigPeriodMatrix(best[1], best[2], best[3], precision)
    return reduce_period_matrix(big) if reduce else big


def curve_small_period_matrix(f: RationalPolynomial, precision: int = 128):
    return small_period_matrix(curve_period_matrix(f, precision))
