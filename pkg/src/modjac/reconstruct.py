"""From a period matrix to a rational model y^2 = F(x).

Roots: for each odd characteristic m_k the row r_k = grad theta[m_k](0) * omega1^{-1}
defines the differential r_k1 dx/y + r_k2 x dx/y, which vanishes doubly at the
Weierstrass point W_k, so alpha_k = -r_k1 / r_k2.

Leading coefficient: write s_k = r_k2 for a finite root and s_k = r_k1 for the
root at infinity (degree 5), and D0 for the discriminant of the monic model.
Then, in both degrees,

    |a|^12 = 2^24 pi^12 |det omega1|^-6 prod_k |s_k|^2 / |D0|.

For degree 6 this is the relation D^7 = 2^120 a^10 pi^60 det(omega1)^-30
prod H[W_j](1, alpha_k)^2 with the product over ordered pairs j != k; the
degree-5 form follows by moving a finite root to infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import mpmath

from . import exact
from .errors import (BadReduction, NoRationalFound, NotTenthPower, SignAmbiguous,
                     TooManyInfiniteRoots)
from .exact import RationalPolynomial, lcm, squarefree_part
from .hyperelliptic import count_points, is_good_prime
from .modsym import NewformClass, primes_up_to, qtrace
from .periods import BigPeriodMatrix, SmallPeriodMatrix
from .theta import odd_gradients


@dataclass
class WeierstrassSet:
    roots: list                 # finite roots, in the order of the odd points
    degree: int
    precision: int
    rows: list = field(default_factory=list)       # r_k for all six odd points
    infinite: int | None = None                    # index of the discarded ratio

    def scale_factors(self):
        return [r[0] if k == self.infinite else r[1] for k, r in enumerate(self.rows)]


@dataclass
class HyperellipticModel:
    polynomial: RationalPolynomial
    discriminant: Fraction
    label: str | None = None
    sign: int = 1
    separating_prime: int | None = None
    self_twist: bool = False


def _digits(prec: int) -> int:
    return int(prec * 0.30103)


def weierstrass_roots(omega: BigPeriodMatrix, z: SmallPeriodMatrix) -> WeierstrassSet:
    prec = omega.precision
    with mpmath.workprec(prec + 32):
        inv = mpmath.inverse(omega.omega1)
        rows = []
        for g in odd_gradients(z):
            rows.append([g[0] * inv[0, 0] + g[1] * inv[1, 0], g[0] * inv[0, 1] + g[1] * inv[1, 1]])
        thresh = mpmath.mpf(10) ** (-(_digits(prec) // 2))
        infinite = [k for k, r in enumerate(rows)
                    if abs(r[1]) < thresh * mpmath.sqrt(abs(r[0]) ** 2 + abs(r[1]) ** 2)]
        if len(infinite) > 1:
            raise TooManyInfiniteRoots(f"{len(infinite)} infinite ratios")
        roots = [-r[0] / r[1] for k, r in enumerate(rows) if k not in infinite]
    return WeierstrassSet(roots, 6 - len(infinite), prec, rows, infinite[0] if infinite else None)


def _expand(roots):
    c = [mpmath.mpc(1)]
    for r in roots:
        nxt = [mpmath.mpc(0)] * (len(c) + 1)
        for k, x in enumerate(c):
            nxt[k + 1] += x
            nxt[k] -= r * x
        c = nxt
    return c


def monic_model(roots: WeierstrassSet, height_bound: int = 10 ** 12) -> RationalPolynomial:
    with mpmath.workprec(roots.precision + 32):
        coeffs = _expand(roots.roots)
        scale = max(1, max(abs(c) for c in coeffs))
        tol = mpmath.mpf(2) ** (-(roots.precision // 2)) * scale
        out = []
        for c in coeffs:
            if abs(c.imag) > tol:
                raise NoRationalFound("coefficients of the monic model are not real")
            out.append(exact.rationalize(c.real, height_bound, tol))
    f = RationalPolynomial(out)
    if f.degree != roots.degree or not f.is_squarefree():
        raise NoRationalFound("reconstructed monic model is not squarefree of the right degree")
    return f


def leading_coefficient(f0: RationalPolynomial, omega: BigPeriodMatrix, z: SmallPeriodMatrix,
                        roots: WeierstrassSet, height_bound: int = 10 ** 12) -> Fraction:
    """|a| with F = a F0 the model whose differentials dx/y, x dx/y have periods omega."""
    prec = omega.precision
    with mpmath.workprec(prec + 32):
        d0 = f0.discriminant()
        d0 = mpmath.mpf(d0.numerator) / d0.denominator
        s = mpmath.fprod(abs(x) ** 2 for x in roots.scale_factors())
        a12 = 2 ** 24 * mpmath.pi ** 12 * abs(mpmath.det(omega.omega1)) ** -6 * s / abs(d0)
        a = mpmath.root(a12, 12)
        tol = mpmath.mpf(2) ** (-(prec // 3)) * max(1, a)
        try:
            q = exact.rationalize(a, height_bound, tol)
        except NoRationalFound as exc:
            raise NotTenthPower(f"|a|^12 = {mpmath.nstr(a12, 15)} has no rational root") from exc
        if abs(mpmath.mpf(q.numerator) ** 12 / mpmath.mpf(q.denominator) ** 12 - a12) > tol * 12 * a12:
            raise NotTenthPower("rational root does not reproduce |a|^12")
    return q


def reconstruct_model(omega: BigPeriodMatrix, z: SmallPeriodMatrix | None = None,
                      height_bound: int = 10 ** 12):
    """(F0, |a|) with y^2 = |a| F0 or its -1 twist having period matrix omega."""
    from .periods import small_period_matrix
    z = z if z is not None else small_period_matrix(omega)
    roots = weierstrass_roots(omega, z)
    f0 = monic_model(roots, height_bound)
    return f0, leading_coefficient(f0, omega, z, roots, height_bound)


# ---------------------------------------------------------------------------
# sign

def _is_rational_square(x: Fraction) -> bool:
    if x <= 0:
        return False
    from math import isqrt
    n, d = x.numerator, x.denominator
    return isqrt(n) ** 2 == n and isqrt(d) ** 2 == d


def _proportional_square(f: RationalPolynomial, g: RationalPolynomial) -> bool:
    """g = lambda^2 f for some rational lambda."""
    if f.degree != g.degree:
        return False
    ratio = None
    for a, b in zip(f.coeffs, g.coeffs):
        if (a == 0) != (b == 0):
            return False
        if a:
            r = b / a
            if ratio is None:
                ratio = r
            elif r != ratio:
                return False
    return ratio is not None and _is_rational_square(ratio)


def twist_isomorphic(f: RationalPolynomial) -> bool:
    """Symbolic checks that y^2 = f and y^2 = -f are Q-isomorphic."""
    neg = RationalPolynomial([-c for c in f.coeffs])
    if f.is_odd():
        return True
    candidates = [f.mobius(-1, 0, 0, 1), f.mobius(0, 1, 1, 0), f.mobius(0, -1, 1, 0)]
    return any(_proportional_square(neg, g) for g in candidates)


def resolve_sign(f1: RationalPolynomial, cls: NewformClass, prime_bound: int = 1000) -> HyperellipticModel:
    neg = RationalPolynomial([-c for c in f1.coeffs])
    if twist_isomorphic(f1):
        return HyperellipticModel(f1, f1.discriminant(), cls.label, 1, None, True)
    for p in primes_up_to(prime_bound):
        if p == 2 or cls.level % p == 0 or not is_good_prime(f1, p):
            continue
        plus, minus = count_points(f1, p), count_points(neg, p)
        if plus == minus:
            continue
        target = p + 1 - qtrace(cls.eigenvalue(p))
        if plus == target:
            return HyperellipticModel(f1, f1.discriminant(), cls.label, 1, p)
        if minus == target:
            return HyperellipticModel(neg, neg.discriminant(), cls.label, -1, p)
        raise BadReduction(f"neither twist matches the Hecke eigenvalue at p = {p}")
    raise SignAmbiguous(f"no prime up to {prime_bound} separates F and -F", (f1, neg))


def integral_model(f: RationalPolynomial) -> RationalPolynomial:
    """d F with d = t / b: t the squared lcm of denominators and b the square part of
    the gcd of the numerators of t F."""
    den = 1
    for c in f.coeffs:
        den = lcm(den, c.denominator)
    t = den * den
    g = 0
    for c in f.coeffs:
        g = gcd(g, (c * t).numerator)
    b = g // abs(squarefree_part(g)) if g else 1
    d = Fraction(t, b)
    return RationalPolynomial([c * d for c in f.coeffs])


def integral_multiplier(f: RationalPolynomial) -> Fraction:
    g = integral_model(f)
    return g.lc / f.lc
