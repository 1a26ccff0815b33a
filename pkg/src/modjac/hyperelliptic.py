"""Verification of genus-2 models: point counts, local factors and Igusa invariants.

Igusa-Clebsch invariants come from the classical transvectant construction
on the binary sextic f(x, y) = y^6 F(x/y) (degree-5 F is treated as a sextic
with a root at infinity).  The absolute invariants are

    i1 = I2^5 / I10,   i2 = I2^3 I4 / I10,   i3 = I2^2 I6 / I10.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, gcd

import mpmath
import numpy as np

from .errors import BadPrime, BadReduction, PrecisionLoss, SingularCurve
from .exact import RationalPolynomial
from .modsym import NewformClass, primes_up_to, qnorm, qtrace
from .theta import EVEN_CHARACTERISTICS, even_thetanullwerte


# ---------------------------------------------------------------------------
# point counting

def _reduce(f: RationalPolynomial, p: int) -> list[int]:
    out = []
    for c in f.coeffs:
        if c.denominator % p == 0:
            raise BadReduction(f"coefficient {c} is not {p}-integral")
        out.append(c.numerator * pow(c.denominator, -1, p) % p)
    return out


def is_good_prime(f: RationalPolynomial, p: int) -> bool:
    if p == 2 or f.degree not in (5, 6):
        return False
    if any(c.denominator % p == 0 for c in f.coeffs):
        return False
    if f.lc.numerator % p == 0:
        return False
    disc = f.discriminant()
    return disc != 0 and disc.numerator % p != 0


def _square_table(p: int) -> np.ndarray:
    chi = -np.ones(p, dtype=np.int64)
    chi[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
    chi[0] = 0
    return chi


def count_points(f: RationalPolynomial, p: int) -> int:
    """Points of the smooth projective model of y^2 = f(x) over F_p."""
    if not is_good_prime(f, p):
        raise BadReduction(f"bad reduction at {p}")
    c = _reduce(f, p)
    x = np.arange(p, dtype=np.int64)
    v = np.zeros(p, dtype=np.int64)
    for a in reversed(c):
        v = (v * x + a) % p
    chi = _square_table(p)
    affine = int(p + chi[v].sum())
    if f.degree == 5:
        return affine + 1
    return affine + 1 + int(chi[c[-1]])


def count_points_p2(f: RationalPolynomial, p: int) -> int:
    """Points over F_{p^2} = F_p[t]/(t^2 - n) with n a non-residue."""
    if not is_good_prime(f, p):
        raise BadReduction(f"bad reduction at {p}")
    c = _reduce(f, p)
    chi = _square_table(p)
    n = next(k for k in range(2, p) if chi[k] == -1)
    a = np.repeat(np.arange(p, dtype=np.int64), p)
    b = np.tile(np.arange(p, dtype=np.int64), p)
    va = np.zeros(p * p, dtype=np.int64)
    vb = np.zeros(p * p, dtype=np.int64)
    for co in reversed(c):
        va, vb = (va * a + n * (vb * b % p) + co) % p, (va * b + vb * a) % p
    norm = (va * va - n * (vb * vb % p)) % p
    affine = int(p * p + chi[norm].sum())
    return affine + (1 if f.degree == 5 else 2)


# ---------------------------------------------------------------------------
# local factors

@dataclass(frozen=True)
class LocalFactor:
    """x^4 - s1 x^3 + s2 x^2 - p s1 x + p^2, stored high degree first."""

    p: int
    coefficients: tuple

    @classmethod
    def from_traces(cls, p: int, s1: int, s2: int) -> "LocalFactor":
        return cls(p, (1, -s1, s2, -p * s1, p * p))

    @property
    def s1(self) -> int:
        return -self.coefficients[1]

    @property
    def s2(self) -> int:
        return self.coefficients[2]

    def root_moduli(self):
        roots = np.roots(np.array(self.coefficients, dtype=float))
        return [abs(r) for r in roots]


def frobenius_local_factor(cls: NewformClass, p: int) -> LocalFactor:
    if cls.level % p == 0:
        raise BadPrime(f"{p} divides the level {cls.level}")
    ap = cls.eigenvalue(p)
    s1 = qtrace(ap)
    s2 = qnorm(ap, cls.radicand) + 2 * p
    if s1.denominator != 1 or s2.denominator != 1:
        raise ArithmeticError(f"a_{p} is not an algebraic integer")
    return LocalFactor.from_traces(p, int(s1), int(s2))


def curve_local_factor(f: RationalPolynomial, p: int) -> LocalFactor:
    n1 = count_points(f, p)
    n2 = count_points_p2(f, p)
    s1 = p + 1 - n1
    twice = n2 - p * p - 1 + s1 * s1
    if twice % 2:
        raise ArithmeticError("inconsistent point counts")
    return LocalFactor.from_traces(p, s1, twice // 2)


# ---------------------------------------------------------------------------
# Igusa invariants via transvectants of binary forms

def _binary(f: RationalPolynomial, n: int = 6) -> dict:
    return {(i, n - i): f[i] for i in range(n + 1) if f[i]}


def _deriv(form: dict, kx: int, ky: int) -> dict:
    out = {}
    for (i, j), c in form.items():
        if i < kx or j < ky:
            continue
        m = c
        for t in range(kx):
            m *= i - t
        for t in range(ky):
            m *= j - t
        key = (i - kx, j - ky)
        out[key] = out.get(key, 0) + m
    return out


def _mul(f: dict, g: dict) -> dict:
    out = {}
    for (i, j), c in f.items():
        for (k, l), d in g.items():
            key = (i + k, j + l)
            out[key] = out.get(key, 0) + c * d
    return out


def _degree(form: dict, default: int) -> int:
    for (i, j) in form:
        return i + j
    return default


def _transvectant(f: dict, m: int, g: dict, n: int, k: int) -> dict:
    out = {}
    for j in range(k + 1):
        term = _mul(_deriv(f, k - j, j), _deriv(g, j, k - j))
        coeff = (-1) ** j * comb(k, j)
        for key, c in term.items():
            out[key] = out.get(key, 0) + coeff * c
    scale = Fraction(factorial(m - k) * factorial(n - k), factorial(m) * factorial(n))
    return {key: c * scale for key, c in out.items() if c}


def _scalar(form: dict):
    return form.get((0, 0), 0)


def igusa_clebsch(f: RationalPolynomial):
    """(I2, I4, I6, I10) of the sextic attached to f (any coefficient ring)."""
    s = _binary(f)
    i = _transvectant(s, 6, s, 6, 4)           # quartic covariant
    delta = _transvectant(i, 4, i, 4, 2)
    y1 = _transvectant(s, 6, i, 4, 4)           # quadratic
    y2 = _transvectant(i, 4, y1, 2, 2)
    y3 = _transvectant(i, 4, y2, 2, 2)
    a = _scalar(_transvectant(s, 6, s, 6, 6))
    b = _scalar(_transvectant(i, 4, i, 4, 4))
    c = _scalar(_transvectant(i, 4, delta, 4, 4))
    d = _scalar(_transvectant(y3, 2, y1, 2, 2))
    i2 = -120 * a
    i4 = -720 * a ** 2 + 6750 * b
    i6 = 8640 * a ** 3 - 108000 * a * b + 202500 * c
    i10 = (-62208 * a ** 5 + 972000 * a ** 3 * b + 1620000 * a ** 2 * c
           - 3037500 * a * b ** 2 - 6075000 * b * c - 4556250 * d)
    return i2, i4, i6, i10


@dataclass(frozen=True)
class IgusaInvariants:
    i1: object
    i2: object
    i3: object

    def as_tuple(self):
        return (self.i1, self.i2, self.i3)

    def close_to(self, other: "IgusaInvariants", rel: float) -> bool:
        for x, y in zip(self.as_tuple(), other.as_tuple()):
            scale = max(abs(complex(x)), abs(complex(y)), 1.0)
            if abs(complex(x) - complex(y)) > rel * scale:
                return False
        return True


def _absolute(i2, i4, i6, i10) -> IgusaInvariants:
    return IgusaInvariants(i2 ** 5 / i10, i2 ** 3 * i4 / i10, i2 ** 2 * i6 / i10)


def igusa_algebraic(f: RationalPolynomial) -> IgusaInvariants:
    if f.degree not in (5, 6) or f.discriminant() == 0:
        raise SingularCurve("F must be squarefree of degree 5 or 6")
    i2, i4, i6, i10 = igusa_clebsch(f)
    return _absolute(Fraction(i2), Fraction(i4), Fraction(i6), Fraction(i10))


def rosenhain_invariants(zmat, target_error=None):
    """(lambda, mu, nu) with Jac(y^2 = x(x-1)(x-lambda)(x-mu)(x-nu)) having period matrix Z."""
    t = {(c.a, c.b): v.value for c, v in zip(EVEN_CHARACTERISTICS, even_thetanullwerte(zmat, target_error))}
    t0, t1, t2, t3 = (t[(0, 0), b] for b in ((0, 0), (0, 1), (1, 0), (1, 1)))
    x, y = t[(1, 0), (0, 0)], t[(1, 0), (0, 1)]
    lam = (t0 * t2 / (t1 * t3)) ** 2
    mu = (t2 * x / (t3 * y)) ** 2
    nu = (t0 * x / (t1 * y)) ** 2
    return lam, mu, nu


def igusa_from_theta(zmat, target_error=None) -> IgusaInvariants:
    prec = getattr(zmat, "precision", mpmath.mp.prec)
    with mpmath.workprec(prec + 32):
        lam, mu, nu = rosenhain_invariants(zmat, target_error)
        x = [mpmath.mpc(1), mpmath.mpc(0)]       # ascending coefficients of x
        prod_ = [mpmath.mpc(0), mpmath.mpc(1)]
        for r in (1, lam, mu, nu):
            nxt = [mpmath.mpc(0)] * (len(prod_) + 1)
            for k, c in enumerate(prod_):
                nxt[k + 1] += c
                nxt[k] -= r * c
            prod_ = nxt
        f = _NumPoly(prod_ + [mpmath.mpc(0)])
        i2, i4, i6, i10 = igusa_clebsch(f)
        if abs(i10) == 0:
            raise PrecisionLoss("vanishing discriminant from thetanullwerte")
        return _absolute(i2, i4, i6, i10)


class _NumPoly:
    """Minimal stand-in for RationalPolynomial with numerical coefficients."""

    def __init__(self, coeffs):
        self.coeffs = list(coeffs)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0


# ---------------------------------------------------------------------------
# comparison of models

_WEIGHTS = (1, 2, 3, 5)


def weighted_equal(u, v) -> bool:
    """(I2, I4, I6, I10) tuples equal as points of weighted projective space."""
    if any((x == 0) != (y == 0) for x, y in zip(u, v)):
        return False
    for a in range(4):
        for b in range(a + 1, 4):
            if u[a] ** _WEIGHTS[b] * v[b] ** _WEIGHTS[a] != v[a] ** _WEIGHTS[b] * u[b] ** _WEIGHTS[a]:
                return False
    return True


def models_isomorphic_Q(f: RationalPolynomial, g: RationalPolynomial, prime_samples: int = 20,
                        max_prime: int = 2000) -> str:
    """'yes' | 'no' | 'undetermined' for y^2 = f versus y^2 = g over Q."""
    if not weighted_equal(igusa_clebsch(f), igusa_clebsch(g)):
        return "no"
    good = 0
    for p in primes_up_to(max_prime):
        if not (is_good_prime(f, p) and is_good_prime(g, p)):
            continue
        if count_points(f, p) != count_points(g, p):
            return "no"
        good += 1
        if good >= max(prime_samples, 20):
            return "yes"
    return "undetermined"
