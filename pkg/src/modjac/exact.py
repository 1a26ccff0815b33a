"""Exact arithmetic: integer matrices, normal forms, rational polynomials and
rational reconstruction.

Integer matrices are plain ``list[list[int]]`` (row-major); every routine
returns fresh lists and never mutates its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
import re
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import mpmath

from .errors import NoRationalFound, NotAlternating, NotPrincipal

Rational = Fraction
IntegerMatrix = list  # list[list[int]]


# ---------------------------------------------------------------------------
# integer matrices

def identity(n: int) -> IntegerMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(r) for r in zip(*m)]


def mat_mul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(m, v):
    return [sum(x * y for x, y in zip(row, v)) for row in m]


def standard_symplectic(g: int = 2) -> IntegerMatrix:
    """J = [[0, I], [-I, 0]]."""
    n = 2 * g
    j = [[0] * n for _ in range(n)]
    for i in range(g):
        j[i][g + i] = 1
        j[g + i][i] = -1
    return j


def det(m) -> Fraction:
    """Determinant by fraction-free Gaussian elimination (exact)."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    a = [[Fraction(x) for x in row] for row in m]
    sign = 1
    d = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        d *= a[k][k]
        for i in range(k + 1, n):
            if a[i][k]:
                f = a[i][k] / a[k][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return sign * d


def smith_normal_form(m):
    """Return ``(U, D, V)`` with ``U*m*V == D`` diagonal, d_i | d_{i+1}, d_i >= 0.

    Pivots are chosen by minimal absolute value, which keeps entries small for
    the tiny matrices met here.
    """
    a = [list(map(int, r)) for r in m]
    nr, nc = len(a), len(a[0]) if a else 0
    u, v = identity(nr), identity(nc)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):
        for r in a:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    for t in range(min(nr, nc)):
        while True:
            cands = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
            if not cands:
                break
            _, i, j = min(cands)
            swap_rows(t, i)
            swap_cols(t, j)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    dirty |= a[i][t] != 0
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    dirty |= a[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, nr)
                        if any(a[i][j] % p for j in range(t + 1, nc))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return u, a, v


def elementary_divisors(m) -> list[int]:
    _, d, _ = smith_normal_form(m)
    return [d[i][i] for i in range(min(len(d), len(d[0])))]


def hnf_rows(vectors: Iterable[Sequence[int]]) -> list[list[int]]:
    """Row Hermite basis of the Z-span of ``vectors`` (zero rows dropped)."""
    rows = [list(map(int, v)) for v in vectors]
    rows = [r for r in rows if any(r)]
    if not rows:
        return []
    n = len(rows[0])
    out = []
    col = 0
    while rows and col < n:
        nz = [r for r in rows if r[col]]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                q = r[col] // p[col]
                r[:] = [x - q * y for x, y in zip(r, p)]
            nz = [r for r in nz if r[col]]
        p = nz[0]
        if p[col] < 0:
            p[:] = [-x for x in p]
        rows = [r for r in rows if r is not p and any(r)]
        for r in out:
            q = r[col] // p[col]
            r[:] = [x - q * y for x, y in zip(r, p)]
        out.append(p)
        col += 1
    return out


def _pair(e, x, y):
    return sum(x[i] * e[i][j] * y[j] for i in range(len(x)) for j in range(len(y)) if x[i] and y[j])


def symplectic_reduce(e) -> IntegerMatrix:
    """Unimodular ``T`` with ``T^T e T == J`` for a principal alternating form ``e``.

    Works in dimension 2g; columns of ``T`` are (e_1..e_g, f_1..f_g).
    """
    n = len(e)
    if any(e[i][j] != -e[j][i] for i in range(n) for j in range(n)):
        raise NotAlternating("form is not alternating")
    if n % 2 or any(d != 1 for d in elementary_divisors(e)):
        raise NotPrincipal(f"elementary divisors {elementary_divisors(e)}")
    basis = [[int(i == j) for j in range(n)] for i in range(n)]
    es, fs = [], []
    while basis:
        # first basis vector pairs to a primitive row (form is unimodular on the complement)
        u = basis[0]
        row = [_pair(e, u, b) for b in basis]
        # extended gcd combination of basis vectors with pairing 1
        coeffs = _bezout(row)
        w = [sum(c * b[k] for c, b in zip(coeffs, basis)) for k in range(n)]
        assert _pair(e, u, w) == 1
        es.append(u)
        fs.append(w)
        proj = []
        for b in basis:
            a1 = _pair(e, b, w)
            a2 = _pair(e, b, u)
            proj.append([b[k] - a1 * u[k] + a2 * w[k] for k in range(n)])
        basis = hnf_rows(proj)
    cols = es + fs
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _bezout(vals):
    """Integers c with sum(c_i * vals_i) == 1; raises NotPrincipal if gcd != 1."""
    coeffs = [0] * len(vals)
    g = 0
    for i, v in enumerate(vals):
        if v == 0:
            continue
        if g == 0:
            g, coeffs[i] = abs(v), (1 if v > 0 else -1)
            continue
        d, x, y = _xgcd(g, v)
        coeffs = [c * x for c in coeffs]
        coeffs[i] = y
        g = d
    if g != 1:
        raise NotPrincipal("form is not unimodular")
    return coeffs


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# rational reconstruction

def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, mpmath.mpf):
        sign, man, exp, _ = x._mpf_
        if not man and exp:
            raise ValueError(f"cannot convert {x} to a fraction")
        return Fraction((-1) ** sign * int(man)) * (Fraction(2) ** int(exp))
    if isinstance(x, mpmath.mpc):
        return _to_fraction(x.real)
    if isinstance(x, (float, str)):
        return Fraction(x)
    return _to_fraction(mpmath.mpf(x))


def convergents(x) -> Iterable[Fraction]:
    """Continued-fraction convergents of ``x`` (exact, terminates for rational input)."""
    r = _to_fraction(x)
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        a = r.numerator // r.denominator
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        yield Fraction(p1, q1)
        frac = r - a
        if frac == 0:
            return
        r = 1 / frac


def rationalize(x, height_bound: int, tol=None) -> Fraction:
    """Best continued-fraction convergent ``p/q`` of ``x`` with ``|p|, q <= height_bound``.

    Without ``tol`` the last convergent under the height bound is returned and
    must satisfy Legendre's criterion ``|x - p/q| < 1/(2 q^2)``.  With ``tol`` the
    first convergent within ``tol`` of ``x`` is returned.
    """
    xf = _to_fraction(x)
    if tol is not None:
        # smallest-height convergent inside the tolerance
        t = _to_fraction(mpmath.mpf(tol)) if not isinstance(tol, (int, Fraction)) else Fraction(tol)
        for c in convergents(xf):
            if c.denominator > height_bound or abs(c.numerator) > height_bound:
                break
            if abs(xf - c) <= t:
                return c
        raise NoRationalFound(f"no rational of height <= {height_bound} within {float(t):.3g}")
    best = None
    for c in convergents(xf):
        if c.denominator > height_bound or abs(c.numerator) > height_bound:
            break
        best = c
        if c == xf:
            break
    if best is None:
        raise NoRationalFound(f"no convergent of height <= {height_bound}")
    err = abs(xf - best)
    if err and err >= Fraction(1, 2 * best.denominator ** 2):
        raise NoRationalFound(f"best candidate {best} is off by {float(err):.3g}")
    return best


# ---------------------------------------------------------------------------
# rational polynomials

def _frac_tuple(coeffs) -> tuple:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial over Q, coefficients in ascending degree."""

    coeffs: tuple

    def __init__(self, coeffs=()):
        object.__setattr__(self, "coeffs", _frac_tuple(coeffs))

    @classmethod
    def x(cls):
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def is_zero(self):
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __call__(self, t):
        acc = 0 * t
        for c in reversed(self.coeffs):
            acc = acc * t + (c if isinstance(t, (int, Fraction)) else _lift(c, t))
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial([self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial([c * other for c in self.coeffs])
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = RationalPolynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other):
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [Fraction(0)] * max(len(r) - other.degree, 1)
        while len(r) - 1 >= other.degree and any(r):
            k = len(r) - 1 - other.degree
            f = r[-1] / other.lc
            q[k] = f
            for i, c in enumerate(other.coeffs):
                r[i + k] -= f * c
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return RationalPolynomial(q), RationalPolynomial(r)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def derivative(self):
        return RationalPolynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def monic(self):
        return self * (1 / self.lc)

    def compose(self, other):
        other = _as_poly(other)
        acc = RationalPolynomial()
        for c in reversed(self.coeffs):
            acc = acc * other + RationalPolynomial([c])
        return acc

    def mobius(self, a, b, c, d, n: int = 6):
        """Binary-form substitution: (c x + d)^n F((a x + b)/(c x + d))."""
        num = RationalPolynomial([b, a])
        den = RationalPolynomial([d, c])
        acc = RationalPolynomial()
        for i, coef in enumerate(self.coeffs):
            if coef:
                acc = acc + (num ** i) * (den ** (n - i)) * coef
        return acc

    def reversed(self, n: int = 6):
        """x^n F(1/x)."""
        return self.mobius(0, 1, 1, 0, n)

    def is_odd(self):
        return all(c == 0 for i, c in enumerate(self.coeffs) if i % 2 == 0)

    def content_numerators(self):
        return [c.numerator for c in self.coeffs if c]

    def is_integral(self):
        return all(c.denominator == 1 for c in self.coeffs)

    def discriminant(self) -> Fraction:
        """(-1)^(d(d-1)/2) Res(F, F') / lc(F)."""
        d = self.degree
        if d < 1:
            return Fraction(0)
        r = resultant(self, self.derivative())
        return (-1) ** (d * (d - 1) // 2) * r / self.lc

    def is_squarefree(self):
        return poly_gcd(self, self.derivative()).degree == 0

    def __str__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mon = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mon and abs(c) == 1:
                s = ("-" if c < 0 else "+") + mon
            else:
                s = ("-" if c < 0 else "+") + str(abs(c)) + ("*" + mon if mon else "")
            terms.append(s)
        if not terms:
            return "0"
        out = " ".join(terms)
        return out[1:] if out.startswith("+") else out

    __repr__ = __str__


_TERM = re.compile(r"\s*([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*(x(?:\s*\^\s*(\d+))?)?\s*")


def parse_polynomial(text: str) -> RationalPolynomial:
    """Read ``-3*x^6 + 162x^3 + 81`` (or ``y^2 = ...``) as a rational polynomial.

    A bare whitespace-separated list of rationals is taken as ascending coefficients.
    """
    from .errors import ParseError
    body = text.strip()
    if "=" in body:
        body = body.split("=", 1)[1]
    body = body.replace("**", "^").strip()
    if not body:
        raise ParseError("empty polynomial")
    if "x" not in body and len(body.split()) > 1:
        try:
            return RationalPolynomial([Fraction(t) for t in body.split()])
        except ValueError as exc:
            raise ParseError(f"bad coefficient list {body!r}") from exc
    coeffs: dict[int, Fraction] = {}
    pos = 0
    while pos < len(body):
        m = _TERM.match(body, pos)
        if not m or m.end() == pos or not (m.group(2) or m.group(3)):
            raise ParseError(f"cannot parse polynomial at {body[pos:]!r}")
        c = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(1) == "-":
            c = -c
        deg = 0 if not m.group(3) else int(m.group(4) or 1)
        coeffs[deg] = coeffs.get(deg, Fraction(0)) + c
        pos = m.end()
        if pos < len(body) and body[pos] not in "+-":
            raise ParseError(f"expected a sign at {body[pos:]!r}")
    top = max(coeffs)
    return RationalPolynomial([coeffs.get(i, 0) for i in range(top + 1)])


def _lift(c: Fraction, like):
    if isinstance(like, (mpmath.mpf, mpmath.mpc)):
        return mpmath.mpf(c.numerator) / c.denominator
    if isinstance(like, (float, complex)):
        return float(c)
    return c


def _as_poly(p):
    return p if isinstance(p, RationalPolynomial) else RationalPolynomial([p])


def poly_gcd(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def resultant(f: RationalPolynomial, g: RationalPolynomial) -> Fraction:
    """Resultant via the Euclidean remainder sequence."""
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    res = Fraction(1)
    while True:
        m, n = f.degree, g.degree
        if n == 0:
            return res * g.lc ** m
        r = f % g
        if r.is_zero():
            return Fraction(0)
        # Res(f, g) = (-1)^(mn) lc(g)^(m - deg r) Res(g, r)
        res *= (-1) ** (m * n) * g.lc ** (m - r.degree)
        f, g = g, r


def charpoly(m) -> RationalPolynomial:
    """Characteristic polynomial det(xI - m) by the Faddeev-LeVerrier recursion."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k)/k
        for i in range(n):
            mk[i][i] += coeffs[n - k + 1]
        am = [[sum(a[i][l] * mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(am[i][i] for i in range(n)) / k
        mk = am
    return RationalPolynomial(coeffs)


def mat_poly(p: RationalPolynomial, m):
    """Evaluate a polynomial at a square matrix (Horner)."""
    n = len(m)
    acc = [[Fraction(0)] * n for _ in range(n)]
    for c in reversed(p.coeffs):
        acc = mat_mul(acc, m)
        for i in range(n):
            acc[i][i] += c
    return acc


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b if a and b else abs(a or b)


def squarefree_part(n: int) -> int:
    """The squarefree s with n = s * m^2 (sign kept)."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    s = 1
    p = 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
        if n % p == 0:
            s *= p
            n //= p
        p += 1
    return sign * s * n
