"""Periods of the differentials f1 dq/q, f2 dq/q over H_1(A_f, Z).

A loop in X_0(N) is given by gamma = [[a, b], [cN, d]] in Gamma_0(N); its class
is the modular symbol {0, gamma(0)} and its period is the integral of
f dq/q from tau0 to gamma(tau0), which we evaluate on the truncated
q-expansion at tau0 = (-d + i)/(cN), where both endpoints have imaginary
part 1/(cN).

Rows of the big period matrix are ordered (f2, f1): the form of higher
q-order comes first, so that it plays the role of dx/y in the reconstructed
model and f1 that of x dx/y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, gcd, log, pi
from pathlib import Path

import mpmath
import numpy as np

from . import exact
from .errors import (InsufficientEigenvalues, NotPrincipal, ParseError,
                     PrecisionLoss, SingularOmega1)
from .modsym import (Coordinates, HomologyLattice, NewformClass, _to_int_rows,
                     is_principally_polarized, qmul, qmat, _fq)

ComplexNumber = mpmath.mpc

# index into (f1, f2) for each row of omega
DIFFERENTIAL_ORDER = (1, 0)


def _mpq(x):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


# ---------------------------------------------------------------------------
# q-expansions

def hecke_coefficients(cls: NewformClass, n_terms: int) -> list:
    """a_n for 0 <= n <= n_terms as pairs (u, v), a_n = u + v sqrt(D)."""
    d = cls.radicand
    zero, one = (Fraction(0), Fraction(0)), (Fraction(1), Fraction(0))
    spf = list(range(n_terms + 1))
    for p in range(2, int(n_terms ** 0.5) + 1):
        if spf[p] == p:
            for m in range(p * p, n_terms + 1, p):
                if spf[m] == m:
                    spf[m] = p
    a = [zero] * (n_terms + 1)
    if n_terms >= 1:
        a[1] = one
    for n in range(2, n_terms + 1):
        p = spf[n]
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        if m > 1:
            a[n] = qmul(a[p ** k], a[m], d)
            continue
        ap = cls.eigenvalue(p)
        if k == 1:
            a[n] = (Fraction(ap[0]), Fraction(ap[1]))
        elif cls.level % p == 0:
            a[n] = qmul(ap, a[n // p], d)
        else:
            x = qmul(ap, a[n // p], d)
            y = a[n // (p * p)]
            a[n] = (x[0] - p * y[0], x[1] - p * y[1])
    return a


@dataclass(frozen=True)
class EigenformBasis:
    """Integral basis (f1, f2) of <f, sigma f>; ``coefficients[i][n]`` is the q^n coefficient."""

    cls: NewformClass = field(repr=False)
    coefficients: tuple
    n_terms: int
    # f_i = sum_j change[i][j] * (U, V)_j where a_n = U_n + V_n sqrt(D)
    change: tuple = ()

    def embedding_weights(self, conjugate: bool = False):
        """(x, y) with f = x f1 + y f2 as complex numbers (or sigma f with ``conjugate``)."""
        c = self.change
        s = mpmath.sqrt(self.cls.radicand) * (-1 if conjugate else 1)
        det = c[0][0] * c[1][1] - c[0][1] * c[1][0]
        # (U, V) = change^{-1} (f1, f2); f = U + s V
        inv = [[c[1][1] / det, -c[0][1] / det], [-c[1][0] / det, c[0][0] / det]]
        return [_mpq(inv[0][k]) + s * _mpq(inv[1][k]) for k in range(2)]


def integral_basis(cls: NewformClass, n_terms: int) -> EigenformBasis:
    if n_terms < 2:
        raise ValueError("n_terms must be at least 2")
    a = hecke_coefficients(cls, n_terms)
    rows = [[x[0] for x in a], [x[1] for x in a]]
    # saturate the Q-span of U, V inside Z^(n_terms+1)
    (r1, r2), den = _to_int_rows(rows)
    lat = [[1, 0], [0, 1]]
    if den != 1:
        for k in range(n_terms + 1):
            c1 = (lat[0][0] * r1[k] + lat[0][1] * r2[k]) % den
            c2 = (lat[1][0] * r1[k] + lat[1][1] * r2[k]) % den
            if c1 == 0 and c2 == 0:
                continue
            # sublattice {(x, y) : x c1 + y c2 = 0 mod den}
            sub = _kernel_mod(c1, c2, den)
            lat = exact.mat_mul(sub, lat)
    vecs = [[lat[i][0] * r1[k] + lat[i][1] * r2[k] for k in range(n_terms + 1)] for i in range(2)]
    assert all(x % den == 0 for v in vecs for x in v)
    vecs = [[x // den for x in v] for v in vecs]
    # echelon form with positive pivots and reduced entries above them
    h, u = _hnf2(vecs)
    change = tuple(tuple(sum(Fraction(u[i][k]) * lat[k][j] for k in range(2)) for j in range(2))
                   for i in range(2))
    return EigenformBasis(cls=cls, coefficients=(tuple(h[0]), tuple(h[1])), n_terms=n_terms,
                          change=change)


def _kernel_mod(c1: int, c2: int, m: int):
    """Basis (rows) of {(x, y) in Z^2 : x c1 + y c2 = 0 mod m}."""
    from .modsym import integer_kernel
    ker = integer_kernel([[c1, c2, m]])
    return exact.hnf_rows([[r[0], r[1]] for r in ker])[:2]


def _hnf2(vecs):
    """Row echelon form of two integer rows, with the unimodular transform."""
    u = [[1, 0], [0, 1]]
    v = [list(x) for x in vecs]
    piv = next(k for k in range(len(v[0])) if v[0][k] or v[1][k])
    g, x, y = exact._xgcd(v[0][piv], v[1][piv])
    a, b = v[0][piv] // g, v[1][piv] // g
    t = [[x, y], [-b, a]]
    v = exact.mat_mul(t, v)
    u = exact.mat_mul(t, u)
    piv2 = next(k for k in range(len(v[1])) if v[1][k])
    if v[1][piv2] < 0:
        v[1] = [-z for z in v[1]]
        u[1] = [-z for z in u[1]]
    q = v[0][piv2] // v[1][piv2]
    v[0] = [p - q * r for p, r in zip(v[0], v[1])]
    u[0] = [p - q * r for p, r in zip(u[0], u[1])]
    return v, u


# ---------------------------------------------------------------------------
# loop periods

def terms_needed(height: float, precision: int) -> int:
    """Truncation length for sum a_n/n q^n at |q| = exp(-2 pi height).

    Uses |a_n| <= d(n) sqrt(n) <= 2n, so the tail after M terms is below
    2 e^{-2 pi M h} / (1 - e^{-2 pi h}).
    """
    r = 2 * pi * height
    target = precision * log(2) + log(2.0 / (1 - np_exp(-r))) + 3
    return int(ceil(target / r)) + 1


def np_exp(x):
    return float(np.exp(x))


def _loop_series(coeffs, gamma, prec: int):
    a, b, c, d = gamma
    with mpmath.workprec(prec + 32):
        tau0 = mpmath.mpc(-d, 1) / c
        tau1 = mpmath.mpc(a, 1) / c
        q0 = mpmath.expjpi(2 * tau0)
        q1 = mpmath.expjpi(2 * tau1)
        out = []
        for f in coeffs:
            s = mpmath.mpc(0)
            p0 = p1 = mpmath.mpc(1)
            for n in range(1, len(f)):
                p0 *= q0
                p1 *= q1
                if f[n]:
                    s += mpmath.mpf(f[n]) / n * (p1 - p0)
            out.append(s)
    return out


class _PeriodEngine:
    """Chooses loops spanning the class and integrates the basis over them."""

    def __init__(self, cls: NewformClass):
        self.cls = cls
        space = cls.space
        eng = cls._engine
        self.loops, self.images = [], []
        rank = 0
        for gam in space.gamma0_elements(64):
            v = space.symbol_of_matrix(gam)
            img = _project(eng, v)
            trial = self.images + [img]
            r = qmat(trial).rank()
            if r > rank:
                rank = r
                self.loops.append(gam)
                self.images.append(img)
            if rank == 4:
                break
        if rank != 4:
            raise RuntimeError("loops do not span the class")
        self.coords = Coordinates(self.images)
        self.height = min(Fraction(1, g[2]) for g in self.loops)
        self._cache = {}

    def loop_periods(self, basis: EigenformBasis, prec: int):
        key = (basis.n_terms, prec)
        if key not in self._cache:
            need = terms_needed(float(self.height), prec)
            if basis.n_terms < need:
                raise PrecisionLoss(f"need {need} q-expansion terms, have {basis.n_terms}")
            coeffs = [c[:need + 1] for c in basis.coefficients]
            self._cache[key] = [_loop_series(coeffs, g, prec) for g in self.loops]
        return self._cache[key]


def _project(eng, v):
    pm = qmat(eng.proj)
    return [_fq(x) for x in (qmat([v]) * pm).tolist()[0]]


def _engine_for(cls: NewformClass) -> _PeriodEngine:
    eng = getattr(cls, "_period_engine", None)
    if eng is None:
        eng = _PeriodEngine(cls)
        cls._period_engine = eng
    return eng


def required_terms(cls: NewformClass, precision: int) -> int:
    return terms_needed(float(_engine_for(cls).height), precision)


def period_integral(basis: EigenformBasis, symbol, precision: int):
    """(integral of f1 dq/q, integral of f2 dq/q) over an ambient cuspidal vector."""
    eng = _engine_for(basis.cls)
    if not any(symbol):
        return [mpmath.mpc(0), mpmath.mpc(0)]
    img = _project(basis.cls._engine, symbol)
    c = eng.coords(img)
    if c is None:
        raise ValueError("symbol is not in the span of the class")
    per = eng.loop_periods(basis, precision)
    with mpmath.workprec(precision + 32):
        return [sum((_mpq(cj) * per[j][i] for j, cj in enumerate(c) if cj), mpmath.mpc(0))
                for i in range(2)]


# ---------------------------------------------------------------------------
# period matrices

@dataclass
class BigPeriodMatrix:
    omega1: mpmath.matrix
    omega2: mpmath.matrix
    symplectic_basis: list          # columns in lattice coordinates (A_1, A_2, B_1, B_2)
    precision: int

    def __post_init__(self):
        with mpmath.workprec(self.precision):
            if abs(mpmath.det(self.omega1)) == 0:
                raise SingularOmega1("det(omega1) = 0")

    def act(self, m) -> "BigPeriodMatrix":
        """Change of symplectic basis by an integral symplectic 4x4 matrix m."""
        with mpmath.workprec(self.precision + 32):
            full = mpmath.matrix(2, 4)
            for i in range(2):
                for j in range(2):
                    full[i, j] = self.omega1[i, j]
                    full[i, j + 2] = self.omega2[i, j]
            mm = mpmath.matrix([[int(x) for x in r] for r in m])
            new = full * mm
            o1 = mpmath.matrix([[new[i, j] for j in range(2)] for i in range(2)])
            o2 = mpmath.matrix([[new[i, j + 2] for j in range(2)] for i in range(2)])
        return BigPeriodMatrix(o1, o2, exact.mat_mul(self.symplectic_basis, m), self.precision)


@dataclass
class SmallPeriodMatrix:
    z: mpmath.matrix
    precision: int
    symmetry_defect: mpmath.mpf = mpmath.mpf(0)

    def imag_min_eigenvalue(self):
        with mpmath.workprec(self.precision):
            y = mpmath.matrix([[self.z[i, j].imag for j in range(2)] for i in range(2)])
            ev = mpmath.eigsy(y)[0]
            return min(ev[0], ev[1])


def small_period_matrix(omega: BigPeriodMatrix) -> SmallPeriodMatrix:
    with mpmath.workprec(omega.precision + 16):
        if abs(mpmath.det(omega.omega1)) == 0:
            raise SingularOmega1("det(omega1) = 0")
        z = mpmath.inverse(omega.omega1) * omega.omega2
        defect = abs(z[0, 1] - z[1, 0])
        zs = mpmath.matrix(2, 2)
        for i in range(2):
            for j in range(2):
                zs[i, j] = (z[i, j] + z[j, i]) / 2
    return SmallPeriodMatrix(zs, omega.precision, defect)


def _imag_pd(z) -> bool:
    y11, y12, y22 = z[0, 0].imag, (z[0, 1].imag + z[1, 0].imag) / 2, z[1, 1].imag
    return y11 > 0 and y11 * y22 - y12 * y12 > 0


def big_period_matrix(cls: NewformClass, lattice: HomologyLattice, precision: int = 128,
                      basis: EigenformBasis | None = None, reduce: bool = True) -> BigPeriodMatrix:
    form = lattice.intersection
    if not is_principally_polarized(form):
        raise NotPrincipal(f"{cls.label}: elementary divisors {form.elementary_divisors()}")
    if basis is None:
        basis = integral_basis(cls, required_terms(cls, precision))
    t = exact.symplectic_reduce(form.primitive)
    per = [period_integral(basis, v, precision) for v in lattice.basis]
    with mpmath.workprec(precision + 16):
        def omega_for(tt):
            cols = []
            for j in range(4):
                cols.append([sum((tt[k][j] * per[k][i] for k in range(4) if tt[k][j]), mpmath.mpc(0))
                             for i in DIFFERENTIAL_ORDER])
            o1 = mpmath.matrix([[cols[j][i] for j in range(2)] for i in range(2)])
            o2 = mpmath.matrix([[cols[j + 2][i] for j in range(2)] for i in range(2)])
            return o1, o2

        o1, o2 = omega_for(t)
        z = mpmath.inverse(o1) * o2
        if not _imag_pd(z):
            # the pairing sign is a global convention: swap to the opposite orientation
            t = [[r[0], r[1], -r[2], -r[3]] for r in t]
            o1, o2 = omega_for(t)
            z = mpmath.inverse(o1) * o2
            if not _imag_pd(z):
                raise PrecisionLoss("Im(Z) is not positive definite in either orientation")
    big = BigPeriodMatrix(o1, o2, t, precision)
    return reduce_period_matrix(big) if reduce else big


# ---------------------------------------------------------------------------
# reduction of Z into a neighbourhood of the Siegel fundamental domain

def _sym_block(a, b, c, d):
    m = [[0] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            m[i][j], m[i][j + 2] = a[i][j], b[i][j]
            m[i + 2][j], m[i + 2][j + 2] = c[i][j], d[i][j]
    return m


def _is_symplectic(m) -> bool:
    j = exact.standard_symplectic(2)
    return exact.mat_mul(exact.mat_mul(exact.transpose(m), j), m) == j


def reduce_period_matrix(big: BigPeriodMatrix, max_steps: int = 100) -> BigPeriodMatrix:
    """Move Z = omega1^{-1} omega2 towards the fundamental domain by the right action of Sp_4(Z).

    Under omega -> omega * M, Z -> (A + Z C)^{-1} (B + Z D) for M = [[A, B], [C, D]].
    """
    cur = big
    for _ in range(max_steps):
        z = small_period_matrix(cur).z
        # reduce Im Z by a unimodular change: Z -> V^T Z V with M = diag(V^{-T}... )
        y11, y12, y22 = float(z[0, 0].imag), float(z[0, 1].imag), float(z[1, 1].imag)
        v = _lagrange_reduce(y11, y12, y22)
        if v != [[1, 0], [0, 1]]:
            # Z' = A^{-1} Z D with A^T D = I; choose D = v, A = v^{-T}
            vinv_t = _inv2_t(v)
            m = _sym_block(vinv_t, [[0, 0], [0, 0]], [[0, 0], [0, 0]], v)
            assert _is_symplectic(m)
            cur = cur.act(m)
            z = small_period_matrix(cur).z
        b = [[-int(mpmath.nint(z[i, j].real)) for j in range(2)] for i in range(2)]
        b[1][0] = b[0][1]
        if any(b[i][j] for i in range(2) for j in range(2)):
            m = _sym_block([[1, 0], [0, 1]], b, [[0, 0], [0, 0]], [[1, 0], [0, 1]])
            cur = cur.act(m)
            z = small_period_matrix(cur).z
        if abs(z[0, 0]) < 0.99:
            # Z -> (A + Z C)^{-1}(B + Z D), inverting the first coordinate
            m = _sym_block([[0, 0], [0, 1]], [[-1, 0], [0, 0]], [[1, 0], [0, 0]], [[0, 0], [0, 1]])
            assert _is_symplectic(m)
            cur = cur.act(m)
            continue
        if v == [[1, 0], [0, 1]] and not any(b[i][j] for i in range(2) for j in range(2)):
            break
    return cur


def _lagrange_reduce(a: float, b: float, c: float):
    """Unimodular V with V^T [[a, b], [b, c]] V Minkowski reduced (columns of V)."""
    v = [[1, 0], [0, 1]]
    for _ in range(100):
        q = round(b / a)
        if q:
            # second column -= q * first column
            v = [[v[0][0], v[0][1] - q * v[0][0]], [v[1][0], v[1][1] - q * v[1][0]]]
            b, c = b - q * a, c - 2 * q * b + q * q * a
        if c < a:
            v = [[v[0][1], -v[0][0]], [v[1][1], -v[1][0]]]
            a, b, c = c, -b, a
            continue
        break
    return v


def _inv2_t(v):
    det = v[0][0] * v[1][1] - v[0][1] * v[1][0]
    inv = [[v[1][1] * det, -v[0][1] * det], [-v[1][0] * det, v[0][0] * det]]  # det = +-1
    return exact.transpose(inv)


# ---------------------------------------------------------------------------
# cache

# guard bits on top of the nominal precision; entries are written with enough
# decimal digits to round-trip exactly at that many bits
_CACHE_GUARD = 64


def _cache_bits(precision: int) -> int:
    return precision + _CACHE_GUARD


def write_period_cache(path, level: int, class_index: int, omega: BigPeriodMatrix):
    digits = ceil(_cache_bits(omega.precision) * 0.30103) + 3
    lines = [f"level {level} class {class_index} precision {omega.precision}"]
    for m in (omega.omega1, omega.omega2):
        for i in range(2):
            for j in range(2):
                x = m[i, j]
                lines.append(f"{mpmath.nstr(x.real, digits)} {mpmath.nstr(x.imag, digits)}")
    lines.append("basis " + " ".join(str(x) for r in omega.symplectic_basis for x in r))
    tmp = Path(str(path) + ".tmp")
    tmp.parent.mkdir(parents=True, exist_ok=True)
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(path)


def read_period_cache(path) -> tuple[int, int, BigPeriodMatrix]:
    lines = Path(path).read_text().split("\n")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "level" or head[2] != "class" or head[4] != "precision":
        raise ParseError(f"{path}: bad header")
    level, k, prec = int(head[1]), int(head[3]), int(head[5])
    with mpmath.workprec(_cache_bits(prec)):
        vals = []
        for ln in lines[1:9]:
            re_, im = ln.split()
            vals.append(mpmath.mpc(mpmath.mpf(re_), mpmath.mpf(im)))
        o1 = mpmath.matrix([[vals[0], vals[1]], [vals[2], vals[3]]])
        o2 = mpmath.matrix([[vals[4], vals[5]], [vals[6], vals[7]]])
    basis = [[0] * 4 for _ in range(4)]
    if len(lines) > 9 and lines[9].startswith("basis"):
        xs = [int(x) for x in lines[9].split()[1:]]
        basis = [xs[4 * i:4 * i + 4] for i in range(4)]
    return level, k, BigPeriodMatrix(o1, o2, basis, prec)
