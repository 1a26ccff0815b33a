"""Weight-2 modular symbols for Gamma_0(N).

The ambient space is presented by Manin symbols (c:d) in P^1(Z/N) modulo the
2-term relation x + xS = 0 and the 3-term relation x + xR + xR^2 = 0, where
S = [[0,-1],[1,0]] and R = [[0,-1],[1,-1]].  Elements of the ambient space are
row vectors in the coordinates of a set of free Manin symbols; Hecke operators
act on the right.

Integral homology H_1(X_0(N), Z) is the kernel of the boundary map inside the
lattice spanned by the Manin symbols.  The intersection pairing is obtained by
counting signed crossings between Farey edges and closed loops of the dual
(trivalent) tree, one loop per element of Gamma_0(N).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from pathlib import Path

import flint
import numpy as np

from . import exact
from .errors import ParseError, RamanujanBoundViolated

S_MAT = ((0, -1), (1, 0))
R_MAT = ((0, -1), (1, -1))


# ---------------------------------------------------------------------------
# small number theory

def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return [int(p) for p in np.nonzero(sieve)[0]]


def factorint(n: int) -> dict[int, int]:
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def gamma0_index(n: int) -> int:
    idx = n
    for p in factorint(n):
        idx = idx // p * (p + 1)
    return idx


def genus_x0(n: int) -> int:
    """Genus of X_0(N) from the index / elliptic point / cusp formula."""
    f = factorint(n)
    mu = gamma0_index(n)
    nu2 = 0 if n % 4 == 0 else _prod(1 + _legendre(-1, p) for p in f if p != 2)
    nu3 = 0 if n % 9 == 0 else _prod(1 + (-1 if p == 2 else _legendre(-3, p)) for p in f if p != 3)
    cusps = sum(_phi(gcd(d, n // d)) for d in range(1, n + 1) if n % d == 0)
    g = 1 + Fraction(mu, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    return int(g)


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


def _legendre(d: int, p: int) -> int:
    r = pow(d % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _phi(n: int) -> int:
    out = n
    for p in factorint(n):
        out = out // p * (p - 1)
    return out


# ---------------------------------------------------------------------------
# Hecke correspondences

@lru_cache(maxsize=None)
def heilbronn_cremona(p: int) -> np.ndarray:
    """Cremona's Heilbronn matrices of prime determinant p as rows (x1, x2, y1, y2).

    A Manin symbol (u, v) maps to (u*x1 + v*y1, u*x2 + v*y2).
    """
    if p == 2:
        return np.array([[1, 0, 0, 2], [2, 0, 0, 1], [2, 1, 0, 1], [1, 0, 1, 2]], dtype=np.int64)
    half = p // 2
    r = np.arange(-half, half + 1, dtype=np.int64)
    x1 = np.full_like(r, p)
    x2 = -r
    y1 = np.zeros_like(r)
    y2 = np.ones_like(r)
    a = np.full_like(r, -p)
    b = r.copy()
    chunks = [np.array([[1, 0, 0, p]], dtype=np.int64), np.stack([x1, x2, y1, y2], axis=1)]
    while True:
        live = b != 0
        if not live.any():
            break
        x1, x2, y1, y2, a, b = x1[live], x2[live], y1[live], y2[live], a[live], b[live]
        # nearest integer to a/b, halves away from zero
        q = np.sign(a) * np.sign(b) * ((2 * np.abs(a) + np.abs(b)) // (2 * np.abs(b)))
        a, b = -b, a - b * q
        x1, x2 = x2, q * x2 - x1
        y1, y2 = y2, q * y2 - y1
        chunks.append(np.stack([x1, x2, y1, y2], axis=1))
    return np.concatenate(chunks)


# ---------------------------------------------------------------------------
# quadratic field elements a + b*sqrt(d)

def qmul(x, y, d):
    return (x[0] * y[0] + d * x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def qtrace(x):
    return 2 * x[0]


def qnorm(x, d):
    return x[0] ** 2 - d * x[1] ** 2


def qfloat(x, d, sign=1):
    return float(x[0]) + sign * float(x[1]) * (abs(d) ** 0.5 if d > 0 else 0.0)


# ---------------------------------------------------------------------------
# integer kernels and coordinates

def integer_kernel(c) -> list[list[int]]:
    """Saturated basis (rows) of {y in Z^n : c y = 0} for an integer matrix c (m x n)."""
    c = [list(map(int, row)) for row in c]
    n = len(c[0]) if c else 0
    m = len(c)
    if m == 0:
        return exact.identity(n)
    aug = [[c[i][j] for i in range(m)] + [int(j == k) for k in range(n)] for j in range(n)]
    h = flint.fmpz_mat(aug).hnf().tolist()
    return [[int(x) for x in row[m:]] for row in h if all(x == 0 for x in row[:m]) and any(row[m:])]


def _to_int_rows(rows) -> tuple[list[list[int]], int]:
    den = 1
    for r in rows:
        for x in r:
            den = exact.lcm(den, Fraction(x).denominator)
    return [[int(Fraction(x) * den) for x in r] for r in rows], den


class Coordinates:
    """Solve ``y @ basis == v`` exactly for vectors v in the row span of ``basis``."""

    def __init__(self, basis):
        self.basis = [[Fraction(x) for x in r] for r in basis]
        k = len(self.basis)
        rref, rank = qmat(self.basis).rref() if k else (None, 0)
        if rank != k:
            raise ValueError("basis rows are dependent")
        rows = rref.tolist() if k else []
        self.pivots = [next(j for j, x in enumerate(r) if x != 0) for r in rows]
        sq = qmat([[r[j] for j in self.pivots] for r in self.basis]) if k else None
        self._inv = sq.inv() if k else None
        self._bmat = qmat(self.basis) if k else None

    def __call__(self, v, check=True):
        return self.solve_many([v], check)[0] if self.basis else []

    def solve_many(self, vs, check=True):
        """Coordinates of several vectors at once."""
        k = len(self.basis)
        if k == 0:
            return [[] for _ in vs]
        rhs = qmat([[v[j] for j in self.pivots] for v in vs])
        y = rhs * self._inv
        if check and y * self._bmat != qmat(vs):
            raise ValueError("vector not in span")
        return [[_fq(x) for x in row] for row in y.tolist()]


def _fq(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def qmat(rows) -> "flint.fmpq_mat":
    """flint rational matrix from nested Fractions/ints."""
    return flint.fmpq_mat([[flint.fmpq(Fraction(x).numerator, Fraction(x).denominator) for x in r]
                           for r in rows])


# ---------------------------------------------------------------------------
# the ambient space

class ManinSymbolSpace:
    """Weight-2 modular symbols for Gamma_0(N) over Q with integral structure."""

    def __init__(self, level: int):
        if level < 1:
            raise ValueError("level must be positive")
        self.level = n = level
        self._build_p1()
        self._build_quotient()
        self._build_cusps()
        self._build_cuspidal()
        self._hecke_cache: dict[int, list] = {}
        self._form = None

    # -- P^1(Z/N) --------------------------------------------------------
    def _build_p1(self):
        n = self.level
        c, d = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        g = np.gcd(np.gcd(c, d), n)
        valid = g == 1
        units = [u for u in range(n) if gcd(u, n) == 1] or [0]
        key = np.full((n, n), n * n, dtype=np.int64)
        for u in units:
            key = np.minimum(key, (u * c % n) * n + (u * d % n))
        key[~valid] = -1
        reps = sorted(set(int(k) for k in key[valid].ravel()))
        self.symbols = [(k // n, k % n) for k in reps]
        pos = {k: i for i, k in enumerate(reps)}
        table = np.full(n * n + 1, -1, dtype=np.int64)
        for k, i in pos.items():
            table[k] = i
        self.index_table = np.where(valid, table[np.where(valid, key, n * n)], -1)

    def index(self, c: int, d: int) -> int:
        n = self.level
        return int(self.index_table[c % n, d % n])

    def _act(self, i, mat):
        c, d = self.symbols[i]
        (a, b), (cc, dd) = mat
        return self.index(c * a + d * cc, c * b + d * dd)

    # -- relations --------------------------------------------------------
    def _build_quotient(self):
        nsym = len(self.symbols)
        rep = [None] * nsym   # (generator position, sign) or None if killed
        gens = []
        for i in range(nsym):
            if rep[i] is not None or i in ():
                continue
            j = self._act(i, S_MAT)
            if j == i:
                rep[i] = "killed"
                continue
            if rep[i] is None:
                rep[i] = (len(gens), 1)
                rep[j] = (len(gens), -1)
                gens.append(i)
        rels = []
        done = set()
        for i in range(nsym):
            if i in done:
                continue
            j = self._act(i, R_MAT)
            k = self._act(j, R_MAT)
            done.update((i, j, k))
            row = {}
            for s in (i, j, k):
                r = rep[s]
                if r == "killed":
                    continue
                row[r[0]] = row.get(r[0], 0) + r[1]
            row = {g: v for g, v in row.items() if v}
            if row:
                rels.append(row)
        ng = len(gens)
        if rels:
            mat = flint.fmpq_mat([[row.get(g, 0) for g in range(ng)] for row in rels])
            rref, rank = mat.rref()
            rows = rref.tolist()[:rank]
        else:
            rows, rank = [], 0
        pivots = [next(j for j, x in enumerate(r) if x != 0) for r in rows]
        free = [g for g in range(ng) if g not in set(pivots)]
        fpos = {g: t for t, g in enumerate(free)}
        gen_coords = {}
        for g in free:
            v = [Fraction(0)] * len(free)
            v[fpos[g]] = Fraction(1)
            gen_coords[g] = v
        for r, p in zip(rows, pivots):
            gen_coords[p] = [-_fq(r[g]) for g in free]
        coords = []
        for i in range(nsym):
            r = rep[i]
            if r == "killed":
                coords.append([Fraction(0)] * len(free))
            else:
                coords.append([r[1] * x for x in gen_coords[r[0]]])
        self.dimension = len(free)
        self.basis_symbols = [gens[g] for g in free]
        ints, den = _to_int_rows(coords) if coords else ([], 1)
        self.coord_den = den
        self.coord_int = np.array(ints, dtype=object) if nsym else np.zeros((0, 0), dtype=object)
        self._coords = coords

    def coords(self, i: int) -> list[Fraction]:
        """Ambient coordinates of Manin symbol number i."""
        return self._coords[i]

    # -- cusps and boundary ----------------------------------------------
    @staticmethod
    def _lift(c, d, n):
        """Matrix [[a,b],[c',d']] in SL_2(Z) with bottom row = (c, d) mod n."""
        c, d = c % n, d % n
        if n == 1:
            return (1, 0, 0, 1)
        if c == 0:
            c = n
        k = 0
        while gcd(c, d + k * n) != 1:
            k += 1
        d = d + k * n
        g, x, y = exact._xgcd(d, c)  # x d + y c = 1
        return (x, -y, c, d)

    def _cusp_id(self, u, v):
        """Index of the Gamma_0(N)-class of the cusp u/v."""
        n = self.level
        g = gcd(u, v)
        u, v = u // g, v // g
        if v < 0 or (v == 0 and u < 0):
            u, v = -u, -v
        s = u if v == 0 else (0 if v == 1 else pow(u % v, -1, v))
        for idx, (s2, v2) in enumerate(self._cusp_reps):
            m = gcd(v * v2, n)
            if (s * v2 - s2 * v) % m == 0:
                return idx
        self._cusp_reps.append((s, v))
        return len(self._cusp_reps) - 1

    def _build_cusps(self):
        self._cusp_reps = []
        n = self.level
        rows = []
        for i in self.basis_symbols:
            c, d = self.symbols[i]
            a, b, c2, d2 = self._lift(c, d, n)
            row = {}
            hi = self._cusp_id(a, c2)   # g(oo) = a/c
            lo = self._cusp_id(b, d2)   # g(0) = b/d
            row[hi] = row.get(hi, 0) + 1
            row[lo] = row.get(lo, 0) - 1
            rows.append(row)
        self.num_cusps = len(self._cusp_reps)
        self.boundary = [[r.get(k, 0) for k in range(self.num_cusps)] for r in rows]

    # -- cuspidal lattice ---------------------------------------------------
    def _build_cuspidal(self):
        dim = self.dimension
        if dim == 0:
            self.cusp_basis = []
            self._cusp_coords = Coordinates([])
            return
        # integral structure: lattice spanned by all Manin symbol images
        ints = [[int(x) for x in row] for row in self.coord_int.tolist() if any(row)]
        lat = flint.fmpz_mat(ints).hnf().tolist()
        lat = [[int(x) for x in r] for r in lat if any(r)]
        den = self.coord_den
        # y @ (lat/den) @ boundary == 0
        k = exact.mat_mul(lat, self.boundary)
        ys = integer_kernel(exact.transpose(k)) if self.num_cusps else exact.identity(len(lat))
        basis = exact.mat_mul(ys, lat) if ys else []
        self.cusp_basis = [[Fraction(x, den) for x in r] for r in basis]
        self._cusp_coords = Coordinates(self.cusp_basis)

    @property
    def cuspidal_dimension(self) -> int:
        return len(self.cusp_basis)

    def cusp_coordinates(self, v):
        """Coordinates of an ambient vector in the integral cuspidal basis."""
        return self._cusp_coords(v)

    # -- Hecke ------------------------------------------------------------
    def hecke_images(self, i: int, p: int) -> np.ndarray:
        """Indices of the Manin symbols in T_p of symbol i (invalid ones dropped)."""
        h = heilbronn_cremona(p)
        u, v = self.symbols[i]
        n = self.level
        a = (u * h[:, 0] + v * h[:, 2]) % n
        b = (u * h[:, 1] + v * h[:, 3]) % n
        idx = self.index_table[a, b]
        return idx[idx >= 0]

    def ambient_hecke(self, p: int) -> list[list[Fraction]]:
        """Matrix of T_p on the ambient space (rows = images of basis symbols)."""
        if p not in self._hecke_cache:
            rows = []
            for i in self.basis_symbols:
                idx = self.hecke_images(i, p)
                s = self.coord_int[idx].sum(axis=0) if len(idx) else np.zeros(self.dimension, dtype=object)
                rows.append([Fraction(int(x), self.coord_den) for x in s])
            self._hecke_cache[p] = rows
        return self._hecke_cache[p]

    def hecke_operator(self, p: int) -> list[list[int]]:
        """Integer matrix of T_p on the integral cuspidal basis (row convention)."""
        if not self.cusp_basis:
            return []
        imgs = qmat(self.cusp_basis) * qmat(self.ambient_hecke(p))
        y = self._cusp_coords.solve_many([[_fq(x) for x in r] for r in imgs.tolist()])
        if any(x.denominator != 1 for r in y for x in r):
            raise ArithmeticError("Hecke image is not integral")
        return [[int(x) for x in r] for r in y]

    # -- modular symbols for group elements --------------------------------
    def symbol_of_fraction(self, num: int, den: int) -> list[Fraction]:
        """Ambient vector of the modular symbol {0, num/den}."""
        n = self.level
        v = [Fraction(0)] * self.dimension
        # {0, oo} = Manin symbol (0:1)

        def add(c, d, sgn):
            i = self.index(c, d)
            if i >= 0:
                for j, x in enumerate(self._coords[i]):
                    if x:
                        v[j] += sgn * x

        add(0, 1, 1)
        pm2, qm2, pm1, qm1 = 0, 1, 1, 0
        k = -1
        for c in exact.convergents(Fraction(num, den)):
            k += 1
            p, q = c.numerator, c.denominator
            # {p_{k-1}/q_{k-1}, p_k/q_k} = g{0, oo}, g = [[+-p, p_{k-1}], [+-q, q_{k-1}]]
            sgn = 1 if p * qm1 - pm1 * q == 1 else -1
            add(sgn * q, qm1, 1)
            pm2, qm2, pm1, qm1 = pm1, qm1, p, q
        # the sum telescopes to {0, oo} + {oo, num/den} = {0, num/den}
        return v

    def symbol_of_matrix(self, g) -> list[Fraction]:
        a, b, c, d = g
        return self.symbol_of_fraction(b, d)

    def crossing_functional(self, g) -> list[int]:
        """Signed crossings of the dual-tree loop for g in Gamma_0(N), per basis symbol."""
        n = self.level
        counts = {}
        h = (1, 0, 0, 1)
        target = g
        rk = [(1, 0, 0, 1), (0, -1, 1, -1), (-1, 1, -1, 0)]   # I, R, R^2
        for _ in range(10_000):
            m = _mul(_inv(h), target)
            if _in_stab(m):
                break
            for r in rk:
                gg = _mul(h, r)
                a, b, c, d = _mul(_inv(gg), target)
                if 2 * a * c + a * d + b * c + 2 * b * d < 0:
                    i = self.index(gg[2], gg[3])
                    j = self.index(gg[3], -gg[2])    # class of gg*S
                    counts[i] = counts.get(i, 0) + 1
                    counts[j] = counts.get(j, 0) - 1
                    h = _mul(gg, (0, -1, 1, 0))
                    break
            else:
                raise RuntimeError("tree walk failed")
        return [counts.get(i, 0) for i in self.basis_symbols]

    def gamma0_elements(self, max_c_mult: int = 8):
        """Elements [[a,b],[cN,d]] of Gamma_0(N) with small lower-left entry."""
        for t in range(1, max_c_mult + 1):
            c = self.level * t
            for d0 in range(1, c + 1):
                if gcd(d0, c) != 1:
                    continue
                for d in (d0, -d0):
                    a = pow(d, -1, c)
                    yield (a, (a * d - 1) // c, c, d)

    # -- intersection pairing ---------------------------------------------
    def _build_form(self):
        g2 = self.cuspidal_dimension
        loops, syms = [], []
        rank = 0
        for gam in self.gamma0_elements(64):
            if rank == g2:
                break
            s = self.symbol_of_matrix(gam)
            trial = syms + [s]
            r = qmat(trial).rank() if trial else 0
            if r > rank:
                rank = r
                syms.append(s)
                loops.append(gam)
        if rank != g2:
            raise RuntimeError("loops do not span the cuspidal space")
        phis = [self.crossing_functional(gm) for gm in loops]
        self._loops, self._loop_syms, self._loop_phis = loops, syms, phis
        self._loop_coords = Coordinates(syms) if syms else None

    def _ensure_form(self):
        if self._form is None:
            self._build_form()
            self._form = True

    def pair(self, v, w) -> Fraction:
        """Intersection number of two cuspidal ambient vectors."""
        return self.pairing_matrix([v], [w])[0][0]

    def pairing_matrix(self, vs, ws) -> list[list[Fraction]]:
        """Matrix of intersection numbers <v_i, w_j>."""
        self._ensure_form()
        if not self._loop_syms:
            return [[Fraction(0)] * len(ws) for _ in vs]
        c = qmat(self._loop_coords.solve_many(ws))          # ws in loop-symbol coordinates
        phi = qmat(vs) * qmat(self._loop_phis).transpose()  # <v, loop_j>
        out = phi * c.transpose()
        return [[_fq(x) for x in r] for r in out.tolist()]

    def intersection_form(self, basis) -> list[list[int]]:
        out = self.pairing_matrix(basis, basis)
        if any(x.denominator != 1 for r in out for x in r):
            raise ArithmeticError("non-integral intersection numbers")
        return [[int(x) for x in r] for r in out]


def _mul(x, y):
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _inv(x):
    a, b, c, d = x
    return (d, -b, -c, a)


def _in_stab(m):
    # +-I, +-R, +-R^2
    return m in {(1, 0, 0, 1), (-1, 0, 0, -1), (0, -1, 1, -1), (0, 1, -1, 1), (-1, 1, -1, 0), (1, -1, 1, 0)}


def build_space(level: int) -> ManinSymbolSpace:
    return ManinSymbolSpace(level)


# ---------------------------------------------------------------------------
# newform classes

@dataclass
class IntersectionForm:
    """Alternating integral pairing on H_1(A_f, Z) restricted from J_0(N).

    The restriction of the unimodular form on H_1(X_0(N)) to the f-part is
    d times a primitive form; ``primitive`` is that form and d is ``content``.
    The polarization is principal when the primitive form is unimodular.
    """

    matrix: list

    def __post_init__(self):
        n = len(self.matrix)
        if any(self.matrix[i][j] != -self.matrix[j][i] for i in range(n) for j in range(n)):
            raise ValueError("intersection form must be alternating")

    @property
    def content(self) -> int:
        g = 0
        for r in self.matrix:
            for x in r:
                g = gcd(g, x)
        return g

    @property
    def primitive(self) -> list:
        c = self.content or 1
        return [[x // c for x in r] for r in self.matrix]

    def elementary_divisors(self) -> list[int]:
        return exact.elementary_divisors(self.primitive)


@dataclass
class HomologyLattice:
    basis: list               # integral basis, ambient coordinates
    intersection: IntersectionForm


@dataclass(eq=False)
class NewformClass:
    """Galois orbit {f, sigma f} of newforms with Hecke field Q(sqrt(radicand)).

    ``eigenvalues[p] = (a, b)`` encodes a_p = a + b*sqrt(radicand) for the
    embedding that defines f; sigma f takes the other sign.
    """

    level: int
    label: str
    radicand: int
    eigenvalues: dict
    subspace_basis: list | None = None
    space: ManinSymbolSpace | None = field(default=None, repr=False)
    _engine: object = field(default=None, repr=False)

    @property
    def hecke_field_disc(self) -> int:
        d = self.radicand
        return d if d % 4 == 1 else 4 * d

    def eigenvalue(self, p: int):
        if p not in self.eigenvalues:
            if self._engine is None:
                from .errors import InsufficientEigenvalues
                raise InsufficientEigenvalues(f"a_{p} unknown for {self.label}")
            self.eigenvalues[p] = self._engine.eigenvalue(p)
        return self.eigenvalues[p]

    def ensure_eigenvalues(self, bound: int):
        for p in primes_up_to(bound):
            self.eigenvalue(p)

    def trace(self, p: int) -> Fraction:
        return qtrace(self.eigenvalue(p))

    def norm(self, p: int) -> Fraction:
        return qnorm(self.eigenvalue(p), self.radicand)

    def conjugate_eigenvalues(self):
        return {p: (a, -b) for p, (a, b) in self.eigenvalues.items()}

    def matches(self, other: "NewformClass", primes=None) -> bool:
        """Same Galois orbit (eigenvalues agree up to conjugation on common primes)."""
        if self.level != other.level or self.radicand != other.radicand:
            return False
        common = sorted(set(self.eigenvalues) & set(other.eigenvalues))
        if primes is not None:
            common = [p for p in common if p in primes]
        same = all(self.eigenvalues[p] == other.eigenvalues[p] for p in common)
        conj = all(self.eigenvalues[p] == (other.eigenvalues[p][0], -other.eigenvalues[p][1])
                   for p in common)
        return bool(common) and (same or conj)


class _EigenEngine:
    """Hecke eigenvalues of one class via an equivariant projection of the ambient space."""

    def __init__(self, space: ManinSymbolSpace, proj, gen_prime: int, gen_value, radicand: int):
        self.space = space
        self.radicand = radicand
        self.gen_value = gen_value             # a_{p0} as (a, b)
        self.proj = proj                       # dim x 4 rational
        pm = qmat(proj)
        tm = qmat(space.ambient_hecke(gen_prime))
        self.b0 = Coordinates(exact.transpose(proj)).solve_many(
            exact.transpose([[_fq(x) for x in r] for r in (tm * pm).tolist()]))
        self.b0 = exact.transpose(self.b0)     # 4x4 with T*proj = proj*b0
        sym = qmat([[Fraction(int(x), space.coord_den) for x in row] for row in space.coord_int.tolist()])
        images = [[_fq(x) for x in r] for r in (sym * pm).tolist()]
        rows, den = _to_int_rows(images)
        self.sym_proj = np.array(rows, dtype=object)
        self.sym_den = den
        self.probe = None
        for i, u in enumerate(images):
            if any(u):
                ub = [sum(u[k] * self.b0[k][j] for k in range(4)) for j in range(4)]
                piv = _two_pivots(u, ub)
                if piv is not None:
                    self.probe, self.u, self.ub, self.piv = i, u, ub, piv
                    break
        if self.probe is None:
            raise RuntimeError("no Manin symbol detects the class")

    def eigenvalue(self, p: int):
        idx = self.space.hecke_images(self.probe, p)
        up = [Fraction(int(x), self.sym_den) for x in self.sym_proj[idx].sum(axis=0)] \
            if len(idx) else [Fraction(0)] * 4
        i, j = self.piv
        u, ub = self.u, self.ub
        det = u[i] * ub[j] - u[j] * ub[i]
        alpha = (up[i] * ub[j] - up[j] * ub[i]) / det
        beta = (u[i] * up[j] - u[j] * up[i]) / det
        if any(alpha * u[k] + beta * ub[k] != up[k] for k in range(4)):
            raise ArithmeticError(f"T_{p} is not in the Hecke field on this class")
        g = self.gen_value
        return (alpha + beta * g[0], beta * g[1])


def _two_pivots(u, v):
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            if u[i] * v[j] - u[j] * v[i]:
                return i, j
    return None


def _fz_poly(coeffs):
    return flint.fmpz_poly([int(c) for c in coeffs])


def _poly_at(poly: "flint.fmpz_poly", m):
    """Evaluate an integer polynomial at a flint matrix."""
    n = m.nrows()
    cls = type(m)
    acc = cls(n, n)
    ident = cls([[int(i == j) for j in range(n)] for i in range(n)])
    for c in reversed(poly.coeffs()):
        acc = acc * m + ident * c
    return acc


def sturm_bound(level: int) -> int:
    return -(-gamma0_index(level) // 6)


def decompose(space: ManinSymbolSpace, prime_bound: int | None = None) -> list[NewformClass]:
    """All newform classes with real-or-imaginary quadratic Hecke field.

    Hecke-stable subspaces of cuspidal homology are split with T_p for
    p not dividing N.  One Galois orbit of quadratic newforms occupies exactly
    a 4-dimensional piece on which some T_p has irreducible quadratic
    characteristic factor of multiplicity 2; old classes have multiplicity
    >= 4 and rational classes dimension 2.
    """
    n = space.level
    g2 = space.cuspidal_dimension
    if g2 == 0:
        return []
    bound = prime_bound or max(sturm_bound(n), 11)
    pieces = [{"rows": exact.identity(g2), "final": False, "quad": None, "minpolys": {}}]
    for p in primes_up_to(bound):
        if n % p == 0:
            continue
        if all(pc["final"] for pc in pieces):
            break
        a = flint.fmpz_mat(space.hecke_operator(p))
        nxt = []
        for pc in pieces:
            if pc["final"]:
                nxt.append(pc)
                continue
            w = flint.fmpz_mat(pc["rows"])
            wa = w * a
            coords = Coordinates(pc["rows"]).solve_many([[int(x) for x in r] for r in wa.tolist()])
            aw = flint.fmpz_mat([[int(x) for x in r] for r in coords])
            _, facs = aw.charpoly().factor()
            if len(facs) == 1:
                g, e = facs[0]
                pc["minpolys"][p] = g
                if g.degree() == 2 and e == 2 and pc["quad"] is None:
                    pc["quad"] = (p, g)
                pc["final"] = e * g.degree() == 2 * g.degree() or (g.degree() == 1 and e == 2)
                nxt.append(pc)
                continue
            for g, e in facs:
                ker = integer_kernel((w * _poly_at(g, a)).transpose().tolist())
                rows = [[int(x) for x in r] for r in (flint.fmpz_mat(ker) * w).tolist()]
                sub = {"rows": rows, "final": e == 2, "quad": (p, g) if (g.degree() == 2 and e == 2) else None,
                       "minpolys": dict(pc["minpolys"])}
                sub["minpolys"][p] = g
                nxt.append(sub)
        pieces = nxt
    classes = []
    for pc in pieces:
        if len(pc["rows"]) != 4 or pc["quad"] is None:
            continue
        classes.append(_make_class(space, pc))
    classes.sort(key=_class_key)
    for k, c in enumerate(classes):
        c.label = f"S{n}{_letters(k)}"
    return classes


def _letters(k: int) -> str:
    s = ""
    k += 1
    while k:
        k, r = divmod(k - 1, 26)
        s = chr(65 + r) + s
    return s


def _class_key(c: NewformClass):
    small = [p for p in primes_up_to(50)]
    return (c.hecke_field_disc, c.trace(2), tuple((c.trace(p), c.norm(p)) for p in small))


def _make_class(space: ManinSymbolSpace, pc) -> NewformClass:
    p0, g0 = pc["quad"]
    c0, c1, c2 = [int(x) for x in g0.coeffs()]
    t, nrm = -c1, c0                                   # x^2 - t x + nrm
    disc = t * t - 4 * nrm
    rad = exact.squarefree_part(disc)
    m = isqrt(disc // rad)
    gen = (Fraction(t, 2), Fraction(m, 2))
    basis = exact.mat_mul(pc["rows"], space.cusp_basis)
    # right kernel of the Hecke ideal on the ambient space
    stack = []
    dim = space.dimension
    for p, g in sorted(pc["minpolys"].items()):
        stack.extend(_poly_at(g, qmat(space.ambient_hecke(p))).tolist())
    proj = _right_kernel(stack, dim)
    p_extra = 2
    while len(proj) != 4:
        p_extra = next(q for q in primes_up_to(10 * p_extra + 100) if q > p_extra and space.level % q)
        wa = Coordinates(pc["rows"]).solve_many(
            [[int(x) for x in r] for r in (flint.fmpz_mat(pc["rows"]) * flint.fmpz_mat(space.hecke_operator(p_extra))).tolist()])
        minp = flint.fmpz_mat([[int(x) for x in r] for r in wa]).minpoly()
        stack.extend(_poly_at(minp, qmat(space.ambient_hecke(p_extra))).tolist())
        proj = _right_kernel(stack, dim)
    proj = exact.transpose(proj)                            # dim x 4
    engine = _EigenEngine(space, proj, p0, gen, rad)
    cls = NewformClass(level=space.level, label="", radicand=rad, eigenvalues={p0: gen},
                       subspace_basis=basis, space=space, _engine=engine)
    return cls


def _right_kernel(rows, dim) -> list[list[Fraction]]:
    """Basis of {v : rows @ v = 0} as a list of vectors."""
    m = qmat([[_fq(x) if not isinstance(x, (int, Fraction)) else x for x in r] for r in rows])
    rref, rank = m.rref()
    r = [[_fq(x) for x in row] for row in rref.tolist()[:rank]]
    piv = [next(j for j, x in enumerate(row) if x) for row in r]
    free = [j for j in range(dim) if j not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * dim
        v[f] = Fraction(1)
        for row, pj in zip(r, piv):
            v[pj] = -row[f]
        out.append(v)
    return out


def integral_homology(cls: NewformClass) -> HomologyLattice:
    """Saturated integral homology of A_f with its intersection form."""
    space = cls.space
    form = space.intersection_form(cls.subspace_basis)
    return HomologyLattice(basis=cls.subspace_basis, intersection=IntersectionForm(form))


def intersection_matrix(lattice: HomologyLattice) -> IntersectionForm:
    return lattice.intersection


def is_principally_polarized(form: IntersectionForm) -> bool:
    divs = form.elementary_divisors()
    return len(divs) == 4 and all(d == 1 for d in divs)


# ---------------------------------------------------------------------------
# eigenvalue files:  "level N disc D" then lines "p a b" with a_p = a + b sqrt(D)

_HEADER = re.compile(r"^\s*level\s+(\d+)\s+disc\s+(-?\d+)\s*$")


def write_eigenvalues(cls: NewformClass, path, bound: int = 100):
    cls.ensure_eigenvalues(bound)
    lines = [f"level {cls.level} disc {cls.radicand}"]
    for p in sorted(cls.eigenvalues):
        if p <= bound:
            a, b = cls.eigenvalues[p]
            lines.append(f"{p} {a} {b}")
    tmp = Path(str(path) + ".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(path)


def ingest_eigenvalues(path, label: str | None = None) -> NewformClass:
    text = Path(path).read_text()
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError(f"{path}: empty eigenvalue file")
    m = _HEADER.match(lines[0])
    if not m:
        raise ParseError(f"{path}: bad header {lines[0]!r}")
    level, rad = int(m.group(1)), int(m.group(2))
    eig = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ParseError(f"{path}: bad line {ln!r}")
        try:
            p, a, b = int(parts[0]), Fraction(parts[1]), Fraction(parts[2])
        except ValueError as exc:
            raise ParseError(f"{path}: bad line {ln!r}") from exc
        eig[p] = (a, b)
        if level % p:
            for sign in (1, -1):
                v = float(a) + sign * float(b) * (rad ** 0.5 if rad > 0 else 0.0)
                if rad < 0:
                    v = (float(a) ** 2 - rad * float(b) ** 2) ** 0.5
                if abs(v) > 2 * p ** 0.5 + 1e-9:
                    raise RamanujanBoundViolated(f"|a_{p}| exceeds 2 sqrt(p) in {path}")
    return NewformClass(level=level, label=label or f"S{level}?", radicand=rad, eigenvalues=eig)
