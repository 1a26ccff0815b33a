"""Genus-2 Riemann theta function with half-integer characteristics.

theta[a; b](z, Z) = sum_n exp(pi i (n+a)^T Z (n+a) + 2 pi i (n+a)^T (z+b)),
where a, b have entries in {0, 1/2}; the plain theta function is a = b = 0.
Characteristics are stored as integer vectors (2a, 2b).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import ceil, floor, log, sqrt

import mpmath

from .errors import Indeterminate, NotPositiveDefinite


@dataclass(frozen=True)
class ThetaCharacteristic:
    a: tuple       # entries 0/1 meaning 0/(1/2)
    b: tuple

    @property
    def parity(self) -> int:
        return (self.a[0] * self.b[0] + self.a[1] * self.b[1]) % 2

    @property
    def is_even(self) -> bool:
        return self.parity == 0

    def point(self, z):
        """The 2-torsion point Z a + b in C^2."""
        return [sum(z[i, j] * self.a[j] for j in range(2)) / 2 + mpmath.mpf(self.b[i]) / 2
                for i in range(2)]


@dataclass
class ThetaValue:
    value: mpmath.mpc
    error_bound: mpmath.mpf
    characteristic: ThetaCharacteristic | None = None


ALL_CHARACTERISTICS = [ThetaCharacteristic((a1, a2), (b1, b2))
                       for a1, a2, b1, b2 in product((0, 1), repeat=4)]
EVEN_CHARACTERISTICS = [c for c in ALL_CHARACTERISTICS if c.is_even]

# order of the odd points w_1..w_6 used for the Weierstrass roots
ODD_POINTS = [ThetaCharacteristic((0, 1), (0, 1)), ThetaCharacteristic((0, 1), (1, 1)),
              ThetaCharacteristic((1, 0), (1, 0)), ThetaCharacteristic((1, 0), (1, 1)),
              ThetaCharacteristic((1, 1), (0, 1)), ThetaCharacteristic((1, 1), (1, 0))]


def _matrix(z):
    return z.z if hasattr(z, "z") else z


def _imag_parts(zm):
    y11 = zm[0, 0].imag
    y12 = (zm[0, 1].imag + zm[1, 0].imag) / 2
    y22 = zm[1, 1].imag
    if not (y11 > 0 and y11 * y22 - y12 * y12 > 0):
        raise NotPositiveDefinite("Im(Z) is not positive definite")
    return y11, y12, y22


def _tail_radius(target, scale, det_piy, rho, extra_power):
    """Smallest R whose lattice tail bound (times ``scale``) is below ``target``."""
    r = 1.0
    while True:
        poly = (r ** 3 + 2 * r + 1) if extra_power else (r * r + 1)
        bound = 3.1416 * (1 + rho / r) ** 2 * poly / sqrt(det_piy) * scale
        logb = log(bound) - r * r
        if logb < log(target):
            return r, mpmath.e ** (mpmath.mpf(logb))
        r += 0.25


def _sum(z, zmat, target, char=None, grad=False):
    zm = _matrix(zmat)
    y11, y12, y22 = (float(x) for x in _imag_parts(zm))
    a = [mpmath.mpf(c) / 2 for c in char.a] if char else [mpmath.mpf(0)] * 2
    b = [mpmath.mpf(c) / 2 for c in char.b] if char else [mpmath.mpf(0)] * 2
    zi = [float(mpmath.im(z[0])), float(mpmath.im(z[1]))]
    det = y11 * y22 - y12 * y12
    # centre of the Gaussian in the summation variable m = n + a
    c1 = -(y22 * zi[0] - y12 * zi[1]) / det
    c2 = -(-y12 * zi[0] + y11 * zi[1]) / det
    # largest term has modulus exp(pi c^T Y c); scale the bounds accordingly
    logk = 3.14159265 * (y11 * c1 * c1 + 2 * y12 * c1 * c2 + y22 * c2 * c2)
    pi_det = (3.14159265 ** 2) * det
    rho = 0.5 * sqrt(3.14159265 * (y11 + y22))
    lam_min = 3.14159265 * ((y11 + y22) / 2 - sqrt(((y11 - y22) / 2) ** 2 + y12 * y12))
    scale = 1.0
    if grad:
        scale = 2 * 3.14159265 * (abs(c1) + abs(c2) + 2 / sqrt(lam_min))
    if logk > 700:
        scale_log = logk
    else:
        scale_log = 0.0
        scale *= mpmath.e ** logk if logk else 1.0
    r, err = _tail_radius(float(target / mpmath.e ** scale_log) if scale_log else float(target),
                          float(scale), pi_det, rho, grad)
    if scale_log:
        err = err * mpmath.e ** scale_log
    # enumerate m = n + a with pi (m - c)^T Y (m - c) <= r^2
    rr = r * r / 3.14159265
    half1 = sqrt(rr * y22 / det)
    total = mpmath.mpc(0)
    g = [mpmath.mpc(0), mpmath.mpc(0)]
    ipi = mpmath.mpc(0, 1) * mpmath.pi
    zb = [z[0] + b[0], z[1] + b[1]]
    for n1 in range(int(floor(c1 - float(a[0]) - half1)) - 1, int(ceil(c1 - float(a[0]) + half1)) + 2):
        m1 = n1 + a[0]
        d1 = float(m1) - c1
        # remaining budget for the second coordinate
        rem = rr - d1 * d1 * det / y22
        if rem < 0:
            continue
        mid = c2 - y12 / y22 * d1
        w = sqrt(rem / y22)
        for n2 in range(int(floor(mid - float(a[1]) - w)), int(ceil(mid - float(a[1]) + w)) + 1):
            m2 = n2 + a[1]
            e = ipi * (zm[0, 0] * m1 * m1 + 2 * zm[0, 1] * m1 * m2 + zm[1, 1] * m2 * m2
                       + 2 * (m1 * zb[0] + m2 * zb[1]))
            t = mpmath.exp(e)
            if grad:
                g[0] += 2 * ipi * m1 * t
                g[1] += 2 * ipi * m2 * t
            else:
                total += t
    return (g if grad else total), err


def theta(z, zmat, target_error=None, char: ThetaCharacteristic | None = None) -> ThetaValue:
    target = target_error if target_error is not None else mpmath.mpf(2) ** (-mpmath.mp.prec)
    v, err = _sum(z, zmat, target, char)
    return ThetaValue(v, err, char)


def theta_gradient(z, zmat, target_error=None, char: ThetaCharacteristic | None = None):
    """(d/dz1, d/dz2) of theta (or theta[char]) at z."""
    target = target_error if target_error is not None else mpmath.mpf(2) ** (-mpmath.mp.prec)
    g, _ = _sum(z, zmat, target, char, grad=True)
    return g


def theta_gradient_with_error(z, zmat, target_error=None, char: ThetaCharacteristic | None = None):
    target = target_error if target_error is not None else mpmath.mpf(2) ** (-mpmath.mp.prec)
    return _sum(z, zmat, target, char, grad=True)


def odd_gradients(zmat, target_error=None) -> list:
    """Gradients at 0 of theta[m] for the six odd characteristics, in the order of ODD_POINTS.

    theta(z + w_k) equals theta[m_k](z) times a nowhere-vanishing exponential, so
    these are proportional to the gradients of theta at w_k.
    """
    zero = [mpmath.mpc(0), mpmath.mpc(0)]
    return [theta_gradient(zero, zmat, target_error, c) for c in ODD_POINTS]


def odd_two_torsion(zmat) -> list:
    zm = _matrix(zmat)
    return [c.point(zm) for c in ODD_POINTS]


def even_thetanullwerte(zmat, target_error=None) -> list[ThetaValue]:
    zero = [mpmath.mpc(0), mpmath.mpc(0)]
    return [theta(zero, zmat, target_error, c) for c in EVEN_CHARACTERISTICS]


def is_irreducible(zmat, threshold=None, target_error=None) -> bool:
    """Numerical form of the criterion: no even thetanullwert vanishes."""
    prec = getattr(zmat, "precision", mpmath.mp.prec)
    if threshold is None:
        threshold = mpmath.mpf(10) ** (-int(prec * 0.30103) // 2)
    with mpmath.workprec(prec + 16):
        vals = even_thetanullwerte(zmat, target_error)
        low = min(vals, key=lambda t: abs(t.value))
        # the verdict is only trustworthy if the error bound cannot move the minimum across
        # the threshold
        if abs(abs(low.value) - threshold) <= 10 * low.error_bound:
            raise Indeterminate("smallest even thetanullwert is not resolved from the threshold")
        return bool(abs(low.value) > threshold)


def min_even_thetanullwert(zmat, target_error=None):
    return min(abs(t.value) for t in even_thetanullwerte(zmat, target_error))
