from fractions import Fraction

import mpmath
import pytest

from modjac import periods, reconstruct as rc
from modjac.curveperiods import curve_period_matrix
from modjac.errors import SignAmbiguous
from modjac.exact import RationalPolynomial as P

KNOWN = [
    P([-7, 10, -11, 2, 2, -8, 1]),
    P([81, 0, 0, 162, 0, 0, -3]),
    P([1, -2, 1, 1, -1, 1]),
    P([0, -128, 0, 0, 0, 2]),
    P([3, -1, 2, 0, 1, 0, -7]),
]


@pytest.mark.parametrize("f", KNOWN, ids=str)
def test_round_trip_from_curve_periods(f):
    """Periods of dx/y, x dx/y recover F exactly up to the -1 twist."""
    with mpmath.workprec(128):
        big = curve_period_matrix(f, 128)
        f0, a = rc.reconstruct_model(big)
    assert f0 == P([c / f.lc for c in f.coeffs])
    assert a == abs(f.lc)


def test_degree_five_detected():
    with mpmath.workprec(128):
        big = curve_period_matrix(P([1, -2, 1, 1, -1, 1]), 128)
        roots = rc.weierstrass_roots(big, periods.small_period_matrix(big))
    assert roots.degree == 5 and roots.infinite is not None and len(roots.roots) == 5


def test_level_63_model(big63, class63):
    f0, a = rc.reconstruct_model(big63)
    assert f0 == P([-27, 0, 0, -54, 0, 0, 1])
    assert a == Fraction(1, 12)
    model = rc.resolve_sign(P([a * c for c in f0.coeffs]), class63)
    assert model.sign == -1
    assert rc.integral_model(model.polynomial) == P([81, 0, 0, 162, 0, 0, -3])
    assert rc.integral_multiplier(model.polynomial) == 36


def test_sign_ambiguous_without_separating_prime(class63):
    f1 = P([Fraction(-27, 12), 0, 0, Fraction(-54, 12), 0, 0, Fraction(1, 12)])
    with pytest.raises(SignAmbiguous) as info:
        rc.resolve_sign(f1, class63, prime_bound=18)
    assert len(info.value.candidates) == 2


def test_odd_polynomial_is_self_twist():
    assert rc.twist_isomorphic(P([0, -4, 0, 0, 0, 1]))
    assert not rc.twist_isomorphic(P([81, 0, 0, 162, 0, 0, -3]))


@pytest.mark.parametrize("f, g", [
    (P([Fraction(-9, 4), 0, 0, Fraction(-9, 2), 0, 0, Fraction(1, 12)]), P([-81, 0, 0, -162, 0, 0, 3])),
    (P([1, Fraction(1, 2), 0, 0, 0, 0, Fraction(1, 3)]), P([36, 18, 0, 0, 0, 0, 12])),
    (P([0, 1, 0, 0, 0, 0, Fraction(1, 4)]), P([0, 4, 0, 0, 0, 0, 1])),
    (P([12, 0, 8]), P([3, 0, 2])),
])
def test_integral_model(f, g):
    h = rc.integral_model(f)
    assert h.is_integral()
    ratio = h.lc / f.lc
    # a rational square, so y^2 = h and y^2 = f are isomorphic
    assert rc._is_rational_square(ratio)
    if g is not None:
        assert h == g
