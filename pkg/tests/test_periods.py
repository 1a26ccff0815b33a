import mpmath
import numpy as np
import pytest

from modjac import exact, hyperelliptic as hy, modsym, periods

# published period matrix for level 63, rows (f2, f1) in our order
PUBLISHED_63 = [
    [0.3590439 + 0.6218823j, -2.2150442 + 1.2788564j, -1.4969563 + 1.2788564j, -1.8560003 - 0.6569740j],
    [-2.2150442 + 3.8365691j, 1.0771318 + 0.6218823j, -3.3529566 + 0.6218823j, -1.1379124 + 3.2146868j],
]


def _full(big):
    return [[complex(big.omega1[i, j]) for j in range(2)] + [complex(big.omega2[i, j]) for j in range(2)]
            for i in range(2)]


def test_integral_basis_63(class63):
    basis = periods.integral_basis(class63, 20)
    f1, f2 = basis.coefficients
    assert [f1[n] for n in range(1, 14)] == [1, 0, 0, 1, 0, 0, 1, 0, 0, -6, 0, 0, 2]
    assert [f2[n] for n in range(1, 12)] == [0, 1, 0, 0, -2, 0, 0, -1, 0, 0, 2]


def test_integral_basis_saturates_half_integers():
    (cls,) = modsym.decompose(modsym.build_space(23))
    f1, f2 = periods.integral_basis(cls, 30).coefficients
    assert all(float(x).is_integer() for x in f1 + f2)
    assert f1[1] == 1 and f1[2] == 0 and f2[2] == 1


def test_terms_needed(class63):
    assert periods.required_terms(class63, 128) == 952


def test_riemann_relations(big63):
    z = periods.small_period_matrix(big63)
    assert z.symmetry_defect < 1e-40
    assert z.imag_min_eigenvalue() > 0


def test_precision_doubling_shrinks_defect(class63, lattice63, big63):
    low = periods.small_period_matrix(big63).symmetry_defect
    with mpmath.workprec(256):
        high = periods.small_period_matrix(periods.big_period_matrix(class63, lattice63, 256)).symmetry_defect
    assert high <= low * 1e-5


def test_symplectic_basis_is_symplectic(lattice63, big63):
    t = big63.symplectic_basis
    e = lattice63.intersection.primitive
    assert exact.mat_mul(exact.mat_mul(exact.transpose(t), e), t) == exact.standard_symplectic(2)


def test_published_periods_lie_in_our_lattice(big63):
    ours = _full(big63)
    real = np.array([[ours[0][j].real, ours[0][j].imag, ours[1][j].real, ours[1][j].imag] for j in range(4)]).T
    for j in range(4):
        col = np.array([PUBLISHED_63[0][j].real, PUBLISHED_63[0][j].imag,
                        PUBLISHED_63[1][j].real, PUBLISHED_63[1][j].imag])
        coeffs = np.linalg.solve(real, col)
        assert np.allclose(coeffs, np.round(coeffs), atol=1e-5)


def test_published_matrix_is_sp4_equivalent(big63):
    ours = hy.igusa_from_theta(periods.small_period_matrix(big63))
    with mpmath.workprec(64):
        o1 = mpmath.matrix([[PUBLISHED_63[i][j] for j in range(2)] for i in range(2)])
        o2 = mpmath.matrix([[PUBLISHED_63[i][j + 2] for j in range(2)] for i in range(2)])
        z = mpmath.inverse(o1) * o2
        z = (z + z.T) / 2
        theirs = hy.igusa_from_theta(z, mpmath.mpf(10) ** -12)
    assert ours.close_to(theirs, 1e-5)


def test_reduction_preserves_invariants(class63, lattice63):
    raw = periods.big_period_matrix(class63, lattice63, 128, reduce=False)
    red = periods.reduce_period_matrix(raw)
    a = hy.igusa_from_theta(periods.small_period_matrix(raw))
    b = hy.igusa_from_theta(periods.small_period_matrix(red))
    assert a.close_to(b, 1e-30)
    y = periods.small_period_matrix(red).z
    assert abs(y[0, 0].real) <= 0.5 + 1e-30 and abs(y[0, 1].real) <= 0.5 + 1e-30
    assert abs(y[0, 0]) >= 0.99


def test_period_cache_round_trip(tmp_path, big63):
    path = tmp_path / "S63A.periods"
    periods.write_period_cache(path, 63, 0, big63)
    level, k, back = periods.read_period_cache(path)
    assert (level, k, back.precision) == (63, 0, 128)
    assert back.symplectic_basis == big63.symplectic_basis
    for m, n in ((back.omega1, big63.omega1), (back.omega2, big63.omega2)):
        assert all(m[i, j] == n[i, j] for i in range(2) for j in range(2))


def test_period_cache_bad_header(tmp_path):
    from modjac.errors import ParseError
    path = tmp_path / "x.periods"
    path.write_text("nonsense\n")
    with pytest.raises(ParseError):
        periods.read_period_cache(path)


def test_not_principal_rejected():
    from modjac.errors import NotPrincipal
    classes = modsym.decompose(modsym.build_space(67))
    bad = [c for c in classes
           if not modsym.is_principally_polarized(modsym.integral_homology(c).intersection)]
    with pytest.raises(NotPrincipal):
        periods.big_period_matrix(bad[0], modsym.integral_homology(bad[0]), 128)
