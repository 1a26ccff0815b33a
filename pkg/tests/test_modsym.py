from fractions import Fraction

import pytest

from modjac import modsym
from modjac.errors import ParseError, RamanujanBoundViolated

SQRT3 = lambda b: (Fraction(0), Fraction(b))  # noqa: E731


@pytest.mark.parametrize("n", [11, 23, 37, 63, 65])
def test_cuspidal_dimension_is_twice_genus(n):
    assert modsym.build_space(n).cuspidal_dimension == 2 * modsym.genus_x0(n)


def test_level_11_has_no_quadratic_class():
    assert modsym.decompose(modsym.build_space(11)) == []


def test_level_23_golden_ratio():
    (cls,) = modsym.decompose(modsym.build_space(23))
    assert cls.radicand == 5 and cls.hecke_field_disc == 5
    a2 = cls.eigenvalue(2)
    assert a2 in ((Fraction(-1, 2), Fraction(1, 2)), (Fraction(-1, 2), Fraction(-1, 2)))
    assert cls.trace(2) == -1 and cls.norm(2) == -1


def test_level_63_eigenvalues(class63):
    cls = class63
    assert cls.radicand == 3 and cls.label == "S63A"
    sign = 1 if cls.eigenvalue(2)[1] > 0 else -1
    assert cls.eigenvalue(2) == SQRT3(sign)
    assert cls.eigenvalue(5) == SQRT3(-2 * sign)
    assert cls.eigenvalue(11) == SQRT3(2 * sign)
    assert cls.eigenvalue(13) == (2, 0)
    # U_p at the bad primes
    assert cls.eigenvalue(3) == (0, 0)
    assert cls.eigenvalue(7) == (1, 0)


def test_hecke_operators_commute(space63):
    import numpy as np
    t2 = np.array(space63.hecke_operator(2), dtype=object)
    t5 = np.array(space63.hecke_operator(5), dtype=object)
    assert (t2.dot(t5) == t5.dot(t2)).all()


def test_ramanujan_bound_on_computed_eigenvalues(class63):
    for p in modsym.primes_up_to(60):
        if 63 % p:
            a, b = class63.eigenvalue(p)
            for s in (1, -1):
                assert abs(float(a) + s * float(b) * 3 ** 0.5) <= 2 * p ** 0.5


def test_principal_polarization_63(lattice63):
    form = lattice63.intersection
    assert form.content == 2
    assert form.elementary_divisors() == [1, 1, 1, 1]
    assert modsym.is_principally_polarized(form)
    m = form.matrix
    assert all(m[i][j] == -m[j][i] for i in range(4) for j in range(4))


def test_non_principal_class_detected():
    classes = modsym.decompose(modsym.build_space(67))
    divs = sorted(tuple(modsym.integral_homology(c).intersection.elementary_divisors())
                  for c in classes)
    assert divs == [(1, 1, 1, 1), (1, 1, 5, 5)]


def test_eigenvalue_file_round_trip(tmp_path, class63):
    path = tmp_path / "63.eigen"
    modsym.write_eigenvalues(class63, path, 50)
    back = modsym.ingest_eigenvalues(path, "S63A")
    assert back.level == 63 and back.radicand == 3
    assert back.matches(class63)
    assert back.eigenvalues == {p: v for p, v in class63.eigenvalues.items() if p <= 50}


def test_ingest_published_expansion(tmp_path, class63):
    path = tmp_path / "f.eigen"
    path.write_text("level 63 disc 3\n2 0 1\n5 0 -2\n7 1 0\n13 2 0\n")
    assert modsym.ingest_eigenvalues(path).matches(class63)


def test_ingest_empty_file(tmp_path):
    path = tmp_path / "e.eigen"
    path.write_text("")
    with pytest.raises(ParseError):
        modsym.ingest_eigenvalues(path)


def test_ingest_ramanujan_violation(tmp_path):
    path = tmp_path / "bad.eigen"
    path.write_text("level 63 disc 3\n2 100 0\n")
    with pytest.raises(RamanujanBoundViolated):
        modsym.ingest_eigenvalues(path)


def test_labels_are_deterministic():
    a = [c.label for c in modsym.decompose(modsym.build_space(65))]
    b = [c.label for c in modsym.decompose(modsym.build_space(65))]
    assert a == b == ["S65A", "S65B"]
