"""Walk through level 63 one stage at a time and print the intermediate objects."""

import mpmath

from modjac import hyperelliptic as hy, modsym, periods, reconstruct, theta
from modjac.exact import RationalPolynomial

mpmath.mp.prec = 128

space = modsym.build_space(63)
(cls,) = modsym.decompose(space)
print(cls.label, "Hecke field disc", cls.hecke_field_disc)
print("a_p:", {p: cls.eigenvalue(p) for p in (2, 5, 7, 11, 13)})

lattice = modsym.integral_homology(cls)
print("intersection form", lattice.intersection.matrix,
      "divisors of primitive form", lattice.intersection.elementary_divisors())

big = periods.big_period_matrix(cls, lattice, 128)
z = periods.small_period_matrix(big)
print("Z =", mpmath.nstr(z.z, 10))
print("symmetry defect", mpmath.nstr(z.symmetry_defect, 3))
print("smallest |even thetanullwert|", mpmath.nstr(theta.min_even_thetanullwert(z), 6))

f0, a = reconstruct.reconstruct_model(big, z)
print("F0 =", f0, " |a| =", a)
f1 = RationalPolynomial([a * c for c in f0.coeffs])
model = reconstruct.resolve_sign(f1, cls)
print("sign", model.sign, "decided at p =", model.separating_prime)
f = reconstruct.integral_model(model.polynomial)
print("y^2 =", f)
print("Igusa:", hy.igusa_algebraic(f).as_tuple())
