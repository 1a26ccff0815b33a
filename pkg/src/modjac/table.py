"""Published genus-2 models for modular Jacobian surfaces of level N <= 500.

Each entry is (level, letter, ascending integer coefficients of F, minimal over
Z[1/2]).  Letters follow an external ordering and need not agree with the labels
produced by ``modsym.decompose``; curves are matched by Q-isomorphism.
"""

from __future__ import annotations

from fractions import Fraction

from .exact import RationalPolynomial

KNOWN_CURVES = (
    (23, "A", (-7, 10, -11, 2, 2, -8, 1), True),
    (29, "A", (-7, 8, 8, 2, -12, -4, 1), True),
    (31, "A", (-3, -14, -11, 18, 6, -8, 1), True),
    (63, "B", (81, 0, 0, 162, 0, 0, -3), False),
    (65, "B", (42, -62, -7, 28, 3, -4, -1), True),
    (65, "C", (-39, 0, 72, -30, 36, 0, -15), True),
    (67, "B", (1, -4, 2, -2, 1, 2, 1), True),
    (73, "B", (1, 2, 1, 6, 2, -4, 1), True),
    (87, "A", (-3, -6, -11, -6, -2, 0, 1), True),
    (93, "A", (1, 6, 5, -6, 2, 0, 1), True),
    (103, "A", (1, 6, 5, 2, 2, 0, 1), True),
    (107, "A", (-3, -4, -2, 2, 5, 2, 1), True),
    (115, "B", (1, 6, 5, 10, 2, 0, 1), True),
    (117, "B", (-27, 0, 0, -10, 0, 0, 1), True),
    (117, "C", (-27, -36, -48, -18, -12, 0, -3), True),
    (125, "A", (1, 8, 10, 10, 5, 2, 1), True),
    (125, "B", (5, -40, 50, -50, 25, -10, 5), True),
    (133, "A", (1, -8, 10, -6, 5, -2, 1), True),
    (133, "B", (29, -100, 74, 50, -35, -22, -3), True),
    (135, "D", (-11, -30, 9, -10, 6, 0, 1), True),
    (147, "D", (9, -12, 8, 2, -4, 0, 1), True),
    (161, "B", (1, 12, 26, 22, 17, 6, 1), True),
    (167, "A", (-3, 2, -3, -2, 2, -4, 1), True),
    (175, "E", (-3, 8, -14, 6, -3, 2, 1), True),
    (177, "A", (1, -6, 5, -6, 2, 0, 1), True),
    (177, "B", (45, -30, -515, -710, -530, -120, -15), False),
    (188, "B", (1, -2, 1, 1, -1, 1), True),
    (189, "E", (-27, 0, 0, -2, 0, 0, 1), True),
    (191, "A", (1, -6, 5, 2, 2, 0, 1), True),
    (205, "D", (1, -6, 5, 10, 2, 0, 1), True),
    (209, "B", (4, 4, 8, -8, 8, -4, 1), True),
    (213, "B", (-3, 6, -7, 2, 2, 0, 1), True),
    (221, "C", (1, 4, 2, 6, 1, -2, 1), True),
    (224, "C", (154, 56, -118, -48, -34, -8, -2), True),
    (224, "D", (-154, 56, 118, -48, 34, -8, 2), True),
    (243, "C", (-27, 0, 0, 6, 0, 0, 1), True),
    (250, "D", (80, 160, 425, 1050, 325, -140, 20), False),
    (256, "E", (0, -128, 0, 0, 0, 2), True),
    (261, "A", (9, -30, 21, 10, -6, 0, 1), True),
    (261, "B", (-27, -90, -63, 30, 18, 0, -3), True),
    (261, "D", (9, -18, 33, -18, 6, 0, -3), True),
    (262, "C", (-64, -264, -312, -82, 56, -8), True),
    (266, "B", (-16, -8, -19, 6, 13, 16, 8), True),
    (268, "C", (1, 4, 2, -4, 1, -2, 1), True),
    (275, "G", (1, -8, 2, -14, 1, -2, -3), True),
    (279, "A", (-3, 18, -15, -18, -6, 0, -3), True),
    (279, "B", (9, -12, 18, -6, -3, 6, -3), True),
    (287, "A", (-3, -4, -10, -6, -3, 2, 1), True),
    (292, "A", (1, -2, -3, -4, -4, -2, -1), True),
    (297, "E", (4, -12, 12, -8, -12, 0, 1), True),
    (297, "F", (-12, -36, -36, -24, 36, 0, -3), True),
    (299, "A", (1, -4, 6, 6, -7, -10, -3), True),
    (325, "H", (-195, 0, 360, 150, 180, 0, -75), True),
    (335, "B", (-4, -20, -48, 0, 0, -4, 1), True),
    (345, "G", (4, -12, 8, 24, 32, -12, 1), True),
    (351, "A", (5, -18, 9, 18, -6, 0, 1), True),
    (351, "C", (-15, -54, -27, 54, 18, 0, -3), True),
    (351, "D", (665, 336, 714, -602, 525, -210, 21), False),
    (357, "E", (12, -12, 20, -8, 8, 0, 1), True),
    (375, "C", (-155, 90, 325, 450, 550, 240, 105), True),
    (376, "A", (1, -4, 3, 3, -1, -1), True),
    (376, "B", (1, -2, 2, -1, 0, 1), True),
    (380, "D", (5, 5, -4, -7, 0, 1), True),
    (387, "F", (324, 0, 0, 162, 0, 0, -12), False),
    (389, "B", (-11, 46, -45, -20, 23, 10, 1), True),
    (391, "A", (-7, 18, -11, -6, 10, 0, 1), True),
    (424, "A", (5, -8, 10, -8, 6, -2, 1), True),
    (440, "E", (-24, -8, -11, 2, 0, 1), True),
    (440, "G", (8, -8, -7, -2, 0, 1), True),
    (441, "I", (-27, -36, -24, 6, 12, 0, -3), True),
    (464, "I", (-8, -4, -13, -6, -7, -2, -1), True),
    (476, "B", (1, 4, 6, 3, 2, 1), True),
    (476, "D", (-7, 0, -6, 3, -2, 1), True),
    (483, "C", (-27, 90, -67, -34, 26, 12, 1), True),
    (488, "A", (-24, -36, -27, -12, -27, 18, -3), True),
)


def known_levels() -> list[int]:
    return sorted({row[0] for row in KNOWN_CURVES})


def known_curves(level: int) -> list[tuple[str, RationalPolynomial]]:
    """(published label, F) for every published curve of the given level."""
    return [(f"S{n}{letter}", RationalPolynomial([Fraction(c) for c in coeffs]))
            for n, letter, coeffs, _ in KNOWN_CURVES if n == level]


def match_known(level: int, f: RationalPolynomial) -> str | None:
    """Published label of a curve Q-isomorphic to y^2 = f, if any."""
    from .hyperelliptic import models_isomorphic_Q
    for label, g in known_curves(level):
        if models_isomorphic_Q(f, g) == "yes":
            return label
    return None
