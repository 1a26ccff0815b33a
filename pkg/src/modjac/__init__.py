"""Modular Jacobian surfaces: genus-2 curves y^2 = F(x) whose Jacobian is a given
two-dimensional factor A_f of J_0(N), found from theta gradients."""

from .errors import ModjacError
from .exact import RationalPolynomial

__version__ = "0.1.0"

__all__ = ["ModjacError", "RationalPolynomial", "__version__"]
