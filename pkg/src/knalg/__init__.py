"""Krichever-Novikov algebras on the Riemann sphere with marked points.

Exact rational arithmetic throughout: KN bases and pairings, the function,
vector field and current algebras with their local cocycles, semi-infinite
wedge modules, the Sugawara construction, conformal blocks on a degree window
and the KZ-type connection on them.
"""

from .exact_arith import JetScalar, Poly, RationalFunction
from .kn_forms import MarkedConfig, basis_form, kn_pairing

__all__ = ["JetScalar", "Poly", "RationalFunction", "MarkedConfig", "basis_form", "kn_pairing"]
__version__ = "0.1.0"
