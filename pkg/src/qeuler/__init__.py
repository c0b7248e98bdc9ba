"""Exact computation of q-Euler numbers and polynomials of Norlund type.

Scalars live in one of three backends (rationals, rational functions of q,
p-adic numbers); see :mod:`qeuler.numeric`.  The families are in
:mod:`qeuler.families`, fermionic Riemann sums in :mod:`qeuler.integrator`,
and the identity checks in :mod:`qeuler.identities`.
"""

from .numeric import FunctionFieldContext, PadicContext, RationalContext

__version__ = "0.1.0"

__all__ = ["FunctionFieldContext", "PadicContext", "RationalContext", "__version__"]
