"""arithpvi: exact p-adic workbench for arithmetic Painleve VI equations.

The layers, bottom to top:

  padic        scalars over Z_p and its quadratic unramified extension
  jetring      truncated multivariate series in T, T', T'', ... with the
               lifted Frobenius and the p-derivation acting on them
  jetforms     vertical 1- and 2-forms on jet spaces, the omega-basis,
               and the delta-linearization calculus
  elliptic     curve data, the group law over precision-aware scalars,
               the formal disk, and 2-isogeny transport
  deltachar    the order-2 delta-character psi and its evaluation maps
  pvi          the arithmetic Painleve VI equation: problems, solvers,
               isogeny transfer, and the prime integral certificate
  hamiltonian  the contact form nu, its closedness and eigenvalue
               certificates, and the Euler-Lagrange comparison
  cli          a deterministic command line around all of the above
"""

__version__ = "0.1.0"

from .errors import (
    ArithPviError,
    BudgetError,
    ConvergenceError,
    IntegralityError,
    PoleError,
    PrecisionError,
    UnsupportedRegimeError,
    ValidationError,
    ValuationFloorError,
)
from .padic import (
    PadicScalar,
    UnramifiedScalar,
    WittPair,
    Zp2,
    cp_term,
    delta_fermat,
    delta_valuation_certificate,
    teichmuller,
)
