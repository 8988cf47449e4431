"""Numerical tolerances shared across the package.

Every comparison threshold used by the library lives here so that tests and
callers can reason about one table.
"""

#: Coefficient comparisons (closed form vs. matrix routes).
COEFF_ATOL = 1e-9

#: Algebraic identities (unitarity of a single step, eigenvalue sum/product).
IDENTITY_ATOL = 1e-12

#: Unitarity of the full L-step product.
PRODUCT_UNITARITY_ATOL = 1e-10

#: Spectral gap below which the closed form for c_L is refused.
DEGENERATE_GAP = 1e-9

#: |c_{L-1}| at or below this is treated as an exact zero.
SINGULAR_EPS = 1e-14

#: Default tolerance for monotonicity (revival) tests.
MONOTONE_TOL = 1e-10

#: Floor on eigenvalues for physicality checks (uncertainty relation, rho >= 0).
PSD_FLOOR = 1e-10

#: Symmetry / hermiticity / trace tolerance on stored states.
STATE_ATOL = 1e-12

#: Default horizon for finite-L verdicts.
DEFAULT_LMAX = 200
