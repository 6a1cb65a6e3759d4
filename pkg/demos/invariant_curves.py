"""
Invariant curves from orthogonal polynomials
============================================

Every classical family (rho, tau, lambda_n) gives a quadratic field

    v' = (lambda_n/mu) rho + (rho' - tau) v + mu v^2,   x' = rho

and the polynomial f = mu v P_n + rho P_n' is invariant with cofactor
K = rho' + mu v - tau.  Below we build a few instances and divide Xf by f.
"""
from fractions import Fraction

from opf.families import family, registry
from opf.vfield import build_family_system, invariant_curve, lie_derivative, verify_invariant

# the family table
for spec in registry():
    print(f"{spec.id.value:15s} rho={spec.rho.to_str():8s} tau={spec.tau.to_str():10s} "
          f"lambda_n={spec.lambda_rule}")

###############################################################################
# Hermite, n = 3: the cofactor is linear and the division is exact.
sys = build_family_system(family("hermite"), 3, 1)
curve = invariant_curve(family("hermite"), 3, 1)
print("\n", sys)
print("f =", curve.f)
chk = verify_invariant(sys, curve.f)
print("exact:", chk.exact, " cofactor:", chk.cofactor)

###############################################################################
# A Jacobi instance with rational parameters: the identity is checked in
# exact arithmetic, so the residual is literally the zero polynomial.
spec = family("jacobi", Fraction(1, 2), Fraction(-1, 2))
for n in range(5):
    c = invariant_curve(spec, n, Fraction(-2, 3))
    s = build_family_system(spec, n, Fraction(-2, 3))
    residual = lie_derivative(s, c.f) - c.cofactor * c.f
    print(f"n={n}: deg f = {c.f.total_degree}, residual = {residual}")
