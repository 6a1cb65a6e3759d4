"""
First integrals of the Chebyshev field
======================================

For Chebyshev polynomials the Riccati equation can be integrated in closed
form with T_n and U_(n-1).  The integral is written twice: in the reduced
variable w and in the original v, related by w = -x/(2 rho) - mu v/rho.
"""
import numpy as np

from opf.integrals import (bridge_wv, chebyshev_system, check_first_integral_flow,
                           first_integral_v, first_integral_w, reduced_equation)
from opf.integrator import integrate

n, mu = 3, 1
print("reduced equation  dw/dx = q - w^2,  q =", reduced_equation(n).to_str())
print("I(w) =", first_integral_w(n))
print("I(v) =", first_integral_v(n, mu))

###############################################################################
# Follow one trajectory and watch |I| stay put.
sys = chebyshev_system(n, mu)
I = first_integral_v(n, mu)
tr = integrate(sys, (0.2, 0.3), 0.5, tol=1e-11, max_step=0.005)
vals = np.array([abs(complex(I(v, x))) for v, x in tr.points])
print(f"\n{len(vals)} samples, |I| in [{vals.min():.12f}, {vals.max():.12f}]")

chk = check_first_integral_flow(I, sys, [(0.2, 0.3), (-0.3, 0.1)])
print("relative drift:", chk.max_drift)

###############################################################################
# The two forms agree through the bridge map.
br = bridge_wv(mu)
for v, x in [(0.5, 0.2), (-1.5, -0.6)]:
    w = br.forward(v, x)
    print(f"(v, x) = ({v}, {x}):  I_v = {complex(I(v, x)):.12g}   I_w = {complex(first_integral_w(n)(w, x)):.12g}")
