"""
Local fractional derivatives and critical orders
================================================

The critical order at x is the exponent of the local power law
|f(x + h) - f(x)| ~ h^beta. At that order the local fractional derivative is
the power-law coefficient times Gamma(1 + q); below it the derivative
vanishes, above it the derivative does not exist.
"""

import math

import numpy as np

from fractalcalc import ScaleLadder, StaircaseEvaluator, estimate_critical_order, lfd_at, make_middle_p_cantor

ladder = ScaleLadder(h0=1e-2, rho=0.5, count=20)

# pure power laws
for beta in (0.3, 0.5, 0.8):
    est = estimate_critical_order(lambda t, b=beta: abs(t) ** b, 0.0, ladder)
    print(f"|t|^{beta}: critical order {est.critical_order:.4f} (fit residual {est.fit_residual:.1e})")

# sqrt(t) at 0 has D^(1/2) = Gamma(3/2)
est = lfd_at(math.sqrt, 0.0, 0.5, ladder, side="right")
print(f"D^(1/2) sqrt(0) = {est.coefficient:.6f}, Gamma(3/2) = {math.gamma(1.5):.6f}")

# smooth functions have vanishing derivatives of order q < 1, but only in the
# limit: the one-sided estimate decays like h^(1 - q)
for h0 in (1e-2, 1e-3, 1e-4):
    est = lfd_at(np.sin, 0.3, 0.6, ScaleLadder(h0, 0.5, 20), side="right")
    print(f"D^0.6 sin(0.3) with h0 = {h0:.0e}: {est.coefficient:.2e}")

# the staircase: its critical order at 0 is the set dimension, the coefficient
# oscillates log-periodically (reported as a band), and gap points are flat
C = make_middle_p_cantor(3)
P = StaircaseEvaluator(C)
est = lfd_at(P, 0.0, C.dimension, side="right")
print(f"staircase at 0: order {est.critical_order:.4f} (q = {C.dimension:.4f}), "
      f"coefficient {est.coefficient:.4f} +- {est.oscillation_band:.4f}")
print("staircase at 1/2:", lfd_at(P, 0.5, C.dimension).locally_constant and "locally constant")
