"""
The devil's staircase
=====================

The staircase P_C solves D^q f = 1_C with f(a) = 0. It is the distribution
function of the natural measure on C, rescaled by (b - a)^q / Gamma(1 + q),
and is evaluated here digit by digit.
"""

import numpy as np

from fractalcalc import FractalTerm, StaircaseEvaluator, integrate_riemann, make_middle_p_cantor

C = make_middle_p_cantor(3)
P = StaircaseEvaluator(C)
print("Gamma(1 + q) =", P.gamma_factor)
print("Gamma(1 + q) P(1) =", P.gamma_factor * P(1.0))

# flat on every gap, e.g. the central one
print("P on the central gap:", P(np.linspace(1 / 3, 2 / 3, 5)))

# the closed form is the limit of cover sums: compare with a depth-10 sum over
# [0, x]; at set points the straddling interval widens the bracket
for x in (0.25, 0.5, 0.75):
    r = integrate_riemann(FractalTerm(1.0, C), (0.0, x), depth=10)
    print(f"x = {x}: P = {P(x):.10f}, cover bracket [{r.lower:.10f}, {r.upper:.10f}]")

# at the left end the staircase is an exact power law along x = 3^-k
for k in (1, 5, 10):
    h = 3.0**-k
    print(f"P(3^-{k}) * Gamma(1 + q) / h^q = {P(h) * P.gamma_factor / h**C.dimension:.15f}")

# a table for plotting elsewhere
x, p = P.tabulate(9)
for xi, pi in zip(x, p):
    print(f"{xi:.4f}, {pi:.6f}")
