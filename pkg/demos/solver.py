"""
Separable local fractional differential equations
=================================================

dy/dx^q = gbar(x) 1_C(x) h(y) splits into du/dx^q = gbar 1_C and
dy/du = h(y), so H(y) = H(y0) + u(x) with H the antiderivative of 1/h. The
solution only changes on C, and may leave the branch of H (blow up).
"""

import math

import numpy as np

from fractalcalc import (
    FractalTerm,
    HSpec,
    SeparableProblem,
    make_middle_p_cantor,
    solve,
    solve_sum_rhs,
    staircase,
    verify_solution,
)

C = make_middle_p_cantor(3)
one = FractalTerm(1.0, C)
x = np.linspace(0.0, 1.0, 6)

# h(y) = y: y = A exp(P_C(x))
sol = solve(SeparableProblem(one, HSpec.linear(), x0=0.0, y0=2.5))
print("y      :", sol(x))
print("A e^P  :", 2.5 * np.exp(staircase(C, x)))

# h(y) = y^2 with zero integration constant: y = -1/P_C(x) on (0, 1]
sol = solve(SeparableProblem(one, HSpec.quadratic(), x0=0.0, integration_constant=0.0))
print("-1/P   :", sol(x[1:]), "valid on", sol.validity)

# with y(0) = 1 the same equation blows up where P_C(x) = 1
sol = solve(SeparableProblem(one, HSpec.quadratic(), x0=0.0, y0=1.0))
print("blow-up at x =", sol.blowup)
try:
    sol(0.99)
except ValueError as exc:
    print("evaluating past it:", exc)

# any h with a known antiderivative works; the inverse is found numerically
spec = HSpec.custom(lambda y: 1.0 + y * y, math.atan, H_range=(-math.pi / 2, math.pi / 2))
sol = solve(SeparableProblem(one, spec, x0=0.0, y0=0.0))
print("h = 1 + y^2:", sol(x), "vs tan(P):", np.tan(staircase(C, x)))

# non-constant gbar: the running integral comes from cover sums with brackets
term = FractalTerm(lambda t: 1.0 + t, C, lipschitz_bound=1.0)
sol = solve(SeparableProblem(term, HSpec.linear(), x0=0.0, y0=1.0), depth=12)
v = sol.evaluate(1.0)
print(f"gbar = 1 + x: y(1) = {v.y:.10f} in [{v.lower:.10f}, {v.upper:.10f}]")

# candidates are checked through the integral identity H(y) - H(y0) = u(x)
problem = SeparableProblem(one, HSpec.linear(), 0.0, 1.0)
exact = solve(problem)
for name, cand in (("exact", exact), ("shifted", lambda t: exact(t) + 0.1)):
    report = verify_solution(cand, problem, [0.0, 2 / 9, 2 / 3, 8 / 9])
    print(f"{name}: max integral residual {report.max_integral_residual:.2e}")

# two disjoint copies of C drive y through two staircases
C2 = make_middle_p_cantor(3, (2.0, 3.0))
sol = solve_sum_rhs([one, FractalTerm(1.0, C2)], x0=0.0, y0=0.0)
print("sum of staircases:", sol(np.linspace(0.0, 3.0, 7)))
