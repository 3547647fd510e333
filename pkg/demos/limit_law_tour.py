"""Tour of the limit law F(u, v) for the distribution of smooth divisors.

Shows the arcsine special case at u = 1, the closed forms on 1 < u <= 2
(including the Clausen correction to the wedge integral that published
formulas tend to drop), and the drift toward the large-u main term.
"""

import math

import numpy as np

from smoothdiv import build_omega, build_rho_k
from smoothdiv.law import (
    LimitLaw,
    arcsine_cdf,
    make_law_table,
    wedge_integral_closed,
)

print("building the law from rho_half and omega grids ...")
rho_half = build_rho_k(0.5, 46.0)
omega = build_omega(15.0)
law = LimitLaw(rho_half, omega)

print()
print("u = 1 is the arcsine law (all divisors are smooth when y = x):")
for v in (0.1, 0.25, 0.5, 0.9):
    print(f"  F(1, {v:4.2f}) = {law.cdf(1.0, v):.10f}   arcsine: {arcsine_cdf(v):.10f}")

print()
print("a law table at u = 1.5 with its closed form:")
table = make_law_table(law, 1.5, np.linspace(0.0, 1.0, 11))
print("   v      F_quad        F_closed      |diff|")
for i, v in enumerate(table.v):
    print(
        f"  {v:4.2f}  {table.f_quad[i]:.10f}  {table.f_closed[i]:.10f}"
        f"  {abs(table.f_quad[i]-table.f_closed[i]):.1e}"
    )

print()
print("the wedge integral that builds the closed form needs a Clausen-function")
print("term; dropping it (as printed statements sometimes do) misses badly:")
for (u, b) in ((2.0, 0.25), (1.5, 0.2)):
    full = wedge_integral_closed(u, b)
    t0 = math.asin(math.sqrt(u * b / (u - 1.0)))
    naive = (2 / math.pi) * (math.log(u) + math.log(1 - b)) * t0 - math.log(1 - b)
    print(f"  S(u={u}, b={b}): corrected {full:.9f}   without Clausen term {naive:.9f}")

print()
print("middle piece is just the arcsine shifted by log(u)/2:")
for v in (0.4, 0.5, 0.6):
    print(f"  F(1.5, {v}) - arcsine = {law.cdf(1.5, v) - arcsine_cdf(v):.10f}"
          f"   (log(1.5)/2 = {math.log(1.5)/2:.10f})")

print()
print("large u: F approaches the renormalized mass of rho_half")
for u in (2.0, 4.0, 8.0):
    row = []
    for v in (0.25, 0.5, 0.75):
        row.append(abs(law.cdf(u, v) - law.cdf_asymptotic(u, v)))
    print(f"  u={u:4.1f}: max |F - main term| over v grid = {max(row):.3e}")
