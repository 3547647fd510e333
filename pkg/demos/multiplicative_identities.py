"""Integer-side machinery: smooth divisors, counting functions, and the
multiplicative identities behind the mean-value constants.
"""

import math

from smoothdiv import build_omega, build_rho
from smoothdiv.arith import (
    build_spf_sieve,
    count_rough,
    count_smooth,
    euler_factor_identity,
    euler_factor_ratio,
    smooth_divisors,
    tau_ratio,
    tau_smooth,
)

sieve = build_spf_sieve(10**6)

print("smooth divisors")
for (n, y) in ((12, 2), (12, 12), (360, 5)):
    divs = smooth_divisors(n, y, sieve)
    print(f"  divisors of {n} that are {y}-smooth: {divs} (tau = {tau_smooth(n, y, sieve)})")

print()
print("counting functions at x = 10^6, y = 100 vs their density main terms")
rho = build_rho(12.0)
omega = build_omega(12.0)
x, y = 10**6, 100.0
u = math.log(x) / math.log(y)
smooth = count_smooth(x, y, sieve)
rough = count_rough(x, y, sieve)
print(f"  u = log x / log y = {u:.3f}")
print(f"  smooth count {smooth}; x*rho(u) = {x*rho(u):.0f}; ratio {smooth/(x*rho(u)):.4f}")
main = x * omega(u) / math.log(y) - y / math.log(y)
print(f"  rough  count {rough}; main term = {main:.0f}; ratio {rough/main:.4f}")

print()
print("divisor-count ratios are exact rationals:")
for (d, n) in ((2, 2), (1, 6), (2, 3), (12, 18)):
    print(f"  tau({d})/tau({d}*{n}) = {tau_ratio(d, n, sieve)}")

print()
print("per-prime euler factors of the mean-value weight g:")
for d in (1, 2, 3, 4, 6, 30):
    print(f"  g({d}) = {euler_factor_ratio(d):.12f}")
print(f"  closed form at d=2: 2 - 1/log 2 = {2 - 1/math.log(2):.12f}")

print()
print("the product normalization collapses prime by prime to 1:")
for p in (2, 3, 5, 7, 97):
    print(f"  factor at p={p}: {euler_factor_identity(p):.15f}")
