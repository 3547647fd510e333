"""Exact brute-force check of the limit law at desk scale.

For each n <= x the smooth divisors are enumerated exactly and the mean
distribution of log d / log n is compared to the analytic law; the sup
distance shrinks as x grows.  Defaults stay small; pass --full for the
x = 10^6 run.
"""

import argparse

import numpy as np

from smoothdiv import build_omega, build_rho_k
from smoothdiv.arith import build_spf_sieve, mean_distribution
from smoothdiv.law import LimitLaw, arcsine_cdf

parser = argparse.ArgumentParser()
parser.add_argument("--full", action="store_true", help="go up to x = 10^6")
args = parser.parse_args()

xs = [10**3, 10**4, 10**5] + ([10**6] if args.full else [])

print("building sieve and law ...")
sieve = build_spf_sieve(xs[-1])
law = LimitLaw(build_rho_k(0.5, 46.0), build_omega(15.0))
vs = np.linspace(0.0, 1.0, 21)

print()
print("u = 1.5 (y = x^(2/3)): mean distribution vs the limit law")
ref = np.array([law.cdf(1.5, float(v)) for v in vs])
for x in xs:
    emp = mean_distribution(x, x ** (2.0 / 3.0), vs, sieve)
    sup = float(np.max(np.abs(emp.values - ref)))
    print(f"  x = {x:>8}: sup distance = {sup:.5f}")

print()
print("u = 1 (y = x): mean distribution vs the arcsine law")
ref1 = arcsine_cdf(vs)
for x in xs:
    emp = mean_distribution(x, float(x), vs, sieve)
    sup = float(np.max(np.abs(emp.values - ref1)))
    print(f"  x = {x:>8}: sup distance = {sup:.5f}")

print()
print("a mid-grid slice at the largest x:")
x = xs[-1]
emp = mean_distribution(x, x ** (2.0 / 3.0), vs, sieve)
print("   v     empirical   F(1.5, v)")
for i in range(0, len(vs), 4):
    print(f"  {vs[i]:4.2f}  {emp.values[i]:.6f}   {ref[i]:.6f}")
