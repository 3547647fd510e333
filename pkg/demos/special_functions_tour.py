"""Tour of the special functions: the Dickman function, its half and square
convolution powers, and the Buchstab function.

Builds the grids, prints landmark values against closed forms, checks the
total-mass constants, and demonstrates the convolution identities that tie
the family together.  Run with --plot to also save a PNG overview.
"""

import argparse
import math

import numpy as np

from smoothdiv import EULER, build_omega, build_rho, build_rho_k, convolve

parser = argparse.ArgumentParser()
parser.add_argument("--plot", action="store_true", help="save special_functions.png")
args = parser.parse_args()

print("building grids at h = 1e-3 ...")
rho = build_rho(42.0)
rho_half = build_rho_k(0.5, 42.0)
rho2 = build_rho_k(2.0, 12.0)
omega = build_omega(12.0)

print()
print("landmark values vs closed forms")
print(f"  rho(0.5)      = {rho(0.5):.12f}   (flat head: 1)")
print(f"  rho(2)        = {rho(2.0):.12f}   (1 - log 2 = {1 - math.log(2):.12f})")
print(f"  rho_half(1/4) = {rho_half(0.25):.12f}   (2/sqrt(pi) = {2/math.sqrt(math.pi):.12f})")
closed_15 = (1 - math.log(math.sqrt(1.5) + math.sqrt(0.5))) / math.sqrt(1.5 * math.pi)
print(f"  rho_half(1.5) = {rho_half(1.5):.12f}   (closed form  {closed_15:.12f})")
print(f"  omega(1.5)    = {omega(1.5):.12f}   (1/v head:    {1/1.5:.12f})")
print(f"  omega(2.5)    = {omega(2.5):.12f}   ((1+log 1.5)/2.5 = {(1+math.log(1.5))/2.5:.12f})")

print()
print("total masses (integrals over [0, 40])")
m1 = rho.integrate(0.0, 40.0)
m2 = rho_half.integrate(0.0, 40.0)
print(f"  int rho      = {m1:.12f}   e^gamma     = {math.exp(EULER.gamma):.12f}")
print(f"  int rho_half = {m2:.12f}   e^(gamma/2) = {EULER.e_half_gamma:.12f}")

print()
print("the Buchstab function settles at e^-gamma =", f"{EULER.e_neg_gamma:.10f}")
for v in (3.0, 5.0, 8.0, 12.0):
    print(f"  omega({v:4.1f}) = {omega(v):.12f}   deviation {omega(v) - EULER.e_neg_gamma:+.2e}")

print()
print("convolution identities (worst error over u = 0.25 .. 10)")
us = np.arange(0.25, 10.25, 0.25)
e_sqrt = max(abs(convolve(rho_half, rho_half, float(u)) - rho(float(u))) for u in us)
e_square = max(abs(convolve(rho, rho, float(u)) - rho2(float(u))) for u in us)
print(f"  rho_half * rho_half = rho   : {e_sqrt:.2e}")
print(f"  rho * rho           = rho_2 : {e_square:.2e}")

if args.plot:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    w = np.linspace(0.01, 8.0, 1500)
    fig, ax = plt.subplots(1, 2, figsize=(11, 4))
    ax[0].semilogy(w, rho(w), label="rho")
    ax[0].semilogy(w, rho_half(w), label="rho_half")
    ax[0].semilogy(w, rho2(np.minimum(w, 12.0)), label="rho_2")
    ax[0].set_xlabel("w")
    ax[0].legend()
    ax[0].set_title("Dickman family")
    v = np.linspace(1.0, 10.0, 1200)
    ax[1].plot(v, omega(v), label="omega")
    ax[1].axhline(EULER.e_neg_gamma, ls="--", c="gray", label="e^-gamma")
    ax[1].set_xlabel("v")
    ax[1].legend()
    ax[1].set_title("Buchstab function")
    fig.tight_layout()
    fig.savefig("special_functions.png", dpi=120)
    print("\nwrote special_functions.png")
