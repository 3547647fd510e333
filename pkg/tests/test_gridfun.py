import math

import numpy as np
import pytest
from scipy.integrate import quad

from smoothdiv import (
    EULER,
    GridAlignmentError,
    GridRangeError,
    build_omega,
    build_rho,
    build_rho_k,
    convolve,
)


def half_power_closed(w):
    """Independent closed form of the half power on [1, 2]."""
    w = np.asarray(w, dtype=float)
    return (1.0 - np.log(np.sqrt(w) + np.sqrt(w - 1.0))) / np.sqrt(np.pi * w)


# -- rho ----------------------------------------------------------------------


def test_rho_head_and_support(rho):
    assert rho(0.5) == 1.0
    assert rho(0.0) == 1.0
    assert rho(-1.0) == 0.0
    assert rho(-1e-9) == 0.0


def test_rho_log_segment(rho):
    # on [1, 2] the delay equation integrates to 1 - log w
    w = np.linspace(1.0, 2.0, 513)
    assert np.max(np.abs(rho(w) - (1.0 - np.log(w)))) < 1e-8
    assert abs(rho(2.0) - 0.30685281944005469) < 1e-10


def test_rho_beyond_two_vs_quadrature_oracle(rho):
    # rho(w) = 1 - log w + int_2^w log(t-1)/t dt on [2, 3]
    for w in (2.25, 2.5, 3.0):
        tail = quad(lambda t: math.log(t - 1.0) / t, 2.0, w, epsabs=1e-13)[0]
        assert abs(rho(w) - (1.0 - math.log(w) + tail)) < 1e-10


def test_rho_strictly_decreasing(rho):
    nodes = rho.nodes
    vals = rho.values
    solved = nodes >= 1.0
    assert np.all(np.diff(vals[solved]) < 0.0)


def test_rho_rejects_bad_args():
    with pytest.raises(ValueError):
        build_rho(0.5)
    with pytest.raises(GridAlignmentError):
        build_rho(3.0, h=0.02)
    with pytest.raises(GridAlignmentError):
        build_rho(3.0, h=0.0003)
    with pytest.raises(GridAlignmentError):
        build_rho(3.0, h=-1e-3)


# -- rho_k --------------------------------------------------------------------


def test_rho_k_head_values(rho_half, rho2):
    assert abs(rho_half(0.25) - 2.0 / math.sqrt(math.pi)) < 1e-12
    assert rho2(0.5) == 0.5
    assert rho_half(0.0) == 0.0
    assert rho_half(-3.0) == 0.0


def test_rho_half_head_near_zero_relative(rho_half):
    w = 1e-6
    exact = 1.0 / math.sqrt(math.pi * w)
    assert abs(rho_half(w) - exact) / exact < 1e-6
    assert abs(exact - 564.1895835477563) < 1e-6


def test_rho_half_first_segment_closed_form(rho_half):
    w = 1.0 + np.arange(rho_half.n + 1) / rho_half.n
    assert np.max(np.abs(rho_half(w) - half_power_closed(w))) < 1e-6
    # between-node points, including right after the cusp
    wx = 1.0 + np.array([1e-7, 4.2e-4, 3.3e-3, 0.11111, 0.5, 0.999])
    assert np.max(np.abs(rho_half(wx) - half_power_closed(wx))) < 1e-9
    assert abs(rho_half(1.5) - 0.15732470030338181) < 1e-8


def test_rho_k_unit_k_matches_rho(rho):
    # identical away from 0; at 0 itself the k-family is 0 by convention
    gf = build_rho_k(1.0, 6.0)
    w = np.linspace(0.005, 6.0, 1200)
    assert np.max(np.abs(gf(w) - rho(w))) < 1e-12
    assert gf(0.0) == 0.0
    assert rho(0.0) == 1.0


def test_rho_k_rejects_bad_k():
    with pytest.raises(ValueError):
        build_rho_k(0.0, 3.0)
    with pytest.raises(ValueError):
        build_rho_k(-0.5, 3.0)


def test_rho_half_strictly_decreasing(rho_half):
    nodes = rho_half.nodes
    vals = rho_half.values
    solved = nodes >= 1.0
    assert np.all(np.diff(vals[solved]) < 0.0)


def test_grid_convergence_under_h_halving():
    coarse = build_rho(12.0, 1e-3)
    fine = build_rho(12.0, 5e-4)
    w = np.linspace(0.0, 10.0, 2001)
    assert np.max(np.abs(coarse(w) - fine(w))) <= 1e-9


# -- omega --------------------------------------------------------------------


def test_omega_head(omega):
    assert abs(omega(1.5) - 2.0 / 3.0) < 1e-12
    assert omega(1.0) == 1.0
    assert omega(0.5) == 0.0


def test_omega_second_segment(omega):
    # method of steps gives (1 + log(v-1)) / v on [2, 3]
    v = np.linspace(2.0, 3.0, 257)
    assert np.max(np.abs(omega(v) - (1.0 + np.log(v - 1.0)) / v)) < 1e-8


def test_omega_limit(omega):
    v = 10.0 + np.arange(0, 5 * omega.n + 1) / omega.n
    assert np.max(np.abs(omega(v) - EULER.e_neg_gamma)) <= 1e-6


def test_omega_band(omega):
    v = np.linspace(1.0, 15.0, 4001)
    vals = omega(v)
    assert np.all(vals >= 0.5 - 1e-12)
    assert np.all(vals <= 1.0 + 1e-12)


def test_omega_rejects_small_range():
    with pytest.raises(ValueError):
        build_omega(1.5)


# -- generic grid behaviour ----------------------------------------------------


def test_eval_beyond_grid_raises(rho2):
    with pytest.raises(GridRangeError, match="extend the grid"):
        rho2(rho2.grid_end + 0.5)


def test_head_nodes_store_the_head_rule(rho, rho_half, omega):
    for gf in (rho, rho_half, omega):
        nodes = gf.nodes
        mask = (nodes >= gf.support_start) & (nodes <= gf.head_end)
        if gf.kind == "rho_k":
            mask &= nodes > 0.0
        assert np.max(np.abs(gf.values[mask] - gf.head_value(nodes[mask]))) < 1e-12


def test_node_count_matches_geometry(rho, rho_half, omega, rho2):
    for gf in (rho, rho_half, omega, rho2):
        expected = round((gf.grid_end - gf.grid_start) / gf.h) + 1
        assert len(gf.values) == expected
        assert np.all(np.isfinite(gf.values))


def test_values_are_immutable(rho):
    with pytest.raises(ValueError):
        rho.values[0] = 2.0


# -- integration ----------------------------------------------------------------


def test_integrate_head_exact(rho_half):
    assert abs(rho_half.integrate(0.0, 1.0) - 2.0 / math.sqrt(math.pi)) < 1e-10


def test_integrate_empty(rho):
    assert rho.integrate(0.0, 0.0) == 0.0


def test_integrate_rejects_reversed(rho):
    with pytest.raises(ValueError):
        rho.integrate(2.0, 1.0)


def test_integrate_masses(rho, rho_half):
    assert abs(rho.integrate(0.0, 40.0) - math.exp(EULER.gamma)) <= 1e-6
    assert abs(rho_half.integrate(0.0, 40.0) - EULER.e_half_gamma) <= 1e-6


def test_integrate_additive(rho_half):
    rng = np.random.default_rng(7)
    for _ in range(25):
        pts = np.sort(rng.uniform(0.0, 20.0, size=3))
        whole = rho_half.integrate(pts[0], pts[2])
        split = rho_half.integrate(pts[0], pts[1]) + rho_half.integrate(pts[1], pts[2])
        assert abs(whole - split) <= 1e-12


def test_integrate_beyond_grid_raises(rho2):
    with pytest.raises(GridRangeError, match="extend the grid"):
        rho2.integrate(0.0, rho2.grid_end + 1.0)


# -- convolution ----------------------------------------------------------------


def test_convolve_beta_normalization(rho_half):
    # the half-power heads integrate to a Beta(1/2,1/2) mass of exactly pi
    assert abs(convolve(rho_half, rho_half, 0.5) - 1.0) <= 1e-8
    assert abs(convolve(rho_half, rho_half, 1.0) - 1.0) <= 1e-8


def test_convolve_flat_heads(rho):
    assert abs(convolve(rho, rho, 0.5) - 0.5) <= 1e-10


def test_convolve_square_root_identity_spot(rho, rho_half):
    assert abs(convolve(rho_half, rho_half, 2.0) - rho(2.0)) <= 1e-6


def test_convolve_symmetry(rho, rho_half, omega):
    for (f, g, u) in ((rho_half, rho, 3.3), (rho_half, omega, 4.1), (rho, omega, 2.7)):
        assert abs(convolve(f, g, u) - convolve(g, f, u)) <= 1e-10


def test_convolve_empty_and_range(rho, rho_half):
    assert convolve(rho_half, rho_half, 0.0) == 0.0
    with pytest.raises(GridRangeError):
        convolve(rho_half, rho_half, rho_half.grid_end + 5.0)
    with pytest.raises(ValueError):
        convolve(rho, rho, -1.0)
