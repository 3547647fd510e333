"""Acceptance suite: one test per criterion, each printing a PASS line with
the measured error and runtime against the pinned tolerance."""

import math
import time

import numpy as np

from smoothdiv import EULER, convolve
from smoothdiv.arith import (
    count_rough,
    count_smooth,
    mean_distribution,
    rough_count_prefix,
    tau_smooth,
    euler_factor_identity,
)
import smoothdiv.arith as arith
from smoothdiv.law import (
    LimitLaw,
    Piece,
    arcsine_cdf,
    simplex_log_integral,
    tail_integral,
)

GAMMA = EULER.gamma


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def _report(num, label, measured, tol, timer, budget):
    print(
        f"ACCEPTANCE {num:02d} {label}: PASS "
        f"(measured={measured:.3e}, tol={tol:.1e}, {timer.seconds:.2f}s < {budget:g}s)"
    )


def test_criterion_01_special_function_ground_truth(rho, rho_half, omega):
    with _Timer() as t:
        e1 = abs(rho(2.0) - (1.0 - math.log(2.0)))
        e2 = abs(omega(2.5) - (1.0 + math.log(1.5)) / 2.5)
        w = 1.0 + np.arange(rho_half.n + 1) / rho_half.n
        closed = (1.0 - np.log(np.sqrt(w) + np.sqrt(w - 1.0))) / np.sqrt(math.pi * w)
        e3 = float(np.max(np.abs(rho_half(w) - closed)))
    assert e1 <= 1e-8
    assert e2 <= 1e-8
    assert e3 <= 1e-6
    assert t.seconds < 5.0
    _report(1, "special-function ground truth", max(e1, e2, e3), 1e-6, t, 5)


def test_criterion_02_mass_constants(rho, rho_half):
    with _Timer() as t:
        e1 = abs(rho.integrate(0.0, 40.0) - math.exp(GAMMA))
        e2 = abs(rho_half.integrate(0.0, 40.0) - math.exp(GAMMA / 2.0))
    assert e1 <= 1e-6
    assert e2 <= 1e-6
    assert t.seconds < 5.0
    _report(2, "mass constants", max(e1, e2), 1e-6, t, 5)


def test_criterion_03_convolution_identities(rho, rho_half, rho2):
    with _Timer() as t:
        us = np.arange(0.25, 10.25, 0.25)
        e1 = max(abs(convolve(rho_half, rho_half, float(u)) - rho(float(u))) for u in us)
        e2 = max(abs(convolve(rho, rho, float(u)) - rho2(float(u))) for u in us)
    assert e1 <= 1e-6
    assert e2 <= 1e-6
    assert t.seconds < 30.0
    _report(3, "convolution identities", max(e1, e2), 1e-6, t, 30)


def test_criterion_04_buchstab_limit(omega):
    with _Timer() as t:
        v = 10.0 + np.arange(0, 5 * omega.n + 1) / omega.n
        err = float(np.max(np.abs(omega(v) - EULER.e_neg_gamma)))
    assert err <= 1e-6
    assert t.seconds < 5.0
    _report(4, "buchstab limit", err, 1e-6, t, 5)


def test_criterion_05_closed_form_equivalence(law):
    with _Timer() as t:
        vs = np.linspace(0.0, 1.0, 101)
        worst = 0.0
        for u in (1.25, 1.5, 1.75, 2.0):
            for v in vs:
                worst = max(worst, abs(law.cdf(u, float(v)) - law.cdf_closed(u, float(v))))
        cont = 0.0
        for u in (1.25, 1.5, 1.75, 2.0):
            b1 = (u - 1.0) / u
            b2 = 1.0 / u
            cont = max(
                cont,
                abs(
                    LimitLaw.cdf_closed_piece(u, b1, Piece.P1)
                    - LimitLaw.cdf_closed_piece(u, b1, Piece.P2)
                ),
                abs(
                    LimitLaw.cdf_closed_piece(u, b2, Piece.P2)
                    - LimitLaw.cdf_closed_piece(u, b2, Piece.P3)
                ),
            )
        ones = [law.cdf_closed(u, 1.0) for u in (1.25, 1.5, 1.75, 2.0)]
    assert worst <= 1e-6
    assert cont <= 1e-12
    assert all(one == 1.0 for one in ones)
    assert t.seconds < 60.0
    _report(5, "closed-form equivalence on (1,2]", worst, 1e-6, t, 60)


def test_criterion_06_arcsine_reduction(law):
    with _Timer() as t:
        vs = np.linspace(0.0, 1.0, 101)
        err = max(abs(law.cdf(1.0, float(v)) - arcsine_cdf(float(v))) for v in vs)
    assert err <= 1e-8
    assert t.seconds < 10.0
    _report(6, "arcsine reduction at u=1", err, 1e-8, t, 10)


def test_criterion_07_simplex_and_wedge_identities():
    from smoothdiv.law import wedge_integral_closed

    with _Timer() as t:
        e_r = max(
            abs(simplex_log_integral(xi) + math.log1p(-xi)) for xi in (0.1, 0.5, 0.9)
        )
        e_s = 0.0
        for u in (1.25, 1.5, 1.75, 2.0):
            e_s = max(e_s, abs(wedge_integral_closed(u, 0.0)))
            e_s = max(
                e_s, abs(wedge_integral_closed(u, 1.0 - 1.0 / u) - math.log(u))
            )
    assert e_r <= 1e-5
    assert e_s <= 1e-12
    _report(7, "simplex and wedge identities", max(e_r, e_s), 1e-5, t, 10)


def test_criterion_08_tail_recurrence(rho_half):
    with _Timer() as t:
        err = 0.0
        for w in (1.0, 2.0, 5.0):
            lhs = tail_integral(rho_half, w) - tail_integral(rho_half, w + 1.0)
            rhs = 2.0 * (w + 1.0) * rho_half(w + 1.0)
            err = max(err, abs(lhs - rhs))
    assert err <= 1e-8
    _report(8, "tail recurrence", err, 1e-8, t, 10)


def test_criterion_09_euler_factor_identity():
    with _Timer() as t:
        err = max(abs(euler_factor_identity(p, 60) - 1.0) for p in (2, 3, 5, 7))
    assert err <= 1e-12
    _report(9, "per-prime euler factor identity", err, 1e-12, t, 10)


def test_criterion_10_exact_arithmetic_oracles(sieve):
    with _Timer() as t:
        assert count_smooth(30, 5, sieve) == 18
        assert count_rough(30, 5, sieve) == 8
        assert tau_smooth(12, 2, sieve) == 3
        emp = mean_distribution(4, 2, [0.5], sieve)
        assert emp.values[0] == 19.0 / 24.0
        x, y = 10**4, 30
        mask = arith._smooth_mask(x, y, sieve)
        prefix = rough_count_prefix(x, y, sieve)
        total = int(sum(prefix[x // a] for a in np.nonzero(mask)[0]))
        assert total == x
    assert t.seconds < 5.0
    _report(10, "exact arithmetic oracles", 0.0, 0.0 + 1e-300, t, 5)


def test_criterion_11_asymptotic_envelope(law, rho2):
    with _Timer() as t:
        vs = np.linspace(0.0, 1.0, 21)
        ratios = []
        for u in range(4, 11):
            sup = max(abs(law.cdf_defect(float(u), float(v))) for v in vs)
            ratios.append(sup / rho2(float(u)))
        seq = " ".join(f"{r:.3e}" for r in ratios)
        print(f"criterion 11 ratio sequence over u=4..10: {seq}")
        steps = [b / a for a, b in zip(ratios, ratios[1:])]
    assert all(math.isfinite(r) for r in ratios)
    assert all(s <= 1.10 for s in steps)
    assert t.seconds < 120.0
    _report(11, "asymptotic envelope ratios", max(steps), 1.10, t, 120)


def test_criterion_12_empirical_convergence(law, sieve):
    with _Timer() as t:
        vs = np.linspace(0.0, 1.0, 21)
        ref_quad = np.array([law.cdf(1.5, float(v)) for v in vs])
        ref_arc = arcsine_cdf(vs)
        sup_quad = []
        sup_arc = []
        for x in (10**3, 10**4, 10**5, 10**6):
            emp = mean_distribution(x, x ** (2.0 / 3.0), vs, sieve)
            sup_quad.append(float(np.max(np.abs(emp.values - ref_quad))))
            emp1 = mean_distribution(x, float(x), vs, sieve)
            sup_arc.append(float(np.max(np.abs(emp1.values - ref_arc))))
        print(f"criterion 12 sup distances u=1.5: {sup_quad}")
        print(f"criterion 12 sup distances u=1.0: {sup_arc}")
    assert all(b < a for a, b in zip(sup_quad, sup_quad[1:]))
    assert all(b < a for a, b in zip(sup_arc, sup_arc[1:]))
    assert t.seconds < 300.0
    _report(12, "empirical convergence", sup_quad[-1], 1.0, t, 300)
