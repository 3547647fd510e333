"""The limiting distribution of smooth divisors.

The limit CDF is

    F(u, v) = int_0^{uv} K(u - s) rho_half(s) ds,
    K(c)    = (rho_half * omega)(c) + rho_half(c),

where * is convolution and rho_half is the half convolution power of the
Dickman function.  ``LimitLaw`` evaluates it by singular quadrature: the
smooth convolution kernel is tabulated once per unit segment with Chebyshev
interpolation in xi = sqrt(c - m) (which absorbs the square-root cusps at the
segment edges), and the outer integral uses adaptive Gauss panels with
square-root substitutions at the singular endpoints.

For 1 < u <= 2 the law also has closed forms built from the arcsine function
and the wedge integral

    S(u, b) = (1/pi) int_0^b int_0^{1-1/u-s} ds dz / (sqrt(s) sqrt(z) (1-s-z))
            = (2/pi) t0 log u
              - [Cl2(2 t0 + 2 a) + Cl2(2 t0 - 2 a) - 2 Cl2(2 t0)] / pi,

with t0 = arcsin sqrt(u b / (u-1)), a = arcsin sqrt(b) and Cl2 the Clausen
function.  (Published statements of this integral sometimes factor the inner
radial range incorrectly and lose the Clausen term; the form above is checked
against direct double quadrature in the test suite.)  The three pieces are

    v in [0, (u-1)/u]  : (2/pi) arcsin sqrt(v) + S(u, v) / 2
    v in [(u-1)/u, 1/u]: (2/pi) arcsin sqrt(v) + log(u) / 2
    v in [1/u, 1]      : (2/pi) arcsin sqrt(v) + S(u, 1 - v) / 2
"""

import enum
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import GridRangeError, QuadratureError
from .gridfun import EULER_GAMMA, GridFunction, convolve
from .quadrature import adaptive_gauss, integrate_panels

__all__ = [
    "arcsine_cdf",
    "clausen2",
    "wedge_integral_closed",
    "simplex_log_integral",
    "simplex_log_closed",
    "Piece",
    "piece_of",
    "LimitLaw",
    "LawTable",
    "make_law_table",
    "tail_integral",
]

_E_NEG_HALF_GAMMA = math.exp(-EULER_GAMMA / 2.0)

# probabilities may stick out of [0, 1] by at most this before it is an error
CLAMP_SLACK = 1e-9


def arcsine_cdf(v):
    """(2/pi) arcsin(sqrt(v)), the u = 1 limit law."""
    v = np.asarray(v, dtype=float)
    if np.any((v < 0.0) | (v > 1.0)):
        raise ValueError("v must lie in [0, 1]")
    out = 2.0 * np.arcsin(np.sqrt(v)) / math.pi
    return float(out) if out.ndim == 0 else out


def clausen2(theta):
    """Clausen function Cl2(theta) = sum sin(k theta) / k**2."""
    with mpmath.workdps(25):
        return float(mpmath.clsin(2, theta))


def wedge_integral_closed(u, beta):
    """Closed form of the wedge double integral S(u, beta), 0 <= beta <= 1-1/u."""
    u = float(u)
    beta = float(beta)
    if not u > 1.0:
        raise ValueError("the wedge integral needs u > 1")
    c = 1.0 - 1.0 / u
    if beta < -1e-12 or beta > c + 1e-12:
        raise ValueError(f"beta={beta!r} outside [0, 1 - 1/u]")
    if beta <= 0.0:
        return 0.0
    beta = min(beta, c)
    theta0 = math.asin(math.sqrt(min(beta / c, 1.0)))
    alpha = math.asin(math.sqrt(min(beta, 1.0)))
    cl = clausen2(2.0 * theta0 + 2.0 * alpha) + clausen2(2.0 * theta0 - 2.0 * alpha)
    cl -= 2.0 * clausen2(2.0 * theta0)
    return 2.0 / math.pi * theta0 * math.log(u) - cl / math.pi


def simplex_log_integral(xi, tol=1e-9):
    """The simplex integral (1/pi) iint ds dz / (sqrt(s) sqrt(z) (1-s-z)) over
    {s, z >= 0, s + z <= xi}, computed by quadrature after the change of
    variables s = r w, z = r (1 - w) that splits it into two 1-d factors."""
    xi = float(xi)
    if not 0.0 <= xi < 1.0:
        raise ValueError("the integral diverges unless 0 <= xi < 1")
    if xi == 0.0:
        return 0.0

    def angular(w):
        return 1.0 / (np.sqrt(w) * np.sqrt(1.0 - w))

    ang = integrate_panels(angular, [0.0, 0.5, 1.0], sqrt_edges=(0.0, 1.0), tol=tol) / math.pi

    def radial(r):
        return 1.0 / (1.0 - r)

    rad = adaptive_gauss(radial, 0.0, xi, tol=tol)
    return ang * rad


def simplex_log_closed(xi):
    xi = float(xi)
    if not 0.0 <= xi < 1.0:
        raise ValueError("the integral diverges unless 0 <= xi < 1")
    return -math.log1p(-xi)


class Piece(enum.IntEnum):
    """The three v-intervals of the closed form for 1 < u <= 2."""

    P1 = 1
    P2 = 2
    P3 = 3


def piece_of(u, v):
    """Piece selector; a v exactly on a boundary takes the lower piece."""
    if v <= (u - 1.0) / u:
        return Piece.P1
    if v <= 1.0 / u:
        return Piece.P2
    return Piece.P3


def tail_integral(gf, w, span=40.0):
    """int_w^infinity of a superexponentially decaying grid function,
    truncated at w + span; the discarded remainder is bounded through the
    stepping identity and must sit below 1e-12."""
    w = float(w)
    if w < 0.0:
        raise ValueError("w must be nonnegative")
    top = w + span
    value = gf.integrate(w, top)
    probe = min(top + 1.0, gf.grid_end)
    remainder = 4.0 * (top + 1.0) * gf(probe)
    if remainder > 1e-12:
        raise QuadratureError(
            f"tail truncation at {top:g} leaves a remainder near {remainder:.2e}"
        )
    return value


def tail_series(rho_half, x, floor=1e-19):
    """int_x^infinity rho_half for x > 0 via the exact stepping identity
    (the tail over [w, w+1] equals 2 (w+1) rho_half(w+1), iterated), which
    keeps full absolute accuracy where direct quadrature would cancel.

    The true terms decay superexponentially; once successive terms stop
    even halving, the grid values have reached their rounding plateau and
    the remaining terms are noise, so summation stops there."""
    x = float(x)
    if x <= 0.0:
        raise ValueError("the stepping identity needs x > 0")
    total = 0.0
    prev = math.inf
    k = 1
    while True:
        w = x + k
        if w > rho_half.grid_end:
            break
        term = 2.0 * w * rho_half(w)
        if term < floor or term >= 0.5 * prev:
            break
        total += term
        prev = term
        k += 1
    return total


class LimitLaw:
    """Evaluator of the limit CDF built from rho_half and omega grids.

    Evaluation is pure; the per-segment kernel tables are cached lazily on
    first use, so warm the instance with one call per u-range before sharing
    it across threads.
    """

    KERNEL_POINTS = 48

    def __init__(self, rho_half: GridFunction, omega: GridFunction, tol=1e-10):
        if rho_half.kind != "rho_k" or abs(rho_half.k - 0.5) > 1e-12:
            raise ValueError("first grid must be the half convolution power")
        if omega.kind != "omega":
            raise ValueError("second grid must be a Buchstab grid")
        self.rho_half = rho_half
        self.omega = omega
        self.tol = float(tol)
        self.clamp_count = 0
        self._segments = {}
        self._delta_segments = {}
        # K(c) needs rho_half on [0, c-1] and omega on [1, c]
        self.c_max = min(rho_half.grid_end + 1.0, omega.grid_end)

    # -- smooth kernel G = rho_half * omega ---------------------------------

    def _segment_coeffs(self, m):
        coeffs = self._segments.get(m)
        if coeffs is None:
            t = np.polynomial.chebyshev.chebpts1(self.KERNEL_POINTS)
            xi = 0.5 * (t + 1.0)
            cs = m + xi * xi
            vals = np.array(
                [convolve(self.rho_half, self.omega, c, tol=1e-12) for c in cs]
            )
            coeffs = np.polynomial.chebyshev.chebfit(t, vals, self.KERNEL_POINTS - 1)
            self._segments[m] = coeffs
        return coeffs

    def kernel_smooth(self, c):
        """(rho_half * omega)(c), vectorized; zero for c <= 1."""
        c = np.atleast_1d(np.asarray(c, dtype=float))
        if np.any(c > self.c_max + 1e-9):
            raise GridRangeError(
                f"kernel argument beyond {self.c_max:.6g}: extend the grid"
            )
        out = np.zeros_like(c)
        live = c > 1.0
        if np.any(live):
            cl = np.minimum(c[live], self.c_max)
            seg = np.ceil(cl - 1e-12).astype(int) - 1
            seg = np.maximum(seg, 1)
            res = np.empty_like(cl)
            for m in np.unique(seg):
                mask = seg == m
                xi = np.sqrt(cl[mask] - m)
                res[mask] = np.polynomial.chebyshev.chebval(
                    2.0 * xi - 1.0, self._segment_coeffs(int(m))
                )
            out[live] = res
        return out

    def kernel(self, c):
        """K(c) = (rho_half * omega)(c) + rho_half(c)."""
        c = np.atleast_1d(np.asarray(c, dtype=float))
        return self.kernel_smooth(c) + self.rho_half(c)

    # -- the law -------------------------------------------------------------

    def _check_uv(self, u, v):
        if not u >= 1.0:
            raise ValueError(f"u must be at least 1, got {u!r}")
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"v must lie in [0, 1], got {v!r}")
        if u > self.c_max + 1e-9:
            raise GridRangeError(
                f"u={u:.6g} beyond the tabulated range {self.c_max:.6g}: extend the grid"
            )

    def _outer_panels(self, u, hi):
        points = {0.0, hi}
        points.update(float(m) for m in range(1, math.floor(hi) + 1))
        points.update(
            u - float(m) for m in range(math.ceil(u - hi), math.floor(u) + 1)
        )
        points = sorted(p for p in points if 0.0 <= p <= hi)
        edges = {e for e in (0.0, 1.0, u - 1.0, u) if points[0] <= e <= points[-1]}
        return points, edges

    def _mass(self, u, hi, shift=0.0, tol=None):
        """int_0^hi (K(u - s) - shift) rho_half(s) ds."""
        if hi <= 0.0:
            return 0.0
        points, edges = self._outer_panels(u, hi)

        def integrand(s):
            return (self.kernel(u - s) - shift) * self.rho_half(s)

        # at s = u the kernel reduces to the singular rho_half head; the
        # panel next to it needs the exact edge distance
        forms = {u: lambda d: (self.rho_half(d) - shift) * self.rho_half(u - d)}
        return integrate_panels(
            integrand, points, edges, tol or self.tol, singular_forms=forms
        )

    def _clamp(self, p):
        if p < 0.0:
            if p < -CLAMP_SLACK:
                raise QuadratureError(f"probability {p!r} escaped [0, 1]")
            self.clamp_count += 1
            return 0.0
        if p > 1.0:
            if p > 1.0 + CLAMP_SLACK:
                raise QuadratureError(f"probability {p!r} escaped [0, 1]")
            self.clamp_count += 1
            return 1.0
        return p

    def cdf(self, u, v, tol=None):
        """F(u, v) by singular quadrature."""
        u = float(u)
        v = float(v)
        self._check_uv(u, v)
        return self._clamp(self._mass(u, u * v, tol=tol))

    def cdf_asymptotic(self, u, v):
        """Large-u main term exp(-gamma/2) int_0^{uv} rho_half.

        Only the rho_half grid is consulted, so u may exceed the kernel
        range as long as u v stays on that grid."""
        u = float(u)
        v = float(v)
        if not u >= 1.0:
            raise ValueError(f"u must be at least 1, got {u!r}")
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"v must lie in [0, 1], got {v!r}")
        return _E_NEG_HALF_GAMMA * self.rho_half.integral_from_start(u * v)

    # -- cancellation-free defect K(c) - exp(-gamma/2) -----------------------
    #
    # K(c) - exp(-gamma/2) = W(c) + rho_half(c) - exp(-gamma) I(c-1), with
    # W(c) = int_1^c (omega(m) - exp(-gamma)) rho_half(c-m) dm and I the tail
    # integral of rho_half from the stepping identity.  Every term is small by
    # construction, so the difference keeps absolute accuracy far below the
    # size of K itself.

    def _delta_node(self, c):
        eg = math.exp(-EULER_GAMMA)
        if c <= 1.0:
            return self.rho_half(c) - _E_NEG_HALF_GAMMA
        points = {1.0, c}
        points.update(float(m) for m in range(2, math.floor(c) + 1))
        points.update(c - float(j) for j in range(0, math.floor(c - 1.0) + 1))
        points = sorted(p for p in points if 1.0 <= p <= c)
        edges = {e for e in (c, c - 1.0, c - 2.0) if points[0] <= e <= points[-1]}

        def integrand(m):
            return (self.omega(m) - eg) * self.rho_half(c - m)

        forms = {c: lambda d: (self.omega(c - d) - eg) * self.rho_half(d)}
        w = integrate_panels(integrand, points, edges, tol=1e-15, singular_forms=forms)
        return w + self.rho_half(c) - eg * tail_series(self.rho_half, c - 1.0)

    def _delta_coeffs(self, m):
        coeffs = self._delta_segments.get(m)
        if coeffs is None:
            t = np.polynomial.chebyshev.chebpts1(self.KERNEL_POINTS)
            xi = 0.5 * (t + 1.0)
            cs = m + xi * xi
            vals = np.array([self._delta_node(c) for c in cs])
            coeffs = np.polynomial.chebyshev.chebfit(t, vals, self.KERNEL_POINTS - 1)
            self._delta_segments[m] = coeffs
        return coeffs

    def kernel_defect(self, c):
        """K(c) - exp(-gamma/2), vectorized and cancellation-free."""
        c = np.atleast_1d(np.asarray(c, dtype=float))
        if np.any(c > self.c_max + 1e-9):
            raise GridRangeError(
                f"kernel argument beyond {self.c_max:.6g}: extend the grid"
            )
        out = np.empty_like(c)
        lo = c <= 1.0
        if np.any(lo):
            out[lo] = self.rho_half(c[lo]) - _E_NEG_HALF_GAMMA
        hi = ~lo
        if np.any(hi):
            cl = np.minimum(c[hi], self.c_max)
            seg = np.maximum(np.ceil(cl - 1e-12).astype(int) - 1, 1)
            res = np.empty_like(cl)
            for m in np.unique(seg):
                mask = seg == m
                xi = np.sqrt(cl[mask] - m)
                res[mask] = np.polynomial.chebyshev.chebval(
                    2.0 * xi - 1.0, self._delta_coeffs(int(m))
                )
            out[hi] = res
        return out

    def cdf_defect(self, u, v, tol=5e-14):
        """cdf - cdf_asymptotic as one cancellation-free integral."""
        u = float(u)
        v = float(v)
        self._check_uv(u, v)
        hi = u * v
        if hi <= 0.0:
            return 0.0
        points, edges = self._outer_panels(u, hi)

        def integrand(s):
            return self.kernel_defect(u - s) * self.rho_half(s)

        forms = {
            u: lambda d: (self.rho_half(d) - _E_NEG_HALF_GAMMA) * self.rho_half(u - d)
        }
        return integrate_panels(integrand, points, edges, tol, singular_forms=forms)

    def cdf_closed(self, u, v):
        """Closed form of F(u, v), valid for 1 < u <= 2."""
        piece = piece_of(u, v)
        return self.cdf_closed_piece(u, v, piece)

    @staticmethod
    def cdf_closed_piece(u, v, piece):
        """One closed-form piece, evaluated without the range dispatch (the
        continuity checks evaluate two pieces at the same boundary point)."""
        u = float(u)
        v = float(v)
        if not 1.0 < u <= 2.0:
            raise ValueError("the closed form family covers 1 < u <= 2 only")
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"v must lie in [0, 1], got {v!r}")
        base = 2.0 * math.asin(math.sqrt(v)) / math.pi
        if piece == Piece.P1:
            return base + 0.5 * wedge_integral_closed(u, v)
        if piece == Piece.P2:
            return base + 0.5 * math.log(u)
        return base + 0.5 * wedge_integral_closed(u, 1.0 - v)

    def nested_mass_integral(self, u, v, tol=1e-10):
        """exp(-gamma) int_0^{uv} (int_0^{u-s-1} rho_half) rho_half(s) ds."""
        u = float(u)
        v = float(v)
        self._check_uv(u, v)
        hi = u * v
        if hi <= 0.0 or u <= 1.0:
            # the inner range is empty for every s >= 0 when u <= 1
            return 0.0
        hi = min(hi, u)
        points = {0.0, hi}
        points.update(float(m) for m in range(1, math.floor(hi) + 1))
        points.update(
            u - 1.0 - float(m) for m in range(0, math.floor(u - 1.0) + 1)
        )
        points = sorted(p for p in points if 0.0 <= p <= hi)
        if len(points) < 2:
            return 0.0
        edges = {e for e in (0.0, 1.0, u - 1.0) if points[0] <= e <= points[-1]}
        scale = math.exp(-EULER_GAMMA)

        def inner(x):
            return self.rho_half.integral_from_start(x) if x > 0.0 else 0.0

        def integrand(s):
            s = np.atleast_1d(s)
            inn = np.array([inner(u - si - 1.0) for si in s])
            return scale * inn * self.rho_half(s)

        return integrate_panels(integrand, points, edges, tol)


@dataclass
class LawTable:
    """Aligned law values on a v-grid, ready for CSV emission."""

    u: float
    v: np.ndarray
    f_quad: np.ndarray
    f_closed: np.ndarray | None = None
    f_asymptotic: np.ndarray | None = None
    empirical: np.ndarray | None = None
    failures: int = 0

    def columns(self):
        cols = [("v", self.v), ("F_quad", self.f_quad)]
        if self.f_closed is not None:
            cols.append(("F_closed", self.f_closed))
        if self.f_asymptotic is not None:
            cols.append(("F_asymptotic", self.f_asymptotic))
        if self.empirical is not None:
            cols.append(("empirical", self.empirical))
        return cols

    def abs_err(self, a, b):
        cols = dict(self.columns())
        return np.abs(cols[a] - cols[b])


def make_law_table(law, u, v_grid, closed=None, asymptotic=False, empirical=None):
    """Fill a LawTable row by row; quadrature failures mark cells as NaN
    instead of aborting the table."""
    v = np.asarray(list(v_grid), dtype=float)
    if v.size and (np.any(np.diff(v) <= 0.0) or v[0] < 0.0 or v[-1] > 1.0):
        raise ValueError("v_grid must be strictly increasing inside [0, 1]")
    if closed is None:
        closed = 1.0 < u <= 2.0
    quad = np.empty(len(v))
    failures = 0
    for i, vi in enumerate(v):
        try:
            quad[i] = law.cdf(u, vi)
        except QuadratureError:
            quad[i] = math.nan
            failures += 1
    f_closed = None
    if closed:
        f_closed = np.array([law.cdf_closed(u, vi) for vi in v])
    f_asym = None
    if asymptotic:
        f_asym = np.array([law.cdf_asymptotic(u, vi) for vi in v])
    emp = None
    if empirical is not None:
        emp = np.asarray(empirical, dtype=float)
        if emp.shape != v.shape:
            raise ValueError("empirical column must match the v grid")
    return LawTable(
        u=float(u),
        v=v,
        f_quad=quad,
        f_closed=f_closed,
        f_asymptotic=f_asym,
        empirical=emp,
        failures=failures,
    )
