"""Exact integer-side ground truth: sieves, smooth divisors, counting
functions, and the empirical mean distribution they define.

Everything here is exact arithmetic (integers, or floats only where a
probability is formed), so it serves as the oracle against which the
analytic limit law is verified at desk scale.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import SieveLimitError

SIEVE_GUARD = 10**8

# a divisor d counts as <= n**v when log d <= v log n + this slack; at desk
# scale only exact powers sit closer to the boundary, and the slack keeps
# them on the non-strict side
BOUNDARY_SLACK = 1e-12


class SpfSieve:
    """Smallest-prime-factor table up to a limit; factorization in O(log n)."""

    def __init__(self, limit, spf):
        self.limit = int(limit)
        self.spf = spf
        self.spf.setflags(write=False)

    def __repr__(self):
        return f"SpfSieve(limit={self.limit})"


def build_spf_sieve(limit):
    limit = int(limit)
    if limit < 2:
        raise ValueError("sieve limit must be at least 2")
    if limit > SIEVE_GUARD:
        raise SieveLimitError(f"sieve limit {limit} exceeds the guard {SIEVE_GUARD}")
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    rest = spf == 0
    spf[rest] = np.arange(limit + 1, dtype=np.int32)[rest]
    return SpfSieve(limit, spf)


def factorize(n, sieve):
    """Prime factorization of n as ordered (prime, exponent) pairs."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    if n > sieve.limit:
        raise ValueError(f"n={n} beyond the sieve limit {sieve.limit}")
    spf = sieve.spf
    out = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def smooth_divisors(n, y, sieve):
    """All divisors of n free of prime factors exceeding y, ascending;
    always contains 1."""
    divs = [1]
    for p, e in factorize(n, sieve):
        if p > y:
            continue
        divs = [d * p**a for d in divs for a in range(e + 1)]
    return sorted(divs)


def tau_smooth(n, y, sieve):
    """Number of y-smooth divisors of n; multiplicative over coprime n."""
    t = 1
    for p, e in factorize(n, sieve):
        if p <= y:
            t *= e + 1
    return t


def divisor_cdf(n, y, v, sieve):
    """Fraction of y-smooth divisors d of n with log d <= v log n.

    For n = 1 every divisor sits at 0, so the value is 1 for all v >= 0.
    """
    if v < 0.0:
        raise ValueError("v must be nonnegative")
    n = int(n)
    if n == 1:
        return 1.0
    logn = math.log(n)
    divs = smooth_divisors(n, y, sieve)
    count = sum(1 for d in divs if math.log(d) <= v * logn + BOUNDARY_SLACK)
    return count / len(divs)


@dataclass
class EmpiricalCdf:
    """Mean of the per-integer divisor distributions over n <= x."""

    x: int
    y: float
    v_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.v_grid = np.asarray(self.v_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if np.any(np.diff(self.v_grid) <= 0.0):
            raise ValueError("v_grid must be strictly increasing")
        if np.any(np.diff(self.values) < -1e-15):
            raise ValueError("empirical values must be nondecreasing")


def _primes_upto(spf, top):
    idx = np.arange(2, top + 1, dtype=np.int64)
    return idx[spf[2 : top + 1] == idx]


def _tau_smooth_table(x, y, sieve):
    """tau(n, y) for all n <= x by exact multiplicative slicing."""
    tau = np.ones(x + 1, dtype=np.int64)
    tau[0] = 0
    for p in _primes_upto(sieve.spf, x):
        p = int(p)
        if p > y:
            continue
        tau[p::p] *= 2
        pk = p * p
        k = 2
        while pk <= x:
            sl = tau[pk::pk]
            sl //= k
            sl *= k + 1
            pk *= p
            k += 1
    return tau


def _smooth_mask(x, y, sieve):
    """Boolean mask over [0, x]: n has no prime factor exceeding y."""
    rem = np.arange(x + 1, dtype=np.int64)
    for p in _primes_upto(sieve.spf, x):
        p = int(p)
        if p > y:
            continue
        pk = p
        while pk <= x:
            rem[pk::pk] //= p
            pk *= p
    mask = rem == 1
    mask[0] = False
    return mask


# pair-enumeration chunk size for the mean distribution scan
_CHUNK_PAIRS = 1 << 22


def mean_distribution(x, y, v_grid, sieve):
    """(1/x) sum_{n <= x} P(X_{n,y} <= v) on a v-grid, by exact enumeration
    of all (smooth divisor, multiple) pairs.

    The scan is chunked but the chunk layout is fixed, and partial sums are
    combined with exact summation, so the output never depends on how the
    work was split.
    """
    x = int(x)
    if x < 1:
        raise ValueError("x must be positive")
    if x > sieve.limit:
        raise ValueError(f"x={x} beyond the sieve limit {sieve.limit}")
    if y <= 1.0:
        raise ValueError("y must exceed 1")
    v = np.asarray(list(v_grid), dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("v_grid must be a nonempty sequence")
    if np.any(np.diff(v) <= 0.0):
        raise ValueError("v_grid must be strictly increasing")
    if v[0] < 0.0 or v[-1] > 1.0:
        raise ValueError("v_grid must lie in [0, 1]")

    tau = _tau_smooth_table(x, y, sieve)
    inv = np.zeros(x + 1)
    inv[1:] = 1.0 / tau[1:]
    smooth_d = np.nonzero(_smooth_mask(x, y, sieve))[0]

    # one partial sum per divisor d, independent of how d's are chunked;
    # the final merge is exact, so the result cannot depend on partitioning
    per_d = [[] for _ in v]
    counts_all = x // smooth_d
    start = 0
    nd = len(smooth_d)
    while start < nd:
        stop = start
        pairs = 0
        while stop < nd and pairs + counts_all[stop] <= _CHUNK_PAIRS:
            pairs += counts_all[stop]
            stop += 1
        stop = max(stop, start + 1)
        dblk = smooth_d[start:stop]
        counts = counts_all[start:stop]
        total = int(counts.sum())
        starts = np.cumsum(counts) - counts
        offsets = np.repeat(starts, counts)
        m = np.arange(total, dtype=np.int64) - offsets + 1
        nvals = np.repeat(dblk, counts) * m
        w = inv[nvals]
        logd = np.repeat(np.log(dblk.astype(float)), counts)
        logn = np.log(nvals.astype(float))
        for i, vi in enumerate(v):
            if vi >= 1.0:
                continue
            sel = logd <= vi * logn + BOUNDARY_SLACK
            per_d[i].append(np.add.reduceat(w * sel, starts))
        start = stop

    values = np.empty(len(v))
    for i, vi in enumerate(v):
        if vi >= 1.0:
            # every divisor satisfies d <= n, identically
            values[i] = 1.0
        else:
            values[i] = math.fsum(np.concatenate(per_d[i])) / x
    return EmpiricalCdf(x=x, y=float(y), v_grid=v, values=values)


def count_smooth(x, y, sieve):
    """Number of y-smooth integers n <= x, n = 1 included."""
    x = int(x)
    if x > sieve.limit:
        raise ValueError(f"x={x} beyond the sieve limit {sieve.limit}")
    if x < 1:
        return 0
    return int(np.count_nonzero(_smooth_mask(x, y, sieve)))


def count_rough(x, y, sieve):
    """Number of n <= x free of prime factors <= y; n = 1 always counts."""
    x = int(x)
    if x > sieve.limit:
        raise ValueError(f"x={x} beyond the sieve limit {sieve.limit}")
    if x < 1:
        return 0
    return 1 + int(np.count_nonzero(sieve.spf[2 : x + 1] > y))


def rough_count_prefix(x, y, sieve):
    """Array c with c[m] = count_rough(m, y) for all m <= x."""
    x = int(x)
    if x > sieve.limit:
        raise ValueError(f"x={x} beyond the sieve limit {sieve.limit}")
    c = np.zeros(x + 1, dtype=np.int64)
    if x >= 1:
        c[1] = 1
    if x >= 2:
        c[2:] = np.cumsum(sieve.spf[2 : x + 1] > y)
        c[2:] += 1
    return c


def tau_ratio(d, n, sieve):
    """tau(d) / tau(d n) as an exact rational; multiplicative in n."""
    fd = dict(factorize(d, sieve))
    num = 1
    for e in fd.values():
        num *= e + 1
    den = 1
    merged = dict(fd)
    for p, e in factorize(n, sieve):
        merged[p] = merged.get(p, 0) + e
    for e in merged.values():
        den *= e + 1
    return Fraction(num, den)


def _trial_factorize(d):
    d = int(d)
    if d < 1:
        raise ValueError("d must be positive")
    out = []
    p = 2
    while p * p <= d:
        if d % p == 0:
            e = 0
            while d % p == 0:
                d //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if d > 1:
        out.append((d, 1))
    return out


def euler_factor_ratio(d, series_terms=60):
    """The multiplicative weight g(d): per prime power p**b dividing d,
    (sum_a 1/((b+a+1) p**a)) / (sum_a 1/((a+1) p**a)), by truncated series."""
    if series_terms < 40:
        raise ValueError("series_terms must be at least 40")
    result = 1.0
    for p, b in _trial_factorize(d):
        num = 0.0
        den = 0.0
        pa = 1.0
        for a in range(series_terms):
            num += 1.0 / ((b + a + 1) * pa)
            den += 1.0 / ((a + 1) * pa)
            pa *= p
        result *= num / den
    return result


def euler_factor_identity(p, series_terms=60):
    """The per-prime factor of the product identity that normalizes the
    divisor-weight series: (1 - 1/p) sum_{a,j} 1/((a+j+1) p**(a+j)).

    Exactly 1 in the limit; the truncated double sum verifies it."""
    if series_terms < 40:
        raise ValueError("series_terms must be at least 40")
    x = 1.0 / p
    total = 0.0
    # group the double sum over a + j = m; the pair count is min(m+1, 2T-1-m)
    for m in range(2 * series_terms - 2, -1, -1):
        pairs = min(m + 1, 2 * series_terms - 1 - m)
        total += pairs * x**m / (m + 1)
    return (1.0 - x) * total
