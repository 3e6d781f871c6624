"""Farey-mediant arc dissections and arc-decomposed averages.

The unit circle is cut at mediants of consecutive reduced fractions of
order Q.  Endpoints are exact rationals, so the arcs partition
[lo_0, lo_0 + 1) with no float slop; the arc at 0/1 wraps, running
from a negative lower endpoint.  Each arc is additionally capped at
half-width 1/(qQ) around its center a/q; the mediant of neighbours at
order Q never exceeds that distance, so the cap is a safety net rather
than an active constraint.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import DomainError, GridTooSmallError, RangeError
from .expsum import exp_sum_grid, geometric_kernel_grid


@dataclass(frozen=True)
class Arc:
    a: int
    q: int
    lo: Fraction
    hi: Fraction

    @property
    def center(self):
        return Fraction(self.a, self.q)

    @property
    def length(self):
        return self.hi - self.lo


@dataclass(frozen=True)
class FareyDissection:
    Q: int
    arcs: tuple


@dataclass(frozen=True)
class ArcContribution:
    a: int
    q: int
    value: complex

    @property
    def abs_value(self):
        return abs(self.value)


@dataclass(frozen=True)
class ArcDecompositionReport:
    X: int
    H: int
    Q: int
    G: int
    major: ArcContribution
    minor_total: complex
    total: complex
    per_arc: tuple
    l1_integral: float


@dataclass(frozen=True)
class GallagherReport:
    X: int
    theta: float
    G: int
    window_length: int
    lhs: float
    rhs: float
    ratio: float | None


@dataclass(frozen=True)
class VariancePoint:
    M: int
    Delta: float
    h: int
    k: int
    max_mode: bool
    variance: float
    in_lemma_regime: bool


def _farey_fractions(Q):
    """Reduced fractions 0/1 <= a/q <= 1/1 of order Q, ascending."""
    seq = [(0, 1), (1, Q)]
    while seq[-1] != (1, 1):
        a, q = seq[-2]
        b, r = seq[-1]
        k = (Q + q) // r
        seq.append((k * b - a, k * r - q))
    return seq


def dirichlet_dissection(Q):
    """Mediant-bounded arcs of order Q; the 0/1 arc wraps below zero."""
    if Q < 1:
        raise DomainError("Q must be >= 1")
    if Q == 1:
        arc = Arc(a=0, q=1, lo=Fraction(-1, 2), hi=Fraction(1, 2))
        return FareyDissection(Q=1, arcs=(arc,))
    fr = _farey_fractions(Q)

    def med(aq, br):
        return Fraction(aq[0] + br[0], aq[1] + br[1])

    arcs = []
    lo = med(fr[-2], fr[-1]) - 1       # wrapped lower end of the 0/1 arc
    for i in range(len(fr) - 1):       # final 1/1 folds into the 0/1 arc
        a, q = fr[i]
        hi = med(fr[i], fr[i + 1])
        center = Fraction(a, q)
        cap = Fraction(1, q * Q)
        arcs.append(Arc(a=a, q=q, lo=max(lo, center - cap),
                        hi=min(hi, center + cap)))
        lo = hi
    return FareyDissection(Q=Q, arcs=tuple(arcs))


def locate_arc(dissection, x):
    """Index of the arc containing x (any rational/float, taken mod 1)."""
    arcs = dissection.arcs
    x = Fraction(x)
    lo0 = arcs[0].lo
    x = x - math.floor(x - lo0)        # shift into [lo0, lo0 + 1)
    lo_idx, hi_idx = 0, len(arcs) - 1
    while lo_idx < hi_idx:
        mid = (lo_idx + hi_idx + 1) // 2
        if arcs[mid].lo <= x:
            lo_idx = mid
        else:
            hi_idx = mid - 1
    return lo_idx


def grid_assignment(dissection, G):
    """Arc index of alpha = j/G for every j; exact rational comparisons."""
    arcs = dissection.arcs
    out = np.full(G, -1, dtype=np.int64)
    for idx, arc in enumerate(arcs):
        lo, hi = arc.lo, arc.hi
        if lo < 0:                      # wrapped arc: [lo+1, 1) union [0, hi)
            j0 = _ceil_frac(( lo + 1) * G)
            out[j0:G] = idx
            out[0:_ceil_frac(hi * G)] = idx
        else:
            out[_ceil_frac(lo * G):_ceil_frac(hi * G)] = idx
    if (out < 0).any():
        raise AssertionError("grid point escaped the dissection")
    return out


def _ceil_frac(x):
    return -((-x.numerator) // x.denominator)


def arc_decomposed_average(f, g, X, H, Q, G):
    """Shift-averaged sum assembled from per-arc grid quadrature.

    The integrand S_f(alpha) conj(S_g(alpha)) K(alpha, H) is a trig
    polynomial of degree < G whenever G > X + H, so the grid Riemann
    sum is the exact integral and the per-arc pieces add back to the
    direct average.  Requires G >= 8X (power of two).
    """
    if H < 1:
        raise DomainError("H must be >= 1")
    if H >= X:
        raise DomainError(f"H={H} must be smaller than X={X}")
    if G < 8 * X:
        raise GridTooSmallError(f"need G >= 8X = {8 * X}, got {G}")
    dis = dirichlet_dissection(Q)
    sf = exp_sum_grid(f, X, G).values
    sg = exp_sum_grid(g, X, G).values if g is not f else sf
    kern = geometric_kernel_grid(G, H)
    integrand = sf * np.conj(sg) * kern / G
    assign = grid_assignment(dis, G)
    n_arcs = len(dis.arcs)
    acc_re = np.bincount(assign, weights=integrand.real, minlength=n_arcs)
    acc_im = np.bincount(assign, weights=integrand.imag, minlength=n_arcs)
    per_arc = tuple(
        ArcContribution(a=arc.a, q=arc.q, value=complex(acc_re[i], acc_im[i]))
        for i, arc in enumerate(dis.arcs))
    major = per_arc[0]
    minor_re = math.fsum(c.value.real for c in per_arc[1:])
    minor_im = math.fsum(c.value.imag for c in per_arc[1:])
    minor = complex(minor_re, minor_im)
    total = complex(major.value.real + minor_re, major.value.imag + minor_im)
    l1 = math.fsum(np.abs(sf) * np.abs(sg)) / G
    return ArcDecompositionReport(X=X, H=H, Q=Q, G=G, major=major,
                                  minor_total=minor, total=total,
                                  per_arc=per_arc, l1_integral=l1)


def gallagher_compare(f, X, theta):
    """Truncated-frequency mass against the long-window second moment.

    lhs: mean of |S_f|^2 over grid frequencies within theta of zero.
    rhs: theta^2 times the sum of squared window sums of length
    floor(1/theta) starting at every x in [X/2, 2X).
    """
    if not 0.0 < theta < 0.5:
        raise DomainError("theta must lie in (0, 1/2)")
    if X < 4:
        raise DomainError("X must be >= 4")
    L = int(1.0 / theta)
    if f.n_max < 2 * X + L:
        raise RangeError(f"table reaches {f.n_max}, need {2 * X + L}")
    G = 1 << (8 * X - 1).bit_length()
    grid = exp_sum_grid(f, X, G).values
    j = np.arange(G)
    near = np.minimum(j, G - j) / G < theta
    lhs = math.fsum(np.square(np.abs(grid[near]))) / G
    cum = np.cumsum(f.values[:2 * X + L + 1])
    x0 = (X + 1) // 2
    xs = np.arange(x0, 2 * X)
    w = cum[xs + L] - cum[xs - 1]
    rhs = theta * theta * math.fsum(np.square(w))
    ratio = lhs / rhs if rhs > 0 else None
    return GallagherReport(X=X, theta=theta, G=G, window_length=L,
                           lhs=lhs, rhs=rhs, ratio=ratio)


def short_interval_variance(table, M, Delta, h=0, k=1, max_mode=False):
    """Variance of twisted short-window sums over x in [M, 2M].

    Window sums sum_{x <= n <= x + U} a(n) e(n h/k) with U = floor(Delta);
    in max_mode the supremum over window lengths 0..U is taken before
    squaring.  Requires Delta <= sqrt(M) and gcd(h, k) = 1.
    """
    if M < 1:
        raise DomainError("M must be >= 1")
    if Delta <= 0:
        raise DomainError("Delta must be positive")
    if Delta > math.sqrt(M):
        raise DomainError(f"Delta={Delta} exceeds sqrt(M)={math.sqrt(M):.3f}")
    if k < 1:
        raise DomainError("k must be >= 1")
    if math.gcd(abs(h), k) != 1:
        raise DomainError(f"h/k = {h}/{k} is not reduced")
    U = int(Delta)
    if table.n_max < 2 * M + U:
        raise RangeError(
            f"table reaches {table.n_max}, windows need {2 * M + U}")
    # e(n h/k) depends only on n mod k
    ang = 2.0 * np.pi * ((np.arange(k) * (h % k)) % k) / k
    cosv = np.cos(ang)
    sinv = np.sin(ang)
    if max_mode:
        w = kernels.phased_windows_max(table.values, cosv, sinv, M, U)
    else:
        w = kernels.phased_windows_fixed(table.values, cosv, sinv, M, U)
    variance = math.fsum(w)
    regime = k <= Delta ** 0.25
    return VariancePoint(M=M, Delta=float(Delta), h=h, k=k,
                         max_mode=bool(max_mode), variance=float(variance),
                         in_lemma_regime=bool(regime))
