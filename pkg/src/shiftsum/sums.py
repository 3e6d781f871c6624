"""Shifted convolution sums and their shift-averages.

S(X, h; f, g) = sum over X <= n <= 2X-h of f(n) * conj(g(n+h)).

Tables are real, so every per-shift value carries an exactly zero
imaginary part; results are still typed complex because the averaging
and arc machinery downstream is complex.  Inner summation runs through
the compiled kernels (Kahan, fixed order); combination across shifts
uses math.fsum, which is exact and order-independent.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .coefficients import FClassStats
from .errors import DomainError, RangeError


@dataclass(frozen=True)
class ShiftedSumSpec:
    """Inputs of an averaged shifted sum; weight is optional."""

    f: object
    g: object
    X: int
    H: int
    weight: object = None


@dataclass(frozen=True)
class ShiftedSumResult:
    per_h: np.ndarray      # complex128, per_h[h-1] = S(X, h)
    aggregate: complex
    abs_aggregate: float


@dataclass(frozen=True)
class PartialSumTable:
    """cumulative[j] = fl(cumulative[j-1] + g(j)), cumulative[0] = 0."""

    n_max: int
    cumulative: np.ndarray


def _check_window(f, g, X, h):
    if X < 1:
        raise DomainError("X must be >= 1")
    if h < 0:
        raise DomainError("shift h must be >= 0")
    if h > X:
        raise DomainError(f"shift h={h} exceeds X={X}")
    need = 2 * X
    if f.n_max < need or g.n_max < need:
        raise RangeError(
            f"tables reach {min(f.n_max, g.n_max)}, window needs {need}")


def shifted_sum(f, g, X, h):
    """S(X, h; f, g) for one shift h in [0, X]."""
    _check_window(f, g, X, h)
    val = kernels.shifted_dot(f.values, g.values, X, 2 * X - h, h)
    return complex(val, 0.0)


def averaged_shifted_sum(spec):
    """All shifts 1..H at once, plus the (optionally weighted) aggregate."""
    f, g, X, H = spec.f, spec.g, spec.X, spec.H
    if H < 1:
        raise DomainError("H must be >= 1")
    if H >= X:
        raise DomainError(f"H={H} must be smaller than X={X}")
    _check_window(f, g, X, H)
    w = None
    if spec.weight is not None:
        if spec.weight.n_max < H:
            raise RangeError(
                f"weight table reaches {spec.weight.n_max}, need H={H}")
        w = spec.weight.values[1:H + 1]
    per = kernels.shifted_dots(f.values, g.values, X, H)
    agg_re = math.fsum(per if w is None else np.multiply(w, per))
    per_h = per.astype(np.complex128)
    per_h.setflags(write=False)
    return ShiftedSumResult(per_h=per_h, aggregate=complex(agg_re, 0.0),
                            abs_aggregate=abs(agg_re))


def partial_sums(g, up_to=None):
    """Running sums of g in index order (plain float64 accumulation)."""
    n = g.n_max if up_to is None else up_to
    if n > g.n_max:
        raise RangeError(f"table reaches {g.n_max}, requested {n}")
    cum = np.cumsum(g.values[:n + 1])
    cum.setflags(write=False)
    return PartialSumTable(n_max=n, cumulative=cum)


def reordered_average(f, g, X, H):
    """Sum over h <= H of S(X, h; f, g), computed outer-n inner-h.

    Uses partial sums of g: the inner sum over h collapses to a
    difference of running sums, so the total work is O(X) instead of
    O(X * H).  Equal to summing averaged_shifted_sum per-shift values
    up to floating-point reordering.
    """
    if X < 1:
        raise DomainError("X must be >= 1")
    if H < 0:
        raise DomainError("H must be >= 0")
    if H >= X:
        raise DomainError(f"H={H} must be smaller than X={X}")
    if f.n_max < 2 * X or g.n_max < 2 * X:
        raise RangeError("tables too short for window [X, 2X]")
    if H == 0:
        return complex(0.0, 0.0)
    cum = partial_sums(g, 2 * X).cumulative
    n = np.arange(X, 2 * X)            # n = 2X contributes no h >= 1
    hi = np.minimum(n + H, 2 * X)      # inner shifts run h <= min(H, 2X-n)
    inner = cum[hi] - cum[n]
    total = math.fsum(np.multiply(f.values[X:2 * X], inner))
    return complex(total, 0.0)


def fclass_stats(f, X, A):
    """Variance integral and second moment used for class membership."""
    if X < 1:
        raise DomainError("X must be >= 1")
    if A < 1:
        raise DomainError("window radius A must be >= 1")
    a = int(A)
    if 2 * X + a > f.n_max:
        raise RangeError(
            f"table reaches {f.n_max}, windows need {2 * X + a}")
    var = kernels.window_square_sum(f.values, X, 2 * X - 1, a)
    second = kernels.shifted_dot(f.values, f.values, X, 2 * X, 0)
    return FClassStats(X=X, A=float(A), variance_integral=float(var),
                       second_moment=float(second))
