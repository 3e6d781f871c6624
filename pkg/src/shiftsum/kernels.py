"""Hot numeric loops with two interchangeable backends.

Every kernel exists twice: a scalar-loop variant compiled with numba's
@njit, and a vectorized pure-numpy variant.  The active backend is
chosen at import time: set SHIFTSUM_NUMBA=0 (or "false"/"no"/"off") to
force the numpy path; it is also selected automatically when numba is
not importable.  ``BACKEND`` names the active path and both variants
stay importable (``*_nb`` / ``*_np``) so they can be benchmarked
against each other in the same process.

Summation discipline: inner loops accumulate with Kahan compensation
in fixed left-to-right order, so results are independent of the thread
count.  The numpy variants use exact pairwise machinery (math.fsum /
cumulative sums) instead; they are deterministic as well, just not
bit-identical to the compiled path.
"""

import math
import os

import numpy as np

# Thread-pool sizing must happen before numba is imported: the pool is
# created once, sized from NUMBA_NUM_THREADS, and set_num_threads can
# only shrink within that initial allocation.
os.environ.setdefault("NUMBA_NUM_THREADS", "16")
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

_flag = os.environ.get("SHIFTSUM_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "no", "off")

try:
    import numba
    from numba import njit, prange

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

USE_NUMBA = _want_numba and NUMBA_AVAILABLE
BACKEND = "numba" if USE_NUMBA else "numpy"


def set_threads(n):
    """Clamp the worker pool to n threads; returns the effective count."""
    if n < 1:
        raise ValueError("thread count must be >= 1")
    if not USE_NUMBA:
        return 1
    eff = min(n, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(eff)
    return eff


# ----------------------------------------------------------------------
# numpy variants
# ----------------------------------------------------------------------

def shifted_dot_np(f, g, lo, hi, h):
    """Sum of f[n] * g[n+h] over lo <= n <= hi (exact fsum)."""
    if hi < lo:
        return 0.0
    return math.fsum(np.multiply(f[lo:hi + 1], g[lo + h:hi + h + 1]))


def shifted_dots_np(f, g, X, H):
    """Per-shift sums S[h-1] = sum_{n=X}^{2X-h} f[n] g[n+h], h = 1..H."""
    out = np.empty(H, dtype=np.float64)
    for h in range(1, H + 1):
        out[h - 1] = shifted_dot_np(f, g, X, 2 * X - h, h)
    return out


def window_square_sum_np(f, x0, x1, a):
    """Sum over x in [x0, x1] of (sum_{|n-x|<=a} f[n])^2, clipped at index 0."""
    pref = np.cumsum(f)
    xs = np.arange(x0, x1 + 1)
    hi = np.minimum(xs + a, f.shape[0] - 1)
    lo = xs - a
    left = np.where(lo >= 1, pref[np.maximum(lo - 1, 0)], 0.0)
    w = pref[hi] - left
    return math.fsum(np.square(w))


def _phased_prefix(vals, cosv, sinv, M, U):
    k = cosv.shape[0]
    n = np.arange(M, 2 * M + U + 1)
    r = n % k
    c = vals[n] * cosv[r] + 1j * (vals[n] * sinv[r])
    return np.concatenate(([0.0 + 0.0j], np.cumsum(c)))


def phased_windows_fixed_np(vals, cosv, sinv, M, U):
    pref = _phased_prefix(vals, cosv, sinv, M, U)
    # window [x, x+U] relative to offset M: pref[x+U+1-M] - pref[x-M]
    xs = np.arange(M, 2 * M + 1)
    w = pref[xs + U + 1 - M] - pref[xs - M]
    return np.square(w.real) + np.square(w.imag)


def phased_windows_max_np(vals, cosv, sinv, M, U):
    pref = _phased_prefix(vals, cosv, sinv, M, U)
    xs = np.arange(M, 2 * M + 1)
    best = np.zeros(xs.shape[0], dtype=np.float64)
    for u in range(U + 1):
        w = pref[xs + u + 1 - M] - pref[xs - M]
        np.maximum(best, np.square(w.real) + np.square(w.imag), out=best)
    return best


def exp_sum_pair_np(f, lo, hi, alpha):
    """(Re, Im) of sum_{n=lo}^{hi} f[n] e(n alpha)."""
    if hi < lo:
        return 0.0, 0.0
    n = np.arange(lo, hi + 1)
    z = np.exp((2j * np.pi * alpha) * n) * f[lo:hi + 1]
    return math.fsum(z.real), math.fsum(z.imag)


def divisor_sieve_np(n):
    d = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        d[i::i] += 1
    return d


# ----------------------------------------------------------------------
# numba variants (compiled lazily, cached on disk)
# ----------------------------------------------------------------------

if NUMBA_AVAILABLE:

    @njit(cache=True)
    def shifted_dot_nb(f, g, lo, hi, h):
        s = 0.0
        c = 0.0
        for n in range(lo, hi + 1):
            y = f[n] * g[n + h] - c
            t = s + y
            c = (t - s) - y
            s = t
        return s

    @njit(cache=True, parallel=True)
    def _shifted_dots_nb(f, g, X, H, out):
        for h in prange(1, H + 1):
            s = 0.0
            c = 0.0
            hi = 2 * X - h
            for n in range(X, hi + 1):
                y = f[n] * g[n + h] - c
                t = s + y
                c = (t - s) - y
                s = t
            out[h - 1] = s

    def shifted_dots_nb(f, g, X, H):
        out = np.empty(H, dtype=np.float64)
        if H > 0:
            _shifted_dots_nb(f, g, X, H, out)
        return out

    @njit(cache=True)
    def window_square_sum_nb(f, x0, x1, a):
        w = 0.0
        lo0 = x0 - a
        if lo0 < 0:
            lo0 = 0
        for n in range(lo0, x0 + a + 1):
            w += f[n]
        s = 0.0
        c = 0.0
        x = x0
        while True:
            y = w * w - c
            t = s + y
            c = (t - s) - y
            s = t
            if x == x1:
                break
            w += f[x + 1 + a]
            old = x - a
            if old >= 0:
                w -= f[old]
            x += 1
        return s

    @njit(cache=True)
    def phased_windows_fixed_nb(vals, cosv, sinv, M, U):
        k = cosv.shape[0]
        out = np.empty(M + 1, dtype=np.float64)
        wr = 0.0
        wi = 0.0
        for n in range(M, M + U + 1):
            r = n % k
            wr += vals[n] * cosv[r]
            wi += vals[n] * sinv[r]
        x = M
        while True:
            out[x - M] = wr * wr + wi * wi
            if x == 2 * M:
                break
            nn = x + U + 1
            r = nn % k
            wr += vals[nn] * cosv[r]
            wi += vals[nn] * sinv[r]
            r = x % k
            wr -= vals[x] * cosv[r]
            wi -= vals[x] * sinv[r]
            x += 1
        return out

    @njit(cache=True, parallel=True)
    def phased_windows_max_nb(vals, cosv, sinv, M, U):
        k = cosv.shape[0]
        out = np.empty(M + 1, dtype=np.float64)
        for x in prange(M, 2 * M + 1):
            wr = 0.0
            wi = 0.0
            best = 0.0
            for n in range(x, x + U + 1):
                r = n % k
                wr += vals[n] * cosv[r]
                wi += vals[n] * sinv[r]
                m = wr * wr + wi * wi
                if m > best:
                    best = m
            out[x - M] = best
        return out

    @njit(cache=True)
    def exp_sum_pair_nb(f, lo, hi, alpha):
        # e((n+1)a) = e(na) e(a), with a fresh library evaluation every
        # 1024 steps to stop rounding drift from compounding.
        two_pi = 2.0 * math.pi
        wr = math.cos(two_pi * alpha)
        wi = math.sin(two_pi * alpha)
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        zr = 1.0
        zi = 0.0
        for idx in range(hi - lo + 1):
            if idx % 1024 == 0:
                ang = two_pi * ((alpha * (lo + idx)) % 1.0)
                zr = math.cos(ang)
                zi = math.sin(ang)
            v = f[lo + idx]
            y = v * zr - cr
            t = sr + y
            cr = (t - sr) - y
            sr = t
            y = v * zi - ci
            t = si + y
            ci = (t - si) - y
            si = t
            tr = zr * wr - zi * wi
            zi = zr * wi + zi * wr
            zr = tr
        return sr, si

    @njit(cache=True)
    def divisor_sieve_nb(n):
        d = np.zeros(n + 1, dtype=np.int64)
        for i in range(1, n + 1):
            for j in range(i, n + 1, i):
                d[j] += 1
        return d


# ----------------------------------------------------------------------
# dispatch
# ----------------------------------------------------------------------

if USE_NUMBA:
    shifted_dot = shifted_dot_nb
    shifted_dots = shifted_dots_nb
    window_square_sum = window_square_sum_nb
    phased_windows_fixed = phased_windows_fixed_nb
    phased_windows_max = phased_windows_max_nb
    exp_sum_pair = exp_sum_pair_nb
    divisor_sieve = divisor_sieve_nb
else:
    shifted_dot = shifted_dot_np
    shifted_dots = shifted_dots_np
    window_square_sum = window_square_sum_np
    phased_windows_fixed = phased_windows_fixed_np
    phased_windows_max = phased_windows_max_np
    exp_sum_pair = exp_sum_pair_np
    divisor_sieve = divisor_sieve_np
