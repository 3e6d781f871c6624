"""Exponential sums over dyadic windows, grids, and the geometric kernel.

S_f(alpha) = sum over X <= n <= 2X of f(n) e(n alpha), e(t) = exp(2 pi i t).

Grids are evaluated at alpha = j/G through a length-G FFT of the window
placed at its residues mod G; with G > 2X there are no collisions, and
the grid values agree with direct evaluation to rounding error.  The
Hermitian mirror V[G-j] = conj(V[j]) is enforced structurally, which
keeps downstream quadrature sums conjugate-stable.
"""

import cmath
import math
import struct
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, GridTooSmallError, RangeError
from .experiments import fit_exponent  # noqa: E402  (cycle-free: experiments has no expsum import at module load)


@dataclass(frozen=True)
class ExpSumGrid:
    X: int
    G: int
    values: np.ndarray     # complex128, values[j] = S_f(j/G)

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class KernelMassReport:
    Q: int
    H: int
    mass: float
    beta_at_max: float
    bound: float
    ratio_to_bound: float | None


@dataclass(frozen=True)
class ScanReport:
    mode: str
    exponent: float
    rows: tuple          # (X, max_abs, ratio_to_X_power)
    fit: object          # ExponentFit over (X, max_abs)


def exp_sum(f, X, alpha):
    """Direct evaluation of S_f(alpha) by phase recurrence."""
    if X < 1:
        raise DomainError("X must be >= 1")
    if f.n_max < 2 * X:
        raise RangeError(f"table reaches {f.n_max}, window needs {2 * X}")
    a = float(alpha) % 1.0
    re, im = kernels.exp_sum_pair(f.values, X, 2 * X, a)
    return complex(re, im)


def exp_sum_grid(f, X, G):
    """S_f at all alpha = j/G, j = 0..G-1, via one real FFT."""
    if X < 1:
        raise DomainError("X must be >= 1")
    if f.n_max < 2 * X:
        raise RangeError(f"table reaches {f.n_max}, window needs {2 * X}")
    if G & (G - 1) or G <= 0:
        raise DomainError("grid size must be a power of two")
    if G < X + 2:
        raise GridTooSmallError(
            f"grid size {G} cannot resolve a window of {X + 1} terms")
    padded = np.zeros(G, dtype=np.float64)
    idx = np.arange(X, 2 * X + 1) % G      # injective: G > X >= index spread
    padded[idx] = f.values[X:2 * X + 1]
    half = np.conj(np.fft.rfft(padded))
    vals = np.empty(G, dtype=np.complex128)
    vals[:G // 2 + 1] = half
    vals[G // 2 + 1:] = np.conj(half[1:G // 2][::-1])
    return ExpSumGrid(X=X, G=G, values=vals)


def parseval_pair(grid, f):
    """(mean square over the grid, window sum of f^2); equal in exact math."""
    lhs = math.fsum(np.square(np.abs(grid.values))) / grid.G
    w = f.values[grid.X:2 * grid.X + 1]
    rhs = math.fsum(np.square(w))
    return lhs, rhs


def write_grid(path, grid):
    """Binary export: X and G as little-endian uint64, then G complex128."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", grid.X, grid.G))
        fh.write(np.ascontiguousarray(grid.values, dtype="<c16").tobytes())


def read_grid(path):
    with open(path, "rb") as fh:
        X, G = struct.unpack("<QQ", fh.read(16))
        vals = np.frombuffer(fh.read(16 * G), dtype="<c16").astype(np.complex128)
    if vals.shape[0] != G:
        raise DomainError(f"{path}: truncated grid payload")
    return ExpSumGrid(X=int(X), G=int(G), values=vals)


def geometric_kernel(alpha, H):
    """K(alpha, H) = sum_{h=1}^{H} e(alpha h), in closed form."""
    if H < 1:
        raise DomainError("H must be >= 1")
    r = float(alpha) - round(float(alpha))
    if r == 0.0:
        return complex(H, 0.0)
    return (cmath.exp(1j * math.pi * r * (H + 1))
            * math.sin(math.pi * r * H) / math.sin(math.pi * r))


def geometric_kernel_grid(G, H):
    """K(j/G, H) for j = 0..G-1 as one vectorized pass."""
    j = np.arange(G, dtype=np.float64)
    r = j / G
    r = np.where(r > 0.5, r - 1.0, r)
    out = np.empty(G, dtype=np.complex128)
    nz = r != 0.0
    rn = r[nz]
    out[nz] = (np.exp(1j * np.pi * rn * (H + 1))
               * np.sin(np.pi * rn * H) / np.sin(np.pi * rn))
    out[~nz] = H
    return out


def kernel_bound(alpha):
    """min(H, 1 / (2 ||alpha||)) is enforced elsewhere; helper for tests."""
    r = abs(float(alpha) - round(float(alpha)))
    return math.inf if r == 0.0 else 1.0 / (2.0 * r)


def kernel_mass_at(dissection, H, beta):
    """sum over arcs with q >= 2 of |K(a/q + beta, H)| at one offset."""
    if H < 1:
        raise DomainError("H must be >= 1")
    alphas = np.array([arc.a / arc.q for arc in dissection.arcs if arc.q >= 2],
                      dtype=np.float64)
    if alphas.size == 0:
        return 0.0
    a = alphas + beta
    r = a - np.round(a)
    mags = np.where(
        r == 0.0, float(H),
        np.abs(np.divide(np.sin(np.pi * r * H), np.sin(np.pi * r),
                         out=np.zeros_like(r), where=r != 0.0)))
    return math.fsum(mags)


def kernel_level_mass(Q, H, dissection, n_beta=17):
    """Max over sampled offsets of sum_{q<=Q} sum_a |K(a/q + beta, H)|.

    Fractions come from the arcs of the supplied dissection with
    q >= 2; beta ranges over a symmetric grid of width 1/Q around 0.
    Compared against the reference envelope Q^2 log Q.
    """
    if H < 1:
        raise DomainError("H must be >= 1")
    if n_beta < 1 or n_beta % 2 == 0:
        raise DomainError("n_beta must be odd and positive")
    betas = np.linspace(-1.0 / (2.0 * Q), 1.0 / (2.0 * Q), n_beta)
    best = -1.0
    best_beta = 0.0
    for b in betas:
        mass = kernel_mass_at(dissection, H, float(b))
        if mass > best:
            best = mass
            best_beta = float(b)
    if best <= 0.0:
        return KernelMassReport(Q=Q, H=H, mass=0.0, beta_at_max=0.0,
                                bound=0.0, ratio_to_bound=None)
    bound = Q * Q * math.log(Q) if Q >= 2 else 0.0
    ratio = best / bound if bound > 0 else None
    return KernelMassReport(Q=Q, H=H, mass=best, beta_at_max=best_beta,
                            bound=bound, ratio_to_bound=ratio)


def uniform_bound_scan(f, x_values, reference_exponent, mode="grid",
                       grid_oversample=4):
    """Empirical growth of max_alpha |sum_{n<=X} f(n) e(n alpha)|.

    mode="zero" tracks the plain partial sums (alpha = 0); mode="grid"
    takes the max over a dense dyadic frequency grid via FFT.  Rows
    pair each X with the observed max and its ratio to X^exponent; the
    fit is the log-log slope of the max against X.
    """
    if mode not in ("zero", "grid"):
        raise DomainError(f"unknown scan mode {mode!r}")
    xs = sorted(set(int(x) for x in x_values))
    if not xs or xs[0] < 2:
        raise DomainError("x_values must be integers >= 2")
    if f.n_max < xs[-1]:
        raise RangeError(f"table reaches {f.n_max}, scan needs {xs[-1]}")
    rows = []
    for X in xs:
        if mode == "zero":
            m = float(np.abs(np.cumsum(f.values[1:X + 1])).max())
        else:
            G = 1 << max(1, (grid_oversample * X - 1).bit_length())
            padded = np.zeros(G, dtype=np.float64)
            padded[1:X + 1] = f.values[1:X + 1]
            m = float(np.abs(np.fft.rfft(padded)).max())
        rows.append((X, m, m / X ** reference_exponent))
    fit = fit_exponent([(x, m) for x, m, _ in rows])
    return ScanReport(mode=mode, exponent=reference_exponent,
                      rows=tuple(rows), fit=fit)
